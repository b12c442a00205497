#![no_main]

use libfuzzer_sys::fuzz_target;
use lemmaforge::training::Curriculum;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(c) = Curriculum::from_jsonl(text, "fuzz") {
        let back = Curriculum::from_jsonl(&c.to_jsonl(), "fuzz").expect("re-encoded curriculum parses");
        assert_eq!(back.len(), c.len());
        let _ = c.mean_footprint();
    }
});
