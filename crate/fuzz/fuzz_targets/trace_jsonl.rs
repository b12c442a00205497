#![no_main]

use libfuzzer_sys::fuzz_target;
use lemmaforge::search::RunTrace;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(trace) = RunTrace::parse_jsonl(text) {
        let again = RunTrace::parse_jsonl(&trace.to_jsonl()).expect("re-encoded trace parses");
        assert_eq!(again.to_jsonl(), trace.to_jsonl());
        let _ = trace.result();
    }
});
