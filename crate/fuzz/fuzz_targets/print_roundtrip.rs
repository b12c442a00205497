#![no_main]

use libfuzzer_sys::fuzz_target;
use lemmaforge::lang::{parse_goal_file, print_goal_file};

// Anything that parses must print to text that parses back to the same goals.
fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(goals) = parse_goal_file(s) else { return };
    let text = print_goal_file(&goals);
    let back = parse_goal_file(&text).unwrap_or_else(|e| panic!("reparse failed: {e}\n{text}"));
    assert_eq!(back, goals);
    for g in &goals {
        let _ = g.footprint();
    }
});
