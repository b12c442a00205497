#![no_main]

use libfuzzer_sys::fuzz_target;
use lemmaforge::lang::{parse_goal, parse_goal_file};

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        let _ = parse_goal_file(s);
        let _ = parse_goal(s);
    }
});
