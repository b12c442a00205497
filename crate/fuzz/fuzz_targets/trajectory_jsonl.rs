#![no_main]

use libfuzzer_sys::fuzz_target;
use lemmaforge::prover::AxiomAllowlist;
use lemmaforge::training::{parse_trajectories, validate_record};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(records) = parse_trajectories(text, "fuzz") {
        let allow = AxiomAllowlist::default();
        for r in &records {
            let _ = validate_record(r, &allow);
        }
    }
});
