#![no_main]

use libfuzzer_sys::fuzz_target;
use lemmaforge::prover::wire::{
    decode_check_request, decode_check_response, decode_policy_request, decode_policy_response, encode,
};

fuzz_target!(|data: &[u8]| {
    let Ok(line) = std::str::from_utf8(data) else { return };
    if let Ok(m) = decode_check_request(line) {
        assert!(decode_check_request(&encode(&m)).is_ok());
    }
    if let Ok(m) = decode_check_response(line) {
        assert!(decode_check_response(&encode(&m)).is_ok());
    }
    if let Ok(m) = decode_policy_request(line) {
        assert!(decode_policy_request(&encode(&m)).is_ok());
    }
    if let Ok(m) = decode_policy_response(line) {
        assert!(decode_policy_response(&encode(&m)).is_ok());
    }
});
