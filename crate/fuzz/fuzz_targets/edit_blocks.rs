#![no_main]

use libfuzzer_sys::fuzz_target;
use lemmaforge::prover::apply_edit_blocks;

// Input is `base \0 reply`; without a NUL the whole input is the reply.
fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let (base, reply) = s.split_once('\0').unwrap_or(("", s));
    let _ = apply_edit_blocks(base, reply);
});
