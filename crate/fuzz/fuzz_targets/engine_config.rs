#![no_main]

use libfuzzer_sys::fuzz_target;
use lemmaforge::config::EngineConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(config) = EngineConfig::from_toml_str(text) {
        let _ = config.validate();
        let _ = EngineConfig::from_toml_str(&config.to_toml_string());
    }
});
