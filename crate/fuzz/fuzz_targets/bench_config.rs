//! Bench TOML parser and validator.

#![no_main]

use libfuzzer_sys::fuzz_target;
use wavedeconv::analysis::bench::BenchConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = BenchConfig::from_toml(s) {
        // validated configs must stay valid through the report's JSON form
        let json = serde_json::to_string(&cfg).expect("serialize");
        let back: BenchConfig = serde_json::from_str(&json).expect("re-read");
        assert_eq!(back, cfg);
        assert!(back.validate().is_ok());
    }
});
