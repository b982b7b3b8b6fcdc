//! Observation JSON decoder: must never panic, and anything it accepts must
//! survive a write/read cycle unchanged.

#![no_main]

use libfuzzer_sys::fuzz_target;
use wavedeconv::Observation;

fuzz_target!(|data: &[u8]| {
    let Ok(obs) = serde_json::from_slice::<Observation>(data) else {
        return;
    };
    let text = serde_json::to_string(&obs).expect("serialize");
    let back: Observation = serde_json::from_str(&text).expect("re-read");
    assert_eq!(back, obs);
    if obs.n() <= 1 << 12 {
        let _ = obs.samples();
        let _ = obs.to_csv();
    }
});
