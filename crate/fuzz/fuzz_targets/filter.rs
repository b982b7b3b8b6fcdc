//! Filter realization decoder, including the level-statistics consistency check.

#![no_main]

use libfuzzer_sys::fuzz_target;
use wavedeconv::FilterRealization;

fuzz_target!(|data: &[u8]| {
    let Ok(f) = serde_json::from_slice::<FilterRealization>(data) else {
        return;
    };
    let text = serde_json::to_string(&f).expect("serialize");
    let back: FilterRealization = serde_json::from_str(&text).expect("re-read");
    assert_eq!(back, f);
    for j in 0..f.u_stats().len() as i32 {
        assert!(f.u(j).is_ok());
    }
});
