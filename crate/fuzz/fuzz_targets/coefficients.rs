#![no_main]

use libfuzzer_sys::fuzz_target;
use wavedeconv::WaveletCoeffs;

fuzz_target!(|data: &[u8]| {
    let Ok(c) = serde_json::from_slice::<WaveletCoeffs>(data) else {
        return;
    };
    let text = serde_json::to_string(&c).unwrap();
    assert_eq!(serde_json::from_str::<WaveletCoeffs>(&text).unwrap(), c);
    assert_eq!(c.iter().count(), c.len());
    for j in -1..=c.max_level() {
        let _ = c.truncated(j);
    }
});
