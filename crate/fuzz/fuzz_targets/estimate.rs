#![no_main]

use libfuzzer_sys::fuzz_target;
use wavedeconv::EstimateResult;

fuzz_target!(|data: &[u8]| {
    if let Ok(r) = serde_json::from_slice::<EstimateResult>(data) {
        // compare serialized forms: the decoded spectrum is recomputed
        let once = serde_json::to_string(&r).expect("serialize");
        let back: EstimateResult = serde_json::from_str(&once).expect("re-read");
        assert_eq!(serde_json::to_string(&back).unwrap(), once);
        let _ = r.kept_count();
    }
});
