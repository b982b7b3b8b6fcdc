//! Replays the checked-in fuzz seeds through the decoders with the same
//! invariants as the fuzz targets, so regressions show up on stable.

use std::path::PathBuf;

use wavedeconv::analysis::bench::BenchConfig;
use wavedeconv::{EstimateResult, FilterRealization, Observation, WaveletCoeffs};

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

fn accepted<T: serde::de::DeserializeOwned + serde::Serialize>(target: &str) -> Vec<(String, T)> {
    seeds(target)
        .into_iter()
        .filter_map(|(name, data)| {
            let v: T = serde_json::from_slice(&data).ok()?;
            let once = serde_json::to_string(&v).unwrap();
            let back: T = serde_json::from_str(&once).unwrap();
            assert_eq!(serde_json::to_string(&back).unwrap(), once, "{name}");
            Some((name, v))
        })
        .collect()
}

#[test]
fn observation_seeds() {
    let ok = accepted::<Observation>("observation");
    let names: Vec<_> = ok.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(names, ["seed_blocks_128.json", "seed_bumps_64.json"]);
}

#[test]
fn filter_seeds() {
    assert_eq!(accepted::<FilterRealization>("filter").len(), 2);
}

#[test]
fn estimate_seeds() {
    for (name, r) in accepted::<EstimateResult>("estimate") {
        assert!(r.kept_count() <= r.raw_coeffs.len(), "{name}");
    }
}

#[test]
fn coefficient_seeds() {
    let ok = accepted::<WaveletCoeffs>("coefficients");
    assert_eq!(ok.len(), 4, "only seed_short is malformed");
}

#[test]
fn bench_config_seeds() {
    let mut valid = 0;
    for (name, data) in seeds("bench_config") {
        let Ok(cfg) = BenchConfig::from_toml(std::str::from_utf8(&data).unwrap()) else {
            continue;
        };
        let back: BenchConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg, "{name}");
        valid += 1;
    }
    assert_eq!(valid, 2);
}
