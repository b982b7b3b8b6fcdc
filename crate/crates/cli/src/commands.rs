use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use wavedeconv::analysis::bench::{run_bench, BenchConfig};
use wavedeconv::analysis::rate::{empirical_rate_slope, PowerLawTarget, RateAxis, RateSetup};
use wavedeconv::analysis::zones::RateParams;
use wavedeconv::estimators::estimate as run_estimator;
use wavedeconv::filters::{check_conditions, ConditionConfig, FilterSource, FixedGamma};
use wavedeconv::forward_model::{make_test_signal, simulate as run_simulation};
use wavedeconv::plot::{grid_svg, Chart, Series};
use wavedeconv::rng::seeded_rng;
use wavedeconv::{
    EstimatorConfig, FilterRealization, MeyerBasis, Method, Observation, PeriodicSignal,
    RandomFilterSpec,
};

use crate::{
    BenchArgs, CheckFilterArgs, CliError, EstimateArgs, Outcome, RateArgs, SimulateArgs,
};

type CmdResult = Result<Outcome, CliError>;

fn usage<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Usage(msg.into()))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), CliError> {
    let mut body = serde_json::to_string_pretty(value)?;
    body.push('\n');
    fs::write(dir.join(name), body)?;
    Ok(())
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| {
        CliError::Usage(format!("cannot read {}: {e}", path.display()))
    })?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn points(x: impl Iterator<Item = f64>, y: &[f64]) -> Vec<(f64, f64)> {
    x.zip(y.iter().copied()).collect()
}

pub fn simulate(a: SimulateArgs) -> CmdResult {
    let source: Box<dyn FilterSource> = match (a.lambda, a.alpha) {
        (Some(lambda), _) => Box::new(FixedGamma { nu: a.nu, lambda }),
        (None, Some(alpha)) => Box::new(RandomFilterSpec::new(a.nu, alpha, a.mean_lambda)?),
        (None, None) => return usage("one of --alpha or --lambda is required"),
    };
    let truth = make_test_signal(a.target, a.n)?;
    let sim = run_simulation(&truth, source.as_ref(), a.rsnr, a.seed)?;
    let dir = &a.out.out_dir;
    fs::create_dir_all(dir)?;
    write_json(dir, "observation.json", &sim.observation)?;
    write_json(dir, "filter.json", &sim.filter)?;
    write_json(dir, "truth.json", &truth)?;
    let noisy = sim.observation.samples();
    let mut csv = String::from("t,truth,blurred,observed\n");
    for (i, t) in truth.grid().enumerate() {
        csv.push_str(&format!(
            "{t},{},{},{}\n",
            truth.samples()[i],
            sim.blurred.samples()[i],
            noisy[i]
        ));
    }
    fs::write(dir.join("data.csv"), csv)?;
    let chart = Chart::new(format!(
        "{} blurred and noisy (sigma {:.4e}, seed {})",
        a.target, sim.sigma, a.seed
    ))
    .labels("t", "value")
    .with(Series::markers("observed", points(truth.grid(), &noisy)))
    .with(Series::line("blurred", points(truth.grid(), sim.blurred.samples())))
    .with(Series::line("truth", points(truth.grid(), truth.samples())));
    fs::write(dir.join("data.svg"), chart.to_svg(720.0, 360.0))?;
    println!(
        "simulated {} n={} sigma={:.6e} lambda={}",
        a.target,
        a.n,
        sim.sigma,
        sim.filter
            .lambda()
            .map(|l| format!("{l:.6}"))
            .unwrap_or_else(|| "none".into())
    );
    Ok(Outcome::Pass)
}

/// Rejects flags that the chosen method does not read.
fn check_method_flags(a: &EstimateArgs) -> Result<(), CliError> {
    let m = a.method;
    let mut bad = Vec::new();
    if a.alpha.is_some() && m != Method::D {
        bad.push("--alpha");
    }
    if a.eta.is_some() && m != Method::D {
        bad.push("--eta");
    }
    if a.eta_prime.is_some() && !matches!(m, Method::R | Method::Hybrid) {
        bad.push("--eta-prime");
    }
    if a.threshold.is_some() && m != Method::Fixed {
        bad.push("--threshold");
    }
    if a.level.is_some() && m != Method::Linear {
        bad.push("--level");
    }
    let rate_flags = [a.s, a.p, a.q, a.rho];
    if rate_flags.iter().any(Option::is_some) && !matches!(m, Method::Linear | Method::Hybrid) {
        bad.push("--s/--p/--q/--rho");
    }
    if !bad.is_empty() {
        return usage(format!("{} not used by method {m}", bad.join(", ")));
    }
    match m {
        Method::D if a.alpha.is_none() => usage("method D needs --alpha"),
        Method::Hybrid if a.s.is_none() || a.p.is_none() || a.rho.is_none() => {
            usage("method hybrid needs --s, --p and --rho")
        }
        Method::Linear if a.level.is_none() && a.s.is_none() => {
            usage("method linear needs --level or --s")
        }
        Method::Linear if a.level.is_some() && a.s.is_some() => {
            usage("--level and --s are mutually exclusive")
        }
        _ => Ok(()),
    }
}

pub fn estimate(a: EstimateArgs) -> CmdResult {
    check_method_flags(&a)?;
    let obs: Observation = read_json(&a.obs)?;
    let filter: FilterRealization = read_json(&a.filter)?;
    let truth: Option<PeriodicSignal> = a.truth.as_deref().map(read_json).transpose()?;
    if obs.n() != filter.n() {
        return usage(format!(
            "observation has n = {} but the filter has n = {}",
            obs.n(),
            filter.n()
        ));
    }
    if let Some(t) = &truth {
        if t.n() != obs.n() {
            return usage(format!("truth has n = {} but the data n = {}", t.n(), obs.n()));
        }
    }
    let nu = a.nu.unwrap_or(filter.nu());
    let k = a.filter_scale.unwrap_or_else(|| {
        let lambda = a
            .mean_lambda
            .unwrap_or(wavedeconv::filters::DEFAULT_MEAN_LAMBDA);
        EstimatorConfig::filter_scale_for(nu, lambda)
    });
    let mut cfg = EstimatorConfig::new(a.method, nu, a.alpha.unwrap_or(1.0)).with_filter_scale(k);
    if let Some(eta) = a.eta {
        cfg = cfg.with_eta(eta);
    }
    if let Some(e) = a.eta_prime {
        cfg = cfg.with_eta_prime(e);
    }
    if let Some(t) = a.threshold {
        cfg = cfg.with_fixed_threshold(t);
    }
    if let Some(j) = a.level {
        cfg = cfg.with_linear_level(j);
    }
    if let Some(s) = a.s {
        let rp = RateParams::new(
            s,
            a.p.unwrap_or(2.0),
            a.q.unwrap_or(2.0),
            a.rho.unwrap_or(2.0),
            nu,
        )
        .map_err(|e| CliError::Usage(e.to_string()))?;
        cfg = cfg.with_rate_params(rp);
    }
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let basis = MeyerBasis::new(obs.n())?;
    let est = run_estimator(&obs, &filter, &basis, &cfg)?;
    let dir = &a.out.out_dir;
    fs::create_dir_all(dir)?;
    write_json(dir, "estimate.json", &est)?;
    fs::write(dir.join("estimate.csv"), est.to_csv())?;
    let mut chart = Chart::new(format!("{} estimate", a.method))
        .labels("t", "value")
        .with(Series::line("estimate", points(est.signal.grid(), est.signal.samples())));
    if let Some(t) = &truth {
        chart = chart.with(Series::line("truth", points(t.grid(), t.samples())));
    }
    fs::write(dir.join("estimate.svg"), chart.to_svg(720.0, 360.0))?;
    println!(
        "method {} levels {}..={} kept {} detail coefficients",
        est.method,
        est.levels.0,
        est.levels.1,
        est.kept_count()
    );
    if let Some(t) = &truth {
        let mse = est.mse(t)?;
        println!("mse {mse:.6e}");
        if let Some(limit) = a.max_mse {
            if mse > limit {
                return Ok(Outcome::Fail(format!("mse {mse:.6e} exceeds {limit:.6e}")));
            }
        }
    }
    Ok(Outcome::Pass)
}

pub fn bench(a: BenchArgs) -> CmdResult {
    let text = fs::read_to_string(&a.config)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", a.config.display())))?;
    let cfg = BenchConfig::from_toml(&text)
        .map_err(|e| CliError::Usage(format!("{}: {e}", a.config.display())))?;
    let report = run_bench(&cfg)?;
    let dir = &a.out.out_dir;
    if a.no_plots {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("bench_cells.csv"), report.cells_csv())?;
        fs::write(dir.join("bench_trials.csv"), report.trials_csv())?;
        write_json(dir, "bench.json", &report)?;
    } else {
        report.write_artifacts(dir)?;
    }
    println!("{} cells, {} trials each", report.cells.len(), cfg.trials);
    print!("{}", report.checks_summary());
    if report.all_checks_pass() {
        Ok(Outcome::Pass)
    } else {
        let failed: Vec<&str> = report
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect();
        Ok(Outcome::Fail(format!("bench checks failed: {}", failed.join(", "))))
    }
}

pub fn check_filter(a: CheckFilterArgs) -> CmdResult {
    if a.trials < 100 {
        return usage(format!("--trials must be at least 100, got {}", a.trials));
    }
    if !(1..=16).contains(&a.max_level) {
        return usage(format!("--max-level must be in 1..=16, got {}", a.max_level));
    }
    let source: Box<dyn FilterSource> = match (a.lambda, a.alpha) {
        (Some(lambda), _) => Box::new(FixedGamma { nu: a.nu, lambda }),
        (None, Some(alpha)) => Box::new(RandomFilterSpec::new(a.nu, alpha, a.mean_lambda)?),
        (None, None) => return usage("one of --alpha or --lambda is required"),
    };
    let cfg = ConditionConfig {
        slope_tol: a.slope_tol,
        tail_rel_tol: a.tail_tol,
        ..ConditionConfig::default()
    };
    let mut rng = seeded_rng(a.seed);
    let report = check_conditions(source.as_ref(), a.trials, a.max_level, &cfg, &mut rng)?;
    let dir = &a.out.out_dir;
    fs::create_dir_all(dir)?;
    write_json(dir, "check_filter.json", &report)?;
    let mut csv = String::from("j,mean_l,log2_mean_l\n");
    for (j, m) in report.mean_l.iter().enumerate() {
        csv.push_str(&format!("{j},{m},{}\n", m.log2()));
    }
    fs::write(dir.join("check_filter_levels.csv"), csv)?;
    let mut tail = String::from("t,exceedance\n");
    for (t, p) in &report.tail_curve {
        tail.push_str(&format!("{t},{p}\n"));
    }
    fs::write(dir.join("check_filter_tail.csv"), tail)?;
    let level_chart = Chart::new(format!("log2 mean L_j (slope {:.3})", report.c_low_slope))
        .labels("j", "log2 E L_j")
        .with(Series::markers(
            "observed",
            report
                .mean_l
                .iter()
                .enumerate()
                .map(|(j, m)| (j as f64, m.log2()))
                .collect(),
        ));
    let tail_chart = Chart::new(format!("tail of U_{} 2^(-2 nu j)", report.tail_level))
        .labels("t", "P(U >= t)")
        .log_y()
        .with(Series::markers("empirical", report.tail_curve.clone()));
    fs::write(
        dir.join("check_filter.svg"),
        grid_svg(&[level_chart, tail_chart], 2, 1080.0, 400.0),
    )?;
    println!(
        "E L_j slope {:.4} (expected {:.4}, {})",
        report.c_low_slope,
        report.c_low_expected,
        if report.c_low_pass { "pass" } else { "fail" }
    );
    match (report.tail_exponent, report.tail_expected) {
        (Some(g), Some(e)) => println!(
            "tail exponent {g:.4} (expected {e:.4}, {})",
            if report.c_up_pass == Some(true) { "pass" } else { "fail" }
        ),
        _ => println!("tail exponent not evaluated"),
    }
    for why in &report.inconclusive {
        println!("inconclusive: {why}");
    }
    if report.passed() {
        Ok(Outcome::Pass)
    } else {
        Ok(Outcome::Fail("filter conditions not confirmed".into()))
    }
}

pub fn rate(a: RateArgs) -> CmdResult {
    if a.n_grid.len() < 4 {
        return usage(format!("--n-grid needs at least 4 sizes, got {}", a.n_grid.len()));
    }
    if let Some(&bad) = a.n_grid.iter().find(|&&n| !n.is_power_of_two() || n < 16) {
        return usage(format!("grid sizes must be powers of two >= 16, got {bad}"));
    }
    if a.trials < 2 {
        return usage("--trials must be at least 2");
    }
    if !matches!(a.method, Method::Linear | Method::D | Method::R | Method::Fixed) {
        return usage(format!("rate does not support method {}", a.method));
    }
    if a.level.is_some() && a.method != Method::Linear {
        return usage("--level only applies to the linear method");
    }
    let target = PowerLawTarget {
        s: a.s,
        amplitude: a.amplitude,
        top_level: a.top_level,
    };
    let smallest = *a.n_grid.iter().min().expect("non-empty");
    if a.top_level < 0 || a.top_level > smallest.trailing_zeros() as i32 - 2 {
        return usage(format!(
            "--top-level {} does not fit the smallest grid {smallest}",
            a.top_level
        ));
    }
    let setup = RateSetup {
        target,
        nu: a.nu,
        lambda: a.lambda,
        sigma: a.sigma,
        method: a.method,
        fixed_level: a.level,
        axis: match a.log_alpha {
            Some(alpha) => RateAxis::LogNOverLog { alpha },
            None => RateAxis::LogN,
        },
        seed: a.seed,
        bootstrap: a.bootstrap,
    };
    let res = empirical_rate_slope(&setup, &a.n_grid, a.trials)?;
    let dir = &a.out.out_dir;
    fs::create_dir_all(dir)?;
    write_json(dir, "rate.json", &res)?;
    let mut csv = String::from("n,level,rmse\n");
    for p in &res.points {
        let level = p.level.map(|j| j.to_string()).unwrap_or_default();
        csv.push_str(&format!("{},{level},{}\n", p.n, p.rmse));
    }
    fs::write(dir.join("rate.csv"), csv)?;
    let chart = Chart::new(format!(
        "root-MSE vs n (slope {:.3} ± {:.3}, reference {:.3})",
        res.slope, res.stderr, res.reference_slope
    ))
    .labels("log2 n", "log2 rmse")
    .with(Series::markers(
        "empirical",
        res.points
            .iter()
            .map(|p| ((p.n as f64).log2(), p.rmse.log2()))
            .collect(),
    ));
    fs::write(dir.join("rate.svg"), chart.to_svg(640.0, 400.0))?;
    println!(
        "slope {:.4} ± {:.4} (reference {:.4})",
        res.slope, res.stderr, res.reference_slope
    );
    if let Some(tol) = a.tolerance {
        let dev = (res.slope - res.reference_slope).abs();
        if dev > tol {
            return Ok(Outcome::Fail(format!(
                "slope {:.4} deviates from {:.4} by {dev:.4} > {tol}",
                res.slope, res.reference_slope
            )));
        }
    }
    Ok(Outcome::Pass)
}
