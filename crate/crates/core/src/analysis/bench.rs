//! Monte Carlo MSE grids over targets × methods × rsnr × ν × α.
//!
//! Every trial seed is `derive_seed(base, target, trial)`. Cells that differ only
//! in α, ν, rsnr or method therefore see the same uniform draw for the filter
//! scale and the same standard normals for the noise, which is what makes the
//! paired comparisons between cells meaningful.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::stats::{self, PairedTest};
use crate::error::{validation, Error, Result};
use crate::estimators::{estimate, EstimateResult, EstimatorConfig, Method};
use crate::filters::{FilterSource, FixedGamma, RandomFilterSpec, DEFAULT_MEAN_LAMBDA};
use crate::forward_model::{make_test_signal, simulate, Simulation, TestSignal};
use crate::meyer::MeyerBasis;
use crate::plot::{grid_svg, Chart, Series};
use crate::rng::derive_seed;
use crate::signal::PeriodicSignal;

fn default_rsnr() -> Vec<f64> {
    vec![3.0, 5.0, 7.0]
}
fn default_methods() -> Vec<Method> {
    Method::THRESHOLDING.to_vec()
}
fn default_mean_lambda() -> f64 {
    DEFAULT_MEAN_LAMBDA
}
fn one() -> f64 {
    1.0
}
fn default_level() -> f64 {
    0.05
}

/// Experimental design. Parsed from TOML by the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub targets: Vec<TestSignal>,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    #[serde(default = "default_rsnr")]
    pub rsnr_levels: Vec<f64>,
    pub nu_list: Vec<f64>,
    /// Tail parameters of the scale law; with `fixed_lambda` they only tune D.
    pub alpha_list: Vec<f64>,
    /// Use a constant filter scale instead of drawing it.
    #[serde(default)]
    pub fixed_lambda: Option<f64>,
    #[serde(default = "default_mean_lambda")]
    pub mean_lambda: f64,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    #[serde(default = "one")]
    pub eta: f64,
    #[serde(default = "one")]
    pub eta_prime: f64,
    #[serde(default)]
    pub fixed_threshold: Option<f64>,
    /// Scale constant `K`; `None` uses `(2π/λ̄)^{2ν}` with `λ̄` the typical scale.
    #[serde(default)]
    pub filter_scale: Option<f64>,
    /// Also report the discrete `L^ρ` loss.
    #[serde(default)]
    pub lp_rho: Option<f64>,
    #[serde(default)]
    pub checks: Vec<Check>,
}

/// Cell coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellKey {
    pub target: TestSignal,
    pub method: Method,
    pub rsnr: f64,
    pub nu: f64,
    pub alpha: f64,
}

impl CellKey {
    pub fn file_stem(&self) -> String {
        format!(
            "{}_{}_{}_{}_{}",
            self.target, self.method, self.rsnr, self.nu, self.alpha
        )
    }
}

/// A configured assertion: mean MSE of cell `a` below that of cell `b`,
/// one-sided paired t-test at `level`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Check {
    pub name: String,
    pub a: CellKey,
    pub b: CellKey,
    #[serde(default = "default_level")]
    pub level: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub mean_a: f64,
    pub mean_b: f64,
    pub test: PairedTest,
    pub passed: bool,
}

impl BenchConfig {
    pub fn from_toml(s: &str) -> Result<Self> {
        let cfg: BenchConfig = toml::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let nonempty = [
            ("targets", self.targets.is_empty()),
            ("methods", self.methods.is_empty()),
            ("rsnr_levels", self.rsnr_levels.is_empty()),
            ("nu_list", self.nu_list.is_empty()),
            ("alpha_list", self.alpha_list.is_empty()),
        ];
        if let Some((name, _)) = nonempty.iter().find(|(_, e)| *e) {
            return validation(format!("{name} must not be empty"));
        }
        if self.trials == 0 {
            return validation("trials must be at least 1");
        }
        if self.trials > 1_000_000 {
            return validation("trials above 1e6 are not supported");
        }
        if !self.n.is_power_of_two() || !(64..=1 << 20).contains(&self.n) {
            return validation(format!("n = {} must be a power of two in 64..=2^20", self.n));
        }
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !self.rsnr_levels.iter().all(|&v| positive(v)) {
            return validation("rsnr levels must be positive");
        }
        if !self.nu_list.iter().all(|&v| positive(v)) {
            return validation("nu values must be positive");
        }
        if !self.alpha_list.iter().all(|&v| positive(v)) {
            return validation("alpha values must be positive");
        }
        for (name, v) in [
            ("mean_lambda", Some(self.mean_lambda)),
            ("fixed_lambda", self.fixed_lambda),
            ("eta", Some(self.eta)),
            ("eta_prime", Some(self.eta_prime)),
            ("filter_scale", self.filter_scale),
            ("lp_rho", self.lp_rho),
        ] {
            if let Some(v) = v {
                if !positive(v) {
                    return validation(format!("{name} must be positive, got {v}"));
                }
            }
        }
        if let Some(t) = self.fixed_threshold {
            if !(t >= 0.0 && t.is_finite()) {
                return validation("fixed_threshold must be non-negative");
            }
        }
        if self
            .methods
            .iter()
            .any(|m| matches!(m, Method::Linear | Method::Hybrid))
        {
            return validation("the benchmark runs the thresholding methods D, R and fixed");
        }
        for c in &self.checks {
            for key in [&c.a, &c.b] {
                if !self.contains(key) {
                    return validation(format!("check '{}' refers to a cell outside the grid", c.name));
                }
            }
            if !(c.level > 0.0 && c.level < 1.0) {
                return validation(format!("check '{}' level must be in (0, 1)", c.name));
            }
        }
        Ok(())
    }

    fn contains(&self, k: &CellKey) -> bool {
        self.targets.contains(&k.target)
            && self.methods.contains(&k.method)
            && self.rsnr_levels.contains(&k.rsnr)
            && self.nu_list.contains(&k.nu)
            && self.alpha_list.contains(&k.alpha)
    }

    /// Typical filter scale, used for `K`.
    fn typical_lambda(&self) -> f64 {
        self.fixed_lambda.unwrap_or(self.mean_lambda)
    }

    pub fn estimator_config(&self, method: Method, nu: f64, alpha: f64) -> EstimatorConfig {
        let k = self
            .filter_scale
            .unwrap_or_else(|| EstimatorConfig::filter_scale_for(nu, self.typical_lambda()));
        let mut cfg = EstimatorConfig::new(method, nu, alpha)
            .with_eta(self.eta)
            .with_eta_prime(self.eta_prime)
            .with_filter_scale(k);
        if method == Method::Fixed {
            cfg.fixed_threshold = self.fixed_threshold;
        }
        cfg
    }

    pub fn filter_source(&self, nu: f64, alpha: f64) -> Result<Box<dyn FilterSource>> {
        Ok(match self.fixed_lambda {
            Some(lambda) => Box::new(FixedGamma { nu, lambda }),
            None => Box::new(RandomFilterSpec::new(nu, alpha, self.mean_lambda)?),
        })
    }

    pub fn trial_seed(&self, target: TestSignal, trial: usize) -> u64 {
        derive_seed(self.seed, target.name(), trial as u64)
    }
}

/// Losses of every method on one simulated trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub target: TestSignal,
    pub rsnr: f64,
    pub nu: f64,
    pub alpha: f64,
    pub trial: usize,
    pub seed: u64,
    pub lambda: Option<f64>,
    pub sigma: f64,
    /// `(method, MSE, L^ρ loss)`; `None` when the estimator failed.
    pub losses: Vec<(Method, Option<f64>, Option<f64>)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSummary {
    pub key: CellKey,
    pub trials: usize,
    pub failures: usize,
    pub mean_mse: f64,
    pub mse_stderr: f64,
    pub worst_mse: f64,
    pub worst_seed: u64,
    pub worst_trial: usize,
    pub mean_lp: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub config: BenchConfig,
    pub cells: Vec<CellSummary>,
    pub trials: Vec<TrialRecord>,
    pub checks: Vec<CheckOutcome>,
}

/// Truth signal, basis and per-(ν, α) filter sources shared by all trials.
struct Context {
    basis: MeyerBasis,
    truths: BTreeMap<TestSignal, PeriodicSignal>,
}

fn run_trial(
    cfg: &BenchConfig,
    ctx: &Context,
    source: &dyn FilterSource,
    target: TestSignal,
    rsnr: f64,
    nu: f64,
    alpha: f64,
    trial: usize,
) -> Result<TrialRecord> {
    let truth = &ctx.truths[&target];
    let seed = cfg.trial_seed(target, trial);
    let sim = simulate(truth, source, rsnr, seed)?;
    let losses = cfg
        .methods
        .iter()
        .map(|&m| {
            let ecfg = cfg.estimator_config(m, nu, alpha);
            match estimate(&sim.observation, &sim.filter, &ctx.basis, &ecfg) {
                Ok(r) => {
                    let mse = r.signal.mse(truth).ok();
                    let lp = cfg.lp_rho.and_then(|rho| r.signal.lp_error(truth, rho).ok());
                    (m, mse, lp)
                }
                Err(_) => (m, None, None),
            }
        })
        .collect();
    Ok(TrialRecord {
        target,
        rsnr,
        nu,
        alpha,
        trial,
        seed,
        lambda: sim.filter.lambda(),
        sigma: sim.sigma,
        losses,
    })
}

/// Runs the whole grid. Trials execute in parallel; results are assembled in
/// grid order, so the report does not depend on scheduling.
pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport> {
    cfg.validate()?;
    let basis = MeyerBasis::new(cfg.n)?;
    let truths = cfg
        .targets
        .iter()
        .map(|&t| Ok((t, make_test_signal(t, cfg.n)?)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    let ctx = Context { basis, truths };
    let mut sources = BTreeMap::new();
    for (i, &nu) in cfg.nu_list.iter().enumerate() {
        for (j, &alpha) in cfg.alpha_list.iter().enumerate() {
            sources.insert((i, j), cfg.filter_source(nu, alpha)?);
        }
    }
    let mut units = Vec::new();
    for &target in &cfg.targets {
        for &rsnr in &cfg.rsnr_levels {
            for (i, &nu) in cfg.nu_list.iter().enumerate() {
                for (j, &alpha) in cfg.alpha_list.iter().enumerate() {
                    for trial in 0..cfg.trials {
                        units.push((target, rsnr, i, nu, j, alpha, trial));
                    }
                }
            }
        }
    }
    let results: Vec<std::result::Result<TrialRecord, (u64, Error)>> = units
        .par_iter()
        .map(|&(target, rsnr, i, nu, j, alpha, trial)| {
            run_trial(cfg, &ctx, sources[&(i, j)].as_ref(), target, rsnr, nu, alpha, trial)
                .map_err(|e| (cfg.trial_seed(target, trial), e))
        })
        .collect();
    let mut trials = Vec::with_capacity(results.len());
    for (r, &(target, rsnr, _, nu, _, alpha, trial)) in results.into_iter().zip(&units) {
        match r {
            Ok(t) => trials.push(t),
            // Simulation itself failed: every method records a failure.
            Err((seed, _)) => trials.push(TrialRecord {
                target,
                rsnr,
                nu,
                alpha,
                trial,
                seed,
                lambda: None,
                sigma: f64::NAN,
                losses: cfg.methods.iter().map(|&m| (m, None, None)).collect(),
            }),
        }
    }
    let mut cells = Vec::new();
    for &target in &cfg.targets {
        for &method in &cfg.methods {
            for &rsnr in &cfg.rsnr_levels {
                for &nu in &cfg.nu_list {
                    for &alpha in &cfg.alpha_list {
                        let key = CellKey {
                            target,
                            method,
                            rsnr,
                            nu,
                            alpha,
                        };
                        cells.push(summarize(&key, &trials));
                    }
                }
            }
        }
    }
    let mut report = BenchReport {
        config: cfg.clone(),
        cells,
        trials,
        checks: Vec::new(),
    };
    report.checks = cfg
        .checks
        .iter()
        .map(|c| report.evaluate_check(c))
        .collect::<Result<_>>()?;
    Ok(report)
}

fn cell_trials<'a>(key: &'a CellKey, trials: &'a [TrialRecord]) -> impl Iterator<Item = &'a TrialRecord> + 'a {
    trials.iter().filter(move |t| {
        t.target == key.target && t.rsnr == key.rsnr && t.nu == key.nu && t.alpha == key.alpha
    })
}

fn loss_of(t: &TrialRecord, m: Method) -> (Option<f64>, Option<f64>) {
    t.losses
        .iter()
        .find(|l| l.0 == m)
        .map(|l| (l.1, l.2))
        .unwrap_or((None, None))
}

fn summarize(key: &CellKey, trials: &[TrialRecord]) -> CellSummary {
    let mut mses = Vec::new();
    let mut lps = Vec::new();
    let mut failures = 0;
    let mut worst: Option<(f64, u64, usize)> = None;
    let mut count = 0;
    for t in cell_trials(key, trials) {
        count += 1;
        let (mse, lp) = loss_of(t, key.method);
        match mse.filter(|v| v.is_finite()) {
            Some(v) => {
                mses.push(v);
                let better = match worst {
                    None => true,
                    Some((w, s, _)) => v > w || (v == w && t.seed < s),
                };
                if better {
                    worst = Some((v, t.seed, t.trial));
                }
            }
            None => failures += 1,
        }
        if let Some(lp) = lp {
            lps.push(lp);
        }
    }
    let (worst_mse, worst_seed, worst_trial) = worst.unwrap_or((f64::NAN, 0, 0));
    CellSummary {
        key: *key,
        trials: count,
        failures,
        mean_mse: if mses.is_empty() { f64::NAN } else { stats::mean(&mses) },
        mse_stderr: stats::std_error(&mses),
        worst_mse,
        worst_seed,
        worst_trial,
        mean_lp: (!lps.is_empty()).then(|| stats::mean(&lps)),
    }
}

impl BenchReport {
    pub fn cell(&self, key: &CellKey) -> Option<&CellSummary> {
        self.cells.iter().find(|c| c.key == *key)
    }

    /// Per-trial MSEs of a cell in trial order (`NaN` for failures).
    pub fn cell_mses(&self, key: &CellKey) -> Vec<f64> {
        cell_trials(key, &self.trials)
            .map(|t| loss_of(t, key.method).0.unwrap_or(f64::NAN))
            .collect()
    }

    pub fn evaluate_check(&self, c: &Check) -> Result<CheckOutcome> {
        let a = self.cell_mses(&c.a);
        let b = self.cell_mses(&c.b);
        let pairs: (Vec<f64>, Vec<f64>) = a
            .iter()
            .zip(&b)
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|(x, y)| (*x, *y))
            .unzip();
        let test = stats::paired_t_test_less(&pairs.0, &pairs.1)?;
        Ok(CheckOutcome {
            name: c.name.clone(),
            mean_a: stats::mean(&pairs.0),
            mean_b: stats::mean(&pairs.1),
            passed: test.significant(c.level),
            test,
        })
    }

    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// One row per cell.
    pub fn cells_csv(&self) -> String {
        let mut out = String::from(
            "target,method,rsnr,nu,alpha,trials,failures,mean_mse,mse_stderr,worst_mse,worst_seed,worst_trial,mean_lp\n",
        );
        for c in &self.cells {
            let k = &c.key;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{:e},{:e},{:e},{},{},{}",
                k.target,
                k.method,
                k.rsnr,
                k.nu,
                k.alpha,
                c.trials,
                c.failures,
                c.mean_mse,
                c.mse_stderr,
                c.worst_mse,
                c.worst_seed,
                c.worst_trial,
                c.mean_lp.map(|v| format!("{v:e}")).unwrap_or_default()
            );
        }
        out
    }

    /// One row per (trial, method).
    pub fn trials_csv(&self) -> String {
        let mut out = String::from("target,rsnr,nu,alpha,trial,seed,lambda,sigma,method,mse\n");
        for t in &self.trials {
            for (m, mse, _) in &t.losses {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{:e},{},{}",
                    t.target,
                    t.rsnr,
                    t.nu,
                    t.alpha,
                    t.trial,
                    t.seed,
                    t.lambda.map(|l| format!("{l:e}")).unwrap_or_default(),
                    t.sigma,
                    m,
                    mse.map(|v| format!("{v:e}")).unwrap_or_default()
                );
            }
        }
        out
    }

    pub fn checks_summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{} {}: mean {:.4e} vs {:.4e}, t = {:.3}, p = {:.3e}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.mean_a,
                c.mean_b,
                c.test.t,
                c.test.p_value
            );
        }
        out
    }

    /// Mean MSE against α, one chart per (target, rsnr), one line per (method, ν).
    pub fn alpha_charts(&self) -> Vec<(String, Chart)> {
        let cfg = &self.config;
        let mut out = Vec::new();
        for &target in &cfg.targets {
            for &rsnr in &cfg.rsnr_levels {
                let mut chart = Chart::new(format!("{target}, rsnr {rsnr}"))
                    .labels("alpha", "mean MSE")
                    .log_y();
                for &method in &cfg.methods {
                    for &nu in &cfg.nu_list {
                        let pts = cfg
                            .alpha_list
                            .iter()
                            .filter_map(|&alpha| {
                                self.cell(&CellKey {
                                    target,
                                    method,
                                    rsnr,
                                    nu,
                                    alpha,
                                })
                                .map(|c| (alpha, c.mean_mse))
                            })
                            .collect();
                        chart = chart.with(Series::line(format!("{method} nu={nu}"), pts));
                    }
                }
                out.push((format!("mse_vs_alpha_{target}_{rsnr}.svg"), chart));
            }
        }
        out
    }

    /// Truth and worst-trial estimate for one cell.
    pub fn cell_chart(&self, key: &CellKey) -> Result<Chart> {
        let cell = self
            .cell(key)
            .ok_or_else(|| Error::Validation("cell not in report".into()))?;
        let cfg = &self.config;
        let truth = make_test_signal(key.target, cfg.n)?;
        let grid: Vec<f64> = truth.grid().collect();
        let mut chart = Chart::new(format!(
            "{} {} rsnr={} nu={} alpha={}: worst MSE {:.3e} (seed {})",
            key.target, key.method, key.rsnr, key.nu, key.alpha, cell.worst_mse, cell.worst_seed
        ))
        .labels("t", "value")
        .with(Series::line("truth", zip(&grid, truth.samples())));
        if cell.worst_mse.is_finite() {
            let source = cfg.filter_source(key.nu, key.alpha)?;
            let sim = simulate(&truth, source.as_ref(), key.rsnr, cell.worst_seed)?;
            let basis = MeyerBasis::new(cfg.n)?;
            let ecfg = cfg.estimator_config(key.method, key.nu, key.alpha);
            let est = estimate(&sim.observation, &sim.filter, &basis, &ecfg)?;
            chart = chart.with(Series::line("estimate", zip(&grid, est.signal.samples())));
        }
        Ok(chart)
    }

    /// Writes `bench_cells.csv`, `bench_trials.csv`, `bench.json` and the SVG plots.
    /// Returns the paths written.
    pub fn write_artifacts(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let mut put = |name: &str, body: &str| -> Result<()> {
            let p = dir.join(name);
            std::fs::write(&p, body)?;
            written.push(p);
            Ok(())
        };
        put("bench_cells.csv", &self.cells_csv())?;
        put("bench_trials.csv", &self.trials_csv())?;
        put("bench.json", &serde_json::to_string_pretty(self)?)?;
        for (name, chart) in self.alpha_charts() {
            put(&name, &chart.to_svg(640.0, 400.0))?;
        }
        let charts: Vec<(String, Chart)> = self
            .cells
            .par_iter()
            .map(|c| Ok((format!("{}.svg", c.key.file_stem()), self.cell_chart(&c.key)?)))
            .collect::<Result<_>>()?;
        for (name, chart) in charts {
            put(&name, &chart.to_svg(720.0, 360.0))?;
        }
        Ok(written)
    }
}

fn zip(x: &[f64], y: &[f64]) -> Vec<(f64, f64)> {
    x.iter().copied().zip(y.iter().copied()).collect()
}

/// Settings for a worst-of-N experiment on one target.
#[derive(Debug, Clone, PartialEq)]
pub struct WorstCaseSetup {
    pub target: TestSignal,
    pub n: usize,
    pub nu: f64,
    pub alpha: f64,
    pub rsnr: f64,
    pub mean_lambda: f64,
    pub fixed_lambda: Option<f64>,
    pub eta: f64,
    pub eta_prime: f64,
    pub fixed_threshold: Option<f64>,
    pub filter_scale: Option<f64>,
    pub seed: u64,
}

impl WorstCaseSetup {
    pub fn new(target: TestSignal, n: usize, nu: f64, alpha: f64, rsnr: f64, seed: u64) -> Self {
        Self {
            target,
            n,
            nu,
            alpha,
            rsnr,
            mean_lambda: DEFAULT_MEAN_LAMBDA,
            fixed_lambda: None,
            eta: 1.0,
            eta_prime: 1.0,
            fixed_threshold: None,
            filter_scale: None,
            seed,
        }
    }

    fn as_bench(&self, methods: &[Method], trials: usize) -> BenchConfig {
        BenchConfig {
            targets: vec![self.target],
            methods: methods.to_vec(),
            rsnr_levels: vec![self.rsnr],
            nu_list: vec![self.nu],
            alpha_list: vec![self.alpha],
            fixed_lambda: self.fixed_lambda,
            mean_lambda: self.mean_lambda,
            n: self.n,
            trials,
            seed: self.seed,
            eta: self.eta,
            eta_prime: self.eta_prime,
            fixed_threshold: self.fixed_threshold,
            filter_scale: self.filter_scale,
            lp_rho: None,
            checks: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorstCase {
    pub method: Method,
    pub worst_mse: f64,
    pub seed: u64,
    pub trial: usize,
    pub mses: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorstCaseReport {
    pub seeds: Vec<u64>,
    pub methods: Vec<WorstCase>,
}

impl WorstCaseReport {
    pub fn get(&self, m: Method) -> Option<&WorstCase> {
        self.methods.iter().find(|w| w.method == m)
    }
}

/// Runs `n_trials` seeded simulations and, per method, picks the largest MSE
/// (ties go to the lowest seed).
pub fn worst_case_trials(
    setup: &WorstCaseSetup,
    methods: &[Method],
    n_trials: usize,
) -> Result<WorstCaseReport> {
    if n_trials < 2 {
        return validation("worst-case runs need at least 2 trials");
    }
    let cfg = setup.as_bench(methods, n_trials);
    let report = run_bench(&cfg)?;
    let seeds = (0..n_trials).map(|i| cfg.trial_seed(setup.target, i)).collect();
    let methods = methods
        .iter()
        .map(|&m| {
            let key = CellKey {
                target: setup.target,
                method: m,
                rsnr: setup.rsnr,
                nu: setup.nu,
                alpha: setup.alpha,
            };
            let c = report.cell(&key).expect("cell exists");
            WorstCase {
                method: m,
                worst_mse: c.worst_mse,
                seed: c.worst_seed,
                trial: c.worst_trial,
                mses: report.cell_mses(&key),
            }
        })
        .collect();
    Ok(WorstCaseReport { seeds, methods })
}

/// Data panel plus one estimate panel per method, each on that method's worst
/// draw. The data panel shows the worst draw of the first method.
pub fn worst_case_plot(setup: &WorstCaseSetup, report: &WorstCaseReport) -> Result<String> {
    let methods: Vec<Method> = report.methods.iter().map(|w| w.method).collect();
    let cfg = setup.as_bench(&methods, 2);
    let truth = make_test_signal(setup.target, setup.n)?;
    let basis = MeyerBasis::new(setup.n)?;
    let source = cfg.filter_source(setup.nu, setup.alpha)?;
    let grid: Vec<f64> = truth.grid().collect();
    let sim_for = |seed: u64| -> Result<Simulation> { simulate(&truth, source.as_ref(), setup.rsnr, seed) };
    let mut charts = Vec::new();
    if let Some(first) = report.methods.first() {
        let sim = sim_for(first.seed)?;
        charts.push(
            Chart::new(format!("{} data (seed {})", setup.target, first.seed))
                .labels("t", "y")
                .with(Series::markers("observed", zip(&grid, &sim.observation.samples())))
                .with(Series::line("truth", zip(&grid, truth.samples()))),
        );
    }
    for w in &report.methods {
        let sim = sim_for(w.seed)?;
        let est: EstimateResult = estimate(
            &sim.observation,
            &sim.filter,
            &basis,
            &cfg.estimator_config(w.method, setup.nu, setup.alpha),
        )?;
        charts.push(
            Chart::new(format!(
                "{}: worst MSE {:.3e} (seed {})",
                w.method, w.worst_mse, w.seed
            ))
            .labels("t", "value")
            .with(Series::line("truth", zip(&grid, truth.samples())))
            .with(Series::line("estimate", zip(&grid, est.signal.samples()))),
        );
    }
    Ok(grid_svg(&charts, 2, 560.0, 320.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> BenchConfig {
        BenchConfig::from_toml(
            r#"
targets = ["doppler"]
nu_list = [1.0]
alpha_list = [1.0]
rsnr_levels = [5.0]
n = 256
trials = 3
seed = 11
"#,
        )
        .unwrap()
    }

    #[test]
    fn toml_defaults() {
        let c = small();
        assert_eq!(c.methods, vec![Method::D, Method::R, Method::Fixed]);
        assert_eq!(c.mean_lambda, 150.0);
        assert!(BenchConfig::from_toml("targets = []").is_err());
        assert!(BenchConfig::from_toml(
            "targets=[\"blocks\"]\nnu_list=[1.0]\nalpha_list=[1.0]\nn=256\ntrials=1\nseed=1\nbogus=2"
        )
        .is_err());
    }

    #[test]
    fn every_cell_present_and_deterministic() {
        let c = small();
        let a = run_bench(&c).unwrap();
        let b = run_bench(&c).unwrap();
        assert_eq!(a.cells.len(), 3);
        assert_eq!(a.cells_csv(), b.cells_csv());
        assert_eq!(a.trials_csv(), b.trials_csv());
    }

    #[test]
    fn check_outside_grid_rejected() {
        let mut c = small();
        c.checks.push(Check {
            name: "x".into(),
            a: CellKey {
                target: TestSignal::Blocks,
                method: Method::D,
                rsnr: 5.0,
                nu: 1.0,
                alpha: 1.0,
            },
            b: CellKey {
                target: TestSignal::Doppler,
                method: Method::D,
                rsnr: 5.0,
                nu: 1.0,
                alpha: 1.0,
            },
            level: 0.05,
        });
        assert!(c.validate().is_err());
    }
    #[test]
    fn ties_go_to_the_lowest_seed() {
        let key = CellKey {
            target: TestSignal::Bumps,
            method: Method::R,
            rsnr: 5.0,
            nu: 1.0,
            alpha: 1.0,
        };
        let rec = |trial: usize, seed: u64, mse: f64| TrialRecord {
            target: key.target,
            rsnr: key.rsnr,
            nu: key.nu,
            alpha: key.alpha,
            trial,
            seed,
            lambda: None,
            sigma: 1.0,
            losses: vec![(Method::R, Some(mse), None)],
        };
        let trials = [rec(0, 40, 0.5), rec(1, 7, 0.9), rec(2, 90, 0.9), rec(3, 3, 0.9), rec(4, 1, 0.2)];
        let c = summarize(&key, &trials);
        assert_eq!((c.worst_mse, c.worst_seed, c.worst_trial), (0.9, 3, 3));
    }
}
