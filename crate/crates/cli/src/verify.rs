//! `slar verify`: the oracle suite.
//!
//! Every check draws its instances from its own stream derived from the
//! master seed, so groups run concurrently and still produce the same report.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use slar_core::dist::{paper_distribution, non_robust_mask, Samples};
use slar_core::game::{run_at, run_ne, verify_ne};
use slar_core::model::nonrobust_mass;
use slar_core::oracle::{
    check_corollary, check_emax_bounds, check_emax_bounds_monte_carlo, check_lemma1_grid, check_lemma1_grid_with,
    check_nonconvergence_proxy, check_norm_bounds, check_sign_flips, check_sign_lemma, random_discrete_spec,
    random_game_spec, random_law, standard_reliance_margin, theorem_conditions, worst_case_delta, Check, Status,
    SupStrategy,
};
use slar_core::solve::{certify_unique, fit_oat, fit_svm};
use slar_core::{Arena, DistributionSpec, FeatureSpec, GameConfig, OptimizerConfig, PerturbationPlan, SolverMethod};

use crate::error::CliError;
use crate::run::Options;

pub const BUILTIN_SEED: u64 = 20_240_601;

/// Instance counts and tolerances of the suite.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteParams {
    pub grid_cases: usize,
    pub lemma_instances: usize,
    pub game_instances: usize,
    pub flip_rounds: usize,
    pub gap_tolerance: f64,
    pub ne_tolerance: f64,
    pub weight_tolerance: f64,
    pub uniqueness_tolerance: f64,
    pub monte_carlo_samples: usize,
}

impl Default for SuiteParams {
    fn default() -> Self {
        Self {
            grid_cases: 100,
            lemma_instances: 100,
            game_instances: 20,
            flip_rounds: 20,
            gap_tolerance: 1e-8,
            ne_tolerance: 1e-5,
            weight_tolerance: 1e-5,
            uniqueness_tolerance: 1e-4,
            monte_carlo_samples: 100_000,
        }
    }
}

/// A user-supplied game added to the builtin instances.
#[derive(Debug, Clone)]
pub struct ExtraGame {
    pub spec: DistributionSpec,
    pub eps: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Entry {
    pub name: String,
    pub inputs_digest: String,
    pub status: Status,
    pub margin: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub master_seed: u64,
    pub passed: bool,
    pub checks: Vec<Entry>,
}

impl VerifyReport {
    pub fn failures(&self) -> Vec<&Entry> {
        self.checks.iter().filter(|c| c.status == Status::Fail).collect()
    }
}

fn digest(inputs: &Value) -> String {
    hex::encode(Sha256::digest(inputs.to_string().as_bytes()))
}

fn entry(check: Check, inputs: Value) -> Entry {
    Entry {
        inputs_digest: digest(&inputs),
        name: check.name,
        status: check.status,
        margin: check.margin,
        detail: check.detail,
    }
}

fn error_entry(name: &str, inputs: Value, e: impl std::fmt::Display) -> Entry {
    entry(
        Check {
            name: name.into(),
            status: Status::Fail,
            margin: f64::NEG_INFINITY,
            detail: e.to_string(),
        },
        inputs,
    )
}

/// Stream of one check family.
fn stream(master: u64, tag: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(tag);
    rng
}

fn min_check(name: &str, margins: impl Iterator<Item = f64>, detail: String) -> Check {
    Check::from_margin(name, margins.fold(f64::INFINITY, f64::min), detail)
}

fn grid_checks(seed: u64, p: &SuiteParams) -> Vec<Entry> {
    let (d, k, eps) = (3, 5, 0.3);
    let inputs = json!({"d": d, "k": k, "eps": eps, "cases": p.grid_cases, "seed": seed});
    let mut out = Vec::new();
    match check_lemma1_grid(d, k, eps, p.grid_cases, seed) {
        Ok(r) => out.push(entry(
            Check::from_margin(
                "lemma1_grid",
                -(r.failures as f64),
                format!("{} of {} cases attain the grid maximum ({} at zero loss)", r.cases - r.failures, r.cases, r.zero_loss),
            ),
            inputs.clone(),
        )),
        Err(e) => out.push(error_entry("lemma1_grid", inputs.clone(), e)),
    }
    // one sign of the worst-case plan flipped must be caught
    let corrupted = |w: &[f64], y: f64| {
        let mut delta = worst_case_delta(w, y, eps);
        delta[0] = -delta[0];
        delta
    };
    match check_lemma1_grid_with(d, k, eps, p.grid_cases, seed, &corrupted) {
        Ok(r) => out.push(entry(
            Check::from_margin(
                "lemma1_grid_negative_control",
                r.failures as f64 - 1.0,
                format!("corrupted plan misses the maximum in {} of {} cases", r.failures, r.cases),
            ),
            inputs,
        )),
        Err(e) => out.push(error_entry("lemma1_grid_negative_control", inputs, e)),
    }
    out
}

fn emax_checks(seed: u64, p: &SuiteParams) -> Vec<Entry> {
    let mut rng = stream(seed, 1);
    let laws: Vec<FeatureSpec> = (0..p.lemma_instances)
        .map(|_| {
            let m = rng.random_range(-1.0..1.0);
            random_law(&mut rng, m)
        })
        .collect();
    let mut margins = Vec::new();
    for f in &laws {
        margins.push(check_emax_bounds(&f.support(1.0).expect("discrete law")).margin);
    }
    let mut out = vec![entry(
        min_check("emax_bounds_exact", margins.into_iter(), format!("{} random discrete laws", laws.len())),
        json!({"seed": seed, "laws": laws}),
    )];
    let gaussians = [FeatureSpec::gaussian(0.1, 0.7), FeatureSpec::gaussian(-0.4, 1.5), FeatureSpec::gaussian(0.0, 0.01)];
    for (k, g) in gaussians.into_iter().enumerate() {
        let g = g.expect("valid gaussian");
        let s = seed.wrapping_add(k as u64);
        let mut c = check_emax_bounds_monte_carlo(&g, p.monte_carlo_samples, s);
        c.name = format!("{}[{k}]", c.name);
        out.push(entry(c, json!({"seed": s, "feature": g, "samples": p.monte_carlo_samples})));
    }
    out
}

/// Sign lemma, the zero-mean corollary and both norm bounds on exact
/// population solutions of random discrete specs.
fn lemma_checks(seed: u64, p: &SuiteParams) -> Vec<Entry> {
    let mut rng = stream(seed, 2);
    let mut sign = Vec::new();
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    let mut lower_active = 0;
    let mut specs = Vec::new();
    let tol = 1e-12;
    for _ in 0..p.lemma_instances {
        let dim = rng.random_range(2..=5);
        let spec = random_discrete_spec(&mut rng, dim);
        let lambda = 10f64.powf(rng.random_range(-1.5..0.5));
        let inputs = json!({"spec": spec, "lambda": lambda, "gap_tolerance": tol});
        let report = match check_sign_lemma(&spec, lambda, tol) {
            Ok(r) => r,
            Err(e) => return vec![error_entry("sign_lemma", inputs, e)],
        };
        sign.push(report.margin);
        match check_norm_bounds(&report.w, &spec, lambda, None, report.slack) {
            Ok(n) => {
                upper.push(n.upper_margin);
                if let Some(m) = n.lower_margin {
                    lower.push(m);
                    lower_active += 1;
                }
            }
            Err(e) => return vec![error_entry("norm_bounds", inputs, e)],
        }
        specs.push(inputs);
    }
    let inputs = json!({"seed": seed, "instances": specs});
    let n = p.lemma_instances;
    vec![
        entry(
            min_check("sign_lemma", sign.into_iter(), format!("{n} specs; zero means force zero weights")),
            inputs.clone(),
        ),
        entry(min_check("norm_upper_bound", upper.into_iter(), format!("{n} specs")), inputs.clone()),
        entry(
            min_check("norm_lower_bound", lower.into_iter(), format!("{lower_active} of {n} specs with a positive bound")),
            inputs,
        ),
    ]
}

fn game_specs(seed: u64, p: &SuiteParams) -> Vec<(DistributionSpec, f64, f64)> {
    let mut rng = stream(seed, 3);
    (0..p.game_instances)
        .map(|_| {
            let eps = rng.random_range(0.1..0.3);
            let nonrobust = rng.random_range(2..=4);
            let spec = random_game_spec(&mut rng, nonrobust, eps);
            let lambda = 10f64.powf(rng.random_range(-1.5..0.0));
            (spec, eps, lambda)
        })
        .collect()
}

/// Equilibrium robustness and verification, uniqueness of the defender's
/// best response and OAT robustness on one game.
fn game_instance_checks(spec: &DistributionSpec, eps: f64, lambda: f64, p: &SuiteParams) -> Result<[Check; 4], String> {
    let arena = Arena::population(spec).map_err(|e| e.to_string())?;
    let game = GameConfig::new(eps, lambda, 1, SolverMethod::exact(p.gap_tolerance * 1e-2));
    let (plan, w, _) = run_ne(&arena, &game).map_err(|e| e.to_string())?;
    let mass = nonrobust_mass(&w.w, &arena.means, eps).unwrap_or(0.0);
    let robust = Check::from_margin("ne_nonrobust_mass", 1e-6 - mass, format!("mass {mass:e}"));
    let ne = verify_ne(&plan, &w, &arena.train, eps, lambda, p.ne_tolerance).map_err(|e| e.to_string())?;
    let verdict = Check::from_margin(
        "ne_verification",
        (p.ne_tolerance - ne.row_gap).min(p.ne_tolerance - ne.column_gap),
        format!("row gap {:e}, column gap {:e}", ne.row_gap, ne.column_gap),
    );
    let unique = certify_unique(&arena.train, &plan, lambda, p.gap_tolerance * 1e-2, 3).map_err(|e| e.to_string())?;
    let uniq = Check::from_margin(
        "ne_uniqueness",
        p.uniqueness_tolerance - unique.max_pairwise_distance,
        format!("max distance {:e} over 3 starts", unique.max_pairwise_distance),
    );
    let oat = fit_oat(&arena.train, eps, &OptimizerConfig::exact(lambda, p.gap_tolerance * 1e-2)).map_err(|e| e.to_string())?;
    let largest = oat
        .weights
        .w
        .iter()
        .zip(non_robust_mask(&arena.means, eps))
        .filter(|(_, nr)| *nr)
        .map(|(w, _)| w.abs())
        .fold(0.0, f64::max);
    let oat_check = Check::from_margin("oat_robustness", p.weight_tolerance - largest, format!("max non-robust |w| {largest:e}"));
    Ok([robust, verdict, uniq, oat_check])
}

fn game_checks(games: &[(DistributionSpec, f64, f64)], p: &SuiteParams, label: &str) -> Vec<Entry> {
    let names = ["ne_nonrobust_mass", "ne_verification", "ne_uniqueness", "oat_robustness"];
    let mut margins = vec![Vec::new(); 4];
    let mut details = vec![String::new(); 4];
    let inputs: Vec<Value> = games
        .iter()
        .map(|(s, e, l)| json!({"spec": s, "eps": e, "lambda": l, "params": p}))
        .collect();
    for (k, (spec, eps, lambda)) in games.iter().enumerate() {
        match game_instance_checks(spec, *eps, *lambda, p) {
            Ok(checks) => {
                for (i, c) in checks.into_iter().enumerate() {
                    if c.margin < margins[i].iter().copied().fold(f64::INFINITY, f64::min) {
                        details[i] = format!("tightest instance {k}: {}", c.detail);
                    }
                    margins[i].push(c.margin);
                }
            }
            Err(e) => return vec![error_entry(&format!("game{label}"), inputs[k].clone(), e)],
        }
    }
    let all = Value::Array(inputs);
    names
        .iter()
        .zip(margins)
        .zip(details)
        .map(|((name, m), detail)| {
            entry(
                min_check(&format!("{name}{label}"), m.into_iter(), format!("{} games, {detail}", games.len())),
                all.clone(),
            )
        })
        .collect()
}

/// A robust label copy slightly above the budget and six non-robust
/// two-point features close to it: the regime in which AT iterates keep
/// non-zero non-robust weight and flip its sign every round.
pub fn flip_spec() -> DistributionSpec {
    let mut f = vec![FeatureSpec::two_point(0.7).expect("valid p")];
    f.extend((0..6).map(|_| FeatureSpec::two_point(0.6).expect("valid p")));
    DistributionSpec::new(f).expect("non-empty")
}

pub const FLIP_EPS: f64 = 0.3;
pub const FLIP_LAMBDA: f64 = 0.1;

fn trajectory_checks(spec: &DistributionSpec, eps: f64, lambda: f64, p: &SuiteParams, label: &str) -> Vec<Entry> {
    let inputs = json!({"spec": spec, "eps": eps, "lambda": lambda, "rounds": p.flip_rounds, "gap_tolerance": p.gap_tolerance});
    let name = |n: &str| format!("{n}{label}");
    if let Err(e) = spec.check_def3(eps) {
        return vec![entry(Check::skipped(name("at_sign_flips"), format!("not a large-non-robust-fraction spec: {e}")), inputs)];
    }
    let arena = match Arena::population(spec) {
        Ok(a) => a,
        Err(e) => return vec![error_entry(&name("at_sign_flips"), inputs, e)],
    };
    let game = GameConfig::new(eps, lambda, p.flip_rounds, SolverMethod::exact(p.gap_tolerance));
    let traj = match run_at(&arena, &game) {
        Ok(t) if t.is_complete() => t,
        Ok(t) => return vec![error_entry(&name("at_sign_flips"), inputs, t.failure.unwrap_or_default())],
        Err(e) => return vec![error_entry(&name("at_sign_flips"), inputs, e)],
    };
    let flips = check_sign_flips(&traj, &arena.means, eps, p.weight_tolerance);
    let flip = Check::from_margin(
        name("at_sign_flips"),
        if flips.pairs_checked == 0 { -1.0 } else { -(flips.violations as f64) },
        format!(
            "{} of {} constrained pairs flip, {} near zero, largest product {:e}",
            flips.pairs_checked - flips.violations,
            flips.pairs_checked,
            flips.unconstrained,
            flips.worst_product
        ),
    );
    let mut cor = check_corollary(&traj, &arena.means, eps, 1e-8);
    cor.name = name(&cor.name);
    let mut out = vec![entry(flip, inputs.clone()), entry(cor, inputs.clone())];
    match check_nonconvergence_proxy(&traj, spec, 1e-6) {
        Ok(mut c) => {
            c.name = name(&c.name);
            out.push(entry(c, inputs));
        }
        Err(e) => out.push(error_entry(&name("nonconvergence_proxy"), inputs, e)),
    }
    out
}

fn equal_variance_spec(rng: &mut ChaCha8Rng, dim: usize) -> DistributionSpec {
    let p: f64 = rng.random_range(0.55..0.9);
    let m1 = 2.0 * p - 1.0;
    let sd = (1.0 - m1 * m1).sqrt();
    let mut f = vec![FeatureSpec::two_point(p).expect("valid p")];
    for _ in 1..dim {
        let mu = rng.random_range(-0.3..0.3);
        f.push(FeatureSpec::symmetric_pair(mu, sd).expect("valid pair"));
    }
    DistributionSpec::new(f).expect("non-empty")
}

fn condition_checks(seed: u64, p: &SuiteParams) -> Vec<Entry> {
    let mut out = Vec::new();
    let mut rng = stream(seed, 4);
    let mut diffs = Vec::new();
    let mut inputs = Vec::new();
    for _ in 0..p.game_instances {
        let dim = rng.random_range(2..=12);
        let spec = equal_variance_spec(&mut rng, dim);
        let eps = rng.random_range(0.02..0.3);
        let lambda = 10f64.powf(rng.random_range(-1.0..1.0));
        match theorem_conditions(&spec, eps, lambda, SupStrategy::Exact) {
            Ok(r) => diffs.push(1e-12 - (r.p_threshold_at - (1.0 - r.closed_form_pattern.term)).abs()),
            Err(e) => return vec![error_entry("condition_closed_form", json!({"spec": spec}), e)],
        }
        inputs.push(json!({"spec": spec, "eps": eps, "lambda": lambda}));
    }
    out.push(entry(
        min_check("condition_closed_form", diffs.into_iter(), format!("{} equal-variance specs", p.game_instances)),
        json!({"seed": seed, "instances": inputs}),
    ));

    let paper = paper_distribution(2000, 0.7, 0.01, 0.01).expect("valid parameters");
    let inputs = json!({"d": 2000, "p": 0.7, "mu": 0.01, "sigma": 0.01, "eps": 0.02, "lambda": 0.01});
    match theorem_conditions(&paper, 0.02, 0.01, SupStrategy::Auto) {
        Ok(r) => out.push(entry(
            Check::from_margin(
                "condition_reference_mu_prime",
                1e-4 - (r.mu_prime_norm - 0.4472).abs(),
                format!("|mu'| = {}, holds_at = {}, margin_at = {}", r.mu_prime_norm, r.holds_at, r.margin_at),
            ),
            inputs,
        )),
        Err(e) => out.push(error_entry("condition_reference_mu_prime", inputs, e)),
    }

    // p close to one violates the threshold: dependent checks must be skipped
    let near_one = {
        let mut f = vec![FeatureSpec::two_point(0.99).expect("valid p")];
        f.extend((0..3).map(|_| FeatureSpec::two_point(0.55).expect("valid p")));
        DistributionSpec::new(f).expect("non-empty")
    };
    let inputs = json!({"spec": near_one, "eps": 0.2, "lambda": 0.5});
    let gated = (|| -> Result<Check, String> {
        let arena = Arena::population(&near_one).map_err(|e| e.to_string())?;
        let traj = run_at(&arena, &GameConfig::new(0.2, 0.5, 4, SolverMethod::exact(1e-10))).map_err(|e| e.to_string())?;
        let proxy = check_nonconvergence_proxy(&traj, &near_one, 1e-6).map_err(|e| e.to_string())?;
        let cond = theorem_conditions(&near_one, 0.2, 0.5, SupStrategy::Auto).map_err(|e| e.to_string())?;
        let ok = !cond.holds_at && proxy.status == Status::Skipped;
        Ok(Check::from_margin(
            "condition_gating",
            if ok { 0.0 } else { -1.0 },
            format!("holds_at = {}, proxy {:?}", cond.holds_at, proxy.status),
        ))
    })();
    out.push(match gated {
        Ok(c) => entry(c, inputs),
        Err(e) => error_entry("condition_gating", inputs, e),
    });
    out
}

/// A spec meeting the standard-training threshold: weak robust feature and
/// several strong low-variance features.
pub fn reliance_spec() -> DistributionSpec {
    let mut f = vec![FeatureSpec::two_point(0.55).expect("valid p")];
    f.extend((0..8).map(|_| FeatureSpec::symmetric_pair(0.3, 0.05).expect("valid pair")));
    DistributionSpec::new(f).expect("non-empty")
}

fn reliance_checks(spec: &DistributionSpec, lambda: f64, p: &SuiteParams, label: &str) -> Vec<Entry> {
    let name = format!("standard_reliance{label}");
    let inputs = json!({"spec": spec, "lambda": lambda, "gap_tolerance": p.gap_tolerance});
    let cond = match theorem_conditions(spec, 0.0, lambda, SupStrategy::Auto) {
        Ok(c) => c,
        Err(e) => return vec![entry(Check::skipped(name, format!("no condition report: {e}")), inputs)],
    };
    if !cond.holds_standard {
        return vec![entry(
            Check::skipped(name, format!("threshold condition fails (margin {})", cond.margin_standard)),
            inputs,
        )];
    }
    let res = (|| -> Result<Check, String> {
        let data = Samples::from_spec(spec).map_err(|e| e.to_string())?;
        let plan = PerturbationPlan::zero(spec.dim(), 0.0).map_err(|e| e.to_string())?;
        let fit = fit_svm(&data, &plan, &OptimizerConfig::exact(lambda, p.gap_tolerance)).map_err(|e| e.to_string())?;
        let slack = fit.weight_radius().unwrap_or(0.0) * (1.0 + spec.means().iter().map(|m| m.abs()).sum::<f64>());
        let margin = standard_reliance_margin(&fit.weights.w, &spec.means());
        Ok(Check::from_margin(
            name.clone(),
            margin + slack,
            format!("sum_j w_j mu_j - w_1 = {margin}, threshold margin {}", cond.margin_standard),
        ))
    })();
    vec![match res {
        Ok(c) => entry(c, inputs),
        Err(e) => error_entry(&name, inputs, e),
    }]
}

fn extra_checks(extra: &ExtraGame, p: &SuiteParams) -> Vec<Entry> {
    let inputs = json!({"spec": extra.spec, "eps": extra.eps, "lambda": extra.lambda});
    let mut out = Vec::new();
    match theorem_conditions(&extra.spec, extra.eps, extra.lambda, SupStrategy::Auto) {
        Ok(r) => out.push(entry(
            Check::from_margin(
                "config_condition_report",
                0.0,
                format!(
                    "holds_standard = {} ({}), holds_at = {} ({}), holds_at_simplified = {} ({})",
                    r.holds_standard, r.margin_standard, r.holds_at, r.margin_at, r.holds_at_simplified, r.margin_at_simplified
                ),
            ),
            inputs.clone(),
        )),
        Err(e) => out.push(entry(Check::skipped("config_condition_report", e.to_string()), inputs.clone())),
    }
    if !extra.spec.is_finite_support() {
        out.push(entry(
            Check::skipped("config_game", "exact population checks need a finitely supported spec"),
            inputs,
        ));
        return out;
    }
    out.extend(game_checks(&[(extra.spec.clone(), extra.eps, extra.lambda)], p, "[config]"));
    out.extend(trajectory_checks(&extra.spec, extra.eps, extra.lambda, p, "[config]"));
    out.extend(reliance_checks(&extra.spec, extra.lambda, p, "[config]"));
    out
}

/// Runs the full suite. Check order in the report is fixed.
pub fn run_suite(master_seed: u64, params: &SuiteParams, extra: Option<&ExtraGame>) -> VerifyReport {
    let games = game_specs(master_seed, params);
    let flip = flip_spec();
    let reliance = reliance_spec();
    type Job<'a> = Box<dyn FnOnce() -> Vec<Entry> + Send + 'a>;
    let mut jobs: Vec<Job<'_>> = vec![
        Box::new(|| grid_checks(master_seed, params)),
        Box::new(|| emax_checks(master_seed, params)),
        Box::new(|| lemma_checks(master_seed, params)),
        Box::new(|| game_checks(&games, params, "")),
        Box::new(|| trajectory_checks(&flip, FLIP_EPS, FLIP_LAMBDA, params, "")),
        Box::new(|| condition_checks(master_seed, params)),
        Box::new(|| reliance_checks(&reliance, 0.5, params, "")),
    ];
    if let Some(x) = extra {
        jobs.push(Box::new(move || extra_checks(x, params)));
    }
    let checks: Vec<Entry> = std::thread::scope(|scope| {
        let handles: Vec<_> = jobs.into_iter().map(|j| scope.spawn(j)).collect();
        handles
            .into_iter()
            .flat_map(|h| {
                h.join()
                    .unwrap_or_else(|_| vec![error_entry("suite", Value::Null, "check panicked")])
            })
            .collect()
    });
    VerifyReport {
        master_seed,
        passed: checks.iter().all(|c| c.status != Status::Fail),
        checks,
    }
}

/// `target` is `builtin` or a config path; a config adds its own game and
/// supplies the master seed unless `--seed` is given.
pub fn cmd_verify(target: &str, opts: &Options) -> Result<VerifyReport, CliError> {
    let (seed, extra, out_dir) = if target == "builtin" {
        (
            opts.seed.unwrap_or(BUILTIN_SEED),
            None,
            opts.out.clone().unwrap_or_else(|| "out".into()),
        )
    } else {
        let mut cfg = crate::config::ExperimentConfig::load(Path::new(target))?;
        opts.apply(&mut cfg);
        let extra = ExtraGame {
            spec: cfg.spec()?,
            eps: cfg.eps,
            lambda: cfg.lambda,
        };
        (cfg.seed, Some(extra), cfg.output_dir)
    };
    let report = run_suite(seed, &SuiteParams::default(), extra.as_ref());
    std::fs::create_dir_all(&out_dir).map_err(|e| CliError::Io(format!("{}: {e}", out_dir.display())))?;
    let path = out_dir.join("verify.json");
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    std::fs::write(&path, format!("{json}\n")).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    if !opts.quiet {
        for c in &report.checks {
            let tag = match c.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Skipped => "skip",
            };
            eprintln!("{tag:>4}  {:<36} {}", c.name, c.detail);
        }
        eprintln!("wrote {}", path.display());
    }
    let failing = report.failures();
    if failing.is_empty() {
        Ok(report)
    } else {
        Err(CliError::Verification(
            failing.iter().map(|c| c.name.as_str()).collect::<Vec<_>>().join(", "),
        ))
    }
}
