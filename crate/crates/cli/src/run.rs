//! `slar gen` and `slar run`.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use slar_core::dist::sample;
use slar_core::game::{run_at, run_ne, run_oat, run_standard};
use slar_core::oracle::{theorem_conditions, ConditionReport, SupStrategy};
use slar_core::{Arena, Dataset, GameConfig, Method, Trajectory};
use slar_core::format::decimal17;

use crate::config::{ExperimentConfig, MethodChoice};
use crate::error::CliError;
use crate::plot::{bar_chart, line_chart, stem_chart, Series};

/// Global command-line overrides.
#[derive(Debug, Clone, Default)]
pub struct Options {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub quiet: bool,
}

impl Options {
    pub fn apply(&self, cfg: &mut ExperimentConfig) {
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(o) = &self.out {
            cfg.output_dir = o.clone();
        }
    }

    fn note(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<fs::File>, CliError> {
    let f = fs::File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(BufWriter::new(f))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn make_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn load(path: &Path, opts: &Options) -> Result<ExperimentConfig, CliError> {
    let mut cfg = ExperimentConfig::load(path)?;
    opts.apply(&mut cfg);
    Ok(cfg)
}

fn datasets(cfg: &ExperimentConfig) -> Result<(Dataset, Dataset), CliError> {
    let spec = cfg.spec()?;
    let (s_train, s_test) = cfg.sample_seeds();
    Ok((sample(&spec, cfg.n_train, s_train)?, sample(&spec, cfg.n_test, s_test)?))
}

/// Writes `train.csv` and `test.csv`.
pub fn cmd_gen(config: &Path, opts: &Options) -> Result<(), CliError> {
    let cfg = load(config, opts)?;
    if cfg.population {
        return Err(CliError::config("population", "gen writes samples; unset population"));
    }
    make_dir(&cfg.output_dir)?;
    let (train, test) = datasets(&cfg)?;
    for (name, data) in [("train.csv", &train), ("test.csv", &test)] {
        let path = cfg.output_dir.join(name);
        let mut out = create(&path)?;
        data.write_csv(&mut out)?;
        out.flush()?;
        opts.note(format!("wrote {}", path.display()));
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub method: String,
    pub std_acc_train: f64,
    pub std_acc_test: f64,
    pub robust_acc_test: f64,
    pub nonrobust_mass: f64,
    pub deltaw_mean_tail: f64,
    pub deltaw_min_tail: f64,
    pub condition_report: Option<ConditionReport>,
}

impl Summary {
    fn new(traj: &Trajectory, condition: Option<&ConditionReport>) -> Option<Self> {
        let last = traj.last()?;
        let (mean, min) = traj.tail_delta_stats()?;
        Some(Self {
            method: traj.method.to_string(),
            std_acc_train: last.std_acc_train,
            std_acc_test: last.std_acc_test,
            robust_acc_test: last.robust_acc_test,
            nonrobust_mass: last.nonrobust_mass,
            deltaw_mean_tail: mean,
            deltaw_min_tail: min,
            condition_report: condition.cloned(),
        })
    }
}

fn play(method: Method, arena: &Arena<'_>, game: &GameConfig) -> Result<Trajectory, CliError> {
    Ok(match method {
        Method::Standard => run_standard(arena, game)?,
        Method::At => run_at(arena, game)?,
        Method::Oat => run_oat(arena, game)?,
        Method::Ne => match run_ne(arena, game) {
            Ok((_, _, traj)) => traj,
            Err(e) => return Err(CliError::Solver(e.to_string())),
        },
    })
}

fn write_weights(path: &Path, traj: &Trajectory, means: &[f64], eps: f64) -> Result<(), CliError> {
    let mut out = create(path)?;
    writeln!(out, "index,mu_i,is_robust,w_i")?;
    if let Some(last) = traj.last() {
        for (i, (w, m)) in last.w.w.iter().zip(means).enumerate() {
            writeln!(out, "{},{},{},{}", i + 1, decimal17(*m), m.abs() > eps, decimal17(*w))?;
        }
    }
    out.flush()?;
    Ok(())
}

fn write_method(dir: &Path, traj: &Trajectory, arena: &Arena<'_>, eps: f64, condition: Option<&ConditionReport>) -> Result<Option<Summary>, CliError> {
    make_dir(dir)?;
    let m = traj.method.as_str();
    let mut out = create(&dir.join(format!("trajectory_{m}.csv")))?;
    traj.write_csv(&mut out)?;
    out.flush()?;
    write_weights(&dir.join(format!("weights_{m}.csv")), traj, &arena.means, eps)?;
    let summary = Summary::new(traj, condition);
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    write_text(&dir.join("summary.json"), &format!("{json}\n"))?;
    Ok(summary)
}

fn write_figures(dir: &Path, trajs: &[Trajectory], means: &[f64], eps: f64) -> Result<(), CliError> {
    let series: Vec<Series<'_>> = trajs
        .iter()
        .filter(|t| t.records.len() > 1)
        .map(|t| Series {
            name: t.method.as_str(),
            points: t.records.iter().map(|r| (r.t as f64, r.delta_w_norm)).collect(),
        })
        .collect();
    write_text(
        &dir.join("fig_deltaw.svg"),
        &line_chart("Weight change per round", "round t", "||w(t) - w(t-1)||", &series),
    )?;

    let groups: Vec<(String, Vec<f64>)> = trajs
        .iter()
        .filter_map(|t| t.last().map(|r| (t.method.to_string(), vec![r.std_acc_test, r.robust_acc_test])))
        .collect();
    write_text(
        &dir.join("fig_acc.svg"),
        &bar_chart("Test accuracy", "fraction", &["standard", "certified robust"], &groups),
    )?;

    let focus = trajs.iter().find(|t| t.method == Method::At).or_else(|| trajs.first());
    let stems: Vec<(f64, f64, bool)> = focus
        .and_then(|t| t.last())
        .map(|r| {
            r.w.w
                .iter()
                .zip(means)
                .enumerate()
                .map(|(i, (w, m))| ((i + 1) as f64, *w, m.abs() <= eps))
                .collect()
        })
        .unwrap_or_default();
    let title = format!("Final weights ({})", focus.map(|t| t.method.as_str()).unwrap_or("none"));
    write_text(
        &dir.join("fig_weights.svg"),
        &stem_chart(&title, "feature index", "w_i", &stems, ["robust", "non-robust"]),
    )
}

/// Runs the configured methods and writes all artifacts. Returns the summaries.
pub fn cmd_run(config: &Path, opts: &Options) -> Result<Vec<Summary>, CliError> {
    let cfg = load(config, opts)?;
    let spec = cfg.spec()?;
    let game = cfg.game_config()?;
    let condition = theorem_conditions(&spec, cfg.eps, cfg.lambda, SupStrategy::Auto).ok();
    make_dir(&cfg.output_dir)?;

    let sampled;
    let arena = if cfg.population {
        Arena::population(&spec)?
    } else {
        sampled = datasets(&cfg)?;
        Arena::sampled(&sampled.0, &sampled.1, Some(&spec))?
    };

    let methods = cfg.method.methods();
    opts.note(format!(
        "running {} on d = {}, {} training points",
        methods.iter().map(|m| m.as_str()).collect::<Vec<_>>().join(", "),
        spec.dim(),
        arena.train.len()
    ));
    let results: Vec<Result<Trajectory, CliError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = methods
            .iter()
            .map(|&m| {
                let (arena, game) = (&arena, &game);
                scope.spawn(move || play(m, arena, game))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(CliError::Solver("worker panicked".into()))))
            .collect()
    });

    let split = cfg.method == MethodChoice::All;
    let mut trajs = Vec::new();
    let mut summaries = Vec::new();
    let mut failures = Vec::new();
    for (m, res) in methods.iter().zip(results) {
        match res {
            Ok(traj) => {
                let dir = if split { cfg.output_dir.join(m.as_str()) } else { cfg.output_dir.clone() };
                if let Some(s) = write_method(&dir, &traj, &arena, cfg.eps, condition.as_ref())? {
                    opts.note(format!(
                        "{m}: std acc {:.4}, robust acc {:.4}, non-robust mass {:.4}",
                        s.std_acc_test, s.robust_acc_test, s.nonrobust_mass
                    ));
                    summaries.push(s);
                }
                if let Some(f) = &traj.failure {
                    failures.push(format!("{m}: {f}"));
                }
                trajs.push(traj);
            }
            Err(e) => failures.push(format!("{m}: {e}")),
        }
    }
    if split {
        let json = serde_json::to_string_pretty(&summaries).expect("summaries serialize");
        write_text(&cfg.output_dir.join("summary.json"), &format!("{json}\n"))?;
    }
    if cfg.emit_plots {
        write_figures(&cfg.output_dir, &trajs, &arena.means, cfg.eps)?;
    }
    if !failures.is_empty() {
        return Err(CliError::Solver(failures.join("; ")));
    }
    Ok(summaries)
}
