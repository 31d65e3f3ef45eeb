//! Library surface of the experiment runner, shared by the binary and the
//! acceptance suite.

#![allow(clippy::needless_range_loop)]

pub mod catalog;
pub mod config;
pub mod output;
pub mod rules;
pub mod runner;

use std::fs;
use std::path::Path;

use rayon::prelude::*;

use config::{ExperimentConfig, RunConfig};
use czlab_core::verify::EstimateReport;
use rules::RuleResult;
use runner::{run_experiment, RunError};

pub struct RunOutcome {
    pub reports: Vec<EstimateReport>,
    pub rules: Vec<RuleResult>,
}

impl RunOutcome {
    pub fn all_pass(&self) -> bool {
        self.rules.iter().all(|r| r.pass)
    }
}

/// Execute every experiment in the config (in parallel, collected in config
/// order) and evaluate the pass/fail rules.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome, RunError> {
    let per_exp: Vec<Vec<EstimateReport>> = cfg
        .experiment
        .par_iter()
        .map(|exp| run_experiment(cfg, exp))
        .collect::<Result<_, _>>()?;
    let mut reports = Vec::new();
    let mut rule_results = Vec::new();
    for (exp, rows) in cfg.experiment.iter().zip(per_exp) {
        rule_results.extend(rules::evaluate(&exp.name, &rows));
        reports.extend(rows);
    }
    Ok(RunOutcome {
        reports,
        rules: rule_results,
    })
}

/// Run and write `reports.json`, `reports.csv`, `summary.txt` into `out_dir`.
pub fn run_to_dir(cfg: &RunConfig, out_dir: &Path) -> Result<RunOutcome, RunError> {
    let outcome = run(cfg)?;
    fs::create_dir_all(out_dir)?;
    output::write_reports_json(&out_dir.join("reports.json"), &outcome.reports)?;
    output::write_reports_csv(&out_dir.join("reports.csv"), &outcome.reports)?;
    output::write_summary(&out_dir.join("summary.txt"), cfg, &outcome.reports, &outcome.rules)?;
    if cfg.dump_fields {
        dump_fields(cfg, out_dir)?;
    }
    Ok(outcome)
}

/// Serialize a few representative fields (binary + CSV) for inspection.
fn dump_fields(cfg: &RunConfig, out_dir: &Path) -> Result<(), RunError> {
    use czlab_core::fields::domain::Domain;
    use czlab_core::fields::io;
    use czlab_core::solvers::{manufactured_pair, Recipe};

    let dir = out_dir.join("fields");
    fs::create_dir_all(&dir)?;
    let m = *cfg.grids.last().expect("nonempty ladder");
    let d = Domain::unit_lab(cfg.dimension, m)?;
    let pair = manufactured_pair(&d, &Recipe::TrigProduct { freq: [1, 2, 1] })?;
    czlab_core::solvers::save_pair(&pair, &dir, "trig")?;
    io::write_csv(
        pair.u.grid(),
        &[pair.u.values(), pair.f.values()],
        &["u", "f"],
        dir.join("trig_pair.csv"),
    )?;

    // a maximal field with its argmax channel
    let mcfg = czlab_core::verify::MaximalConfig {
        backend: cfg.backend().expect("validated"),
        ladder: cfg.ladder_kind().expect("validated"),
    };
    let rs = mcfg.radius_set(&d)?;
    let points = czlab_core::fields::region::region_nodes(
        &d,
        &czlab_core::fields::region::Region::ball([0.0; 3], 0.5),
    )?;
    let mf = czlab_core::maximal::sharp_maximal_2(&pair.f, &points, &rs, mcfg.backend)?;
    let (values, argmax) = mf.to_grid_channels();
    io::write_channels(
        &d,
        io::KIND_MAXIMAL,
        &[&values, &argmax],
        dir.join("sharp_f.czf"),
    )?;
    Ok(())
}

/// Apply CLI overrides to a parsed config.
pub fn apply_overrides(
    cfg: &mut RunConfig,
    experiments: &[String],
    seed: Option<u64>,
    backend: Option<String>,
    ladder: Option<String>,
    dump_fields: bool,
) -> Result<(), config::ConfigError> {
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    if let Some(backend) = backend {
        cfg.maximal_backend = backend;
    }
    if let Some(ladder) = ladder {
        cfg.radius_ladder = ladder;
    }
    if dump_fields {
        cfg.dump_fields = true;
    }
    if !experiments.is_empty() {
        let mut selected = Vec::new();
        for name in experiments {
            if catalog::entry(name).is_none() {
                return Err(config::ConfigError::UnknownExperiment(name.clone()));
            }
            let existing = cfg.experiment.iter().find(|e| &e.name == name);
            selected.push(existing.cloned().unwrap_or_else(|| ExperimentConfig::named(name)));
        }
        cfg.experiment = selected;
    }
    cfg.validate()?;
    Ok(())
}
