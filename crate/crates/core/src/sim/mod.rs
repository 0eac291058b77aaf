//! Seeded Monte-Carlo comparison of inspection rules.
//!
//! Every run samples one facility trajectory from `N` and applies all rules
//! to it, so rules are compared on common random numbers. Run `i` draws from
//! its own stream of the configured seed, in this order: the perturbed matrix
//! (if any), the inspection-closure uniform, then one uniform per transition.

mod perturb;
mod rng;
mod trajectory;

pub use perturb::{perturb_matrix, Perturbation, SELF_LOOP_CAP};
pub use rng::{batch_rng, run_rng, BATCH_STREAM};
pub use trajectory::{
    evaluate_rule, sample_trajectory, sample_trajectory_from_uniforms, RuleOutcome, RuleTime, Trajectory,
};

use rayon::prelude::*;

use crate::markov::{hitting_times, PenaltyParams, State, TransitionModel};
use crate::stats;
use crate::value::Variant;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub name: String,
    pub time: RuleTime,
}

impl Rule {
    pub fn at(name: impl Into<String>, t: u64) -> Self {
        Self { name: name.into(), time: RuleTime::At(t) }
    }

    pub fn never(name: impl Into<String>) -> Self {
        Self { name: name.into(), time: RuleTime::Never }
    }
}

/// Whether a perturbed matrix is drawn for every run or once for the batch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PerturbationMode {
    #[default]
    PerRun,
    PerBatch,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub n_runs: u64,
    pub seed: u64,
    pub rules: Vec<Rule>,
    pub penalties: PenaltyParams,
    /// Standard deviation of the matrix perturbation; 0 uses the model as given.
    pub perturbation_sd: f64,
    pub perturbation_mode: PerturbationMode,
    /// Runs still operational after this many transitions are excluded.
    pub max_steps: u64,
    /// Keep one [`RunRecord`] per run in the report.
    pub keep_records: bool,
}

impl SimConfig {
    pub fn new(n_runs: u64, seed: u64, rules: Vec<Rule>, penalties: PenaltyParams) -> Self {
        Self {
            n_runs,
            seed,
            rules,
            penalties,
            perturbation_sd: 0.0,
            perturbation_mode: PerturbationMode::PerRun,
            max_steps: 100_000,
            keep_records: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSimConfig(m));
        if self.n_runs == 0 {
            return bad("n_runs must be at least 1".into());
        }
        if !(self.perturbation_sd >= 0.0 && self.perturbation_sd.is_finite()) {
            return bad(format!("perturbation_sd must be finite and >= 0, got {}", self.perturbation_sd));
        }
        for r in &self.rules {
            if let RuleTime::At(t) = r.time {
                if t == 0 {
                    return bad(format!("rule {:?} inspects at period 0; periods start at 1", r.name));
                }
                if t > self.max_steps {
                    return bad(format!("rule {:?} inspects at {t}, beyond max_steps {}", r.name, self.max_steps));
                }
            }
        }
        Ok(())
    }
}

/// Compact outcome of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub run: u64,
    pub t_f: u64,
    pub event: State,
    /// Expected-time-to-disruption period of the matrix this run used.
    pub matrix_etd: Option<u64>,
    /// Per rule, in configuration order: without and with inspection closures.
    pub outcomes: Vec<(RuleOutcome, RuleOutcome)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExcludedRun {
    pub run: u64,
    pub reason: Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuleSummary {
    pub name: String,
    pub time: RuleTime,
    /// `None` for a rule that never inspects.
    pub caught_fraction: Option<f64>,
    pub mean_value_no_ic: f64,
    pub mean_value_ic: f64,
    pub n_excluded: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndTimeStats {
    pub mean: f64,
    pub std_dev: f64,
    pub median: f64,
    pub min: u64,
    pub max: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub rules: Vec<RuleSummary>,
    /// Statistics of the first disruptive period over included runs.
    pub end_time: EndTimeStats,
    pub n_included: u64,
    pub excluded_runs: Vec<ExcludedRun>,
    /// Perturbed rows that needed rescaling, summed over matrices.
    pub renormalized_rows: u64,
    pub records: Option<Vec<RunRecord>>,
}

struct RunResult {
    record: RunRecord,
    renormalized: usize,
}

fn simulate_run(config: &SimConfig, model: &TransitionModel, batch: Option<&TransitionModel>, run: u64) -> Result<RunResult> {
    let mut rng = run_rng(config.seed, run);
    let (matrix, renormalized) = match (batch, config.perturbation_sd > 0.0) {
        (Some(m), _) => (m.clone(), 0),
        (None, true) => {
            let p = perturb_matrix(model, config.perturbation_sd, &mut rng)?;
            (p.model, p.renormalized_rows.len())
        }
        (None, false) => (model.clone(), 0),
    };
    let traj = sample_trajectory(&matrix, &mut rng, config.max_steps)?;
    let outcomes = config
        .rules
        .iter()
        .map(|r| {
            (
                evaluate_rule(&traj, r.time, &config.penalties, Variant::Base, &matrix),
                evaluate_rule(&traj, r.time, &config.penalties, Variant::InspectionOutcome, &matrix),
            )
        })
        .collect();
    let matrix_etd = if config.keep_records { hitting_times(&matrix).ok().map(|h| h.etd) } else { None };
    Ok(RunResult {
        record: RunRecord { run, t_f: traj.t_f, event: traj.event, matrix_etd, outcomes },
        renormalized,
    })
}

/// Runs `config.n_runs` seeded trajectories on `model` and summarizes every rule.
///
/// The report is bit-identical for identical inputs regardless of thread count.
pub fn run_experiment(config: &SimConfig, model: &TransitionModel) -> Result<SimReport> {
    config.validate()?;
    model.validate().into_result()?;

    let batch = match (config.perturbation_mode, config.perturbation_sd > 0.0) {
        (PerturbationMode::PerBatch, true) => {
            Some(perturb_matrix(model, config.perturbation_sd, &mut batch_rng(config.seed))?)
        }
        _ => None,
    };
    let batch_model = batch.as_ref().map(|p| &p.model);

    let results: Vec<Result<RunResult>> = (0..config.n_runs)
        .into_par_iter()
        .map(|run| simulate_run(config, model, batch_model, run))
        .collect();

    let mut records = Vec::with_capacity(results.len());
    let mut excluded_runs = Vec::new();
    let mut renormalized_rows = batch.as_ref().map_or(0, |p| p.renormalized_rows.len() as u64);
    for (run, r) in results.into_iter().enumerate() {
        match r {
            Ok(rr) => {
                renormalized_rows += rr.renormalized as u64;
                records.push(rr.record);
            }
            Err(reason) => excluded_runs.push(ExcludedRun { run: run as u64, reason }),
        }
    }
    if records.is_empty() {
        return Err(Error::InvalidSimConfig(format!(
            "all {} runs were excluded; first reason: {}",
            config.n_runs, excluded_runs[0].reason
        )));
    }

    let n_excluded = excluded_runs.len() as u64;
    let n = records.len() as f64;
    let rules = config
        .rules
        .iter()
        .enumerate()
        .map(|(i, rule)| {
            let no_ic: Vec<f64> = records.iter().map(|r| r.outcomes[i].0.value).collect();
            let ic: Vec<f64> = records.iter().map(|r| r.outcomes[i].1.value).collect();
            let caught = records.iter().filter(|r| r.outcomes[i].0.caught).count() as f64;
            RuleSummary {
                name: rule.name.clone(),
                time: rule.time,
                caught_fraction: match rule.time {
                    RuleTime::At(_) => Some(caught / n),
                    RuleTime::Never => None,
                },
                mean_value_no_ic: stats::mean(&no_ic).expect("records are non-empty"),
                mean_value_ic: stats::mean(&ic).expect("records are non-empty"),
                n_excluded,
            }
        })
        .collect();

    let t_f: Vec<f64> = records.iter().map(|r| r.t_f as f64).collect();
    let end_time = EndTimeStats {
        mean: stats::mean(&t_f).expect("records are non-empty"),
        std_dev: stats::std_dev(&t_f).unwrap_or(0.0),
        median: stats::median(&t_f).expect("records are non-empty"),
        min: records.iter().map(|r| r.t_f).min().expect("records are non-empty"),
        max: records.iter().map(|r| r.t_f).max().expect("records are non-empty"),
    };

    Ok(SimReport {
        rules,
        end_time,
        n_included: records.len() as u64,
        excluded_runs,
        renormalized_rows,
        records: config.keep_records.then_some(records),
    })
}
