//! Run configuration: a TOML document parsed into raw blocks, then validated
//! into core types before any computation starts.

use std::fmt;
use std::path::PathBuf;

use inspection_core::sensitivity::DGrid;
use inspection_core::sim::PerturbationMode;
use inspection_core::{Belief, PenaltyParams, PlannerSettings, TransitionModel, Violation};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub model: RawModel,
    pub penalties: RawPenalties,
    #[serde(default)]
    pub planner: RawPlanner,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulation: Option<RawSimulation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sensitivity: Option<RawSensitivity>,
    #[serde(default)]
    pub output: RawOutput,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawModel {
    /// Upper-triangular entries, row-major:
    /// `[NN, NV, NO, ND, NC, VV, VO, VD, VC, OO, OD, OC]`.
    pub no_inspect: Vec<f64>,
    /// Inspection-closure probability for `N, V, O`.
    pub inspect_closure: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPenalties {
    pub d: f64,
    pub c: f64,
    #[serde(default)]
    pub c_tilde: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPlanner {
    #[serde(default = "default_horizon")]
    pub horizon: u64,
    #[serde(default = "default_window")]
    pub convergence_window: u64,
    /// Belief over `N, V, O` in period 1.
    #[serde(default = "default_belief")]
    pub initial_belief: [f64; 3],
}

impl Default for RawPlanner {
    fn default() -> Self {
        Self { horizon: default_horizon(), convergence_window: default_window(), initial_belief: default_belief() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawRule {
    Period(u64),
    Named(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RawPerturbationMode {
    PerRun,
    PerBatch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSimulation {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runs: Option<u64>,
    pub rules: Vec<RawRule>,
    #[serde(default)]
    pub perturbation_sd: f64,
    #[serde(default = "default_mode")]
    pub perturbation_mode: RawPerturbationMode,
    #[serde(default = "default_max_steps")]
    pub max_steps: u64,
    #[serde(default)]
    pub write_runs: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSensitivity {
    pub times: Vec<u64>,
    pub d_min: f64,
    pub d_max: f64,
    #[serde(default = "default_d_step")]
    pub d_step: f64,
    pub c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Tsv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Tsv => "tsv",
        }
    }

    pub fn delimiter(self) -> u8 {
        match self {
            Format::Csv => b',',
            Format::Tsv => b'\t',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawOutput {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directory: Option<PathBuf>,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

impl Default for RawOutput {
    fn default() -> Self {
        Self { directory: None, formats: default_formats() }
    }
}

fn default_horizon() -> u64 {
    PlannerSettings::default().horizon
}

fn default_window() -> u64 {
    PlannerSettings::default().convergence_window
}

fn default_belief() -> [f64; 3] {
    [1.0, 0.0, 0.0]
}

fn default_mode() -> RawPerturbationMode {
    RawPerturbationMode::PerRun
}

fn default_max_steps() -> u64 {
    100_000
}

fn default_d_step() -> f64 {
    0.01
}

fn default_formats() -> Vec<Format> {
    vec![Format::Csv]
}

/// A simulation rule as written in the config, resolved to a period at run time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleSpec {
    Period(u64),
    /// Period before the expected time to disruption.
    Etd,
    /// Planner decision without inspection closures.
    PlannerBase,
    /// Planner decision with inspection closures.
    PlannerVariant,
    Never,
}

impl RuleSpec {
    pub fn name(&self) -> String {
        match self {
            RuleSpec::Period(t) => t.to_string(),
            RuleSpec::Etd => "t_E".into(),
            RuleSpec::PlannerBase => "t_V".into(),
            RuleSpec::PlannerVariant => "t_VC".into(),
            RuleSpec::Never => "never".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationSettings {
    pub seed: u64,
    pub runs: u64,
    pub rules: Vec<RuleSpec>,
    pub perturbation_sd: f64,
    pub perturbation_mode: PerturbationMode,
    pub max_steps: u64,
    pub write_runs: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivitySettings {
    pub times: Vec<u64>,
    pub grid: DGrid,
    pub c: f64,
}

/// A fully validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// The document with defaults and overrides applied.
    pub raw: RawConfig,
    pub model: TransitionModel,
    pub penalties: PenaltyParams,
    pub planner: PlannerSettings,
    pub initial_belief: Belief,
    pub simulation: Option<SimulationSettings>,
    pub sensitivity: Option<SensitivitySettings>,
    pub formats: Vec<Format>,
    pub directory: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    /// The document is not valid TOML or does not match the expected shape.
    Parse { line: usize, column: usize, message: String },
    /// One or more fields hold invalid values.
    Fields(Vec<FieldError>),
    /// The transition model violates a structural invariant.
    Model(Vec<Violation>),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Parse { line, column, message } => {
                write!(f, "config parse error at line {line}, column {column}: {message}")
            }
            ConfigError::Fields(errors) => {
                write!(f, "invalid config:")?;
                for e in errors {
                    write!(f, "\n  {e}")?;
                }
                Ok(())
            }
            ConfigError::Model(violations) => {
                write!(f, "invalid transition model:")?;
                for v in violations {
                    write!(f, "\n  model [{}] {}: {v}", v.check(), v.location())?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for ConfigError {}

/// 1-based line and column of a byte offset.
fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// Parses the document without semantic validation.
pub fn parse_config(text: &str) -> Result<RawConfig, ConfigError> {
    toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| line_column(text, s.start));
        ConfigError::Parse { line, column, message: e.message().trim().to_string() }
    })
}

/// Parses and validates a configuration document.
pub fn load_config(text: &str) -> Result<RunConfig, ConfigError> {
    RunConfig::from_raw(parse_config(text)?)
}

struct Errors(Vec<FieldError>);

impl Errors {
    fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.0.push(FieldError { path: path.into(), message: message.into() });
    }

    fn finite(&mut self, path: &str, x: f64) -> bool {
        if !x.is_finite() {
            self.push(path, format!("must be finite, got {x}"));
        }
        x.is_finite()
    }
}

impl RunConfig {
    pub fn from_raw(raw: RawConfig) -> Result<Self, ConfigError> {
        let mut errors = Errors(Vec::new());

        let model = validate_model(&raw.model, &mut errors);
        let penalties = validate_penalties(&raw.penalties, &mut errors);

        let planner = PlannerSettings { horizon: raw.planner.horizon, convergence_window: raw.planner.convergence_window };
        if planner.horizon == 0 {
            errors.push("planner.horizon", "must be at least 1");
        }
        if planner.convergence_window == 0 {
            errors.push("planner.convergence_window", "must be at least 1");
        }
        let [n, v, o] = raw.planner.initial_belief;
        let initial_belief = match Belief::operational(n, v, o) {
            Ok(b) => Some(b),
            Err(e) => {
                errors.push("planner.initial_belief", e.to_string());
                None
            }
        };

        let simulation = raw.simulation.as_ref().and_then(|s| validate_simulation(s, &mut errors));
        let sensitivity = raw.sensitivity.as_ref().and_then(|s| validate_sensitivity(s, &mut errors));

        if raw.output.formats.is_empty() {
            errors.push("output.formats", "must list at least one format");
        }

        if !errors.0.is_empty() {
            return Err(ConfigError::Fields(errors.0));
        }
        let model = model.expect("model errors are reported above");
        let report = model.validate();
        if !report.is_valid() {
            return Err(ConfigError::Model(report.violations));
        }
        Ok(Self {
            model,
            penalties: penalties.expect("penalty errors are reported above"),
            planner,
            initial_belief: initial_belief.expect("belief errors are reported above"),
            simulation,
            sensitivity,
            formats: raw.output.formats.clone(),
            directory: raw.output.directory.clone(),
            raw,
        })
    }

    /// The effective configuration as a TOML document. The output directory is
    /// left out so that reloading it elsewhere reproduces the same reports.
    pub fn effective_toml(&self) -> String {
        let mut raw = self.raw.clone();
        raw.output.directory = None;
        toml::to_string(&raw).expect("config serializes")
    }

    /// SHA-256 of [`RunConfig::effective_toml`], hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.effective_toml().as_bytes()))
    }
}

fn validate_model(raw: &RawModel, errors: &mut Errors) -> Option<TransitionModel> {
    let mut ok = true;
    if raw.no_inspect.len() != 12 {
        errors.push(
            "model.no_inspect",
            format!("needs 12 entries (NN NV NO ND NC, VV VO VD VC, OO OD OC), got {}", raw.no_inspect.len()),
        );
        ok = false;
    }
    if raw.inspect_closure.len() != 3 {
        errors.push("model.inspect_closure", format!("needs 3 entries (N, V, O), got {}", raw.inspect_closure.len()));
        ok = false;
    }
    for (i, x) in raw.no_inspect.iter().enumerate() {
        ok &= errors.finite(&format!("model.no_inspect[{i}]"), *x);
    }
    for (i, x) in raw.inspect_closure.iter().enumerate() {
        ok &= errors.finite(&format!("model.inspect_closure[{i}]"), *x);
    }
    if !ok {
        return None;
    }
    let entries: [f64; 12] = raw.no_inspect.as_slice().try_into().expect("length checked");
    let p_ic: [f64; 3] = raw.inspect_closure.as_slice().try_into().expect("length checked");
    Some(TransitionModel::from_upper_entries(entries, p_ic))
}

fn validate_penalties(raw: &RawPenalties, errors: &mut Errors) -> Option<PenaltyParams> {
    let finite = [("penalties.d", raw.d), ("penalties.c", raw.c), ("penalties.c_tilde", raw.c_tilde)]
        .into_iter()
        .fold(true, |ok, (path, x)| errors.finite(path, x) && ok);
    if !finite {
        return None;
    }
    match PenaltyParams::new(raw.d, raw.c, raw.c_tilde) {
        Ok(p) => Some(p),
        Err(_) => {
            let path = if raw.c_tilde < 0.0 || raw.c_tilde > raw.c { "penalties.c_tilde" } else { "penalties.d" };
            errors.push(
                path,
                format!(
                    "penalties must be ordered 0 <= c_tilde <= c <= d; got d = {}, c = {}, c_tilde = {}",
                    raw.d, raw.c, raw.c_tilde
                ),
            );
            None
        }
    }
}

fn validate_simulation(raw: &RawSimulation, errors: &mut Errors) -> Option<SimulationSettings> {
    let start = errors.0.len();
    if raw.seed.is_none() {
        errors.push("simulation.seed", "is required (or pass --seed)");
    }
    match raw.runs {
        None => errors.push("simulation.runs", "is required (or pass --runs)"),
        Some(0) => errors.push("simulation.runs", "must be at least 1"),
        Some(_) => {}
    }
    if raw.rules.is_empty() {
        errors.push("simulation.rules", "must list at least one rule");
    }
    if raw.max_steps == 0 {
        errors.push("simulation.max_steps", "must be at least 1");
    }
    if errors.finite("simulation.perturbation_sd", raw.perturbation_sd) && raw.perturbation_sd < 0.0 {
        errors.push("simulation.perturbation_sd", format!("must be >= 0, got {}", raw.perturbation_sd));
    }
    let mut rules = Vec::with_capacity(raw.rules.len());
    for (i, rule) in raw.rules.iter().enumerate() {
        let path = format!("simulation.rules[{i}]");
        let spec = match rule {
            RawRule::Period(0) => {
                errors.push(path, "periods start at 1");
                continue;
            }
            RawRule::Period(t) if *t > raw.max_steps => {
                errors.push(path, format!("period {t} is beyond simulation.max_steps = {}", raw.max_steps));
                continue;
            }
            RawRule::Period(t) => RuleSpec::Period(*t),
            RawRule::Named(name) => match name.as_str() {
                "t_E" => RuleSpec::Etd,
                "t_V" => RuleSpec::PlannerBase,
                "t_VC" => RuleSpec::PlannerVariant,
                "never" => RuleSpec::Never,
                other => {
                    errors.push(path, format!("unknown rule {other:?}; expected a period or one of t_E, t_V, t_VC, never"));
                    continue;
                }
            },
        };
        if rules.contains(&spec) {
            errors.push(format!("simulation.rules[{i}]"), format!("duplicate rule {}", spec.name()));
            continue;
        }
        rules.push(spec);
    }
    if errors.0.len() > start {
        return None;
    }
    Some(SimulationSettings {
        seed: raw.seed.expect("checked above"),
        runs: raw.runs.expect("checked above"),
        rules,
        perturbation_sd: raw.perturbation_sd,
        perturbation_mode: match raw.perturbation_mode {
            RawPerturbationMode::PerRun => PerturbationMode::PerRun,
            RawPerturbationMode::PerBatch => PerturbationMode::PerBatch,
        },
        max_steps: raw.max_steps,
        write_runs: raw.write_runs,
    })
}

fn validate_sensitivity(raw: &RawSensitivity, errors: &mut Errors) -> Option<SensitivitySettings> {
    let start = errors.0.len();
    if raw.times.is_empty() {
        errors.push("sensitivity.times", "must list at least one period");
    }
    for (i, t) in raw.times.iter().enumerate() {
        if *t == 0 {
            errors.push(format!("sensitivity.times[{i}]"), "periods start at 1");
        }
    }
    if errors.finite("sensitivity.c", raw.c) && raw.c < 0.0 {
        errors.push("sensitivity.c", format!("must be >= 0, got {}", raw.c));
    }
    let bounds = [("sensitivity.d_min", raw.d_min), ("sensitivity.d_max", raw.d_max), ("sensitivity.d_step", raw.d_step)]
        .into_iter()
        .fold(true, |ok, (path, x)| errors.finite(path, x) && ok);
    let grid = if bounds {
        match DGrid::new(raw.d_min, raw.d_max, raw.d_step) {
            Ok(g) => Some(g),
            Err(e) => {
                let path = if raw.d_step > 0.0 { "sensitivity.d_max" } else { "sensitivity.d_step" };
                errors.push(path, e.to_string());
                None
            }
        }
    } else {
        None
    };
    if errors.0.len() > start {
        return None;
    }
    Some(SensitivitySettings { times: raw.times.clone(), grid: grid?, c: raw.c })
}
