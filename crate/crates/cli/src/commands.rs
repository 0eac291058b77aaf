//! Subcommands: each turns a validated config into an in-memory [`Report`].

use inspection_core::sensitivity::d_range_sweep;
use inspection_core::sim::{run_experiment, Rule, RuleTime, SimConfig};
use inspection_core::{
    hitting_times, optimal_inspection_time, plan_value_profile, Error, InspectionTime, PlanDecision, State,
    Variant, Violation,
};

use crate::config::{ConfigError, FieldError, RuleSpec, RunConfig};
use crate::report::{num, opt_num, Report, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VariantChoice {
    /// Both variants when `c_tilde > 0`, otherwise the base variant only.
    #[default]
    Auto,
    Base,
    InspectionOutcome,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Plan(VariantChoice),
    Simulate,
    Sensitivity,
    HittingTime,
    Validate,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Plan(_) => "plan",
            Command::Simulate => "simulate",
            Command::Sensitivity => "sensitivity",
            Command::HittingTime => "hitting-time",
            Command::Validate => "validate",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(ConfigError),
    #[error("invalid transition model: {0}")]
    Model(Error),
    #[error("computation failed: {0}")]
    Computation(Error),
    #[error("{0}")]
    VariantRefused(String),
    #[error("{context}: {source}")]
    Io { context: String, source: std::io::Error },
}

impl CliError {
    /// Process exit status for this error category.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(ConfigError::Model(_)) | CliError::Model(_) => 3,
            CliError::Config(_) => 2,
            CliError::Computation(_) => 4,
            CliError::Io { .. } => 5,
            CliError::VariantRefused(_) => 6,
        }
    }

    fn missing(path: &str, message: &str) -> Self {
        CliError::Config(ConfigError::Fields(vec![FieldError { path: path.into(), message: message.into() }]))
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::AlphaUndefined => CliError::VariantRefused(refusal()),
            Error::InvalidModel(_) | Error::Divergence(_) => CliError::Model(e),
            e => CliError::Computation(e),
        }
    }
}

fn refusal() -> String {
    "the inspection-outcome variant needs penalties.c_tilde > 0 (it is 0 or omitted)".into()
}

pub fn dispatch(command: Command, config: &RunConfig) -> Result<Report, CliError> {
    match command {
        Command::Plan(choice) => plan(config, choice),
        Command::Simulate => simulate(config),
        Command::Sensitivity => sensitivity(config),
        Command::HittingTime => hitting_time(config),
        Command::Validate => validate(config),
    }
}

fn variants(config: &RunConfig, choice: VariantChoice) -> Result<Vec<Variant>, CliError> {
    let has_ic = config.penalties.c_tilde() > 0.0;
    match choice {
        VariantChoice::Auto if has_ic => Ok(vec![Variant::Base, Variant::InspectionOutcome]),
        VariantChoice::Auto | VariantChoice::Base => Ok(vec![Variant::Base]),
        _ if !has_ic => Err(CliError::VariantRefused(refusal())),
        VariantChoice::InspectionOutcome => Ok(vec![Variant::InspectionOutcome]),
        VariantChoice::Both => Ok(vec![Variant::Base, Variant::InspectionOutcome]),
    }
}

fn decide(config: &RunConfig, variant: Variant) -> Result<PlanDecision, CliError> {
    Ok(optimal_inspection_time(&config.model, &config.penalties, &config.initial_belief, variant, &config.planner)?)
}

fn plan(config: &RunConfig, choice: VariantChoice) -> Result<Report, CliError> {
    let mut report = Report::new("plan");
    let mut summary = Table::new(
        "plan_summary",
        &["variant", "t_star", "forced_at_horizon", "assumptions_pass", "failed_assumptions"],
    );
    let mut trace = Table::new("score_trace", &["variant", "period", "score"]);
    let mut assumptions = Table::new("assumptions", &["variant", "check", "passed", "first_violation"]);
    let mut profile = Table::new("profile", &["variant", "wait", "inspect_period", "value"]);

    for variant in variants(config, choice)? {
        let label = variant.label();
        let dec = decide(config, variant)?;
        let failed: Vec<&str> = dec.assumptions.iter().flat_map(|r| r.failures()).map(|c| c.kind.label()).collect();
        summary.push(vec![
            label.into(),
            dec.t_star.to_string(),
            dec.forced_at_horizon.to_string(),
            dec.assumptions.as_ref().map_or("", |r| if r.all_pass() { "true" } else { "false" }).into(),
            failed.join(";"),
        ]);
        for (i, s) in dec.score_trace.iter().enumerate() {
            trace.push(vec![label.into(), (i + 1).to_string(), num(*s)]);
        }
        for check in dec.assumptions.iter().flat_map(|r| &r.checks) {
            assumptions.push(vec![
                label.into(),
                check.kind.label().into(),
                check.passed().to_string(),
                check.first_violation.map(|k| k.to_string()).unwrap_or_default(),
            ]);
        }
        // Without the assumptions the first stop need not be optimal, so the
        // full profile is reported for inspection.
        if !failed.is_empty() {
            let values = plan_value_profile(
                &config.model,
                &config.penalties,
                &config.initial_belief,
                variant,
                config.planner.horizon,
            )?;
            for (j, v) in values.iter().enumerate() {
                profile.push(vec![label.into(), j.to_string(), (j + 1).to_string(), num(*v)]);
            }
        }
        report.note(format!("t_star.{label}"), dec.t_star);
    }
    report.tables.extend([summary, trace, assumptions]);
    if !profile.rows.is_empty() {
        report.tables.push(profile);
    }
    Ok(report)
}

fn resolve_rule(config: &RunConfig, spec: RuleSpec) -> Result<RuleTime, CliError> {
    let from_decision = |dec: PlanDecision| match dec.t_star {
        InspectionTime::At(t) => RuleTime::At(t),
        InspectionTime::Never => RuleTime::Never,
    };
    Ok(match spec {
        RuleSpec::Period(t) => RuleTime::At(t),
        RuleSpec::Never => RuleTime::Never,
        RuleSpec::Etd => match hitting_times(&config.model)?.etd {
            0 => return Err(CliError::Computation(Error::InvalidSimConfig("t_E resolves to period 0".into()))),
            t => RuleTime::At(t),
        },
        RuleSpec::PlannerBase => from_decision(decide(config, Variant::Base)?),
        RuleSpec::PlannerVariant => {
            if config.penalties.c_tilde() <= 0.0 {
                return Err(CliError::VariantRefused(refusal()));
            }
            from_decision(decide(config, Variant::InspectionOutcome)?)
        }
    })
}

fn simulate(config: &RunConfig) -> Result<Report, CliError> {
    let settings = config
        .simulation
        .as_ref()
        .ok_or_else(|| CliError::missing("simulation", "the simulate command needs a [simulation] block"))?;
    let mut report = Report::new("simulate");
    let mut rules = Vec::with_capacity(settings.rules.len());
    for spec in &settings.rules {
        let time = resolve_rule(config, *spec)?;
        let resolved = match time {
            RuleTime::At(t) => t.to_string(),
            RuleTime::Never => "never".into(),
        };
        report.note(format!("rule.{}", spec.name()), resolved);
        rules.push(Rule { name: spec.name(), time });
    }
    let sim = SimConfig {
        perturbation_sd: settings.perturbation_sd,
        perturbation_mode: settings.perturbation_mode,
        max_steps: settings.max_steps,
        keep_records: settings.write_runs,
        ..SimConfig::new(settings.runs, settings.seed, rules, config.penalties)
    };
    let out = run_experiment(&sim, &config.model)?;

    let mut summary =
        Table::new("simulation", &["rule", "caught_fraction", "mean_value_no_ic", "mean_value_ic", "n_excluded"]);
    for r in &out.rules {
        summary.push(vec![
            r.name.clone(),
            opt_num(r.caught_fraction),
            num(r.mean_value_no_ic),
            num(r.mean_value_ic),
            r.n_excluded.to_string(),
        ]);
    }
    let mut end = Table::new("end_times", &["statistic", "value"]);
    let e = &out.end_time;
    for (k, v) in [
        ("mean", num(e.mean)),
        ("std_dev", num(e.std_dev)),
        ("median", num(e.median)),
        ("min", e.min.to_string()),
        ("max", e.max.to_string()),
        ("n_included", out.n_included.to_string()),
        ("n_excluded", out.excluded_runs.len().to_string()),
        ("renormalized_rows", out.renormalized_rows.to_string()),
    ] {
        end.push(vec![k.into(), v]);
    }
    let mut excluded = Table::new("excluded_runs", &["run", "reason"]);
    for x in &out.excluded_runs {
        excluded.push(vec![x.run.to_string(), x.reason.to_string()]);
    }
    report.tables.extend([summary, end, excluded]);

    if let Some(records) = &out.records {
        let mut header = vec!["run".to_string(), "t_f".into(), "event".into(), "matrix_etd".into()];
        for r in &out.rules {
            header.extend(["caught", "value_no_ic", "value_ic"].map(|c| format!("{}_{c}", r.name)));
        }
        let mut runs = Table { name: "runs".into(), header, rows: Vec::with_capacity(records.len()) };
        for rec in records {
            let mut row = vec![
                rec.run.to_string(),
                rec.t_f.to_string(),
                rec.event.to_string(),
                rec.matrix_etd.map(|t| t.to_string()).unwrap_or_default(),
            ];
            for (no_ic, ic) in &rec.outcomes {
                row.extend([no_ic.caught.to_string(), num(no_ic.value), num(ic.value)]);
            }
            runs.push(row);
        }
        report.tables.push(runs);
    }
    Ok(report)
}

fn sensitivity(config: &RunConfig) -> Result<Report, CliError> {
    let s = config
        .sensitivity
        .as_ref()
        .ok_or_else(|| CliError::missing("sensitivity", "the sensitivity command needs a [sensitivity] block"))?;
    let ranges = d_range_sweep(&config.model, &config.initial_belief, s.c, &s.times, &s.grid, &config.planner)?;
    let mut table = Table::new("sensitivity", &["t", "d_L", "d_U"]);
    for r in ranges {
        table.push(vec![r.t.to_string(), opt_num(r.interval.map(|i| i.0)), opt_num(r.interval.map(|i| i.1))]);
    }
    let mut report = Report::new("sensitivity");
    report.note("sensitivity.c", s.c);
    report.tables.push(table);
    Ok(report)
}

fn hitting_time(config: &RunConfig) -> Result<Report, CliError> {
    let h = hitting_times(&config.model)?;
    let mut table = Table::new("hitting_time", &["quantity", "value"]);
    for s in [State::N, State::V, State::O] {
        table.push(vec![format!("mu_{s}"), num(h.mu(s))]);
    }
    table.push(vec!["t_E".into(), h.etd.to_string()]);
    let mut report = Report::new("hitting-time");
    report.note("t_E", h.etd);
    report.tables.push(table);
    Ok(report)
}

fn validate(config: &RunConfig) -> Result<Report, CliError> {
    let mut table = Table::new("validation", &["scope", "check", "passed", "location", "detail"]);
    // Structural violations stop the run at load time, so every check here passed.
    for check in Violation::CHECKS {
        table.push(vec!["model".into(), check.into(), "true".into(), String::new(), String::new()]);
    }
    let mut variants = vec![Variant::Base];
    if config.penalties.c_tilde() > 0.0 {
        variants.push(Variant::InspectionOutcome);
    }
    for variant in variants {
        let dec = decide(config, variant)?;
        for c in dec.assumptions.iter().flat_map(|r| &r.checks) {
            let (location, detail) = match c.first_violation {
                Some(k) => (format!("step {k}"), format!("first violated at period {}", k + 1)),
                None => (String::new(), String::new()),
            };
            table.push(vec![
                format!("assumptions.{}", variant.label()),
                c.kind.label().into(),
                c.passed().to_string(),
                location,
                detail,
            ]);
        }
    }
    let (passed, detail) = match hitting_times(&config.model) {
        Ok(h) => (true, format!("mu_N = {}", h.mu(State::N))),
        Err(e) => (false, e.to_string()),
    };
    table.push(vec!["hitting_time".into(), "finite".into(), passed.to_string(), String::new(), detail]);
    let mut report = Report::new("validate");
    report.tables.push(table);
    Ok(report)
}
