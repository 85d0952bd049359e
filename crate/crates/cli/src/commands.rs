use std::path::{Path, PathBuf};

use gaitmatrix::estimator::{estimate_matrix, EstimatorConfig, TrialRecord};
use gaitmatrix::gaitcontrol::{run_closed_loop, schedule_open_loop, ActuationWaveform, Pulse, SessionConfig};
use gaitmatrix::planner::{
    optimal_cycle, optimal_mean_cycle, optimal_rate_cycle, ControlSequence, PlanDocument, PlanResult, Sense,
};
use gaitmatrix::quasistatic::{calibrate_all, simulate_transitions, BodyDocument, Calibration};
use gaitmatrix::statecore::{default_labels, validate, RewardMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

/// Like `println!`, but a closed stdout (e.g. piped into `head`) is ignored.
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

use crate::args::{GaitArgs, LearnArgs, PlanArgs, SimulateArgs, ValidateArgs};
use crate::config::{
    load_body, load_matrix, read_json, read_text, resolve_body, resolve_matrix, Direction, ProjectConfig,
    PROJECT_SCHEMA,
};
use crate::error::CliError;
use crate::io::{
    parse_session_log, parse_trials, render_trials, to_json, with_schema, write_artifact, SESSION_SCHEMA,
    TIMELINE_SCHEMA,
};
use crate::render::render_trajectory;

/// Settings shared by every subcommand after flags, project file and
/// defaults have been merged, in that order of precedence.
pub struct Context {
    pub project: ProjectConfig,
    pub project_path: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub l_max: usize,
    pub sense: Direction,
}

impl Context {
    fn body(&self, explicit: Option<&Path>) -> Result<BodyDocument<f64>, CliError> {
        match (explicit, &self.project.body) {
            (Some(p), _) => load_body(p),
            (None, Some(src)) => resolve_body(src),
            (None, None) => Err(CliError::input(
                "no body given: pass a body file or set `body` in the project",
            )),
        }
    }

    fn trials(&self, path: &Path, n: usize) -> Result<Vec<TrialRecord<f64>>, CliError> {
        let labels = RewardMatrix::masked(default_labels(n));
        parse_trials(&read_text(path)?, &labels).map_err(|e| CliError::file(path, e))
    }

    fn state_count(&self, flag: Option<usize>) -> usize {
        flag.or(self.project.states).unwrap_or(4)
    }
}

// ---------------------------------------------------------------- simulate

pub fn simulate(ctx: &Context, args: &SimulateArgs) -> Result<(), CliError> {
    let mut doc = ctx.body(args.body.as_deref())?;
    if let Some(s) = args.substeps {
        doc.sim.substeps = s;
    }
    if let Some(d) = args.deadband {
        doc.sim.deadband = d;
    }
    doc.sim.check()?;
    if args.repeats == 0 {
        return Err(CliError::input("--repeats must be at least 1"));
    }
    if !(args.noise_mm >= 0.0 && args.noise_mm.is_finite()) {
        return Err(CliError::input("--noise-mm must be non-negative"));
    }

    let table = simulate_transitions(&doc.body, &doc.sim)?;
    let m = table.to_matrix(doc.sim.deadband)?;
    let exact = table.to_trials();
    let trials = if args.repeats == 1 && args.noise_mm == 0.0 {
        exact
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
        let noise = Normal::new(0.0, args.noise_mm).map_err(|e| CliError::input(e.to_string()))?;
        let mut out = Vec::new();
        for _ in 0..args.repeats {
            for t in &exact {
                let mut t = t.clone();
                t.displacement += noise.sample(&mut rng);
                t.timestamp = out.len() as f64;
                out.push(t);
            }
        }
        out
    };

    let matrix_path = write_artifact(&ctx.out_dir, "matrix.json", &to_json(&m.to_document()))?;
    let trials_path = write_artifact(&ctx.out_dir, "transitions.csv", &render_trials(&trials, &m))?;
    out!("{}", m);
    for (i, row) in table.displacements.iter().enumerate() {
        let cells: Vec<String> = row
            .iter()
            .map(|d| d.map_or("      x".into(), |d| format!("{:7.3}", d)))
            .collect();
        out!("{} {} mm", m.label(i), cells.join(" "));
    }
    unrealizable_note(&table.calibration);
    out!("wrote {}", matrix_path.display());
    out!("wrote {}", trials_path.display());
    Ok(())
}

fn unrealizable_note(cal: &Calibration<f64>) {
    let missing: Vec<&str> = (0..cal.states.len())
        .filter(|&i| !cal.is_realizable(i))
        .map(|i| cal.labels[i].as_str())
        .collect();
    if !missing.is_empty() {
        out!("unrealizable states (masked): {}", missing.join(", "));
    }
}

// ------------------------------------------------------------------- learn

fn estimator_config(ctx: &Context, args: &LearnArgs) -> EstimatorConfig<f64> {
    let mut cfg = ctx.project.estimator.clone();
    if let Some(a) = args.aggregation {
        cfg.aggregation = a.into();
    }
    if let Some(h) = args.halflife {
        cfg.recency_halflife = Some(h);
    }
    if let Some(k) = args.min_trials {
        cfg.min_trials = k;
    }
    if let Some(d) = args.deadband {
        cfg.deadband = d;
    }
    cfg
}

pub fn learn(ctx: &Context, args: &LearnArgs) -> Result<(), CliError> {
    let path = args
        .trials
        .clone()
        .or_else(|| ctx.project.trials.clone())
        .ok_or_else(|| CliError::input("no trial log given: pass a CSV file or set `trials` in the project"))?;
    let n = ctx.state_count(args.states);
    let cfg = estimator_config(ctx, args);
    let trials = ctx.trials(&path, n)?;
    let (m, report) = estimate_matrix(&trials, n, &cfg)?;
    let matrix_path = write_artifact(&ctx.out_dir, "matrix.json", &to_json(&m.to_document()))?;
    let coverage_path = write_artifact(&ctx.out_dir, "coverage.json", &to_json(&report))?;
    out!("{}", m);
    out!(
        "{} trials, {}/{} pairs observed, deadband {} mm",
        trials.len(),
        report.observed_pairs,
        report.total_pairs,
        report.deadband_mm
    );
    out!("wrote {}", matrix_path.display());
    out!("wrote {}", coverage_path.display());
    Ok(())
}

// -------------------------------------------------------------------- plan

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanReport {
    pub cycle: Vec<String>,
    /// Exact reward per transition, e.g. `"3/4"`.
    pub mean: String,
    pub mean_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub cycle: Vec<String>,
    pub reward: i64,
    pub duration_ms: f64,
    pub rate_per_s: f64,
}

/// Plan artifact: the exhaustive result plus optional asymptotic gaits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanReport {
    #[serde(flatten)]
    pub plan: PlanDocument,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_cycle: Option<MeanReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate_cycle: Option<RateReport>,
}

fn plan_matrix(ctx: &Context, explicit: Option<&Path>) -> Result<RewardMatrix, CliError> {
    if let Some(p) = explicit {
        return load_matrix(p);
    }
    let project = &ctx.project;
    match (&project.matrix, &project.trials, &project.body) {
        (Some(_), Some(_), _) => Err(CliError::input(
            "project sets both `matrix` and `trials`; keep one matrix source",
        )),
        (Some(src), None, _) => resolve_matrix(src),
        (None, Some(path), _) => {
            let n = ctx.state_count(None);
            let trials = ctx.trials(path, n)?;
            Ok(estimate_matrix(&trials, n, &project.estimator)?.0)
        }
        (None, None, Some(src)) => {
            let doc = resolve_body(src)?;
            Ok(simulate_transitions(&doc.body, &doc.sim)?.to_matrix(doc.sim.deadband)?)
        }
        (None, None, None) => Err(CliError::input(
            "no reward matrix given: pass a matrix file or set `matrix`, `trials` or `body` in the project",
        )),
    }
}

fn run_plan(ctx: &Context, m: &RewardMatrix) -> Result<PlanResult, CliError> {
    Ok(optimal_cycle(m, ctx.l_max, ctx.sense.into())?)
}

pub fn plan(ctx: &Context, args: &PlanArgs) -> Result<(), CliError> {
    let m = plan_matrix(ctx, args.matrix.as_deref())?;
    let result = run_plan(ctx, &m)?;
    let sense: Sense = ctx.sense.into();
    // The asymptotic planners maximize; backward travel maximizes the negation.
    let oriented = match sense {
        Sense::Maximize => m.clone(),
        Sense::Minimize => m.negated(),
    };
    let sign = if sense == Sense::Maximize { 1 } else { -1 };

    let mut report = PlanReport {
        plan: result.to_document(&m),
        mean_cycle: None,
        rate_cycle: None,
    };
    let mut deferred = None;
    if result.feasible && (args.mean || ctx.project.planner.mean) {
        match optimal_mean_cycle(&oriented) {
            Ok(c) => {
                let mean = c.mean * sign;
                report.mean_cycle = Some(MeanReport {
                    cycle: c.cycle.labels(&m),
                    mean: mean.to_string(),
                    mean_value: *mean.numer() as f64 / *mean.denom() as f64,
                })
            }
            Err(e) => deferred = Some(CliError::from(e)),
        }
    }
    if result.feasible && (args.rate || ctx.project.planner.rate) {
        let durations = match (&args.durations, &ctx.project.planner.durations_ms) {
            (Some(p), _) => read_json::<Vec<Vec<f64>>>(p)?,
            (None, Some(d)) => d.clone(),
            (None, None) => {
                return Err(CliError::input(
                    "rate planning needs durations: pass --durations or set planner.durations_ms",
                ))
            }
        };
        match optimal_rate_cycle(&oriented, &durations) {
            Ok(c) => {
                report.rate_cycle = Some(RateReport {
                    cycle: c.cycle.labels(&m),
                    reward: c.reward * sign,
                    duration_ms: c.duration,
                    rate_per_s: c.rate * sign as f64 * 1000.0,
                })
            }
            Err(e) => deferred = Some(CliError::from(e)),
        }
    }

    let path = write_artifact(&ctx.out_dir, "plan.json", &to_json(&report))?;
    if !result.feasible {
        return Err(CliError::Infeasible(format!(
            "no feasible cycle with at most {} transitions (plan written to {})",
            ctx.l_max,
            path.display()
        )));
    }
    out!(
        "best reward {} (l_max {}, {:?})",
        result.best_reward,
        ctx.l_max,
        ctx.sense
    );
    for c in &result.cycles {
        out!("  {}", c.render(&m));
    }
    if let Some(mc) = &report.mean_cycle {
        out!("best mean {} per transition: {}", mc.mean, mc.cycle.join(" -> "));
    }
    if let Some(rc) = &report.rate_cycle {
        out!("best rate {:.6} per s: {}", rc.rate_per_s, rc.cycle.join(" -> "));
    }
    out!("wrote {}", path.display());
    match deferred {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

// -------------------------------------------------------------------- gait

fn parse_sequence(text: &str, labels: &RewardMatrix) -> Result<ControlSequence, CliError> {
    let states = text
        .replace("->", ",")
        .replace('→', ",")
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| labels.resolve(t).map_err(CliError::from))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ControlSequence::new(states)?)
}

/// Open-loop waveform for the anteriograde pattern: actuator 1 alone, then
/// actuator 2 alone, then rest, each for 300 ms.
fn default_waveform(cal: &Calibration<f64>) -> ActuationWaveform<f64> {
    let strength = |state: usize, actuator: usize| {
        cal.activation(state)
            .ok()
            .and_then(|a| a.get(actuator).copied())
            .unwrap_or(1.0)
    };
    ActuationWaveform::new(
        Pulse::new(strength(2, 0), 300.0, 900.0),
        Pulse::new(strength(1, 1), 300.0, 900.0),
        300.0,
    )
}

pub fn gait(ctx: &Context, args: &GaitArgs) -> Result<(), CliError> {
    let doc = ctx.body(args.body.as_deref())?;
    let gcfg = &ctx.project.gait;
    let space = doc.body.state_space()?;
    let labels = RewardMatrix::masked(space.labels());

    let sequence = match (&args.sequence, &gcfg.sequence) {
        (Some(s), _) => parse_sequence(s, &labels)?,
        (None, Some(tokens)) => parse_sequence(&tokens.join(","), &labels)?,
        (None, None) => {
            let m = simulate_transitions(&doc.body, &doc.sim)?.to_matrix(doc.sim.deadband)?;
            let result = run_plan(ctx, &m)?;
            result.canonical().cloned().ok_or_else(|| {
                CliError::Infeasible(format!("no feasible cycle with at most {} transitions", ctx.l_max))
            })?
        }
    };
    let session_cfg = SessionConfig {
        tick_ms: args.tick_ms.unwrap_or(gcfg.tick_ms),
        cycles: args.cycles.unwrap_or(gcfg.cycles),
        log_every: gcfg.log_every,
        ..SessionConfig::default()
    };

    let session = run_closed_loop(&doc.body, &sequence, &doc.sim, &session_cfg)?;
    let waveform = match gcfg.waveform {
        Some(w) => w,
        None => default_waveform(&calibrate_all(&doc.body, &doc.sim)?),
    };
    let timeline = schedule_open_loop(&waveform, session_cfg.cycles)?;

    let log = session.to_csv();
    let svg = render_trajectory(&parse_session_log(&log)?)?;
    let timeline_path = write_artifact(
        &ctx.out_dir,
        "timeline.csv",
        &with_schema(TIMELINE_SCHEMA, &timeline.to_csv()),
    )?;
    let log_path = write_artifact(&ctx.out_dir, "session.csv", &with_schema(SESSION_SCHEMA, &log))?;
    let svg_path = write_artifact(&ctx.out_dir, "trajectory.svg", &svg)?;

    out!("sequence {}", sequence.render(&labels));
    out!(
        "{} cycles, {} moves, cumulative reward {}, net displacement {:.3} mm",
        session.cycles_completed,
        session.moves.len(),
        session.cumulative_reward(),
        session.net_displacement()
    );
    for p in [timeline_path, log_path, svg_path] {
        out!("wrote {}", p.display());
    }
    Ok(())
}

// ---------------------------------------------------------------- validate

#[derive(Deserialize)]
struct SchemaProbe {
    schema: Option<String>,
}

pub fn validate_file(ctx: &Context, args: &ValidateArgs) -> Result<(), CliError> {
    let path = args
        .file
        .clone()
        .or_else(|| ctx.project_path.clone())
        .ok_or_else(|| CliError::input("nothing to validate: pass a file or --config"))?;
    let probe: SchemaProbe = read_json(&path)?;
    match probe.schema.as_deref() {
        Some(gaitmatrix::statecore::REWARD_MATRIX_SCHEMA) => {
            let m = load_matrix(&path)?;
            let violations = validate(&m);
            if violations.is_empty() {
                out!("{}: valid {}x{} reward matrix", path.display(), m.n(), m.n());
                Ok(())
            } else {
                for v in &violations {
                    out!("{}", v);
                }
                Err(CliError::file(&path, format!("{} violation(s)", violations.len())))
            }
        }
        Some(gaitmatrix::quasistatic::BODY_SCHEMA) => {
            let doc = load_body(&path)?;
            out!(
                "{}: valid body, {} actuators, {} states",
                path.display(),
                doc.body.actuators.len(),
                doc.body.state_space()?.cardinality()
            );
            Ok(())
        }
        Some(PROJECT_SCHEMA) => {
            let project = ProjectConfig::load(&path)?;
            if project.matrix.is_some() && project.trials.is_some() {
                return Err(CliError::file(&path, "both `matrix` and `trials` are set"));
            }
            if let Some(src) = &project.body {
                resolve_body(src)?;
            }
            if let Some(src) = &project.matrix {
                let m = resolve_matrix(src)?;
                if let Some(v) = validate(&m).first() {
                    return Err(CliError::file(&path, format!("matrix: {}", v)));
                }
            }
            if let Some(t) = &project.trials {
                let n = project.states.unwrap_or(4);
                parse_trials(&read_text(t)?, &RewardMatrix::masked(default_labels(n)))
                    .map_err(|e| CliError::file(t, e))?;
            }
            project.estimator.check()?;
            out!("{}: valid project", path.display());
            Ok(())
        }
        Some(other) => Err(CliError::file(&path, format!("unknown schema `{}`", other))),
        None => Err(CliError::file(&path, "missing `schema` field")),
    }
}
