//! The `run`, `compare` and `aoa` commands.

use std::collections::BTreeSet;
use std::path::PathBuf;

use rayon::prelude::*;
use ztnd_core::metrics::summarize_series;
use ztnd_core::noise::uniform_vector;
use ztnd_core::problem::{constant_problem, example1};
use ztnd_core::{
    build_scenario, simulate, summarize, track, AoAScenario, Classification, ModelKind, NoiseModel, RunSummary,
    Termination, TimeVaryingSystem, Trace, Vector,
};

use crate::config::{ScenarioConfig, ScenarioKind};
use crate::error::{CliError, CliResult, EXIT_OK, EXIT_TERMINATED};
use crate::output::{self, fmt_num, fmt_opt};
use crate::svg::{Plot, Scale, Series};

/// Half-width of the box around the true start position from which the
/// tracker's initial estimate is drawn.
pub const AOA_INIT_SPREAD: f64 = 1.0;
/// Half-width of the box from which solver initial states are drawn.
pub const INIT_SPREAD: f64 = 2.0;

pub struct RunReport {
    pub model: ModelKind,
    pub trace: Trace,
    pub summary: RunSummary,
}

pub struct Outcome {
    pub runs: Vec<RunReport>,
    pub files: Vec<PathBuf>,
    pub exit_code: i32,
    /// Text for standard output.
    pub report: String,
}

fn aoa_scenario(cfg: &ScenarioConfig) -> CliResult<AoAScenario> {
    build_scenario(
        cfg.aoa.stations.clone(),
        cfg.aoa.trajectory,
        cfg.aoa.margin,
        cfg.integrator.horizon,
    )
    .map_err(|e| CliError::core("aoa scenario", e))
}

pub fn build_system(cfg: &ScenarioConfig) -> CliResult<Box<dyn TimeVaryingSystem>> {
    Ok(match cfg.scenario {
        ScenarioKind::Example1 => Box::new(example1()),
        ScenarioKind::ConstantProblem => Box::new(constant_problem(cfg.dim)),
        ScenarioKind::Aoa => Box::new(aoa_scenario(cfg)?),
    })
}

/// Explicit `init` if given, else a seeded draw: around the true start for
/// tracking, uniform on `[-2, 2]ⁿ` otherwise.
pub fn initial_state(cfg: &ScenarioConfig, n: usize) -> CliResult<Vector> {
    if let Some(init) = &cfg.init {
        if init.len() != n {
            return Err(CliError::config(format!(
                "init: expected {n} values, got {}",
                init.len()
            )));
        }
        return Ok(Vector::new(init.clone()));
    }
    Ok(match cfg.scenario {
        ScenarioKind::Aoa => {
            let (x, y) = cfg.aoa.trajectory.pos_at(0.0);
            let d = uniform_vector(2, -AOA_INIT_SPREAD, AOA_INIT_SPREAD, cfg.seed);
            Vector::from([x + d[0], y + d[1]])
        }
        _ => uniform_vector(n, -INIT_SPREAD, INIT_SPREAD, cfg.seed),
    })
}

fn noise_model(cfg: &ScenarioConfig, n: usize) -> CliResult<NoiseModel> {
    let nm = cfg.noise.model(n, cfg.noise_seed())?;
    nm.check_dim(n).map_err(|e| CliError::core("noise", e))?;
    Ok(nm)
}

fn simulate_one(
    cfg: &ScenarioConfig,
    kind: ModelKind,
    sys: &dyn TimeVaryingSystem,
    nm: &NoiseModel,
    init: &Vector,
) -> CliResult<RunReport> {
    let trace = simulate(&cfg.spec_for(kind), sys, nm, init, &cfg.integrator)
        .map_err(|e| CliError::core(format!("model {kind}"), e))?;
    let summary = summarize(&trace, cfg.threshold, cfg.tail_fraction).map_err(|e| CliError::core("summary", e))?;
    Ok(RunReport {
        model: kind,
        trace,
        summary,
    })
}

fn write_trace(path: &std::path::Path, tr: &Trace) -> CliResult<PathBuf> {
    let n = tr.states.first().map_or(0, Vector::len);
    let mut cols = vec!["t".to_string()];
    cols.extend((1..=n).map(|i| format!("z_{i}")));
    cols.extend(output::header(&["residual_norm", "solution_error", "xi", "kappa"]));
    let rows = (0..tr.len()).map(|k| {
        let mut row = vec![fmt_num(tr.times[k])];
        row.extend(tr.states[k].iter().map(|&v| fmt_num(v)));
        row.push(fmt_num(tr.residual_norms[k]));
        row.push(fmt_opt(tr.solution_errors.as_ref().map(|e| e[k])));
        let c = tr.coefficients.as_ref().map(|c| c[k]);
        row.push(fmt_opt(c.map(|c| c.0)));
        row.push(fmt_opt(c.map(|c| c.1)));
        row
    });
    output::write_csv(path, &cols, rows)
}

fn noise_label(nm: &NoiseModel) -> String {
    if nm.is_none() {
        "noise-free".into()
    } else {
        format!("{} noise", nm.kind())
    }
}

fn residual_plot(title: &str, runs: &[RunReport]) -> Plot {
    runs.iter()
        .fold(Plot::new(title, "t (s)", "residual ‖ε‖₂", Scale::Log), |p, r| {
            p.with(Series::from_columns(
                r.model.name(),
                &r.trace.times,
                &r.trace.residual_norms,
            ))
        })
}

fn termination_note(runs: &[RunReport]) -> String {
    runs.iter()
        .filter(|r| r.trace.terminated != Termination::Completed)
        .map(|r| {
            format!(
                "{} stopped at t = {:.4}: {}\n",
                r.model,
                r.trace.final_time().unwrap_or(0.0),
                r.trace.terminated
            )
        })
        .collect()
}

/// Single model: `trace.csv`, `summary.csv`, `residual.svg`.
pub fn cmd_run(cfg: &ScenarioConfig) -> CliResult<Outcome> {
    let sys = build_system(cfg)?;
    let init = initial_state(cfg, sys.unknowns())?;
    let nm = noise_model(cfg, sys.equations())?;
    let run = simulate_one(cfg, cfg.model.kind, sys.as_ref(), &nm, &init)?;

    output::ensure_dir(&cfg.output)?;
    let dir = &cfg.output;
    let scenario = cfg.scenario.to_string();
    let files = vec![
        write_trace(&dir.join("trace.csv"), &run.trace)?,
        output::write_csv(
            &dir.join("summary.csv"),
            &output::header(&output::SUMMARY_HEADER),
            [output::summary_row(
                &scenario,
                run.model.name(),
                nm.kind(),
                cfg.seed,
                &run.summary,
            )],
        )?,
        output::write_text(
            &dir.join("residual.svg"),
            &residual_plot(
                &format!("{scenario}: {} ({})", run.model, noise_label(&nm)),
                std::slice::from_ref(&run),
            )
            .render(),
        )?,
    ];
    let runs = vec![run];
    let exit_code = if runs[0].trace.terminated == Termination::Completed {
        EXIT_OK
    } else {
        EXIT_TERMINATED
    };
    let rows: Vec<_> = runs.iter().map(|r| (r.model.name().to_string(), r.summary)).collect();
    let report = output::table(&rows) + &termination_note(&runs);
    Ok(Outcome {
        runs,
        files,
        exit_code,
        report,
    })
}

/// Terminations that indicate a numerical failure rather than a designed stop.
fn is_failure(t: Termination) -> bool {
    matches!(
        t,
        Termination::Diverged | Termination::SingularMatrix | Termination::Overflow
    )
}

/// Several models from one initial state and noise realization:
/// `compare.csv`, `summary.csv`, `compare.svg` and a table.
pub fn cmd_compare(cfg: &ScenarioConfig) -> CliResult<Outcome> {
    if cfg.models.len() < 2 {
        return Err(CliError::config(format!(
            "compare needs at least two models, got {}",
            cfg.models.len()
        )));
    }
    let mut seen = BTreeSet::new();
    if let Some(dup) = cfg.models.iter().find(|m| !seen.insert(**m)) {
        return Err(CliError::config(format!("model {dup} listed twice")));
    }
    let sys = build_system(cfg)?;
    let init = initial_state(cfg, sys.unknowns())?;
    let nm = noise_model(cfg, sys.equations())?;

    let runs: Vec<RunReport> = cfg
        .models
        .par_iter()
        .map(|&kind| simulate_one(cfg, kind, sys.as_ref(), &nm, &init))
        .collect::<CliResult<_>>()?;

    output::ensure_dir(&cfg.output)?;
    let dir = &cfg.output;
    let longest = runs
        .iter()
        .max_by_key(|r| r.trace.len())
        .map(|r| r.trace.times.clone())
        .unwrap_or_default();
    let mut cols = vec!["t".to_string()];
    cols.extend(runs.iter().map(|r| format!("residual_{}", r.model.name())));
    let rows = longest.iter().enumerate().map(|(k, &t)| {
        let mut row = vec![fmt_num(t)];
        // every run shares the step grid, so a sample index maps to one time
        row.extend(runs.iter().map(|r| match r.trace.times.get(k) {
            Some(&tk) if tk == t => fmt_num(r.trace.residual_norms[k]),
            _ => String::new(),
        }));
        row
    });
    let scenario = cfg.scenario.to_string();
    let files = vec![
        output::write_csv(&dir.join("compare.csv"), &cols, rows)?,
        output::write_csv(
            &dir.join("summary.csv"),
            &output::header(&output::SUMMARY_HEADER),
            runs.iter()
                .map(|r| output::summary_row(&scenario, r.model.name(), nm.kind(), cfg.seed, &r.summary)),
        )?,
        output::write_text(
            &dir.join("compare.svg"),
            &residual_plot(&format!("{scenario}: residuals ({})", noise_label(&nm)), &runs).render(),
        )?,
    ];
    let exit_code = if runs.iter().any(|r| is_failure(r.trace.terminated)) {
        EXIT_TERMINATED
    } else {
        EXIT_OK
    };
    let rows: Vec<_> = runs.iter().map(|r| (r.model.name().to_string(), r.summary)).collect();
    let report = output::table(&rows) + &termination_note(&runs);
    Ok(Outcome {
        runs,
        files,
        exit_code,
        report,
    })
}

/// Summary of a tracker's position error series.
pub fn position_summary(tr: &Trace, threshold: f64, tail_fraction: f64) -> CliResult<RunSummary> {
    let errors = tr
        .solution_errors
        .as_ref()
        .ok_or_else(|| CliError::config("trace has no position errors"))?;
    let mut s =
        summarize_series(&tr.times, errors, threshold, tail_fraction).map_err(|e| CliError::core("summary", e))?;
    if tr.terminated == Termination::Diverged {
        s.classification = Classification::Divergent;
    }
    s.terminated = tr.terminated;
    Ok(s)
}

/// Target tracking: `trajectory.csv`, `summary.csv`, `trajectory.svg`,
/// `error.svg`.
pub fn cmd_aoa(cfg: &ScenarioConfig) -> CliResult<Outcome> {
    let sc = aoa_scenario(cfg)?;
    let cfg = &ScenarioConfig {
        scenario: ScenarioKind::Aoa,
        ..cfg.clone()
    };
    let init = initial_state(cfg, 2)?;
    let nm = noise_model(cfg, sc.equations())?;
    let trace = track(&cfg.model, &sc, &nm, (init[0], init[1]), &cfg.integrator)
        .map_err(|e| CliError::core(format!("tracker {}", cfg.model.kind), e))?;
    let summary = position_summary(&trace, cfg.threshold, cfg.tail_fraction)?;
    let errors = trace.solution_errors.clone().unwrap_or_default();

    output::ensure_dir(&cfg.output)?;
    let dir = &cfg.output;
    let rows = (0..trace.len()).map(|k| {
        let t = trace.times[k];
        let (tx, ty) = sc.truth().pos_at(t);
        let g = &trace.states[k];
        vec![
            fmt_num(t),
            fmt_num(tx),
            fmt_num(ty),
            fmt_num(g[0]),
            fmt_num(g[1]),
            fmt_num(errors[k]),
        ]
    });
    let truth: Vec<(f64, f64)> = trace.times.iter().map(|&t| sc.truth().pos_at(t)).collect();
    let estimate: Vec<(f64, f64)> = trace.states.iter().map(|g| (g[0], g[1])).collect();
    let model = cfg.model.kind;
    let files = vec![
        output::write_csv(
            &dir.join("trajectory.csv"),
            &output::header(&["t", "truth_x", "truth_y", "est_x", "est_y", "position_error"]),
            rows,
        )?,
        output::write_csv(
            &dir.join("summary.csv"),
            &output::header(&output::SUMMARY_HEADER),
            [output::summary_row("aoa", model.name(), nm.kind(), cfg.seed, &summary)],
        )?,
        output::write_text(
            &dir.join("trajectory.svg"),
            &Plot::new(
                format!("target trajectory: {model} tracker ({})", noise_label(&nm)),
                "x",
                "y",
                Scale::Linear,
            )
            .with(Series::new("truth", truth))
            .with(Series::new(format!("{model} estimate"), estimate).dashed())
            .render(),
        )?,
        output::write_text(
            &dir.join("error.svg"),
            &Plot::new(
                format!("position error: {model} tracker ({})", noise_label(&nm)),
                "t (s)",
                "‖g - g*‖₂",
                Scale::Log,
            )
            .with(Series::from_columns(model.name(), &trace.times, &errors))
            .render(),
        )?,
    ];
    let run = RunReport { model, trace, summary };
    let exit_code = if run.trace.terminated == Termination::Completed {
        EXIT_OK
    } else {
        EXIT_TERMINATED
    };
    let runs = vec![run];
    let report = output::table(&[(model.name().to_string(), summary)]) + &termination_note(&runs);
    Ok(Outcome {
        runs,
        files,
        exit_code,
        report,
    })
}
