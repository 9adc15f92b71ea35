//! Command execution and reports.

use harmloop::dpw::{
    closed_form_map, ode_oracle, solve_step1_adaptive, synthesize, MapGrid, PotentialSpec,
    SynthesisOptions, STEP1_MAX_BAND,
};
use harmloop::gallery::{self, Fixture};
use harmloop::laurent::C64;
use harmloop::liegroup::{levi_civita, Group, LieAlgebraData, MetricTensor, SolvLoopElement};
use harmloop::loopfactor::{
    birkhoff_split_with, check_reality, iwasawa_split_with, Factorization, SplitOptions, REALITY_TOL,
};
use harmloop::verify::{
    admissibility_residual, flatness_residual, flatness_sweep, metric_harmonicity_residual,
    neutral_harmonicity_residual, numeric_mc_form, torsion_free_residual, Family, ResidualReport,
    FD_TOL,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Command, RunConfig, SplitInput, Tolerances};
use crate::error::CliError;
use crate::output::{self, Slice};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    ChecksFailed,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tol: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    /// Largest coefficient mass dropped by any truncation.
    pub discarded: f64,
    pub step1_band: Option<usize>,
    pub frame_band: Option<usize>,
    pub masked: usize,
    pub masked_fraction: f64,
    pub imaginary_defect: Option<f64>,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: Command,
    pub status: Status,
    pub config_hash: String,
    /// Configured truncation band `N`.
    pub band: Option<usize>,
    pub grid_h: [f64; 2],
    pub tolerances: Tolerances,
    pub diagnostics: Diagnostics,
    pub checks: Vec<Check>,
    pub residuals: Vec<ResidualReport>,
    pub data: Value,
    pub error: Option<String>,
    pub artifacts: Vec<String>,
    pub reduction_order: &'static str,
}

impl Report {
    fn new(cfg: &RunConfig) -> Self {
        Report {
            command: cfg.command,
            status: Status::Ok,
            config_hash: cfg.hash(),
            band: cfg.potential.as_ref().map(|p| p.band),
            grid_h: [cfg.grid.hx(), cfg.grid.hy()],
            tolerances: cfg.tolerances,
            diagnostics: Diagnostics::default(),
            checks: Vec::new(),
            residuals: Vec::new(),
            data: Value::Null,
            error: None,
            artifacts: Vec::new(),
            reduction_order: "row-major grid order; compensated sums; independent of thread count",
        }
    }

    fn check(&mut self, name: &str, value: f64, tol: f64) {
        self.checks.push(Check {
            name: name.into(),
            value,
            tol,
            passed: value <= tol,
        });
    }

    fn residual(&mut self, r: ResidualReport, tol: f64) {
        let name = r.name.clone();
        self.check(&name, r.max_norm, tol);
        self.residuals.push(r);
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// A finished run: the report and the process exit code.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    pub exit_code: i32,
}

/// Runs the command, writes its artifacts and report, and picks the exit code:
/// 0 when every check passes, 3 on numerical failure or a failed check.
pub fn execute(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut report = Report::new(cfg);
    let result = match cfg.command {
        Command::Synth => synth(cfg, &mut report, true),
        Command::Verify => synth(cfg, &mut report, false),
        Command::Split => split(cfg, &mut report),
        Command::Gallery => gallery_cmd(cfg, &mut report),
        Command::Oracle => oracle(cfg, &mut report),
    };
    let exit_code = match result {
        Ok(()) if report.all_passed() => 0,
        Ok(()) => {
            report.status = Status::ChecksFailed;
            3
        }
        Err(e @ CliError::Numerical(_)) => {
            report.status = Status::Error;
            report.error = Some(e.to_string());
            3
        }
        Err(e) => return Err(e),
    };
    let path = cfg.output_path("report.json");
    report.artifacts.push(file_name(&path));
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    output::write(&path, &(json + "\n"))?;
    Ok(Outcome { report, exit_code })
}

fn file_name(p: &std::path::Path) -> String {
    p.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default()
}

fn write_surfaces(cfg: &RunConfig, report: &mut Report, slices: &[Slice]) -> Result<(), CliError> {
    for (ext, text) in [
        ("obj", output::obj(&cfg.grid, slices)),
        ("csv", output::csv(&cfg.grid, slices)),
    ] {
        let path = cfg.output_path(ext);
        output::write(&path, &text)?;
        report.artifacts.push(file_name(&path));
    }
    Ok(())
}

fn map_slice(lambda: C64, points: &[Option<harmloop::liegroup::SolvPoint>]) -> Slice {
    Slice {
        lambda,
        points: points.iter().map(|p| p.map(|p| p.to_array())).collect(),
    }
}

fn synthesis_options(cfg: &RunConfig, pot: &PotentialSpec) -> SynthesisOptions {
    SynthesisOptions {
        lambdas: cfg.lambdas.clone(),
        max_band: STEP1_MAX_BAND.max(pot.band),
        split: SplitOptions {
            tol: cfg.tolerances.split,
            ..SplitOptions::default()
        },
    }
}

fn synth(cfg: &RunConfig, report: &mut Report, write_mesh: bool) -> Result<(), CliError> {
    let pot = cfg.require_potential()?;
    let s = synthesize(pot, cfg.grid, &synthesis_options(cfg, pot))?;
    let d = &mut report.diagnostics;
    d.discarded = s.report.discarded;
    d.step1_band = Some(s.report.step1_band);
    d.frame_band = Some(s.report.frame_band);
    d.masked = s.report.masked;
    d.masked_fraction = s.map.masked_fraction();
    d.imaginary_defect = Some(s.report.imaginary_defect);
    d.failures = s.report.failures.clone();

    if write_mesh {
        let one = C64::new(1.0, 0.0);
        let mut slices = Vec::new();
        if !cfg.lambdas.iter().any(|l| (l - one).norm() < 1e-12) {
            slices.push(map_slice(one, &s.map.points));
        }
        slices.extend(s.map.lambda_slices.iter().map(|l| map_slice(l.lambda, &l.points)));
        write_surfaces(cfg, report, &slices)?;
    }

    let masked_fraction = s.map.masked_fraction();
    report.checks.push(Check {
        name: "masked_fraction".into(),
        value: masked_fraction,
        tol: cfg.tolerances.masked,
        passed: masked_fraction == 0.0 || masked_fraction < cfg.tolerances.masked,
    });
    let tol = cfg.tolerances.residual;
    let group = Group::Solv(pot.params);
    report.residual(neutral_harmonicity_residual(&s.map, &group)?, tol);
    let alg = group.algebra();
    let form = numeric_mc_form(&s.map, &group)?;
    let mut sweep = flatness_sweep(&form, &alg, &cfg.lambdas, Family::Neutral);
    sweep.name = "flatness_neutral_family".into();
    report.residual(sweep, tol);

    let mut assoc: f64 = 0.0;
    for i in 0..s.map.lambda_slices.len() {
        let r = neutral_harmonicity_residual(&s.map.slice_grid(i), &group)?;
        assoc = assoc.max(r.max_norm);
    }
    report.check("associated_family_neutral", assoc, tol);

    if write_mesh {
        return Ok(());
    }

    let one = C64::new(1.0, 0.0);
    let mut at_one = flatness_residual(&form, &alg, one, Family::Neutral);
    at_one.name = "flatness_at_one".into();
    report.residual(at_one, 0.0);
    report.check("mc_form_reality", form.reality_defect(), FD_TOL);
    report.check("frame_normalization", s.frames.normalization_defect()?, FD_TOL);

    let mut route: f64 = 0.0;
    for (i, p) in s.map.points.iter().enumerate() {
        if let Some(p) = p {
            let q = closed_form_map(pot, cfg.grid.point_at(i))?;
            route = route.max(p.max_diff(&q));
        }
    }
    report.check("closed_form_route", route, cfg.tolerances.route);
    // Informational: the metric tension does not vanish in general.
    report
        .residuals
        .push(metric_harmonicity_residual(&s.map, pot.params)?);
    Ok(())
}

fn max_membership(g: &SolvLoopElement, negative: bool) -> f64 {
    g.entries()
        .iter()
        .flat_map(|e| e.iter())
        .filter(|(j, _)| if negative { *j >= 0 } else { *j < 0 })
        .map(|(_, c)| c.norm())
        .fold(0.0, f64::max)
}

fn factor_json(f: &Factorization, err: f64) -> Value {
    json!({
        "left": f.left,
        "right": f.right,
        "band": f.band,
        "discarded": f.discarded,
        "reconstruction_error": err,
    })
}

fn split(cfg: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let g = match &cfg.split {
        Some(SplitInput::Loop(g)) => g.clone(),
        Some(SplitInput::Point(z)) => {
            let pot = cfg.require_potential()?;
            solve_step1_adaptive(pot, *z, STEP1_MAX_BAND.max(pot.band))?
        }
        None => {
            return Err(CliError::Config(
                "split needs a [split] section with z or x1/x2/x3".into(),
            ))
        }
    };
    let opts = SplitOptions {
        tol: cfg.tolerances.split,
        ..SplitOptions::default()
    };
    let b = birkhoff_split_with(&g, opts)?;
    let w = iwasawa_split_with(&g, opts)?;
    let (eb, ew) = (b.reconstruction_error(&g)?, w.reconstruction_error(&g)?);
    let reality = check_reality(&w.left);
    let tol = cfg.tolerances.split;
    report.band = Some(g.band());
    report.diagnostics.discarded = b.discarded.max(w.discarded);
    report.diagnostics.frame_band = Some(b.band.max(w.band));
    report.check("birkhoff_reconstruction", eb, tol);
    report.check("iwasawa_reconstruction", ew, tol);
    report.check("birkhoff_left_negative", max_membership(&b.left, true), tol);
    report.check("birkhoff_right_nonnegative", max_membership(&b.right, false), tol);
    report.check("iwasawa_right_nonnegative", max_membership(&w.right, false), tol);
    report.check("iwasawa_left_real", reality.residual, REALITY_TOL);
    let mut iw = factor_json(&w, ew);
    iw["left_real"] = json!(reality.real);
    report.data = json!({
        "input": g,
        "birkhoff": factor_json(&b, eb),
        "iwasawa": iw,
    });
    Ok(())
}

fn fixture_slice(f: &Fixture) -> Result<Slice, CliError> {
    if f.group.dim() != 3 {
        return Err(CliError::Config("only 3-dimensional fixtures can be exported".into()));
    }
    Ok(Slice {
        lambda: C64::new(1.0, 0.0),
        points: f.points.iter().map(|p| p.as_ref().map(|p| [p[0], p[1], p[2]])).collect(),
    })
}

fn gallery_cmd(cfg: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let name = cfg.gallery.as_deref().unwrap_or_default();
    let fx = gallery::by_name(name, cfg.grid).map_err(|e| match e {
        harmloop::Error::InvalidInput(m) => CliError::Config(m),
        e => e.into(),
    })?;
    write_surfaces(cfg, report, &[fixture_slice(&fx)?])?;
    let tol = cfg.tolerances.residual;
    report.residual(fx.neutral_residual()?, tol);
    let map: Option<MapGrid> = fx.map_grid();
    match (name, fx.group, map) {
        ("vertical-plane", _, _) => {
            let alg = LieAlgebraData::heisenberg(1);
            let phi = gallery::vertical_plane_potential();
            let defect = harmloop::dpw::commutator_defect(&phi, &alg, C64::new(0.0, 0.0), C64::new(1.0, 1.0));
            report.check("commutator", defect, 0.0);
            report.residual(torsion_free_residual(&fx.mc_form()?, &alg), tol);
        }
        ("sol3-primitive", Group::Solv(params), Some(m)) => {
            let alg = LieAlgebraData::solvable(params);
            let lc = levi_civita(&alg, &MetricTensor::identity(3))?;
            let form = fx.mc_form()?;
            report.residual(admissibility_residual(&form, &lc), tol);
            report.residual(metric_harmonicity_residual(&m, params)?, tol);
            report.residual(gallery::sol3_primitivity_field(&form).report("primitivity"), tol);
        }
        (_, Group::Solv(params), Some(m)) => {
            // Informational: the metric tension of the horosphere stays bounded away from 0.
            report.residuals.push(metric_harmonicity_residual(&m, params)?);
        }
        _ => {}
    }
    report.data = json!({ "fixture": fx.name, "group": fx.group });
    Ok(())
}

fn oracle_grid(cfg: &RunConfig) -> Vec<C64> {
    let n = cfg.oracle_samples;
    let d = cfg.grid.domain;
    let t = |k: usize| if n == 1 { 0.5 } else { k as f64 / (n - 1) as f64 };
    let mut pts = Vec::with_capacity(n * n);
    for iy in 0..n {
        for ix in 0..n {
            pts.push(C64::new(
                d.x_min + (d.x_max - d.x_min) * t(ix),
                d.y_min + (d.y_max - d.y_min) * t(iy),
            ));
        }
    }
    pts
}

fn oracle(cfg: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let pot = cfg.require_potential()?;
    let pts = oracle_grid(cfg);
    let mut loops = Vec::with_capacity(pts.len());
    let mut band = 0;
    for &z in &pts {
        let g = solve_step1_adaptive(pot, z, STEP1_MAX_BAND.max(pot.band))?;
        band = band.max(g.band());
        loops.push(g);
    }
    report.diagnostics.step1_band = Some(band);
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for &l in &cfg.lambdas {
        let mut err: f64 = 0.0;
        for (g, &z) in loops.iter().zip(&pts) {
            let a = g.eval_matrix(l)?;
            let b = ode_oracle(pot, z, l, cfg.oracle_steps)?;
            let scale = b.iter().map(|c| c.norm()).fold(1.0, f64::max);
            err = err.max((a - b).iter().map(|c| c.norm()).fold(0.0, f64::max) / scale);
        }
        worst = worst.max(err);
        rows.push(json!({ "lambda": [l.re, l.im], "max_relative_error": err }));
    }
    report.check("oracle_relative_error", worst, cfg.tolerances.oracle);
    report.data = json!({
        "steps": cfg.oracle_steps,
        "points": pts.len(),
        "per_lambda": rows,
    });
    Ok(())
}
