//! The subcommands. Each writes its result to a `Write` sink and reports
//! whether the outcome was decided.

use std::io::Write;

use serde_json::{json, Value};
use weingarten_core::phase::{Component, PhaseError, PhaseMap, PhasePoint};
use weingarten_core::profile::io::{fmt17, write_obj, write_profile_csv};
use weingarten_core::profile::mesh::mesh_of_revolution;
use weingarten_core::profile::{integrate_profile_with, ProfileOptions};
use weingarten_core::taxonomy::{
    atlas, classify_orbit_with, diagnostics, halfspace_verdict, Existence, HalfspaceVerdict, TaxonomyError,
};
use weingarten_core::wclass::{EndValue, WeingartenClass};
use weingarten_core::yau;

use crate::config::{ClassSource, Format, RunConfig};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Done,
    Undetermined,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Done => 0,
            Outcome::Undetermined => 2,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("no curvature relation given; use --preset or --g")]
    NoClass,
    #[error("missing {0}")]
    Missing(&'static str),
    #[error("format {0} is not available for this command")]
    Format(&'static str),
    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),
    #[error(transparent)]
    Class(#[from] weingarten_core::wclass::ClassError),
    #[error(transparent)]
    Phase(#[from] PhaseError),
    #[error(transparent)]
    Profile(#[from] weingarten_core::profile::ProfileError),
    #[error(transparent)]
    Taxonomy(#[from] TaxonomyError),
    #[error(transparent)]
    Mesh(#[from] weingarten_core::profile::mesh::MeshError),
    #[error(transparent)]
    Yau(#[from] yau::YauError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

fn format_name(f: Format) -> &'static str {
    match f {
        Format::Csv => "csv",
        Format::Json => "json",
        Format::Obj => "obj",
    }
}

pub fn build_class(cfg: &RunConfig) -> Result<WeingartenClass, CliError> {
    Ok(match cfg.class.as_ref().ok_or(CliError::NoClass)? {
        ClassSource::Preset { name, params } => WeingartenClass::preset(name, params)?,
        ClassSource::Expr(text) => WeingartenClass::from_text(text, &cfg.class_opts)?,
    })
}

fn class_json(c: &WeingartenClass) -> Value {
    json!({
        "label": c.label(),
        "alpha": c.alpha(),
        "b": c.b(),
        "tail_exponent": c.tail_exponent(),
        "uniformly_elliptic": c.is_uniformly_elliptic(),
        "reoriented": c.is_reoriented(),
    })
}

fn write_json(v: &Value, out: &mut dyn Write) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, v)?;
    writeln!(out)?;
    Ok(())
}

fn is_undetermined(e: &TaxonomyError) -> bool {
    matches!(
        e,
        TaxonomyError::UndeterminedHeight | TaxonomyError::Phase(PhaseError::UndeterminedLimit { .. })
    )
}

fn start_point(cfg: &RunConfig) -> Result<PhasePoint, CliError> {
    let lambda = cfg.lambda0.ok_or(CliError::Missing("--lambda0"))?;
    Ok(match cfg.x0 {
        Some(x) => PhasePoint::new(x, lambda, cfg.eps)?,
        None => PhasePoint::on_gamma(lambda, cfg.eps)?,
    })
}

pub fn classify(cfg: &RunConfig, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let class = build_class(cfg)?;
    let pm = PhaseMap::new(&class);
    let start = start_point(cfg)?;
    let orbit = json!({ "x0": start.x, "lambda0": start.lambda, "epsilon": start.epsilon });
    let diag = diagnostics(&pm)?;
    let (body, outcome) = match classify_orbit_with(&pm, &start) {
        Ok(t) => (
            json!({
                "label": t.label,
                "parameter": t.parameter,
                "parameter_name": t.label.parameter_name(),
                "side": t.side,
            }),
            Outcome::Done,
        ),
        Err(e) if is_undetermined(&e) => (
            json!({ "label": "Undetermined", "reason": e.to_string() }),
            Outcome::Undetermined,
        ),
        Err(e) => return Err(e.into()),
    };
    let mut report = json!({
        "schema": SCHEMA,
        "class": class_json(&class),
        "orbit": orbit,
        "diagnostics": diag,
    });
    merge(&mut report, body);
    write_json(&report, out)?;
    Ok(outcome)
}

fn merge(into: &mut Value, from: Value) {
    if let (Value::Object(a), Value::Object(b)) = (into, from) {
        a.extend(b);
    }
}

pub fn atlas_cmd(cfg: &RunConfig, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let class = build_class(cfg)?;
    let entries = atlas(&class)?;
    let outcome = if entries.iter().any(|e| e.existence == Existence::Undetermined) {
        Outcome::Undetermined
    } else {
        Outcome::Done
    };
    let report = json!({
        "schema": SCHEMA,
        "class": class_json(&class),
        "entries": entries,
    });
    write_json(&report, out)?;
    Ok(outcome)
}

pub fn halfspace(cfg: &RunConfig, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let class = build_class(cfg)?;
    let v = halfspace_verdict(&class);
    let (verdict, detail, outcome) = match v {
        HalfspaceVerdict::HoldsSufficient { witness } => {
            ("HoldsSufficient", json!({ "witness": witness }), Outcome::Done)
        }
        HalfspaceVerdict::FailsNecessary { reason } => ("FailsNecessary", json!({ "reason": reason }), Outcome::Done),
        HalfspaceVerdict::Undetermined => ("Undetermined", json!({}), Outcome::Undetermined),
    };
    let mut report = json!({
        "schema": SCHEMA,
        "class": class_json(&class),
        "verdict": verdict,
    });
    merge(&mut report, detail);
    write_json(&report, out)?;
    Ok(outcome)
}

fn profile_options(cfg: &RunConfig) -> ProfileOptions {
    let mut o = ProfileOptions::default();
    if let Some(t) = cfg.tol_rk {
        o.rtol = t;
        o.atol = t * 1e-2;
    }
    if let Some(s) = cfg.s_max {
        o.s_max = s;
    }
    o
}

pub fn profile(cfg: &RunConfig, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let class = build_class(cfg)?;
    let pm = PhaseMap::new(&class);
    let start = start_point(cfg)?;
    let curve = integrate_profile_with(&pm, start, 0.0, &profile_options(cfg))?;
    match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => write_profile_csv(&curve, &mut *out)?,
        Format::Obj => {
            let mesh = mesh_of_revolution(&curve, cfg.n_angular, cfg.n_profile)?;
            write_obj(&mesh, &mut *out)?;
        }
        Format::Json => {
            let report = json!({
                "schema": SCHEMA,
                "class": class_json(&class),
                "orbit": { "x0": start.x, "lambda0": start.lambda, "epsilon": start.epsilon },
                "samples": curve.samples.len(),
                "left_end": curve.left_end,
                "right_end": curve.right_end,
                "period_z": curve.period_z,
                "events": curve.events,
                "min_x": curve.min_x(),
                "z_extent": curve.z_extent(),
            });
            write_json(&report, out)?;
        }
    }
    Ok(Outcome::Done)
}

/// `lambda` range of the orbit through `start`: between its boundary
/// crossings, or up to a cut-off towards an open end.
fn orbit_range(pm: &PhaseMap<'_>, start: &PhasePoint) -> Result<(f64, f64), CliError> {
    let (below, above) = pm.gamma_crossings(start)?;
    let alpha = pm.alpha();
    let far = 1e3 * (alpha.abs() + 1.0);
    let b_end = match pm.b() {
        EndValue::Finite(b) => b + 1e-9 * (1.0 + b.abs()),
        EndValue::NegInfinity => alpha - far,
    };
    let (lo_end, hi_end) = match pm.component(start.lambda)? {
        Component::Upper => (alpha, alpha + far),
        Component::Lower => (b_end, alpha),
    };
    let lo = below.unwrap_or(lo_end);
    let hi = above.unwrap_or(hi_end);
    Ok((lo, hi))
}

pub fn phase(cfg: &RunConfig, out: &mut dyn Write) -> Result<Outcome, CliError> {
    if let Some(f) = cfg.format.filter(|f| *f != Format::Csv) {
        return Err(CliError::Format(format_name(f)));
    }
    let class = build_class(cfg)?;
    let pm = PhaseMap::new(&class);
    let start = start_point(cfg)?;
    let (lo, hi) = orbit_range(&pm, &start)?;
    let n = cfg.n_profile.max(2);
    writeln!(out, "lambda,x,gamma_x")?;
    for i in 0..n {
        let t = i as f64 / (n - 1) as f64;
        let lambda = lo + (hi - lo) * t;
        let x = match pm.x_of_lambda(start.x, start.lambda, lambda) {
            Ok(x) => x,
            Err(PhaseError::OutOfDomain { .. }) => continue,
            Err(e) => return Err(e.into()),
        };
        let gamma = if lambda == 0.0 { f64::INFINITY } else { 1.0 / lambda.abs() };
        writeln!(out, "{},{},{}", fmt17(lambda), fmt17(x), fmt17(gamma))?;
    }
    Ok(Outcome::Done)
}

pub fn yau_cmd(cfg: &RunConfig, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let c = cfg.c;
    let n = cfg.n_profile.max(16);
    match cfg.format.unwrap_or(Format::Json) {
        Format::Csv => {
            let p = yau::yau_profile(c, n)?;
            yau::write_yau_csv(&p, &mut *out)?;
        }
        Format::Obj => {
            let m = yau::yau_surface(c, n, cfg.n_angular)?;
            write_obj(&m, &mut *out)?;
        }
        Format::Json => {
            let r0 = yau::r0(c);
            let grid: Vec<f64> = (1..=64).map(|i| 1.0 + (r0 - 1.0) * i as f64 / 65.0).collect();
            let check = yau::verify_yau(c, &grid)?;
            let m = yau::yau_surface(c, n, cfg.n_angular)?;
            let (l, mu) = (yau::lambda_of(c, r0), yau::mu_of(c, r0));
            let report = json!({
                "schema": SCHEMA,
                "c": c,
                "r0": r0,
                "u_r0": yau::height(c, r0)?,
                "lambda_r0": l,
                "mu_r0": mu,
                "lambda_over_mu_r0": l / mu,
                "grid_points": grid.len(),
                "residual": check.residual,
                "c2_at_disk_edge": check.c2_at_disk_edge,
                "junction": check.junction,
                "mesh": {
                    "vertices": m.vertices.len(),
                    "triangles": m.triangles.len(),
                    "closed": m.is_closed(),
                    "euler_characteristic": m.euler_characteristic(),
                },
            });
            write_json(&report, out)?;
        }
    }
    Ok(Outcome::Done)
}
