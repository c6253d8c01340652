//! Command implementations for the `curveflow` binary.
//!
//! Every command renders into a byte buffer so that output is produced in one
//! place and the same code paths can be exercised from tests.

pub mod args;
pub mod portrait;
pub mod verify;

use args::{Cli, Command, ExpandArgs, Format, List, PlaneArgs, PortraitArgs, SolutionArgs, VerifyArgs};
use curveflow::euler_system::{
    euler_residual, solution_family_1, solution_family_2, EulerError, Family, FlowField, SolutionConstants,
};
use curveflow::numerics::{Grid1D, Grid2D};
use curveflow::thermo::{GasParams, PlanckPotential, Polynomial, PotentialKind, ThermoConfig, ThermoError};
use curveflow::virial_flow::{
    fixed_points, integrate_first_order, integrate_zeroth, portrait as build_portrait, zeroth_residual, FixedPoint,
    ReducedParams, VirialError, Window, ZerothTerm,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::path::Path;
use thiserror::Error;

/// Portrait integration tolerance.
pub const DEFAULT_ODE_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum CliError {
    /// Invalid configuration or arguments.
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(String),
    /// A valid request whose computation failed.
    #[error("compute: {0}")]
    Compute(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
            CliError::Compute(_) => 1,
        }
    }
}

impl From<ThermoError> for CliError {
    fn from(e: ThermoError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<EulerError> for CliError {
    fn from(e: EulerError) -> Self {
        match e {
            EulerError::InvalidConstants(_) | EulerError::Thermo(_) => CliError::Config(e.to_string()),
            _ => CliError::Compute(e.to_string()),
        }
    }
}

impl From<VirialError> for CliError {
    fn from(e: VirialError) -> Self {
        match e {
            VirialError::UnsupportedOrder(_) | VirialError::InvalidArgument(_) | VirialError::DegenerateScaling(_) => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Compute(e.to_string()),
        }
    }
}

fn config_err(e: impl ToString) -> CliError {
    CliError::Config(e.to_string())
}

/// Rendered output and whether the command succeeded (`verify` can render a
/// report and still fail).
#[derive(Debug)]
pub struct Output {
    pub bytes: Vec<u8>,
    pub success: bool,
}

impl Output {
    fn ok(bytes: impl Into<Vec<u8>>) -> Self {
        Self { bytes: bytes.into(), success: true }
    }
}

/// `R = 1, n = 3, k = 0.1, g = 1, λ = 0.5` (so `ω = 1`) with the ideal-gas potential.
pub fn default_gas() -> (GasParams, PlanckPotential) {
    (
        GasParams::new(1.0, 3, 0.1, 1.0, 0.5).expect("valid default gas"),
        PlanckPotential::ideal_gas(3).expect("valid default potential"),
    )
}

pub fn load_config(path: Option<&Path>) -> Result<(GasParams, PlanckPotential), CliError> {
    let Some(path) = path else { return Ok(default_gas()) };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(ThermoConfig::from_json(&text)?.build()?)
}

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    let (gas, pot) = load_config(cli.config.as_deref())?;
    match &cli.command {
        Command::Verify(a) => cmd_verify(cli, a, gas, pot),
        Command::FixedPoints(a) => cmd_fixed_points(cli, a),
        Command::Portrait(a) => cmd_portrait(cli, a),
        Command::Solution(a) => cmd_solution(cli, a, &gas),
        Command::Expand(a) => cmd_expand(cli, a, &gas, &pot),
    }
}

fn format_or(cli: &Cli, default: Format, allowed: &[Format]) -> Result<Format, CliError> {
    let f = cli.format.unwrap_or(default);
    if !allowed.contains(&f) {
        return Err(CliError::Config(format!("format {} is not available for this command", f.name())));
    }
    Ok(f)
}

fn tol_or(cli: &Cli, default: f64) -> Result<f64, CliError> {
    match cli.tol {
        Some(t) if !(t > 0.0 && t.is_finite()) => Err(CliError::Config(format!("--tol must be positive, got {t}"))),
        Some(t) => Ok(t),
        None => Ok(default),
    }
}

fn to_json(v: &impl Serialize) -> Result<Vec<u8>, CliError> {
    serde_json::to_string_pretty(v).map(|s| (s + "\n").into_bytes()).map_err(|e| CliError::Compute(e.to_string()))
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::Compute(e.to_string());
    w.write_record(header).map_err(fail)?;
    for row in rows {
        w.write_record(&row).map_err(fail)?;
    }
    w.into_inner().map_err(|e| CliError::Compute(e.to_string()))
}

/// Shortest round-trip text, switching to exponent form outside `[1e-4, 1e6)`.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-4..1e6).contains(&a) || !a.is_finite() {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

fn cells(values: impl IntoIterator<Item = f64>) -> Vec<String> {
    values.into_iter().map(num).collect()
}

fn cmd_verify(cli: &Cli, a: &VerifyArgs, gas: GasParams, potential: PlanckPotential) -> Result<Output, CliError> {
    let format = format_or(cli, Format::Json, &[Format::Json, Format::Csv])?;
    let families = match (a.family, gas.n()) {
        (Some(2), 2) => return Err(CliError::Config("family 2 requires n != 2".into())),
        (Some(1), _) => vec![Family::One],
        (Some(_), _) => vec![Family::Two],
        // family 2 and quotsol2 do not exist for n = 2
        (None, 2) => vec![Family::One],
        (None, _) => vec![Family::One, Family::Two],
    };
    let quad_tol = tol_or(cli, verify::DEFAULT_QUAD_TOL)?;
    let suite = verify::Suite { gas, potential, families, seed: a.seed, quad_tol };
    let results = suite.run();
    let all_pass = results.iter().all(|r| r.pass);
    let bytes = match format {
        Format::Csv => csv_bytes(
            &["property", "max_residual", "tolerance", "pass", "detail"],
            results.iter().map(|r| {
                vec![r.name.into(), num(r.max_residual), num(r.tolerance), r.pass.to_string(), r.detail.clone()]
            }),
        )?,
        _ => {
            #[derive(Serialize)]
            struct Report<'a> {
                seed: u64,
                all_pass: bool,
                properties: &'a [verify::PropertyResult],
            }
            to_json(&Report { seed: a.seed, all_pass, properties: &results })?
        }
    };
    Ok(Output { bytes, success: all_pass })
}

/// One equilibrium as reported by `fixed-points` and in portraits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedPointRow {
    pub y: f64,
    #[serde(rename = "N0")]
    pub n0: f64,
    /// Kebab-case name of the linear class.
    pub class: &'static str,
    pub trace: f64,
    pub det: f64,
    pub multiplicity: u8,
}

impl From<&FixedPoint> for FixedPointRow {
    fn from(f: &FixedPoint) -> Self {
        Self { y: f.y, n0: f.n0, class: f.class.as_str(), trace: f.trace, det: f.det, multiplicity: f.multiplicity }
    }
}

fn plane(a: &PlaneArgs) -> Result<ReducedParams, CliError> {
    Ok(ReducedParams::new(a.a, a.b)?)
}

fn cmd_fixed_points(cli: &Cli, a: &PlaneArgs) -> Result<Output, CliError> {
    let format = format_or(cli, Format::Json, &[Format::Json, Format::Csv])?;
    let rows: Vec<FixedPointRow> = fixed_points(&plane(a)?).iter().map(FixedPointRow::from).collect();
    let bytes = match format {
        Format::Csv => csv_bytes(
            &["y", "N0", "class", "trace", "det", "multiplicity"],
            rows.iter().map(|r| {
                let mut row = cells([r.y, r.n0]);
                row.push(r.class.to_string());
                row.extend(cells([r.trace, r.det]));
                row.push(r.multiplicity.to_string());
                row
            }),
        )?,
        _ => to_json(&rows)?,
    };
    Ok(Output::ok(bytes))
}

/// Reads `y,N0` pairs, one per line; blank lines and `#` comments are skipped.
pub fn read_seeds(path: &Path) -> Result<Vec<(f64, f64)>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    text.lines()
        .enumerate()
        .map(|(i, l)| (i, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .map(|(i, l)| {
            let [y, n] = l
                .parse::<List>()
                .and_then(|v| v.fixed::<2>("seeds"))
                .map_err(|e| CliError::Config(format!("{}:{}: {e}", path.display(), i + 1)))?;
            Ok((y, n))
        })
        .collect()
}

fn grid_counts(list: &List, flag: &str) -> Result<(usize, usize), CliError> {
    let [a, b] = list.fixed::<2>(flag).map_err(CliError::Config)?;
    let count = |v: f64| {
        (v.fract() == 0.0 && (2.0..=10_000.0).contains(&v))
            .then_some(v as usize)
            .ok_or_else(|| CliError::Config(format!("--{flag} counts must be integers in [2, 10000], got {v}")))
    };
    Ok((count(a)?, count(b)?))
}

fn cmd_portrait(cli: &Cli, a: &PortraitArgs) -> Result<Output, CliError> {
    let format = format_or(cli, Format::Svg, &[Format::Svg, Format::Csv, Format::Json])?;
    let tol = tol_or(cli, DEFAULT_ODE_TOL)?;
    let p = plane(&a.plane)?;
    let [y0, y1, n0, n1] = a.window.fixed::<4>("window").map_err(CliError::Config)?;
    let window = Window::new(y0, y1, n0, n1)?;
    let (ny, nn) = grid_counts(&a.grid, "grid")?;
    let grid = Grid2D::new(Grid1D::new(y0, y1, ny).map_err(config_err)?, Grid1D::new(n0, n1, nn).map_err(config_err)?);
    if !(a.s_max > 0.0 && a.s_max.is_finite()) || a.samples < 2 {
        return Err(CliError::Config("--s-max must be positive and --samples at least 2".into()));
    }
    let seeds = match &a.seeds {
        Some(path) => read_seeds(path)?,
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            (0..a.seed_count)
                .map(|_| (rng.gen_range(window.y_min..window.y_max), rng.gen_range(window.n_min..window.n_max)))
                .collect()
        }
    };
    let portrait = build_portrait(&p, &grid, &seeds, a.s_max, tol)?;
    let bytes = match format {
        Format::Csv => portrait::to_csv(&portrait, a.samples).map_err(|e| CliError::Compute(e.to_string()))?,
        Format::Json => portrait::to_json(&portrait, a.samples).map_err(|e| CliError::Compute(e.to_string()))?.into(),
        Format::Svg => portrait::to_svg(&portrait, a.samples).into(),
    };
    Ok(Output::ok(bytes))
}

#[derive(Serialize)]
struct SolutionRow {
    t: f64,
    a: f64,
    u: Option<f64>,
    rho: Option<f64>,
    theta: Option<f64>,
    r1: Option<f64>,
    r2: Option<f64>,
    r3: Option<f64>,
    valid: bool,
}

fn cmd_solution(cli: &Cli, a: &SolutionArgs, gas: &GasParams) -> Result<Output, CliError> {
    let format = format_or(cli, Format::Csv, &[Format::Csv, Format::Json])?;
    let tol = tol_or(cli, verify::DEFAULT_QUAD_TOL)?;
    let c = a.constants.fixed::<5>("constants").map_err(CliError::Config)?;
    let sol = match a.family {
        1 => solution_family_1(SolutionConstants::new(c, Family::One)?, gas, tol)?,
        _ => solution_family_2(SolutionConstants::new(c, Family::Two)?, gas, tol)?,
    };
    let pot = PlanckPotential::ideal_gas(gas.n())?;
    let (t0, t1) = match &a.t_range {
        Some(l) => l.fixed::<2>("t-range").map(|[x, y]| (x, y)).map_err(CliError::Config)?,
        None => {
            let (lo, hi) = sol.time_interval();
            let (mid, half) = (0.5 * (lo + hi), 0.45 * (hi - lo));
            (mid - half, mid + half)
        }
    };
    let [a0, a1] = a.a_range.fixed::<2>("a-range").map_err(CliError::Config)?;
    let (nt, na) = grid_counts(&a.grid, "grid")?;
    let grid = Grid2D::new(Grid1D::new(t0, t1, nt).map_err(config_err)?, Grid1D::new(a0, a1, na).map_err(config_err)?);
    let mut rows = Vec::with_capacity(grid.len());
    for (t, av) in grid.points() {
        if !sol.is_valid(t, av) {
            rows.push(SolutionRow {
                t,
                a: av,
                u: None,
                rho: None,
                theta: None,
                r1: None,
                r2: None,
                r3: None,
                valid: false,
            });
            continue;
        }
        let j = sol.jet(t, av)?;
        let r = euler_residual(&sol, gas, &pot, t, av)?;
        rows.push(SolutionRow {
            t,
            a: av,
            u: Some(j.u),
            rho: Some(j.rho),
            theta: Some(j.theta),
            r1: Some(r[0]),
            r2: Some(r[1]),
            r3: Some(r[2]),
            valid: true,
        });
    }
    let bytes = match format {
        Format::Json => to_json(&rows)?,
        _ => csv_bytes(
            &["t", "a", "u", "rho", "theta", "r1", "r2", "r3", "valid"],
            rows.iter().map(|r| {
                let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
                vec![
                    num(r.t),
                    num(r.a),
                    opt(r.u),
                    opt(r.rho),
                    opt(r.theta),
                    opt(r.r1),
                    opt(r.r2),
                    opt(r.r3),
                    r.valid.to_string(),
                ]
            }),
        )?,
    };
    Ok(Output::ok(bytes))
}

fn cmd_expand(cli: &Cli, a: &ExpandArgs, gas: &GasParams, pot: &PlanckPotential) -> Result<Output, CliError> {
    if a.order > 1 {
        return Err(VirialError::UnsupportedOrder(a.order).into());
    }
    let format = format_or(cli, Format::Csv, &[Format::Csv, Format::Json])?;
    let tol = tol_or(cli, DEFAULT_ODE_TOL)?;
    let [c1, c2, c3] = a.constants.fixed::<3>("constants").map_err(CliError::Config)?;
    let [y0, y1] = a.y_range.fixed::<2>("y-range").map_err(CliError::Config)?;
    let state = a.state.fixed::<4>("state").map_err(CliError::Config)?;
    if a.samples < 2 {
        return Err(CliError::Config("--samples must be at least 2".into()));
    }
    let a1 = match (&a.a1, pot.kind()) {
        (Some(l), _) => Polynomial::new(l.0.clone()),
        (None, PotentialKind::Virial { coeffs, .. }) => coeffs.first().cloned().unwrap_or_else(Polynomial::zero),
        (None, PotentialKind::Ideal { .. }) => Polynomial::zero(),
    };
    let term = ZerothTerm::new(c1, c2, c3, gas)?;
    let ys: Vec<f64> = (0..a.samples).map(|i| y0 + (y1 - y0) * i as f64 / (a.samples - 1) as f64).collect();

    let (header, rows): (Vec<&str>, Vec<Vec<f64>>) = if a.order == 0 {
        let traj = integrate_zeroth(&term, (y0, y1), a.n0, tol)?;
        let rows = ys
            .iter()
            .map(|&y| {
                let j = traj.jet_at(y)?;
                let e = zeroth_residual(&term, &j);
                Ok(vec![y, j.n0, j.k0, j.l0, j.m0, e[0], e[1], e[2], e[3]])
            })
            .collect::<Result<_, VirialError>>()?;
        (vec!["y", "N0", "K0", "L0", "M0", "e1", "e2", "e3", "e4"], rows)
    } else {
        let sol = integrate_first_order(&term, gas, &a1, (y0, y1), a.n0, state, tol)?;
        let rows = ys
            .iter()
            .map(|&y| {
                let s = sol.state_at(y)?;
                let e = zeroth_residual(&term, &term.jet(y, s[0])?);
                let f = sol.residual_at(y)?;
                let mut row = vec![y];
                row.extend(s);
                row.extend(e);
                row.extend(f);
                Ok(row)
            })
            .collect::<Result<_, VirialError>>()?;
        (vec!["y", "N0", "M1", "N1", "L1", "K1", "e1", "e2", "e3", "e4", "f1", "f2", "f3", "f4"], rows)
    };
    let bytes = match format {
        Format::Json => {
            let records: Vec<serde_json::Map<String, serde_json::Value>> = rows
                .iter()
                .map(|r| header.iter().zip(r).map(|(k, v)| (k.to_string(), serde_json::json!(v))).collect())
                .collect();
            to_json(&records)?
        }
        _ => csv_bytes(&header, rows.into_iter().map(cells))?,
    };
    Ok(Output::ok(bytes))
}
