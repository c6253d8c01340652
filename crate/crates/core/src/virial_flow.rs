//! Power-series solutions of the quotient system for a virial gas.
//!
//! With `K = ΣK_k x^k`, `L = xΣL_k x^k`, `M = ΣM_k x^k`, `N = ΣN_k x^k` the
//! zeroth-order term reduces to one ODE for the flow temperature `N₀(y)`,
//!
//! ```text
//! N₀' = (c₁c₂Ry + (ω²y − c₃)N₀) / (c₁²Ry − N₀²)
//! ```
//!
//! which an affine rescaling turns into `N₀' = (AyN₀ + BN₀ + y)/(y − N₀²)`.
//! That equation is studied through the polynomial planar field
//! `(y − N₀², AyN₀ + BN₀ + y)`; its orientation flips across the parabola
//! `y = N₀²`. The first-order terms solve a linear ODE system driven by the
//! first virial coefficient `A₁`.

use crate::numerics::{
    classify_2x2, cubic_real_roots, ode_solve, EigenClass, Grid2D, Mat2, NumericsError, OdeOptions, StopEvent,
    Trajectory,
};
use crate::quotient::{QuotientError, TresseField, TresseJet};
use crate::thermo::{GasParams, Polynomial};
use serde::{Deserialize, Serialize};
use std::cell::Cell;
use thiserror::Error;

/// Relative threshold for `y = N₀²` and the first-order leading coefficients.
pub const SINGULAR_TOL: f64 = 1e-12;
/// Relative distance to `c₁²Ry = N₀²` within which an integrator stall is
/// reported as breaking.
pub const BREAKING_BAND: f64 = 1e-3;
/// Trajectories stop this close to a fixed point.
pub const FIXED_POINT_RADIUS: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VirialError {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("point (y = {y}, N0 = {n0}) is on the breaking parabola")]
    OnBreakingParabola { y: f64, n0: f64 },
    #[error("degenerate scaling: {0}")]
    DegenerateScaling(String),
    #[error("start (y = {y}, N0 = {n0}) is a fixed point")]
    StartAtFixedPoint { y: f64, n0: f64 },
    #[error("y = {y} is outside the integrated range")]
    OffTrajectory { y: f64 },
    #[error("N0 vanishes at y = {y}")]
    VanishingFlowTemperature { y: f64 },
    #[error("{which} vanishes at y = {y}")]
    SingularLeadingCoefficient { which: &'static str, y: f64 },
    #[error("expansion order {0} is not supported (only 0 and 1)")]
    UnsupportedOrder(u32),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Leading powers of `x` in the series for `K, L, M, N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionOrders {
    pub d_k: i32,
    pub d_l: i32,
    pub d_m: i32,
    pub d_n: i32,
}

impl Default for ExpansionOrders {
    fn default() -> Self {
        Self { d_k: 0, d_l: 1, d_m: 0, d_n: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedParams {
    pub a: f64,
    pub b: f64,
}

impl ReducedParams {
    pub fn new(a: f64, b: f64) -> Result<Self, VirialError> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(VirialError::InvalidArgument(format!("A and B must be finite, got ({a}, {b})")));
        }
        Ok(Self { a, b })
    }
}

fn near_parabola(y: f64, n0: f64, den: f64) -> bool {
    den.abs() < SINGULAR_TOL * 1f64.max(y.abs()).max(n0 * n0)
}

/// `N₀' = (AyN₀ + BN₀ + y)/(y − N₀²)`.
pub fn flow_temperature_rhs(p: &ReducedParams, y: f64, n0: f64) -> Result<f64, VirialError> {
    let den = y - n0 * n0;
    if near_parabola(y, n0, den) {
        return Err(VirialError::OnBreakingParabola { y, n0 });
    }
    Ok((p.a * y * n0 + p.b * n0 + y) / den)
}

/// `(dy/ds, dN₀/ds) = (y − N₀², AyN₀ + BN₀ + y)`.
pub fn planar_field(p: &ReducedParams, y: f64, n0: f64) -> [f64; 2] {
    [y - n0 * n0, p.a * y * n0 + p.b * n0 + y]
}

pub fn planar_jacobian(p: &ReducedParams, y: f64, n0: f64) -> Mat2 {
    [[1.0, -2.0 * n0], [p.a * n0 + 1.0, p.a * y + p.b]]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FixedPoint {
    pub y: f64,
    pub n0: f64,
    pub jacobian: Mat2,
    pub class: EigenClass,
    pub trace: f64,
    pub det: f64,
    /// Multiplicity of `N₀` as a root of the cubic; coincident equilibria
    /// are reported once.
    pub multiplicity: u8,
}

/// Equilibria of the planar field: `N₀(AN₀² + N₀ + B) = 0`, `y = N₀²`.
pub fn fixed_points(p: &ReducedParams) -> Vec<FixedPoint> {
    // the N₀ coefficient is 1, so the polynomial is never zero and 0 is always a root
    let roots = cubic_real_roots(p.a, 1.0, p.b, 0.0).expect("nonzero polynomial with root 0");
    roots
        .into_iter()
        .map(|r| {
            let n0 = r.value;
            let y = n0 * n0;
            let jacobian = planar_jacobian(p, y, n0);
            FixedPoint {
                y,
                n0,
                jacobian,
                class: classify_2x2(&jacobian),
                trace: jacobian[0][0] + jacobian[1][1],
                det: jacobian[0][0] * jacobian[1][1] - jacobian[0][1] * jacobian[1][0],
                multiplicity: r.multiplicity,
            }
        })
        .collect()
}

/// Rectangle `[y_min, y_max] × [n_min, n_max]` of the `(y, N₀)` plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub y_min: f64,
    pub y_max: f64,
    pub n_min: f64,
    pub n_max: f64,
}

impl Default for Window {
    fn default() -> Self {
        Self { y_min: -1.0, y_max: 3.0, n_min: -2.0, n_max: 2.0 }
    }
}

impl Window {
    pub fn new(y_min: f64, y_max: f64, n_min: f64, n_max: f64) -> Result<Self, VirialError> {
        if !(y_min < y_max && n_min < n_max) || ![y_min, y_max, n_min, n_max].iter().all(|v| v.is_finite()) {
            return Err(VirialError::InvalidArgument(format!(
                "window [{y_min}, {y_max}] x [{n_min}, {n_max}] is empty"
            )));
        }
        Ok(Self { y_min, y_max, n_min, n_max })
    }

    pub fn from_grid(grid: &Grid2D) -> Result<Self, VirialError> {
        Self::new(grid.x.min, grid.x.max, grid.y.min, grid.y.max)
    }

    pub fn contains(&self, y: f64, n0: f64) -> bool {
        y >= self.y_min && y <= self.y_max && n0 >= self.n_min && n0 <= self.n_max
    }

    /// Signed distance to the boundary, positive inside.
    fn margin(&self, y: f64, n0: f64) -> f64 {
        (y - self.y_min).min(self.y_max - y).min(n0 - self.n_min).min(self.n_max - n0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    ReachedSMax,
    NearFixedPoint,
    LeftWindow,
}

/// A solution curve of the planar field, parametrised by `s`.
#[derive(Debug, Clone)]
pub struct PlanarTrajectory {
    pub start: (f64, f64),
    pub path: Trajectory,
    pub termination: Termination,
    /// `(s, y, N₀)` where the curve meets `y = N₀²`.
    pub parabola_crossings: Vec<(f64, f64, f64)>,
}

impl PlanarTrajectory {
    /// `count` evenly spaced `(s, y, N₀)` samples.
    pub fn samples(&self, count: usize) -> Vec<(f64, f64, f64)> {
        self.path.resample(count).into_iter().map(|(s, z)| (s, z[0], z[1])).collect()
    }
}

/// Integrates the planar field from `start` up to parameter `s_max` (negative
/// for backward time), stopping early near a fixed point or on leaving `window`.
pub fn integrate_trajectory(
    p: &ReducedParams,
    start: (f64, f64),
    s_max: f64,
    tol: f64,
    window: Option<&Window>,
) -> Result<PlanarTrajectory, VirialError> {
    let (y0, n0) = start;
    let fps = fixed_points(p);
    if fps.iter().any(|f| (f.y - y0).hypot(f.n0 - n0) <= 1e-10) {
        return Err(VirialError::StartAtFixedPoint { y: y0, n0 });
    }
    if let Some(w) = window {
        if !w.contains(y0, n0) {
            return Err(VirialError::InvalidArgument(format!("start ({y0}, {n0}) lies outside the window")));
        }
    }
    // fixed points already inside the stopping ball at the start are ignored
    let targets: Vec<(f64, f64)> =
        fps.iter().filter(|f| (f.y - y0).hypot(f.n0 - n0) > FIXED_POINT_RADIUS).map(|f| (f.y, f.n0)).collect();
    let near = |z: &[f64]| {
        targets
            .iter()
            .map(|&(fy, fn0)| (z[0] - fy).hypot(z[1] - fn0) - FIXED_POINT_RADIUS)
            .fold(f64::INFINITY, f64::min)
    };
    let edge = |z: &[f64]| window.map_or(f64::INFINITY, |w| w.margin(z[0], z[1]));
    let g = |_s: f64, z: &[f64]| near(z).min(edge(z));
    let stop = StopEvent { g: &g };
    let opts = OdeOptions::with_tol(tol);
    let path = ode_solve(
        |_s, z| planar_field(p, z[0], z[1]).to_vec(),
        0.0,
        &[y0, n0],
        s_max,
        &opts,
        if targets.is_empty() && window.is_none() { None } else { Some(&stop) },
    )?;
    let termination = if path.stopped {
        let (_, z) = path.last();
        if edge(z) <= near(z) {
            Termination::LeftWindow
        } else {
            Termination::NearFixedPoint
        }
    } else {
        Termination::ReachedSMax
    };
    let parabola_crossings =
        path.crossings(|_s, z| z[0] - z[1] * z[1], tol).into_iter().map(|(s, z)| (s, z[0], z[1])).collect();
    Ok(PlanarTrajectory { start, path, termination, parabola_crossings })
}

/// Direction of the planar field at a grid point, normalised (or zero).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DirectionSample {
    pub y: f64,
    pub n0: f64,
    pub dy: f64,
    pub dn0: f64,
}

#[derive(Debug, Clone)]
pub struct Portrait {
    pub params: ReducedParams,
    pub window: Window,
    pub directions: Vec<DirectionSample>,
    /// Forward and backward pieces for each seed.
    pub trajectories: Vec<PlanarTrajectory>,
    pub fixed_points: Vec<FixedPoint>,
    /// Pieces of `y = N₀²` inside the window.
    pub parabola: Vec<Vec<(f64, f64)>>,
}

pub const PARABOLA_POINTS: usize = 401;

/// Direction field on `grid`, seed trajectories (both directions up to
/// `|s| = s_max`), fixed points and the breaking parabola.
pub fn portrait(
    p: &ReducedParams,
    grid: &Grid2D,
    seeds: &[(f64, f64)],
    s_max: f64,
    tol: f64,
) -> Result<Portrait, VirialError> {
    let window = Window::from_grid(grid)?;
    let directions = grid
        .points()
        .map(|(y, n0)| {
            let [dy, dn0] = planar_field(p, y, n0);
            let norm = dy.hypot(dn0);
            if norm > 0.0 {
                DirectionSample { y, n0, dy: dy / norm, dn0: dn0 / norm }
            } else {
                DirectionSample { y, n0, dy: 0.0, dn0: 0.0 }
            }
        })
        .collect();
    let fps = fixed_points(p);
    let mut trajectories = Vec::new();
    for &seed in seeds {
        if !window.contains(seed.0, seed.1) || fps.iter().any(|f| (f.y - seed.0).hypot(f.n0 - seed.1) <= 1e-10) {
            continue;
        }
        for dir in [1.0, -1.0] {
            trajectories.push(integrate_trajectory(p, seed, dir * s_max, tol, Some(&window))?);
        }
    }
    let fixed_points = fps.into_iter().filter(|f| window.contains(f.y, f.n0)).collect();
    Ok(Portrait { params: *p, window, directions, trajectories, fixed_points, parabola: parabola_pieces(&window) })
}

fn parabola_pieces(w: &Window) -> Vec<Vec<(f64, f64)>> {
    let mut pieces = Vec::new();
    let mut current = Vec::new();
    for i in 0..PARABOLA_POINTS {
        let n0 = w.n_min + (w.n_max - w.n_min) * i as f64 / (PARABOLA_POINTS - 1) as f64;
        let y = n0 * n0;
        if w.contains(y, n0) {
            current.push((y, n0));
        } else if !current.is_empty() {
            pieces.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        pieces.push(current);
    }
    pieces
}

/// Affine map between the physical `(y, N₀)` plane and the reduced one:
/// `y_phys = (Rc₁⁴/c₂²) y`, `N₀_phys = (Rc₁³/c₂) N₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rescaling {
    pub params: ReducedParams,
    pub y_scale: f64,
    pub n_scale: f64,
}

impl Rescaling {
    /// Physical → reduced.
    pub fn forward(&self, y: f64, n0: f64) -> (f64, f64) {
        (y / self.y_scale, n0 / self.n_scale)
    }

    /// Reduced → physical.
    pub fn inverse(&self, y: f64, n0: f64) -> (f64, f64) {
        (y * self.y_scale, n0 * self.n_scale)
    }
}

pub fn rescale_to_reduced(c1: f64, c2: f64, c3: f64, r: f64, omega: f64) -> Result<Rescaling, VirialError> {
    scaling(c1, c2, c3, r, omega * omega)
}

fn scaling(c1: f64, c2: f64, c3: f64, r: f64, omega_sq: f64) -> Result<Rescaling, VirialError> {
    if !(c1 != 0.0 && c2 != 0.0 && r > 0.0) || ![c1, c2, c3, r, omega_sq].iter().all(|v| v.is_finite()) {
        return Err(VirialError::DegenerateScaling(format!(
            "need c1 != 0, c2 != 0, R > 0; got c1 = {c1}, c2 = {c2}, R = {r}"
        )));
    }
    Ok(Rescaling {
        params: ReducedParams { a: c1 * c1 * omega_sq / (c2 * c2), b: -c3 / (c1 * c1 * r) },
        y_scale: r * c1.powi(4) / (c2 * c2),
        n_scale: r * c1.powi(3) / c2,
    })
}

/// Zeroth-order term: `M₀ = c₁`, `K₀ = N₀'`, `L₀ = (c₂ − c₁N₀')/N₀` with `N₀`
/// solving the physical flow-temperature ODE.
///
/// `ω²` is stored as a plain real so that reduced parameters with `A < 0`
/// (which need `ω² < 0`) can still be mapped back.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZerothTerm {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub r: f64,
    pub omega_sq: f64,
}

/// Zeroth-order quantities and their `y`-derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZerothJet {
    pub y: f64,
    pub n0: f64,
    pub n0_y: f64,
    pub k0: f64,
    pub k0_y: f64,
    pub l0: f64,
    pub l0_y: f64,
    pub m0: f64,
    pub m0_y: f64,
}

impl ZerothTerm {
    pub fn new(c1: f64, c2: f64, c3: f64, gas: &GasParams) -> Result<Self, VirialError> {
        Self::with_omega_sq(c1, c2, c3, gas.r(), gas.omega_sq())
    }

    pub fn with_omega_sq(c1: f64, c2: f64, c3: f64, r: f64, omega_sq: f64) -> Result<Self, VirialError> {
        scaling(c1, c2, c3, r, omega_sq)?;
        Ok(Self { c1, c2, c3, r, omega_sq })
    }

    /// The physical term whose rescaling yields `p`, for chosen `c₁, c₂, R`.
    pub fn from_reduced(p: &ReducedParams, c1: f64, c2: f64, r: f64) -> Result<Self, VirialError> {
        if !(c1 != 0.0 && r > 0.0) {
            return Err(VirialError::DegenerateScaling(format!("need c1 != 0 and R > 0; got c1 = {c1}, R = {r}")));
        }
        Self::with_omega_sq(c1, c2, -p.b * c1 * c1 * r, r, p.a * c2 * c2 / (c1 * c1))
    }

    /// Step-size collapse close to `c₁²Ry = N₀²` is the breaking of the solution.
    fn classify_failure(&self, e: NumericsError) -> VirialError {
        if let NumericsError::SingularityEncountered { t, ref state } = e {
            let (_, den) = self.parts(t, state[0]);
            if den.abs() < BREAKING_BAND * (self.c1 * self.c1 * self.r * t).abs().max(1.0) {
                return VirialError::OnBreakingParabola { y: t, n0: state[0] };
            }
        }
        VirialError::Numerics(e)
    }

    pub fn rescaling(&self) -> Rescaling {
        scaling(self.c1, self.c2, self.c3, self.r, self.omega_sq).expect("validated at construction")
    }

    fn parts(&self, y: f64, n0: f64) -> (f64, f64) {
        let num = self.c1 * self.c2 * self.r * y + (self.omega_sq * y - self.c3) * n0;
        let den = self.c1 * self.c1 * self.r * y - n0 * n0;
        (num, den)
    }

    /// `N₀' = (c₁c₂Ry + (ω²y − c₃)N₀) / (c₁²Ry − N₀²)`.
    pub fn physical_rhs(&self, y: f64, n0: f64) -> Result<f64, VirialError> {
        let (num, den) = self.parts(y, n0);
        if den.abs() < SINGULAR_TOL * (self.c1 * self.c1 * self.r * y).abs().max(n0 * n0).max(1.0) {
            return Err(VirialError::OnBreakingParabola { y, n0 });
        }
        Ok(num / den)
    }

    /// Jet at a point of a solution curve; `N₀''` by differentiating the ODE.
    pub fn jet(&self, y: f64, n0: f64) -> Result<ZerothJet, VirialError> {
        let f = self.physical_rhs(y, n0)?;
        let (num, den) = self.parts(y, n0);
        let (c1, r) = (self.c1, self.r);
        let f_y = ((c1 * self.c2 * r + self.omega_sq * n0) * den - num * c1 * c1 * r) / (den * den);
        let f_n = ((self.omega_sq * y - self.c3) * den + num * 2.0 * n0) / (den * den);
        self.jet_from(y, n0, f, f_y + f_n * f)
    }

    /// Jet from given `N₀'` and `N₀''` (e.g. finite differences of samples).
    pub fn jet_from(&self, y: f64, n0: f64, n0_y: f64, n0_yy: f64) -> Result<ZerothJet, VirialError> {
        if n0 == 0.0 || !n0.is_finite() {
            return Err(VirialError::VanishingFlowTemperature { y });
        }
        let l0 = (self.c2 - self.c1 * n0_y) / n0;
        Ok(ZerothJet {
            y,
            n0,
            n0_y,
            k0: n0_y,
            k0_y: n0_yy,
            l0,
            l0_y: (-self.c1 * n0_yy - l0 * n0_y) / n0,
            m0: self.c1,
            m0_y: 0.0,
        })
    }
}

/// The four zeroth-order equations at a jet.
pub fn zeroth_residual(term: &ZerothTerm, j: &ZerothJet) -> [f64; 4] {
    let ZerothJet { y, n0, n0_y, k0, k0_y, l0, l0_y, m0, m0_y } = *j;
    let r = term.r;
    [
        m0 * m0_y,
        m0 * n0_y - n0 * m0_y - k0 * m0,
        (l0 * n0 + m0 * k0) * (n0 * l0_y + m0 * k0_y + k0 * l0),
        r * m0 * m0 * (y * l0_y + m0_y + l0) - l0_y * n0 * n0 + m0 * (k0 * k0 + term.omega_sq) - l0 * k0 * n0,
    ]
}

/// A solution `N₀(y)` of the physical flow-temperature ODE.
#[derive(Debug, Clone)]
pub struct ZerothTrajectory {
    pub term: ZerothTerm,
    pub path: Trajectory,
}

pub fn integrate_zeroth(
    term: &ZerothTerm,
    y_range: (f64, f64),
    n0_start: f64,
    tol: f64,
) -> Result<ZerothTrajectory, VirialError> {
    let err = Cell::new(None);
    let rhs = |y: f64, z: &[f64]| match term.physical_rhs(y, z[0]) {
        Ok(v) => vec![v],
        Err(e) => {
            err.set(Some(e));
            vec![f64::NAN]
        }
    };
    term.physical_rhs(y_range.0, n0_start)?;
    let path = ode_solve(rhs, y_range.0, &[n0_start], y_range.1, &OdeOptions::with_tol(tol), None)
        .map_err(|e| err.take().unwrap_or_else(|| term.classify_failure(e)))?;
    Ok(ZerothTrajectory { term: *term, path })
}

impl ZerothTrajectory {
    pub fn n0_at(&self, y: f64) -> Result<f64, VirialError> {
        self.path.eval(y).map(|z| z[0]).ok_or(VirialError::OffTrajectory { y })
    }

    pub fn jet_at(&self, y: f64) -> Result<ZerothJet, VirialError> {
        self.term.jet(y, self.n0_at(y)?)
    }

    /// Jet with `N₀'`, `N₀''` from central differences of the dense output.
    pub fn fd_jet_at(&self, y: f64, h: f64) -> Result<ZerothJet, VirialError> {
        let v = |d: f64| self.n0_at(y + d);
        let (m2, m1, c, p1, p2) = (v(-2.0 * h)?, v(-h)?, v(0.0)?, v(h)?, v(2.0 * h)?);
        let d1 = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
        let d2 = (-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) / (12.0 * h * h);
        self.term.jet_from(y, c, d1, d2)
    }
}

/// `A₁`, `(yA₁)'`, `(yA₁)''` at `y`.
fn virial_terms(a1: &Polynomial, y: f64) -> (f64, f64, f64) {
    let (v, d1, d2) = a1.eval_d2(y);
    (v, v + y * d1, 2.0 * d1 + y * d2)
}

/// The `A₁`-dependent bracket shared by the last two first-order equations.
fn virial_forcing(z: &ZerothJet, a1: &Polynomial) -> f64 {
    let (a, ya_d1, ya_d2) = virial_terms(a1, z.y);
    z.m0 * (z.m0 * ya_d2 + ya_d1 * (3.0 * z.l0 + z.m0_y)) + 2.0 * z.y * a * (z.l0 * z.l0 + z.m0 * z.l0_y)
}

fn check_coefficient(which: &'static str, v: f64, scale: f64, y: f64) -> Result<(), VirialError> {
    if !(v.abs() > SINGULAR_TOL * scale.max(1.0)) {
        return Err(VirialError::SingularLeadingCoefficient { which, y });
    }
    Ok(())
}

/// First-order equations evaluated at given values `[M₁, N₁, L₁, K₁]` and
/// derivatives `[M₁', N₁', L₁', K₁']`.
///
/// `R` and `ω²` come from the zeroth term, `k` and `n` from `gas`. The third
/// equation has `RM₀²y − N₀²` as the coefficient of `L₁'` and `RM₀²` on `M₁'`.
pub fn first_order_residual(
    term: &ZerothTerm,
    gas: &GasParams,
    a1: &Polynomial,
    z: &ZerothJet,
    state: [f64; 4],
    derivs: [f64; 4],
) -> [f64; 4] {
    let [m1, n1, l1, k1] = state;
    let [dm1, dn1, dl1, dk1] = derivs;
    let ZerothJet { y, n0, k0, k0_y, l0, l0_y, m0, m0_y, .. } = *z;
    let (r, w2, k, n) = (term.r, term.omega_sq, gas.k(), gas.n() as f64);
    let forcing = virial_forcing(z, a1);
    let e1 = k * m0 * dm1 + k * (m0_y + l0) * m1 - r * (y * k0 + n * n0 / 2.0);
    let e2 = n0 * dm1 - m0 * dn1 + n1 * (m0_y - l0) + k1 * m0 - m1 * z.n0_y;
    let e3 = (r * m0 * m0 * y - n0 * n0) * dl1 + r * m0 * m0 * dm1 + (m0 * k0 - 2.0 * l0 * n0) * k1
        - (k0 * l0 + 2.0 * l0_y * n0) * n1
        + ((2.0 * y * l0_y + 3.0 * l0 + 2.0 * m0_y) * r * m0 + k0 * k0 + w2) * m1
        + r * m0 * (y * l0 + m0) * l1
        + r * m0 * forcing;
    let e4 = (l0 * n0 + m0 * k0) * dk1
        + (r * y * l0 * m0 + n0 * k0) * dl1
        + r * l0 * m0 * dm1
        + n1 * (k0_y * l0 + l0_y * k0)
        + l1 * (r * m0 * (y * l0_y + 2.0 * l0 + m0_y) + y * r * l0 * l0 + k0_y * n0 + k0 * k0 + w2)
        + m1 * (r * l0 * (y * l0_y + 2.0 * l0 + m0_y) + k0_y * k0)
        + k1 * (m0 * k0_y + 4.0 * k0 * l0 + l0_y * n0)
        + r * l0 * forcing;
    [e1, e2, e3, e4]
}

/// Solves the first-order system for `[M₁', N₁', L₁', K₁']`, equation by
/// equation (each introduces one new derivative).
pub fn first_order_rhs(
    term: &ZerothTerm,
    gas: &GasParams,
    a1: &Polynomial,
    z: &ZerothJet,
    state: [f64; 4],
) -> Result<[f64; 4], VirialError> {
    let [m1, n1, l1, k1] = state;
    let ZerothJet { y, n0, k0, k0_y, l0, l0_y, m0, m0_y, .. } = *z;
    let (r, w2, k, n) = (term.r, term.omega_sq, gas.k(), gas.n() as f64);
    check_coefficient("k M0", k * m0, 0.0, y)?;
    check_coefficient("M0", m0, 0.0, y)?;
    let lead3 = r * m0 * m0 * y - n0 * n0;
    check_coefficient("R M0^2 y - N0^2", lead3, (r * m0 * m0 * y).abs().max(n0 * n0), y)?;
    let lead4 = l0 * n0 + m0 * k0;
    check_coefficient("L0 N0 + M0 K0", lead4, (l0 * n0).abs().max((m0 * k0).abs()), y)?;

    let forcing = virial_forcing(z, a1);
    let dm1 = (r * (y * k0 + n * n0 / 2.0) - k * (m0_y + l0) * m1) / (k * m0);
    let dn1 = (n0 * dm1 + n1 * (m0_y - l0) + k1 * m0 - m1 * z.n0_y) / m0;
    let rest3 = r * m0 * m0 * dm1 + (m0 * k0 - 2.0 * l0 * n0) * k1 - (k0 * l0 + 2.0 * l0_y * n0) * n1
        + ((2.0 * y * l0_y + 3.0 * l0 + 2.0 * m0_y) * r * m0 + k0 * k0 + w2) * m1
        + r * m0 * (y * l0 + m0) * l1
        + r * m0 * forcing;
    let dl1 = -rest3 / lead3;
    let rest4 = (r * y * l0 * m0 + n0 * k0) * dl1
        + r * l0 * m0 * dm1
        + n1 * (k0_y * l0 + l0_y * k0)
        + l1 * (r * m0 * (y * l0_y + 2.0 * l0 + m0_y) + y * r * l0 * l0 + k0_y * n0 + k0 * k0 + w2)
        + m1 * (r * l0 * (y * l0_y + 2.0 * l0 + m0_y) + k0_y * k0)
        + k1 * (m0 * k0_y + 4.0 * k0 * l0 + l0_y * n0)
        + r * l0 * forcing;
    Ok([dm1, dn1, dl1, -rest4 / lead4])
}

/// Zeroth- and first-order terms integrated together in `y`; the state is
/// `[N₀, M₁, N₁, L₁, K₁]`.
#[derive(Debug, Clone)]
pub struct FirstOrderSolution {
    pub term: ZerothTerm,
    pub gas: GasParams,
    pub a1: Polynomial,
    pub path: Trajectory,
    pub tol: f64,
}

fn full_rhs(term: &ZerothTerm, gas: &GasParams, a1: &Polynomial, y: f64, s: &[f64]) -> Result<Vec<f64>, VirialError> {
    let z = term.jet(y, s[0])?;
    let d = first_order_rhs(term, gas, a1, &z, [s[1], s[2], s[3], s[4]])?;
    Ok(vec![z.n0_y, d[0], d[1], d[2], d[3]])
}

fn integrate_full(
    term: &ZerothTerm,
    gas: &GasParams,
    a1: &Polynomial,
    y0: f64,
    s0: &[f64],
    y1: f64,
    tol: f64,
) -> Result<Trajectory, VirialError> {
    let err = Cell::new(None);
    let rhs = |y: f64, s: &[f64]| match full_rhs(term, gas, a1, y, s) {
        Ok(v) => v,
        Err(e) => {
            err.set(Some(e));
            vec![f64::NAN; 5]
        }
    };
    ode_solve(rhs, y0, s0, y1, &OdeOptions::with_tol(tol), None)
        .map_err(|e| err.take().unwrap_or_else(|| term.classify_failure(e)))
}

/// Integrates `[N₀, M₁, N₁, L₁, K₁]` over `y_range` from `N₀(y₀) = n0_start`
/// and `[M₁, N₁, L₁, K₁](y₀) = state0`.
pub fn integrate_first_order(
    term: &ZerothTerm,
    gas: &GasParams,
    a1: &Polynomial,
    y_range: (f64, f64),
    n0_start: f64,
    state0: [f64; 4],
    tol: f64,
) -> Result<FirstOrderSolution, VirialError> {
    let s0 = [n0_start, state0[0], state0[1], state0[2], state0[3]];
    full_rhs(term, gas, a1, y_range.0, &s0)?;
    let path = integrate_full(term, gas, a1, y_range.0, &s0, y_range.1, tol)?;
    Ok(FirstOrderSolution { term: *term, gas: gas.clone(), a1: a1.clone(), path, tol })
}

/// Step for the derivative estimates in [`FirstOrderSolution::residual_at`].
const RESIDUAL_STEP: f64 = 1e-3;
const LOCAL_TOL: f64 = 1e-12;

impl FirstOrderSolution {
    /// `[N₀, M₁, N₁, L₁, K₁]` at `y`.
    pub fn state_at(&self, y: f64) -> Result<[f64; 5], VirialError> {
        let v = self.path.eval(y).ok_or(VirialError::OffTrajectory { y })?;
        Ok([v[0], v[1], v[2], v[3], v[4]])
    }

    /// Residuals of the first-order equations at `y`, with derivatives taken
    /// by fourth-order central differences of tight local re-integrations
    /// from the sampled state (independent of the triangular solve).
    pub fn residual_at(&self, y: f64) -> Result<[f64; 4], VirialError> {
        let s = self.state_at(y)?;
        let h = RESIDUAL_STEP * y.abs().max(1.0);
        let mut vals = [[0.0; 5]; 4];
        for (slot, d) in [-2.0, -1.0, 1.0, 2.0].iter().enumerate() {
            let t = integrate_full(&self.term, &self.gas, &self.a1, y, &s, y + d * h, LOCAL_TOL)?;
            let (_, end) = t.last();
            vals[slot].copy_from_slice(end);
        }
        let mut derivs = [0.0; 4];
        for (i, d) in derivs.iter_mut().enumerate() {
            let c = i + 1;
            *d = (vals[0][c] - 8.0 * vals[1][c] + 8.0 * vals[2][c] - vals[3][c]) / (12.0 * h);
        }
        let z = self.term.jet(y, s[0])?;
        Ok(first_order_residual(&self.term, &self.gas, &self.a1, &z, [s[1], s[2], s[3], s[4]], derivs))
    }

    pub fn y_range(&self) -> (f64, f64) {
        (self.path.t_start(), self.path.t_end())
    }
}

/// `K, L, M, N` truncated after the first-order terms, as a field on `(x, y)`.
pub struct SeriesField<'a> {
    solution: &'a FirstOrderSolution,
}

impl<'a> SeriesField<'a> {
    pub fn new(solution: &'a FirstOrderSolution, orders: ExpansionOrders) -> Result<Self, VirialError> {
        if orders != ExpansionOrders::default() {
            return Err(VirialError::InvalidArgument(format!(
                "only the leading orders (0, 1, 0, 0) are implemented, got {orders:?}"
            )));
        }
        Ok(Self { solution })
    }

    fn pieces(&self, y: f64) -> Result<(ZerothJet, [f64; 4], [f64; 4]), VirialError> {
        let sol = self.solution;
        let s = sol.state_at(y)?;
        let z = sol.term.jet(y, s[0])?;
        let first = [s[1], s[2], s[3], s[4]];
        let d = first_order_rhs(&sol.term, &sol.gas, &sol.a1, &z, first)?;
        Ok((z, first, d))
    }
}

impl TresseField for SeriesField<'_> {
    fn jet(&self, x: f64, y: f64) -> Result<TresseJet, QuotientError> {
        let (z, [m1, n1, l1, k1], [dm1, dn1, dl1, dk1]) =
            self.pieces(y).map_err(|_| QuotientError::OutsideDomain { x, y })?;
        Ok(TresseJet {
            x,
            y,
            k: z.k0 + x * k1,
            l: x * (z.l0 + x * l1),
            m: z.m0 + x * m1,
            n: z.n0 + x * n1,
            k_x: k1,
            k_y: z.k0_y + x * dk1,
            l_x: z.l0 + 2.0 * x * l1,
            l_y: x * (z.l0_y + x * dl1),
            m_x: m1,
            m_y: z.m0_y + x * dm1,
            n_x: n1,
            n_y: z.n0_y + x * dn1,
        })
    }

    fn in_domain(&self, x: f64, y: f64) -> bool {
        x > 0.0 && self.pieces(y).is_ok()
    }
}
