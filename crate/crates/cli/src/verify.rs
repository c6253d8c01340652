//! Cross-verification suite behind `curveflow verify`.
//!
//! Each measurement returns the worst residual it saw plus a consistency flag
//! for structural checks (counts, classes) that have no residual.

use curveflow::euler_system::{
    euler_residual, euler_symbol, invariants_of_flow, solution_family_1, solution_family_2, Family, FlowField,
    SolutionConstants, SolutionFamily,
};
use curveflow::numerics::{default_step, fd_derivative, fd_partial, ode_solve, EigenClass, OdeOptions, Trajectory};
use curveflow::quotient::{quotient_residual, quotient_symbol_jet, quotsol1, quotsol2, Branch, TresseField, TresseJet};
use curveflow::thermo::{GasParams, PlanckPotential, Polynomial};
use curveflow::virial_flow::{
    fixed_points, integrate_first_order, integrate_trajectory, planar_field, zeroth_residual, ReducedParams,
    Termination, Window, ZerothTerm,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub const FIXED_POINT_TOL: f64 = 1e-12;
pub const QUOTIENT_TOL: f64 = 1e-8;
pub const EULER_TOL: f64 = 1e-6;
pub const CORRESPONDENCE_TOL: f64 = 1e-6;
pub const SYMBOL_TOL: f64 = 1e-12;
pub const ZEROTH_TOL: f64 = 1e-10;
pub const TELESCOPING_TOL: f64 = 1e-12;
pub const FIRST_ORDER_TOL: f64 = 1e-6;
pub const DERIVATIVE_TOL: f64 = 1e-6;
pub const ODE_CONVERGENCE_TOL: f64 = 1e-6;
/// Inner and outer radius of the annulus around the centre at (1, 1).
pub const CENTRE_ANNULUS: (f64, f64) = (1e-3, 0.5);

/// Quadrature tolerance for the solution families unless overridden.
pub const DEFAULT_QUAD_TOL: f64 = 1e-10;
/// Constants used for both families in the Euler and correspondence checks.
pub const DEFAULT_CONSTANTS: [f64; 5] = [1.0, 2.0, 0.0, 0.0, 0.0];
/// Figure parameter sets of the planar field.
pub const FIGURE_PARAMS: [(f64, f64); 4] = [(-2.0, 1.0), (1.0, 2.0), (2.0, -3.0), (-2.0, -1.0)];
/// `(c₁, c₂, ω)` triples for the constant-type quotient solutions.
pub const QUOTSOL_CONSTANTS: [(f64, f64, f64); 3] = [(1.0, 2.0, 1.0), (-1.0, 4.0, 1.0), (2.0, 1.0, 0.5)];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Measurement {
    pub max_residual: f64,
    pub consistent: bool,
    pub detail: String,
}

impl Measurement {
    fn residual(max_residual: f64, detail: String) -> Self {
        Self { max_residual, consistent: max_residual.is_finite(), detail }
    }

    fn failed(detail: String) -> Self {
        Self { max_residual: f64::INFINITY, consistent: false, detail }
    }

    pub fn passes(&self, tolerance: f64) -> bool {
        self.consistent && self.max_residual <= tolerance
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyResult {
    pub name: &'static str,
    /// `null` in JSON when the check could not produce a residual.
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub detail: String,
}

impl PropertyResult {
    fn new(name: &'static str, tolerance: f64, m: Measurement) -> Self {
        Self { name, max_residual: m.max_residual, tolerance, pass: m.passes(tolerance), detail: m.detail }
    }
}

/// Inputs of a verification run.
#[derive(Debug, Clone)]
pub struct Suite {
    pub gas: GasParams,
    pub potential: PlanckPotential,
    pub families: Vec<Family>,
    pub seed: u64,
    pub quad_tol: f64,
}

impl Suite {
    pub fn run(&self) -> Vec<PropertyResult> {
        let rng = |k: u64| ChaCha8Rng::seed_from_u64(self.seed.wrapping_mul(1000).wrapping_add(k));
        let (r, k) = (self.gas.r(), self.gas.k());
        let (zeroth, telescoping) = zeroth_along_trajectories(r, &mut rng(5));
        let mut out = vec![
            PropertyResult::new("fixed-point-inventory", FIXED_POINT_TOL, fixed_point_inventory()),
            PropertyResult::new("quotient-exactness", QUOTIENT_TOL, quotient_exactness(r, k, &mut rng(1))),
        ];
        for &fam in &self.families {
            let (euler, corr) = match fam {
                Family::One => ("euler-exactness-family-1", "correspondence-family-1"),
                Family::Two => ("euler-exactness-family-2", "correspondence-family-2"),
            };
            out.push(PropertyResult::new(euler, EULER_TOL, euler_exactness(&self.gas, fam, self.quad_tol)));
            out.push(PropertyResult::new(
                corr,
                CORRESPONDENCE_TOL,
                correspondence(&self.gas, fam, self.quad_tol, &mut rng(2)),
            ));
        }
        out.extend([
            PropertyResult::new(
                "euler-symbol-determinant",
                SYMBOL_TOL,
                euler_symbol_identity(&self.gas, &self.potential, &mut rng(3)),
            ),
            PropertyResult::new(
                "quotient-symbol-determinant",
                SYMBOL_TOL,
                quotient_symbol_identity(&self.gas, &self.potential, &mut rng(4)),
            ),
            PropertyResult::new("zeroth-order-residual", ZEROTH_TOL, zeroth),
            PropertyResult::new("telescoping-identity", TELESCOPING_TOL, telescoping),
            PropertyResult::new("first-order-residual", FIRST_ORDER_TOL, first_order_residuals(&self.gas)),
            PropertyResult::new(
                "potential-derivatives",
                DERIVATIVE_TOL,
                potential_derivatives(&self.potential, &mut rng(6)),
            ),
            PropertyResult::new("quotsol-derivatives", DERIVATIVE_TOL, quotsol_derivatives(&mut rng(7))),
            PropertyResult::new(
                "solution-derivatives",
                DERIVATIVE_TOL,
                solution_derivatives(&self.gas, &self.families, self.quad_tol, &mut rng(8)),
            ),
            PropertyResult::new("ode-self-convergence", ODE_CONVERGENCE_TOL, ode_self_convergence()),
            PropertyResult::new("centre-annulus", 0.0, centre_annulus()),
        ]);
        out
    }
}

fn family_solution(gas: &GasParams, fam: Family, c: [f64; 5], tol: f64) -> Result<SolutionFamily, String> {
    let c = SolutionConstants::new(c, fam).map_err(|e| e.to_string())?;
    match fam {
        Family::One => solution_family_1(c, gas, tol),
        Family::Two => solution_family_2(c, gas, tol),
    }
    .map_err(|e| e.to_string())
}

fn relative(exact: f64, approx: f64) -> f64 {
    (exact - approx).abs() / exact.abs().max(1.0)
}

/// Location error of the computed equilibria against the figure inventories;
/// inconsistent if any count or class differs.
pub fn fixed_point_inventory() -> Measurement {
    use EigenClass::*;
    let expected: [&[(f64, f64, EigenClass)]; 4] = [
        &[(0.0, 0.0, UnstableNode), (0.25, -0.5, Saddle), (1.0, 1.0, Saddle)],
        &[(0.0, 0.0, UnstableNode)],
        &[(0.0, 0.0, Saddle), (1.0, 1.0, Centre), (2.25, -1.5, UnstableSpiral)],
        &[(0.0, 0.0, Saddle)],
    ];
    let mut worst: f64 = 0.0;
    let mut problems = Vec::new();
    for ((a, b), want) in FIGURE_PARAMS.iter().zip(expected) {
        let got = match ReducedParams::new(*a, *b) {
            Ok(p) => fixed_points(&p),
            Err(e) => return Measurement::failed(e.to_string()),
        };
        if got.len() != want.len() {
            problems.push(format!("({a},{b}): {} points, expected {}", got.len(), want.len()));
            continue;
        }
        for &(y, n0, class) in want {
            let Some(f) = got.iter().min_by(|p, q| (p.y - y).hypot(p.n0 - n0).total_cmp(&(q.y - y).hypot(q.n0 - n0)))
            else {
                continue;
            };
            worst = worst.max((f.y - y).abs()).max((f.n0 - n0).abs());
            if f.class != class {
                problems.push(format!("({a},{b}) at ({y},{n0}): {} instead of {}", f.class, class));
            }
        }
    }
    Measurement {
        max_residual: worst,
        consistent: problems.is_empty(),
        detail: if problems.is_empty() { "4 parameter sets".into() } else { problems.join("; ") },
    }
}

/// Points of `[0.5, 2]²` in the field's domain with `|K| ≥ 0.1` and `|L| ≤ 50`.
fn quotient_samples(field: &dyn TresseField, rng: &mut ChaCha8Rng, count: usize) -> Option<Vec<(f64, f64)>> {
    let mut out = Vec::with_capacity(count);
    for _ in 0..100_000 {
        if out.len() == count {
            return Some(out);
        }
        let (x, y) = (rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0));
        if !field.in_domain(x, y) {
            continue;
        }
        match field.jet(x, y) {
            Ok(j) if j.k.abs() >= 0.1 && j.l.abs() <= 50.0 => out.push((x, y)),
            _ => {}
        }
    }
    (out.len() == count).then_some(out)
}

/// Quotient residuals of both constant-type solutions and both branches for
/// n ∈ {3, 4, 5} and each constant triple, 100 points each.
pub fn quotient_exactness(r: f64, k: f64, rng: &mut ChaCha8Rng) -> Measurement {
    let mut worst: f64 = 0.0;
    let mut evaluated = 0;
    for n in [3u32, 4, 5] {
        let Ok(pot) = PlanckPotential::ideal_gas(n) else { return Measurement::failed(format!("ideal gas n = {n}")) };
        for (c1, c2, omega) in QUOTSOL_CONSTANTS {
            let gas = match GasParams::new(r, n, k, 1.0, 0.5 * omega * omega) {
                Ok(g) => g,
                Err(e) => return Measurement::failed(e.to_string()),
            };
            for branch in [Branch::Positive, Branch::Negative] {
                let fields: [Box<dyn TresseField>; 2] =
                    match (quotsol1(c1, c2, n, omega, branch), quotsol2(c1, c2, n, omega, branch)) {
                        (Ok(a), Ok(b)) => [Box::new(a), Box::new(b)],
                        (Err(e), _) | (_, Err(e)) => return Measurement::failed(e.to_string()),
                    };
                for field in &fields {
                    let Some(points) = quotient_samples(field.as_ref(), rng, 100) else {
                        return Measurement::failed(format!("could not sample n = {n}, c = ({c1},{c2},{omega})"));
                    };
                    for (x, y) in points {
                        match quotient_residual(field.as_ref(), &gas, &pot, x, y) {
                            Ok(q) => worst = q.iter().fold(worst, |m, v| m.max(v.abs())),
                            Err(e) => return Measurement::failed(e.to_string()),
                        }
                        evaluated += 1;
                    }
                }
            }
        }
    }
    Measurement::residual(worst, format!("{evaluated} points"))
}

/// `count × count` grid over the middle 80% of the time interval and `a ∈ [0.5, 3]`.
fn solution_grid(sol: &SolutionFamily, count: usize) -> Vec<(f64, f64)> {
    let (lo, hi) = sol.time_interval();
    let (mid, half) = (0.5 * (lo + hi), 0.4 * (hi - lo));
    let step = |i: usize| i as f64 / (count - 1) as f64;
    (0..count).flat_map(|i| (0..count).map(move |j| (mid - half + 2.0 * half * step(i), 0.5 + 2.5 * step(j)))).collect()
}

/// Euler residuals of one family with the default constants on a 20×20 grid.
pub fn euler_exactness(gas: &GasParams, fam: Family, quad_tol: f64) -> Measurement {
    let sol = match family_solution(gas, fam, DEFAULT_CONSTANTS, quad_tol) {
        Ok(s) => s,
        Err(e) => return Measurement::failed(e),
    };
    let pot = match PlanckPotential::ideal_gas(gas.n()) {
        Ok(p) => p,
        Err(e) => return Measurement::failed(e.to_string()),
    };
    let grid = solution_grid(&sol, 20);
    let mut worst: f64 = 0.0;
    let mut valid = 0;
    for &(t, a) in &grid {
        if !sol.is_valid(t, a) {
            continue;
        }
        valid += 1;
        match euler_residual(&sol, gas, &pot, t, a) {
            Ok(r) => worst = r.iter().fold(worst, |m, v| m.max(v.abs())),
            Err(e) => return Measurement::failed(e.to_string()),
        }
    }
    Measurement {
        max_residual: worst,
        consistent: valid == grid.len(),
        detail: format!("{valid}/{} grid points valid", grid.len()),
    }
}

/// Distance between the flow invariants and the matching constant-type
/// solution at 50 random valid points; the branch follows the sign of `K`.
pub fn correspondence(gas: &GasParams, fam: Family, quad_tol: f64, rng: &mut ChaCha8Rng) -> Measurement {
    let c = DEFAULT_CONSTANTS;
    let sol = match family_solution(gas, fam, c, quad_tol) {
        Ok(s) => s,
        Err(e) => return Measurement::failed(e),
    };
    let (lo, hi) = sol.time_interval();
    let (mid, half) = (0.5 * (lo + hi), 0.45 * (hi - lo));
    let (n, w) = (gas.n(), gas.omega());
    let mut worst: f64 = 0.0;
    let mut found = 0;
    for _ in 0..10_000 {
        if found == 50 {
            break;
        }
        let (t, a) = (mid + half * rng.gen_range(-1.0..1.0), rng.gen_range(0.3..3.0));
        // K vanishes at t_ref, where the branch is ambiguous
        if (t - sol.t_ref()).abs() <= 1e-3 || !sol.is_valid(t, a) {
            continue;
        }
        found += 1;
        let inv = match invariants_of_flow(&sol, t, a) {
            Ok(i) => i,
            Err(e) => return Measurement::failed(e.to_string()),
        };
        let branch = Branch::of(inv.k);
        let jet = match fam {
            Family::One => quotsol1(c[0], c[1], n, w, branch).and_then(|q| q.jet(inv.x, inv.y)),
            Family::Two => quotsol2(c[0], c[1], n, w, branch).and_then(|q| q.jet(inv.x, inv.y)),
        };
        let j = match jet {
            Ok(j) => j,
            Err(e) => return Measurement::failed(format!("({t}, {a}): {e}")),
        };
        for d in [inv.k - j.k, inv.l - j.l, inv.m - j.m, inv.n - j.n] {
            worst = worst.max(d.abs());
        }
    }
    Measurement { max_residual: worst, consistent: found == 50, detail: format!("{found} points") }
}

/// Direct against factored determinant of the Euler symbol, relative.
pub fn euler_symbol_identity(gas: &GasParams, pot: &PlanckPotential, rng: &mut ChaCha8Rng) -> Measurement {
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let state = (rng.gen_range(-2.0..2.0), rng.gen_range(0.1..1.5), rng.gen_range(0.2..3.0));
        let xi = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        match euler_symbol(gas, pot, state, xi) {
            Ok(s) => {
                let scale = s.det_factored.abs().max(s.det_direct.abs()).max(f64::MIN_POSITIVE);
                worst = worst.max((s.det_direct - s.det_factored).abs() / scale);
            }
            Err(e) => return Measurement::failed(e.to_string()),
        }
    }
    Measurement::residual(worst, "100 states".into())
}

/// Direct against factored determinant of the quotient symbol on random jets.
pub fn quotient_symbol_identity(gas: &GasParams, pot: &PlanckPotential, rng: &mut ChaCha8Rng) -> Measurement {
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let mut v = || rng.gen_range(-2.0..2.0);
        let j = TresseJet { k: v(), l: v(), m: v(), n: v(), ..TresseJet::default() };
        let j = TresseJet { x: rng.gen_range(0.2..3.0), y: rng.gen_range(0.2..3.0), ..j };
        let xi = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let p = match pot.eval(j.x, j.y) {
            Ok(p) => p,
            Err(e) => return Measurement::failed(e.to_string()),
        };
        let s = quotient_symbol_jet(&j, &p, gas.r(), gas.k(), xi);
        let scale = s.det_factored.abs().max(s.det_direct.abs()).max(f64::MIN_POSITIVE);
        worst = worst.max((s.det_direct - s.det_factored).abs() / scale);
    }
    Measurement::residual(worst, "100 jets".into())
}

/// Zeroth-order residuals and the telescoping defect `L₀N₀ + M₀K₀ − c₂`,
/// both relative to the largest term, along planar trajectories of every
/// figure parameter set mapped back to physical variables.
pub fn zeroth_along_trajectories(r: f64, rng: &mut ChaCha8Rng) -> (Measurement, Measurement) {
    let window = Window::default();
    let (mut worst, mut worst_tel, mut checked) = (0.0f64, 0.0f64, 0);
    for (a, b) in FIGURE_PARAMS {
        let setup = ReducedParams::new(a, b).and_then(|p| Ok((p, ZerothTerm::from_reduced(&p, 1.3, 0.8, r)?)));
        let (p, term) = match setup {
            Ok(v) => v,
            Err(e) => return (Measurement::failed(e.to_string()), Measurement::failed(e.to_string())),
        };
        let scale = term.rescaling();
        for _ in 0..4 {
            let start = (rng.gen_range(-0.5..2.5), rng.gen_range(-1.5..1.5));
            let traj = match integrate_trajectory(&p, start, 5.0, 1e-10, Some(&window)) {
                Ok(t) => t,
                Err(e) => return (Measurement::failed(e.to_string()), Measurement::failed(e.to_string())),
            };
            for (_, y, n) in traj.samples(60) {
                if n.abs() < 1e-3 || (y - n * n).abs() < 1e-3 {
                    continue;
                }
                let (yp, np) = scale.inverse(y, n);
                let Ok(j) = term.jet(yp, np) else { continue };
                let mag = [j.l0_y * j.n0 * j.n0, j.m0 * j.k0 * j.k0, j.l0 * j.k0 * j.n0, 1.0]
                    .iter()
                    .fold(0.0f64, |s, v| s.max(v.abs()));
                let e = zeroth_residual(&term, &j);
                worst = e.iter().fold(worst, |m, v| m.max(v.abs() / mag));
                worst_tel = worst_tel.max((j.l0 * j.n0 + j.m0 * j.k0 - term.c2).abs() / mag);
                checked += 1;
            }
        }
    }
    let detail = format!("{checked} trajectory samples");
    (Measurement::residual(worst, detail.clone()), Measurement::residual(worst_tel, detail))
}

/// First-order residuals for `A₁ ∈ {0, 1, y}` with `(c₁, c₂, c₃) = (2, 1, 2)`,
/// `N₀(1) = 0.5` on `y ∈ [1, 3]`.
pub fn first_order_residuals(gas: &GasParams) -> Measurement {
    let term = match ZerothTerm::new(2.0, 1.0, 2.0, gas) {
        Ok(t) => t,
        Err(e) => return Measurement::failed(e.to_string()),
    };
    let mut worst: f64 = 0.0;
    for a1 in [Polynomial::zero(), Polynomial::constant(1.0), Polynomial::identity()] {
        let sol = match integrate_first_order(&term, gas, &a1, (1.0, 3.0), 0.5, [0.1, -0.2, 0.3, 0.05], 1e-8) {
            Ok(s) => s,
            Err(e) => return Measurement::failed(format!("A1 = {:?}: {e}", a1.coeffs)),
        };
        for i in 0..=10 {
            let y = 1.0 + 2.0 * (0.02 + 0.96 * i as f64 / 10.0);
            match sol.residual_at(y) {
                Ok(r) => worst = r.iter().fold(worst, |m, v| m.max(v.abs())),
                Err(e) => return Measurement::failed(e.to_string()),
            }
        }
    }
    Measurement::residual(worst, "A1 in {0, 1, y}, 11 points each".into())
}

/// Every partial of the potential against a difference of the next lower one.
pub fn potential_derivatives(pot: &PlanckPotential, rng: &mut ChaCha8Rng) -> Measurement {
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let (x, y) = (rng.gen_range(0.3..2.0), rng.gen_range(0.3..2.0));
        let Ok(j) = pot.eval(x, y) else { return Measurement::failed(format!("potential at ({x}, {y})")) };
        let slot =
            |x: f64, y: f64, i: usize| pot.eval(x, y).map(|j| [j.phi, j.x, j.y, j.xx, j.xy][i]).unwrap_or(f64::NAN);
        // (exact, lower slot, axis)
        let checks = [
            (j.x, 0, 0),
            (j.y, 0, 1),
            (j.xx, 1, 0),
            (j.xy, 1, 1),
            (j.yy, 2, 1),
            (j.xxx, 3, 0),
            (j.xxy, 3, 1),
            (j.xyy, 4, 1),
        ];
        for (exact, lower, axis) in checks {
            match fd_partial(|a, b| slot(a, b, lower), x, y, axis) {
                Ok(fd) => worst = worst.max(relative(exact, fd)),
                Err(e) => return Measurement::failed(e.to_string()),
            }
        }
    }
    Measurement::residual(worst, "50 points, 8 partials".into())
}

/// Exact partials of the constant-type solutions against finite differences.
pub fn quotsol_derivatives(rng: &mut ChaCha8Rng) -> Measurement {
    let mut worst: f64 = 0.0;
    for n in [1u32, 3, 4, 5] {
        for (c1, c2, omega) in QUOTSOL_CONSTANTS {
            let fields: [Box<dyn TresseField>; 2] =
                match (quotsol1(c1, c2, n, omega, Branch::Negative), quotsol2(c1, c2, n, omega, Branch::Positive)) {
                    (Ok(a), Ok(b)) => [Box::new(a), Box::new(b)],
                    (Err(e), _) | (_, Err(e)) => return Measurement::failed(e.to_string()),
                };
            for field in &fields {
                let Some(points) = quotient_samples(field.as_ref(), rng, 10) else {
                    return Measurement::failed(format!("could not sample n = {n}"));
                };
                for (x, y) in points {
                    let Ok(j) = field.jet(x, y) else { return Measurement::failed(format!("jet at ({x}, {y})")) };
                    for (i, exact) in j.partials().iter().enumerate() {
                        for (axis, e) in exact.iter().enumerate() {
                            let value = |a: f64, b: f64| field.jet(a, b).map(|v| v.values()[i]).unwrap_or(f64::NAN);
                            match fd_partial(value, x, y, axis) {
                                Ok(fd) => worst = worst.max(relative(*e, fd)),
                                Err(e) => return Measurement::failed(e.to_string()),
                            }
                        }
                    }
                }
            }
        }
    }
    Measurement::residual(worst, "quotsol1, quotsol2; n in {1, 3, 4, 5}".into())
}

/// Exact first derivatives and `θ_aa` of the solution families against
/// finite differences.
pub fn solution_derivatives(gas: &GasParams, families: &[Family], quad_tol: f64, rng: &mut ChaCha8Rng) -> Measurement {
    let mut worst: f64 = 0.0;
    for &fam in families {
        let sol = match family_solution(gas, fam, [1.0, 2.0, 0.2, 0.1, -0.1], quad_tol) {
            Ok(s) => s,
            Err(e) => return Measurement::failed(e),
        };
        let (lo, hi) = sol.time_interval();
        let mid = 0.5 * (lo + hi);
        let mut checked = 0;
        for _ in 0..10_000 {
            if checked == 15 {
                break;
            }
            let (t, a) = (mid + 0.6 * (hi - mid) * rng.gen_range(-1.0..1.0), rng.gen_range(0.5..3.0));
            if !sol.is_valid(t, a) {
                continue;
            }
            checked += 1;
            let Ok(j) = sol.jet(t, a) else { return Measurement::failed(format!("jet at ({t}, {a})")) };
            let value = |s: f64, b: f64, i: usize| sol.jet(s, b).map(|v| [v.u, v.rho, v.theta, v.theta_a][i]);
            let fd_t = |i: usize| fd_derivative(|s| value(s, a, i).unwrap_or(f64::NAN), t, 1, default_step(1, t));
            let fd_a = |i: usize| fd_derivative(|b| value(t, b, i).unwrap_or(f64::NAN), a, 1, default_step(1, a));
            let mut pairs = vec![
                (j.u_t, fd_t(0)),
                (j.u_a, fd_a(0)),
                (j.rho_t, fd_t(1)),
                (j.rho_a, fd_a(1)),
                (j.theta_t, fd_t(2)),
                (j.theta_a, fd_a(2)),
            ];
            if let Some(taa) = j.theta_aa {
                pairs.push((taa, fd_a(3)));
            }
            for (exact, fd) in pairs {
                match fd {
                    Ok(fd) => worst = worst.max(relative(exact, fd)),
                    Err(e) => return Measurement::failed(e.to_string()),
                }
            }
        }
    }
    Measurement::residual(worst, format!("{} families, 15 points each", families.len()))
}

fn planar_orbit(start: (f64, f64), s_end: f64, tol: f64) -> Result<Trajectory, String> {
    let p = ReducedParams::new(2.0, -3.0).map_err(|e| e.to_string())?;
    let field = |_s: f64, z: &[f64]| planar_field(&p, z[0], z[1]).to_vec();
    ode_solve(field, 0.0, &[start.0, start.1], s_end, &OdeOptions::with_tol(tol), None).map_err(|e| e.to_string())
}

/// Largest gap between solutions at tolerances 1e-6 and 1e-9 of the planar
/// field with (A, B) = (2, -3), on 201 points of each test orbit.
pub fn ode_self_convergence() -> Measurement {
    let mut worst: f64 = 0.0;
    for (start, s_end) in [((4.0, 0.0), 1.0), ((4.0, 0.0), -5.0), ((1.05, 1.05), 10.0)] {
        let (coarse, fine) = match (planar_orbit(start, s_end, 1e-6), planar_orbit(start, s_end, 1e-9)) {
            (Ok(c), Ok(f)) => (c, f),
            (Err(e), _) | (_, Err(e)) => return Measurement::failed(e),
        };
        for i in 0..=200 {
            let s = s_end * i as f64 / 200.0;
            match (coarse.eval(s), fine.eval(s)) {
                (Some(c), Some(f)) => worst = c.iter().zip(&f).fold(worst, |m, (a, b)| m.max((a - b).abs())),
                _ => return Measurement::failed(format!("no dense output at s = {s}")),
            }
        }
    }
    Measurement::residual(worst, "orbits from (4, 0) and (1.05, 1.05)".into())
}

/// Distance from the centre (1, 1) of the orbit through (1.05, 1.05) for
/// `s ∈ [0, 50]`; the residual is how far the orbit strays outside the
/// annulus (zero when it stays inside).
pub fn centre_annulus() -> Measurement {
    let p = match ReducedParams::new(2.0, -3.0) {
        Ok(p) => p,
        Err(e) => return Measurement::failed(e.to_string()),
    };
    let traj = match integrate_trajectory(&p, (1.05, 1.05), 50.0, 1e-11, None) {
        Ok(t) => t,
        Err(e) => return Measurement::failed(e.to_string()),
    };
    let (lo, hi) = traj
        .samples(5001)
        .iter()
        .map(|&(_, y, n)| (y - 1.0).hypot(n - 1.0))
        .fold((f64::INFINITY, 0.0f64), |(l, h), d| (l.min(d), h.max(d)));
    let (inner, outer) = CENTRE_ANNULUS;
    Measurement {
        max_residual: (inner - lo).max(hi - outer).max(0.0),
        consistent: traj.termination == Termination::ReachedSMax,
        detail: format!("distance in [{lo:.6}, {hi:.6}]"),
    }
}
