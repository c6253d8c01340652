//! The Euler system on the curve `z = λa²`:
//!
//! ```text
//! ρ(u_t + u u_a) + p_a + 2ρgλa = 0
//! ρ_t + (ρu)_a = 0
//! ρθ(s_t + u s_a) − k θ_aa = 0
//! ```
//!
//! with `p`, `s` taken from a Planck potential, plus the two closed-form
//! solution families obtained from constant-type quotient solutions.

use crate::numerics::{default_step, fd_derivative, quadrature, NumericsError};
use crate::thermo::{entropy_gradient, pressure_gradient, GasParams, PlanckPotential, ThermoError};
use serde::Serialize;
use std::f64::consts::FRAC_PI_2;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EulerError {
    #[error(transparent)]
    Thermo(#[from] ThermoError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("(t = {t}, a = {a}) is outside the validity domain of the field")]
    OutsideValidity { t: f64, a: f64 },
    #[error("field does not provide {0}")]
    DerivativeUnavailable(&'static str),
    #[error("invalid solution constants: {0}")]
    InvalidConstants(String),
}

/// Values and first derivatives of `(u, ρ, θ)` at one point, plus `θ_aa`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct FlowJet {
    pub u: f64,
    pub u_t: f64,
    pub u_a: f64,
    pub rho: f64,
    pub rho_t: f64,
    pub rho_a: f64,
    pub theta: f64,
    pub theta_t: f64,
    pub theta_a: f64,
    pub theta_aa: Option<f64>,
}

/// An evaluable flow `(u, ρ, θ)(t, a)`.
pub trait FlowField: Sync {
    fn jet(&self, t: f64, a: f64) -> Result<FlowJet, EulerError>;
    fn is_valid(&self, t: f64, a: f64) -> bool;
}

/// Spatially and temporally constant state.
#[derive(Debug, Clone, Copy)]
pub struct ConstantFlow {
    pub u: f64,
    pub rho: f64,
    pub theta: f64,
}

impl FlowField for ConstantFlow {
    fn jet(&self, _t: f64, _a: f64) -> Result<FlowJet, EulerError> {
        Ok(FlowJet { u: self.u, rho: self.rho, theta: self.theta, theta_aa: Some(0.0), ..FlowJet::default() })
    }

    fn is_valid(&self, _t: f64, _a: f64) -> bool {
        self.rho > 0.0 && self.theta > 0.0
    }
}

/// Flow given by a closure returning `(u, ρ, θ)`; derivatives by finite differences.
pub struct FnFlow<F> {
    f: F,
}

impl<F> FnFlow<F>
where
    F: Fn(f64, f64) -> (f64, f64, f64) + Sync,
{
    pub fn new(f: F) -> Self {
        Self { f }
    }
}

impl<F> FlowField for FnFlow<F>
where
    F: Fn(f64, f64) -> (f64, f64, f64) + Sync,
{
    fn jet(&self, t: f64, a: f64) -> Result<FlowJet, EulerError> {
        if !self.is_valid(t, a) {
            return Err(EulerError::OutsideValidity { t, a });
        }
        let (u, rho, theta) = (self.f)(t, a);
        let dt = |pick: fn((f64, f64, f64)) -> f64| fd_derivative(|s| pick((self.f)(s, a)), t, 1, default_step(1, t));
        let da = |pick: fn((f64, f64, f64)) -> f64| fd_derivative(|s| pick((self.f)(t, s)), a, 1, default_step(1, a));
        Ok(FlowJet {
            u,
            u_t: dt(|v| v.0)?,
            u_a: da(|v| v.0)?,
            rho,
            rho_t: dt(|v| v.1)?,
            rho_a: da(|v| v.1)?,
            theta,
            theta_t: dt(|v| v.2)?,
            theta_a: da(|v| v.2)?,
            theta_aa: Some(fd_derivative(|s| (self.f)(t, s).2, a, 2, default_step(2, a))?),
        })
    }

    fn is_valid(&self, t: f64, a: f64) -> bool {
        let (u, rho, theta) = (self.f)(t, a);
        u.is_finite() && rho > 0.0 && theta > 0.0
    }
}

/// Residuals `(r₁, r₂, r₃)` of the Euler system at `(t, a)`.
///
/// Pressure and entropy derivatives are chain-ruled through the exact
/// partials of the potential.
pub fn euler_residual(
    field: &dyn FlowField,
    gas: &GasParams,
    pot: &PlanckPotential,
    t: f64,
    a: f64,
) -> Result<[f64; 3], EulerError> {
    let j = field.jet(t, a)?;
    let theta_aa = j.theta_aa.ok_or(EulerError::DerivativeUnavailable("theta_aa"))?;
    Ok(euler_residual_jet(&j, theta_aa, gas, pot, a)?)
}

pub fn euler_residual_jet(
    j: &FlowJet,
    theta_aa: f64,
    gas: &GasParams,
    pot: &PlanckPotential,
    a: f64,
) -> Result<[f64; 3], ThermoError> {
    let pj = pot.eval(j.rho, j.theta)?;
    let r = gas.r();
    let (p_x, p_y) = pressure_gradient(&pj, r, j.rho, j.theta);
    let p_a = p_x * j.rho_a + p_y * j.theta_a;
    let r1 = j.rho * (j.u_t + j.u * j.u_a) + p_a + 2.0 * j.rho * gas.g() * gas.lambda() * a;
    let r2 = j.rho_t + j.rho_a * j.u + j.rho * j.u_a;
    let (s_x, s_y) = entropy_gradient(&pj, r, j.theta);
    let s_t = s_x * j.rho_t + s_y * j.theta_t;
    let s_a = s_x * j.rho_a + s_y * j.theta_a;
    let r3 = j.rho * j.theta * (s_t + j.u * s_a) - gas.k() * theta_aa;
    Ok([r1, r2, r3])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EulerSymbol {
    pub matrix: [[f64; 3]; 3],
    pub det_direct: f64,
    pub det_factored: f64,
}

/// Principal symbol at state `(u, ρ, θ)` and covector `(ξ₁, ξ₂)`.
pub fn euler_symbol(
    gas: &GasParams,
    pot: &PlanckPotential,
    state: (f64, f64, f64),
    xi: (f64, f64),
) -> Result<EulerSymbol, ThermoError> {
    let (u, rho, theta) = state;
    let (xi1, xi2) = xi;
    let pj = pot.eval(rho, theta)?;
    let r = gas.r();
    let k = gas.k();
    let conv = xi1 + u * xi2;
    let compress = rho * pj.xx + 2.0 * pj.x;
    let m = [
        [rho * conv, -r * rho * theta * xi2 * compress, -r * rho * rho * xi2 * (theta * pj.xy + pj.x)],
        [rho * xi2, conv, 0.0],
        [0.0, 0.0, -k * xi2 * xi2],
    ];
    let det_direct = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    let det_factored = -k * rho * xi2 * xi2 * (conv * conv + r * rho * theta * xi2 * xi2 * compress);
    Ok(EulerSymbol { matrix: m, det_direct, det_factored })
}

/// Characteristic speeds `ξ₁/ξ₂` of the acoustic factor, `u ± sqrt(−Rρθ(ρΦ_ρρ + 2Φ_ρ))`.
pub fn characteristic_speeds(
    gas: &GasParams,
    pot: &PlanckPotential,
    state: (f64, f64, f64),
) -> Result<Option<(f64, f64)>, ThermoError> {
    let (u, rho, theta) = state;
    let pj = pot.eval(rho, theta)?;
    let radicand = -gas.r() * rho * theta * (rho * pj.xx + 2.0 * pj.x);
    if radicand < 0.0 {
        return Ok(None);
    }
    let c = radicand.sqrt();
    Ok(Some((u - c, u + c)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Family {
    One,
    Two,
}

impl Family {
    pub fn number(&self) -> u8 {
        match self {
            Family::One => 1,
            Family::Two => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolutionConstants {
    pub c: [f64; 5],
    pub family: Family,
}

impl SolutionConstants {
    pub fn new(c: [f64; 5], family: Family) -> Result<Self, EulerError> {
        if c.iter().any(|v| !v.is_finite()) {
            return Err(EulerError::InvalidConstants("constants must be finite".into()));
        }
        if c[0] == 0.0 {
            return Err(EulerError::InvalidConstants("c1 must be nonzero".into()));
        }
        if c[1] <= 0.0 {
            return Err(EulerError::InvalidConstants("c2 must be positive".into()));
        }
        Ok(Self { c, family })
    }
}

/// One of the two closed-form solution families.
///
/// The inner antiderivatives are computed by quadrature anchored at
/// `t_ref = c₃/ω`; `c₄`, `c₅` absorb the anchor. Time is restricted to the
/// interval around `t_ref` on which `cos(c₃ − ωt) > 0`, shrunk by a guard
/// band of `10·tol` at each end.
#[derive(Debug, Clone)]
pub struct SolutionFamily {
    c: [f64; 5],
    family: Family,
    r: f64,
    n: f64,
    omega: f64,
    tol: f64,
    t_ref: f64,
    half_width: f64,
}

/// Family 1 (`ρ_a = 0`, `θ` affine in `a`).
pub fn solution_family_1(c: SolutionConstants, gas: &GasParams, tol: f64) -> Result<SolutionFamily, EulerError> {
    if c.family != Family::One {
        return Err(EulerError::InvalidConstants("constants are tagged for family 2".into()));
    }
    SolutionFamily::new(c, gas, tol)
}

/// Family 2 (`ρ` affine in `a`, `θ/ρ` independent of `a`); requires `n ≠ 2`.
pub fn solution_family_2(c: SolutionConstants, gas: &GasParams, tol: f64) -> Result<SolutionFamily, EulerError> {
    if c.family != Family::Two {
        return Err(EulerError::InvalidConstants("constants are tagged for family 1".into()));
    }
    if gas.n() == 2 {
        return Err(EulerError::InvalidConstants("family 2 requires n != 2".into()));
    }
    SolutionFamily::new(c, gas, tol)
}

impl SolutionFamily {
    fn new(c: SolutionConstants, gas: &GasParams, tol: f64) -> Result<Self, EulerError> {
        if !(tol > 0.0) {
            return Err(EulerError::InvalidConstants(format!("tolerance must be positive, got {tol}")));
        }
        let omega = gas.omega();
        Ok(Self {
            c: c.c,
            family: c.family,
            r: gas.r(),
            n: gas.n() as f64,
            omega,
            tol,
            t_ref: c.c[2] / omega,
            half_width: FRAC_PI_2 / omega,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn constants(&self) -> [f64; 5] {
        self.c
    }

    pub fn t_ref(&self) -> f64 {
        self.t_ref
    }

    /// Open time interval with the guard band removed.
    pub fn time_interval(&self) -> (f64, f64) {
        let guard = 10.0 * self.tol;
        (self.t_ref - self.half_width + guard, self.t_ref + self.half_width - guard)
    }

    fn time_ok(&self, t: f64) -> bool {
        let (lo, hi) = self.time_interval();
        t > lo && t < hi
    }

    fn cos_phase(&self, t: f64) -> f64 {
        (self.c[2] - self.omega * t).cos()
    }

    /// `c₁ c₂^{−(n+2)/2n} ω^{(n+2)/n}`.
    fn q(&self) -> f64 {
        self.c[0] * (self.omega / self.c[1].sqrt()).powf(1.0 + 2.0 / self.n)
    }

    /// `∫_{t_ref}^{t} cos^{−2/n}(c₃ − ωτ) dτ`
    pub fn integral_cos_power(&self, t: f64) -> Result<f64, EulerError> {
        let n = self.n;
        Ok(quadrature(|s| self.cos_phase(s).powf(-2.0 / n), self.t_ref, t, self.tol * 1e-3)?)
    }

    /// `f(t) = −R Q (∫cos^{−2/n} + c₄) / cos(c₃ − ωt)`.
    pub fn f(&self, t: f64) -> Result<f64, EulerError> {
        let i1 = self.integral_cos_power(t)?;
        Ok(self.f_from(i1, t))
    }

    fn f_from(&self, i1: f64, t: f64) -> f64 {
        -self.r * self.q() * (i1 + self.c[3]) / self.cos_phase(t)
    }

    /// `∫_{t_ref}^{t} f(τ) / cos(c₃ − ωτ) dτ`, nested quadrature.
    pub fn integral_f_over_cos(&self, t: f64) -> Result<f64, EulerError> {
        let inner_tol = self.tol * 1e-3;
        let n = self.n;
        // an inner failure surfaces as a non-finite sample of the outer integrand
        let integrand = |s: f64| match quadrature(|v| self.cos_phase(v).powf(-2.0 / n), self.t_ref, s, inner_tol) {
            Ok(i1) => self.f_from(i1, s) / self.cos_phase(s),
            Err(_) => f64::NAN,
        };
        Ok(quadrature(integrand, self.t_ref, t, self.tol)?)
    }

    fn jet_family_1(&self, t: f64, a: f64) -> Result<FlowJet, EulerError> {
        let (w, n) = (self.omega, self.n);
        let [c1, c2, _, _, c5] = self.c;
        let phase = self.c[2] - w * t;
        let (sn, cs) = phase.sin_cos();
        let tn = sn / cs;
        let q = self.q();
        let i1 = self.integral_cos_power(t)?;
        let i2 = self.integral_f_over_cos(t)?;
        let f = self.f_from(i1, t);
        let fp = -self.r * q * cs.powf(-1.0 - 2.0 / n) - w * tn * f;

        let rho = w / (c2.sqrt() * cs);
        let rho_t = -w * w * sn / (c2.sqrt() * cs * cs);
        let u = a * w * tn + f;
        let u_a = w * tn;
        let u_t = -a * w * w / (cs * cs) + fp;
        let bracket = q * i2 + c5;
        let rho_pow = rho.powf(1.0 + 2.0 / n);
        let theta = c1 * a * rho_pow - cs.powf(-2.0 / n) * bracket;
        let theta_a = c1 * rho_pow;
        let theta_t = c1 * a * (1.0 + 2.0 / n) * rho.powf(2.0 / n) * rho_t
            + (2.0 / n) * w * sn * cs.powf(-2.0 / n - 1.0) * bracket
            - cs.powf(-2.0 / n) * q * f / cs;
        Ok(FlowJet { u, u_t, u_a, rho, rho_t, rho_a: 0.0, theta, theta_t, theta_a, theta_aa: Some(0.0) })
    }

    fn jet_family_2(&self, t: f64, a: f64) -> Result<FlowJet, EulerError> {
        let (w, n) = (self.omega, self.n);
        let [c1, c2, _, _, c5] = self.c;
        let phase = self.c[2] - w * t;
        let (sn, cs) = phase.sin_cos();
        let tn = sn / cs;
        let q = self.q();
        let i1 = self.integral_cos_power(t)?;
        let i3 = 2.0 * self.integral_f_over_cos(t)?;
        let f = self.f_from(i1, t);
        let fp = -self.r * q * cs.powf(-1.0 - 2.0 / n) - w * tn * f;

        let kappa = c1 * w * w / c2;
        let u = a * w * tn + 2.0 * f;
        let u_a = w * tn;
        let u_t = -a * w * w / (cs * cs) + 2.0 * fp;
        let rho = kappa * (a / (cs * cs) - (i3 + c5) / cs);
        let rho_a = kappa / (cs * cs);
        let rho_t = kappa * (-2.0 * a * w * sn / (cs * cs * cs) - 2.0 * f / (cs * cs) + (i3 + c5) * w * sn / (cs * cs));
        let gfac = (c2.sqrt() * cs / w).powf((n - 2.0) / n);
        let gfac_t = gfac * (n - 2.0) / n * w * tn;
        Ok(FlowJet {
            u,
            u_t,
            u_a,
            rho,
            rho_t,
            rho_a,
            theta: rho * gfac,
            theta_t: rho_t * gfac + rho * gfac_t,
            theta_a: rho_a * gfac,
            theta_aa: Some(0.0),
        })
    }

    fn raw_jet(&self, t: f64, a: f64) -> Result<FlowJet, EulerError> {
        match self.family {
            Family::One => self.jet_family_1(t, a),
            Family::Two => self.jet_family_2(t, a),
        }
    }

    /// Lowest `a` with `ρ > 0` at time `t` (family 2 with `c₁ > 0`); the
    /// inequality flips for `c₁ < 0`.
    pub fn density_threshold(&self, t: f64) -> Result<Option<f64>, EulerError> {
        if self.family == Family::One {
            return Ok(None);
        }
        let i3 = 2.0 * self.integral_f_over_cos(t)?;
        Ok(Some(self.cos_phase(t) * (i3 + self.c[4])))
    }
}

impl FlowField for SolutionFamily {
    fn jet(&self, t: f64, a: f64) -> Result<FlowJet, EulerError> {
        if !self.time_ok(t) || !a.is_finite() {
            return Err(EulerError::OutsideValidity { t, a });
        }
        let j = self.raw_jet(t, a)?;
        if !(j.rho > 0.0 && j.theta > 0.0) {
            return Err(EulerError::OutsideValidity { t, a });
        }
        Ok(j)
    }

    fn is_valid(&self, t: f64, a: f64) -> bool {
        self.jet(t, a).is_ok()
    }
}

/// First-order differential invariants `(x, y, K, L, M, N) =
/// (ρ, θ, u_a, ρ_a, θ_a, θ_t + u θ_a)` of a flow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlowInvariants {
    pub x: f64,
    pub y: f64,
    pub k: f64,
    pub l: f64,
    pub m: f64,
    pub n: f64,
}

pub fn invariants_of_flow(field: &dyn FlowField, t: f64, a: f64) -> Result<FlowInvariants, EulerError> {
    if !field.is_valid(t, a) {
        return Err(EulerError::OutsideValidity { t, a });
    }
    let j = field.jet(t, a)?;
    Ok(invariants_of_jet(&j))
}

pub fn invariants_of_jet(j: &FlowJet) -> FlowInvariants {
    FlowInvariants { x: j.rho, y: j.theta, k: j.u_a, l: j.rho_a, m: j.theta_a, n: j.theta_t + j.u * j.theta_a }
}

/// `ρ_a θ_t − ρ_t θ_a`; the quotient chart needs it nonzero.
pub fn chart_jacobian(j: &FlowJet) -> f64 {
    j.rho_a * j.theta_t - j.rho_t * j.theta_a
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gas() -> GasParams {
        GasParams::new(1.0, 3, 0.1, 1.0, 0.5).unwrap()
    }

    #[test]
    fn constant_flow_leaves_gravity_term() {
        let g = GasParams::new(1.3, 3, 0.2, 9.8, 0.25).unwrap();
        let pot = PlanckPotential::ideal_gas(3).unwrap();
        let field = ConstantFlow { u: 0.7, rho: 1.5, theta: 2.0 };
        for &a in &[-2.0, 0.5, 3.0] {
            let r = euler_residual(&field, &g, &pot, 0.3, a).unwrap();
            assert!((r[0] - 2.0 * 1.5 * 9.8 * 0.25 * a).abs() < 1e-12);
            assert_eq!(r[1], 0.0);
            assert_eq!(r[2], 0.0);
        }
    }

    #[test]
    fn hydrostatic_isothermal_balance() {
        let g = GasParams::new(1.3, 3, 0.2, 2.0, 0.25).unwrap();
        let pot = PlanckPotential::ideal_gas(3).unwrap();
        let (rho0, theta0) = (1.2, 1.7);
        let field = FnFlow::new(move |_t, a| (0.0, rho0 * (-2.0 * 0.25 * a * a / (1.3 * theta0)).exp(), theta0));
        for &a in &[-1.5, -0.2, 0.0, 0.9, 2.0] {
            let r = euler_residual(&field, &g, &pot, 0.0, a).unwrap();
            for v in r {
                assert!(v.abs() < 1e-8, "{r:?} at a = {a}");
            }
        }
    }

    struct NoSecondDerivative;
    impl FlowField for NoSecondDerivative {
        fn jet(&self, _t: f64, _a: f64) -> Result<FlowJet, EulerError> {
            Ok(FlowJet { rho: 1.0, theta: 1.0, theta_aa: None, ..FlowJet::default() })
        }
        fn is_valid(&self, _t: f64, _a: f64) -> bool {
            true
        }
    }

    #[test]
    fn missing_theta_aa() {
        let pot = PlanckPotential::ideal_gas(3).unwrap();
        let r = euler_residual(&NoSecondDerivative, &gas(), &pot, 0.0, 0.0);
        assert_eq!(r, Err(EulerError::DerivativeUnavailable("theta_aa")));
    }

    #[test]
    fn symbol_determinant_forms() {
        let g = GasParams::new(1.0, 3, 0.3, 1.0, 0.5).unwrap();
        let pot = PlanckPotential::ideal_gas(3).unwrap();
        let s = euler_symbol(&g, &pot, (1.0, 1.0, 1.0), (1.0, 1.0)).unwrap();
        assert!((s.det_direct - s.det_factored).abs() <= 1e-12 * s.det_factored.abs());
        let s = euler_symbol(&g, &pot, (0.4, 2.0, 0.5), (1.0, 0.0)).unwrap();
        assert_eq!(s.det_direct, 0.0);
        assert_eq!(s.det_factored, 0.0);
    }

    #[test]
    fn ideal_gas_sound_speed() {
        let g = GasParams::new(1.7, 3, 0.3, 1.0, 0.5).unwrap();
        let pot = PlanckPotential::ideal_gas(3).unwrap();
        let (lo, hi) = characteristic_speeds(&g, &pot, (0.5, 2.0, 3.0)).unwrap().unwrap();
        let c = (1.7f64 * 3.0).sqrt();
        assert!((lo - (0.5 - c)).abs() < 1e-14 && (hi - (0.5 + c)).abs() < 1e-14);
        // the speeds zero the acoustic factor of the symbol
        for xi1 in [-lo, -hi] {
            let s = euler_symbol(&g, &pot, (0.5, 2.0, 3.0), (xi1, 1.0)).unwrap();
            assert!(s.det_factored.abs() < 1e-12);
        }
    }

    #[test]
    fn family_1_reference_point() {
        let c = SolutionConstants::new([1.0, 2.0, 0.0, 0.3, 0.0], Family::One).unwrap();
        let fam = solution_family_1(c, &gas(), 1e-10).unwrap();
        // at t_ref both integrals vanish: θ = c₁ a ρ^{1+2/n} − c₅
        let j = fam.jet(0.0, 1.0).unwrap();
        let rho = 1.0 / 2f64.sqrt();
        assert!((j.rho - rho).abs() < 1e-15);
        assert!((j.u - fam.f(0.0).unwrap()).abs() < 1e-15);
        assert!((j.theta - rho.powf(5.0 / 3.0)).abs() < 1e-14);
        assert!(!fam.is_valid(0.0, 0.0));
    }

    #[test]
    fn family_validity_interval() {
        let c = SolutionConstants::new([1.0, 2.0, 0.5, 0.0, 0.0], Family::One).unwrap();
        let fam = solution_family_1(c, &gas(), 1e-10).unwrap();
        let (lo, hi) = fam.time_interval();
        assert!((lo - (0.5 - FRAC_PI_2)).abs() < 1e-8);
        assert!((hi - (0.5 + FRAC_PI_2)).abs() < 1e-8);
        assert!(matches!(fam.jet(hi + 0.1, 0.0), Err(EulerError::OutsideValidity { .. })));
        assert!(!fam.is_valid(lo - 1.0, 0.0));
    }

    #[test]
    fn family_2_rejects_n_equal_two() {
        let g = GasParams::new(1.0, 2, 0.1, 1.0, 0.5).unwrap();
        let c = SolutionConstants::new([1.0, 2.0, 0.0, 0.0, 0.0], Family::Two).unwrap();
        let err = solution_family_2(c, &g, 1e-10).unwrap_err();
        assert!(err.to_string().contains("n != 2"));
    }

    #[test]
    fn constants_validation() {
        assert!(SolutionConstants::new([0.0, 2.0, 0.0, 0.0, 0.0], Family::One).is_err());
        assert!(SolutionConstants::new([1.0, -2.0, 0.0, 0.0, 0.0], Family::One).is_err());
        let c = SolutionConstants::new([1.0, 2.0, 0.0, 0.0, 0.0], Family::One).unwrap();
        assert!(solution_family_2(c, &gas(), 1e-10).is_err());
    }

    #[test]
    fn constant_flow_invariants() {
        let inv = invariants_of_flow(&ConstantFlow { u: 2.0, rho: 1.5, theta: 0.5 }, 0.0, 1.0).unwrap();
        assert_eq!(inv, FlowInvariants { x: 1.5, y: 0.5, k: 0.0, l: 0.0, m: 0.0, n: 0.0 });
    }

    #[test]
    fn mass_residual_matches_product_rule() {
        let pot = PlanckPotential::ideal_gas(3).unwrap();
        let field = FnFlow::new(|t: f64, a: f64| (t.sin() + a * a, 2.0 + (a * t).cos(), 1.0 + a * a));
        for &(t, a) in &[(0.1, 0.3), (1.0, -0.7), (2.0, 1.1)] {
            let r = euler_residual(&field, &gas(), &pot, t, a).unwrap();
            let j = field.jet(t, a).unwrap();
            let flux_a = fd_derivative(
                |s| {
                    let (u, rho, _) = (t.sin() + s * s, 2.0 + (s * t).cos(), 0.0);
                    rho * u
                },
                a,
                1,
                default_step(1, a),
            )
            .unwrap();
            assert!((r[1] - (j.rho_t + flux_a)).abs() < 1e-10);
        }
    }
}
