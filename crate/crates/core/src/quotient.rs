//! The quotient of the Euler system by its symmetry algebra, written in the
//! Tresse coordinates `(x, y, K, L, M, N) = (ρ, θ, u_a, ρ_a, θ_a, θ_t + uθ_a)`:
//! four first-order PDEs for `K, L, M, N` as functions of `(x, y)`.
//!
//! The fourth equation carries the factor `xM` on its `K² + ω²` term; see
//! [`quotient_residual_jet`].

use crate::numerics::{fd_partial, NumericsError};
use crate::thermo::{GasParams, PlanckPotential, PotentialJet, ThermoError};
use serde::Serialize;
use thiserror::Error;

/// Relative threshold for the chart conditions `M ≠ 0`, `xKM + LN ≠ 0`.
pub const NONDEGENERACY_TOL: f64 = 1e-10;
/// `|L|` below this rejects the alternative fourth equation.
pub const ALT_FORM_MIN_L: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuotientError {
    #[error(transparent)]
    Thermo(#[from] ThermoError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("({x}, {y}) is outside the domain of the field")]
    OutsideDomain { x: f64, y: f64 },
    #[error("quotient chart degenerates at ({x}, {y}): {what}")]
    NondegeneracyViolated { x: f64, y: f64, what: &'static str },
    #[error("alternative fourth equation needs L != 0, got L = {l}")]
    AltFormUnavailable { l: f64 },
    #[error("empty domain: {0}")]
    EmptyDomain(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Point values and first partials of `K, L, M, N`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct TresseJet {
    pub x: f64,
    pub y: f64,
    pub k: f64,
    pub l: f64,
    pub m: f64,
    pub n: f64,
    pub k_x: f64,
    pub k_y: f64,
    pub l_x: f64,
    pub l_y: f64,
    pub m_x: f64,
    pub m_y: f64,
    pub n_x: f64,
    pub n_y: f64,
}

impl TresseJet {
    pub fn values(&self) -> [f64; 4] {
        [self.k, self.l, self.m, self.n]
    }

    /// `[[K_x, K_y], [L_x, L_y], [M_x, M_y], [N_x, N_y]]`
    pub fn partials(&self) -> [[f64; 2]; 4] {
        [[self.k_x, self.k_y], [self.l_x, self.l_y], [self.m_x, self.m_y], [self.n_x, self.n_y]]
    }

    pub fn with_partials(mut self, d: [[f64; 2]; 4]) -> Self {
        [self.k_x, self.k_y] = d[0];
        [self.l_x, self.l_y] = d[1];
        [self.m_x, self.m_y] = d[2];
        [self.n_x, self.n_y] = d[3];
        self
    }
}

/// `(K, L, M, N)` as functions of `(x, y)`.
pub trait TresseField: Sync {
    fn jet(&self, x: f64, y: f64) -> Result<TresseJet, QuotientError>;
    fn in_domain(&self, x: f64, y: f64) -> bool;
}

/// Field from a closure returning `[K, L, M, N]`; partials by finite differences.
pub struct FnTresseField<F> {
    f: F,
}

impl<F> FnTresseField<F>
where
    F: Fn(f64, f64) -> [f64; 4] + Sync,
{
    pub fn new(f: F) -> Self {
        Self { f }
    }
}

impl<F> TresseField for FnTresseField<F>
where
    F: Fn(f64, f64) -> [f64; 4] + Sync,
{
    fn jet(&self, x: f64, y: f64) -> Result<TresseJet, QuotientError> {
        if !self.in_domain(x, y) {
            return Err(QuotientError::OutsideDomain { x, y });
        }
        let [k, l, m, n] = (self.f)(x, y);
        let mut d = [[0.0; 2]; 4];
        for (i, row) in d.iter_mut().enumerate() {
            for (axis, slot) in row.iter_mut().enumerate() {
                *slot = fd_partial(|a, b| (self.f)(a, b)[i], x, y, axis)?;
            }
        }
        Ok(TresseJet { x, y, k, l, m, n, ..TresseJet::default() }.with_partials(d))
    }

    fn in_domain(&self, x: f64, y: f64) -> bool {
        x > 0.0 && y > 0.0 && (self.f)(x, y).iter().all(|v| v.is_finite())
    }
}

/// Sign of the square root defining `K` in the constant-type solutions.
/// Both signs solve the quotient system (it is invariant under `(K, N) → (−K, −N)`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    Positive,
    Negative,
}

impl Branch {
    pub fn sign(&self) -> f64 {
        match self {
            Branch::Positive => 1.0,
            Branch::Negative => -1.0,
        }
    }

    pub fn of(v: f64) -> Self {
        if v < 0.0 {
            Branch::Negative
        } else {
            Branch::Positive
        }
    }
}

/// `L = 0, M = c₁x^{1+2/n}, K = ±√(c₂x² − ω²), N = −(2y/n)K`.
#[derive(Debug, Clone, Copy)]
pub struct QuotSol1 {
    c1: f64,
    c2: f64,
    n: f64,
    omega: f64,
    branch: Branch,
}

/// `L = c₁(x/y)^{2n/(n−2)}, M = (y/x)L, K = ±√(c₂(x/y)^{2n/(n−2)} − ω²), N = −2Ky/n`.
#[derive(Debug, Clone, Copy)]
pub struct QuotSol2 {
    c1: f64,
    c2: f64,
    n: f64,
    omega: f64,
    branch: Branch,
}

fn check_constants(c1: f64, c2: f64, n: u32, omega: f64) -> Result<(), QuotientError> {
    if !(c1.is_finite() && c1 != 0.0) {
        return Err(QuotientError::InvalidParameter(format!("c1 must be finite and nonzero, got {c1}")));
    }
    if !(c2 > 0.0) || !c2.is_finite() {
        return Err(QuotientError::EmptyDomain(format!("c2 = {c2} leaves no point with K real")));
    }
    if n == 0 {
        return Err(QuotientError::InvalidParameter("n must be at least 1".into()));
    }
    if !(omega >= 0.0) || !omega.is_finite() {
        return Err(QuotientError::InvalidParameter(format!("omega must be non-negative, got {omega}")));
    }
    Ok(())
}

pub fn quotsol1(c1: f64, c2: f64, n: u32, omega: f64, branch: Branch) -> Result<QuotSol1, QuotientError> {
    check_constants(c1, c2, n, omega)?;
    Ok(QuotSol1 { c1, c2, n: n as f64, omega, branch })
}

pub fn quotsol2(c1: f64, c2: f64, n: u32, omega: f64, branch: Branch) -> Result<QuotSol2, QuotientError> {
    check_constants(c1, c2, n, omega)?;
    if n == 2 {
        return Err(QuotientError::InvalidParameter("quotsol2 requires n != 2".into()));
    }
    Ok(QuotSol2 { c1, c2, n: n as f64, omega, branch })
}

impl QuotSol1 {
    fn radicand(&self, x: f64) -> f64 {
        self.c2 * x * x - self.omega * self.omega
    }

    /// Smallest admissible `x`, `ω/√c₂`.
    pub fn x_min(&self) -> f64 {
        self.omega / self.c2.sqrt()
    }
}

impl TresseField for QuotSol1 {
    fn jet(&self, x: f64, y: f64) -> Result<TresseJet, QuotientError> {
        if !self.in_domain(x, y) {
            return Err(QuotientError::OutsideDomain { x, y });
        }
        let n = self.n;
        let k = self.branch.sign() * self.radicand(x).sqrt();
        let k_x = self.c2 * x / k;
        Ok(TresseJet {
            x,
            y,
            k,
            l: 0.0,
            m: self.c1 * x.powf(1.0 + 2.0 / n),
            n: -2.0 * y * k / n,
            k_x,
            k_y: 0.0,
            l_x: 0.0,
            l_y: 0.0,
            m_x: self.c1 * (1.0 + 2.0 / n) * x.powf(2.0 / n),
            m_y: 0.0,
            n_x: -2.0 * y * k_x / n,
            n_y: -2.0 * k / n,
        })
    }

    fn in_domain(&self, x: f64, y: f64) -> bool {
        x > 0.0 && y > 0.0 && self.radicand(x) > 0.0
    }
}

impl QuotSol2 {
    fn exponent(&self) -> f64 {
        2.0 * self.n / (self.n - 2.0)
    }

    fn power(&self, x: f64, y: f64) -> f64 {
        (x / y).powf(self.exponent())
    }

    fn radicand(&self, x: f64, y: f64) -> f64 {
        self.c2 * self.power(x, y) - self.omega * self.omega
    }
}

impl TresseField for QuotSol2 {
    fn jet(&self, x: f64, y: f64) -> Result<TresseJet, QuotientError> {
        if !self.in_domain(x, y) {
            return Err(QuotientError::OutsideDomain { x, y });
        }
        let (n, e) = (self.n, self.exponent());
        let p = self.power(x, y);
        let l = self.c1 * p;
        let m = l * y / x;
        let k = self.branch.sign() * self.radicand(x, y).sqrt();
        let k_x = self.c2 * e * p / (2.0 * k * x);
        let k_y = -self.c2 * e * p / (2.0 * k * y);
        Ok(TresseJet {
            x,
            y,
            k,
            l,
            m,
            n: -2.0 * k * y / n,
            k_x,
            k_y,
            l_x: e * l / x,
            l_y: -e * l / y,
            m_x: (e - 1.0) * m / x,
            m_y: -(e - 1.0) * m / y,
            n_x: -2.0 * y * k_x / n,
            n_y: -2.0 * (k + y * k_y) / n,
        })
    }

    fn in_domain(&self, x: f64, y: f64) -> bool {
        x > 0.0 && y > 0.0 && self.radicand(x, y) > 0.0
    }
}

fn check_nondegenerate(j: &TresseJet) -> Result<(), QuotientError> {
    let scale = [j.k, j.l, j.n, 1.0].iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if !(j.m.abs() > NONDEGENERACY_TOL * scale) {
        return Err(QuotientError::NondegeneracyViolated { x: j.x, y: j.y, what: "M = 0" });
    }
    let a = j.x * j.k * j.m;
    let b = j.l * j.n;
    if !((a + b).abs() > NONDEGENERACY_TOL * (a.abs() + b.abs())) || a + b == 0.0 {
        return Err(QuotientError::NondegeneracyViolated { x: j.x, y: j.y, what: "xKM + LN = 0" });
    }
    Ok(())
}

/// Residuals `(q₁, q₂, q₃, q₄)` of the quotient system for a field.
pub fn quotient_residual(
    f: &dyn TresseField,
    gas: &GasParams,
    pot: &PlanckPotential,
    x: f64,
    y: f64,
) -> Result<[f64; 4], QuotientError> {
    let j = f.jet(x, y)?;
    check_nondegenerate(&j)?;
    let pj = pot.eval(x, y)?;
    Ok(quotient_residual_jet(&j, &pj, gas.r(), gas.k(), gas.omega_sq()))
}

/// The bracket shared by equations 3 and 4 (everything multiplying `RL` resp. `RMx`).
fn third_order_bracket(j: &TresseJet, p: &PotentialJet) -> f64 {
    let TresseJet { x, y, l, m, l_x, l_y, m_x, m_y, .. } = *j;
    x * y * (p.xxx * l * l + 2.0 * p.xxy * m * l + p.xyy * m * m)
        + (x * y * l * l_x + x * y * m * l_y + 2.0 * x * l * m + 3.0 * y * l * l) * p.xx
        + (x * y * l * m_x + m * (x * y * m_y + 2.0 * x * m + 3.0 * y * l)) * p.xy
        + (2.0 * y * l * l_x + 2.0 * y * m * l_y + x * l * m_x + m * (x * m_y + 3.0 * l)) * p.x
}

/// Unchecked residuals at a jet.
///
/// The fourth equation ends in `−xM(K² + ω²)`. Without the `M` factor neither
/// constant-type solution satisfies it, and the zeroth-order term of the
/// virial expansion (which carries `M₀(K₀² + ω²)`) is not recovered.
pub fn quotient_residual_jet(j: &TresseJet, p: &PotentialJet, r: f64, k_heat: f64, omega_sq: f64) -> [f64; 4] {
    let TresseJet { x, y, k, l, m, n, k_x, k_y, l_x, l_y, m_x, m_y, n_x, n_y } = *j;
    let q1 = x * k * m_x - n * m_y + l * n_x + m * (n_y - k);
    let q2 = r * x * y * (x * k * (p.x + y * p.xy) - n * (2.0 * p.y + y * p.yy)) + k_heat * (l * m_x + m * m_y);
    let br = third_order_bracket(j, p);
    let chart = x * k * m + l * n;
    let q3 = r * l * br + x * k * k * l_x - k * n * l_y - chart * k_y - 3.0 * l * k * k - omega_sq * l;
    let q4 =
        r * m * x * br + n * n * l_y - x * k * n * l_x + chart * x * k_x + 2.0 * l * k * n - x * m * (k * k + omega_sq);
    [q1, q2, q3, q4]
}

/// `x(MK_y − KL_x + LK_x) + NL_y + 2KL`, the fourth equation solved for
/// the `K` derivatives.
///
/// Satisfies `xM·q₃ − L·q₄ = −(xKM + LN)·alt` identically, so it vanishes on
/// solutions wherever `L ≠ 0`.
pub fn quotient_residual_alt4(f: &dyn TresseField, x: f64, y: f64) -> Result<f64, QuotientError> {
    let j = f.jet(x, y)?;
    if !(j.l.abs() >= ALT_FORM_MIN_L) {
        return Err(QuotientError::AltFormUnavailable { l: j.l });
    }
    Ok(alt4_jet(&j))
}

pub fn alt4_jet(j: &TresseJet) -> f64 {
    j.x * (j.m * j.k_y - j.k * j.l_x + j.l * j.k_x) + j.n * j.l_y + 2.0 * j.k * j.l
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuotientSymbol {
    /// Rows ordered `q₂, q₁, q₃, q₄`, columns `K, L, M, N`.
    pub matrix: [[f64; 4]; 4],
    pub det_direct: f64,
    pub det_factored: f64,
}

/// Principal symbol of the quotient system at a jet and covector `(ξ₁, ξ₂)`.
///
/// Entry `B` (row 4, column `L`) has the factor `M` where the `L` column of
/// equation 4 is linearised; with `L` there the determinant would not factor.
pub fn quotient_symbol(
    j: &TresseJet,
    pot: &PlanckPotential,
    r: f64,
    k_heat: f64,
    xi: (f64, f64),
) -> Result<QuotientSymbol, QuotientError> {
    let p = pot.eval(j.x, j.y)?;
    Ok(quotient_symbol_jet(j, &p, r, k_heat, xi))
}

pub fn quotient_symbol_jet(j: &TresseJet, p: &PotentialJet, r: f64, k_heat: f64, xi: (f64, f64)) -> QuotientSymbol {
    let TresseJet { x, y, k, l, m, n, .. } = *j;
    let (xi1, xi2) = xi;
    let s = l * xi1 + m * xi2;
    let t = x * k * xi1 - n * xi2;
    let chart = x * k * m + l * n;
    let compress = x * p.xx + 2.0 * p.x;
    let mixed = y * p.xy + p.x;
    let a = r * y * l * s * compress + k * t;
    let b = r * y * x * m * s * compress - n * t;
    let matrix = [
        [0.0, 0.0, k_heat * s, 0.0],
        [0.0, 0.0, t, s],
        [-chart * xi2, a, r * x * l * s * mixed, 0.0],
        [x * chart * xi1, b, r * x * x * m * s * mixed, 0.0],
    ];
    let det_factored = -k_heat * chart * s * s * (r * x * y * s * s * compress + t * t);
    QuotientSymbol { matrix, det_direct: det4(matrix), det_factored }
}

/// Determinant by Gaussian elimination with partial pivoting.
fn det4(mut a: [[f64; 4]; 4]) -> f64 {
    let mut det = 1.0;
    for col in 0..4 {
        let pivot = (col..4).max_by(|&i, &k| a[i][col].abs().total_cmp(&a[k][col].abs())).unwrap();
        if a[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col];
        for row in col + 1..4 {
            let factor = a[row][col] / a[col][col];
            for c in col..4 {
                a[row][c] -= factor * a[col][c];
            }
        }
    }
    det
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CharacteristicTag {
    Z1,
    Z2,
    Z3,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CharacteristicField {
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
    pub tag: CharacteristicTag,
}

/// `Z₁ = L∂x + M∂y` always; `Z₂,₃ = xK∂x − N∂y ± √(−Rxy(xΦ_xx + 2Φ_x))·Z₁`
/// when the radicand is non-negative.
pub fn characteristic_fields(
    f: &dyn TresseField,
    pot: &PlanckPotential,
    gas: &GasParams,
    x: f64,
    y: f64,
) -> Result<Vec<CharacteristicField>, QuotientError> {
    let j = f.jet(x, y)?;
    let p = pot.eval(x, y)?;
    let compress = x * p.xx + 2.0 * p.x;
    let mut out = vec![CharacteristicField { x, y, vx: j.l, vy: j.m, tag: CharacteristicTag::Z1 }];
    if compress <= 0.0 {
        let c = (-gas.r() * x * y * compress).sqrt();
        for (sign, tag) in [(1.0, CharacteristicTag::Z2), (-1.0, CharacteristicTag::Z3)] {
            out.push(CharacteristicField { x, y, vx: x * j.k + sign * c * j.l, vy: -j.n + sign * c * j.m, tag });
        }
    }
    Ok(out)
}

/// `Z(h) = v_x h_x + v_y h_y` at the field's base point, with `h` differentiated numerically.
pub fn first_integral_residual<H>(z: &CharacteristicField, h: H) -> Result<f64, QuotientError>
where
    H: Fn(f64, f64) -> f64,
{
    let h_x = fd_partial(&h, z.x, z.y, 0)?;
    let h_y = fd_partial(&h, z.x, z.y, 1)?;
    Ok(z.vx * h_x + z.vy * h_y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gas(omega: f64) -> GasParams {
        // ω² = 2λg with g = 1
        GasParams::new(1.0, 3, 0.1, 1.0, 0.5 * omega * omega).unwrap()
    }

    #[test]
    fn quotsol1_at_reference_point() {
        let f = quotsol1(1.0, 2.0, 3, 1.0, Branch::Positive).unwrap();
        let pot = PlanckPotential::ideal_gas(3).unwrap();
        let q = quotient_residual(&f, &gas(1.0), &pot, 1.0, 1.0).unwrap();
        assert!(q.iter().all(|v| v.abs() < 1e-9), "{q:?}");
        let j = f.jet(1.0, 1.0).unwrap();
        assert!((j.k_x - 2.0).abs() < 1e-15);
        assert!((j.n / j.k + 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn quotsol2_exponent_and_shape() {
        let f = quotsol2(1.0, 2.0, 4, 1.0, Branch::Positive).unwrap();
        let j = f.jet(1.5, 0.9).unwrap();
        assert!((j.l - (1.5f64 / 0.9).powi(4)).abs() < 1e-12);
        assert!((j.m * 1.5 - j.l * 0.9).abs() < 1e-12);
        assert!(matches!(quotsol2(1.0, 2.0, 2, 1.0, Branch::Positive), Err(QuotientError::InvalidParameter(_))));
        assert!(matches!(quotsol1(1.0, 0.0, 3, 1.0, Branch::Positive), Err(QuotientError::EmptyDomain(_))));
        assert!(matches!(quotsol1(0.0, 1.0, 3, 1.0, Branch::Positive), Err(QuotientError::InvalidParameter(_))));
    }

    #[test]
    fn outside_domain_is_rejected() {
        let f = quotsol1(1.0, 2.0, 3, 1.0, Branch::Positive).unwrap();
        assert!(matches!(f.jet(0.5, 1.0), Err(QuotientError::OutsideDomain { .. })));
    }

    #[test]
    fn q1_cancels_for_matching_field() {
        // K = N_y, M constant in x, N independent of x
        let j = TresseJet { x: 1.3, y: 0.7, k: 2.0, l: 5.0, m: 0.4, n: 1.0, n_y: 2.0, ..TresseJet::default() };
        let p = PlanckPotential::ideal_gas(3).unwrap().eval(1.3, 0.7).unwrap();
        assert_eq!(quotient_residual_jet(&j, &p, 1.0, 0.1, 1.0)[0], 0.0);
    }

    #[test]
    fn degenerate_charts_are_rejected() {
        let pot = PlanckPotential::ideal_gas(3).unwrap();
        let no_m = FnTresseField::new(|_x, _y| [1.0, 1.0, 0.0, 1.0]);
        assert!(matches!(
            quotient_residual(&no_m, &gas(1.0), &pot, 1.0, 1.0),
            Err(QuotientError::NondegeneracyViolated { what: "M = 0", .. })
        ));
        // xKM + LN = 1·1·1 + 1·(−1) = 0
        let flat = FnTresseField::new(|_x, _y| [1.0, 1.0, 1.0, -1.0]);
        assert!(matches!(
            quotient_residual(&flat, &gas(1.0), &pot, 1.0, 1.0),
            Err(QuotientError::NondegeneracyViolated { what: "xKM + LN = 0", .. })
        ));
    }

    #[test]
    fn alt4_for_constant_fields() {
        let zero = FnTresseField::new(|_x, _y| [0.0, 0.0, 1.0, 1.0]);
        assert!(matches!(quotient_residual_alt4(&zero, 1.0, 1.0), Err(QuotientError::AltFormUnavailable { .. })));
        let c = FnTresseField::new(|_x, _y| [0.5, 0.5, 1.0, 2.0]);
        assert!((quotient_residual_alt4(&c, 1.0, 1.0).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn symbol_at_vertical_covector() {
        let pot = PlanckPotential::ideal_gas(3).unwrap();
        let j = TresseJet { x: 1.2, y: 0.8, k: 0.3, l: -0.7, m: 1.1, n: 0.4, ..TresseJet::default() };
        let s = quotient_symbol(&j, &pot, 1.5, 0.2, (0.0, 1.0)).unwrap();
        let p = pot.eval(1.2, 0.8).unwrap();
        let chart = 1.2 * 0.3 * 1.1 + -0.7 * 0.4;
        let by_hand = -0.2
            * chart
            * 1.1f64.powi(2)
            * (1.5 * 1.2 * 0.8 * 1.1f64.powi(2) * (1.2 * p.xx + 2.0 * p.x) + 0.4f64.powi(2));
        assert!((s.det_factored - by_hand).abs() < 1e-13);
        assert!((s.det_direct - by_hand).abs() < 1e-12 * by_hand.abs());
        // Lξ₁ + Mξ₂ = 0
        let s = quotient_symbol(&j, &pot, 1.5, 0.2, (1.1, 0.7)).unwrap();
        assert!(s.det_factored.abs() < 1e-15 && s.det_direct.abs() < 1e-14);
    }

    #[test]
    fn characteristic_fields_ideal_gas() {
        let pot = PlanckPotential::ideal_gas(3).unwrap();
        let f = quotsol2(1.0, 2.0, 3, 1.0, Branch::Positive).unwrap();
        let zs = characteristic_fields(&f, &pot, &gas(1.0), 1.0, 4.0 / 5.0).unwrap();
        assert_eq!(zs.len(), 3);
        let j = f.jet(1.0, 0.8).unwrap();
        // radicand is R y for the ideal gas
        let c = 0.8f64.sqrt();
        assert!((zs[1].vx - zs[2].vx - 2.0 * c * j.l).abs() < 1e-12);
        assert!((zs[1].vy - zs[2].vy - 2.0 * c * j.m).abs() < 1e-12);
        assert!((zs[1].vx + zs[2].vx - 2.0 * j.k).abs() < 1e-12);
        assert!((zs[1].vy + zs[2].vy + 2.0 * j.n).abs() < 1e-12);

        let f1 = quotsol1(1.0, 2.0, 3, 1.0, Branch::Positive).unwrap();
        let z1 = characteristic_fields(&f1, &pot, &gas(1.0), 1.0, 4.0).unwrap()[0];
        assert_eq!(z1.vx, 0.0);
        assert!((z1.vy - 1.0).abs() < 1e-15);
    }

    #[test]
    fn first_integrals_of_z1() {
        let pot = PlanckPotential::ideal_gas(4).unwrap();
        let g = GasParams::new(1.0, 4, 0.1, 1.0, 0.5).unwrap();
        let f = quotsol2(1.0, 2.0, 4, 1.0, Branch::Positive).unwrap();
        let z1 = characteristic_fields(&f, &pot, &g, 1.0, 1.0).unwrap()[0];
        assert!((z1.vx - 1.0).abs() < 1e-15 && (z1.vy - 1.0).abs() < 1e-15);
        let l = |x: f64, y: f64| f.jet(x, y).unwrap().l;
        assert!(first_integral_residual(&z1, l).unwrap().abs() < 1e-8);
        assert_eq!(first_integral_residual(&z1, |_, _| 3.0).unwrap(), 0.0);

        let f1 = quotsol1(1.0, 2.0, 4, 1.0, Branch::Positive).unwrap();
        let z1 = characteristic_fields(&f1, &pot, &g, 1.3, 1.0).unwrap()[0];
        let m = |x: f64, y: f64| f1.jet(x, y).unwrap().m;
        assert!(first_integral_residual(&z1, m).unwrap().abs() < 1e-12);
    }

    #[test]
    fn determinant_of_permutation() {
        let p = [[0.0, 1.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 2.0], [0.0, 0.0, 3.0, 0.0]];
        assert_eq!(det4(p), 6.0);
    }
}
