//! Thermodynamics from a Planck potential `Φ(x, y)` with `x = ρ`, `y = θ`:
//! `p = -R x² y Φ_x`, `s = R (Φ + y Φ_y)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ThermoError {
    #[error("point (x = {x}, y = {y}) outside the thermodynamic domain x > 0, y > 0")]
    DomainError { x: f64, y: f64 },
    #[error("invalid gas parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid config: {0}")]
    Config(String),
}

/// Physical constants of the gas and the curve.
///
/// `omega = sqrt(2 λ g)` is always derived here and never taken as input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GasParams {
    r: f64,
    n: u32,
    k: f64,
    g: f64,
    lambda: f64,
    omega: f64,
}

impl GasParams {
    pub fn new(r: f64, n: u32, k: f64, g: f64, lambda: f64) -> Result<Self, ThermoError> {
        let bad = |what: &str| Err(ThermoError::InvalidParameter(what.to_string()));
        if !(r > 0.0 && r.is_finite()) {
            return bad("R must be positive");
        }
        if n == 0 {
            return bad("n must be at least 1");
        }
        if !(k >= 0.0 && k.is_finite()) {
            return bad("k must be non-negative");
        }
        if !(g > 0.0 && g.is_finite()) {
            return bad("g must be positive");
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return bad("lambda must be positive");
        }
        Ok(Self { r, n, k, g, lambda, omega: (2.0 * lambda * g).sqrt() })
    }

    pub fn r(&self) -> f64 {
        self.r
    }
    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn k(&self) -> f64 {
        self.k
    }
    pub fn g(&self) -> f64 {
        self.g
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn omega(&self) -> f64 {
        self.omega
    }
    /// `ω² = 2λg`, computed from the inputs rather than by squaring `omega`.
    pub fn omega_sq(&self) -> f64 {
        2.0 * self.lambda * self.g
    }
}

/// A virial coefficient `A_i(y)` as a polynomial in `y` (ascending powers).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Polynomial {
    pub coeffs: Vec<f64>,
}

pub type VirialCoefficient = Polynomial;

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        Self { coeffs: vec![c] }
    }

    /// `p(y) = y`.
    pub fn identity() -> Self {
        Self { coeffs: vec![0.0, 1.0] }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    pub fn eval(&self, y: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * y + c)
    }

    pub fn derivative(&self) -> Self {
        Self { coeffs: self.coeffs.iter().enumerate().skip(1).map(|(i, c)| i as f64 * c).collect() }
    }

    /// `(value, first, second)` derivatives at `y`.
    pub fn eval_d2(&self, y: f64) -> (f64, f64, f64) {
        let d1 = self.derivative();
        let d2 = d1.derivative();
        (self.eval(y), d1.eval(y), d2.eval(y))
    }
}

/// Value and partial derivatives of `Φ` at one point, through total order 3
/// (the pure `yyy` partial is never needed).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct PotentialJet {
    pub phi: f64,
    pub x: f64,
    pub y: f64,
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
    pub xxx: f64,
    pub xxy: f64,
    pub xyy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum PotentialKind {
    Ideal { n: u32 },
    Virial { n: u32, coeffs: Vec<Polynomial> },
}

/// `Φ = (n/2) ln y − ln x − Σ_{i=1..m} (x^i / i) A_i(y)`; `m = 0` is the ideal gas.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanckPotential {
    n: u32,
    coeffs: Vec<Polynomial>,
    virial: bool,
}

impl PlanckPotential {
    pub fn ideal_gas(n: u32) -> Result<Self, ThermoError> {
        if n == 0 {
            return Err(ThermoError::InvalidParameter("n must be at least 1".into()));
        }
        Ok(Self { n, coeffs: Vec::new(), virial: false })
    }

    /// Keeps the first `m` coefficients of `coeffs`.
    pub fn virial(n: u32, coeffs: &[Polynomial], m: usize) -> Result<Self, ThermoError> {
        if n == 0 {
            return Err(ThermoError::InvalidParameter("n must be at least 1".into()));
        }
        if m > coeffs.len() {
            return Err(ThermoError::InvalidParameter(format!(
                "truncation order {m} exceeds the {} supplied coefficients",
                coeffs.len()
            )));
        }
        Ok(Self { n, coeffs: coeffs[..m].to_vec(), virial: true })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len()
    }

    pub fn kind(&self) -> PotentialKind {
        if self.virial {
            PotentialKind::Virial { n: self.n, coeffs: self.coeffs.clone() }
        } else {
            PotentialKind::Ideal { n: self.n }
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<PotentialJet, ThermoError> {
        if !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite()) {
            return Err(ThermoError::DomainError { x, y });
        }
        let half_n = 0.5 * self.n as f64;
        let mut j = PotentialJet {
            phi: half_n * y.ln() - x.ln(),
            x: -1.0 / x,
            y: half_n / y,
            xx: 1.0 / (x * x),
            xy: 0.0,
            yy: -half_n / (y * y),
            xxx: -2.0 / (x * x * x),
            xxy: 0.0,
            xyy: 0.0,
        };
        for (idx, a) in self.coeffs.iter().enumerate() {
            let i = (idx + 1) as i32;
            let fi = i as f64;
            let (a0, a1, a2) = a.eval_d2(y);
            let xi = x.powi(i);
            let xi1 = x.powi(i - 1);
            j.phi -= xi / fi * a0;
            j.y -= xi / fi * a1;
            j.yy -= xi / fi * a2;
            j.x -= xi1 * a0;
            j.xy -= xi1 * a1;
            j.xyy -= xi1 * a2;
            if i >= 2 {
                let xi2 = x.powi(i - 2);
                j.xx -= (fi - 1.0) * xi2 * a0;
                j.xxy -= (fi - 1.0) * xi2 * a1;
            }
            if i >= 3 {
                j.xxx -= (fi - 1.0) * (fi - 2.0) * x.powi(i - 3) * a0;
            }
        }
        Ok(j)
    }
}

/// `p = −R x² y Φ_x`.
pub fn pressure(pot: &PlanckPotential, r: f64, x: f64, y: f64) -> Result<f64, ThermoError> {
    let j = pot.eval(x, y)?;
    Ok(-r * x * x * y * j.x)
}

/// `s = R (Φ + y Φ_y)`.
pub fn entropy(pot: &PlanckPotential, r: f64, x: f64, y: f64) -> Result<f64, ThermoError> {
    let j = pot.eval(x, y)?;
    Ok(r * (j.phi + y * j.y))
}

/// `x Φ_xx + 2 Φ_x`; non-positive for admissible states.
pub fn admissibility(pot: &PlanckPotential, x: f64, y: f64) -> Result<f64, ThermoError> {
    let j = pot.eval(x, y)?;
    Ok(x * j.xx + 2.0 * j.x)
}

/// `(p_x, p_y)` by exact differentiation of `−R x² y Φ_x`.
pub fn pressure_gradient(j: &PotentialJet, r: f64, x: f64, y: f64) -> (f64, f64) {
    let p_x = -r * y * (2.0 * x * j.x + x * x * j.xx);
    let p_y = -r * x * x * (j.x + y * j.xy);
    (p_x, p_y)
}

/// `(s_x, s_y)` by exact differentiation of `R (Φ + y Φ_y)`.
pub fn entropy_gradient(j: &PotentialJet, r: f64, y: f64) -> (f64, f64) {
    (r * (j.x + y * j.xy), r * (2.0 * j.y + y * j.yy))
}

/// JSON configuration for the gas and its potential.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermoConfig {
    #[serde(rename = "R")]
    pub r: f64,
    pub n: u32,
    pub k: f64,
    pub g: f64,
    pub lambda: f64,
    pub potential: PotentialSpec,
    /// Present only so that a supplied ω gets a clear rejection message.
    #[serde(default)]
    omega: Option<f64>,
}

#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    #[serde(rename = "type")]
    pub kind: PotentialType,
    #[serde(default)]
    pub coeffs: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum PotentialType {
    Ideal,
    Virial,
}

impl ThermoConfig {
    pub fn from_json(text: &str) -> Result<Self, ThermoError> {
        serde_json::from_str(text).map_err(|e| ThermoError::Config(e.to_string()))
    }

    pub fn build(&self) -> Result<(GasParams, PlanckPotential), ThermoError> {
        if let Some(w) = self.omega {
            return Err(ThermoError::Config(format!(
                "omega ({w}) is derived as sqrt(2*lambda*g) and must not be supplied"
            )));
        }
        let gas = GasParams::new(self.r, self.n, self.k, self.g, self.lambda)?;
        let pot = match self.potential.kind {
            PotentialType::Ideal => {
                if !self.potential.coeffs.is_empty() {
                    return Err(ThermoError::Config("ideal potential takes no coeffs".into()));
                }
                PlanckPotential::ideal_gas(self.n)?
            }
            PotentialType::Virial => {
                let coeffs: Vec<Polynomial> =
                    self.potential.coeffs.iter().map(|c| Polynomial::new(c.clone())).collect();
                PlanckPotential::virial(self.n, &coeffs, coeffs.len())?
            }
        };
        Ok((gas, pot))
    }
}
