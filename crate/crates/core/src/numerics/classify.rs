use serde::{Deserialize, Serialize};
use std::fmt;

pub type Mat2 = [[f64; 2]; 2];

/// Threshold on trace and determinant below which they count as zero.
pub const CLASSIFY_TOL: f64 = 1e-12;

/// Linear type of a planar equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EigenClass {
    StableNode,
    UnstableNode,
    Saddle,
    Centre,
    StableSpiral,
    UnstableSpiral,
    Degenerate,
}

impl EigenClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            EigenClass::StableNode => "stable-node",
            EigenClass::UnstableNode => "unstable-node",
            EigenClass::Saddle => "saddle",
            EigenClass::Centre => "centre",
            EigenClass::StableSpiral => "stable-spiral",
            EigenClass::UnstableSpiral => "unstable-spiral",
            EigenClass::Degenerate => "degenerate",
        }
    }
}

impl fmt::Display for EigenClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Classifies a real 2x2 matrix by trace, determinant and discriminant.
///
/// `|det| < 1e-12` is `Degenerate`; `det < 0` is always a saddle (including
/// zero trace); `|trace| < 1e-12` with `det > 0` is a centre. A repeated real
/// eigenvalue (zero discriminant) counts as a node.
pub fn classify_2x2(j: &Mat2) -> EigenClass {
    let trace = j[0][0] + j[1][1];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    if det.abs() < CLASSIFY_TOL {
        return EigenClass::Degenerate;
    }
    if det < 0.0 {
        return EigenClass::Saddle;
    }
    if trace.abs() < CLASSIFY_TOL {
        return EigenClass::Centre;
    }
    let disc = trace * trace - 4.0 * det;
    let node = disc >= -CLASSIFY_TOL * (trace * trace).max(det.abs());
    match (node, trace > 0.0) {
        (true, true) => EigenClass::UnstableNode,
        (true, false) => EigenClass::StableNode,
        (false, true) => EigenClass::UnstableSpiral,
        (false, false) => EigenClass::StableSpiral,
    }
}
