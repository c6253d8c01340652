use super::NumericsError;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RealRoot {
    pub value: f64,
    pub multiplicity: u8,
}

fn push(roots: &mut Vec<RealRoot>, value: f64, multiplicity: u8) {
    if let Some(r) = roots.iter_mut().find(|r| r.value == value) {
        r.multiplicity += multiplicity;
    } else {
        roots.push(RealRoot { value, multiplicity });
    }
}

fn linear(a1: f64, a0: f64, out: &mut Vec<RealRoot>) {
    push(out, -a0 / a1, 1);
}

fn quadratic(a2: f64, a1: f64, a0: f64, out: &mut Vec<RealRoot>) {
    let disc = a1 * a1 - 4.0 * a2 * a0;
    let scale = a1 * a1 + (4.0 * a2 * a0).abs();
    if disc.abs() <= 8.0 * f64::EPSILON * scale {
        push(out, -a1 / (2.0 * a2), 2);
    } else if disc > 0.0 {
        // Cancellation-free pair.
        let q = -0.5 * (a1 + a1.signum_or_one() * disc.sqrt());
        let (r1, r2) = (q / a2, a0 / q);
        push(out, r1, 1);
        push(out, r2, 1);
    }
}

trait SignumOrOne {
    fn signum_or_one(self) -> f64;
}

impl SignumOrOne for f64 {
    fn signum_or_one(self) -> f64 {
        if self < 0.0 {
            -1.0
        } else {
            1.0
        }
    }
}

fn cubic(a3: f64, a2: f64, a1: f64, a0: f64, out: &mut Vec<RealRoot>) {
    let (b, c, d) = (a2 / a3, a1 / a3, a0 / a3);
    // x = t - b/3 gives t^3 + p t + q = 0
    let shift = b / 3.0;
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    let half_q = 0.5 * q;
    let third_p = p / 3.0;
    let delta = half_q * half_q + third_p * third_p * third_p;
    let scale = (half_q * half_q).max((third_p * third_p * third_p).abs()).max(f64::MIN_POSITIVE);
    if p.abs() <= 1e-12 * (1.0 + b * b) && q.abs() <= 1e-12 * (1.0 + b.abs().powi(3)) {
        push(out, -shift, 3);
    } else if delta.abs() <= 1e-12 * scale {
        push(out, 3.0 * q / p - shift, 1);
        push(out, -1.5 * q / p - shift, 2);
    } else if delta > 0.0 {
        let s = delta.sqrt();
        let u = (-half_q + s).cbrt();
        let v = (-half_q - s).cbrt();
        push(out, u + v - shift, 1);
    } else {
        let r = (-third_p).sqrt();
        let phi = (-half_q / (r * r * r)).clamp(-1.0, 1.0).acos();
        for k in 0..3 {
            let t = 2.0 * r * ((phi + 2.0 * std::f64::consts::PI * k as f64) / 3.0).cos();
            push(out, t - shift, 1);
        }
    }
}

fn newton_polish(c: [f64; 4], x: f64) -> f64 {
    let [a3, a2, a1, a0] = c;
    let p = ((a3 * x + a2) * x + a1) * x + a0;
    let dp = (3.0 * a3 * x + 2.0 * a2) * x + a1;
    if dp == 0.0 || !dp.is_finite() {
        return x;
    }
    let next = x - p / dp;
    let p_next = ((a3 * next + a2) * next + a1) * next + a0;
    if p_next.abs() <= p.abs() {
        next
    } else {
        x
    }
}

/// Real roots of `a3 x^3 + a2 x^2 + a1 x + a0`, ascending, with multiplicity.
///
/// Leading zero coefficients lower the degree; an exactly vanishing constant
/// term deflates the root at zero before the analytic formulas run.
pub fn cubic_real_roots(a3: f64, a2: f64, a1: f64, a0: f64) -> Result<Vec<RealRoot>, NumericsError> {
    let coeffs = [a3, a2, a1, a0];
    if coeffs.iter().all(|&c| c == 0.0) {
        return Err(NumericsError::ZeroPolynomial);
    }
    if a3 == 0.0 && a2 == 0.0 && a1 == 0.0 {
        return Err(NumericsError::NoRoots);
    }
    let mut roots = Vec::new();
    // Deflate exact zero roots.
    let mut c: Vec<f64> = coeffs.iter().copied().skip_while(|&v| v == 0.0).collect();
    while c.len() > 1 && c[c.len() - 1] == 0.0 {
        push(&mut roots, 0.0, 1);
        c.pop();
    }
    match c.len() {
        2 => linear(c[0], c[1], &mut roots),
        3 => quadratic(c[0], c[1], c[2], &mut roots),
        4 => cubic(c[0], c[1], c[2], c[3], &mut roots),
        _ => {}
    }
    for r in roots.iter_mut() {
        if r.multiplicity == 1 && r.value != 0.0 {
            r.value = newton_polish(coeffs, r.value);
        }
        if r.value == 0.0 {
            r.value = 0.0; // normalise -0.0
        }
    }
    roots.sort_by(|a, b| a.value.total_cmp(&b.value));
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn values(r: &[RealRoot]) -> Vec<(f64, u8)> {
        r.iter().map(|r| (r.value, r.multiplicity)).collect()
    }

    #[test]
    fn node_saddle_inventory_cubic() {
        // -2N^3 + N^2 + N = N(-2N^2 + N + 1)
        let r = cubic_real_roots(-2.0, 1.0, 1.0, 0.0).unwrap();
        assert_eq!(values(&r), vec![(-0.5, 1), (0.0, 1), (1.0, 1)]);
    }

    #[test]
    fn triple_root() {
        let r = cubic_real_roots(1.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(values(&r), vec![(0.0, 3)]);
        let r = cubic_real_roots(1.0, -3.0, 3.0, -1.0).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].multiplicity, 3);
        assert!((r[0].value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn centre_spiral_inventory_cubic() {
        let r = cubic_real_roots(2.0, 1.0, -3.0, 0.0).unwrap();
        assert_eq!(values(&r), vec![(-1.5, 1), (0.0, 1), (1.0, 1)]);
    }

    #[test]
    fn double_root_cubic() {
        // (x-1)^2 (x+2) = x^3 - 3x + 2
        let r = cubic_real_roots(1.0, 0.0, -3.0, 2.0).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0].value + 2.0).abs() < 1e-12 && r[0].multiplicity == 1);
        assert!((r[1].value - 1.0).abs() < 1e-12 && r[1].multiplicity == 2);
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(cubic_real_roots(0.0, 0.0, 0.0, 3.0), Err(NumericsError::NoRoots));
        assert_eq!(cubic_real_roots(0.0, 0.0, 0.0, 0.0), Err(NumericsError::ZeroPolynomial));
        assert_eq!(values(&cubic_real_roots(0.0, 1.0, 0.0, 0.0).unwrap()), vec![(0.0, 2)]);
        assert!(cubic_real_roots(0.0, 1.0, 0.0, 1.0).unwrap().is_empty());
        assert_eq!(values(&cubic_real_roots(0.0, 0.0, 2.0, -1.0).unwrap()), vec![(0.5, 1)]);
    }

    fn eval(c: [f64; 4], x: f64) -> f64 {
        ((c[0] * x + c[1]) * x + c[2]) * x + c[3]
    }

    proptest! {
        #[test]
        fn residuals_and_root_count(
            a3 in prop_oneof![-5.0f64..-0.1, 0.1f64..5.0],
            a2 in -5.0f64..5.0,
            a1 in -5.0f64..5.0,
            a0 in -5.0f64..5.0,
        ) {
            let c = [a3, a2, a1, a0];
            let roots = cubic_real_roots(a3, a2, a1, a0).unwrap();
            let cmax = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for r in &roots {
                let scale = cmax * (1.0 + r.value.abs()).powi(3);
                prop_assert!(eval(c, r.value).abs() <= 1e-12 * scale, "p({}) = {}", r.value, eval(c, r.value));
            }
            for w in roots.windows(2) {
                prop_assert!(w[0].value < w[1].value);
            }
            // Cubic discriminant: > 0 three distinct real roots, < 0 one real root.
            let disc = 18.0 * a3 * a2 * a1 * a0 - 4.0 * a2.powi(3) * a0 + a2 * a2 * a1 * a1
                - 4.0 * a3 * a1.powi(3) - 27.0 * a3 * a3 * a0 * a0;
            let count: u8 = roots.iter().map(|r| r.multiplicity).sum();
            let dscale = 1e-9 * cmax.powi(4);
            if disc > dscale {
                prop_assert_eq!(count, 3);
            } else if disc < -dscale {
                prop_assert_eq!(count, 1);
            }
        }
    }
}
