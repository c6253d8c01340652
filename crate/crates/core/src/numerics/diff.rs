use super::NumericsError;

/// Step used when callers have no better information.
///
/// Higher derivatives divide by higher powers of the step, so the base step
/// grows with the order to keep roundoff below the truncation error.
pub fn default_step(order: u8, point: f64) -> f64 {
    let scale = point.abs().max(1.0);
    match order {
        1 => 1e-5 * scale,
        2 => 1e-3 * scale,
        _ => 2e-2 * scale,
    }
}

/// Central-difference derivative of `f` at `point` with one Richardson
/// extrapolation (fourth-order accurate for every supported order).
///
/// The stencil reaches at most `2 * step` from `point`.
pub fn fd_derivative<F>(f: F, point: f64, order: u8, step: f64) -> Result<f64, NumericsError>
where
    F: Fn(f64) -> f64,
{
    if !(step > 0.0 && step.is_finite()) {
        return Err(NumericsError::InvalidArgument(format!("step must be positive, got {step}")));
    }
    if !(1..=3).contains(&order) {
        return Err(NumericsError::InvalidArgument(format!("order must be 1, 2 or 3, got {order}")));
    }
    let eval = |x: f64| -> Result<f64, NumericsError> {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(NumericsError::NonFiniteSample { at: x })
        }
    };
    let stencil = |h: f64| -> Result<f64, NumericsError> {
        Ok(match order {
            1 => (eval(point + h)? - eval(point - h)?) / (2.0 * h),
            2 => (eval(point + h)? - 2.0 * eval(point)? + eval(point - h)?) / (h * h),
            _ => {
                (eval(point + 2.0 * h)? - 2.0 * eval(point + h)? + 2.0 * eval(point - h)? - eval(point - 2.0 * h)?)
                    / (2.0 * h * h * h)
            }
        })
    };
    let coarse = stencil(step)?;
    let fine = stencil(0.5 * step)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// First partial of a bivariate function along `axis` (0 → x, 1 → y).
pub fn fd_partial<F>(f: F, x: f64, y: f64, axis: usize) -> Result<f64, NumericsError>
where
    F: Fn(f64, f64) -> f64,
{
    if axis == 0 {
        fd_derivative(|s| f(s, y), x, 1, default_step(1, x))
    } else {
        fd_derivative(|s| f(x, s), y, 1, default_step(1, y))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn square_first_derivative() {
        let d = fd_derivative(|x| x * x, 3.0, 1, default_step(1, 3.0)).unwrap();
        assert!((d - 6.0).abs() < 1e-8);
    }

    #[test]
    fn sine_second_derivative_at_origin() {
        let d = fd_derivative(f64::sin, 0.0, 2, default_step(2, 0.0)).unwrap();
        assert!(d.abs() < 1e-8);
    }

    #[test]
    fn log_third_derivative() {
        // d^3/dx^3 ln x = 2 / x^3
        let d = fd_derivative(f64::ln, 2.0, 3, default_step(3, 2.0)).unwrap();
        assert!((d - 0.25).abs() < 1e-6, "{d}");
    }

    #[test]
    fn non_finite_sample_is_reported() {
        let r = fd_derivative(f64::ln, 0.0, 1, 1e-3);
        assert!(matches!(r, Err(NumericsError::NonFiniteSample { .. })));
    }

    #[test]
    fn bad_arguments() {
        assert!(fd_derivative(f64::sin, 0.0, 4, 1e-3).is_err());
        assert!(fd_derivative(f64::sin, 0.0, 1, 0.0).is_err());
    }

    fn poly(c: &[f64], x: f64) -> f64 {
        c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
    }

    fn poly_deriv(c: &[f64], x: f64, order: usize) -> f64 {
        let mut d: Vec<f64> = c.to_vec();
        for _ in 0..order {
            d = d.iter().enumerate().skip(1).map(|(i, ci)| i as f64 * ci).collect();
        }
        poly(&d, x)
    }

    proptest! {
        #[test]
        fn exact_on_low_degree_polynomials(
            order in 1u8..=3,
            coeffs in proptest::collection::vec(-3.0f64..3.0, 5),
            x in -2.0f64..2.0,
        ) {
            let deg = order as usize + 1;
            let c = &coeffs[..=deg];
            let exact = poly_deriv(c, x, order as usize);
            let got = fd_derivative(|s| poly(c, s), x, order, default_step(order, x)).unwrap();
            let scale: f64 = 1.0 + c.iter().enumerate().map(|(i, ci)| ci.abs() * x.abs().max(1.0).powi(i as i32)).sum::<f64>();
            prop_assert!((got - exact).abs() <= 1e-8 * scale, "order {} got {} exact {}", order, got, exact);
        }
    }
}
