//! Dormand–Prince 5(4) with the fourth-order continuous extension and a
//! single terminal event.

use super::NumericsError;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    /// Used as both relative and absolute tolerance. Steps are controlled by
    /// error per unit step, so the accepted local errors add up to about
    /// `tol` over the whole span rather than `tol` each.
    pub tol: f64,
    pub max_steps: usize,
    pub initial_step: Option<f64>,
    pub max_step: Option<f64>,
}

impl OdeOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_steps: 200_000, initial_step: None, max_step: None }
    }
}

/// Terminal event: integration stops where `g` changes sign.
pub struct StopEvent<'a> {
    pub g: &'a dyn Fn(f64, &[f64]) -> f64,
}

/// Continuous extension over one accepted step.
#[derive(Debug, Clone)]
pub struct DenseSegment {
    pub t0: f64,
    pub h: f64,
    coeffs: [Vec<f64>; 5],
}

impl DenseSegment {
    pub fn eval(&self, t: f64) -> Vec<f64> {
        let s = (t - self.t0) / self.h;
        let s1 = 1.0 - s;
        let [r1, r2, r3, r4, r5] = &self.coeffs;
        (0..r1.len()).map(|i| r1[i] + s * (r2[i] + s1 * (r3[i] + s * (r4[i] + s1 * r5[i])))).collect()
    }

    fn covers(&self, t: f64) -> bool {
        let end = self.t0 + self.h;
        let (a, b) = if self.h > 0.0 { (self.t0, end) } else { (end, self.t0) };
        t >= a && t <= b
    }
}

/// Accepted step points plus the dense interpolant between them.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub y: Vec<Vec<f64>>,
    pub segments: Vec<DenseSegment>,
    /// True when the stop event fired; the last sample is the refined event point.
    pub stopped: bool,
}

impl Trajectory {
    pub fn last(&self) -> (f64, &[f64]) {
        let i = self.t.len() - 1;
        (self.t[i], &self.y[i])
    }

    pub fn t_start(&self) -> f64 {
        self.t[0]
    }

    pub fn t_end(&self) -> f64 {
        self.t[self.t.len() - 1]
    }

    /// Dense evaluation; `None` outside the integrated range.
    pub fn eval(&self, t: f64) -> Option<Vec<f64>> {
        let forward = self.t_end() >= self.t_start();
        let (lo, hi) = if forward { (self.t_start(), self.t_end()) } else { (self.t_end(), self.t_start()) };
        if t < lo || t > hi {
            return None;
        }
        if self.segments.is_empty() {
            return Some(self.y[0].clone());
        }
        let idx = self.segments.partition_point(|seg| if forward { seg.t0 + seg.h < t } else { seg.t0 + seg.h > t });
        let seg = &self.segments[idx.min(self.segments.len() - 1)];
        debug_assert!(seg.covers(t) || idx >= self.segments.len());
        Some(seg.eval(t))
    }

    /// `count` evenly spaced dense samples over the integrated range.
    pub fn resample(&self, count: usize) -> Vec<(f64, Vec<f64>)> {
        let (a, b) = (self.t_start(), self.t_end());
        (0..count.max(2))
            .map(|i| {
                let t = if i + 1 == count.max(2) { b } else { a + (b - a) * i as f64 / (count.max(2) - 1) as f64 };
                (t, self.eval(t).expect("inside range"))
            })
            .collect()
    }

    /// Sign changes of `g` along the trajectory, located to `tol` on the
    /// dense output.
    pub fn crossings<G>(&self, g: G, tol: f64) -> Vec<(f64, Vec<f64>)>
    where
        G: Fn(f64, &[f64]) -> f64,
    {
        let mut out = Vec::new();
        for seg in &self.segments {
            let (ta, tb) = (seg.t0, seg.t0 + seg.h);
            let tb = if seg.h > 0.0 { tb.min(self.t_end().max(ta)) } else { tb.max(self.t_end().min(ta)) };
            let ga = g(ta, &seg.eval(ta));
            let gb = g(tb, &seg.eval(tb));
            if ga != 0.0 && (ga.signum() != gb.signum()) {
                let t = refine_root(|t| g(t, &seg.eval(t)), ta, tb, ga, tol);
                out.push((t, seg.eval(t)));
            }
        }
        out
    }
}

fn refine_root<G: Fn(f64) -> f64>(g: G, mut a: f64, mut b: f64, mut ga: f64, tol: f64) -> f64 {
    // Illinois variant of regula falsi with bisection fallback.
    let mut gb = g(b);
    if gb == 0.0 {
        return b;
    }
    let mut side = 0i8;
    for _ in 0..200 {
        if (b - a).abs() <= tol * a.abs().max(1.0) {
            break;
        }
        let mut c = (a * gb - b * ga) / (gb - ga);
        if !c.is_finite() || (c - a) * (c - b) > 0.0 {
            c = 0.5 * (a + b);
        }
        let gc = g(c);
        if gc == 0.0 {
            return c;
        }
        if gc.signum() == gb.signum() {
            b = c;
            gb = gc;
            if side == -1 {
                ga *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            ga = gc;
            if side == 1 {
                gb *= 0.5;
            }
            side = 1;
        }
    }
    // Return the endpoint on the far side of the crossing.
    b
}

fn norm(err: &[f64], y: &[f64], y_new: &[f64], tol: f64) -> f64 {
    let n = err.len().max(1) as f64;
    let s: f64 = err
        .iter()
        .zip(y.iter().zip(y_new))
        .map(|(e, (a, b))| {
            let sc = tol + tol * a.abs().max(b.abs());
            (e / sc).powi(2)
        })
        .sum();
    (s / n).sqrt()
}

fn axpy(y: &[f64], h: f64, terms: &[(f64, &[f64])]) -> Vec<f64> {
    (0..y.len()).map(|i| y[i] + h * terms.iter().map(|(c, k)| c * k[i]).sum::<f64>()).collect()
}

/// Integrates `y' = rhs(t, y)` from `t0` to `t1` (either direction).
pub fn ode_solve<F>(
    rhs: F,
    t0: f64,
    y0: &[f64],
    t1: f64,
    opts: &OdeOptions,
    stop: Option<&StopEvent<'_>>,
) -> Result<Trajectory, NumericsError>
where
    F: Fn(f64, &[f64]) -> Vec<f64>,
{
    if !(opts.tol > 0.0) {
        return Err(NumericsError::InvalidArgument(format!("tolerance must be positive, got {}", opts.tol)));
    }
    let mut traj = Trajectory { t: vec![t0], y: vec![y0.to_vec()], segments: Vec::new(), stopped: false };
    let span = t1 - t0;
    if span == 0.0 {
        return Ok(traj);
    }
    let dir = span.signum();
    let max_step = opts.max_step.unwrap_or(span.abs());
    let mut h = opts.initial_step.unwrap_or(1e-3 * span.abs()).min(max_step) * dir;

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k1 = rhs(t, &y);
    if k1.iter().any(|v| !v.is_finite()) {
        return Err(NumericsError::SingularityEncountered { t, state: y });
    }
    let mut g_prev = stop.map(|ev| (ev.g)(t, &y));

    for _ in 0..opts.max_steps {
        if (t1 - t) * dir <= 0.0 {
            return Ok(traj);
        }
        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }
        if h.abs() < 1e-14 * t.abs().max(1.0) {
            return Err(NumericsError::SingularityEncountered { t, state: y });
        }

        let k2 = rhs(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
        let k3 = rhs(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = rhs(t + C4 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = rhs(t + C5 * h, &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
        let k6 = rhs(t + h, &axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
        let y_new = axpy(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = rhs(t + h, &y_new);

        let finite = [&k2, &k3, &k4, &k5, &k6, &k7, &y_new].iter().all(|v| v.iter().all(|x| x.is_finite()));
        if !finite {
            h *= 0.25;
            continue;
        }
        let err: Vec<f64> = (0..y.len())
            .map(|i| h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]))
            .collect();
        // error per unit step: accepted local errors add up to at most tol over the span
        let e = norm(&err, &y, &y_new, opts.tol) * (span / h).abs();
        let factor = if e == 0.0 { 5.0 } else { (0.9 * e.powf(-0.25)).clamp(0.2, 5.0) };
        if e > 1.0 {
            h *= factor.min(1.0);
            continue;
        }

        let r2: Vec<f64> = y_new.iter().zip(&y).map(|(a, b)| a - b).collect();
        let r3: Vec<f64> = (0..y.len()).map(|i| h * k1[i] - r2[i]).collect();
        let r4: Vec<f64> = (0..y.len()).map(|i| r2[i] - h * k7[i] - r3[i]).collect();
        let r5: Vec<f64> = (0..y.len())
            .map(|i| h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]))
            .collect();
        let seg = DenseSegment { t0: t, h, coeffs: [y.clone(), r2, r3, r4, r5] };

        if let (Some(ev), Some(g0)) = (stop, g_prev) {
            let g1 = (ev.g)(t + h, &y_new);
            if g0 != 0.0 && (g1 == 0.0 || g1.signum() != g0.signum()) {
                let te = refine_root(|s| (ev.g)(s, &seg.eval(s)), t, t + h, g0, opts.tol);
                let ye = seg.eval(te);
                traj.segments.push(seg);
                traj.t.push(te);
                traj.y.push(ye);
                traj.stopped = true;
                return Ok(traj);
            }
            g_prev = Some(g1);
        }

        traj.segments.push(seg);
        t += h;
        y = y_new;
        k1 = k7;
        traj.t.push(t);
        traj.y.push(y.clone());
        h = (h * factor).abs().min(max_step) * dir;
    }
    Err(NumericsError::InvalidArgument(format!("step limit {} exhausted at t = {t}", opts.max_steps)))
}
