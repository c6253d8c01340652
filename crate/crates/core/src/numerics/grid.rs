use super::NumericsError;
use serde::{Deserialize, Serialize};

/// Affinely spaced points on `[min, max]`, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Grid1D {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self, NumericsError> {
        if !(min.is_finite() && max.is_finite()) || min >= max {
            return Err(NumericsError::InvalidArgument(format!(
                "grid bounds must satisfy min < max, got [{min}, {max}]"
            )));
        }
        if count < 2 {
            return Err(NumericsError::InvalidArgument(format!("grid needs at least 2 points, got {count}")));
        }
        Ok(Self { min, max, count })
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.count - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            self.max
        } else {
            self.min + i as f64 * self.step()
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(|i| self.point(i))
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.min && v <= self.max
    }
}

/// Tensor grid; `x` is the first axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    pub x: Grid1D,
    pub y: Grid1D,
}

impl Grid2D {
    pub fn new(x: Grid1D, y: Grid1D) -> Self {
        Self { x, y }
    }

    pub fn len(&self) -> usize {
        self.x.count * self.y.count
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major over `x`, then `y`.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.x.points().flat_map(move |x| self.y.points().map(move |y| (x, y)))
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        self.x.contains(x) && self.y.contains(y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_are_exact() {
        let g = Grid1D::new(-1.0, 3.0, 7).unwrap();
        let pts: Vec<f64> = g.points().collect();
        assert_eq!(pts[0], -1.0);
        assert_eq!(pts[6], 3.0);
        for w in pts.windows(2) {
            assert!((w[1] - w[0] - g.step()).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_bad_bounds() {
        assert!(Grid1D::new(1.0, 1.0, 5).is_err());
        assert!(Grid1D::new(0.0, 1.0, 1).is_err());
        assert!(Grid1D::new(f64::NAN, 1.0, 4).is_err());
    }

    #[test]
    fn grid2d_enumerates_all_points() {
        let g = Grid2D::new(Grid1D::new(0.0, 1.0, 3).unwrap(), Grid1D::new(0.0, 2.0, 4).unwrap());
        assert_eq!(g.points().count(), 12);
        assert_eq!(g.points().nth(4), Some((0.5, 0.0)));
    }
}
