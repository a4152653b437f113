use serde::{Deserialize, Serialize};

use super::NumericsError;

/// Strictly increasing abscissae on the half-line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    points: Vec<f64>,
}

impl Grid {
    pub fn new(points: Vec<f64>) -> Result<Self, NumericsError> {
        if points.len() < 2 {
            return Err(NumericsError::InvalidGrid("at least two points are required".into()));
        }
        if !(points[0] >= 0.0) {
            return Err(NumericsError::InvalidGrid(format!(
                "first point {} is negative",
                points[0]
            )));
        }
        if let Some(w) = points.windows(2).find(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return Err(NumericsError::InvalidGrid(format!(
                "points not strictly increasing near {} -> {}",
                w[0], w[1]
            )));
        }
        Ok(Self { points })
    }

    /// `n` equally spaced points covering `[a, b]`.
    pub fn uniform(a: f64, b: f64, n: usize) -> Result<Self, NumericsError> {
        let n = n.max(2);
        let h = (b - a) / (n - 1) as f64;
        let mut points: Vec<f64> = (0..n).map(|i| a + h * i as f64).collect();
        points[n - 1] = b;
        Self::new(points)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.points[0]
    }

    pub fn last(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    /// Index `i` with `points[i] <= x <= points[i + 1]`, clamped to the ends.
    fn interval_of(&self, x: f64) -> usize {
        let n = self.points.len();
        match self.points.partition_point(|&p| p <= x) {
            0 => 0,
            i if i >= n => n - 2,
            i => i - 1,
        }
    }
}

/// Real samples on a [`Grid`], optionally carrying exact slopes for
/// cubic Hermite interpolation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledFunction {
    grid: Grid,
    values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    slopes: Option<Vec<f64>>,
}

impl SampledFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self, NumericsError> {
        if values.len() != grid.len() {
            return Err(NumericsError::LengthMismatch {
                grid: grid.len(),
                values: values.len(),
            });
        }
        Ok(Self { grid, values, slopes: None })
    }

    pub fn with_slopes(grid: Grid, values: Vec<f64>, slopes: Vec<f64>) -> Result<Self, NumericsError> {
        if slopes.len() != grid.len() {
            return Err(NumericsError::LengthMismatch {
                grid: grid.len(),
                values: slopes.len(),
            });
        }
        let mut f = Self::new(grid, values)?;
        f.slopes = Some(slopes);
        Ok(f)
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.points().iter().map(|&x| f(x)).collect();
        Self { grid, values, slopes: None }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn points(&self) -> &[f64] {
        self.grid.points()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn slopes(&self) -> Option<&[f64]> {
        self.slopes.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Multiplies values (and slopes) by `c`.
    pub fn scale(&mut self, c: f64) {
        self.values.iter_mut().for_each(|v| *v *= c);
        if let Some(s) = self.slopes.as_mut() {
            s.iter_mut().for_each(|v| *v *= c);
        }
    }

    pub fn map(&self, f: impl Fn(f64, f64) -> f64) -> SampledFunction {
        let values = self
            .points()
            .iter()
            .zip(&self.values)
            .map(|(&x, &v)| f(x, v))
            .collect();
        SampledFunction { grid: self.grid.clone(), values, slopes: None }
    }

    /// Interpolated value; cubic Hermite where slopes are known and finite,
    /// linear otherwise. Outside the grid the end value is held.
    pub fn eval(&self, x: f64) -> f64 {
        let pts = self.grid.points();
        if x <= pts[0] {
            return self.values[0];
        }
        if x >= pts[pts.len() - 1] {
            return self.values[pts.len() - 1];
        }
        let i = self.grid.interval_of(x);
        self.eval_in(i, x)
    }

    fn eval_in(&self, i: usize, x: f64) -> f64 {
        let pts = self.grid.points();
        let (x0, x1) = (pts[i], pts[i + 1]);
        let h = x1 - x0;
        let t = (x - x0) / h;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        match &self.slopes {
            Some(s) if s[i].is_finite() && s[i + 1].is_finite() => {
                let t2 = t * t;
                let t3 = t2 * t;
                let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
                let h10 = t3 - 2.0 * t2 + t;
                let h01 = -2.0 * t3 + 3.0 * t2;
                let h11 = t3 - t2;
                h00 * y0 + h10 * h * s[i] + h01 * y1 + h11 * h * s[i + 1]
            }
            _ => y0 + t * (y1 - y0),
        }
    }

    /// Midpoint value of interval `i`.
    pub fn midpoint_value(&self, i: usize) -> f64 {
        let pts = self.grid.points();
        self.eval_in(i, 0.5 * (pts[i] + pts[i + 1]))
    }

    /// Integral of `g(x, f(x))` over the whole grid by Simpson's rule on
    /// each interval, using the interpolant at interval midpoints.
    pub fn integrate_with(&self, g: impl Fn(f64, f64) -> f64) -> f64 {
        let pts = self.grid.points();
        let mut total = 0.0;
        for i in 0..pts.len() - 1 {
            let (x0, x1) = (pts[i], pts[i + 1]);
            let xm = 0.5 * (x0 + x1);
            let fm = self.eval_in(i, xm);
            total += (x1 - x0) / 6.0
                * (g(x0, self.values[i]) + 4.0 * g(xm, fm) + g(x1, self.values[i + 1]));
        }
        total
    }

    pub fn integrate(&self) -> f64 {
        self.integrate_with(|_, v| v)
    }

    /// Number of strict sign changes, ignoring samples whose magnitude is
    /// below `rel_floor * max|f|`.
    pub fn sign_changes(&self, rel_floor: f64) -> usize {
        let floor = rel_floor * self.max_abs();
        let mut last = 0.0_f64;
        let mut count = 0;
        for &v in &self.values {
            if v.abs() <= floor {
                continue;
            }
            if last != 0.0 && (v > 0.0) != (last > 0.0) {
                count += 1;
            }
            last = v;
        }
        count
    }

    /// Total variation against the dominant direction, relative to
    /// `max|f|`. Zero for a monotone sequence.
    pub fn monotonicity_violation(&self) -> f64 {
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let (mut up, mut down) = (0.0_f64, 0.0_f64);
        for w in self.values.windows(2) {
            let d = w[1] - w[0];
            if d > 0.0 {
                up += d;
            } else {
                down -= d;
            }
        }
        up.min(down) / scale
    }
}
