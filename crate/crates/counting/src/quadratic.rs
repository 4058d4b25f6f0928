//! Binary quadratic polynomials with positive definite quadratic part.
//!
//! With `Δ = b² − 4ac < 0`, `ξ = (be − 2cd)/Δ` and `η = (bd − 2ae)/Δ`,
//! `P(x, y) = ((2a(x + ξ) + b(y + η))² − Δ(y + η)²)/(4a) + P(−ξ, −η)`,
//! so every sublevel set `{P ≤ h}` is an explicit ellipse.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dirichlet::dirichlet_approx;
use crate::error::{CountingError, Result};

/// Default budget for lattice points visited by one enumeration.
pub const DEFAULT_POINT_BUDGET: u128 = 50_000_000;
/// Default lower bound `D` on `|Δ|`.
pub const DEFAULT_MIN_DISCRIMINANT: f64 = 1e-9;
/// Largest denominator bound used by the approximation pipeline.
pub const PIPELINE_MAX_T: f64 = 2e4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadPoly2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntQuadPoly2 {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
    pub e: i64,
    pub f: i64,
}

impl QuadPoly2 {
    pub fn new(a: f64, b: f64, c: f64, d: f64, e: f64, f: f64) -> Self {
        Self { a, b, c, d, e, f }
    }

    pub fn coefficients(&self) -> [f64; 6] {
        [self.a, self.b, self.c, self.d, self.e, self.f]
    }

    pub fn discriminant(&self) -> f64 {
        self.b * self.b - 4.0 * self.a * self.c
    }

    /// Largest coefficient in absolute value.
    pub fn height(&self) -> f64 {
        self.coefficients().iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn is_positive_definite(&self) -> bool {
        self.a > 0.0 && self.discriminant() < 0.0
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.a * x * x + self.b * x * y + self.c * y * y + self.d * x + self.e * y + self.f
    }

    /// `P − s`.
    pub fn shifted(&self, s: f64) -> Self {
        Self { f: self.f - s, ..*self }
    }

    /// `(ξ, η, P(−ξ, −η))`.
    pub fn center(&self) -> (f64, f64, f64) {
        let disc = self.discriminant();
        let xi = (self.b * self.e - 2.0 * self.c * self.d) / disc;
        let eta = (self.b * self.d - 2.0 * self.a * self.e) / disc;
        (xi, eta, self.eval(-xi, -eta))
    }

    fn require_definite(&self, min_disc: f64) -> Result<()> {
        if !self.is_positive_definite() {
            return Err(CountingError::NotDefinite);
        }
        if -self.discriminant() < min_disc {
            return Err(CountingError::Discriminant { found: -self.discriminant(), bound: min_disc });
        }
        Ok(())
    }

    /// Range of `y` and, for each `y`, of `x` on `{P ≤ h}`, slightly widened.
    fn ellipse(&self, h: f64) -> Option<Ellipse> {
        let (xi, eta, p0) = self.center();
        let r = 4.0 * self.a * (h - p0);
        if r < 0.0 {
            return None;
        }
        let nd = -self.discriminant();
        let half_y = (r / nd).sqrt();
        let slack = 1e-9 * (1.0 + half_y + xi.abs() + eta.abs());
        Some(Ellipse { a: self.a, b: self.b, xi, eta, r, nd, y_lo: (-eta - half_y - slack).ceil(), y_hi: (-eta + half_y + slack).floor() })
    }

    /// Integer points with `lo ≤ P(x, y) ≤ hi`.
    pub fn points_in_window(&self, lo: f64, hi: f64, budget: u128) -> Result<Vec<(i64, i64)>> {
        self.require_definite(0.0)?;
        let Some(el) = self.ellipse(hi) else { return Ok(Vec::new()) };
        let mut out = Vec::new();
        el.for_each(budget, |x, y| {
            let v = self.eval(x as f64, y as f64);
            if v >= lo && v <= hi {
                out.push((x, y));
            }
        })?;
        Ok(out)
    }

    /// `max(|x|, |y|)` over `{P ≤ h}`.
    pub fn box_radius(&self, h: f64) -> f64 {
        match self.ellipse(h) {
            None => 0.0,
            Some(el) => {
                let half_y = (el.r / el.nd).sqrt();
                let half_x = (el.r.sqrt() + self.b.abs() * half_y) / (2.0 * self.a);
                (el.xi.abs() + half_x).max(el.eta.abs() + half_y)
            }
        }
    }
}

struct Ellipse {
    a: f64,
    b: f64,
    xi: f64,
    eta: f64,
    r: f64,
    nd: f64,
    y_lo: f64,
    y_hi: f64,
}

impl Ellipse {
    fn for_each(&self, budget: u128, mut f: impl FnMut(i64, i64)) -> Result<()> {
        let rows = (self.y_hi - self.y_lo + 1.0).max(0.0);
        let width = (self.r.sqrt() / self.a + 2.0).max(1.0);
        let needed = (rows * width) as u128;
        if needed > budget {
            return Err(CountingError::Budget { what: "ellipse enumeration".into(), needed, budget });
        }
        let mut y = self.y_lo;
        while y <= self.y_hi {
            let v = y + self.eta;
            let w = (self.r - self.nd * v * v).max(0.0).sqrt();
            let slack = 1e-9 * (1.0 + w + self.xi.abs());
            let x_lo = ((-w - self.b * v) / (2.0 * self.a) - self.xi - slack).ceil();
            let x_hi = ((w - self.b * v) / (2.0 * self.a) - self.xi + slack).floor();
            let mut x = x_lo;
            while x <= x_hi {
                f(x as i64, y as i64);
                x += 1.0;
            }
            y += 1.0;
        }
        Ok(())
    }
}

impl IntQuadPoly2 {
    pub fn new(a: i64, b: i64, c: i64, d: i64, e: i64, f: i64) -> Self {
        Self { a, b, c, d, e, f }
    }

    pub fn eval(&self, x: i64, y: i64) -> i128 {
        let (x, y) = (x as i128, y as i128);
        self.a as i128 * x * x + self.b as i128 * x * y + self.c as i128 * y * y + self.d as i128 * x + self.e as i128 * y + self.f as i128
    }

    pub fn to_real(&self) -> QuadPoly2 {
        QuadPoly2::new(self.a as f64, self.b as f64, self.c as f64, self.d as f64, self.e as f64, self.f as f64)
    }

    pub fn height(&self) -> i64 {
        [self.a, self.b, self.c, self.d, self.e, self.f].iter().map(|c| c.abs()).max().unwrap_or(0)
    }
}

/// All integer solutions of `P(x, y) = 0`, found inside the completed-square
/// ellipse and confirmed exactly.
pub fn solve_quadratic_integer(p: &IntQuadPoly2) -> Result<Vec<(i64, i64)>> {
    let real = p.to_real();
    real.require_definite(0.0)?;
    let Some(el) = real.ellipse(0.5) else { return Ok(Vec::new()) };
    let mut out = Vec::new();
    el.for_each(DEFAULT_POINT_BUDGET, |x, y| {
        if p.eval(x, y) == 0 {
            out.push((x, y));
        }
    })?;
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct NearZeroCount {
    /// `#{(x, y) ∈ ℤ² : |P(x, y)| < δ}`.
    pub count: u64,
    /// Sum over `|r| ≤ R` of the solution counts of `P̃ = r`.
    pub pipeline_bound: u64,
    /// Common denominator of the rational approximation.
    pub q: u64,
    pub t: f64,
    pub r_bound: f64,
    /// Integer levels `r` with at least one solution.
    pub levels: usize,
    pub approximation: IntQuadPoly2,
}

/// Exact count of `|P| < δ` and the bound obtained by approximating the six
/// coefficients with a common denominator `q ≤ T` and counting the level sets
/// of the resulting integer polynomial.
pub fn count_near_zero(p: &QuadPoly2, delta: f64, min_disc: f64) -> Result<NearZeroCount> {
    if !(delta > 0.0) {
        return Err(CountingError::Invalid(format!("delta must be positive, got {delta}")));
    }
    p.require_definite(min_disc)?;
    let count = match p.ellipse(delta) {
        None => 0,
        Some(el) => {
            let mut n = 0u64;
            el.for_each(DEFAULT_POINT_BUDGET, |x, y| {
                if p.eval(x as f64, y as f64).abs() < delta {
                    n += 1;
                }
            })?;
            n
        }
    };
    let rad = p.box_radius(delta).floor();
    let mono = [rad * rad, rad * rad, rad * rad, rad, rad, 1.0];
    let z = delta + 1.0 + p.height();
    let mut t = (1.0 + (z.powf(12.0 / 7.0) * delta.powf(-6.0 / 7.0)).min(z.powi(12))).min(PIPELINE_MAX_T);
    loop {
        let approx = dirichlet_approx(&p.coefficients(), t)?;
        let c = &approx.p;
        let pt = IntQuadPoly2::new(c[0], c[1], c[2], c[3], c[4], c[5]);
        let real = pt.to_real();
        if !real.is_positive_definite() {
            if t >= PIPELINE_MAX_T {
                return Err(CountingError::Guard("approximating polynomial is not definite".into()));
            }
            t = (t * 4.0).min(PIPELINE_MAX_T);
            continue;
        }
        let qf = approx.q as f64;
        let err: f64 = p.coefficients().iter().zip(c).zip(mono).map(|((x, pi), m)| (qf * x - *pi as f64).abs() * m).sum();
        let r_bound = qf * delta + err;
        let r_int = r_bound.floor() as i64;
        let mut hist: BTreeMap<i128, u64> = BTreeMap::new();
        if let Some(el) = real.ellipse(r_int as f64 + 0.5) {
            el.for_each(DEFAULT_POINT_BUDGET, |x, y| {
                let v = pt.eval(x, y);
                if v.abs() <= r_int as i128 {
                    *hist.entry(v).or_default() += 1;
                }
            })?;
        }
        return Ok(NearZeroCount {
            count,
            pipeline_bound: hist.values().sum(),
            q: approx.q,
            t,
            r_bound,
            levels: hist.len(),
            approximation: pt,
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn integer_solutions() {
        let mut s = solve_quadratic_integer(&IntQuadPoly2::new(1, 0, 1, 0, 0, -5)).unwrap();
        s.sort();
        assert_eq!(s, vec![(-2, -1), (-2, 1), (-1, -2), (-1, 2), (1, -2), (1, 2), (2, -1), (2, 1)]);
        assert!(solve_quadratic_integer(&IntQuadPoly2::new(1, 0, 1, 0, 0, 1)).unwrap().is_empty());
        assert_eq!(solve_quadratic_integer(&IntQuadPoly2::new(1, 1, 1, 0, 0, -1)).unwrap().len(), 6);
        assert!(matches!(solve_quadratic_integer(&IntQuadPoly2::new(1, 3, 1, 0, 0, -1)), Err(CountingError::NotDefinite)));
    }

    #[test]
    fn completed_square_identity() {
        let p = QuadPoly2::new(2.0, 0.7, 1.3, -0.4, 2.2, -3.0);
        let (xi, eta, p0) = p.center();
        let disc = p.discriminant();
        for (x, y) in [(0.3, -1.2), (4.0, 2.5), (-7.0, 0.1)] {
            let v = ((2.0 * p.a * (x + xi) + p.b * (y + eta)).powi(2) - disc * (y + eta).powi(2)) / (4.0 * p.a) + p0;
            assert!((v - p.eval(x, y)).abs() < 1e-10);
        }
    }

    #[test]
    fn near_zero_examples() {
        let c = count_near_zero(&QuadPoly2::new(1.0, 0.0, 1.0, 0.0, 0.0, -25.0), 0.5, 1e-9).unwrap();
        assert_eq!(c.count, 12);
        assert!(c.pipeline_bound >= 12);
        assert_eq!(count_near_zero(&QuadPoly2::new(1.0, 0.0, 1.0, 0.0, 0.0, 3.0), 2.0, 1e-9).unwrap().count, 0);
        let shifted = QuadPoly2::new(1.0, 0.0, 1.0, -1.0, 0.0, -1.75);
        assert_eq!(count_near_zero(&shifted, 0.3, 1e-9).unwrap().count, 2);
        assert_eq!(shifted.points_in_window(-0.3, 0.3, 1000).unwrap().len(), 2);
    }

    #[test]
    fn discriminant_bound_is_enforced() {
        let p = QuadPoly2::new(1.0, 2.0, 1.0 + 1e-12, 0.0, 0.0, -1.0);
        assert!(matches!(count_near_zero(&p, 0.1, 1e-6), Err(CountingError::Discriminant { .. })));
    }

    #[test]
    fn count_is_below_pipeline_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..30 {
            let a: f64 = rng.gen_range(0.5..3.0);
            let c = rng.gen_range(0.5..3.0);
            let b = rng.gen_range(-1.0..1.0) * (4.0 * a * c).sqrt() * 0.9;
            let p = QuadPoly2::new(a, b, c, rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), rng.gen_range(-30.0..5.0));
            let r = count_near_zero(&p, rng.gen_range(0.05..2.0), 1e-9).unwrap();
            assert!(r.count <= r.pipeline_bound, "{p:?} {r:?}");
        }
    }

    #[test]
    fn solution_counts_grow_slowly_with_height() {
        // worst count of x² + y² = n over dyadic windows of n
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for j in 4..=12 {
            let worst = (1i64 << j..1i64 << (j + 1))
                .map(|n| solve_quadratic_integer(&IntQuadPoly2::new(1, 0, 1, 0, 0, -n)).unwrap().len())
                .max()
                .unwrap();
            xs.push(((1i64 << j) as f64).ln());
            ys.push((worst as f64).ln());
        }
        let n = xs.len() as f64;
        let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
        let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
        assert!(slope <= 0.3, "{slope}");
    }
}
