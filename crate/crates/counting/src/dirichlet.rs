//! Simultaneous Dirichlet approximation by exhaustive search over denominators.

use serde::Serialize;

use crate::error::{CountingError, Result};

/// Largest `T` the exhaustive search accepts.
pub const MAX_T: f64 = 1e7;
const SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Approximation {
    pub q: u64,
    pub p: Vec<i64>,
    /// `max_j |q ξ_j − p_j|`.
    pub max_error: f64,
}

impl Approximation {
    /// `|ξ_j − p_j/q| ≤ 1/(q T^{1/n})` for every `j`.
    pub fn satisfies(&self, xi: &[f64], t: f64) -> bool {
        let bound = 1.0 / (self.q as f64 * t.powf(1.0 / xi.len() as f64));
        self.q as f64 <= t
            && xi.iter().zip(&self.p).all(|(x, p)| (x - *p as f64 / self.q as f64).abs() <= bound * (1.0 + SLACK))
    }
}

/// Smallest `q ≤ T` with integers `p_j` such that `|ξ_j − p_j/q| ≤ 1/(q T^{1/n})`.
pub fn dirichlet_approx(xi: &[f64], t: f64) -> Result<Approximation> {
    if xi.is_empty() || !(t > 1.0) || t > MAX_T || xi.iter().any(|x| !x.is_finite()) {
        return Err(CountingError::Invalid(format!("dirichlet_approx needs n ≥ 1 and 1 < T ≤ {MAX_T}")));
    }
    let tol = t.powf(-1.0 / xi.len() as f64) * (1.0 + SLACK);
    for q in 1..=t.floor() as u64 {
        let qf = q as f64;
        let p: Vec<i64> = xi.iter().map(|x| (qf * x).round() as i64).collect();
        let max_error = xi.iter().zip(&p).map(|(x, p)| (qf * x - *p as f64).abs()).fold(0.0, f64::max);
        if max_error <= tol {
            return Ok(Approximation { q, p, max_error });
        }
    }
    Err(CountingError::Guard(format!("no denominator q ≤ {t} found for {xi:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn examples() {
        // q = 1 meets the bound 1/2 with equality; q = 2 is exact
        let a = dirichlet_approx(&[0.5], 2.0).unwrap();
        assert_eq!((a.q, a.max_error), (1, 0.5));
        assert!(Approximation { q: 2, p: vec![1], max_error: 0.0 }.satisfies(&[0.5], 2.0));
        assert_eq!(dirichlet_approx(&[3.0, -2.0], 17.5).unwrap().q, 1);
        let s = dirichlet_approx(&[2f64.sqrt()], 10.0).unwrap();
        assert!(s.satisfies(&[2f64.sqrt()], 10.0) && s.q <= 5);
        let five = Approximation { q: 5, p: vec![7], max_error: 0.0 };
        assert!(five.satisfies(&[2f64.sqrt()], 10.0));
    }

    #[test]
    fn postcondition_on_random_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let n = rng.gen_range(1..=4);
            let xi: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
            let t = rng.gen_range(1.01..100.0);
            let a = dirichlet_approx(&xi, t).unwrap();
            assert!(a.satisfies(&xi, t), "{xi:?} {t} {a:?}");
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(dirichlet_approx(&[], 5.0).is_err());
        assert!(dirichlet_approx(&[0.1], 1.0).is_err());
    }
}
