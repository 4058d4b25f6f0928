//! The `C₂` root system of `Sp₄(ℝ)` with the Killing normalization.

use num_rational::Rational64;

/// Positive roots, multiplicities, `ρ`, the Weyl group and the dual norm scale.
#[derive(Debug, Clone)]
pub struct RootSystemData {
    pub positive_roots: [[i64; 2]; 4],
    pub multiplicities: [u32; 4],
    pub rho: [Rational64; 2],
    /// The eight signed permutations as 2×2 integer matrices acting on `(λ₁, λ₂)`.
    pub weyl_group: [[[i64; 2]; 2]; 8],
    /// `⟨λ, λ⟩ = dual_norm_scale · (λ₁² + λ₂²)`.
    pub dual_norm_scale: Rational64,
    /// Vertices of `C_ρ`, the convex hull of `W.ρ`.
    pub c_rho_vertices: [[i64; 2]; 8],
}

impl Default for RootSystemData {
    fn default() -> Self {
        Self::new()
    }
}

impl RootSystemData {
    pub fn new() -> Self {
        let positive_roots = [[1, -1], [1, 1], [2, 0], [0, 2]];
        let mut sum = [0i64; 2];
        for r in &positive_roots {
            sum[0] += r[0];
            sum[1] += r[1];
        }
        let rho = [Rational64::new(sum[0], 2), Rational64::new(sum[1], 2)];
        let mut weyl_group = [[[0i64; 2]; 2]; 8];
        let mut idx = 0;
        for swap in [false, true] {
            for s1 in [1, -1] {
                for s2 in [1, -1] {
                    weyl_group[idx] = if swap { [[0, s1], [s2, 0]] } else { [[s1, 0], [0, s2]] };
                    idx += 1;
                }
            }
        }
        let c_rho_vertices = [[2, 1], [1, 2], [-1, 2], [-2, 1], [-2, -1], [-1, -2], [1, -2], [2, -1]];
        Self {
            positive_roots,
            multiplicities: [1; 4],
            rho,
            weyl_group,
            dual_norm_scale: Rational64::new(1, 12),
            c_rho_vertices,
        }
    }

    pub fn dual_norm_sq(&self, l: [Rational64; 2]) -> Rational64 {
        self.dual_norm_scale * (l[0] * l[0] + l[1] * l[1])
    }

    pub fn rho_f64(&self) -> [f64; 2] {
        [*self.rho[0].numer() as f64 / *self.rho[0].denom() as f64, *self.rho[1].numer() as f64 / *self.rho[1].denom() as f64]
    }

    /// Membership of a real point in `C_ρ`: `|x| + |y| ≤ 3` and `max(|x|, |y|) ≤ 2`.
    pub fn in_c_rho(&self, x: f64, y: f64, tol: f64) -> bool {
        x.abs() + y.abs() <= 3.0 + tol && x.abs().max(y.abs()) <= 2.0 + tol
    }

    pub fn weyl_apply<T>(&self, w: usize, l: [T; 2]) -> [T; 2]
    where
        T: Copy + std::ops::Neg<Output = T> + Default,
    {
        let m = self.weyl_group[w];
        let pick = |c: i64, v: T| match c {
            1 => v,
            -1 => -v,
            _ => T::default(),
        };
        let comp = |row: [i64; 2]| if row[0] != 0 { pick(row[0], l[0]) } else { pick(row[1], l[1]) };
        [comp(m[0]), comp(m[1])]
    }
}
