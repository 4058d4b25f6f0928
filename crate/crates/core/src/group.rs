//! Floating-point elements of `G = Sp₄(ℝ)` and `K ≅ U(2)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

pub type Mat4 = [[f64; 4]; 4];
pub type CMat2 = [[Complex64; 2]; 2];

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

pub const J_F64: Mat4 = [[0., 0., 1., 0.], [0., 0., 0., 1.], [-1., 0., 0., 0.], [0., -1., 0., 0.]];

pub fn mat_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut s = 0.0;
            for k in 0..4 {
                s += a[i][k] * b[k][j];
            }
            out[i][j] = s;
        }
    }
    out
}

pub fn mat_transpose(a: &Mat4) -> Mat4 {
    let mut t = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            t[i][j] = a[j][i];
        }
    }
    t
}

pub fn mat_identity() -> Mat4 {
    let mut m = [[0.0; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

pub fn frobenius_distance(a: &Mat4, b: &Mat4) -> f64 {
    let mut s = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            s += (a[i][j] - b[i][j]).powi(2);
        }
    }
    s.sqrt()
}

/// `‖gᵀJg − J‖_F`.
pub fn symplectic_residual(g: &Mat4) -> f64 {
    frobenius_distance(&mat_mul(&mat_mul(&mat_transpose(g), &J_F64), g), &J_F64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupElement {
    entries: Mat4,
    tolerance: f64,
}

impl GroupElement {
    pub fn new(entries: Mat4, tolerance: f64) -> Result<Self> {
        let residual = symplectic_residual(&entries);
        if !(residual <= tolerance) {
            return Err(CoreError::NotSymplectic { residual, tolerance });
        }
        Ok(Self { entries, tolerance })
    }

    pub fn with_default_tolerance(entries: Mat4) -> Result<Self> {
        Self::new(entries, DEFAULT_TOLERANCE)
    }

    pub fn identity() -> Self {
        Self { entries: mat_identity(), tolerance: DEFAULT_TOLERANCE }
    }

    pub fn entries(&self) -> &Mat4 {
        &self.entries
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// `exp(diag(t₁, t₂, −t₁, −t₂))`.
    pub fn exp_a(t1: f64, t2: f64) -> Self {
        let mut m = [[0.0; 4]; 4];
        m[0][0] = t1.exp();
        m[1][1] = t2.exp();
        m[2][2] = (-t1).exp();
        m[3][3] = (-t2).exp();
        Self { entries: m, tolerance: DEFAULT_TOLERANCE }
    }

    /// The element `(B C; −C B)` of `K` attached to `U = B + iC ∈ U(2)`.
    pub fn from_unitary(u: &CMat2) -> Self {
        let mut m = [[0.0; 4]; 4];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = u[i][j].re;
                m[i][j + 2] = u[i][j].im;
                m[i + 2][j] = -u[i][j].im;
                m[i + 2][j + 2] = u[i][j].re;
            }
        }
        Self { entries: m, tolerance: DEFAULT_TOLERANCE }
    }

    /// Inverse `U` of [`GroupElement::from_unitary`]; meaningful for elements of `K`.
    pub fn to_unitary(&self) -> CMat2 {
        let m = &self.entries;
        let mut u = [[Complex64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                u[i][j] = Complex64::new(m[i][j], m[i][j + 2]);
            }
        }
        u
    }

    /// Unipotent `(I X; 0 I)` with `X` symmetric.
    pub fn translation(x: [[f64; 2]; 2]) -> Self {
        let mut m = mat_identity();
        m[0][2] = x[0][0];
        m[0][3] = x[0][1];
        m[1][2] = x[1][0];
        m[1][3] = x[1][1];
        Self { entries: m, tolerance: DEFAULT_TOLERANCE }
    }

    /// Upper unipotent `(A 0; 0 A^{-T})` with `A` unit upper triangular, times a translation.
    pub fn unipotent(n12: f64, x: [[f64; 2]; 2]) -> Self {
        let mut a = mat_identity();
        a[0][1] = n12;
        a[3][2] = -n12;
        Self { entries: mat_mul(&a, &Self::translation(x).entries), tolerance: DEFAULT_TOLERANCE }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self { entries: mat_mul(&self.entries, &other.entries), tolerance: self.tolerance.max(other.tolerance) }
    }

    /// Symplectic inverse `J⁻¹gᵀJ = −J gᵀ J`.
    pub fn inverse(&self) -> Self {
        let t = mat_mul(&mat_mul(&J_F64, &mat_transpose(&self.entries)), &J_F64);
        let mut m = t;
        for row in m.iter_mut() {
            for x in row.iter_mut() {
                *x = -*x;
            }
        }
        Self { entries: m, tolerance: self.tolerance }
    }

    pub fn transpose(&self) -> Self {
        Self { entries: mat_transpose(&self.entries), tolerance: self.tolerance }
    }

    pub fn scaled(&self, s: f64) -> Mat4 {
        let mut m = self.entries;
        for row in m.iter_mut() {
            for x in row.iter_mut() {
                *x *= s;
            }
        }
        m
    }

    /// True if `kᵀk = I` within `tol`.
    pub fn is_orthogonal(&self, tol: f64) -> bool {
        frobenius_distance(&mat_mul(&mat_transpose(&self.entries), &self.entries), &mat_identity()) <= tol
    }
}

/// Random Haar-distributed element of `U(2)` from four Gaussian samples per column.
pub fn random_unitary<R: rand::Rng>(rng: &mut R) -> CMat2 {
    let mut gauss = || {
        let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
        let u2: f64 = rng.gen_range(0.0..1.0);
        let r = (-2.0 * u1.ln()).sqrt();
        Complex64::new(r * (std::f64::consts::TAU * u2).cos(), r * (std::f64::consts::TAU * u2).sin())
    };
    let a = [gauss(), gauss()];
    let b = [gauss(), gauss()];
    let na = (a[0].norm_sqr() + a[1].norm_sqr()).sqrt();
    let e1 = [a[0] / na, a[1] / na];
    let proj = e1[0].conj() * b[0] + e1[1].conj() * b[1];
    let c = [b[0] - proj * e1[0], b[1] - proj * e1[1]];
    let nc = (c[0].norm_sqr() + c[1].norm_sqr()).sqrt();
    let e2 = [c[0] / nc, c[1] / nc];
    [[e1[0], e2[0]], [e1[1], e2[1]]]
}

pub fn random_k<R: rand::Rng>(rng: &mut R) -> GroupElement {
    GroupElement::from_unitary(&random_unitary(rng))
}

pub fn cmat2_mul(a: &CMat2, b: &CMat2) -> CMat2 {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn cmat2_det(a: &CMat2) -> Complex64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

pub fn cmat2_inv(a: &CMat2) -> Option<CMat2> {
    let d = cmat2_det(a);
    if d.norm() < 1e-300 {
        return None;
    }
    Some([[a[1][1] / d, -a[0][1] / d], [-a[1][0] / d, a[0][0] / d]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn k_elements_are_orthogonal_symplectic() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let k = random_k(&mut rng);
            assert!(k.is_orthogonal(1e-12));
            assert!(symplectic_residual(k.entries()) < 1e-12);
            let back = GroupElement::from_unitary(&k.to_unitary());
            assert_eq!(back.entries(), k.entries());
        }
    }

    #[test]
    fn inverse_is_inverse() {
        let g = GroupElement::exp_a(0.3, -0.2).mul(&GroupElement::unipotent(0.7, [[0.1, 0.4], [0.4, -1.0]]));
        assert!(symplectic_residual(g.entries()) < 1e-12);
        let e = g.mul(&g.inverse());
        assert!(frobenius_distance(e.entries(), &mat_identity()) < 1e-12);
    }

    #[test]
    fn non_symplectic_rejected() {
        let mut m = mat_identity();
        m[0][0] = 2.0;
        assert!(GroupElement::with_default_tolerance(m).is_err());
    }
}
