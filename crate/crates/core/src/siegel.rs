//! The Siegel upper half space of degree two and the action of `G` on it.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::group::{cmat2_inv, cmat2_mul, CMat2, GroupElement};

pub type Sym2 = [[f64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SiegelPoint {
    pub x: Sym2,
    pub y: Sym2,
}

impl SiegelPoint {
    pub fn new(x: Sym2, y: Sym2) -> Result<Self> {
        if !(y[0][0] > 0.0 && y[0][0] * y[1][1] - y[0][1] * y[1][0] > 0.0) {
            return Err(CoreError::NotPositiveDefinite);
        }
        Ok(Self { x, y })
    }

    /// The base point `iI₂`.
    pub fn base() -> Self {
        Self { x: [[0.0; 2]; 2], y: [[1.0, 0.0], [0.0, 1.0]] }
    }

    pub fn as_complex(&self) -> CMat2 {
        let mut z = [[Complex64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                z[i][j] = Complex64::new(self.x[i][j], self.y[i][j]);
            }
        }
        z
    }

    pub fn distance_to(&self, other: &Self) -> f64 {
        let mut s = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                s += (self.x[i][j] - other.x[i][j]).powi(2) + (self.y[i][j] - other.y[i][j]).powi(2);
            }
        }
        s.sqrt()
    }
}

fn real_block(g: &GroupElement, r: usize, c: usize) -> CMat2 {
    let m = g.entries();
    let z = |v: f64| Complex64::new(v, 0.0);
    [[z(m[r][c]), z(m[r][c + 1])], [z(m[r + 1][c]), z(m[r + 1][c + 1])]]
}

fn add(a: &CMat2, b: &CMat2) -> CMat2 {
    [[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]]
}

/// `g.Z = (AZ + B)(CZ + D)⁻¹`.
pub fn moebius(g: &GroupElement, z: &SiegelPoint) -> Result<SiegelPoint> {
    let zc = z.as_complex();
    let (a, b, c, d) = (real_block(g, 0, 0), real_block(g, 0, 2), real_block(g, 2, 0), real_block(g, 2, 2));
    let num = add(&cmat2_mul(&a, &zc), &b);
    let den = add(&cmat2_mul(&c, &zc), &d);
    let inv = cmat2_inv(&den).ok_or(CoreError::Singular)?;
    let w = cmat2_mul(&num, &inv);
    let sym = |f: fn(&Complex64) -> f64| {
        let off = 0.5 * (f(&w[0][1]) + f(&w[1][0]));
        [[f(&w[0][0]), off], [off, f(&w[1][1])]]
    };
    SiegelPoint::new(sym(|c| c.re), sym(|c| c.im))
}

/// Symmetric positive definite square root of a 2×2 matrix.
pub fn sqrt_spd(y: &Sym2) -> Sym2 {
    let s = (y[0][0] * y[1][1] - y[0][1] * y[1][0]).sqrt();
    let t = (y[0][0] + y[1][1] + 2.0 * s).sqrt();
    [[(y[0][0] + s) / t, y[0][1] / t], [y[1][0] / t, (y[1][1] + s) / t]]
}

/// `(I X; 0 I)(V 0; 0 V⁻¹)` with `V = √Y`, mapping `iI₂` to `Z`.
pub fn point_to_group(z: &SiegelPoint) -> GroupElement {
    let v = sqrt_spd(&z.y);
    let det = v[0][0] * v[1][1] - v[0][1] * v[1][0];
    let vinv = [[v[1][1] / det, -v[0][1] / det], [-v[1][0] / det, v[0][0] / det]];
    let mut d = [[0.0; 4]; 4];
    for i in 0..2 {
        for j in 0..2 {
            d[i][j] = v[i][j];
            d[i + 2][j + 2] = vinv[i][j];
        }
    }
    let t = GroupElement::translation(z.x);
    let dg = GroupElement::new(d, f64::INFINITY).expect("infinite tolerance");
    let g = t.mul(&dg);
    GroupElement::with_default_tolerance(*g.entries()).unwrap_or(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{frobenius_distance, GroupElement, J_F64};

    #[test]
    fn identity_and_translation() {
        let z = SiegelPoint::new([[0.3, -0.1], [-0.1, 0.7]], [[2.0, 0.5], [0.5, 1.0]]).unwrap();
        assert!(moebius(&GroupElement::identity(), &z).unwrap().distance_to(&z) < 1e-14);
        let x0 = [[1.0, 2.0], [2.0, -3.0]];
        let w = moebius(&GroupElement::translation(x0), &z).unwrap();
        let expected = SiegelPoint::new([[1.3, 1.9], [1.9, -2.3]], z.y).unwrap();
        assert!(w.distance_to(&expected) < 1e-14);
    }

    #[test]
    fn weyl_element_fixes_base_point() {
        let j = GroupElement::with_default_tolerance(J_F64).unwrap();
        assert!(moebius(&j, &SiegelPoint::base()).unwrap().distance_to(&SiegelPoint::base()) < 1e-14);
    }

    #[test]
    fn point_to_group_examples() {
        assert!(frobenius_distance(point_to_group(&SiegelPoint::base()).entries(), GroupElement::identity().entries()) < 1e-15);
        let z = SiegelPoint::new([[0.0; 2]; 2], [[4.0, 0.0], [0.0, 1.0]]).unwrap();
        let g = point_to_group(&z);
        let mut expected = [[0.0; 4]; 4];
        expected[0][0] = 2.0;
        expected[1][1] = 1.0;
        expected[2][2] = 0.5;
        expected[3][3] = 1.0;
        assert!(frobenius_distance(g.entries(), &expected) < 1e-15);
    }

    #[test]
    fn round_trip() {
        let z = SiegelPoint::new([[0.3, -0.8], [-0.8, 1.7]], [[1.5, -0.6], [-0.6, 0.9]]).unwrap();
        let g = point_to_group(&z);
        assert!(moebius(&g, &SiegelPoint::base()).unwrap().distance_to(&z) < 1e-10);
    }
}
