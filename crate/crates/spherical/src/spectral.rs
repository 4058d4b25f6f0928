//! Spectral parameters in `𝔞*_ℂ` and the region containing the unitary spectrum.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Bound on the imaginary part along the exceptional families, in coordinates.
pub const EXCEPTIONAL_BOUND: f64 = 1.5811388300841898; // √(5/2)

/// `λ = λ₁e₁ + λ₂e₂` with `λ(H) = λ₁t₁ + λ₂t₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralParameter {
    pub lambda1: Complex64,
    pub lambda2: Complex64,
}

impl SpectralParameter {
    pub fn new(lambda1: Complex64, lambda2: Complex64) -> Self {
        Self { lambda1, lambda2 }
    }

    pub fn real(l1: f64, l2: f64) -> Self {
        Self::new(Complex64::new(l1, 0.0), Complex64::new(l2, 0.0))
    }

    /// `iρ = i(2, 1)`.
    pub fn i_rho() -> Self {
        Self::new(Complex64::new(0.0, 2.0), Complex64::new(0.0, 1.0))
    }

    /// The real vector of Killing norm `norm` in direction `(c₁, c₂)`.
    pub fn with_norm(direction: (f64, f64), norm: f64) -> Self {
        let s = norm * 12f64.sqrt() / direction.0.hypot(direction.1);
        Self::real(direction.0 * s, direction.1 * s)
    }

    pub fn re(&self) -> [f64; 2] {
        [self.lambda1.re, self.lambda2.re]
    }

    pub fn im(&self) -> [f64; 2] {
        [self.lambda1.im, self.lambda2.im]
    }

    pub fn is_real(&self) -> bool {
        self.lambda1.im == 0.0 && self.lambda2.im == 0.0
    }

    /// `(‖Re λ‖² + ‖Im λ‖²)^{1/2}` with `‖ν‖² = (ν₁² + ν₂²)/12`.
    pub fn norm(&self) -> f64 {
        ((self.lambda1.norm_sqr() + self.lambda2.norm_sqr()) / 12.0).sqrt()
    }

    /// Euclidean length of the coordinate vector; `|λ(H)| ≤ coordinate_norm(λ)·|t|`.
    pub fn coordinate_norm(&self) -> f64 {
        (self.lambda1.norm_sqr() + self.lambda2.norm_sqr()).sqrt()
    }

    /// Image under the `w`-th signed permutation, `w ∈ 0..8`.
    pub fn weyl(&self, w: usize) -> Self {
        let (a, b) = if w & 4 == 0 { (self.lambda1, self.lambda2) } else { (self.lambda2, self.lambda1) };
        let a = if w & 1 == 0 { a } else { -a };
        let b = if w & 2 == 0 { b } else { -b };
        Self::new(a, b)
    }

    pub fn weyl_orbit(&self) -> [Self; 8] {
        std::array::from_fn(|w| self.weyl(w))
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(self.lambda1 - o.lambda1, self.lambda2 - o.lambda2)
    }

    pub fn neg(&self) -> Self {
        Self::new(-self.lambda1, -self.lambda2)
    }
}

/// Which part of the spectrum region a parameter lies in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RegionPart {
    Tempered,
    /// `λ = (x + iy, −x + iy)`.
    ConjugateFamily,
    /// `λ₁ ∈ ℝ ∪ iℝ`, `λ₂ ∈ iℝ`.
    ImaginaryFamily,
}

/// The real plane and the two exceptional families: `(x + iy, −x + iy)` with
/// `|y| ≤ bound`, and `λ₁ ∈ ℝ ∪ iℝ`, `λ₂ ∈ iℝ` with `|Im λ| ≤ bound`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SpectrumRegion {
    pub bound: f64,
}

impl Default for SpectrumRegion {
    fn default() -> Self {
        Self { bound: EXCEPTIONAL_BOUND }
    }
}

impl SpectrumRegion {
    /// Exact membership of some Weyl image of `λ`.
    pub fn classify(&self, l: &SpectralParameter) -> Option<RegionPart> {
        if l.is_real() {
            return Some(RegionPart::Tempered);
        }
        let orbit = l.weyl_orbit();
        let conj = orbit.iter().any(|m| {
            m.lambda1 == -m.lambda2.conj() && m.lambda1.im.abs() <= self.bound
        });
        if conj {
            return Some(RegionPart::ConjugateFamily);
        }
        let imag = orbit.iter().any(|m| {
            let a_ok = m.lambda1.im == 0.0 || m.lambda1.re == 0.0;
            a_ok && m.lambda2.re == 0.0 && m.lambda1.im.hypot(m.lambda2.im) <= self.bound
        });
        imag.then_some(RegionPart::ImaginaryFamily)
    }

    pub fn contains(&self, l: &SpectralParameter) -> bool {
        self.classify(l).is_some()
    }

    /// `(x + iy, −x + iy)`.
    pub fn conjugate_member(x: f64, y: f64) -> SpectralParameter {
        SpectralParameter::new(Complex64::new(x, y), Complex64::new(-x, y))
    }

    /// `(iy, x)`.
    pub fn imaginary_member(x: f64, y: f64) -> SpectralParameter {
        SpectralParameter::new(Complex64::new(0.0, y), Complex64::new(x, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norms() {
        let l = SpectralParameter::with_norm((1.0, 1.0), 5.0);
        assert!((l.norm() - 5.0).abs() < 1e-12);
        let r = SpectralParameter::i_rho();
        assert!((r.norm() * r.norm() - 5.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn orbit_has_eight_points() {
        let l = SpectralParameter::real(3.0, 1.0);
        let mut pts: Vec<_> = l.weyl_orbit().iter().map(|m| (m.lambda1.re as i64, m.lambda2.re as i64)).collect();
        pts.sort();
        pts.dedup();
        assert_eq!(pts.len(), 8);
    }

    #[test]
    fn membership() {
        let r = SpectrumRegion::default();
        assert_eq!(r.classify(&SpectralParameter::real(4.0, -1.0)), Some(RegionPart::Tempered));
        assert_eq!(r.classify(&SpectrumRegion::conjugate_member(7.0, 1.2)), Some(RegionPart::ConjugateFamily));
        assert_eq!(r.classify(&SpectrumRegion::imaginary_member(7.0, -1.5)), Some(RegionPart::ImaginaryFamily));
        assert_eq!(r.classify(&SpectrumRegion::conjugate_member(7.0, 1.7)), None);
        let off = SpectralParameter::new(Complex64::new(1.0, 0.5), Complex64::new(2.0, 0.0));
        assert_eq!(r.classify(&off), None);
    }
}
