//! Hermite and Smith normal forms for 4×4 integer matrices.

use crate::error::{CoreError, Result};
use crate::intmat::{egcd, gcd_i128, IntMat4};

/// Row-style Hermite normal form `U·M` with `U ∈ GL₄(ℤ)`: upper triangular,
/// positive diagonal, entries above each pivot reduced into `[0, pivot)`.
pub fn hnf(m: &IntMat4) -> Result<IntMat4> {
    let mut a = [[0i128; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            a[i][j] = m[i][j] as i128;
        }
    }
    hnf_in_place(&mut a)?;
    let mut out = [[0i64; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = i64::try_from(a[i][j]).map_err(|_| CoreError::Overflow)?;
        }
    }
    Ok(out)
}

fn hnf_in_place<const N: usize>(a: &mut [[i128; N]; N]) -> Result<()> {
    for c in 0..N {
        for i in (c + 1)..N {
            if a[i][c] == 0 {
                continue;
            }
            let (g, s, t) = egcd(a[c][c], a[i][c]);
            let (u, v) = (a[c][c] / g, a[i][c] / g);
            for k in c..N {
                let (x, y) = (a[c][k], a[i][k]);
                a[c][k] = s * x + t * y;
                a[i][k] = u * y - v * x;
            }
        }
        if a[c][c] == 0 {
            return Err(CoreError::Singular);
        }
        if a[c][c] < 0 {
            for k in c..N {
                a[c][k] = -a[c][k];
            }
        }
        let pivot = a[c][c];
        for i in 0..c {
            let q = a[i][c].div_euclid(pivot);
            if q != 0 {
                for k in c..N {
                    a[i][k] -= q * a[c][k];
                }
            }
        }
    }
    Ok(())
}

/// HNF of a 2×2 nonsingular integer matrix.
pub fn hnf2(m: &[[i64; 2]; 2]) -> Result<[[i64; 2]; 2]> {
    let mut a = [[m[0][0] as i128, m[0][1] as i128], [m[1][0] as i128, m[1][1] as i128]];
    hnf_in_place(&mut a)?;
    Ok([[a[0][0] as i64, a[0][1] as i64], [a[1][0] as i64, a[1][1] as i64]])
}

/// HNF of an upper triangular matrix with positive diagonal (only the
/// above-pivot reduction is needed).
pub fn hnf_upper(m: &IntMat4) -> IntMat4 {
    debug_assert!(crate::intmat::is_upper_triangular(m));
    let mut a = *m;
    for c in 1..4 {
        let pivot = a[c][c];
        for i in 0..c {
            let q = a[i][c].div_euclid(pivot);
            if q != 0 {
                for k in c..4 {
                    a[i][k] -= q * a[c][k];
                }
            }
        }
    }
    a
}

/// Elementary divisors `e₁ | e₂ | e₃ | e₄` via determinantal divisors.
pub fn elementary_divisors(m: &IntMat4) -> Result<[i128; 4]> {
    let a = |i: usize, j: usize| m[i][j] as i128;
    let mut d1 = 0i128;
    for i in 0..4 {
        for j in 0..4 {
            d1 = gcd_i128(d1, a(i, j));
        }
    }
    let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let mut d2 = 0i128;
    for &(r0, r1) in &pairs {
        for &(c0, c1) in &pairs {
            d2 = gcd_i128(d2, a(r0, c0) * a(r1, c1) - a(r0, c1) * a(r1, c0));
        }
    }
    let triples = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];
    let mut d3 = 0i128;
    for rows in &triples {
        for cols in &triples {
            let mut sub = [[0i128; 3]; 3];
            for (x, &r) in rows.iter().enumerate() {
                for (y, &c) in cols.iter().enumerate() {
                    sub[x][y] = a(r, c);
                }
            }
            d3 = gcd_i128(d3, crate::intmat::det3(sub));
        }
    }
    let d4 = crate::intmat::det(m).abs();
    if d4 == 0 {
        return Err(CoreError::Singular);
    }
    Ok([d1, d2 / d1, d3 / d2, d4 / d3])
}

/// Exponent of `p` in `n`, or `None` if `n` is not a power of `p`.
pub fn p_power_exponent(mut n: i128, p: i128) -> Option<u32> {
    if n <= 0 {
        return None;
    }
    let mut k = 0;
    while n % p == 0 {
        n /= p;
        k += 1;
    }
    (n == 1).then_some(k)
}

/// Double-coset label `(a, b)` of `M ∈ S(pʳ)`: the Smith form is
/// `diag(pᵃ, pᵇ, p^{r−b}, p^{r−a})` with `0 ≤ a ≤ b ≤ r/2`.
pub fn snf_exponents(m: &IntMat4, p: i64, r: u32) -> Result<(u32, u32)> {
    let e = elementary_divisors(m)?;
    let bad = || CoreError::DivisorPattern { p, divisors: e };
    let mut k = [0u32; 4];
    for i in 0..4 {
        k[i] = p_power_exponent(e[i], p as i128).ok_or_else(bad)?;
    }
    if k[0] + k[3] != r || k[1] + k[2] != r || 2 * k[1] > r {
        return Err(bad());
    }
    Ok((k[0], k[1]))
}
