//! Small fixed-size integer matrices.

use crate::error::{CoreError, Result};

pub type IntMat4 = [[i64; 4]; 4];
pub type IntMat2 = [[i64; 2]; 2];

/// The standard skew form `(0 I; -I 0)`.
pub const J: IntMat4 = [[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]];

pub const IDENTITY: IntMat4 = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]];

pub fn diag(d: [i64; 4]) -> IntMat4 {
    let mut m = [[0; 4]; 4];
    for i in 0..4 {
        m[i][i] = d[i];
    }
    m
}

pub fn scalar(s: i64) -> IntMat4 {
    diag([s; 4])
}

/// Product with an overflow check; entries stay far below `i64::MAX` in practice.
pub fn mul(a: &IntMat4, b: &IntMat4) -> IntMat4 {
    try_mul(a, b).expect("integer matrix product overflowed i64")
}

pub fn try_mul(a: &IntMat4, b: &IntMat4) -> Result<IntMat4> {
    let mut out = [[0i64; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut acc: i128 = 0;
            for k in 0..4 {
                acc += a[i][k] as i128 * b[k][j] as i128;
            }
            out[i][j] = i64::try_from(acc).map_err(|_| CoreError::Overflow)?;
        }
    }
    Ok(out)
}

pub fn transpose(a: &IntMat4) -> IntMat4 {
    let mut t = [[0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            t[i][j] = a[j][i];
        }
    }
    t
}

pub fn scale(a: &IntMat4, s: i64) -> IntMat4 {
    let mut out = *a;
    for row in out.iter_mut() {
        for x in row.iter_mut() {
            *x *= s;
        }
    }
    out
}

/// Entrywise exact division; the caller guarantees divisibility.
pub fn scale_div(a: &IntMat4, s: i64) -> IntMat4 {
    let mut out = *a;
    for row in out.iter_mut() {
        for x in row.iter_mut() {
            debug_assert_eq!(*x % s, 0);
            *x /= s;
        }
    }
    out
}

pub fn is_upper_triangular(a: &IntMat4) -> bool {
    (0..4).all(|i| (0..i).all(|j| a[i][j] == 0))
}

/// `MᵀJM` for an integer matrix.
pub fn gram_j(m: &IntMat4) -> IntMat4 {
    mul(&mul(&transpose(m), &J), m)
}

/// `-J Mᵀ J`; for `M ∈ S(m)` this satisfies `M · adj = adj · M = m I`.
pub fn symplectic_adjoint(m: &IntMat4) -> IntMat4 {
    scale(&mul(&mul(&J, &transpose(m)), &J), -1)
}

/// Determinant by cofactor expansion in `i128`.
pub fn det(a: &IntMat4) -> i128 {
    let m = |i: usize, j: usize| a[i][j] as i128;
    let mut total = 0i128;
    for c in 0..4 {
        let cols: Vec<usize> = (0..4).filter(|&x| x != c).collect();
        let minor = det3([
            [m(1, cols[0]), m(1, cols[1]), m(1, cols[2])],
            [m(2, cols[0]), m(2, cols[1]), m(2, cols[2])],
            [m(3, cols[0]), m(3, cols[1]), m(3, cols[2])],
        ]);
        let sign = if c % 2 == 0 { 1 } else { -1 };
        total += sign * m(0, c) * minor;
    }
    total
}

pub fn det3(a: [[i128; 3]; 3]) -> i128 {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

pub fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Extended Euclid: returns `(g, s, t)` with `s·a + t·b = g = gcd(a, b) ≥ 0`.
pub fn egcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

pub fn mul2(a: &IntMat2, b: &IntMat2) -> IntMat2 {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

pub fn det2(a: &IntMat2) -> i64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

pub fn transpose2(a: &IntMat2) -> IntMat2 {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

/// Inverse of a unimodular 2×2 matrix.
pub fn inv_unimodular2(a: &IntMat2) -> IntMat2 {
    let d = det2(a);
    assert!(d == 1 || d == -1, "matrix is not unimodular");
    [[a[1][1] * d, -a[0][1] * d], [-a[1][0] * d, a[0][0] * d]]
}

/// Assemble `(A B; C D)` from 2×2 blocks.
pub fn from_blocks(a: &IntMat2, b: &IntMat2, c: &IntMat2, d: &IntMat2) -> IntMat4 {
    let mut m = [[0; 4]; 4];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = a[i][j];
            m[i][j + 2] = b[i][j];
            m[i + 2][j] = c[i][j];
            m[i + 2][j + 2] = d[i][j];
        }
    }
    m
}

/// Split into `(A, B, C, D)` 2×2 blocks.
pub fn blocks(m: &IntMat4) -> (IntMat2, IntMat2, IntMat2, IntMat2) {
    let blk = |r: usize, c: usize| [[m[r][c], m[r][c + 1]], [m[r + 1][c], m[r + 1][c + 1]]];
    (blk(0, 0), blk(0, 2), blk(2, 0), blk(2, 2))
}

/// Smith normal form of a nonsingular 2×2 matrix: `D = U · diag(d1, d2) · V` with
/// `U, V ∈ GL₂(ℤ)`, `d1 | d2`, `d1, d2 > 0`. Returns `(U, [d1, d2], V)`.
pub fn snf2(d: &IntMat2) -> (IntMat2, [i64; 2], IntMat2) {
    // Row and column operations on a working copy; track L·D·R = S.
    let mut s = *d;
    let mut l: IntMat2 = [[1, 0], [0, 1]];
    let mut r: IntMat2 = [[1, 0], [0, 1]];
    loop {
        // Column step: clear s[0][1] against s[0][0].
        if s[0][1] != 0 || s[0][0] == 0 {
            let (g, x, y) = egcd(s[0][0] as i128, s[0][1] as i128);
            let (g, x, y) = (g as i64, x as i64, y as i64);
            let (a, b) = (s[0][0] / g, s[0][1] / g);
            let op: IntMat2 = [[x, -b], [y, a]];
            s = mul2(&s, &op);
            r = mul2(&r, &op);
        }
        // Row step: clear s[1][0] against s[0][0].
        if s[1][0] != 0 {
            let (g, x, y) = egcd(s[0][0] as i128, s[1][0] as i128);
            let (g, x, y) = (g as i64, x as i64, y as i64);
            let (a, c) = (s[0][0] / g, s[1][0] / g);
            let op: IntMat2 = [[x, y], [-c, a]];
            s = mul2(&op, &s);
            l = mul2(&op, &l);
        }
        if s[0][1] == 0 && s[1][0] == 0 {
            if s[1][1] % s[0][0] == 0 {
                break;
            }
            // Fold the second diagonal entry into the first row to restore divisibility.
            let op: IntMat2 = [[1, 1], [0, 1]];
            s = mul2(&op, &s);
            l = mul2(&op, &l);
        }
    }
    if s[0][0] < 0 {
        let op: IntMat2 = [[-1, 0], [0, 1]];
        s = mul2(&op, &s);
        l = mul2(&op, &l);
    }
    if s[1][1] < 0 {
        let op: IntMat2 = [[1, 0], [0, -1]];
        s = mul2(&op, &s);
        l = mul2(&op, &l);
    }
    // D = L⁻¹ S R⁻¹.
    (inv_unimodular2(&l), [s[0][0], s[1][1]], inv_unimodular2(&r))
}
