//! Exact arithmetic over the Gaussian integers and small dense integer matrices.
//!
//! Everything here is bit-exact. Dimensions are tiny (at most 64), so the
//! routines favour clarity over blocking or vectorisation.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer;
use serde::Serialize;

/// A complex number with integer real and imaginary parts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub struct GaussianInt {
    pub re: i64,
    pub im: i64,
}

impl GaussianInt {
    pub const ZERO: Self = Self { re: 0, im: 0 };
    pub const ONE: Self = Self { re: 1, im: 0 };
    pub const I: Self = Self { re: 0, im: 1 };

    pub const fn new(re: i64, im: i64) -> Self {
        Self { re, im }
    }

    /// `i^k` for any `k` (taken mod 4).
    pub const fn i_pow(k: u8) -> Self {
        match k % 4 {
            0 => Self::new(1, 0),
            1 => Self::new(0, 1),
            2 => Self::new(-1, 0),
            _ => Self::new(0, -1),
        }
    }

    pub const fn conj(self) -> Self {
        Self::new(self.re, -self.im)
    }

    pub const fn is_zero(self) -> bool {
        self.re == 0 && self.im == 0
    }

    pub const fn is_real(self) -> bool {
        self.im == 0
    }

    /// |z|^2
    pub const fn norm_sq(self) -> i64 {
        self.re * self.re + self.im * self.im
    }
}

impl Add for GaussianInt {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl Sub for GaussianInt {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Neg for GaussianInt {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

impl Mul for GaussianInt {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::new(
            self.re * rhs.re - self.im * rhs.im,
            self.re * rhs.im + self.im * rhs.re,
        )
    }
}

impl fmt::Display for GaussianInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re, self.im) {
            (re, 0) => write!(f, "{re}"),
            (0, 1) => write!(f, "i"),
            (0, -1) => write!(f, "-i"),
            (0, im) => write!(f, "{im}i"),
            (re, im) if im < 0 => write!(f, "{re}-{}i", -im),
            (re, im) => write!(f, "{re}+{im}i"),
        }
    }
}

/// Square matrix with Gaussian-integer entries, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GaussianMatrix {
    dim: usize,
    entries: Vec<GaussianInt>,
}

impl GaussianMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![GaussianInt::ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for k in 0..dim {
            m.set(k, k, GaussianInt::ONE);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> GaussianInt) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                entries.push(f(r, c));
            }
        }
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> GaussianInt {
        self.entries[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: GaussianInt) {
        self.entries[row * self.dim + col] = value;
    }

    pub fn entries(&self) -> &[GaussianInt] {
        &self.entries
    }

    pub fn scale(&self, factor: GaussianInt) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|&e| e * factor).collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self.get(c, r).conj())
    }

    pub fn is_hermitian(&self) -> bool {
        *self == self.adjoint()
    }

    pub fn is_real(&self) -> bool {
        self.entries.iter().all(|e| e.is_real())
    }

    pub fn trace(&self) -> GaussianInt {
        (0..self.dim).fold(GaussianInt::ZERO, |acc, k| acc + self.get(k, k))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[GaussianInt]) -> Vec<GaussianInt> {
        assert_eq!(
            v.len(),
            self.dim,
            "vector length must match matrix dimension"
        );
        (0..self.dim)
            .map(|r| (0..self.dim).fold(GaussianInt::ZERO, |acc, c| acc + self.get(r, c) * v[c]))
            .collect()
    }

    /// Column `col` as a real integer vector, or `None` if any entry is complex.
    pub fn real_column(&self, col: usize) -> Option<Vec<i64>> {
        (0..self.dim)
            .map(|r| {
                let e = self.get(r, col);
                e.is_real().then_some(e.re)
            })
            .collect()
    }
}

impl Add for &GaussianMatrix {
    type Output = GaussianMatrix;
    fn add(self, rhs: &GaussianMatrix) -> GaussianMatrix {
        assert_eq!(self.dim, rhs.dim);
        GaussianMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &GaussianMatrix {
    type Output = GaussianMatrix;
    fn sub(self, rhs: &GaussianMatrix) -> GaussianMatrix {
        assert_eq!(self.dim, rhs.dim);
        GaussianMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &GaussianMatrix {
    type Output = GaussianMatrix;
    fn mul(self, rhs: &GaussianMatrix) -> GaussianMatrix {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = GaussianMatrix::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..n {
                    let idx = r * n + c;
                    out.entries[idx] = out.entries[idx] + a * rhs.get(k, c);
                }
            }
        }
        out
    }
}

/// Greatest common divisor of the absolute values of `values` (0 for an all-zero slice).
pub fn content(values: &[i64]) -> i64 {
    values.iter().fold(0i64, |g, &v| g.gcd(&v))
}

/// Divides out the content and flips the sign so the first nonzero entry is
/// positive. Returns `None` for the zero vector.
pub fn primitive_part(values: &[i64]) -> Option<Vec<i64>> {
    let g = content(values);
    if g == 0 {
        return None;
    }
    let lead = values.iter().copied().find(|&v| v != 0)?;
    let g = if lead < 0 { -g } else { g };
    Some(values.iter().map(|&v| v / g).collect())
}

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Rank of an integer matrix given as rows, by fraction-free Gaussian elimination.
#[allow(clippy::needless_range_loop)]
pub fn integer_rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&v| i128::from(v)).collect())
        .collect();
    let ncols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, pivot);
        for r in rank + 1..m.len() {
            let factor = m[r][col];
            if factor == 0 {
                continue;
            }
            let lead = m[rank][col];
            for c in col..ncols {
                m[r][c] = m[r][c] * lead - m[rank][c] * factor;
            }
            let g = m[r].iter().fold(0i128, |g, &v| g.gcd(&v));
            if g > 1 {
                m[r].iter_mut().for_each(|v| *v /= g);
            }
        }
        rank += 1;
    }
    rank
}
