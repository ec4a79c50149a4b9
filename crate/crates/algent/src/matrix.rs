//! Square matrices over the exact rationals.
//!
//! Used for Lind–Ward local entropies: the characteristic polynomial of a
//! rational matrix is computed exactly (Leverrier–Faddeev), and its p-adic
//! content then yields the local factor. Sizes are desk scale, so the
//! O(n^4) exact recursion is a non-issue.

use num::{BigInt, BigRational, One, Zero};

use crate::error::Error;
use crate::laurent::{ExponentVector, LaurentPoly};
use crate::Result;

/// An `n×n` matrix with exact rational entries, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    n: usize,
    entries: Vec<BigRational>,
}

impl RationalMatrix {
    /// Build from row-major entries; `entries.len()` must equal `n²`.
    pub fn new(n: usize, entries: Vec<BigRational>) -> Self {
        assert_eq!(entries.len(), n * n, "entry count must be n^2");
        RationalMatrix { n, entries }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            *m.get_mut(i, i) = BigRational::one();
        }
        m
    }

    pub fn zero(n: usize) -> Self {
        RationalMatrix {
            n,
            entries: vec![BigRational::zero(); n * n],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.n + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut BigRational {
        &mut self.entries[i * self.n + j]
    }

    /// Exact matrix product.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "size mismatch");
        let n = self.n;
        let mut out = Self::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let prod = a * other.get(k, j);
                    *out.get_mut(i, j) += prod;
                }
            }
        }
        out
    }

    pub fn trace(&self) -> BigRational {
        (0..self.n)
            .map(|i| self.get(i, i))
            .fold(BigRational::zero(), |a, b| a + b)
    }

    /// Characteristic polynomial `det(tI − a)` as a dim-1 Laurent
    /// polynomial (monic of degree n), by the exact Leverrier–Faddeev
    /// recursion.
    pub fn char_poly(&self) -> LaurentPoly {
        let n = self.n;
        // c[k] is the coefficient of t^(n-k); c[0] = 1.
        let mut coeffs = vec![BigRational::one()];
        let mut m = self.clone();
        for k in 1..=n {
            let ck = -(m.trace() / BigRational::from_integer(BigInt::from(k as i64)));
            coeffs.push(ck.clone());
            if k < n {
                // m ← a · (m + c_k I)
                let mut shifted = m;
                for i in 0..n {
                    *shifted.get_mut(i, i) += &ck;
                }
                m = self.mul(&shifted);
            }
        }
        LaurentPoly::from_terms(
            1,
            coeffs
                .into_iter()
                .enumerate()
                .map(|(k, c)| (ExponentVector(vec![(n - k) as i64]), c)),
        )
    }

    /// Exact determinant via the characteristic polynomial:
    /// `det(a) = (−1)^n · χ_a(0)`.
    pub fn det(&self) -> BigRational {
        let chi = self.char_poly();
        let c0 = chi.coeff(&ExponentVector(vec![0]));
        if self.n.is_multiple_of(2) {
            c0
        } else {
            -c0
        }
    }

    /// Parse the matrix file format: first line `n`, then `n` lines of `n`
    /// whitespace-separated rationals (`int` or `int/int`).
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let first = lines
            .next()
            .ok_or_else(|| Error::parse(0, "empty matrix file"))?;
        let n: usize = first.trim().parse().map_err(|_| {
            Error::parse(0, format!("expected matrix size, found '{}'", first.trim()))
        })?;
        if n == 0 {
            return Err(Error::parse(0, "matrix size must be positive"));
        }
        let mut entries = Vec::with_capacity(n * n);
        for (row_idx, line) in lines.take(n).enumerate() {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != n {
                return Err(Error::parse(
                    0,
                    format!(
                        "row {} has {} entries, expected {}",
                        row_idx + 1,
                        fields.len(),
                        n
                    ),
                ));
            }
            for field in fields {
                entries.push(parse_rational(field)?);
            }
        }
        if entries.len() != n * n {
            return Err(Error::parse(0, format!("expected {n} rows of {n} entries")));
        }
        Ok(RationalMatrix::new(n, entries))
    }
}

/// Parse `int` or `int/int` with an optional leading sign.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let bad = || Error::parse(0, format!("invalid rational '{text}'"));
    let (num_str, den_str) = match text.split_once('/') {
        Some((a, b)) => (a, Some(b)),
        None => (text, None),
    };
    let n: BigInt = num_str.trim().parse().map_err(|_| bad())?;
    match den_str {
        None => Ok(BigRational::from_integer(n)),
        Some(d) => {
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
    }
}
