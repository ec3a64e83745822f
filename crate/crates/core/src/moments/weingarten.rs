//! Exact Weingarten calculus for `S_n^+` over non-crossing partitions.
//!
//! The Gram matrix `G(p, q) = n^{|p ∨ q|}` of the partition vectors is
//! inverted in exact rational arithmetic, and Haar integrals of monomials are
//! `Σ_{p,q} δ_p(i) δ_q(j) W(p, q)`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::moments::partitions::{enumerate_nc, SetPartition};
use crate::moments::Rational;
use crate::transfer::Word;

/// Dense square matrix of exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    dim: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(f(r, c));
            }
        }
        RationalMatrix { dim, data }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |r, c| if r == c { Rational::one() } else { Rational::zero() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.dim + c]
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        Self::from_fn(n, |r, c| (0..n).map(|t| self.get(r, t) * other.get(t, c)).sum())
    }

    /// Gauss–Jordan inverse; `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        let n = self.dim;
        let mut a = self.data.clone();
        let mut inv = Self::identity(n).data;
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[r * n + col].is_zero())?;
            if pivot != col {
                for c in 0..n {
                    a.swap(pivot * n + c, col * n + c);
                    inv.swap(pivot * n + c, col * n + c);
                }
            }
            let p = a[col * n + col].clone();
            for c in 0..n {
                a[col * n + c] /= &p;
                inv[col * n + c] /= &p;
            }
            for r in 0..n {
                if r == col || a[r * n + col].is_zero() {
                    continue;
                }
                let f = a[r * n + col].clone();
                for c in 0..n {
                    let da = &a[col * n + c] * &f;
                    a[r * n + c] -= da;
                    let di = &inv[col * n + c] * &f;
                    inv[r * n + c] -= di;
                }
            }
        }
        Some(RationalMatrix { dim: n, data: inv })
    }
}

/// Gram matrix and its inverse over `NC(k)` for a fixed `n ≥ 4`.
#[derive(Debug, Clone)]
pub struct Weingarten {
    n: usize,
    k: usize,
    partitions: Vec<SetPartition>,
    gram: RationalMatrix,
    inverse: RationalMatrix,
}

impl Weingarten {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n < 4 {
            return Err(Error::Domain(format!(
                "S_{n}^+ coincides with S_{n}; use the classical permutation-group oracle for n < 4"
            )));
        }
        let partitions = enumerate_nc(k)?;
        let base = BigInt::from(n);
        let gram = RationalMatrix::from_fn(partitions.len(), |r, c| {
            Rational::from_integer(base.pow(partitions[r].join_blocks(&partitions[c]) as u32))
        });
        let inverse = gram
            .inverse()
            .ok_or_else(|| Error::Domain(format!("Gram matrix of NC({k}) is singular at n = {n}")))?;
        Ok(Weingarten { n, k, partitions, gram, inverse })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn level(&self) -> usize {
        self.k
    }

    pub fn partitions(&self) -> &[SetPartition] {
        &self.partitions
    }

    pub fn gram(&self) -> &RationalMatrix {
        &self.gram
    }

    pub fn matrix(&self) -> &RationalMatrix {
        &self.inverse
    }

    /// `h(u_{i_1 j_1} ··· u_{i_k j_k})` for a word of length `k`.
    pub fn haar_monomial(&self, word: &Word) -> Result<Rational> {
        if word.len() != self.k {
            return Err(Error::InvalidInput(format!("word of length {} against level {}", word.len(), self.k)));
        }
        if word.pairs().iter().any(|&(i, j)| i > self.n || j > self.n) {
            return Err(Error::InvalidInput(format!("word {word} has letters outside 1..{}", self.n)));
        }
        let (is, js) = (word.row_indices(), word.col_indices());
        let rows: Vec<usize> =
            (0..self.partitions.len()).filter(|&p| self.partitions[p].is_constant_on_blocks(&is)).collect();
        let cols: Vec<usize> =
            (0..self.partitions.len()).filter(|&q| self.partitions[q].is_constant_on_blocks(&js)).collect();
        let mut total = Rational::zero();
        for &p in &rows {
            for &q in &cols {
                total += self.inverse.get(p, q);
            }
        }
        Ok(total)
    }
}

/// Exact Weingarten matrix `W = G^{-1}` over `NC(k)`.
pub fn weingarten_matrix(n: usize, k: usize) -> Result<Weingarten> {
    Weingarten::new(n, k)
}

/// Haar integral of a monomial over `S_n^+`, `n ≥ 4`.
pub fn snplus_haar_monomial(n: usize, word: &Word) -> Result<Rational> {
    Weingarten::new(n, word.len())?.haar_monomial(word)
}
