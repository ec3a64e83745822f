//! The level-`k` transfer matrix
//! `T_k[(i_1..i_k), (j_1..j_k)] = tr(P_{i_1 j_1} ··· P_{i_k j_k})`
//! (normalized trace, `tr(I_d) = 1`), its eigenvalue-1 multiplicity, and
//! the states it encodes: `φ^{*r}` on a monomial is an entry of `T_k^r`, and
//! the Cesàro-limit idempotent state is an entry of the projector onto the
//! 1-eigenspace of `T_k`.
//!
//! Tuples are encoded big-endian in base `n`:
//! `(i_1, …, i_k) ↦ Σ_t (i_t − 1)·n^{k−t}` with 1-based `i_t`.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{
    cesaro_projector, eigenone_multiplicity_kernel, numeric_rank, operator_norm_estimate, CesaroProjection,
    ComplexMatrix, Tolerance, C64, DEFAULT_MAX_ROUNDS,
};
use crate::models::MagicUnitaryModel;

/// Power-iteration steps used for the contractivity check.
pub const NORM_ITERATIONS: u32 = 200;

/// Resource guard on the transfer-matrix dimension `n^k` and the level `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Capacity {
    pub max_dim: usize,
    pub max_level: usize,
}

impl Default for Capacity {
    fn default() -> Self {
        Capacity { max_dim: 65536, max_level: 12 }
    }
}

impl Capacity {
    pub fn with_max_dim(max_dim: usize) -> Self {
        Capacity { max_dim, ..Self::default() }
    }

    /// Returns `n^k` when it fits.
    pub fn check(&self, n: usize, k: usize) -> Result<usize> {
        if k == 0 {
            return Err(Error::InvalidInput("level k must be at least 1".into()));
        }
        let required = (n as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
        if k > self.max_level || required > self.max_dim as u128 {
            return Err(Error::Capacity { k, required, cap: self.max_dim });
        }
        Ok(required as usize)
    }
}

/// A monomial `u_{i_1 j_1} ··· u_{i_k j_k}` with 1-based indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    pairs: Vec<(usize, usize)>,
}

impl Word {
    pub fn new(pairs: Vec<(usize, usize)>, n: usize) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidInput("a word needs at least one letter".into()));
        }
        if let Some(&(i, j)) = pairs.iter().find(|&&(i, j)| i == 0 || j == 0 || i > n || j > n) {
            return Err(Error::InvalidInput(format!("letter ({i},{j}) out of range 1..{n}")));
        }
        Ok(Word { pairs })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn row_indices(&self) -> Vec<usize> {
        self.pairs.iter().map(|p| p.0).collect()
    }

    pub fn col_indices(&self) -> Vec<usize> {
        self.pairs.iter().map(|p| p.1).collect()
    }

    /// All `n^{2k}` words of length `k`, in encoded (row, column) order.
    pub fn all(n: usize, k: usize) -> Vec<Word> {
        let dim = n.pow(k as u32);
        let mut out = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            let rows = decode(r, n, k);
            for c in 0..dim {
                let cols = decode(c, n, k);
                out.push(Word { pairs: rows.iter().copied().zip(cols).collect() });
            }
        }
        out
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (t, (i, j)) in self.pairs.iter().enumerate() {
            if t > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}:{j}")?;
        }
        Ok(())
    }
}

/// Big-endian base-`n` code of a 1-based tuple.
pub fn encode(tuple: &[usize], n: usize) -> usize {
    tuple.iter().fold(0, |acc, &i| acc * n + (i - 1))
}

/// Inverse of [`encode`] for tuples of length `k`.
pub fn decode(mut code: usize, n: usize, k: usize) -> Vec<usize> {
    let mut out = vec![0; k];
    for slot in out.iter_mut().rev() {
        *slot = code % n + 1;
        code /= n;
    }
    out
}

/// Value of a state on a monomial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateValue(pub C64);

impl StateValue {
    pub fn value(self) -> C64 {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransferMatrix {
    k: usize,
    n: usize,
    data: ComplexMatrix,
}

impl TransferMatrix {
    pub fn level(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.data
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.data
    }

    pub fn entry(&self, word: &Word) -> C64 {
        self.data[(encode(&word.row_indices(), self.n), encode(&word.col_indices(), self.n))]
    }

    pub fn norm_estimate(&self) -> Result<f64> {
        operator_norm_estimate(&self.data, NORM_ITERATIONS)
    }

    /// Errors with [`Error::NotContractive`] when the norm estimate exceeds `1 + eps`.
    pub fn check_contractive(&self, tol: Tolerance) -> Result<f64> {
        let norm = self.norm_estimate()?;
        if norm > 1.0 + tol.eps() {
            return Err(Error::NotContractive { k: self.k, norm });
        }
        Ok(norm)
    }

    pub fn multiplicity(&self, method: Method, tol: Tolerance) -> Result<Multiplicity> {
        let mut out = Multiplicity { count: 0, marginal: false, kernel: None, cesaro: None, cesaro_rounds: None };
        if matches!(method, Method::Kernel | Method::Both) {
            let dec = eigenone_multiplicity_kernel(&self.data, tol)?;
            out.kernel = Some(dec.rank);
            out.marginal |= dec.marginal;
            out.count = dec.rank;
        }
        if matches!(method, Method::Cesaro | Method::Both) {
            let proj = self.cesaro(tol)?;
            let dec = numeric_rank(&proj.projector, tol);
            out.cesaro = Some(dec.rank);
            out.cesaro_rounds = Some(proj.rounds);
            out.marginal |= dec.marginal;
            out.count = dec.rank;
        }
        if let (Some(kernel), Some(cesaro)) = (out.kernel, out.cesaro) {
            if kernel != cesaro {
                return Err(Error::Inconsistency { k: self.k, kernel, cesaro });
            }
        }
        Ok(out)
    }

    pub fn cesaro(&self, tol: Tolerance) -> Result<CesaroProjection> {
        cesaro_projector(&self.data, tol, DEFAULT_MAX_ROUNDS)
    }
}

/// How `#(1 ∈ T_k)` is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// `dim ker(T_k − I)` by singular values.
    Kernel,
    /// Numeric rank of the Cesàro projector.
    Cesaro,
    /// Both, erroring on disagreement.
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Multiplicity {
    pub count: usize,
    pub marginal: bool,
    pub kernel: Option<usize>,
    pub cesaro: Option<usize>,
    pub cesaro_rounds: Option<u32>,
}

/// Builds `T_k` by a depth-first walk over letter pairs that reuses each
/// prefix product `P_{i_1 j_1} ··· P_{i_t j_t}` for all of its continuations.
/// Row blocks sharing `i_1` are filled in parallel.
pub fn build_transfer(model: &MagicUnitaryModel, k: usize, cap: Capacity) -> Result<TransferMatrix> {
    let n = model.n();
    let dim = cap.check(n, k)?;
    let mut data = ComplexMatrix::zeros(dim, dim);
    if model.is_diagonal() {
        fill_diagonal(model, k, &mut data);
    } else {
        let block_rows = dim / n;
        data.as_mut_slice()
            .par_chunks_mut(block_rows * dim)
            .enumerate()
            .for_each(|(i1, block)| fill_block(model, k, i1, block, dim));
    }
    Ok(TransferMatrix { k, n, data })
}

struct Walk<'a> {
    model: &'a MagicUnitaryModel,
    k: usize,
    dim: usize,
    inv_d: f64,
    stack: Vec<Vec<C64>>,
}

fn fill_block(model: &MagicUnitaryModel, k: usize, i1: usize, block: &mut [C64], dim: usize) {
    let n = model.n();
    let d = model.d();
    let inv_d = 1.0 / d as f64;
    if k == 1 {
        for (j1, slot) in block.iter_mut().enumerate().take(n) {
            *slot = model.entry(i1, j1).trace() * inv_d;
        }
        return;
    }
    let mut walk = Walk { model, k, dim, inv_d, stack: vec![vec![C64::new(0.0, 0.0); d * d]; k] };
    let sub = dim / n;
    for j1 in 0..n {
        walk.stack[0].copy_from_slice(model.entry(i1, j1).as_slice());
        if is_zero(&walk.stack[0]) {
            continue;
        }
        walk.descend(1, 0, j1 * sub, block);
    }
}

impl Walk<'_> {
    /// `depth` letters are multiplied into `stack[depth-1]`; `row`/`col`
    /// accumulate the codes of the letters placed so far, excluding `i_1` for rows.
    fn descend(&mut self, depth: usize, row: usize, col: usize, block: &mut [C64]) {
        let n = self.model.n();
        let d = self.model.d();
        let remaining = self.k - depth - 1;
        let stride = n.pow(remaining as u32);
        if remaining == 0 {
            let prefix = &self.stack[depth - 1];
            for i in 0..n {
                for j in 0..n {
                    let tr = trace_of_product(prefix, self.model.entry(i, j).as_slice(), d);
                    block[(row + i) * self.dim + col + j] = tr * self.inv_d;
                }
            }
            return;
        }
        for i in 0..n {
            for j in 0..n {
                let (done, rest) = self.stack.split_at_mut(depth);
                mul_into(&done[depth - 1], self.model.entry(i, j).as_slice(), &mut rest[0], d);
                if is_zero(&rest[0]) {
                    continue;
                }
                self.descend(depth + 1, row + i * stride, col + j * stride, block);
            }
        }
    }
}

fn fill_diagonal(model: &MagicUnitaryModel, k: usize, data: &mut ComplexMatrix) {
    let n = model.n();
    let d = model.d();
    let inv_d = 1.0 / d as f64;
    let mut stack = vec![vec![C64::new(0.0, 0.0); d * d]; k];
    let mut tuple = vec![0usize; k];
    let dim = n.pow(k as u32);
    // odometer over tuples, recomputing only the changed suffix of the product stack
    let mut changed_from = 0;
    for code in 0..dim {
        for t in changed_from..k {
            let u = model.entry(tuple[t], tuple[t]).as_slice();
            if t == 0 {
                stack[0].copy_from_slice(u);
            } else {
                let (done, rest) = stack.split_at_mut(t);
                mul_into(&done[t - 1], u, &mut rest[0], d);
            }
        }
        let prod = &stack[k - 1];
        let tr: C64 = (0..d).map(|a| prod[a * d + a]).sum();
        data[(code, code)] = tr * inv_d;
        // advance
        let mut t = k;
        while t > 0 {
            t -= 1;
            tuple[t] += 1;
            if tuple[t] < n {
                break;
            }
            tuple[t] = 0;
        }
        changed_from = t;
    }
}

#[inline]
fn is_zero(m: &[C64]) -> bool {
    m.iter().all(|z| z.re == 0.0 && z.im == 0.0)
}

#[inline]
fn mul_into(a: &[C64], b: &[C64], out: &mut [C64], d: usize) {
    out.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
    for r in 0..d {
        for t in 0..d {
            let x = a[r * d + t];
            if x.re == 0.0 && x.im == 0.0 {
                continue;
            }
            let (brow, orow) = (&b[t * d..(t + 1) * d], &mut out[r * d..(r + 1) * d]);
            for (o, &y) in orow.iter_mut().zip(brow) {
                *o += x * y;
            }
        }
    }
}

#[inline]
fn trace_of_product(a: &[C64], b: &[C64], d: usize) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for r in 0..d {
        for c in 0..d {
            acc += a[r * d + c] * b[c * d + r];
        }
    }
    acc
}

/// `#(1 ∈ T_k)` with the requested method.
pub fn multiplicity_one(
    model: &MagicUnitaryModel,
    k: usize,
    method: Method,
    tol: Tolerance,
    cap: Capacity,
) -> Result<Multiplicity> {
    build_transfer(model, k, cap)?.multiplicity(method, tol)
}

fn check_word(model: &MagicUnitaryModel, word: &Word) -> Result<()> {
    let n = model.n();
    if word.pairs.iter().any(|&(i, j)| i == 0 || j == 0 || i > n || j > n) {
        return Err(Error::InvalidInput(format!("word {word} has letters outside 1..{n}")));
    }
    Ok(())
}

/// `φ^{*r}` on the monomial of `word`, read off `(T_k)^r`.
pub fn convolution_power_eval(model: &MagicUnitaryModel, word: &Word, r: usize, cap: Capacity) -> Result<StateValue> {
    if r == 0 {
        return Err(Error::InvalidInput("convolution power must be at least 1".into()));
    }
    check_word(model, word)?;
    let t = build_transfer(model, word.len(), cap)?;
    let n = model.n();
    let row = encode(&word.row_indices(), n);
    let col = encode(&word.col_indices(), n);
    let mut v = t.matrix().row(row).to_vec();
    for _ in 1..r {
        v = t.matrix().left_mul_vec(&v)?;
    }
    Ok(StateValue(v[col]))
}

/// The Cesàro-limit idempotent state `φ̃` on the monomial of `word`.
pub fn idempotent_eval(model: &MagicUnitaryModel, word: &Word, tol: Tolerance, cap: Capacity) -> Result<StateValue> {
    IdempotentState::new(model, tol, cap).eval(word)
}

/// Evaluator for `φ̃` that keeps one Cesàro projector per level.
pub struct IdempotentState<'a> {
    model: &'a MagicUnitaryModel,
    tol: Tolerance,
    cap: Capacity,
    projectors: BTreeMap<usize, ComplexMatrix>,
}

impl<'a> IdempotentState<'a> {
    pub fn new(model: &'a MagicUnitaryModel, tol: Tolerance, cap: Capacity) -> Self {
        IdempotentState { model, tol, cap, projectors: BTreeMap::new() }
    }

    pub fn projector(&mut self, k: usize) -> Result<&ComplexMatrix> {
        if !self.projectors.contains_key(&k) {
            let t = build_transfer(self.model, k, self.cap)?;
            let p = t.cesaro(self.tol)?.projector;
            self.projectors.insert(k, p);
        }
        Ok(&self.projectors[&k])
    }

    pub fn eval(&mut self, word: &Word) -> Result<StateValue> {
        check_word(self.model, word)?;
        let n = self.model.n();
        let (row, col) = (encode(&word.row_indices(), n), encode(&word.col_indices(), n));
        let p = self.projector(word.len())?;
        Ok(StateValue(p[(row, col)]))
    }
}
