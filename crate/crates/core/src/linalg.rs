//! Dense complex matrices and the spectral kernels the certifier needs:
//! projection checks, Cesàro power averaging, eigenvalue-1 multiplicity and
//! operator-norm estimation.
//!
//! Matrices are stored row-major. Everything here is a pure function of its
//! inputs; matrix products split over output rows and each row is reduced in
//! a fixed order, so results are bit-reproducible regardless of thread count.

use std::fmt;
use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Default absolute threshold for zero tests.
pub const DEFAULT_EPS: f64 = 1e-9;

/// Default number of doubling rounds for [`cesaro_projector`].
pub const DEFAULT_MAX_ROUNDS: u32 = 64;

/// Singular values within this factor above the rank threshold are reported as marginal.
const MARGINAL_BAND: f64 = 100.0;

/// Below this size a product is computed on the calling thread.
const PAR_MIN_ROWS: usize = 64;

/// Absolute threshold for zero tests and projection checks.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Tolerance(f64);

impl Tolerance {
    pub fn new(eps: f64) -> Result<Self> {
        if eps > 0.0 && eps < 1.0 {
            Ok(Tolerance(eps))
        } else {
            Err(Error::InvalidTolerance(eps))
        }
    }

    #[inline]
    pub fn eps(self) -> f64 {
        self.0
    }

    /// Threshold used for a decision on a matrix of the given dimension.
    #[inline]
    pub fn scaled(self, dim: usize) -> f64 {
        self.0 * dim.max(1) as f64
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance(DEFAULT_EPS)
    }
}

impl fmt::Display for Tolerance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.0)
    }
}

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        ComplexMatrix { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.data[r * cols + c] = f(r, c);
            }
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting wrong lengths and non-finite values.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!("{rows}x{cols} matrix has an empty side")));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite { row: pos / cols, col: pos % cols });
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    /// Real matrix from nested rows. Panics on ragged input; intended for literals.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let cols = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self::from_fn(rows.len(), cols, |r, c| C64::new(rows[r][c], 0.0))
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &z) in diag.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_diagonal(&d)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    fn require_square(&self, what: &str) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::Dimension(format!("{what} needs a square matrix, got {}x{}", self.rows, self.cols)))
        }
    }

    fn require_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows == other.rows && self.cols == other.cols {
            Ok(())
        } else {
            Err(Error::Dimension(format!(
                "shape mismatch: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )))
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        ComplexMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.require_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(ComplexMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.require_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(ComplexMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        let inner = self.cols;
        let oc = other.cols;
        let row_kernel = |(r, out_row): (usize, &mut [C64])| {
            let lhs = &self.data[r * inner..(r + 1) * inner];
            for (t, &a) in lhs.iter().enumerate() {
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let rhs = &other.data[t * oc..(t + 1) * oc];
                for (o, &b) in out_row.iter_mut().zip(rhs) {
                    *o += a * b;
                }
            }
        };
        if self.rows >= PAR_MIN_ROWS {
            out.data.par_chunks_mut(oc).enumerate().for_each(row_kernel);
        } else {
            out.data.chunks_mut(oc).enumerate().for_each(row_kernel);
        }
        Ok(out)
    }

    /// Row vector times matrix.
    pub fn left_mul_vec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.rows {
            return Err(Error::Dimension(format!("vector of length {} against {} rows", v.len(), self.rows)));
        }
        let mut out = vec![C64::new(0.0, 0.0); self.cols];
        for (r, &a) in v.iter().enumerate() {
            if a.re == 0.0 && a.im == 0.0 {
                continue;
            }
            for (o, &b) in out.iter_mut().zip(self.row(r)) {
                *o += a * b;
            }
        }
        Ok(out)
    }

    /// Matrix times column vector.
    pub fn mul_vec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!("vector of length {} against {} columns", v.len(), self.cols)));
        }
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Entrywise max-modulus norm.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Entrywise max-modulus distance; panics on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(r) {
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// True iff `m` is Hermitian and idempotent to within `tol` in the max-modulus norm.
pub fn is_hermitian_projection(m: &ComplexMatrix, tol: Tolerance) -> Result<bool> {
    m.require_square("is_hermitian_projection")?;
    if m.max_abs_diff(&m.adjoint()) > tol.eps() {
        return Ok(false);
    }
    let sq = m.matmul(m)?;
    Ok(sq.max_abs_diff(m) <= tol.eps())
}

/// Rank decision with the marginal flag raised when a singular value falls
/// inside the ambiguous band above the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankDecision {
    pub rank: usize,
    pub marginal: bool,
}

/// Singular values of `m`, descending.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let mut sv: Vec<f64> = m.to_nalgebra().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Numeric rank: singular values at or above `eps * dim` count.
pub fn numeric_rank(m: &ComplexMatrix, tol: Tolerance) -> RankDecision {
    let dim = m.rows.max(m.cols);
    let threshold = tol.scaled(dim);
    let sv = singular_values(m);
    let rank = sv.iter().filter(|&&s| s >= threshold).count();
    let marginal = sv.iter().any(|&s| s >= threshold && s <= MARGINAL_BAND * threshold);
    RankDecision { rank, marginal }
}

/// `dim ker(T - I)`; the marginal flag follows [`numeric_rank`].
pub fn eigenone_multiplicity_kernel(t: &ComplexMatrix, tol: Tolerance) -> Result<RankDecision> {
    let n = t.require_square("eigenone_multiplicity_kernel")?;
    let shifted = t.sub(&ComplexMatrix::identity(n))?;
    let RankDecision { rank, marginal } = numeric_rank(&shifted, tol);
    Ok(RankDecision { rank: n - rank, marginal })
}

/// Output of [`cesaro_projector`].
#[derive(Debug, Clone)]
pub struct CesaroProjection {
    pub projector: ComplexMatrix,
    /// Doubling rounds used; the final average covers `2^rounds` powers.
    pub rounds: u32,
    /// `‖P·T − P‖_max` of the returned projector.
    pub residual: f64,
}

/// Approximates `lim (1/N) Σ_{r=1..N} T^r`.
///
/// Partial sums are doubled (`S_{2N} = S_N + T^N S_N`) and the average
/// `A_N = S_N / N` is accepted once both `‖A_N − A_{N/2}‖_max` and
/// `‖A_N·T − A_N‖_max` are at most `eps`. The accepted average is then purified
/// by `P ← 3P² − 2P³` while that reduces `‖P² − P‖_max`: on every eigenvalue
/// other than 1 the average acts by a factor of order `1/N`, and the iteration
/// sends such factors to 0 and factors near 1 back to 1.
///
/// Rounding can leave eigenvalues of modulus `1 + O(1e-15)` next to slowly
/// decaying ones, and then the plain rule never fires. So once both quantities
/// are below `sqrt(eps)` the polished average is also accepted when
/// `‖P·T − P‖_max` and `‖P² − P‖_max` are at most `eps`.
pub fn cesaro_projector(t: &ComplexMatrix, tol: Tolerance, max_rounds: u32) -> Result<CesaroProjection> {
    t.require_square("cesaro_projector")?;
    if max_rounds == 0 {
        return Err(Error::InvalidInput("max_rounds must be at least 1".into()));
    }
    let eps = tol.eps();
    let mut sum = t.clone();
    let mut power = t.clone();
    let mut average = t.clone();
    let mut terms = 1.0_f64;
    let mut residual = f64::INFINITY;

    for round in 1..=max_rounds {
        sum = sum.add(&power.matmul(&sum)?)?;
        power = power.matmul(&power)?;
        terms *= 2.0;
        let next = sum.scale(C64::new(1.0 / terms, 0.0));
        let drift = next.max_abs_diff(&average);
        // A_N·T − A_N = (T^{N+1} − T) / N
        let shifted = power.matmul(t)?.sub(t)?;
        residual = shifted.max_abs() / terms;
        average = next;
        if !residual.is_finite() || !drift.is_finite() {
            return Err(Error::NonConvergence { rounds: round, residual });
        }
        if drift <= eps && residual <= eps {
            let projector = polish_idempotent(average)?;
            let residual = projector.matmul(t)?.max_abs_diff(&projector);
            return Ok(CesaroProjection { projector, rounds: round, residual });
        }
        if drift <= eps.sqrt() && residual <= eps.sqrt() {
            let projector = polish_idempotent(average.clone())?;
            let fixed = projector.matmul(t)?.max_abs_diff(&projector);
            let defect = projector.matmul(&projector)?.max_abs_diff(&projector);
            if fixed <= eps && defect <= eps {
                return Ok(CesaroProjection { projector, rounds: round, residual: fixed });
            }
        }
    }
    Err(Error::NonConvergence { rounds: max_rounds, residual })
}

fn polish_idempotent(mut p: ComplexMatrix) -> Result<ComplexMatrix> {
    let mut sq = p.matmul(&p)?;
    let mut defect = sq.max_abs_diff(&p);
    for _ in 0..8 {
        if defect == 0.0 {
            break;
        }
        // P ← 3P² − 2P³
        let cube = sq.matmul(&p)?;
        let next = sq.scale(C64::new(3.0, 0.0)).sub(&cube.scale(C64::new(2.0, 0.0)))?;
        let next_sq = next.matmul(&next)?;
        let next_defect = next_sq.max_abs_diff(&next);
        if next_defect >= defect {
            break;
        }
        p = next;
        sq = next_sq;
        defect = next_defect;
    }
    Ok(p)
}

/// Lower estimate of the operator norm by power iteration on `T*T`.
///
/// The start vector is `(1, 1/2, 1/3, …)` normalized; the result is the square
/// root of the largest Rayleigh quotient seen. Iteration stops early once the
/// quotient changes by less than `1e-14` relative between steps.
pub fn operator_norm_estimate(t: &ComplexMatrix, iters: u32) -> Result<f64> {
    t.require_square("operator_norm_estimate")?;
    let n = t.cols;
    let mut x: Vec<C64> = (0..n).map(|i| C64::new(1.0 / (i + 1) as f64, 0.0)).collect();
    normalize(&mut x);
    let mut best = 0.0_f64;
    let mut prev = f64::NEG_INFINITY;
    for _ in 0..iters.max(1) {
        let y = t.mul_vec(&x)?;
        let q: f64 = y.iter().map(|z| z.norm_sqr()).sum();
        best = best.max(q);
        if (q - prev).abs() <= 1e-14 * q {
            break;
        }
        prev = q;
        // T* y without materializing the adjoint
        let mut next = t.left_mul_vec(&y.iter().map(|z| z.conj()).collect::<Vec<_>>())?;
        next.iter_mut().for_each(|z| *z = z.conj());
        if normalize(&mut next) == 0.0 {
            break;
        }
        x = next;
    }
    Ok(best.sqrt())
}

fn normalize(v: &mut [C64]) -> f64 {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|z| *z /= norm);
    }
    norm
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn tolerance_bounds() {
        assert!(Tolerance::new(0.0).is_err());
        assert!(Tolerance::new(1.0).is_err());
        assert!(Tolerance::new(f64::NAN).is_err());
        assert!((Tolerance::new(1e-6).unwrap().scaled(10) - 1e-5).abs() < 1e-20);
    }

    #[test]
    fn from_vec_rejects_bad_input() {
        assert!(matches!(ComplexMatrix::from_vec(2, 2, vec![C64::new(1.0, 0.0); 3]), Err(Error::Dimension(_))));
        let mut data = vec![C64::new(0.0, 0.0); 4];
        data[3] = C64::new(f64::NAN, 0.0);
        assert_eq!(ComplexMatrix::from_vec(2, 2, data), Err(Error::NonFinite { row: 1, col: 1 }));
    }

    #[test]
    fn projection_checks() {
        let half = ComplexMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]);
        assert!(is_hermitian_projection(&half, tol()).unwrap());
        assert!(is_hermitian_projection(&ComplexMatrix::identity(3), tol()).unwrap());
        let bad = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.5]]);
        assert!(!is_hermitian_projection(&bad, tol()).unwrap());
        // idempotent but not Hermitian
        let oblique = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]]);
        assert!(!is_hermitian_projection(&oblique, tol()).unwrap());
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(matches!(is_hermitian_projection(&rect, tol()), Err(Error::Dimension(_))));
    }

    #[test]
    fn cesaro_of_swap() {
        let t = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let out = cesaro_projector(&t, tol(), DEFAULT_MAX_ROUNDS).unwrap();
        let expected = ComplexMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]);
        assert!(out.projector.max_abs_diff(&expected) < 1e-12);
        assert!(out.residual <= 1e-9);
    }

    #[test]
    fn cesaro_of_identity_and_diagonal() {
        let id = ComplexMatrix::identity(4);
        let out = cesaro_projector(&id, tol(), DEFAULT_MAX_ROUNDS).unwrap();
        assert_eq!(out.projector, id);
        assert_eq!(out.rounds, 1);

        let t = ComplexMatrix::from_real_diagonal(&[1.0, 0.3, -0.9]);
        let out = cesaro_projector(&t, tol(), DEFAULT_MAX_ROUNDS).unwrap();
        let expected = ComplexMatrix::from_real_diagonal(&[1.0, 0.0, 0.0]);
        assert!(out.projector.max_abs_diff(&expected) < 1e-9);
    }

    #[test]
    fn cesaro_of_three_cycle() {
        let t = ComplexMatrix::from_real_rows(&[&[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        let out = cesaro_projector(&t, tol(), DEFAULT_MAX_ROUNDS).unwrap();
        let third = 1.0 / 3.0;
        let expected = ComplexMatrix::from_fn(3, 3, |_, _| C64::new(third, 0.0));
        assert!(out.projector.max_abs_diff(&expected) < 1e-12, "{:?}", out.projector);
    }

    #[test]
    fn cesaro_tolerates_rounding_above_one() {
        let t = ComplexMatrix::from_real_diagonal(&[1.0 + 4e-15, 0.99, -0.5]);
        let out = cesaro_projector(&t, tol(), DEFAULT_MAX_ROUNDS).unwrap();
        let expected = ComplexMatrix::from_real_diagonal(&[1.0, 0.0, 0.0]);
        assert!(out.projector.max_abs_diff(&expected) < 1e-9, "{:?}", out.projector);
        assert_eq!(numeric_rank(&out.projector, tol()).rank, 1);
    }

    #[test]
    fn cesaro_reports_non_convergence_for_expansive_input() {
        let t = ComplexMatrix::from_real_diagonal(&[1.0, 1.5]);
        match cesaro_projector(&t, tol(), 8) {
            Err(Error::NonConvergence { rounds, .. }) => assert!(rounds <= 8),
            other => panic!("expected non-convergence, got {other:?}"),
        }
        assert!(cesaro_projector(&t, tol(), 0).is_err());
    }

    #[test]
    fn kernel_multiplicities() {
        let t = ComplexMatrix::from_real_diagonal(&[1.0, 0.5, -1.0]);
        assert_eq!(eigenone_multiplicity_kernel(&t, tol()).unwrap().rank, 1);
        assert_eq!(eigenone_multiplicity_kernel(&ComplexMatrix::identity(4), tol()).unwrap().rank, 4);
        let swap = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let m = eigenone_multiplicity_kernel(&swap, tol()).unwrap();
        assert_eq!(m, RankDecision { rank: 1, marginal: false });
    }

    #[test]
    fn marginal_band_is_flagged() {
        // a singular value of 1e-8 sits between eps*dim = 2e-9 and 100*eps*dim
        let t = ComplexMatrix::from_real_diagonal(&[1.0, 1.0 - 1e-8]);
        let m = eigenone_multiplicity_kernel(&t, tol()).unwrap();
        assert_eq!(m.rank, 1);
        assert!(m.marginal);
    }

    #[test]
    fn norm_estimates() {
        let id = ComplexMatrix::identity(5);
        assert!((operator_norm_estimate(&id, 50).unwrap() - 1.0).abs() < 1e-12);
        let d = ComplexMatrix::from_real_diagonal(&[0.5, 0.25]);
        assert!((operator_norm_estimate(&d, 200).unwrap() - 0.5).abs() < 1e-9);
        let nil = ComplexMatrix::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]);
        assert!((operator_norm_estimate(&nil, 50).unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn matmul_shape_errors() {
        let a = ComplexMatrix::zeros(2, 3);
        assert!(a.matmul(&a).is_err());
        assert!(a.add(&ComplexMatrix::zeros(3, 2)).is_err());
    }
}
