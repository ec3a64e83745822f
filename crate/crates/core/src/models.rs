//! Finite-dimensional matrix models `u_ij ↦ P_ij` and their constructors.
//!
//! A model is an `n × n` grid of `d × d` complex matrices. Ordinary models are
//! magic unitaries: every entry is an orthogonal projection and every row and
//! column sums to the identity. Diagonal (group-dual) models instead carry a
//! unitary `U_i` in position `(i, i)` and zeros elsewhere.
//!
//! Matrix indices in method signatures are 0-based; permutations are given by
//! their 1-based images.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{is_hermitian_projection, ComplexMatrix, Tolerance, C64};

/// A bijection of `{1..n}`, stored by its images.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    /// `images[j-1] = g(j)`, 1-based.
    pub fn from_images(images: &[usize]) -> Result<Self> {
        let n = images.len();
        if n == 0 {
            return Err(Error::InvalidInput("empty permutation".into()));
        }
        let mut seen = vec![false; n];
        let mut zero_based = Vec::with_capacity(n);
        for &img in images {
            if img == 0 || img > n || seen[img - 1] {
                return Err(Error::InvalidInput(format!("{images:?} is not a permutation of 1..{n}")));
            }
            seen[img - 1] = true;
            zero_based.push(img - 1);
        }
        Ok(Permutation { images: zero_based })
    }

    pub fn identity(n: usize) -> Self {
        Permutation { images: (0..n).collect() }
    }

    /// Number of points acted on.
    #[inline]
    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// Image of the 0-based point `j`.
    #[inline]
    pub fn apply(&self, j: usize) -> usize {
        self.images[j]
    }

    /// 1-based images.
    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|&x| x + 1).collect()
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        debug_assert_eq!(self.degree(), other.degree());
        Permutation { images: other.images.iter().map(|&x| self.images[x]).collect() }
    }

    pub fn fixed_points(&self) -> usize {
        self.images.iter().enumerate().filter(|(j, &x)| *j == x).count()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(j, &x)| j == x)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (t, x) in self.images.iter().enumerate() {
            if t > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", x + 1)?;
        }
        write!(f, ")")
    }
}

/// The images `P_ij = π(u_ij)` of the fundamental corepresentation.
#[derive(Debug, Clone, PartialEq)]
pub struct MagicUnitaryModel {
    n: usize,
    d: usize,
    diagonal: bool,
    allow_non_involutive: bool,
    entries: Vec<ComplexMatrix>,
}

impl MagicUnitaryModel {
    /// Assembles a model from row-major `entries` (`entries[i*n + j] = P_ij`).
    /// Only shapes are checked here; see [`validate_magic_unitary`].
    pub fn new(n: usize, d: usize, diagonal: bool, entries: Vec<ComplexMatrix>) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::Dimension(format!("model needs n >= 1 and d >= 1, got n={n}, d={d}")));
        }
        if entries.len() != n * n {
            return Err(Error::Dimension(format!("{} entries supplied for an {n}x{n} grid", entries.len())));
        }
        for (idx, p) in entries.iter().enumerate() {
            if p.rows() != d || p.cols() != d {
                return Err(Error::Dimension(format!(
                    "P_{},{} is {}x{}, expected {d}x{d}",
                    idx / n + 1,
                    idx % n + 1,
                    p.rows(),
                    p.cols()
                )));
            }
        }
        Ok(MagicUnitaryModel { n, d, diagonal, allow_non_involutive: false, entries })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.d
    }

    /// Group-dual model with `P_ii = U_i`, zeros off the diagonal.
    #[inline]
    pub fn is_diagonal(&self) -> bool {
        self.diagonal
    }

    /// Set only by [`from_unitaries_unchecked_involution`].
    #[inline]
    pub fn allows_non_involutive(&self) -> bool {
        self.allow_non_involutive
    }

    pub(crate) fn set_allow_non_involutive(&mut self, allow: bool) {
        self.allow_non_involutive = allow;
    }

    /// `P_ij`, 0-based.
    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> &ComplexMatrix {
        &self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[ComplexMatrix] {
        &self.entries
    }

    /// Normalized trace `tr(P_ij)`, the value of `tr∘π` on `u_ij`.
    pub fn state_on_generator(&self, i: usize, j: usize) -> C64 {
        self.entry(i, j).trace() / self.d as f64
    }
}

/// A failed model invariant. Indices are 1-based in the rendered text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NotProjection { i: usize, j: usize },
    RowSum { i: usize },
    ColumnSum { j: usize },
    NonZeroOffDiagonal { i: usize, j: usize },
    NotUnitary { i: usize },
    NotInvolutive { i: usize },
}

fn entry_label(i: usize, j: usize) -> String {
    if i < 9 && j < 9 {
        format!("P_{}{}", i + 1, j + 1)
    } else {
        format!("P_{},{}", i + 1, j + 1)
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::NotProjection { i, j } => write!(f, "{} not a projection", entry_label(i, j)),
            Violation::RowSum { i } => write!(f, "row {} does not sum to the identity", i + 1),
            Violation::ColumnSum { j } => write!(f, "column {} does not sum to the identity", j + 1),
            Violation::NonZeroOffDiagonal { i, j } => {
                write!(f, "{} must vanish in a diagonal model", entry_label(i, j))
            }
            Violation::NotUnitary { i } => write!(f, "{} not unitary", entry_label(i, i)),
            Violation::NotInvolutive { i } => write!(f, "{} not self-inverse", entry_label(i, i)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn messages(&self) -> Vec<String> {
        self.violations.iter().map(ToString::to_string).collect()
    }
}

/// Checks every model invariant at `tol`; violations are returned as data.
pub fn validate_magic_unitary(model: &MagicUnitaryModel, tol: Tolerance) -> ValidationReport {
    let mut violations = Vec::new();
    let n = model.n;
    let id = ComplexMatrix::identity(model.d);

    if model.diagonal {
        for i in 0..n {
            for j in 0..n {
                if i != j && model.entry(i, j).max_abs() > tol.eps() {
                    violations.push(Violation::NonZeroOffDiagonal { i, j });
                }
            }
            let u = model.entry(i, i);
            if !is_unitary(u, tol) {
                violations.push(Violation::NotUnitary { i });
            }
            if !model.allow_non_involutive && !is_involutive(u, tol) {
                violations.push(Violation::NotInvolutive { i });
            }
        }
        return ValidationReport { violations };
    }

    for i in 0..n {
        for j in 0..n {
            // square by construction
            if !is_hermitian_projection(model.entry(i, j), tol).unwrap_or(false) {
                violations.push(Violation::NotProjection { i, j });
            }
        }
    }
    let sum_tol = tol.scaled(n);
    for i in 0..n {
        let row = (0..n).fold(ComplexMatrix::zeros(model.d, model.d), |acc, j| {
            acc.add(model.entry(i, j)).expect("entries share a shape")
        });
        if row.max_abs_diff(&id) > sum_tol {
            violations.push(Violation::RowSum { i });
        }
    }
    for j in 0..n {
        let col = (0..n).fold(ComplexMatrix::zeros(model.d, model.d), |acc, i| {
            acc.add(model.entry(i, j)).expect("entries share a shape")
        });
        if col.max_abs_diff(&id) > sum_tol {
            violations.push(Violation::ColumnSum { j });
        }
    }
    ValidationReport { violations }
}

fn is_unitary(u: &ComplexMatrix, tol: Tolerance) -> bool {
    u.matmul(&u.adjoint())
        .map(|p| p.max_abs_diff(&ComplexMatrix::identity(u.rows())) <= tol.scaled(u.rows()))
        .unwrap_or(false)
}

fn is_involutive(u: &ComplexMatrix, tol: Tolerance) -> bool {
    u.matmul(u)
        .map(|p| p.max_abs_diff(&ComplexMatrix::identity(u.rows())) <= tol.scaled(u.rows()))
        .unwrap_or(false)
}

/// Evaluation of `C(S_n)` at the given points: `d = points.len()` and `P_ij`
/// is diagonal with `t`-th entry `1` iff `g_t(j) = i`.
pub fn from_permutations(n: usize, points: &[Permutation]) -> Result<MagicUnitaryModel> {
    if n == 0 {
        return Err(Error::Dimension("n must be positive".into()));
    }
    if points.is_empty() {
        return Err(Error::InvalidInput("at least one permutation is required".into()));
    }
    if let Some(bad) = points.iter().find(|g| g.degree() != n) {
        return Err(Error::Dimension(format!("permutation {bad} acts on {} points, expected {n}", bad.degree())));
    }
    let d = points.len();
    let one = C64::new(1.0, 0.0);
    let entries = (0..n * n)
        .map(|idx| {
            let (i, j) = (idx / n, idx % n);
            let diag: Vec<C64> =
                points.iter().map(|g| if g.apply(j) == i { one } else { C64::new(0.0, 0.0) }).collect();
            ComplexMatrix::from_diagonal(&diag)
        })
        .collect();
    MagicUnitaryModel::new(n, d, false, entries)
}

/// Checks `|H_ij| = 1` and `H·H* = n·I`, naming the first failed condition.
pub fn check_hadamard(h: &ComplexMatrix, tol: Tolerance) -> Result<()> {
    if !h.is_square() {
        return Err(Error::Dimension(format!("Hadamard matrix must be square, got {}x{}", h.rows(), h.cols())));
    }
    let n = h.rows();
    for r in 0..n {
        for c in 0..n {
            if (h[(r, c)].norm() - 1.0).abs() > tol.eps() {
                return Err(Error::InvalidInput(format!(
                    "|H_{},{}| = {} differs from 1",
                    r + 1,
                    c + 1,
                    h[(r, c)].norm()
                )));
            }
        }
    }
    let gram = h.matmul(&h.adjoint())?;
    let target = ComplexMatrix::identity(n).scale(C64::new(n as f64, 0.0));
    if gram.max_abs_diff(&target) > tol.scaled(n) {
        return Err(Error::InvalidInput("H·H* ≠ nI".into()));
    }
    Ok(())
}

/// Model of a complex Hadamard matrix: `d = n`, and `P_ij` is the rank-one
/// projection onto the normalized ratio vector `(H_ia / H_ja)_a`.
pub fn from_hadamard(h: &ComplexMatrix, tol: Tolerance) -> Result<MagicUnitaryModel> {
    check_hadamard(h, tol)?;
    let n = h.rows();
    let scale = 1.0 / (n as f64).sqrt();
    let entries = (0..n * n)
        .map(|idx| {
            let (i, j) = (idx / n, idx % n);
            let xi: Vec<C64> = (0..n).map(|a| h[(i, a)] / h[(j, a)] * scale).collect();
            ComplexMatrix::from_fn(n, n, |r, c| xi[r] * xi[c].conj())
        })
        .collect();
    MagicUnitaryModel::new(n, n, false, entries)
}

/// Group-dual model of self-inverse unitaries: `P_ii = U_i`, zeros elsewhere.
pub fn from_unitaries(unitaries: &[ComplexMatrix], tol: Tolerance) -> Result<MagicUnitaryModel> {
    build_diagonal(unitaries, tol, true)
}

/// As [`from_unitaries`] without the `U_i² = I` requirement.
///
/// The transfer-matrix criterion is only established for involutive
/// generators; models built here are flagged and certify them at the
/// caller's own risk.
pub fn from_unitaries_unchecked_involution(
    unitaries: &[ComplexMatrix],
    tol: Tolerance,
) -> Result<MagicUnitaryModel> {
    let mut model = build_diagonal(unitaries, tol, false)?;
    model.set_allow_non_involutive(true);
    Ok(model)
}

fn build_diagonal(unitaries: &[ComplexMatrix], tol: Tolerance, involutive: bool) -> Result<MagicUnitaryModel> {
    let first = unitaries.first().ok_or_else(|| Error::InvalidInput("at least one unitary is required".into()))?;
    let d = first.rows();
    let n = unitaries.len();
    for (i, u) in unitaries.iter().enumerate() {
        if u.rows() != d || u.cols() != d {
            return Err(Error::Dimension(format!("U_{} is {}x{}, expected {d}x{d}", i + 1, u.rows(), u.cols())));
        }
        if !is_unitary(u, tol) {
            return Err(Error::InvalidInput(format!("U_{} is not unitary", i + 1)));
        }
        if involutive && !is_involutive(u, tol) {
            return Err(Error::InvalidInput(format!("U_{} is not self-inverse", i + 1)));
        }
    }
    let entries = (0..n * n)
        .map(|idx| {
            let (i, j) = (idx / n, idx % n);
            if i == j {
                unitaries[i].clone()
            } else {
                ComplexMatrix::zeros(d, d)
            }
        })
        .collect();
    MagicUnitaryModel::new(n, d, true, entries)
}

/// Fourier matrix `F_n = (ω^{ab})` with `ω = e^{2πi/n}`, 0-based exponents.
pub fn fourier(n: usize) -> ComplexMatrix {
    assert!(n > 0, "Fourier matrix needs n >= 1");
    ComplexMatrix::from_fn(n, n, |a, b| {
        let e = ((a * b) % n) as f64;
        C64::from_polar(1.0, 2.0 * PI * e / n as f64)
    })
}

/// Deformed tensor product `K_{(a,b),(c,e)} = A_ac · Q_cb · B_be` of two
/// Hadamard matrices, where `Q` (`rows(A) × rows(B)`) has unimodular entries.
/// The result is Hadamard of size `rows(A)·rows(B)`.
pub fn dita_product(a: &ComplexMatrix, b: &ComplexMatrix, q: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (m, n) = (a.rows(), b.rows());
    if !a.is_square() || !b.is_square() || q.rows() != m || q.cols() != n {
        return Err(Error::Dimension("dita_product needs square A, B and Q of shape rows(A) x rows(B)".into()));
    }
    Ok(ComplexMatrix::from_fn(m * n, m * n, |r, c| {
        let (ra, rb) = (r / n, r % n);
        let (ca, cb) = (c / n, c % n);
        a[(ra, ca)] * q[(ca, rb)] * b[(rb, cb)]
    }))
}
