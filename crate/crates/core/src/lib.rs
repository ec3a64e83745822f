//! Inner-faithfulness certification for finite-dimensional matrix models of
//! compact quantum groups.
//!
//! A model `π: u_ij ↦ P_ij ∈ M_d(ℂ)` is inner faithful exactly when, for every
//! level `k`, the eigenvalue-1 multiplicity of the transfer matrix
//! `T_k = (tr(P_{i_1 j_1} ··· P_{i_k j_k}))` equals the Haar moment
//! `h(χ^k)` of the ambient quantum group. The crate builds `T_k`, counts that
//! multiplicity two independent ways, computes `h(χ^k)` exactly, and reports
//! the comparison level by level. It also evaluates the Cesàro-limit
//! idempotent state of the model on monomials, which must agree with the Haar
//! state of the Hopf image.
//!
//! ```
//! use hopfcert::{certify, fourier, from_hadamard, Capacity, MomentOracle, PermutationGroup, Tolerance, Verdict};
//!
//! let tol = Tolerance::default();
//! let model = from_hadamard(&fourier(2), tol).unwrap();
//! let oracle = MomentOracle::ClassicalPermutationGroup(PermutationGroup::symmetric(2).unwrap());
//! let report = certify(&model, &oracle, 3, tol, Capacity::default()).unwrap();
//! assert_eq!(report.verdict, Verdict::ConfirmedUpTo { k_max: 3, warnings: false });
//! ```

pub mod certify;
pub mod cli;
pub mod error;
pub mod io;
pub mod linalg;
pub mod models;
pub mod moments;
pub mod report;
pub mod transfer;

pub use certify::{certify, compare_idempotent_to_haar, CertificateReport, CertifyFailure, LevelRecord, Verdict};
pub use error::{Error, Result};
pub use linalg::{
    cesaro_projector, eigenone_multiplicity_kernel, is_hermitian_projection, operator_norm_estimate, ComplexMatrix,
    Tolerance, C64,
};
pub use models::{
    dita_product, fourier, from_hadamard, from_permutations, from_unitaries, validate_magic_unitary,
    MagicUnitaryModel, Permutation, ValidationReport,
};
pub use moments::{MomentOracle, PermutationGroup, Rational};
pub use transfer::{
    build_transfer, convolution_power_eval, idempotent_eval, multiplicity_one, Capacity, Method, StateValue,
    TransferMatrix, Word,
};
