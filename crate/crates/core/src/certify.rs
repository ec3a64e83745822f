//! Level-by-level comparison of `m_k = #(1 ∈ T_k)` against `c_k = h(χ^k)`.
//!
//! The inclusion `Fix(u^{⊗k}) ⊆ (1 ∈ T_k)` always holds, so `m_k ≥ c_k`
//! whenever the oracle really describes a quantum group the model represents.
//! Equality at every level is equivalent to inner faithfulness; a finite scan
//! can only confirm it up to the last level checked.

use num_bigint::BigInt;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{Tolerance, C64};
use crate::models::MagicUnitaryModel;
use crate::moments::{as_integer, to_f64, MomentOracle, Rational};
use crate::transfer::{build_transfer, Capacity, IdempotentState, Method, Word};
use crate::io::{model_digest, oracle_digest};

pub const CONFIRMATION_CAVEAT: &str = "ConfirmedUpTo(k) means m_j = c_j for every level j <= k that was scanned; \
inner faithfulness requires equality at every level, which a finite scan cannot establish.";

#[derive(Debug, Clone, PartialEq)]
pub struct LevelRecord {
    pub k: usize,
    pub m_k: usize,
    pub c_k: BigInt,
    pub marginal: bool,
    pub kernel_count: usize,
    pub cesaro_count: usize,
    pub cesaro_rounds: u32,
    pub norm_estimate: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// `m_j = c_j` for all `j ≤ k_max`; `warnings` is set when any level was numerically marginal.
    ConfirmedUpTo { k_max: usize, warnings: bool },
    /// First level with `m_k > c_k`: the model is not inner faithful.
    RefutedAt { k: usize, m_k: usize, c_k: BigInt },
    /// `m_k < c_k`, which the fixed-space inclusion rules out: a numerical or modeling fault.
    Inconsistent { k: usize, m_k: usize, c_k: BigInt },
}

impl Verdict {
    pub fn label(&self) -> String {
        match self {
            Verdict::ConfirmedUpTo { k_max, warnings: false } => format!("ConfirmedUpTo({k_max})"),
            Verdict::ConfirmedUpTo { k_max, warnings: true } => format!("ConfirmedUpTo({k_max}) with warnings"),
            Verdict::RefutedAt { k, .. } => format!("RefutedAt({k})"),
            Verdict::Inconsistent { k, .. } => format!("Inconsistent({k})"),
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport {
    pub levels: Vec<LevelRecord>,
    pub verdict: Verdict,
    pub model_digest: String,
    pub oracle_digest: String,
    pub tolerance: f64,
}

/// Levels completed before a failure, returned alongside the error.
#[derive(Debug, Clone, PartialEq)]
pub struct CertifyFailure {
    pub levels: Vec<LevelRecord>,
    pub error: Error,
}

impl fmt::Display for CertifyFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (after {} completed levels)", self.error, self.levels.len())
    }
}

impl std::error::Error for CertifyFailure {}

fn check_dimensions(model: &MagicUnitaryModel, oracle: &MomentOracle) -> Result<()> {
    if let Some(n) = oracle.n() {
        if n != model.n() {
            return Err(Error::Dimension(format!("model has n = {} but the oracle describes n = {n}", model.n())));
        }
    }
    if matches!(oracle, MomentOracle::GroupDual(_)) != model.is_diagonal() {
        return Err(Error::InvalidInput(
            "group-dual oracles pair with diagonal models, and only with them".into(),
        ));
    }
    Ok(())
}

/// Scans `k = 1..=k_max`, stopping at the first level where `m_k ≠ c_k`.
///
/// The oracle must describe a quantum group the model is a representation of;
/// the procedure cannot check that.
pub fn certify(
    model: &MagicUnitaryModel,
    oracle: &MomentOracle,
    k_max: usize,
    tol: Tolerance,
    cap: Capacity,
) -> std::result::Result<CertificateReport, CertifyFailure> {
    let mut levels = Vec::new();
    let fail = |levels: &Vec<LevelRecord>, error| CertifyFailure { levels: levels.clone(), error };
    if k_max == 0 {
        return Err(fail(&levels, Error::InvalidInput("k_max must be at least 1".into())));
    }
    check_dimensions(model, oracle).map_err(|e| fail(&levels, e))?;

    let mut verdict = None;
    for k in 1..=k_max {
        let record = certify_level(model, oracle, k, tol, cap).map_err(|e| fail(&levels, e))?;
        let (m_k, c_k) = (record.m_k, record.c_k.clone());
        levels.push(record);
        let m_big = BigInt::from(m_k);
        if m_big > c_k {
            verdict = Some(Verdict::RefutedAt { k, m_k, c_k });
            break;
        }
        if m_big < c_k {
            verdict = Some(Verdict::Inconsistent { k, m_k, c_k });
            break;
        }
    }
    let verdict = verdict.unwrap_or_else(|| Verdict::ConfirmedUpTo {
        k_max,
        warnings: levels.iter().any(|l| l.marginal),
    });
    Ok(CertificateReport {
        levels,
        verdict,
        model_digest: model_digest(model),
        oracle_digest: oracle_digest(oracle),
        tolerance: tol.eps(),
    })
}

fn certify_level(
    model: &MagicUnitaryModel,
    oracle: &MomentOracle,
    k: usize,
    tol: Tolerance,
    cap: Capacity,
) -> Result<LevelRecord> {
    let c = oracle.character_moment(k)?;
    let c_k = as_integer(&c)
        .ok_or_else(|| Error::InvalidInput(format!("moment c_{k} = {c} is not an integer dimension")))?;
    let t = build_transfer(model, k, cap)?;
    let norm_estimate = t.check_contractive(tol)?;
    let mult = t.multiplicity(Method::Both, tol)?;
    Ok(LevelRecord {
        k,
        m_k: mult.count,
        c_k,
        marginal: mult.marginal,
        kernel_count: mult.kernel.unwrap_or(mult.count),
        cesaro_count: mult.cesaro.unwrap_or(mult.count),
        cesaro_rounds: mult.cesaro_rounds.unwrap_or(0),
        norm_estimate,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub word: Word,
    pub idempotent: C64,
    pub haar: Rational,
    pub difference: f64,
}

/// Pairs `φ̃` on each word with the oracle's exact Haar integral.
///
/// When the oracle describes the Hopf image (for a classical model, the group
/// generated by its points) every difference vanishes.
pub fn compare_idempotent_to_haar(
    model: &MagicUnitaryModel,
    oracle: &MomentOracle,
    words: &[Word],
    tol: Tolerance,
    cap: Capacity,
) -> Result<Vec<ComparisonRow>> {
    check_dimensions(model, oracle)?;
    let mut state = IdempotentState::new(model, tol, cap);
    let mut haar = oracle.haar_evaluator();
    words
        .iter()
        .map(|w| {
            let idempotent = state.eval(w)?.value();
            let h = haar.eval(w)?;
            let difference = (idempotent - C64::new(to_f64(&h), 0.0)).norm();
            Ok(ComparisonRow { word: w.clone(), idempotent, haar: h, difference })
        })
        .collect()
}
