//! JSON file formats: models, oracle descriptors and model build specs.
//!
//! Model files:
//!
//! ```json
//! { "n": 2, "d": 2, "diagonal": false,
//!   "P": [[ [[[0.5,0],[0.5,0]], [[0.5,0],[0.5,0]]], ... ], ... ] }
//! ```
//!
//! `P[i][j]` is the `d × d` matrix of `u_{i+1, j+1}`: `d` rows of `d`
//! `[re, im]` pairs. Grid indices are 0-based in the file.
//!
//! Oracle descriptors are tagged by `kind`:
//!
//! ```json
//! {"kind": "classical", "n": 3, "generators": [[2,1,3], [2,3,1]]}
//! {"kind": "free_symmetric", "n": 4}
//! {"kind": "group_dual", "table": [[0,1],[1,0]], "generators": [1]}
//! {"kind": "explicit", "values": [1, 2, 5]}
//! ```
//!
//! Permutations are 1-based image lists; group-dual elements are 0-based rows
//! of the multiplication table.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, Tolerance, C64};
use crate::models::{
    fourier, from_hadamard, from_permutations, from_unitaries, from_unitaries_unchecked_involution, MagicUnitaryModel,
    Permutation,
};
use crate::moments::{MomentOracle, PermutationGroup, Rational, DEFAULT_GROUP_GUARD};

/// Row-major matrix of `[re, im]` pairs.
pub type MatrixRepr = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub n: usize,
    pub d: usize,
    #[serde(default)]
    pub diagonal: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub allow_non_involutive: bool,
    #[serde(rename = "P")]
    pub entries: Vec<Vec<MatrixRepr>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OracleFile {
    Classical { n: usize, generators: Vec<Vec<usize>> },
    FreeSymmetric { n: usize },
    GroupDual { table: Vec<Vec<usize>>, generators: Vec<usize> },
    Explicit { values: Vec<RationalRepr> },
}

/// A rational as a JSON integer or a string such as `"5"` or `"7/2"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalRepr {
    Integer(i64),
    Text(String),
}

impl RationalRepr {
    fn parse(&self) -> Result<Rational> {
        match self {
            RationalRepr::Integer(v) => Ok(Rational::from_integer(BigInt::from(*v))),
            RationalRepr::Text(s) => {
                let bad = || Error::InvalidInput(format!("{s:?} is not a rational number"));
                let (num, den) = match s.split_once('/') {
                    Some((a, b)) => (a.trim(), b.trim()),
                    None => (s.trim(), "1"),
                };
                let num: BigInt = num.parse().map_err(|_| bad())?;
                let den: BigInt = den.parse().map_err(|_| bad())?;
                if den == BigInt::from(0) {
                    return Err(bad());
                }
                Ok(Rational::new(num, den))
            }
        }
    }

    fn from_rational(r: &Rational) -> Self {
        RationalRepr::Text(r.to_string())
    }
}

/// Input of `build-model`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    Permutations {
        n: usize,
        points: Vec<Vec<usize>>,
    },
    Hadamard {
        #[serde(default)]
        matrix: Option<MatrixRepr>,
        #[serde(default)]
        fourier: Option<usize>,
    },
    Unitaries {
        matrices: Vec<MatrixRepr>,
        #[serde(default)]
        allow_non_involutive: bool,
    },
}

fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        let full = e.to_string();
        let suffix = format!(" at line {} column {}", e.line(), e.column());
        let message = full.strip_suffix(&suffix).unwrap_or(&full).to_string();
        Error::Parse { line: e.line(), column: e.column(), message }
    })
}

pub fn matrix_from_repr(repr: &MatrixRepr) -> Result<ComplexMatrix> {
    let rows = repr.len();
    let cols = repr.first().map_or(0, Vec::len);
    if repr.iter().any(|r| r.len() != cols) {
        return Err(Error::Dimension("ragged matrix rows".into()));
    }
    let data = repr.iter().flatten().map(|&[re, im]| C64::new(re, im)).collect();
    ComplexMatrix::from_vec(rows, cols, data)
}

pub fn matrix_to_repr(m: &ComplexMatrix) -> MatrixRepr {
    (0..m.rows()).map(|r| m.row(r).iter().map(|z| [z.re, z.im]).collect()).collect()
}

impl ModelFile {
    pub fn from_model(model: &MagicUnitaryModel) -> Self {
        let n = model.n();
        ModelFile {
            n,
            d: model.d(),
            diagonal: model.is_diagonal(),
            allow_non_involutive: model.allows_non_involutive(),
            entries: (0..n).map(|i| (0..n).map(|j| matrix_to_repr(model.entry(i, j))).collect()).collect(),
        }
    }

    pub fn into_model(self) -> Result<MagicUnitaryModel> {
        if self.entries.len() != self.n || self.entries.iter().any(|row| row.len() != self.n) {
            return Err(Error::Dimension(format!("P must be an {}x{} grid", self.n, self.n)));
        }
        let entries = self.entries.iter().flatten().map(matrix_from_repr).collect::<Result<Vec<_>>>()?;
        let mut model = MagicUnitaryModel::new(self.n, self.d, self.diagonal, entries)?;
        if self.allow_non_involutive {
            if !self.diagonal {
                return Err(Error::InvalidInput("allow_non_involutive only applies to diagonal models".into()));
            }
            model.set_allow_non_involutive(true);
        }
        Ok(model)
    }
}

pub fn parse_model(text: &str) -> Result<MagicUnitaryModel> {
    parse_json::<ModelFile>(text)?.into_model()
}

/// Pretty JSON with full `f64` precision, so that reading it back is bit-exact.
pub fn model_to_json(model: &MagicUnitaryModel) -> String {
    serde_json::to_string_pretty(&ModelFile::from_model(model)).expect("model serializes")
}

fn permutations(n: usize, lists: &[Vec<usize>]) -> Result<Vec<Permutation>> {
    lists
        .iter()
        .map(|imgs| {
            if imgs.len() != n {
                return Err(Error::Dimension(format!("permutation {imgs:?} does not have length {n}")));
            }
            Permutation::from_images(imgs)
        })
        .collect()
}

impl OracleFile {
    pub fn into_oracle(self) -> Result<MomentOracle> {
        match self {
            OracleFile::Classical { n, generators } => {
                let gens = permutations(n, &generators)?;
                Ok(MomentOracle::ClassicalPermutationGroup(PermutationGroup::generated_by(
                    n,
                    gens,
                    DEFAULT_GROUP_GUARD,
                )?))
            }
            OracleFile::FreeSymmetric { n } => MomentOracle::free_symmetric(n),
            OracleFile::GroupDual { table, generators } => MomentOracle::group_dual(table, generators),
            OracleFile::Explicit { values } => {
                MomentOracle::explicit(values.iter().map(RationalRepr::parse).collect::<Result<_>>()?)
            }
        }
    }

    pub fn from_oracle(oracle: &MomentOracle) -> Self {
        match oracle {
            MomentOracle::ClassicalPermutationGroup(g) => OracleFile::Classical {
                n: g.n(),
                generators: g.generators().iter().map(Permutation::images).collect(),
            },
            MomentOracle::FreeSymmetric { n } => OracleFile::FreeSymmetric { n: *n },
            MomentOracle::GroupDual(g) => {
                OracleFile::GroupDual { table: g.table().to_vec(), generators: g.generators().to_vec() }
            }
            MomentOracle::ExplicitSequence(values) => {
                OracleFile::Explicit { values: values.iter().map(RationalRepr::from_rational).collect() }
            }
        }
    }
}

pub fn parse_oracle(text: &str) -> Result<MomentOracle> {
    parse_json::<OracleFile>(text)?.into_oracle()
}

pub fn oracle_to_json(oracle: &MomentOracle) -> String {
    serde_json::to_string_pretty(&OracleFile::from_oracle(oracle)).expect("oracle serializes")
}

impl ModelSpec {
    pub fn build(&self, tol: Tolerance) -> Result<MagicUnitaryModel> {
        match self {
            ModelSpec::Permutations { n, points } => from_permutations(*n, &permutations(*n, points)?),
            ModelSpec::Hadamard { matrix, fourier: f } => {
                let h = match (matrix, f) {
                    (Some(m), None) => matrix_from_repr(m)?,
                    (None, Some(n)) if *n > 0 => fourier(*n),
                    (None, Some(_)) => return Err(Error::InvalidInput("fourier size must be positive".into())),
                    _ => return Err(Error::InvalidInput("give exactly one of \"matrix\" or \"fourier\"".into())),
                };
                from_hadamard(&h, tol)
            }
            ModelSpec::Unitaries { matrices, allow_non_involutive } => {
                let us = matrices.iter().map(matrix_from_repr).collect::<Result<Vec<_>>>()?;
                if *allow_non_involutive {
                    from_unitaries_unchecked_involution(&us, tol)
                } else {
                    from_unitaries(&us, tol)
                }
            }
        }
    }
}

pub fn parse_model_spec(text: &str) -> Result<ModelSpec> {
    parse_json(text)
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// SHA-256 of the compact canonical model JSON.
pub fn model_digest(model: &MagicUnitaryModel) -> String {
    sha256_hex(serde_json::to_string(&ModelFile::from_model(model)).expect("model serializes").as_bytes())
}

/// SHA-256 of the compact canonical oracle JSON.
pub fn oracle_digest(oracle: &MomentOracle) -> String {
    sha256_hex(serde_json::to_string(&OracleFile::from_oracle(oracle)).expect("oracle serializes").as_bytes())
}
