//! JSON encodings for the crate's input and output types.
//!
//! Complex numbers are `[re, im]` pairs throughout. Matrices are
//! `{"rows", "cols", "entries"}` with row-major entries, channels are
//! `{"dim", "kraus"}`, superoperators carry their basis declaration, and
//! filter banks list `(exponent, coefficient)` pairs per filter. Parse
//! failures surface as [`Error::InvalidInput`], never panics.

use serde::{Deserialize, Serialize};

use crate::channel::{BasisKind, Channel, OperatorBasis, Superoperator};
use crate::error::{Error, Result};
use crate::mat::{CMatrix, CVector, C64};
use crate::qubit::{PauliForm, QubitClass};
use crate::structure::DecompositionReport;
use crate::wavelet::FilterBank;

fn parse_error(kind: &str, err: serde_json::Error) -> Error {
    Error::InvalidInput { detail: format!("{kind} JSON: {err}") }
}

/// Row-major complex matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixRepr {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixRepr {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let entries = (0..m.nrows())
            .flat_map(|r| (0..m.ncols()).map(move |c| (r, c)))
            .map(|(r, c)| [m[(r, c)].re, m[(r, c)].im])
            .collect();
        Self { rows: m.nrows(), cols: m.ncols(), entries }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::InvalidInput {
                detail: format!("matrix dimensions must be positive, got {}x{}", self.rows, self.cols),
            });
        }
        if self.entries.len() != self.rows * self.cols {
            return Err(Error::InvalidInput {
                detail: format!(
                    "matrix of size {}x{} needs {} entries, got {}",
                    self.rows,
                    self.cols,
                    self.rows * self.cols,
                    self.entries.len()
                ),
            });
        }
        Ok(CMatrix::from_fn(self.rows, self.cols, |r, c| {
            let [re, im] = self.entries[r * self.cols + c];
            C64::new(re, im)
        }))
    }
}

fn vector_repr(v: &CVector) -> Vec<[f64; 2]> {
    v.iter().map(|e| [e.re, e.im]).collect()
}

/// `{"dim": d, "kraus": [matrix, ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelRepr {
    pub dim: usize,
    pub kraus: Vec<MatrixRepr>,
}

impl ChannelRepr {
    pub fn from_channel(ch: &Channel) -> Self {
        Self { dim: ch.dim(), kraus: ch.kraus().iter().map(MatrixRepr::from_matrix).collect() }
    }

    pub fn to_channel(&self) -> Result<Channel> {
        let kraus: Vec<CMatrix> =
            self.kraus.iter().map(MatrixRepr::to_matrix).collect::<Result<_>>()?;
        let ch = Channel::new(kraus)?;
        if ch.dim() != self.dim {
            return Err(Error::InvalidInput {
                detail: format!(
                    "declared dimension {} does not match the Kraus operators ({})",
                    self.dim,
                    ch.dim()
                ),
            });
        }
        Ok(ch)
    }
}

/// Basis declaration for superoperator JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BasisRepr {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<Vec<[i64; 2]>>,
}

/// `{"basis": {...}, "matrix": matrix}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuperoperatorRepr {
    pub basis: BasisRepr,
    pub matrix: MatrixRepr,
}

impl SuperoperatorRepr {
    pub fn from_superoperator(s: &Superoperator) -> Self {
        let basis = match s.basis().kind() {
            BasisKind::MatrixUnitsRowMajor => {
                BasisRepr { kind: "matrix_units_row_major".into(), order: None }
            }
            BasisKind::MatrixUnitsCustomOrder(order) => BasisRepr {
                kind: "matrix_units_custom_order".into(),
                order: Some(order.iter().map(|&(r, c)| [r, c]).collect()),
            },
            BasisKind::Pauli => BasisRepr { kind: "pauli".into(), order: None },
        };
        Self { basis, matrix: MatrixRepr::from_matrix(s.matrix()) }
    }

    pub fn to_superoperator(&self) -> Result<Superoperator> {
        let matrix = self.matrix.to_matrix()?;
        let basis = match self.basis.kind.as_str() {
            "matrix_units_row_major" => {
                let d = integer_sqrt(matrix.nrows())?;
                OperatorBasis::matrix_units(d)?
            }
            "matrix_units_custom_order" => {
                let order = self.basis.order.as_ref().ok_or_else(|| Error::InvalidInput {
                    detail: "matrix_units_custom_order requires an order list".into(),
                })?;
                OperatorBasis::matrix_units_custom_order(
                    order.iter().map(|&[r, c]| (r, c)).collect(),
                )?
            }
            "pauli" => OperatorBasis::pauli(),
            other => {
                return Err(Error::InvalidInput {
                    detail: format!("unknown basis kind {other:?}"),
                })
            }
        };
        Superoperator::new(basis, matrix)
    }
}

fn integer_sqrt(n: usize) -> Result<usize> {
    let d = (n as f64).sqrt().round() as usize;
    if d * d != n {
        return Err(Error::InvalidInput {
            detail: format!("superoperator size {n} is not a perfect square"),
        });
    }
    Ok(d)
}

/// One `(exponent, coefficient)` pair of a filter.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FilterCoeffRepr {
    pub exponent: i64,
    pub coeff: [f64; 2],
}

/// `{"scale": n, "filters": [[{exponent, coeff}, ...], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FilterBankRepr {
    pub scale: usize,
    pub filters: Vec<Vec<FilterCoeffRepr>>,
}

impl FilterBankRepr {
    pub fn from_filter_bank(fb: &FilterBank) -> Self {
        Self {
            scale: fb.scale(),
            filters: fb
                .filters()
                .iter()
                .map(|f| {
                    f.iter()
                        .map(|(&exponent, &c)| FilterCoeffRepr { exponent, coeff: [c.re, c.im] })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn to_filter_bank(&self) -> Result<FilterBank> {
        FilterBank::new(
            self.scale,
            self.filters
                .iter()
                .map(|f| {
                    f.iter()
                        .map(|c| (c.exponent, C64::new(c.coeff[0], c.coeff[1])))
                        .collect()
                })
                .collect(),
        )
    }
}

/// Serialized decomposition report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecompositionReportRepr {
    pub anchors: Vec<MatrixRepr>,
    pub summand_count: usize,
    pub anchor_dims: Vec<usize>,
    pub cyclic_vectors: Vec<Vec<Vec<[f64; 2]>>>,
    pub equivalence_classes: Option<Vec<Vec<usize>>>,
    pub irreducible: bool,
}

impl DecompositionReportRepr {
    pub fn from_report(report: &DecompositionReport) -> Self {
        Self {
            anchors: report.anchors.iter().map(|p| MatrixRepr::from_matrix(p.matrix())).collect(),
            summand_count: report.summand_count,
            anchor_dims: report.anchor_dims.clone(),
            cyclic_vectors: report
                .cyclic_vector_bases
                .iter()
                .map(|basis| basis.iter().map(vector_repr).collect())
                .collect(),
            equivalence_classes: report.equivalence_classes.clone(),
            irreducible: report.irreducible,
        }
    }
}

/// Serialized qubit classification: the Pauli diagonal when present, the
/// case label, and the basis projections in the two-diagonal case.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QubitReportRepr {
    pub lambdas: Option<[f64; 3]>,
    pub case: String,
    pub fixed_dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub projections: Option<Vec<MatrixRepr>>,
}

impl QubitReportRepr {
    pub fn from_classification(form: &PauliForm, class: &QubitClass) -> Self {
        let case = match class.case {
            crate::qubit::QubitCase::FullAlgebra => "full",
            crate::qubit::QubitCase::ScalarsOnly => "scalars",
            crate::qubit::QubitCase::TwoDiagonal => "two_diagonal",
        };
        Self {
            lambdas: form.diagonal_lambdas,
            case: case.into(),
            fixed_dim: class.fixed_dim,
            projections: class
                .basis_projections
                .as_ref()
                .map(|pair| pair.iter().map(|p| MatrixRepr::from_matrix(p.matrix())).collect()),
        }
    }
}

/// Either accepted input form for map-consuming commands.
#[derive(Debug, Clone)]
pub enum MapInput {
    Channel(Channel),
    Superoperator(Superoperator),
}

/// Parses a string as channel JSON, falling back to superoperator JSON.
pub fn map_input_from_json(text: &str) -> Result<MapInput> {
    let channel_err = match serde_json::from_str::<ChannelRepr>(text) {
        Ok(repr) => match repr.to_channel() {
            Ok(ch) => return Ok(MapInput::Channel(ch)),
            Err(e) => e,
        },
        Err(e) => parse_error("channel", e),
    };
    let superop_err = match serde_json::from_str::<SuperoperatorRepr>(text) {
        Ok(repr) => match repr.to_superoperator() {
            Ok(s) => return Ok(MapInput::Superoperator(s)),
            Err(e) => e,
        },
        Err(e) => parse_error("superoperator", e),
    };
    Err(Error::InvalidInput {
        detail: format!(
            "input is neither a channel ({channel_err}) nor a superoperator ({superop_err})"
        ),
    })
}

pub fn channel_from_json(text: &str) -> Result<Channel> {
    serde_json::from_str::<ChannelRepr>(text)
        .map_err(|e| parse_error("channel", e))?
        .to_channel()
}

pub fn channel_to_json(ch: &Channel) -> String {
    serde_json::to_string_pretty(&ChannelRepr::from_channel(ch))
        .expect("channel serialization cannot fail")
}

pub fn superoperator_from_json(text: &str) -> Result<Superoperator> {
    serde_json::from_str::<SuperoperatorRepr>(text)
        .map_err(|e| parse_error("superoperator", e))?
        .to_superoperator()
}

pub fn superoperator_to_json(s: &Superoperator) -> String {
    serde_json::to_string_pretty(&SuperoperatorRepr::from_superoperator(s))
        .expect("superoperator serialization cannot fail")
}

pub fn matrix_from_json(text: &str) -> Result<CMatrix> {
    serde_json::from_str::<MatrixRepr>(text)
        .map_err(|e| parse_error("matrix", e))?
        .to_matrix()
}

pub fn matrix_to_json(m: &CMatrix) -> String {
    serde_json::to_string_pretty(&MatrixRepr::from_matrix(m))
        .expect("matrix serialization cannot fail")
}

pub fn filter_bank_from_json(text: &str) -> Result<FilterBank> {
    serde_json::from_str::<FilterBankRepr>(text)
        .map_err(|e| parse_error("filter bank", e))?
        .to_filter_bank()
}

pub fn filter_bank_to_json(fb: &FilterBank) -> String {
    serde_json::to_string_pretty(&FilterBankRepr::from_filter_bank(fb))
        .expect("filter bank serialization cannot fail")
}
