//! Pauli-basis analysis and fixed-point classification of qubit channels.
//!
//! A unital trace-preserving qubit channel, written in the basis
//! `{I, sigma_x, sigma_y, sigma_z}`, acts on the Bloch part by a real
//! 3x3 matrix. When that matrix is diagonal with entries
//! `(lambda_1, lambda_2, lambda_3)`, the fixed-point algebra is decided
//! by how many of the lambdas equal 1: all three (identity channel,
//! everything fixed), none (scalars only), or exactly one (a
//! two-dimensional diagonal algebra spanned by two orthogonal rank-1
//! projections along the distinguished axis). Two lambdas equal to 1 is
//! impossible for a completely positive map, so that count is reported
//! as a tolerance conflict rather than a classification.

use serde::Serialize;

use crate::channel::{pauli_matrices, to_superoperator, Channel, OperatorBasis};
use crate::error::{Error, Result};
use crate::fixedpoint::fixed_point_space;
use crate::mat::{hermitian_eig, CMatrix, Projection, Tolerance, C64};

/// The Pauli-basis superoperator split into affine and linear parts.
#[derive(Debug, Clone, Serialize)]
pub struct PauliForm {
    /// Image of the identity direction: zero exactly when the channel is
    /// unital.
    pub t: [f64; 3],
    /// Action on the traceless part, row-major.
    pub linear: [[f64; 3]; 3],
    /// Diagonal of `linear` when all off-diagonal entries are below
    /// `rel_eps`.
    pub diagonal_lambdas: Option<[f64; 3]>,
}

/// Computes the Pauli form of a qubit channel.
///
/// The superoperator of a channel is real in the Pauli basis (Kraus
/// presentations preserve Hermiticity); a significant imaginary part
/// indicates internal inconsistency and is reported as an error.
pub fn pauli_form(ch: &Channel, tol: &Tolerance) -> Result<PauliForm> {
    if ch.dim() != 2 {
        return Err(Error::NotQubit { dim: ch.dim() });
    }
    let s = to_superoperator(ch, OperatorBasis::pauli())?;
    let m = s.matrix();
    let imag_max = m.iter().fold(0.0f64, |acc, e| acc.max(e.im.abs()));
    if imag_max > tol.rel_eps * m.norm().max(1.0) {
        return Err(Error::Inconsistent {
            detail: format!(
                "Pauli superoperator of a Kraus-presented channel has imaginary part {imag_max:.3e}"
            ),
        });
    }
    let t = [m[(1, 0)].re, m[(2, 0)].re, m[(3, 0)].re];
    let mut linear = [[0.0f64; 3]; 3];
    let mut off_diag_max = 0.0f64;
    for r in 0..3 {
        for c in 0..3 {
            linear[r][c] = m[(r + 1, c + 1)].re;
            if r != c {
                off_diag_max = off_diag_max.max(linear[r][c].abs());
            }
        }
    }
    let diagonal_lambdas = if off_diag_max < tol.rel_eps {
        Some([linear[0][0], linear[1][1], linear[2][2]])
    } else {
        None
    };
    Ok(PauliForm { t, linear, diagonal_lambdas })
}

/// The three possible fixed-point algebras of a unital trace-preserving
/// qubit channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QubitCase {
    /// Identity channel: every operator is fixed.
    #[serde(rename = "full")]
    FullAlgebra,
    /// Only multiples of the identity are fixed.
    #[serde(rename = "scalars")]
    ScalarsOnly,
    /// The fixed algebra is spanned by two orthogonal rank-1 projections.
    TwoDiagonal,
}

impl QubitCase {
    pub fn fixed_dim(self) -> usize {
        match self {
            QubitCase::FullAlgebra => 4,
            QubitCase::ScalarsOnly => 1,
            QubitCase::TwoDiagonal => 2,
        }
    }
}

/// Classification outcome.
#[derive(Debug, Clone)]
pub struct QubitClass {
    pub case: QubitCase,
    pub fixed_dim: usize,
    /// The two minimal fixed projections, present exactly in the
    /// `TwoDiagonal` case.
    pub basis_projections: Option<[Projection; 2]>,
}

/// Classifies the fixed-point algebra of a unital trace-preserving qubit
/// channel.
///
/// Diagonal Pauli forms are classified by counting the lambdas within
/// `rel_eps` of 1; the classification is discontinuous in the lambdas,
/// so the count is tolerance-dependent by nature. A count of exactly two
/// cannot occur for a completely positive map and is reported as
/// [`Error::ToleranceConflict`]. Non-diagonal channels fall back to the
/// dimension of the fixed-point space, which classifies them without any
/// diagonalizing rotation.
pub fn classify(ch: &Channel, tol: &Tolerance) -> Result<QubitClass> {
    if ch.dim() != 2 {
        return Err(Error::NotQubit { dim: ch.dim() });
    }
    if !ch.is_unital(tol) || !ch.is_trace_preserving(tol) {
        return Err(Error::NotUnitalChannel {
            unital_defect: ch.unital_defect(),
            trace_defect: ch.trace_preserving_defect(),
        });
    }
    let form = pauli_form(ch, tol)?;
    if let Some(lambdas) = form.diagonal_lambdas {
        let near_one: Vec<usize> =
            (0..3).filter(|&k| (lambdas[k] - 1.0).abs() <= tol.rel_eps).collect();
        return match near_one.len() {
            3 => Ok(QubitClass {
                case: QubitCase::FullAlgebra,
                fixed_dim: 4,
                basis_projections: None,
            }),
            0 => Ok(QubitClass {
                case: QubitCase::ScalarsOnly,
                fixed_dim: 1,
                basis_projections: None,
            }),
            1 => Ok(QubitClass {
                case: QubitCase::TwoDiagonal,
                fixed_dim: 2,
                basis_projections: Some(axis_projections(near_one[0])),
            }),
            _ => Err(Error::ToleranceConflict {
                detail: format!(
                    "exactly two of the diagonal factors ({:.6}, {:.6}, {:.6}) are within \
                     {:.1e} of 1, which no completely positive map allows; widen or tighten \
                     rel_eps",
                    lambdas[0], lambdas[1], lambdas[2], tol.rel_eps
                ),
            }),
        };
    }

    let fixed = fixed_point_space(ch, tol)?;
    match fixed.dim() {
        4 => Ok(QubitClass { case: QubitCase::FullAlgebra, fixed_dim: 4, basis_projections: None }),
        1 => Ok(QubitClass { case: QubitCase::ScalarsOnly, fixed_dim: 1, basis_projections: None }),
        2 => {
            let pair = minimal_fixed_projections(&fixed, tol)?;
            Ok(QubitClass {
                case: QubitCase::TwoDiagonal,
                fixed_dim: 2,
                basis_projections: Some(pair),
            })
        }
        dim => Err(Error::ToleranceConflict {
            detail: format!(
                "fixed-point space of a unital trace-preserving qubit channel has \
                 dimension {dim}; only 1, 2, and 4 are consistent"
            ),
        }),
    }
}

/// The pair `(I + sigma_k)/2, (I - sigma_k)/2` along Pauli axis `k`
/// (0 = x, 1 = y, 2 = z). These matrices are exactly idempotent in
/// floating point.
fn axis_projections(axis: usize) -> [Projection; 2] {
    let paulis = pauli_matrices();
    let sigma = &paulis[axis + 1];
    let eye = CMatrix::identity(2, 2);
    let tol = Tolerance::default();
    let plus = Projection::new((&eye + sigma).unscale(2.0), &tol).expect("exact projection");
    let minus = Projection::new((&eye - sigma).unscale(2.0), &tol).expect("exact projection");
    [plus, minus]
}

/// Extracts the two minimal projections from a two-dimensional fixed
/// algebra: spectrally split a non-scalar Hermitian element.
fn minimal_fixed_projections(
    fixed: &crate::fixedpoint::SubspaceBasis,
    tol: &Tolerance,
) -> Result<[Projection; 2]> {
    let eye = CMatrix::identity(2, 2);
    let mut herm_candidates: Vec<CMatrix> = Vec::new();
    for e in fixed.elements() {
        herm_candidates.push((e + e.adjoint()).unscale(2.0));
        let skew = (e - e.adjoint()).unscale(2.0);
        herm_candidates.push(skew * C64::new(0.0, -1.0));
    }
    for h in &herm_candidates {
        let centered = h - &eye * (h.trace() / C64::new(2.0, 0.0));
        if centered.norm() < 1e-8 {
            continue;
        }
        let (values, vectors) = hermitian_eig(&centered)?;
        if (values[1] - values[0]).abs() < 1e-8 {
            continue;
        }
        let p0 = Projection::from_orthonormal_columns(&vectors.columns(0, 1).into_owned());
        let p1 = Projection::from_orthonormal_columns(&vectors.columns(1, 1).into_owned());
        // Both eigenprojections of a fixed Hermitian element are fixed;
        // order the pair by its support pattern for determinism.
        let (first, second) = if p0.matrix()[(0, 0)].re >= p1.matrix()[(0, 0)].re {
            (p0, p1)
        } else {
            (p1, p0)
        };
        if fixed.contains(first.matrix(), tol) && fixed.contains(second.matrix(), tol) {
            return Ok([first, second]);
        }
    }
    Err(Error::Inconsistent {
        detail: "two-dimensional fixed algebra without a non-scalar Hermitian element".into(),
    })
}

/// Symbolic description of every fixed projection of a Pauli-diagonal
/// channel.
///
/// A projection `p = I/2 + a sigma_x + b sigma_y + c sigma_z` with
/// `a^2 + b^2 + c^2 = 1/4` is fixed exactly when each coefficient with
/// `lambda_k != 1` vanishes.
#[derive(Debug, Clone, Serialize)]
pub struct FixedProjectionFamily {
    /// Whether coefficient `k` is unconstrained (`lambda_k = 1` within
    /// `rel_eps`).
    pub free_axes: [bool; 3],
    /// Whether any nontrivial fixed projection exists.
    pub nontrivial_exists: bool,
    /// Present when exactly one axis is free: the two isolated solutions.
    #[serde(skip)]
    pub isolated_pair: Option<[Projection; 2]>,
    /// True when two or more axes are free, so the solutions form a
    /// continuum (a circle or sphere of Bloch vectors of length 1/2).
    pub continuum: bool,
}

/// Enumerates the fixed projections of the diagonal map with the given
/// factors. Purely symbolic: no complete-positivity check is applied.
pub fn fixed_projection_solutions(lambdas: [f64; 3], tol: &Tolerance) -> FixedProjectionFamily {
    let free_axes =
        [0, 1, 2].map(|k: usize| (lambdas[k] - 1.0).abs() <= tol.rel_eps);
    let free_count = free_axes.iter().filter(|&&f| f).count();
    let isolated_pair = if free_count == 1 {
        let axis = (0..3).find(|&k| free_axes[k]).unwrap();
        Some(axis_projections(axis))
    } else {
        None
    };
    FixedProjectionFamily {
        free_axes,
        nontrivial_exists: free_count > 0,
        isolated_pair,
        continuum: free_count >= 2,
    }
}
