//! Worked example maps used across tests, benchmarks, and CLI fixtures.

use crate::channel::{pauli_matrices, Channel, OperatorBasis, Superoperator};
use crate::error::{Error, Result};
use crate::mat::{CMatrix, C64};
use crate::wavelet::FilterBank;

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// The diagonal-averaging map on `M_k`: inputs keep their first `k-1`
/// diagonal entries, the last diagonal entry becomes the average of those,
/// and everything else is sent to zero.
///
/// The map is unital and completely positive but not trace-preserving,
/// and its fixed-point set is famously not an algebra: it consists of the
/// diagonal matrices whose last entry equals the average of the others,
/// which is not closed under multiplication.
pub fn arveson_channel(k: usize) -> Result<Channel> {
    ensure_arveson_size(k)?;
    let mut kraus = Vec::with_capacity(2 * (k - 1));
    let weight = real(1.0 / ((k - 1) as f64).sqrt());
    for c in 0..k - 1 {
        let mut keep = CMatrix::zeros(k, k);
        keep[(c, c)] = real(1.0);
        kraus.push(keep);
    }
    for c in 0..k - 1 {
        let mut average = CMatrix::zeros(k, k);
        average[(k - 1, c)] = weight;
        kraus.push(average);
    }
    Channel::new(kraus)
}

/// The same map as [`arveson_channel`], presented as a superoperator on
/// row-major matrix units.
pub fn arveson_superoperator(k: usize) -> Result<Superoperator> {
    ensure_arveson_size(k)?;
    let mut m = CMatrix::zeros(k * k, k * k);
    let average_row = k * k - 1;
    for c in 0..k - 1 {
        let column = c * k + c;
        m[(column, column)] = real(1.0);
        m[(average_row, column)] = real(1.0 / (k - 1) as f64);
    }
    Superoperator::new(OperatorBasis::matrix_units(k)?, m)
}

fn ensure_arveson_size(k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidInput {
            detail: format!("the diagonal-averaging map needs dimension at least 2, got {k}"),
        });
    }
    Ok(())
}

/// The basis order used by [`wavelet_compression_superoperator`]:
/// diagonal units first, then the strictly upper and lower parts, with
/// Fourier-exponent labels `0, -1, -2`.
pub fn wavelet_compression_basis_order() -> Vec<(i64, i64)> {
    vec![
        (0, 0),
        (-1, -1),
        (-2, -2),
        (0, -1),
        (0, -2),
        (-1, -2),
        (-2, -1),
        (-1, 0),
        (-2, 0),
    ]
}

/// The scale-3 bank `m_1 = 1`, `m_2 = (z + z^2)/sqrt(2)`,
/// `m_3 = (z^5 - z^4)/sqrt(2)` behind [`wavelet_compression_superoperator`].
///
/// Its polyphase components by residue mod 3 are constant-times-monomial,
/// so `(1/sqrt(3)) (m_i(rho^k z))` is unitary for every `z` on the circle,
/// and compressing to `span{z^0, z^{-1}, z^{-2}}` copies the coefficients
/// `1` and `1/sqrt(2)` directly into the Kraus entries.
pub fn wavelet_compression_filter_bank() -> FilterBank {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    FilterBank::new(
        3,
        vec![
            vec![(0, real(1.0))],
            vec![(1, real(s)), (2, real(s))],
            vec![(4, real(-s)), (5, real(s))],
        ],
    )
    .expect("the compression bank is well-formed")
}

/// A worked 9x9 superoperator of a completely positive map obtained by
/// compressing a scale-3 wavelet representation of the Cuntz relations to
/// `span{z^0, z^{-1}, z^{-2}}`, written over
/// [`wavelet_compression_basis_order`].
///
/// The Kraus operators are the compressions of the isometries built from
/// [`wavelet_compression_filter_bank`]: `A_1 = E_{0,0}`,
/// `A_2 = (E_{-1,-1} + E_{-2,-1})/sqrt(2)`,
/// `A_3 = (E_{-1,-2} - E_{-2,-2})/sqrt(2)`. The map is unital and
/// trace-preserving; it fixes `E_{0,0}` and `E_{-1,-1} + E_{-2,-2}`, and
/// those two projections are its anchors (ranks 1 and 2). Published
/// tabulations of this example circulate with inconsistent entries that no
/// completely positive map can produce; the matrix here is the one forced
/// by the filter bank, as the tests verify.
pub fn wavelet_compression_superoperator() -> Result<Superoperator> {
    let h = 0.5;
    let rows: [[f64; 9]; 9] = [
        [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, h, h, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, h, h, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, h, -h, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, h, -h, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    ];
    let m = CMatrix::from_fn(9, 9, |i, j| real(rows[i][j]));
    let basis = OperatorBasis::matrix_units_custom_order(wavelet_compression_basis_order())?;
    Superoperator::new(basis, m)
}

/// Kraus presentation of [`wavelet_compression_superoperator`].
pub fn wavelet_compression_channel() -> Result<Channel> {
    let s = wavelet_compression_superoperator()?;
    crate::channel::superoperator_to_channel(&s, &crate::mat::Tolerance::default())
}

/// The circulated but inconsistent tabulation of the compression example,
/// over the same basis order as [`wavelet_compression_superoperator`].
///
/// This variant writes `1/sqrt(2)` and `1 - 1/sqrt(2)` where the filter
/// bank forces `1/2`, and couples `E_{0,-1}` to `E_{-1,-2}`. No completely
/// positive map has this matrix: complete positivity of the diagonal
/// action would require `|<u, v>| <= 1 - 1/sqrt(2)` and
/// `|<u, v>| = 1/sqrt(2)` simultaneously, and the off-diagonal rows break
/// Hermiticity preservation outright. It ships as a fixture so that the
/// rejection path stays exercised end to end.
pub fn wavelet_compression_published_variant() -> Result<Superoperator> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let rows: [[f64; 9]; 9] = [
        [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, s, 1.0 - s, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, s, 1.0 - s, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, s, 0.0, -s, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, s, 0.0, -s, 0.0, 0.0, 0.0],
        [0.0, s, -s, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, s, -s, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    ];
    let m = CMatrix::from_fn(9, 9, |i, j| real(rows[i][j]));
    let basis = OperatorBasis::matrix_units_custom_order(wavelet_compression_basis_order())?;
    Superoperator::new(basis, m)
}

/// The scale-2 Haar bank: `m_1 = (1 + z)/sqrt(2)`, `m_2 = (1 - z)/sqrt(2)`.
pub fn haar_filter_bank() -> FilterBank {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    FilterBank::new(
        2,
        vec![
            vec![(0, real(s)), (1, real(s))],
            vec![(0, real(s)), (1, real(-s))],
        ],
    )
    .expect("the Haar bank is well-formed")
}

/// The identity channel on `M_d`, presented with the single Kraus
/// operator `I`.
pub fn identity_channel(d: usize) -> Result<Channel> {
    Channel::new(vec![CMatrix::identity(d, d)])
}

/// The qubit channel `X -> (sigma_x X sigma_x + sigma_z X sigma_z)/2`.
///
/// Unital and trace-preserving, with Pauli diagonal `(0, -1, 0)`. The two
/// Kraus operators generate the full matrix algebra, so the only invariant
/// subspaces are trivial: the decomposition has a single rank-2 anchor and
/// the map is irreducible. The commutant of the Kraus family is scalar,
/// which certifies a one-dimensional fixed-point space.
pub fn pauli_mixing_channel() -> Channel {
    let paulis = pauli_matrices();
    let s = real(std::f64::consts::FRAC_1_SQRT_2);
    Channel::new(vec![&paulis[1] * s, &paulis[3] * s])
        .expect("two 2x2 Kraus operators are well-formed")
}

/// The transpose map `X -> X^T` on `M_d`, presented as a superoperator on
/// row-major matrix units. Positive but famously not completely positive:
/// its Choi matrix is the swap operator, which has eigenvalue -1.
pub fn transpose_superoperator(d: usize) -> Result<Superoperator> {
    if d == 0 {
        return Err(Error::InvalidInput {
            detail: "the transpose map needs dimension at least 1".into(),
        });
    }
    let mut m = CMatrix::zeros(d * d, d * d);
    for k in 0..d {
        for l in 0..d {
            m[(l * d + k, k * d + l)] = real(1.0);
        }
    }
    Superoperator::new(OperatorBasis::matrix_units(d)?, m)
}

/// Phase damping with retention probability `s`: Kraus operators
/// `sqrt(s) I` and `sqrt(1-s) sigma_z`. Unital and trace-preserving,
/// with Pauli diagonal `(2s - 1, 2s - 1, 1)`.
pub fn phase_damping(s: f64) -> Result<Channel> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidInput {
            detail: format!("phase damping needs a probability in [0, 1], got {s}"),
        });
    }
    let paulis = pauli_matrices();
    Channel::new(vec![
        &paulis[0] * real(s.sqrt()),
        &paulis[3] * real((1.0 - s).sqrt()),
    ])
}

/// Amplitude damping with decay probability `gamma`: trace-preserving
/// but not unital, the standard example outside the unital class.
pub fn amplitude_damping(gamma: f64) -> Result<Channel> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidInput {
            detail: format!("amplitude damping needs a probability in [0, 1], got {gamma}"),
        });
    }
    let mut a1 = CMatrix::identity(2, 2);
    a1[(1, 1)] = real((1.0 - gamma).sqrt());
    let mut a2 = CMatrix::zeros(2, 2);
    a2[(0, 1)] = real(gamma.sqrt());
    Channel::new(vec![a1, a2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::to_superoperator;
    use crate::mat::Tolerance;

    #[test]
    fn arveson_map_averages_the_leading_diagonal() {
        let tol = Tolerance::default();
        let ch = arveson_channel(3).unwrap();
        assert!(ch.is_unital(&tol));
        assert!(!ch.is_trace_preserving(&tol));
        let mut e00 = CMatrix::zeros(3, 3);
        e00[(0, 0)] = real(1.0);
        let image = ch.apply(&e00).unwrap();
        let mut expected = CMatrix::zeros(3, 3);
        expected[(0, 0)] = real(1.0);
        expected[(2, 2)] = real(0.5);
        assert!((image - expected).norm() < 1e-15);
        // The last diagonal direction is annihilated.
        let mut e22 = CMatrix::zeros(3, 3);
        e22[(2, 2)] = real(1.0);
        assert!(ch.apply(&e22).unwrap().norm() < 1e-15);
    }

    #[test]
    fn arveson_channel_and_superoperator_agree() {
        for k in 2..=6usize {
            let ch = arveson_channel(k).unwrap();
            let direct = arveson_superoperator(k).unwrap();
            let from_kraus =
                to_superoperator(&ch, OperatorBasis::matrix_units(k).unwrap()).unwrap();
            assert!(
                (direct.matrix() - from_kraus.matrix()).norm() < 1e-12,
                "k = {k}"
            );
        }
    }

    #[test]
    fn arveson_rejects_dimension_below_two() {
        assert!(matches!(arveson_channel(1), Err(Error::InvalidInput { .. })));
        assert!(matches!(arveson_superoperator(0), Err(Error::InvalidInput { .. })));
    }

    #[test]
    fn compression_superoperator_matches_its_stated_images() {
        let tol = Tolerance::default();
        let s = wavelet_compression_superoperator().unwrap();
        // E_{-1,-1} maps to (E_{-1,-1} + E_{-2,-2} + E_{-1,-2} + E_{-2,-1})/2,
        // the halved rank-one matrix of ones on the lower block.
        let mut e11 = CMatrix::zeros(3, 3);
        e11[(1, 1)] = real(1.0);
        let image = s.apply(&e11).unwrap();
        let mut expected = CMatrix::zeros(3, 3);
        for r in 1..3 {
            for c in 1..3 {
                expected[(r, c)] = real(0.5);
            }
        }
        assert!((image - expected).norm() < 1e-12);
        // The channel behind it is completely positive, unital, and
        // trace-preserving.
        let ch = wavelet_compression_channel().unwrap();
        assert!(ch.is_unital(&tol));
        assert!(ch.is_trace_preserving(&tol));
        // Round trip: the Kraus presentation reproduces the superoperator.
        let back = to_superoperator(
            &ch,
            OperatorBasis::matrix_units_custom_order(wavelet_compression_basis_order()).unwrap(),
        )
        .unwrap();
        assert!((back.matrix() - s.matrix()).norm() < 1e-10);
    }

    #[test]
    fn compression_superoperator_comes_from_its_filter_bank() {
        let tol = Tolerance::default();
        let fb = wavelet_compression_filter_bank();
        let report =
            crate::wavelet::check_filter_unitarity(&fb, crate::wavelet::DEFAULT_UNITARITY_SAMPLES, &tol)
                .unwrap();
        assert!(report.pass, "max defect {}", report.max_defect);
        let space = crate::wavelet::CompressionSpace::new(3).unwrap();
        let compressed = crate::wavelet::compress(&fb, &space);
        assert!(compressed.unital(&tol));
        let from_bank = to_superoperator(
            &compressed.channel,
            OperatorBasis::matrix_units_custom_order(wavelet_compression_basis_order()).unwrap(),
        )
        .unwrap();
        let stated = wavelet_compression_superoperator().unwrap();
        assert!((from_bank.matrix() - stated.matrix()).norm() < 1e-12);
    }

    #[test]
    fn inconsistent_compression_tabulation_is_rejected() {
        let sup = wavelet_compression_published_variant().unwrap();
        let err = crate::channel::superoperator_to_channel(&sup, &Tolerance::default())
            .expect_err("the tabulated variant is not completely positive");
        assert!(err.is_math_precondition(), "unexpected error {err:?}");
    }

    #[test]
    fn compression_fixes_the_lower_rank_two_projection() {
        let s = wavelet_compression_superoperator().unwrap();
        let mut p = CMatrix::zeros(3, 3);
        p[(1, 1)] = real(1.0);
        p[(2, 2)] = real(1.0);
        let image = s.apply(&p).unwrap();
        assert!((image - p).norm() < 1e-12);
    }

    #[test]
    fn haar_bank_has_the_textbook_coefficients() {
        let fb = haar_filter_bank();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(fb.scale(), 2);
        assert!((fb.coefficient(0, 0) - real(s)).norm() < 1e-15);
        assert!((fb.coefficient(0, 1) - real(s)).norm() < 1e-15);
        assert!((fb.coefficient(1, 0) - real(s)).norm() < 1e-15);
        assert!((fb.coefficient(1, 1) - real(-s)).norm() < 1e-15);
        assert!(fb.coefficient(0, 2).norm() == 0.0);
    }

    #[test]
    fn identity_channel_fixes_everything() {
        let tol = Tolerance::default();
        let ch = identity_channel(2).unwrap();
        assert!(ch.is_unital(&tol) && ch.is_trace_preserving(&tol));
        let x = CMatrix::from_fn(2, 2, |r, c| C64::new((r + 2 * c) as f64, r as f64));
        assert!((ch.apply(&x).unwrap() - x).norm() < 1e-15);
    }

    #[test]
    fn pauli_mixing_channel_is_unital_with_scalar_commutant() {
        let tol = Tolerance::default();
        let ch = pauli_mixing_channel();
        assert!(ch.is_unital(&tol) && ch.is_trace_preserving(&tol));
        let commutant = crate::fixedpoint::commutant(ch.kraus(), &tol).unwrap();
        assert_eq!(commutant.dim(), 1);
    }

    #[test]
    fn transpose_superoperator_transposes_and_fails_cp() {
        let tol = Tolerance::default();
        let s = transpose_superoperator(2).unwrap();
        let x = CMatrix::from_fn(2, 2, |r, c| C64::new((1 + r + 3 * c) as f64, c as f64));
        assert!((s.apply(&x).unwrap() - x.transpose()).norm() < 1e-15);
        let err = crate::channel::superoperator_to_channel(&s, &tol)
            .expect_err("the transpose map is not completely positive");
        match err {
            Error::NotCompletelyPositive { min_eigenvalue } => {
                assert!((min_eigenvalue + 1.0).abs() < 1e-12);
            }
            other => panic!("unexpected error {other:?}"),
        }
        assert!(transpose_superoperator(0).is_err());
    }

    #[test]
    fn damping_presets_sit_on_opposite_sides_of_unitality() {
        let tol = Tolerance::default();
        let phase = phase_damping(0.75).unwrap();
        assert!(phase.is_unital(&tol) && phase.is_trace_preserving(&tol));
        let amp = amplitude_damping(0.3).unwrap();
        assert!(!amp.is_unital(&tol) && amp.is_trace_preserving(&tol));
        assert!(phase_damping(1.5).is_err());
        assert!(amplitude_damping(-0.1).is_err());
    }
}
