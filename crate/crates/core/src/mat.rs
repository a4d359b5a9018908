//! Complex matrix primitives shared by every other module.
//!
//! All numerics run on dynamically sized `Complex<f64>` matrices. Subspaces
//! cross module boundaries as orthonormal column blocks or as the
//! [`Projection`]s built from them, and every tolerance decision flows
//! through a single [`Tolerance`] value instead of scattered epsilons.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Hermiticity and idempotency gate used where no caller tolerance applies.
const STRUCT_GATE: f64 = 1e-8;

/// Shared numerical thresholds.
///
/// `abs_eps` gates convergence and residual tests, `rel_eps` gates rank
/// decisions and subspace comparisons, `psd_slack` is the slack allowed
/// below zero in semidefiniteness tests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs_eps: f64,
    pub rel_eps: f64,
    pub psd_slack: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { abs_eps: 1e-10, rel_eps: 1e-9, psd_slack: 1e-9 }
    }
}

impl Tolerance {
    pub fn new(abs_eps: f64, rel_eps: f64, psd_slack: f64) -> Result<Self> {
        if abs_eps <= 0.0 || rel_eps <= 0.0 || psd_slack <= 0.0 {
            return Err(Error::InvalidInput {
                detail: format!(
                    "tolerances must be strictly positive, got abs_eps={abs_eps}, rel_eps={rel_eps}, psd_slack={psd_slack}"
                ),
            });
        }
        Ok(Self { abs_eps, rel_eps, psd_slack })
    }

    /// Cutoff under which singular values count as zero.
    ///
    /// The `max(1, sigma_max)` guard keeps near-zero matrices at rank zero
    /// instead of promoting their noise floor to full rank.
    pub fn rank_cutoff(&self, sigma_max: f64) -> f64 {
        self.rel_eps * sigma_max.max(1.0)
    }
}

pub fn ensure_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NonSquare { rows: m.nrows(), cols: m.ncols() });
    }
    Ok(m.nrows())
}

/// Frobenius distance from `m` to its adjoint.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    (m - m.adjoint()).norm()
}

fn ensure_hermitian(m: &CMatrix) -> Result<()> {
    let defect = hermiticity_defect(m);
    if defect > STRUCT_GATE * m.norm().max(1.0) {
        return Err(Error::NotHermitian { defect });
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Returns eigenvalues in ascending order and the matrix whose column `k`
/// is a unit eigenvector for the `k`-th eigenvalue. The input is
/// symmetrized as `(M + M†)/2` before factoring so roundoff in the caller
/// does not leak into complex eigenvalues.
pub fn hermitian_eig(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let d = ensure_square(m)?;
    ensure_hermitian(m)?;
    let sym = (m + m.adjoint()).scale(0.5);
    let se = nalgebra::SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let vectors = CMatrix::from_columns(
        &order.iter().map(|&i| se.eigenvectors.column(i).into_owned()).collect::<Vec<_>>(),
    );
    Ok((values, vectors))
}

/// Spectral norm (largest singular value).
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    nalgebra::SVD::new(m.clone(), false, false)
        .singular_values
        .iter()
        .fold(0.0f64, |acc, &s| acc.max(s))
}

/// Positive semidefiniteness within slack.
///
/// A matrix passes when it is Hermitian and its smallest eigenvalue is at
/// least `-psd_slack * max(1, ||M||_2)`. A non-Hermitian square matrix is
/// reported as not PSD rather than as an error.
pub fn is_psd(m: &CMatrix, tol: &Tolerance) -> Result<bool> {
    ensure_square(m)?;
    if hermiticity_defect(m) > STRUCT_GATE * m.norm().max(1.0) {
        return Ok(false);
    }
    let (values, _) = hermitian_eig(m)?;
    Ok(psd_defect_from_spectrum(&values) <= tol.psd_slack)
}

/// Scaled distance below positive semidefiniteness of the Hermitian part:
/// `max(0, -lambda_min) / max(1, max |lambda|)`. Zero for PSD input.
pub fn psd_defect(m: &CMatrix) -> Result<f64> {
    ensure_square(m)?;
    let (values, _) = hermitian_eig(m)?;
    Ok(psd_defect_from_spectrum(&values))
}

/// How far below PSD the spectrum reaches, scaled by `max(1, ||M||_2)`.
fn psd_defect_from_spectrum(values: &[f64]) -> f64 {
    let min = values.first().copied().unwrap_or(0.0);
    let norm2 = values.iter().fold(0.0f64, |acc, &v| acc.max(v.abs()));
    (-min).max(0.0) / norm2.max(1.0)
}

/// Orthogonal projection onto the eigenspace of `m` for eigenvalue `lambda`.
///
/// Eigenvalues within `rel_eps * max(1, |lambda|)` of `lambda` contribute;
/// an empty selection yields the zero projection.
pub fn eigenspace_projection(m: &CMatrix, lambda: f64, tol: &Tolerance) -> Result<Projection> {
    let d = ensure_square(m)?;
    let (values, vectors) = hermitian_eig(m)?;
    let window = tol.rel_eps * lambda.abs().max(1.0);
    let cols: Vec<_> = (0..d)
        .filter(|&i| (values[i] - lambda).abs() <= window)
        .map(|i| vectors.column(i).into_owned())
        .collect();
    if cols.is_empty() {
        return Ok(Projection::zero(d));
    }
    Ok(Projection::from_orthonormal_columns(&CMatrix::from_columns(&cols)))
}

/// Orthonormal basis for the column span of `m`.
///
/// Columns of the result are the left singular vectors whose singular
/// values clear [`Tolerance::rank_cutoff`]; the column count is the
/// numerical rank. A zero-column input returns a zero-column matrix.
pub fn orthonormalize(m: &CMatrix, tol: &Tolerance) -> CMatrix {
    if m.ncols() == 0 || m.nrows() == 0 {
        return CMatrix::zeros(m.nrows(), 0);
    }
    let svd = nalgebra::SVD::new(m.clone(), true, false);
    let u = svd.u.expect("left singular vectors requested");
    let sigma_max = svd.singular_values.iter().fold(0.0f64, |acc, &s| acc.max(s));
    let cutoff = tol.rank_cutoff(sigma_max);
    let mut keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > cutoff)
        .collect();
    keep.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let cols: Vec<_> = keep.iter().map(|&i| u.column(i).into_owned()).collect();
    if cols.is_empty() {
        return CMatrix::zeros(m.nrows(), 0);
    }
    CMatrix::from_columns(&cols)
}

/// Convenience wrapper over [`orthonormalize`] for a list of vectors.
pub fn orthonormalize_vectors(vectors: &[CVector], tol: &Tolerance) -> CMatrix {
    if vectors.is_empty() {
        return CMatrix::zeros(0, 0);
    }
    let cols: Vec<_> = vectors.iter().map(|v| CMatrix::from_column_slice(v.len(), 1, v.as_slice())).collect();
    let mut m = CMatrix::zeros(vectors[0].len(), vectors.len());
    for (j, c) in cols.iter().enumerate() {
        m.set_column(j, &c.column(0));
    }
    orthonormalize(&m, tol)
}

/// Numerical rank of `m` under the shared cutoff rule.
pub fn numerical_rank(m: &CMatrix, tol: &Tolerance) -> usize {
    if m.ncols() == 0 || m.nrows() == 0 {
        return 0;
    }
    let svd = nalgebra::SVD::new(m.clone(), false, false);
    let sigma_max = svd.singular_values.iter().fold(0.0f64, |acc, &s| acc.max(s));
    let cutoff = tol.rank_cutoff(sigma_max);
    svd.singular_values.iter().filter(|&&s| s > cutoff).count()
}

/// Orthonormal basis of the null space of `m`, as matrix columns.
pub fn kernel(m: &CMatrix, tol: &Tolerance) -> CMatrix {
    let cols = m.ncols();
    if cols == 0 {
        return CMatrix::zeros(0, 0);
    }
    // Padding with zero rows leaves the kernel unchanged and guarantees the
    // SVD returns all `cols` right singular vectors.
    let work = if m.nrows() >= cols {
        m.clone()
    } else {
        let mut w = CMatrix::zeros(cols, cols);
        w.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
        w
    };
    let svd = nalgebra::SVD::new(work, false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sigma_max = svd.singular_values.iter().fold(0.0f64, |acc, &s| acc.max(s));
    let cutoff = tol.rank_cutoff(sigma_max);
    let kept: Vec<_> = (0..v_t.nrows())
        .filter(|&i| svd.singular_values[i] <= cutoff)
        .map(|i| v_t.row(i).adjoint())
        .collect();
    if kept.is_empty() {
        return CMatrix::zeros(cols, 0);
    }
    CMatrix::from_columns(&kept)
}

/// Largest principal-angle sine between two column spans.
///
/// Spans of different dimensions are maximally apart by convention (1.0).
/// Inputs must have orthonormal columns.
pub fn max_principal_angle_sine(q1: &CMatrix, q2: &CMatrix) -> f64 {
    if q1.ncols() != q2.ncols() {
        return 1.0;
    }
    if q1.ncols() == 0 {
        return 0.0;
    }
    // The sine of the largest principal angle is the spectral norm of
    // (I - Q1 Q1*) Q2. Computing it through the residual stays accurate
    // for nearly equal spans, where the cosine-based formula
    // sqrt(1 - sigma_min^2) loses half the significant digits.
    let residual = q2 - q1 * (q1.adjoint() * q2);
    spectral_norm(&residual).min(1.0)
}

/// Largest distance from a unit vector of `span(q_sub)` to `span(q_sup)`,
/// i.e. the spectral norm of `(I - P_sup) Q_sub`. Zero means containment.
pub fn containment_sine(q_sub: &CMatrix, q_sup: &CMatrix) -> f64 {
    if q_sub.ncols() == 0 {
        return 0.0;
    }
    let residual = q_sub - q_sup * (q_sup.adjoint() * q_sub);
    spectral_norm(&residual)
}

/// Column-stacking vectorization; block `k` of the result is column `k`.
pub fn vec_col(m: &CMatrix) -> CVector {
    let (r, c) = (m.nrows(), m.ncols());
    CVector::from_fn(r * c, |i, _| m[(i % r, i / r)])
}

/// Inverse of [`vec_col`].
pub fn unvec_col(v: &CVector, rows: usize, cols: usize) -> Result<CMatrix> {
    if v.len() != rows * cols {
        return Err(Error::DimensionMismatch { expected: rows * cols, got: v.len() });
    }
    Ok(CMatrix::from_fn(rows, cols, |i, j| v[j * rows + i]))
}

/// Orthogonal projection, stored with its rank.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    matrix: CMatrix,
    rank: usize,
}

impl Projection {
    /// Validates Hermiticity, idempotency, and integrality of the trace.
    pub fn new(matrix: CMatrix, _tol: &Tolerance) -> Result<Self> {
        let d = ensure_square(&matrix)?;
        let scale = matrix.norm().max(1.0);
        let herm = hermiticity_defect(&matrix);
        if herm > STRUCT_GATE * scale {
            return Err(Error::NotHermitian { defect: herm });
        }
        let idem = (&matrix * &matrix - &matrix).norm();
        if idem > STRUCT_GATE * scale {
            return Err(Error::InvalidInput {
                detail: format!("matrix is not idempotent (defect {idem:.3e})"),
            });
        }
        let trace = matrix.trace().re;
        let rank = trace.round();
        if (trace - rank).abs() > 1e-6 || rank < 0.0 || rank > d as f64 {
            return Err(Error::InvalidInput {
                detail: format!("projection trace {trace} is not a valid rank"),
            });
        }
        Ok(Self { matrix, rank: rank as usize })
    }

    /// Projection onto the span of orthonormal columns `q`.
    pub fn from_orthonormal_columns(q: &CMatrix) -> Self {
        Self { matrix: q * q.adjoint(), rank: q.ncols() }
    }

    pub fn identity(d: usize) -> Self {
        Self { matrix: CMatrix::identity(d, d), rank: d }
    }

    pub fn zero(d: usize) -> Self {
        Self { matrix: CMatrix::zeros(d, d), rank: 0 }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Complementary projection `I - P`.
    pub fn complement(&self) -> Self {
        let d = self.dim();
        Self { matrix: CMatrix::identity(d, d) - &self.matrix, rank: d - self.rank }
    }

    /// Orthonormal basis of the range, with exactly `rank` columns.
    pub fn range_basis(&self, tol: &Tolerance) -> CMatrix {
        if self.rank == 0 {
            return CMatrix::zeros(self.dim(), 0);
        }
        let q = orthonormalize(&self.matrix, tol);
        debug_assert_eq!(q.ncols(), self.rank);
        q
    }
}

/// Deterministic generator used everywhere randomness is needed.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard normal via Box-Muller.
fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Standard complex normal entry.
fn cgauss(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(gauss(rng), gauss(rng)) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix with independent standard complex normal entries.
pub fn random_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| cgauss(rng))
}

pub fn random_hermitian(d: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let g = random_matrix(d, d, rng);
    (&g + g.adjoint()).scale(0.5)
}

pub fn random_unit_vector(d: usize, rng: &mut ChaCha8Rng) -> CVector {
    loop {
        let v = CVector::from_fn(d, |_, _| cgauss(rng));
        let n = v.norm();
        if n > 1e-6 {
            return v.unscale(n);
        }
    }
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of the
/// diagonal of R absorbed into Q.
pub fn random_unitary(d: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let g = random_matrix(d, d, rng);
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { C64::new(1.0, 0.0) };
        let col = q.column(j) * phase;
        q.set_column(j, &col);
    }
    q
}

/// Eigenpairs of a general (not necessarily Hermitian) square matrix.
///
/// Eigenvalues come from the Schur form of the realified matrix; each is
/// refined into an eigenvector by inverse iteration. Pairs that fail the
/// residual gate `||Mv - lambda v|| <= 1e-8 * max(1, ||M||)` are dropped,
/// which silently discards the conjugate shadows the realification adds.
pub fn complex_eigenpairs(m: &CMatrix, rng: &mut ChaCha8Rng) -> Result<Vec<(C64, CVector)>> {
    let d = ensure_square(m)?;
    if d == 0 {
        return Ok(Vec::new());
    }
    let real = DMatrix::<f64>::from_fn(2 * d, 2 * d, |i, j| {
        let (bi, bj) = (i / d, j / d);
        let e = m[(i % d, j % d)];
        match (bi, bj) {
            (0, 0) | (1, 1) => e.re,
            (0, 1) => -e.im,
            _ => e.im,
        }
    });
    let candidates = real.complex_eigenvalues();
    let scale = m.norm().max(1.0);
    let gate = 1e-8 * scale;
    let mut out: Vec<(C64, CVector)> = Vec::new();
    for lam in candidates.iter() {
        let lam = C64::new(lam.re, lam.im);
        if let Some(v) = inverse_iteration(m, lam, rng) {
            // Rayleigh refinement of the eigenvalue estimate.
            let refined = (v.adjoint() * m * &v)[(0, 0)];
            let residual = (m * &v - &v * refined).norm();
            if residual <= gate {
                out.push((refined, v));
            }
        }
    }
    Ok(out)
}

fn inverse_iteration(m: &CMatrix, lambda: C64, rng: &mut ChaCha8Rng) -> Option<CVector> {
    let d = m.nrows();
    let scale = m.norm().max(1.0);
    // A tiny shift keeps the factorization regular when lambda is exact.
    let mut shift = 1e-12 * scale;
    for _ in 0..4 {
        let shifted = m - CMatrix::identity(d, d) * (lambda + C64::new(shift, shift));
        let lu = shifted.lu();
        let mut v = random_unit_vector(d, rng);
        let mut ok = true;
        for _ in 0..3 {
            match lu.solve(&v) {
                Some(next) => {
                    let n = next.norm();
                    if !n.is_finite() || n == 0.0 {
                        ok = false;
                        break;
                    }
                    v = next.unscale(n);
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            return Some(v);
        }
        shift *= 100.0;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn diag(values: &[f64]) -> CMatrix {
        CMatrix::from_fn(values.len(), values.len(), |i, j| {
            if i == j { c(values[i], 0.0) } else { c(0.0, 0.0) }
        })
    }

    #[test]
    fn hermitian_eig_identity() {
        let (values, vectors) = hermitian_eig(&CMatrix::identity(3, 3)).unwrap();
        assert_eq!(values, vec![1.0, 1.0, 1.0]);
        assert!((vectors.adjoint() * &vectors - CMatrix::identity(3, 3)).norm() < 1e-12);
    }

    #[test]
    fn hermitian_eig_sorts_ascending() {
        let (values, _) = hermitian_eig(&diag(&[1.0, 0.0, -1.0])).unwrap();
        assert_eq!(values, vec![-1.0, 0.0, 1.0]);
    }

    #[test]
    fn hermitian_eig_reconstructs() {
        let mut rng = seeded_rng(11);
        let h = random_hermitian(6, &mut rng);
        let (values, vectors) = hermitian_eig(&h).unwrap();
        let lambda = diag(&values);
        let recon = &vectors * lambda * vectors.adjoint();
        assert!((recon - &h).norm() < 1e-10);
        assert!((vectors.adjoint() * &vectors - CMatrix::identity(6, 6)).norm() < 1e-12);
    }

    #[test]
    fn hermitian_eig_rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn hermitian_eig_rejects_non_square() {
        let m = CMatrix::zeros(2, 3);
        assert!(matches!(hermitian_eig(&m), Err(Error::NonSquare { .. })));
    }

    #[test]
    fn psd_cases() {
        let tol = Tolerance::default();
        assert!(is_psd(&CMatrix::zeros(3, 3), &tol).unwrap());
        assert!(!is_psd(&diag(&[1.0, -0.5]), &tol).unwrap());
        let mut rng = seeded_rng(3);
        let a = random_matrix(4, 4, &mut rng);
        let gram = &a * a.adjoint();
        assert!(is_psd(&gram, &tol).unwrap());
    }

    #[test]
    fn psd_respects_slack_scaling() {
        let tol = Tolerance::default();
        // Defect far below slack * norm passes, beyond it fails.
        assert!(is_psd(&diag(&[10.0, -1e-9]), &tol).unwrap());
        assert!(!is_psd(&diag(&[10.0, -1e-6]), &tol).unwrap());
    }

    #[test]
    fn eigenspace_projection_picks_degenerate_space() {
        let tol = Tolerance::default();
        let p = eigenspace_projection(&diag(&[1.0, 1.0, 0.0]), 1.0, &tol).unwrap();
        assert_eq!(p.rank(), 2);
        assert!((p.matrix() - diag(&[1.0, 1.0, 0.0])).norm() < 1e-12);

        let none = eigenspace_projection(&diag(&[1.0, 1.0, 0.0]), 0.5, &tol).unwrap();
        assert_eq!(none.rank(), 0);
    }

    #[test]
    fn eigenspace_projection_commutes_and_is_idempotent() {
        let tol = Tolerance::default();
        let mut rng = seeded_rng(17);
        let u = random_unitary(4, &mut rng);
        let m = &u * diag(&[2.0, 2.0, -1.0, 0.5]) * u.adjoint();
        let p = eigenspace_projection(&m, 2.0, &tol).unwrap();
        assert_eq!(p.rank(), 2);
        let pm = p.matrix();
        assert!((pm * pm - pm).norm() < 1e-10);
        assert!((pm * &m - &m * pm).norm() < 1e-10);
    }

    #[test]
    fn orthonormalize_drops_dependent_columns() {
        let tol = Tolerance::default();
        let e1 = CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let e2 = CVector::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let q = orthonormalize_vectors(&[e1.clone(), e1.clone()], &tol);
        assert_eq!(q.ncols(), 1);
        let q2 = orthonormalize_vectors(&[e1, e2], &tol);
        assert_eq!(q2.ncols(), 2);
        assert!((q2.adjoint() * &q2 - CMatrix::identity(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn orthonormalize_saturates_at_ambient_dimension() {
        let tol = Tolerance::default();
        let mut rng = seeded_rng(5);
        let m = random_matrix(3, 5, &mut rng);
        let q = orthonormalize(&m, &tol);
        assert_eq!(q.ncols(), 3);
        assert!((q.adjoint() * &q - CMatrix::identity(3, 3)).norm() < 1e-12);
    }

    #[test]
    fn orthonormalize_empty_input() {
        let tol = Tolerance::default();
        let q = orthonormalize(&CMatrix::zeros(4, 0), &tol);
        assert_eq!((q.nrows(), q.ncols()), (4, 0));
    }

    #[test]
    fn kernel_of_wide_matrix_is_complete() {
        let tol = Tolerance::default();
        // 1x3 row (1, 1, 0): kernel has dimension 2.
        let m = CMatrix::from_row_slice(1, 3, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let k = kernel(&m, &tol);
        assert_eq!(k.ncols(), 2);
        assert!((&m * &k).norm() < 1e-12);
    }

    #[test]
    fn kernel_of_zero_matrix_is_everything() {
        let tol = Tolerance::default();
        let k = kernel(&CMatrix::zeros(3, 3), &tol);
        assert_eq!(k.ncols(), 3);
    }

    #[test]
    fn projection_validation() {
        let tol = Tolerance::default();
        assert!(Projection::new(diag(&[1.0, 0.0]), &tol).is_ok());
        assert!(Projection::new(diag(&[0.5, 0.0]), &tol).is_err());
        let p = Projection::new(diag(&[1.0, 1.0, 0.0]), &tol).unwrap();
        assert_eq!(p.rank(), 2);
        assert_eq!(p.complement().rank(), 1);
        let q = p.range_basis(&tol);
        assert_eq!(q.ncols(), 2);
    }

    #[test]
    fn principal_angles_detect_equality_and_mismatch() {
        let mut rng = seeded_rng(23);
        let u = random_unitary(4, &mut rng);
        let q1 = u.columns(0, 2).into_owned();
        // Same span expressed through a different unitary mixing of columns.
        let mix = random_unitary(2, &mut rng);
        let q2 = &q1 * mix;
        assert!(max_principal_angle_sine(&q1, &q2) < 1e-12);
        let q3 = u.columns(2, 2).into_owned();
        assert!(max_principal_angle_sine(&q1, &q3) > 0.99);
        assert!(containment_sine(&q1, &u.columns(0, 3).into_owned()) < 1e-12);
        assert!(containment_sine(&q3, &q1) > 0.99);
    }

    #[test]
    fn vec_col_round_trip_and_pairing() {
        let mut rng = seeded_rng(7);
        let m = random_matrix(3, 4, &mut rng);
        let v = vec_col(&m);
        assert_eq!(v[3], m[(0, 1)]);
        let back = unvec_col(&v, 3, 4).unwrap();
        assert_eq!(back, m);
        // Trace pairing matches the vectorized inner product.
        let x = random_matrix(3, 3, &mut rng);
        let y = random_matrix(3, 3, &mut rng);
        let pairing = (x.adjoint() * &y).trace();
        let dot = (vec_col(&x).adjoint() * vec_col(&y))[(0, 0)];
        assert!((pairing - dot).norm() < 1e-12);
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = seeded_rng(1);
        let u = random_unitary(5, &mut rng);
        assert!((u.adjoint() * &u - CMatrix::identity(5, 5)).norm() < 1e-12);
    }

    #[test]
    fn seeded_rng_is_reproducible() {
        let a = random_matrix(3, 3, &mut seeded_rng(42));
        let b = random_matrix(3, 3, &mut seeded_rng(42));
        assert_eq!(a, b);
    }

    #[test]
    fn complex_eigenpairs_recover_spectrum() {
        let mut rng = seeded_rng(9);
        let m = random_matrix(5, 5, &mut rng);
        let pairs = complex_eigenpairs(&m, &mut rng).unwrap();
        assert!(pairs.len() >= 5);
        for (lam, v) in &pairs {
            assert!((&m * v - v * *lam).norm() < 1e-7);
        }
    }

    #[test]
    fn complex_eigenpairs_on_non_diagonalizable_input() {
        // Jordan block: a single eigenvector direction, still recovered.
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let mut rng = seeded_rng(13);
        let pairs = complex_eigenpairs(&m, &mut rng).unwrap();
        for (lam, v) in &pairs {
            assert!((&m * v - v * *lam).norm() < 1e-6);
        }
    }

    #[test]
    fn tolerance_rejects_nonpositive() {
        assert!(Tolerance::new(0.0, 1e-9, 1e-9).is_err());
        assert!(Tolerance::new(1e-10, -1.0, 1e-9).is_err());
        assert!(Tolerance::new(1e-10, 1e-9, 1e-9).is_ok());
    }
}
