//! Fixed-point spaces, commutants, and algebra closures.
//!
//! For a unital trace-preserving channel the fixed-point set
//! `{X : Phi(X) = X}` equals the commutant of the algebra generated by the
//! Kraus operators, independently of the chosen Kraus decomposition.
//! [`verify_fixed_equals_commutant`] computes both sides from scratch and
//! compares them; the remaining operations are the pieces it is built from,
//! which are useful on their own for channels outside the unital
//! trace-preserving class.

use serde::Serialize;

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::mat::{
    is_psd, kernel, max_principal_angle_sine, orthonormalize, seeded_rng, unvec_col, vec_col,
    CMatrix, CVector, Projection, Tolerance, C64,
};

/// Default iteration cap for [`phi_infinity`].
pub const DEFAULT_MAX_ITER: usize = 100_000;

/// Orthonormal basis of a subspace of operator space `M_d`, orthonormal
/// under the trace pairing `<X, Y> = trace(X* Y)`.
#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    dim: usize,
    elements: Vec<CMatrix>,
}

impl SubspaceBasis {
    /// Wraps kernel columns (vectorized operators) back into matrices.
    fn from_vectorized_columns(dim: usize, q: &CMatrix) -> Result<Self> {
        let mut elements = Vec::with_capacity(q.ncols());
        for j in 0..q.ncols() {
            elements.push(unvec_col(&q.column(j).into_owned(), dim, dim)?);
        }
        Ok(Self { dim, elements })
    }

    /// Operator space dimension `d` (ambient vector dimension is `d*d`).
    pub fn operator_dim(&self) -> usize {
        self.dim
    }

    /// Number of basis elements.
    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    /// The basis as a `d^2 x k` matrix of orthonormal columns.
    pub fn vectorized(&self) -> CMatrix {
        let mut q = CMatrix::zeros(self.dim * self.dim, self.elements.len());
        for (j, e) in self.elements.iter().enumerate() {
            q.set_column(j, &vec_col(e));
        }
        q
    }

    /// Distance from `x` to the span, relative to `max(1, ||x||)`.
    pub fn projection_residual(&self, x: &CMatrix) -> f64 {
        let v = vec_col(x);
        let q = self.vectorized();
        let residual = &v - &q * (q.adjoint() * &v);
        residual.norm() / v.norm().max(1.0)
    }

    /// Membership within `rel_eps`.
    pub fn contains(&self, x: &CMatrix, tol: &Tolerance) -> bool {
        self.projection_residual(x) <= tol.rel_eps
    }
}

/// Orthonormal basis of `{X : Phi(X) = X}`, from the null space of the
/// column-stacked action minus the identity.
pub fn fixed_point_space(ch: &Channel, tol: &Tolerance) -> Result<SubspaceBasis> {
    let d = ch.dim();
    // vec(A X A*) = (conj(A) (x) A) vec(X) under column stacking, so the
    // fixed points are the kernel of `sum_i conj(A_i) (x) A_i - I`.
    let mut l = CMatrix::zeros(d * d, d * d);
    for a in ch.kraus() {
        l += a.conjugate().kronecker(a);
    }
    l -= CMatrix::identity(d * d, d * d);
    let q = kernel(&l, tol);
    SubspaceBasis::from_vectorized_columns(d, &q)
}

/// Orthonormal basis of `{X : g X = X g for every generator g}`.
pub fn commutant(generators: &[CMatrix], tol: &Tolerance) -> Result<SubspaceBasis> {
    let first = generators.first().ok_or_else(|| Error::InvalidInput {
        detail: "commutant needs at least one generator".into(),
    })?;
    let d = first.nrows();
    if first.ncols() != d {
        return Err(Error::NonSquare { rows: first.nrows(), cols: first.ncols() });
    }
    let eye = CMatrix::identity(d, d);
    let mut stacked = CMatrix::zeros(generators.len() * d * d, d * d);
    for (i, g) in generators.iter().enumerate() {
        if g.nrows() != d || g.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, got: g.nrows() });
        }
        // vec(gX - Xg) = (I (x) g - g^T (x) I) vec(X) under column stacking.
        let block = eye.kronecker(g) - g.transpose().kronecker(&eye);
        stacked.view_mut((i * d * d, 0), (d * d, d * d)).copy_from(&block);
    }
    let q = kernel(&stacked, tol);
    SubspaceBasis::from_vectorized_columns(d, &q)
}

/// Span of all words in the generators, as an orthonormal operator basis.
#[derive(Debug, Clone)]
pub struct AlgebraClosure {
    generators: Vec<CMatrix>,
    basis: SubspaceBasis,
    star_closed: bool,
}

impl AlgebraClosure {
    pub fn generators(&self) -> &[CMatrix] {
        &self.generators
    }

    pub fn basis(&self) -> &SubspaceBasis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// Whether the span contains the adjoint of each basis element.
    pub fn star_closed(&self) -> bool {
        self.star_closed
    }
}

/// Closure of `span{I, generators}` under left multiplication by the
/// generators (and adjoints when requested), which spans the unital algebra
/// of all words. Stabilizes in at most `d^2` growth rounds; failure to do
/// so is an internal error.
pub fn algebra_closure(
    generators: &[CMatrix],
    tol: &Tolerance,
    include_adjoints: bool,
) -> Result<AlgebraClosure> {
    let first = generators.first().ok_or_else(|| Error::InvalidInput {
        detail: "algebra closure needs at least one generator".into(),
    })?;
    let d = first.nrows();
    if first.ncols() != d {
        return Err(Error::NonSquare { rows: first.nrows(), cols: first.ncols() });
    }
    let mut mults: Vec<CMatrix> = Vec::new();
    for g in generators {
        if g.nrows() != d || g.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, got: g.nrows() });
        }
        mults.push(g.clone());
        if include_adjoints {
            mults.push(g.adjoint());
        }
    }

    let mut seed_cols: Vec<CVector> = vec![vec_col(&CMatrix::identity(d, d))];
    for g in &mults {
        seed_cols.push(vec_col(g));
    }
    let mut q = orthonormalize(&columns_to_matrix(d * d, &seed_cols), tol);

    for _round in 0..=(d * d) {
        let mut cols: Vec<CVector> = (0..q.ncols()).map(|j| q.column(j).into_owned()).collect();
        let before = cols.len();
        for j in 0..before {
            let b = unvec_col(&cols[j].clone(), d, d)?;
            for g in &mults {
                cols.push(vec_col(&(g * &b)));
            }
        }
        let grown = orthonormalize(&columns_to_matrix(d * d, &cols), tol);
        let stabilized = grown.ncols() == before;
        q = grown;
        if stabilized {
            let basis = SubspaceBasis::from_vectorized_columns(d, &q)?;
            let star_closed = basis
                .elements()
                .iter()
                .all(|e| basis.projection_residual(&e.adjoint()) <= tol.rel_eps);
            return Ok(AlgebraClosure { generators: generators.to_vec(), basis, star_closed });
        }
    }
    Err(Error::Inconsistent {
        detail: format!("algebra closure did not stabilize within {} rounds", d * d + 1),
    })
}

fn columns_to_matrix(rows: usize, cols: &[CVector]) -> CMatrix {
    let mut m = CMatrix::zeros(rows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        m.set_column(j, c);
    }
    m
}

/// Result of checking multiplicative closure of an operator subspace.
#[derive(Debug, Clone, Serialize)]
pub struct ClosureCheck {
    pub closed: bool,
    pub max_residual: f64,
    /// Indices `(i, j)` of the basis pair with the worst product residual.
    pub witness: Option<(usize, usize)>,
}

/// Tests whether all pairwise products of basis elements stay in the span.
pub fn multiplicative_closure(basis: &SubspaceBasis, tol: &Tolerance) -> ClosureCheck {
    let mut max_residual = 0.0f64;
    let mut witness = None;
    for (i, a) in basis.elements().iter().enumerate() {
        for (j, b) in basis.elements().iter().enumerate() {
            let product = a * b;
            let residual = basis.projection_residual(&product);
            if residual > max_residual {
                max_residual = residual;
                witness = Some((i, j));
            }
        }
    }
    ClosureCheck { closed: max_residual <= tol.rel_eps, max_residual, witness }
}

/// Outcome of comparing the fixed-point space with the Kraus commutant.
#[derive(Debug, Clone, Serialize)]
pub struct FixedCommutantReport {
    pub equal: bool,
    pub dim: usize,
    /// Largest violation seen over the subspace comparison and the
    /// multiplicative closure check.
    pub max_residual: f64,
    pub multiplicatively_closed: bool,
}

/// Computes the fixed-point space and the commutant of the Kraus operators
/// independently and compares them. Requires a unital trace-preserving
/// channel; for anything else the equality has no backing and the call
/// fails with [`Error::NotUnitalChannel`].
pub fn verify_fixed_equals_commutant(ch: &Channel, tol: &Tolerance) -> Result<FixedCommutantReport> {
    ensure_unital_trace_preserving(ch, tol)?;
    let fixed = fixed_point_space(ch, tol)?;
    let comm = commutant(ch.kraus(), tol)?;
    let sine = max_principal_angle_sine(&fixed.vectorized(), &comm.vectorized());
    let dims_match = fixed.dim() == comm.dim();
    let closure = multiplicative_closure(&fixed, tol);
    let gate = tol.rel_eps * (ch.dim() as f64);
    Ok(FixedCommutantReport {
        equal: dims_match && sine <= gate,
        dim: fixed.dim(),
        max_residual: sine.max(closure.max_residual),
        multiplicatively_closed: closure.closed,
    })
}

pub(crate) fn ensure_unital_trace_preserving(ch: &Channel, tol: &Tolerance) -> Result<()> {
    if !ch.is_unital(tol) || !ch.is_trace_preserving(tol) {
        return Err(Error::NotUnitalChannel {
            unital_defect: ch.unital_defect(),
            trace_defect: ch.trace_preserving_defect(),
        });
    }
    Ok(())
}

/// Which side of `p` the iteration approaches its limit from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MonotoneDirection {
    Increasing,
    Decreasing,
    Fixed,
}

/// Limit of the iteration `p, Phi(p), Phi^2(p), ...`.
#[derive(Debug, Clone)]
pub struct PhiInfinityReport {
    pub limit: CMatrix,
    pub iterations: usize,
    pub residual: f64,
    pub direction: MonotoneDirection,
}

/// Iterates a unital channel on a projection comparable with its image.
///
/// Requires `Phi(p) >= p` or `Phi(p) <= p` within `psd_slack`; the
/// monotone bounded iteration then converges and the limit is a fixed
/// point. Convergence is declared when consecutive iterates differ by at
/// most `abs_eps` in Frobenius norm.
pub fn phi_infinity(
    ch: &Channel,
    p: &Projection,
    tol: &Tolerance,
    max_iter: usize,
) -> Result<PhiInfinityReport> {
    if !ch.is_unital(tol) {
        return Err(Error::NotUnital { defect: ch.unital_defect() });
    }
    if p.dim() != ch.dim() {
        return Err(Error::DimensionMismatch { expected: ch.dim(), got: p.dim() });
    }
    let diff = ch.apply(p.matrix())? - p.matrix();
    let up = is_psd(&diff, tol)?;
    let down = is_psd(&(-&diff), tol)?;
    let direction = match (up, down) {
        (true, true) => MonotoneDirection::Fixed,
        (true, false) => MonotoneDirection::Increasing,
        (false, true) => MonotoneDirection::Decreasing,
        (false, false) => {
            let defect = |m: &CMatrix| -> Result<f64> {
                let (values, _) = crate::mat::hermitian_eig(m)?;
                Ok((-values.first().copied().unwrap_or(0.0)).max(0.0))
            };
            return Err(Error::NotMonotone {
                up_defect: defect(&diff)?,
                down_defect: defect(&(-&diff))?,
            });
        }
    };
    let mut current = p.matrix().clone();
    let mut residual = f64::INFINITY;
    for iterations in 1..=max_iter {
        let next = ch.apply(&current)?;
        residual = (&next - &current).norm();
        current = next;
        if residual <= tol.abs_eps {
            return Ok(PhiInfinityReport { limit: current, iterations, residual, direction });
        }
    }
    Err(Error::NoConvergence { iterations: max_iter, residual })
}

/// Searches for a unitary `W` with `A_i W = W B_i` for all `i`.
///
/// Blocks of different sizes never intertwine unitarily. The solution
/// space is computed exactly as a null space; every basis solution, and a
/// few deterministic random combinations when the space is larger, is
/// tested for invertibility, polar-factored, and verified. For irreducible
/// blocks the space is at most one-dimensional, so the polar factor is
/// essentially unique; the returned unitary is phase-normalized to have
/// real positive trace (falling back to its first nonzero entry), which
/// maps the identity-intertwined case to `W = I` exactly.
pub fn find_intertwiner(
    block_a: &[CMatrix],
    block_b: &[CMatrix],
    tol: &Tolerance,
) -> Result<Option<CMatrix>> {
    if block_a.len() != block_b.len() || block_a.is_empty() {
        return Err(Error::InvalidInput {
            detail: format!(
                "intertwiner needs matching nonempty operator lists, got {} and {}",
                block_a.len(),
                block_b.len()
            ),
        });
    }
    let da = block_a[0].nrows();
    let db = block_b[0].nrows();
    for m in block_a {
        if m.nrows() != da || m.ncols() != da {
            return Err(Error::DimensionMismatch { expected: da, got: m.nrows() });
        }
    }
    for m in block_b {
        if m.nrows() != db || m.ncols() != db {
            return Err(Error::DimensionMismatch { expected: db, got: m.nrows() });
        }
    }
    if da != db {
        return Ok(None);
    }
    let d = da;
    let eye = CMatrix::identity(d, d);
    let mut stacked = CMatrix::zeros(block_a.len() * d * d, d * d);
    for (i, (a, b)) in block_a.iter().zip(block_b).enumerate() {
        // vec(A W - W B) = (I (x) A - B^T (x) I) vec(W).
        let block = eye.kronecker(a) - b.transpose().kronecker(&eye);
        stacked.view_mut((i * d * d, 0), (d * d, d * d)).copy_from(&block);
    }
    let q = kernel(&stacked, tol);
    if q.ncols() == 0 {
        return Ok(None);
    }

    let scale = block_a
        .iter()
        .chain(block_b)
        .map(|m| m.norm())
        .fold(1.0f64, f64::max);
    let mut candidates: Vec<CVector> = (0..q.ncols()).map(|j| q.column(j).into_owned()).collect();
    if q.ncols() > 1 {
        // Deterministic extra combinations for solution spaces where no
        // basis vector happens to be invertible.
        let mut rng = seeded_rng(0x2b1d);
        for _ in 0..4 {
            let combo = crate::mat::random_matrix(q.ncols(), 1, &mut rng);
            candidates.push((&q * combo).column(0).into_owned());
        }
    }
    for cand in candidates {
        let x = unvec_col(&cand, d, d)?;
        let svd = nalgebra::SVD::new(x.clone(), true, true);
        let smin = svd.singular_values.iter().fold(f64::INFINITY, |a, &s| a.min(s));
        let smax = svd.singular_values.iter().fold(0.0f64, |a, &s| a.max(s));
        if smax <= 0.0 || smin <= tol.rel_eps * smax.max(1.0) {
            continue;
        }
        let u = svd.u.as_ref().expect("u requested");
        let v_t = svd.v_t.as_ref().expect("v_t requested");
        let mut w = u * v_t;
        let trace = w.trace();
        let anchor = if trace.norm() > 1e-8 * d as f64 {
            trace
        } else {
            let flat = vec_col(&w);
            (0..flat.len()).map(|i| flat[i]).find(|e| e.norm() > 1e-12).unwrap_or(C64::new(1.0, 0.0))
        };
        w *= (anchor / anchor.norm()).conj();
        let worst = block_a
            .iter()
            .zip(block_b)
            .map(|(a, b)| (a * &w - &w * b).norm())
            .fold(0.0f64, f64::max);
        if worst <= tol.rel_eps * scale * (d as f64) {
            return Ok(Some(w));
        }
    }
    Ok(None)
}
