//! Invariant subspaces, reducing decompositions, and anchor projections.
//!
//! For a unital CP map `Phi(X) = sum_i A_i X A_i*` three comparisons
//! between a projection and its image are equivalent to range conditions
//! on the Kraus operators: `Phi(p) >= p` holds exactly when `Ran(p)` is
//! invariant for every `A_i*`, `Phi(p) <= p` exactly when it is invariant
//! for every `A_i`, and equality exactly when it is reducing.
//! [`invariance_verdict`] evaluates both routes and insists they agree.
//!
//! On top of the equivalences sit the structural searches: a minimal
//! reducing decomposition of the ambient space, and the anchor search,
//! which produces a maximal family of mutually orthogonal minimal
//! projections with `p <= Phi(p)`. Anchor ranges are minimal
//! `A_i*`-invariant subspaces; their orthonormal bases act as cyclic
//! vectors for the irreducible summands of the isometric dilation, so the
//! report carries the full decomposition data: summand count, dimensions,
//! cyclic bases, and (for unital trace-preserving channels) the partition
//! of summands into unitary-equivalence classes.

use std::cmp::Ordering;

use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::fixedpoint::{
    algebra_closure, commutant, ensure_unital_trace_preserving, find_intertwiner, AlgebraClosure,
    SubspaceBasis,
};
use crate::mat::{
    ensure_square, hermitian_eig, orthonormalize_vectors, psd_defect, random_matrix,
    random_unit_vector, seeded_rng, spectral_norm, CMatrix, CVector, Projection, Tolerance, C64,
};

/// Gate for treating computed subspaces as exactly orthogonal.
const ORTHO_GATE: f64 = 1e-8;

/// Outcome of the order-versus-invariance tests for one projection.
#[derive(Debug, Clone, Serialize)]
pub struct InvarianceVerdict {
    /// `Phi(p) >= p` within `psd_slack`.
    pub phi_ge_p: bool,
    /// `Phi(p) <= p` within `psd_slack`.
    pub phi_le_p: bool,
    /// Both of the above.
    pub phi_eq_p: bool,
    /// `Ran(p)` invariant under every `A_i*`.
    pub adjoint_invariant: bool,
    /// `Ran(p)` invariant under every `A_i`.
    pub invariant: bool,
    /// Invariant in both directions.
    pub reducing: bool,
    /// `[ge_psd_defect, le_psd_defect, adjoint_range_residual,
    /// range_residual]`; the first two are scaled eigenvalue defects, the
    /// last two are the largest `||(I-p) A_i* p||` and `||(I-p) A_i p||`.
    pub residuals: [f64; 4],
}

/// Evaluates `Phi(p) - p` spectrally and the Kraus range conditions
/// directly, then cross-checks the two routes.
///
/// The channel must be unital; the equivalences do not hold otherwise. A
/// disagreement between the routes is reported as
/// [`Error::Inconsistent`] rather than silently resolved, since each
/// route is supposed to certify the other.
pub fn invariance_verdict(
    ch: &Channel,
    p: &Projection,
    tol: &Tolerance,
) -> Result<InvarianceVerdict> {
    if !ch.is_unital(tol) {
        return Err(Error::NotUnital { defect: ch.unital_defect() });
    }
    if p.dim() != ch.dim() {
        return Err(Error::DimensionMismatch { expected: ch.dim(), got: p.dim() });
    }
    let diff = ch.apply(p.matrix())? - p.matrix();
    let ge_defect = psd_defect(&diff)?;
    let le_defect = psd_defect(&(-&diff))?;
    let phi_ge_p = ge_defect <= tol.psd_slack;
    let phi_le_p = le_defect <= tol.psd_slack;

    let complement = p.complement();
    let mut adjoint_residual = 0.0f64;
    let mut range_residual = 0.0f64;
    let mut adjoint_invariant = true;
    let mut invariant = true;
    for a in ch.kraus() {
        let gate = tol.rel_eps * a.norm().max(1.0);
        let adj = (complement.matrix() * a.adjoint() * p.matrix()).norm();
        let fwd = (complement.matrix() * a * p.matrix()).norm();
        adjoint_residual = adjoint_residual.max(adj);
        range_residual = range_residual.max(fwd);
        if adj > gate {
            adjoint_invariant = false;
        }
        if fwd > gate {
            invariant = false;
        }
    }

    if phi_ge_p != adjoint_invariant || phi_le_p != invariant {
        return Err(Error::Inconsistent {
            detail: format!(
                "invariance routes disagree: order tests ge/le = {phi_ge_p}/{phi_le_p}, \
                 range tests adjoint/forward = {adjoint_invariant}/{invariant} \
                 (defects {ge_defect:.3e}/{le_defect:.3e}, \
                 residuals {adjoint_residual:.3e}/{range_residual:.3e})"
            ),
        });
    }
    Ok(InvarianceVerdict {
        phi_ge_p,
        phi_le_p,
        phi_eq_p: phi_ge_p && phi_le_p,
        adjoint_invariant,
        invariant,
        reducing: adjoint_invariant && invariant,
        residuals: [ge_defect, le_defect, adjoint_residual, range_residual],
    })
}

/// Checks that the top eigenspace of a superfixed PSD matrix is
/// `A_i*`-invariant.
///
/// Requires `X` PSD and `X <= Phi(X)`, both within `psd_slack`, and a
/// unital channel. Under those hypotheses the answer is a theorem and the
/// function should always return true; it exists as a runnable check.
pub fn top_eigenspace_check(ch: &Channel, x: &CMatrix, tol: &Tolerance) -> Result<bool> {
    if !ch.is_unital(tol) {
        return Err(Error::NotUnital { defect: ch.unital_defect() });
    }
    let d = ensure_square(x)?;
    if d != ch.dim() {
        return Err(Error::DimensionMismatch { expected: ch.dim(), got: d });
    }
    let x_defect = psd_defect(x)?;
    if x_defect > tol.psd_slack {
        return Err(Error::PreconditionFailed {
            detail: format!("X is not PSD (scaled defect {x_defect:.3e})"),
        });
    }
    let growth_defect = psd_defect(&(ch.apply(x)? - x))?;
    if growth_defect > tol.psd_slack {
        return Err(Error::PreconditionFailed {
            detail: format!("X <= Phi(X) fails (scaled defect {growth_defect:.3e})"),
        });
    }
    let (values, _) = hermitian_eig(x)?;
    let lambda_max = values.last().copied().unwrap_or(0.0);
    let q = crate::mat::eigenspace_projection(x, lambda_max, tol)?;
    let q_comp = q.complement();
    for a in ch.kraus() {
        let residual = (q_comp.matrix() * a.adjoint() * q.matrix()).norm();
        if residual > tol.rel_eps * a.norm().max(1.0) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Splits the space into pairwise orthogonal subspaces, each reducing for
/// every Kraus operator and minimal with that property.
///
/// The projections sum to the identity. Works for any channel: it uses
/// only the commutant of `{A_i, A_i*}`, splitting along eigenspaces of a
/// random Hermitian commutant element and recursing until each block's
/// restricted commutant is scalar.
pub fn minimal_reducing_decomposition(
    ch: &Channel,
    seed: u64,
    tol: &Tolerance,
) -> Result<Vec<Projection>> {
    let d = ch.dim();
    let mut rng = seeded_rng(seed);
    let mut gens: Vec<CMatrix> = ch.kraus().to_vec();
    gens.extend(ch.kraus().iter().map(|a| a.adjoint()));

    let mut leaves: Vec<CMatrix> = Vec::new();
    let mut stack: Vec<CMatrix> = vec![CMatrix::identity(d, d)];
    while let Some(v) = stack.pop() {
        let restricted: Vec<CMatrix> = gens.iter().map(|g| v.adjoint() * g * &v).collect();
        let comm = commutant(&restricted, tol)?;
        if comm.dim() <= 1 {
            leaves.push(v);
            continue;
        }
        for sub in split_along_commutant(&comm, &mut rng)? {
            stack.push(&v * sub);
        }
    }
    let mut projections: Vec<Projection> =
        leaves.iter().map(Projection::from_orthonormal_columns).collect();
    canonical_sort(&mut projections);
    Ok(projections)
}

/// Eigenspace isometries of a random Hermitian element of the commutant.
/// The commutant is star-closed, so spectral projections of its elements
/// stay inside it and the resulting subspaces are reducing.
fn split_along_commutant(comm: &SubspaceBasis, rng: &mut ChaCha8Rng) -> Result<Vec<CMatrix>> {
    let r = comm.operator_dim();
    for _ in 0..4 {
        let coeffs = random_matrix(comm.dim(), 1, rng);
        let mut w = CMatrix::zeros(r, r);
        for (j, e) in comm.elements().iter().enumerate() {
            w += e * coeffs[(j, 0)];
        }
        let h = (&w + w.adjoint()).unscale(2.0);
        let (values, vectors) = hermitian_eig(&h)?;
        let spread = values.last().unwrap() - values.first().unwrap();
        let gap_gate = 1e-6 * spread.abs().max(1.0);
        let mut boundaries = vec![0usize];
        for i in 1..r {
            if values[i] - values[i - 1] > gap_gate {
                boundaries.push(i);
            }
        }
        if boundaries.len() <= 1 {
            continue;
        }
        boundaries.push(r);
        let mut parts = Vec::with_capacity(boundaries.len() - 1);
        for w in boundaries.windows(2) {
            parts.push(vectors.columns(w[0], w[1] - w[0]).into_owned());
        }
        return Ok(parts);
    }
    Err(Error::Inconsistent {
        detail: "commutant of dimension > 1 produced no spectral split in 4 attempts".into(),
    })
}

/// Knobs for [`anchor_projections_with`].
#[derive(Debug, Clone, Copy, Default)]
pub struct AnchorOptions {
    pub seed: u64,
    /// Re-verify minimality of every accepted anchor against a fresh
    /// internal candidate pool after the search finishes.
    pub exhaustive: bool,
}

/// Decomposition data extracted from a maximal anchor family.
#[derive(Debug, Clone)]
pub struct DecompositionReport {
    /// Maximal family of mutually orthogonal minimal projections with
    /// `p <= Phi(p)`, canonically sorted.
    pub anchors: Vec<Projection>,
    pub summand_count: usize,
    pub anchor_dims: Vec<usize>,
    /// Orthonormal basis of each anchor range; these vectors are cyclic
    /// for the corresponding summand of the dilation.
    pub cyclic_vector_bases: Vec<Vec<CVector>>,
    /// Partition of summand indices into unitary-equivalence classes of
    /// the restricted Kraus blocks. Only computed for unital
    /// trace-preserving channels, where anchors are reducing and the
    /// restrictions are well-defined.
    pub equivalence_classes: Option<Vec<Vec<usize>>>,
    /// True when there is exactly one anchor and its forward orbit under
    /// the Kraus operators spans the whole space.
    pub irreducible: bool,
}

/// Anchor search with default options (see [`anchor_projections_with`]).
pub fn anchor_projections(ch: &Channel, seed: u64, tol: &Tolerance) -> Result<DecompositionReport> {
    anchor_projections_with(ch, AnchorOptions { seed, exhaustive: false }, tol)
}

/// Finds a maximal family of mutually orthogonal minimal projections
/// satisfying `p <= Phi(p)` for a unital channel.
///
/// Equivalently, the anchor ranges are minimal `A_i*`-invariant
/// subspaces. The search is randomized with certified output: candidate
/// vectors (eigenvectors of random elements of the adjoint word-closure
/// algebra, plus `8 d` random vectors) are expanded to their orbit spans,
/// the smallest orthogonal-to-accepted span is shrunk until its
/// restricted algebra closure has dimension `rank^2` (which certifies
/// minimality), and the `Phi(p) - p >= 0` certificate is checked before
/// acceptance. The search restricts to the orthogonal complement of the
/// accepted family after each acceptance and stops when no candidate
/// survives the filters.
pub fn anchor_projections_with(
    ch: &Channel,
    opts: AnchorOptions,
    tol: &Tolerance,
) -> Result<DecompositionReport> {
    if !ch.is_unital(tol) {
        return Err(Error::NotUnital { defect: ch.unital_defect() });
    }
    let d = ch.dim();
    let adjoints: Vec<CMatrix> = ch.kraus().iter().map(|a| a.adjoint()).collect();
    let alg = algebra_closure(&adjoints, tol, false)?;
    let mut rng = seeded_rng(opts.seed);
    let pool = candidate_pool(&alg, d, &mut rng);

    let mut accepted: Vec<CMatrix> = Vec::new();
    loop {
        let comp = complement_isometry(&accepted, d, tol);
        if comp.ncols() == 0 {
            break;
        }
        let mut candidates: Vec<CVector> = Vec::new();
        for j in 0..comp.ncols() {
            candidates.push(comp.column(j).into_owned());
        }
        for v in &pool {
            let u = &comp * (comp.adjoint() * v);
            let norm = u.norm();
            if norm > ORTHO_GATE {
                candidates.push(u.unscale(norm));
            }
        }

        let mut spans: Vec<CMatrix> = Vec::new();
        for u in &candidates {
            let q = orbit_span(&alg, u, tol);
            if q.ncols() == 0 {
                continue;
            }
            if spans.iter().any(|s| same_span(s, &q)) {
                continue;
            }
            spans.push(q);
        }
        spans.sort_by(isometry_order);

        let mut found = None;
        for q in &spans {
            if !orthogonal_to(&accepted, q, tol) {
                continue;
            }
            let q_min = shrink_to_minimal(ch, q, &mut rng, tol)?;
            let p = Projection::from_orthonormal_columns(&q_min);
            let growth_defect = psd_defect(&(ch.apply(p.matrix())? - p.matrix()))?;
            if growth_defect > tol.psd_slack {
                continue;
            }
            found = Some(q_min);
            break;
        }
        match found {
            Some(q) => accepted.push(q),
            None => break,
        }
    }

    let mut anchors: Vec<Projection> =
        accepted.iter().map(Projection::from_orthonormal_columns).collect();
    canonical_sort(&mut anchors);

    if opts.exhaustive {
        for p in &anchors {
            exhaustive_minimality_check(ch, p, &mut rng, tol)?;
        }
    }

    let anchor_dims: Vec<usize> = anchors.iter().map(Projection::rank).collect();
    let cyclic_vector_bases: Vec<Vec<CVector>> = anchors
        .iter()
        .map(|p| {
            let basis = p.range_basis(tol);
            (0..basis.ncols()).map(|j| basis.column(j).into_owned()).collect()
        })
        .collect();
    let equivalence_classes = if ch.is_trace_preserving(tol) {
        Some(block_equivalence_classes(ch, &anchors, tol)?)
    } else {
        None
    };
    let irreducible = anchors.len() == 1 && forward_orbit_dim(ch, &anchors[0], tol) == d;
    Ok(DecompositionReport {
        summand_count: anchors.len(),
        anchor_dims,
        cyclic_vector_bases,
        equivalence_classes,
        irreducible,
        anchors,
    })
}

/// Property harness for the unital trace-preserving case: every
/// constructed projection with `Phi(p) >= p` must in fact satisfy
/// `Phi(p) = p`. Returns the conjunction over anchors, the identity,
/// partial anchor sums, and `trials` random orbit-span projections.
pub fn unital_channel_invariant_is_reducing(
    ch: &Channel,
    trials: usize,
    seed: u64,
    tol: &Tolerance,
) -> Result<bool> {
    ensure_unital_trace_preserving(ch, tol)?;
    let d = ch.dim();
    let adjoints: Vec<CMatrix> = ch.kraus().iter().map(|a| a.adjoint()).collect();
    let alg = algebra_closure(&adjoints, tol, false)?;
    let mut rng = seeded_rng(seed);

    let report = anchor_projections(ch, seed, tol)?;
    let mut tested: Vec<Projection> = report.anchors.clone();
    tested.push(Projection::identity(d));
    let mut running = CMatrix::zeros(d, d);
    for p in &report.anchors {
        running += p.matrix();
        tested.push(Projection::new(running.clone(), tol)?);
    }
    for _ in 0..trials {
        let v = random_unit_vector(d, &mut rng);
        let q = orbit_span(&alg, &v, tol);
        tested.push(Projection::from_orthonormal_columns(&q));
    }

    for p in &tested {
        let verdict = invariance_verdict(ch, p, tol)?;
        if !verdict.phi_ge_p || !verdict.phi_eq_p {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Smallest invariant subspace containing `v`: the span of the algebra
/// orbit. The algebra contains the identity, so the span contains `v`.
fn orbit_span(alg: &AlgebraClosure, v: &CVector, tol: &Tolerance) -> CMatrix {
    let images: Vec<CVector> = alg.basis().elements().iter().map(|e| e * v).collect();
    orthonormalize_vectors(&images, tol)
}

fn candidate_pool(alg: &AlgebraClosure, d: usize, rng: &mut ChaCha8Rng) -> Vec<CVector> {
    let mut pool: Vec<CVector> = Vec::new();
    for _ in 0..3 {
        let w = random_algebra_element(alg, rng);
        if let Ok(pairs) = crate::mat::complex_eigenpairs(&w, rng) {
            pool.extend(pairs.into_iter().map(|(_, v)| v));
        }
    }
    for _ in 0..(8 * d) {
        pool.push(random_unit_vector(d, rng));
    }
    pool
}

fn random_algebra_element(alg: &AlgebraClosure, rng: &mut ChaCha8Rng) -> CMatrix {
    let basis = alg.basis();
    let d = basis.operator_dim();
    let coeffs = random_matrix(basis.dim(), 1, rng);
    let mut w = CMatrix::zeros(d, d);
    for (j, e) in basis.elements().iter().enumerate() {
        w += e * coeffs[(j, 0)];
    }
    w
}

/// Orthonormal basis of the orthogonal complement of the accepted spans.
fn complement_isometry(accepted: &[CMatrix], d: usize, tol: &Tolerance) -> CMatrix {
    if accepted.is_empty() {
        return CMatrix::identity(d, d);
    }
    let total: usize = accepted.iter().map(CMatrix::ncols).sum();
    if total >= d {
        return CMatrix::zeros(d, 0);
    }
    let mut acc = CMatrix::zeros(d, total);
    let mut offset = 0;
    for q in accepted {
        acc.view_mut((0, offset), (d, q.ncols())).copy_from(q);
        offset += q.ncols();
    }
    crate::mat::kernel(&acc.adjoint(), tol)
}

fn same_span(a: &CMatrix, b: &CMatrix) -> bool {
    a.ncols() == b.ncols() && crate::mat::max_principal_angle_sine(a, b) < ORTHO_GATE
}

fn orthogonal_to(accepted: &[CMatrix], q: &CMatrix, tol: &Tolerance) -> bool {
    accepted.iter().all(|acc| spectral_norm(&(acc.adjoint() * q)) <= tol.rel_eps.max(1e-12))
}

/// Shrinks an invariant subspace to a minimal one inside it.
///
/// Minimality is certified by a dimension count: the restriction of the
/// adjoint word-closure algebra to a minimal invariant subspace of rank
/// `r` acts irreducibly, hence (being a unital algebra acting irreducibly
/// on a complex space) is the full `r x r` matrix algebra and its closure
/// has dimension exactly `r^2`. Anything smaller exposes a proper
/// invariant subspace, which the search locates and recurses into.
fn shrink_to_minimal(
    ch: &Channel,
    q0: &CMatrix,
    rng: &mut ChaCha8Rng,
    tol: &Tolerance,
) -> Result<CMatrix> {
    let mut q = q0.clone();
    loop {
        let r = q.ncols();
        if r == 0 {
            return Err(Error::Inconsistent { detail: "empty candidate subspace".into() });
        }
        if r == 1 {
            return Ok(q);
        }
        let restricted: Vec<CMatrix> =
            ch.kraus().iter().map(|a| q.adjoint() * a.adjoint() * &q).collect();
        let closure = algebra_closure(&restricted, tol, false)?;
        if closure.dim() == r * r {
            return Ok(q);
        }
        let sub = proper_invariant_subspace(&closure, r, rng, tol)?;
        q = &q * sub;
    }
}

/// Finds a proper invariant subspace of a reducible restricted module.
fn proper_invariant_subspace(
    closure: &AlgebraClosure,
    r: usize,
    rng: &mut ChaCha8Rng,
    tol: &Tolerance,
) -> Result<CMatrix> {
    let mut candidates: Vec<CVector> = Vec::new();
    for _ in 0..4 {
        let w = random_algebra_element(closure, rng);
        if let Ok(pairs) = crate::mat::complex_eigenpairs(&w, rng) {
            candidates.extend(pairs.into_iter().map(|(_, v)| v));
        }
    }
    for j in 0..r {
        let mut e = CVector::zeros(r);
        e[j] = C64::new(1.0, 0.0);
        candidates.push(e);
    }
    for _ in 0..(2 * r) {
        candidates.push(random_unit_vector(r, rng));
    }

    let mut best: Option<CMatrix> = None;
    for u in &candidates {
        let span = orbit_span(closure, u, tol);
        if span.ncols() == 0 || span.ncols() >= r {
            continue;
        }
        if best.as_ref().is_none_or(|b| span.ncols() < b.ncols()) {
            let dim = span.ncols();
            best = Some(span);
            if dim == 1 {
                break;
            }
        }
    }
    best.ok_or_else(|| Error::Inconsistent {
        detail: format!(
            "restricted algebra on a rank-{r} subspace has deficient dimension \
             but no proper invariant subspace was found"
        ),
    })
}

/// Re-verifies minimality of an accepted anchor against a fresh pool of
/// internal candidates: every orbit span inside the anchor range must be
/// the whole range.
fn exhaustive_minimality_check(
    ch: &Channel,
    p: &Projection,
    rng: &mut ChaCha8Rng,
    tol: &Tolerance,
) -> Result<()> {
    let v = p.range_basis(tol);
    let r = v.ncols();
    let restricted: Vec<CMatrix> =
        ch.kraus().iter().map(|a| v.adjoint() * a.adjoint() * &v).collect();
    let closure = algebra_closure(&restricted, tol, false)?;
    if closure.dim() != r * r {
        return Err(Error::Inconsistent {
            detail: format!(
                "anchor of rank {r} fails the restricted-dimension certificate: \
                 closure dimension {} instead of {}",
                closure.dim(),
                r * r
            ),
        });
    }
    let mut candidates: Vec<CVector> = Vec::new();
    for _ in 0..4 {
        let w = random_algebra_element(&closure, rng);
        if let Ok(pairs) = crate::mat::complex_eigenpairs(&w, rng) {
            candidates.extend(pairs.into_iter().map(|(_, u)| u));
        }
    }
    for j in 0..r {
        let mut e = CVector::zeros(r);
        e[j] = C64::new(1.0, 0.0);
        candidates.push(e);
    }
    for _ in 0..(4 * r) {
        candidates.push(random_unit_vector(r, rng));
    }
    for u in &candidates {
        let span = orbit_span(&closure, u, tol);
        if span.ncols() > 0 && span.ncols() < r {
            return Err(Error::Inconsistent {
                detail: format!(
                    "anchor of rank {r} contains a proper invariant subspace of \
                     dimension {}",
                    span.ncols()
                ),
            });
        }
    }
    Ok(())
}

/// Partition of summand indices by unitary equivalence of the restricted
/// Kraus blocks. Anchors must be reducing (unital trace-preserving case)
/// so that restriction is well-defined.
fn block_equivalence_classes(
    ch: &Channel,
    anchors: &[Projection],
    tol: &Tolerance,
) -> Result<Vec<Vec<usize>>> {
    let blocks: Vec<Vec<CMatrix>> = anchors
        .iter()
        .map(|p| {
            let v = p.range_basis(tol);
            ch.kraus().iter().map(|a| v.adjoint() * a * &v).collect()
        })
        .collect();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    'next: for j in 0..blocks.len() {
        for class in classes.iter_mut() {
            let rep = class[0];
            if anchors[rep].rank() == anchors[j].rank()
                && find_intertwiner(&blocks[rep], &blocks[j], tol)?.is_some()
            {
                class.push(j);
                continue 'next;
            }
        }
        classes.push(vec![j]);
    }
    Ok(classes)
}

/// Dimension of the smallest subspace containing the anchor range and
/// invariant under every forward Kraus operator.
fn forward_orbit_dim(ch: &Channel, p: &Projection, tol: &Tolerance) -> usize {
    let d = ch.dim();
    let mut q = p.range_basis(tol);
    for _ in 0..d {
        let before = q.ncols();
        if before == d {
            return d;
        }
        let mut cols: Vec<CVector> = (0..q.ncols()).map(|j| q.column(j).into_owned()).collect();
        for a in ch.kraus() {
            let image = a * &q;
            cols.extend((0..image.ncols()).map(|j| image.column(j).into_owned()));
        }
        let grown = orthonormalize_vectors(&cols, tol);
        if grown.ncols() == before {
            return before;
        }
        q = grown;
    }
    q.ncols()
}

/// Deterministic order: rank ascending, then first support index, then
/// lexicographic on the rounded real parts of the projection's first row.
fn canonical_sort(projections: &mut [Projection]) {
    projections.sort_by(|a, b| projection_order(a.matrix(), b.matrix(), a.rank(), b.rank()));
}

fn isometry_order(a: &CMatrix, b: &CMatrix) -> Ordering {
    let pa = a * a.adjoint();
    let pb = b * b.adjoint();
    projection_order(&pa, &pb, a.ncols(), b.ncols())
}

fn projection_order(pa: &CMatrix, pb: &CMatrix, rank_a: usize, rank_b: usize) -> Ordering {
    rank_a
        .cmp(&rank_b)
        .then_with(|| support_index(pa).cmp(&support_index(pb)))
        .then_with(|| {
            let ka = row_key(pa);
            let kb = row_key(pb);
            ka.partial_cmp(&kb).unwrap_or(Ordering::Equal)
        })
}

fn support_index(p: &CMatrix) -> usize {
    (0..p.nrows()).find(|&i| p[(i, i)].re > ORTHO_GATE).unwrap_or(p.nrows())
}

fn row_key(p: &CMatrix) -> Vec<f64> {
    (0..p.ncols()).map(|j| (p[(0, j)].re / ORTHO_GATE).round() * ORTHO_GATE).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{random_channel, RandomKind};
    use crate::mat::random_unitary;
    use crate::presets;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn unit_projection(d: usize, i: usize) -> Projection {
        let mut m = CMatrix::zeros(d, d);
        m[(i, i)] = c(1.0, 0.0);
        Projection::new(m, &Tolerance::default()).unwrap()
    }

    #[test]
    fn identity_projection_is_reducing_for_any_unital_channel() {
        let tol = Tolerance::default();
        let ch = random_channel(3, 2, RandomKind::UnitalCp, 71).unwrap();
        let verdict = invariance_verdict(&ch, &Projection::identity(3), &tol).unwrap();
        assert!(verdict.phi_ge_p && verdict.phi_le_p && verdict.phi_eq_p);
        assert!(verdict.reducing);
    }

    #[test]
    fn arveson_unit_projection_grows_strictly() {
        let tol = Tolerance::default();
        let ch = presets::arveson_channel(3).unwrap();
        let verdict = invariance_verdict(&ch, &unit_projection(3, 0), &tol).unwrap();
        assert!(verdict.phi_ge_p);
        assert!(!verdict.phi_eq_p);
        assert!(verdict.adjoint_invariant);
        assert!(!verdict.invariant);
    }

    #[test]
    fn compression_fixes_the_constant_direction() {
        let tol = Tolerance::default();
        let ch = presets::wavelet_compression_channel().unwrap();
        let verdict = invariance_verdict(&ch, &unit_projection(3, 0), &tol).unwrap();
        assert!(verdict.phi_eq_p);
        assert!(verdict.reducing);
    }

    #[test]
    fn growth_of_p_is_shrinkage_of_its_complement() {
        let tol = Tolerance::default();
        let ch = presets::arveson_channel(4).unwrap();
        for i in 0..4 {
            let p = unit_projection(4, i);
            let v1 = invariance_verdict(&ch, &p, &tol).unwrap();
            let v2 = invariance_verdict(&ch, &p.complement(), &tol).unwrap();
            assert_eq!(v1.phi_ge_p, v2.phi_le_p, "index {i}");
            assert_eq!(v1.phi_le_p, v2.phi_ge_p, "index {i}");
        }
    }

    #[test]
    fn verdict_requires_a_unital_channel() {
        let tol = Tolerance::default();
        let ch = presets::amplitude_damping(0.3).unwrap();
        match invariance_verdict(&ch, &Projection::identity(2), &tol) {
            Err(Error::NotUnital { defect }) => assert!(defect > 0.01),
            other => panic!("expected NotUnital, got {other:?}"),
        }
    }

    #[test]
    fn top_eigenspace_check_accepts_identity_and_anchors() {
        let tol = Tolerance::default();
        let ch = presets::arveson_channel(3).unwrap();
        assert!(top_eigenspace_check(&ch, &CMatrix::identity(3, 3), &tol).unwrap());
        let p = unit_projection(3, 0);
        assert!(top_eigenspace_check(&ch, p.matrix(), &tol).unwrap());
    }

    #[test]
    fn top_eigenspace_check_rejects_bad_preconditions() {
        let tol = Tolerance::default();
        let ch = presets::arveson_channel(3).unwrap();
        let not_psd = CMatrix::from_diagonal(&CVector::from_vec(vec![
            c(1.0, 0.0),
            c(-1.0, 0.0),
            c(0.0, 0.0),
        ]));
        assert!(matches!(
            top_eigenspace_check(&ch, &not_psd, &tol),
            Err(Error::PreconditionFailed { .. })
        ));
        // PSD but strictly shrinking in the E_22 corner, so not superfixed.
        let shrinking = CMatrix::from_diagonal(&CVector::from_vec(vec![
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(1.0, 0.0),
        ]));
        assert!(matches!(
            top_eigenspace_check(&ch, &shrinking, &tol),
            Err(Error::PreconditionFailed { .. })
        ));
    }

    #[test]
    fn superfixed_limits_pass_the_top_eigenspace_check() {
        let tol = Tolerance::default();
        let ch = presets::arveson_channel(3).unwrap();
        let p = unit_projection(3, 0);
        let report =
            crate::fixedpoint::phi_infinity(&ch, &p, &tol, crate::fixedpoint::DEFAULT_MAX_ITER)
                .unwrap();
        assert!(top_eigenspace_check(&ch, &report.limit, &tol).unwrap());
    }

    #[test]
    fn irreducible_pair_has_trivial_reducing_decomposition() {
        let tol = Tolerance::default();
        let ch = random_channel(3, 2, RandomKind::UnitalTracePreserving, 73).unwrap();
        let parts = minimal_reducing_decomposition(&ch, 7, &tol).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].rank(), 3);
    }

    #[test]
    fn block_diagonal_channel_decomposes_into_its_blocks() {
        let tol = Tolerance::default();
        let a2 = random_channel(2, 2, RandomKind::UnitalTracePreserving, 74).unwrap();
        let a3 = random_channel(3, 2, RandomKind::UnitalTracePreserving, 75).unwrap();
        let kraus: Vec<CMatrix> = a2
            .kraus()
            .iter()
            .zip(a3.kraus())
            .map(|(x, y)| {
                let mut m = CMatrix::zeros(5, 5);
                m.view_mut((0, 0), (2, 2)).copy_from(x);
                m.view_mut((2, 2), (3, 3)).copy_from(y);
                m
            })
            .collect();
        let ch = Channel::new(kraus).unwrap();
        let parts = minimal_reducing_decomposition(&ch, 11, &tol).unwrap();
        let ranks: Vec<usize> = parts.iter().map(Projection::rank).collect();
        assert_eq!(ranks, vec![2, 3]);
        let sum: CMatrix = parts.iter().fold(CMatrix::zeros(5, 5), |acc, p| acc + p.matrix());
        assert!((sum - CMatrix::identity(5, 5)).norm() < 1e-9);
        for p in &parts {
            for a in ch.kraus() {
                assert!((a * p.matrix() - p.matrix() * a).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn identity_channel_splits_into_rank_one_pieces() {
        let tol = Tolerance::default();
        let ch = Channel::new(vec![CMatrix::identity(3, 3)]).unwrap();
        let parts = minimal_reducing_decomposition(&ch, 13, &tol).unwrap();
        assert_eq!(parts.len(), 3);
        for p in &parts {
            assert_eq!(p.rank(), 1);
        }
        let sum: CMatrix = parts.iter().fold(CMatrix::zeros(3, 3), |acc, p| acc + p.matrix());
        assert!((sum - CMatrix::identity(3, 3)).norm() < 1e-9);
    }

    #[test]
    fn arveson_anchors_are_the_leading_unit_projections() {
        let tol = Tolerance::default();
        for k in 2..=5usize {
            let ch = presets::arveson_channel(k).unwrap();
            let report = anchor_projections(&ch, 0, &tol).unwrap();
            assert_eq!(report.summand_count, k - 1, "k = {k}");
            assert_eq!(report.anchor_dims, vec![1; k - 1]);
            for (i, anchor) in report.anchors.iter().enumerate() {
                let expected = unit_projection(k, i);
                assert!(
                    (anchor.matrix() - expected.matrix()).norm() < 1e-8,
                    "k = {k}, anchor {i}"
                );
            }
        }
    }

    #[test]
    fn compression_channel_has_a_rank_one_and_a_rank_two_anchor() {
        let tol = Tolerance::default();
        let ch = presets::wavelet_compression_channel().unwrap();
        let report = anchor_projections(&ch, 0, &tol).unwrap();
        assert_eq!(report.summand_count, 2);
        assert_eq!(report.anchor_dims, vec![1, 2]);
        assert!((report.anchors[0].matrix() - unit_projection(3, 0).matrix()).norm() < 1e-8);
        let mut lower = CMatrix::zeros(3, 3);
        lower[(1, 1)] = c(1.0, 0.0);
        lower[(2, 2)] = c(1.0, 0.0);
        assert!((report.anchors[1].matrix() - lower).norm() < 1e-8);
        // Cyclic bases live in the right coordinate planes.
        assert_eq!(report.cyclic_vector_bases[0].len(), 1);
        assert!(report.cyclic_vector_bases[0][0][0].norm() > 0.99);
        assert_eq!(report.cyclic_vector_bases[1].len(), 2);
        for v in &report.cyclic_vector_bases[1] {
            assert!(v[0].norm() < 1e-8);
        }
        assert!(!report.irreducible);
    }

    #[test]
    fn single_unitary_yields_spectral_anchors() {
        let tol = Tolerance::default();
        let mut rng = seeded_rng(77);
        let u = random_unitary(2, &mut rng);
        let ch = Channel::new(vec![u.clone()]).unwrap();
        let report = anchor_projections(&ch, 5, &tol).unwrap();
        assert_eq!(report.summand_count, 2);
        assert_eq!(report.anchor_dims, vec![1, 1]);
        for p in &report.anchors {
            // Minimal invariant subspaces of a single unitary are spanned
            // by eigenvectors, so each anchor commutes with U.
            assert!((&u * p.matrix() - p.matrix() * &u).norm() < 1e-7);
            let verdict = invariance_verdict(&ch, p, &tol).unwrap();
            assert!(verdict.phi_eq_p);
        }
    }

    #[test]
    fn anchors_are_orthogonal_and_superfixed_on_random_channels() {
        let tol = Tolerance::default();
        for seed in [1u64, 2, 3] {
            let ch = random_channel(4, 2, RandomKind::UnitalTracePreserving, 80 + seed).unwrap();
            let report = anchor_projections(&ch, seed, &tol).unwrap();
            assert!(!report.anchors.is_empty());
            for (i, p) in report.anchors.iter().enumerate() {
                let defect = psd_defect(&(ch.apply(p.matrix()).unwrap() - p.matrix())).unwrap();
                assert!(defect <= tol.psd_slack, "seed {seed} anchor {i}");
                for q in report.anchors.iter().skip(i + 1) {
                    assert!((p.matrix() * q.matrix()).norm() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn exhaustive_mode_accepts_certified_anchors() {
        let tol = Tolerance::default();
        let ch = presets::arveson_channel(4).unwrap();
        let opts = AnchorOptions { seed: 0, exhaustive: true };
        let report = anchor_projections_with(&ch, opts, &tol).unwrap();
        assert_eq!(report.summand_count, 3);
    }

    #[test]
    fn equivalence_classes_pair_up_repeated_blocks() {
        let tol = Tolerance::default();
        // U has two eigenvalues, each with multiplicity 2, so the four
        // rank-1 summands form two equivalence classes of two.
        let u = CMatrix::from_diagonal(&CVector::from_vec(vec![
            c(0.0, 1.0),
            c(0.0, 1.0),
            c(0.0, -1.0),
            c(0.0, -1.0),
        ]));
        let ch = Channel::new(vec![u]).unwrap();
        let report = anchor_projections(&ch, 3, &tol).unwrap();
        assert_eq!(report.summand_count, 4);
        let classes = report.equivalence_classes.unwrap();
        let mut sizes: Vec<usize> = classes.iter().map(Vec::len).collect();
        sizes.sort();
        assert_eq!(sizes, vec![2, 2]);
    }

    #[test]
    fn distinct_eigenvalues_give_singleton_classes() {
        let tol = Tolerance::default();
        let u = CMatrix::from_diagonal(&CVector::from_vec(vec![
            c(1.0, 0.0),
            c(0.0, 1.0),
            c(-1.0, 0.0),
        ]));
        let ch = Channel::new(vec![u]).unwrap();
        let report = anchor_projections(&ch, 3, &tol).unwrap();
        let classes = report.equivalence_classes.unwrap();
        assert_eq!(classes.len(), 3);
    }

    #[test]
    fn irreducible_channel_reports_one_full_summand() {
        let tol = Tolerance::default();
        let ch = random_channel(3, 2, RandomKind::UnitalTracePreserving, 91).unwrap();
        let report = anchor_projections(&ch, 0, &tol).unwrap();
        assert_eq!(report.summand_count, 1);
        assert_eq!(report.anchor_dims, vec![3]);
        assert!(report.irreducible);
    }

    #[test]
    fn growth_projections_are_fixed_for_trace_preserving_channels() {
        let tol = Tolerance::default();
        for seed in [5u64, 6] {
            let ch = random_channel(4, 3, RandomKind::UnitalTracePreserving, seed).unwrap();
            assert!(unital_channel_invariant_is_reducing(&ch, 10, seed, &tol).unwrap());
        }
    }

    #[test]
    fn harness_rejects_non_trace_preserving_channels() {
        let tol = Tolerance::default();
        let ch = presets::arveson_channel(3).unwrap();
        assert!(matches!(
            unital_channel_invariant_is_reducing(&ch, 5, 0, &tol),
            Err(Error::NotUnitalChannel { .. })
        ));
    }

    #[test]
    fn verdicts_are_kraus_choice_independent() {
        let tol = Tolerance::default();
        let ch = random_channel(3, 3, RandomKind::UnitalTracePreserving, 97).unwrap();
        let mut rng = seeded_rng(98);
        let ch2 = ch.mix_kraus(&random_unitary(3, &mut rng)).unwrap();
        let adjoints: Vec<CMatrix> = ch.kraus().iter().map(|a| a.adjoint()).collect();
        let alg = algebra_closure(&adjoints, &tol, false).unwrap();
        for trial in 0..5 {
            let v = random_unit_vector(3, &mut rng);
            let q = orbit_span(&alg, &v, &tol);
            let p = Projection::from_orthonormal_columns(&q);
            let v1 = invariance_verdict(&ch, &p, &tol).unwrap();
            let v2 = invariance_verdict(&ch2, &p, &tol).unwrap();
            assert_eq!(v1.phi_ge_p, v2.phi_ge_p, "trial {trial}");
            assert_eq!(v1.phi_le_p, v2.phi_le_p, "trial {trial}");
            assert_eq!(v1.reducing, v2.reducing, "trial {trial}");
        }
    }

    #[test]
    fn canonical_sort_orders_by_rank_then_support() {
        let tol = Tolerance::default();
        let mut list = vec![
            unit_projection(3, 2),
            Projection::new(
                CMatrix::from_diagonal(&CVector::from_vec(vec![
                    c(1.0, 0.0),
                    c(1.0, 0.0),
                    c(0.0, 0.0),
                ])),
                &tol,
            )
            .unwrap(),
            unit_projection(3, 0),
        ];
        canonical_sort(&mut list);
        assert_eq!(list[0].rank(), 1);
        assert!(list[0].matrix()[(0, 0)].re > 0.9);
        assert_eq!(list[1].rank(), 1);
        assert!(list[1].matrix()[(2, 2)].re > 0.9);
        assert_eq!(list[2].rank(), 2);
    }
}
