//! Completely positive maps in Kraus form and their matrix encodings.
//!
//! A [`Channel`] is a CP map `X -> sum_i A_i X A_i*` given by its Kraus
//! operators. The module converts between three encodings of the same map:
//! Kraus lists, Choi matrices (block `(k,l)` holds the image of the matrix
//! unit `E_kl`), and superoperator matrices over an [`OperatorBasis`].
//! Vectorization is column-stacking throughout.

use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mat::{
    hermitian_eig, hermiticity_defect, is_psd, random_unitary, seeded_rng, unvec_col, vec_col,
    CMatrix, CVector, Tolerance, C64,
};

/// The four Pauli matrices in the order `I, sigma_x, sigma_y, sigma_z`.
pub fn pauli_matrices() -> [CMatrix; 4] {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    [
        CMatrix::from_row_slice(2, 2, &[one, z, z, one]),
        CMatrix::from_row_slice(2, 2, &[z, one, one, z]),
        CMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        CMatrix::from_row_slice(2, 2, &[one, z, z, -one]),
    ]
}

/// How an [`OperatorBasis`] was built.
///
/// Custom matrix-unit orders carry the label pairs verbatim; labels may be
/// any integers (negative included) and are mapped to coordinate indices in
/// order of first appearance, scanning each pair row label first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BasisKind {
    MatrixUnitsRowMajor,
    MatrixUnitsCustomOrder(Vec<(i64, i64)>),
    Pauli,
}

/// Basis of the operator space `M_d`, with coordinates taken against the
/// dual basis under the trace pairing `<X, Y> = trace(X* Y)`.
#[derive(Debug, Clone)]
pub struct OperatorBasis {
    dim: usize,
    kind: BasisKind,
    elements: Vec<CMatrix>,
    /// Diagonal of the Gram matrix. Every supported kind is orthogonal with
    /// a real diagonal Gram, so dual coordinates are `trace(b_i* X) / g_i`.
    gram_diag: Vec<f64>,
}

impl OperatorBasis {
    /// Matrix units `E_00, E_01, ..., E_{d-1,d-1}` in row-major order.
    pub fn matrix_units(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput { detail: "basis dimension must be at least 1".into() });
        }
        let mut elements = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                elements.push(matrix_unit(dim, r, c));
            }
        }
        Ok(Self {
            dim,
            kind: BasisKind::MatrixUnitsRowMajor,
            gram_diag: vec![1.0; dim * dim],
            elements,
        })
    }

    /// Matrix units listed in a caller-chosen order of label pairs.
    pub fn matrix_units_custom_order(order: Vec<(i64, i64)>) -> Result<Self> {
        let n = order.len();
        let dim = (n as f64).sqrt().round() as usize;
        if dim == 0 || dim * dim != n {
            return Err(Error::InvalidInput {
                detail: format!("custom order lists {n} pairs, which is not a nonzero square"),
            });
        }
        let mut labels: Vec<i64> = Vec::new();
        for &(r, c) in &order {
            if !labels.contains(&r) {
                labels.push(r);
            }
            if !labels.contains(&c) {
                labels.push(c);
            }
        }
        if labels.len() != dim {
            return Err(Error::InvalidInput {
                detail: format!(
                    "custom order uses {} distinct labels, expected {dim}",
                    labels.len()
                ),
            });
        }
        let index_of = |l: i64| labels.iter().position(|&x| x == l).unwrap();
        let mut seen = std::collections::HashSet::new();
        let mut elements = Vec::with_capacity(n);
        for &(r, c) in &order {
            if !seen.insert((r, c)) {
                return Err(Error::InvalidInput {
                    detail: format!("custom order repeats the pair [{r}, {c}]"),
                });
            }
            elements.push(matrix_unit(dim, index_of(r), index_of(c)));
        }
        Ok(Self {
            dim,
            kind: BasisKind::MatrixUnitsCustomOrder(order),
            gram_diag: vec![1.0; n],
            elements,
        })
    }

    /// Pauli basis `I, sigma_x, sigma_y, sigma_z` (qubit only).
    pub fn pauli() -> Self {
        Self {
            dim: 2,
            kind: BasisKind::Pauli,
            elements: pauli_matrices().to_vec(),
            gram_diag: vec![2.0; 4],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn kind(&self) -> &BasisKind {
        &self.kind
    }

    pub fn element(&self, j: usize) -> &CMatrix {
        &self.elements[j]
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    /// Coordinates of `x` against the dual basis.
    pub fn coords(&self, x: &CMatrix) -> Result<CVector> {
        if x.nrows() != self.dim || x.ncols() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.nrows() });
        }
        Ok(CVector::from_fn(self.elements.len(), |i, _| {
            (self.elements[i].adjoint() * x).trace() / C64::new(self.gram_diag[i], 0.0)
        }))
    }

    /// Linear combination `sum_j coords[j] * b_j`.
    pub fn expand(&self, coords: &CVector) -> Result<CMatrix> {
        if coords.len() != self.elements.len() {
            return Err(Error::DimensionMismatch { expected: self.elements.len(), got: coords.len() });
        }
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for (j, b) in self.elements.iter().enumerate() {
            out += b * coords[j];
        }
        Ok(out)
    }

    /// Coordinate index of the matrix unit `E_rc`, when the basis consists
    /// of matrix units.
    pub fn matrix_unit_index(&self, r: usize, c: usize) -> Option<usize> {
        match &self.kind {
            BasisKind::MatrixUnitsRowMajor => Some(r * self.dim + c),
            BasisKind::MatrixUnitsCustomOrder(_) => {
                let target = matrix_unit(self.dim, r, c);
                self.elements.iter().position(|e| e == &target)
            }
            BasisKind::Pauli => None,
        }
    }
}

pub(crate) fn matrix_unit(dim: usize, r: usize, c: usize) -> CMatrix {
    let mut m = CMatrix::zeros(dim, dim);
    m[(r, c)] = C64::new(1.0, 0.0);
    m
}

/// Cached structural facts a constructor can guarantee about a channel.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ChannelFlags {
    pub unital: Option<bool>,
    pub trace_preserving: Option<bool>,
}

/// A completely positive map in Kraus form.
#[derive(Debug, Clone)]
pub struct Channel {
    dim: usize,
    kraus: Vec<CMatrix>,
    flags: ChannelFlags,
}

impl Channel {
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self> {
        Self::with_flags(kraus, ChannelFlags::default())
    }

    /// Constructor for callers that can vouch for structural flags.
    pub fn with_flags(kraus: Vec<CMatrix>, flags: ChannelFlags) -> Result<Self> {
        let first = kraus.first().ok_or_else(|| Error::InvalidInput {
            detail: "a channel needs at least one Kraus operator".into(),
        })?;
        if first.nrows() != first.ncols() || first.nrows() == 0 {
            return Err(Error::NonSquare { rows: first.nrows(), cols: first.ncols() });
        }
        let dim = first.nrows();
        for a in &kraus {
            if a.nrows() != dim || a.ncols() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: a.nrows().max(a.ncols()) });
            }
        }
        Ok(Self { dim, kraus, flags })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn n_kraus(&self) -> usize {
        self.kraus.len()
    }

    pub fn flags(&self) -> ChannelFlags {
        self.flags
    }

    /// `Phi(X) = sum_i A_i X A_i*`.
    pub fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        if x.nrows() != self.dim || x.ncols() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.nrows() });
        }
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for a in &self.kraus {
            out += a * x * a.adjoint();
        }
        Ok(out)
    }

    /// The dual map `Phi*(X) = sum_i A_i* X A_i`, adjoint under the trace
    /// pairing: `trace(Phi(X)* Y) = trace(X* Phi*(Y))`.
    pub fn dual_apply(&self, x: &CMatrix) -> Result<CMatrix> {
        if x.nrows() != self.dim || x.ncols() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.nrows() });
        }
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for a in &self.kraus {
            out += a.adjoint() * x * a;
        }
        Ok(out)
    }

    /// Frobenius distance of `Phi(I)` from `I`.
    pub fn unital_defect(&self) -> f64 {
        let mut s = CMatrix::zeros(self.dim, self.dim);
        for a in &self.kraus {
            s += a * a.adjoint();
        }
        (s - CMatrix::identity(self.dim, self.dim)).norm()
    }

    /// Frobenius distance of `Phi*(I)` from `I`.
    pub fn trace_preserving_defect(&self) -> f64 {
        let mut s = CMatrix::zeros(self.dim, self.dim);
        for a in &self.kraus {
            s += a.adjoint() * a;
        }
        (s - CMatrix::identity(self.dim, self.dim)).norm()
    }

    /// Unitality within `rel_eps * sqrt(d)`.
    pub fn is_unital(&self, tol: &Tolerance) -> bool {
        self.unital_defect() <= tol.rel_eps * (self.dim as f64).sqrt()
    }

    /// Trace preservation within `rel_eps * sqrt(d)`.
    pub fn is_trace_preserving(&self, tol: &Tolerance) -> bool {
        self.trace_preserving_defect() <= tol.rel_eps * (self.dim as f64).sqrt()
    }

    /// Choi matrix `sum_kl E_kl (x) Phi(E_kl)`.
    pub fn to_choi(&self) -> ChoiMatrix {
        let d = self.dim;
        let mut c = CMatrix::zeros(d * d, d * d);
        for a in &self.kraus {
            let w = vec_col(a);
            c += &w * w.adjoint();
        }
        ChoiMatrix { dim: d, matrix: c }
    }

    /// Kraus operators mixed by an isometry on the index space; represents
    /// the same map.
    pub fn mix_kraus(&self, mix: &CMatrix) -> Result<Channel> {
        if mix.nrows() != self.n_kraus() {
            return Err(Error::DimensionMismatch { expected: self.n_kraus(), got: mix.nrows() });
        }
        let n_out = mix.ncols();
        let mut kraus = Vec::with_capacity(n_out);
        for i in 0..n_out {
            let mut b = CMatrix::zeros(self.dim, self.dim);
            for (j, a) in self.kraus.iter().enumerate() {
                b += a * mix[(j, i)];
            }
            kraus.push(b);
        }
        Channel::with_flags(kraus, self.flags)
    }
}

/// Choi matrix of a linear map on `M_d`; block `(k,l)` is the image of
/// the matrix unit `E_kl`.
#[derive(Debug, Clone)]
pub struct ChoiMatrix {
    dim: usize,
    matrix: CMatrix,
}

impl ChoiMatrix {
    pub fn new(dim: usize, matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != dim * dim || matrix.ncols() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, got: matrix.nrows() });
        }
        Ok(Self { dim, matrix })
    }

    /// Assembles a Choi matrix from the images of all matrix units, listed
    /// row-major: `images[k*d + l] = Phi(E_kl)`.
    pub fn from_images(dim: usize, images: &[CMatrix]) -> Result<Self> {
        if images.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, got: images.len() });
        }
        let mut c = CMatrix::zeros(dim * dim, dim * dim);
        for k in 0..dim {
            for l in 0..dim {
                let img = &images[k * dim + l];
                if img.nrows() != dim || img.ncols() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, got: img.nrows() });
                }
                c.view_mut((k * dim, l * dim), (dim, dim)).copy_from(img);
            }
        }
        Ok(Self { dim, matrix: c })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Image `Phi(E_kl)` read back out of block `(k,l)`.
    pub fn image_of_unit(&self, k: usize, l: usize) -> CMatrix {
        self.matrix.view((k * self.dim, l * self.dim), (self.dim, self.dim)).into_owned()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.matrix)
    }

    pub fn is_cp(&self, tol: &Tolerance) -> Result<bool> {
        is_psd(&self.matrix, tol)
    }
}

/// Extracts a Kraus decomposition from a Choi matrix.
///
/// Eigenpairs with `lambda > psd_slack * max(1, ||C||_2)` become Kraus
/// operators `sqrt(lambda) * unvec(v)`; eigenvalues below the negated
/// threshold reject the map as not CP. Operators are ordered by descending
/// eigenvalue, ties broken lexicographically on the phase-normalized
/// eigenvector entries; each eigenvector's first nonzero entry is rotated
/// to be real positive.
pub fn choi_to_kraus(choi: &ChoiMatrix, tol: &Tolerance) -> Result<Channel> {
    let d = choi.dim;
    let herm = choi.hermiticity_defect();
    if herm > 1e-8 * choi.matrix.norm().max(1.0) {
        return Err(Error::NotHermiticityPreserving { defect: herm });
    }
    let (values, vectors) = hermitian_eig(&choi.matrix)?;
    let norm2 = values.iter().fold(0.0f64, |acc, &v| acc.max(v.abs()));
    let threshold = tol.psd_slack * norm2.max(1.0);
    if let Some(&min) = values.first() {
        if min < -threshold {
            return Err(Error::NotCompletelyPositive { min_eigenvalue: min });
        }
    }
    let mut pairs: Vec<(f64, CVector)> = Vec::new();
    for (i, &lam) in values.iter().enumerate() {
        if lam > threshold {
            pairs.push((lam, phase_normalize(vectors.column(i).into_owned())));
        }
    }
    pairs.sort_by(|a, b| {
        b.0.total_cmp(&a.0).then_with(|| lex_cmp(&a.1, &b.1))
    });
    let mut kraus = Vec::with_capacity(pairs.len().max(1));
    for (lam, v) in &pairs {
        let a = unvec_col(v, d, d)? * C64::new(lam.sqrt(), 0.0);
        kraus.push(a);
    }
    if kraus.is_empty() {
        kraus.push(CMatrix::zeros(d, d));
    }
    Channel::new(kraus)
}

fn phase_normalize(mut v: CVector) -> CVector {
    let gate = 1e-12 * v.norm().max(1.0);
    if let Some(i) = (0..v.len()).find(|&i| v[i].norm() > gate) {
        let phase = v[i] / v[i].norm();
        v *= phase.conj();
    }
    v
}

fn lex_cmp(a: &CVector, b: &CVector) -> std::cmp::Ordering {
    for i in 0..a.len().min(b.len()) {
        let ord = a[i].re.total_cmp(&b[i].re).then(a[i].im.total_cmp(&b[i].im));
        if ord != std::cmp::Ordering::Equal {
            return ord;
        }
    }
    std::cmp::Ordering::Equal
}

/// Matrix of a linear map on `M_d` over an operator basis: column `j`
/// holds the dual-basis coordinates of the image of basis element `j`.
#[derive(Debug, Clone)]
pub struct Superoperator {
    basis: OperatorBasis,
    matrix: CMatrix,
}

impl Superoperator {
    pub fn new(basis: OperatorBasis, matrix: CMatrix) -> Result<Self> {
        let n = basis.len();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: matrix.nrows() });
        }
        Ok(Self { basis, matrix })
    }

    pub fn basis(&self) -> &OperatorBasis {
        &self.basis
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// Applies the represented map to `x` by passing through coordinates.
    pub fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        let coords = self.basis.coords(x)?;
        self.basis.expand(&(&self.matrix * coords))
    }

    /// Images of all matrix units `E_kl`, row-major over `(k, l)`.
    pub fn images_of_matrix_units(&self) -> Result<Vec<CMatrix>> {
        let d = self.dim();
        let mut out = Vec::with_capacity(d * d);
        for k in 0..d {
            for l in 0..d {
                out.push(self.apply(&matrix_unit(d, k, l))?);
            }
        }
        Ok(out)
    }

    /// Choi matrix of the represented map (no positivity assumed).
    pub fn to_choi(&self) -> Result<ChoiMatrix> {
        ChoiMatrix::from_images(self.dim(), &self.images_of_matrix_units()?)
    }
}

/// Superoperator of a channel over the given basis.
pub fn to_superoperator(ch: &Channel, basis: OperatorBasis) -> Result<Superoperator> {
    if basis.dim() != ch.dim() {
        return Err(Error::DimensionMismatch { expected: ch.dim(), got: basis.dim() });
    }
    let n = basis.len();
    let mut m = CMatrix::zeros(n, n);
    for j in 0..n {
        let img = ch.apply(basis.element(j))?;
        m.set_column(j, &basis.coords(&img)?);
    }
    Superoperator::new(basis, m)
}

/// Recovers a Kraus channel from a superoperator, failing when the
/// represented map is not Hermiticity-preserving or not CP.
pub fn superoperator_to_channel(s: &Superoperator, tol: &Tolerance) -> Result<Channel> {
    let choi = s.to_choi()?;
    choi_to_kraus(&choi, tol)
}

/// Families of random channels with structure guaranteed by construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RandomKind {
    /// Slices of a Haar co-isometry: `sum A_i A_i* = I`.
    UnitalCp,
    /// Slices of a Haar isometry: `sum A_i* A_i = I`.
    TracePreservingCp,
    /// Mixed-unitary `sum p_i U_i X U_i*`: unital and trace-preserving.
    UnitalTracePreserving,
}

/// Draws a random channel with `n_kraus` Kraus operators on dimension `dim`.
pub fn random_channel(dim: usize, n_kraus: usize, kind: RandomKind, seed: u64) -> Result<Channel> {
    if dim == 0 || n_kraus == 0 {
        return Err(Error::InvalidInput {
            detail: format!("dim and n_kraus must be at least 1, got {dim} and {n_kraus}"),
        });
    }
    let mut rng = seeded_rng(seed);
    random_channel_with(dim, n_kraus, kind, &mut rng)
}

/// As [`random_channel`], drawing from a caller-owned generator.
pub fn random_channel_with(
    dim: usize,
    n_kraus: usize,
    kind: RandomKind,
    rng: &mut ChaCha8Rng,
) -> Result<Channel> {
    let d = dim;
    let n = n_kraus;
    let (kraus, flags) = match kind {
        RandomKind::UnitalCp => {
            let u = random_unitary(n * d, rng);
            let w = u.rows(0, d).into_owned();
            let kraus: Vec<CMatrix> =
                (0..n).map(|i| w.columns(i * d, d).into_owned()).collect();
            (kraus, ChannelFlags { unital: Some(true), trace_preserving: None })
        }
        RandomKind::TracePreservingCp => {
            let u = random_unitary(n * d, rng);
            let v = u.columns(0, d).into_owned();
            let kraus: Vec<CMatrix> = (0..n).map(|i| v.rows(i * d, d).into_owned()).collect();
            (kraus, ChannelFlags { unital: None, trace_preserving: Some(true) })
        }
        RandomKind::UnitalTracePreserving => {
            use rand::Rng;
            let mut weights: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
            let total: f64 = weights.iter().sum();
            for w in &mut weights {
                *w /= total;
            }
            let kraus: Vec<CMatrix> = weights
                .iter()
                .map(|&p| random_unitary(d, rng) * C64::new(p.sqrt(), 0.0))
                .collect();
            (kraus, ChannelFlags { unital: Some(true), trace_preserving: Some(true) })
        }
    };
    Channel::with_flags(kraus, flags)
}
