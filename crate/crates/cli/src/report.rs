//! Typed command reports: JSON-serializable structs plus text renderings
//! that carry the same numeric content.

use std::fmt::Write as _;

use serde::Serialize;

use cpmap::channel::{choi_to_kraus, superoperator_to_channel, ChoiMatrix};
use cpmap::fixedpoint::{
    fixed_point_space, multiplicative_closure, phi_infinity, verify_fixed_equals_commutant,
    MonotoneDirection,
};
use cpmap::jsonio::{ChannelRepr, DecompositionReportRepr, MapInput, MatrixRepr, QubitReportRepr};
use cpmap::mat::hermitian_eig;
use cpmap::qubit::{classify, pauli_form};
use cpmap::structure::{anchor_projections_with, AnchorOptions};
use cpmap::wavelet::{
    check_filter_unitarity, compress, CompressionSpace, FilterBank, DEFAULT_UNITARITY_SAMPLES,
};
use cpmap::{CMatrix, Channel, Projection, Result, Tolerance};

/// Converts either input form to a channel, rejecting superoperators of
/// maps that are not completely positive.
pub fn require_channel(input: MapInput, tol: &Tolerance) -> Result<Channel> {
    match input {
        MapInput::Channel(ch) => Ok(ch),
        MapInput::Superoperator(s) => superoperator_to_channel(&s, tol),
    }
}

#[derive(Serialize)]
pub struct CheckReport {
    pub dim: usize,
    pub input_form: &'static str,
    pub cp: bool,
    /// Smallest Choi eigenvalue; absent when the Choi matrix is not even
    /// Hermitian, in which case the defect field tells the story.
    pub choi_min_eigenvalue: Option<f64>,
    pub choi_hermiticity_defect: f64,
    pub unital: bool,
    pub unital_defect: f64,
    pub trace_preserving: bool,
    pub trace_defect: f64,
    /// Kraus rank; absent when the map is not completely positive.
    pub n_kraus: Option<usize>,
}

pub fn check(input: &MapInput, tol: &Tolerance) -> Result<CheckReport> {
    match input {
        MapInput::Channel(ch) => {
            let choi = ch.to_choi();
            let (values, _) = hermitian_eig(choi.matrix())?;
            Ok(CheckReport {
                dim: ch.dim(),
                input_form: "channel",
                cp: true,
                choi_min_eigenvalue: values.first().copied(),
                choi_hermiticity_defect: choi.hermiticity_defect(),
                unital: ch.is_unital(tol),
                unital_defect: ch.unital_defect(),
                trace_preserving: ch.is_trace_preserving(tol),
                trace_defect: ch.trace_preserving_defect(),
                n_kraus: Some(ch.kraus().len()),
            })
        }
        MapInput::Superoperator(s) => {
            let d = s.dim();
            let images = s.images_of_matrix_units()?;
            let choi = ChoiMatrix::from_images(d, &images)?;
            let herm = choi.hermiticity_defect();
            // Same Hermiticity gate as the Kraus extraction uses.
            let hermitian = herm <= 1e-8 * choi.matrix().norm().max(1.0);
            let (cp, min_eig, n_kraus) = if hermitian {
                let (values, _) = hermitian_eig(choi.matrix())?;
                let min = values.first().copied().unwrap_or(0.0);
                let scale = values.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
                let cp = min >= -tol.psd_slack * scale.max(1.0);
                let n = if cp { Some(choi_to_kraus(&choi, tol)?.kraus().len()) } else { None };
                (cp, Some(min), n)
            } else {
                (false, None, None)
            };
            let eye = CMatrix::identity(d, d);
            let mut phi_of_identity = CMatrix::zeros(d, d);
            for k in 0..d {
                phi_of_identity += &images[k * d + k];
            }
            let unital_defect = (phi_of_identity - &eye).norm();
            let traces = CMatrix::from_fn(d, d, |k, l| images[k * d + l].trace());
            let trace_defect = (traces - &eye).norm();
            let gate = tol.rel_eps * (d as f64).sqrt();
            Ok(CheckReport {
                dim: d,
                input_form: "superoperator",
                cp,
                choi_min_eigenvalue: min_eig,
                choi_hermiticity_defect: herm,
                unital: unital_defect <= gate,
                unital_defect,
                trace_preserving: trace_defect <= gate,
                trace_defect,
                n_kraus,
            })
        }
    }
}

pub fn render_check(r: &CheckReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "dim: {}", r.dim);
    let _ = writeln!(out, "input form: {}", r.input_form);
    match r.choi_min_eigenvalue {
        Some(min) => {
            let _ = writeln!(
                out,
                "completely positive: {} (smallest Choi eigenvalue {:e})",
                yes_no(r.cp),
                min
            );
        }
        None => {
            let _ = writeln!(
                out,
                "completely positive: no (Choi Hermiticity defect {:e})",
                r.choi_hermiticity_defect
            );
        }
    }
    let _ = writeln!(out, "unital: {} (defect {:e})", yes_no(r.unital), r.unital_defect);
    let _ = writeln!(
        out,
        "trace preserving: {} (defect {:e})",
        yes_no(r.trace_preserving),
        r.trace_defect
    );
    match r.n_kraus {
        Some(n) => {
            let _ = writeln!(out, "Kraus operators: {n}");
        }
        None => {
            let _ = writeln!(out, "Kraus operators: none (map is not completely positive)");
        }
    }
    out
}

#[derive(Serialize)]
pub struct CommutantSummary {
    pub equal: bool,
    pub dim: usize,
    pub max_residual: f64,
}

#[derive(Serialize)]
pub struct ClosureSummary {
    pub closed: bool,
    pub max_residual: f64,
    /// Indices of the basis pair whose product strays farthest from the
    /// span.
    pub witness: Option<[usize; 2]>,
}

#[derive(Serialize)]
pub struct FixedReport {
    pub dim: usize,
    pub fixed_dim: usize,
    pub unital: bool,
    pub trace_preserving: bool,
    /// Present exactly when the map is a unital trace-preserving channel,
    /// where equality with the commutant has backing.
    pub commutant: Option<CommutantSummary>,
    pub closure: ClosureSummary,
    pub basis: Vec<MatrixRepr>,
}

pub fn fixed(ch: &Channel, tol: &Tolerance) -> Result<FixedReport> {
    let space = fixed_point_space(ch, tol)?;
    let closure = multiplicative_closure(&space, tol);
    let unital = ch.is_unital(tol);
    let trace_preserving = ch.is_trace_preserving(tol);
    let commutant = if unital && trace_preserving {
        let rep = verify_fixed_equals_commutant(ch, tol)?;
        Some(CommutantSummary { equal: rep.equal, dim: rep.dim, max_residual: rep.max_residual })
    } else {
        None
    };
    Ok(FixedReport {
        dim: ch.dim(),
        fixed_dim: space.dim(),
        unital,
        trace_preserving,
        commutant,
        closure: ClosureSummary {
            closed: closure.closed,
            max_residual: closure.max_residual,
            witness: closure.witness.map(|(i, j)| [i, j]),
        },
        basis: space.elements().iter().map(MatrixRepr::from_matrix).collect(),
    })
}

pub fn render_fixed(r: &FixedReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "dim: {}", r.dim);
    let _ = writeln!(out, "fixed-point space dimension: {}", r.fixed_dim);
    let _ = writeln!(out, "unital: {}", yes_no(r.unital));
    let _ = writeln!(out, "trace preserving: {}", yes_no(r.trace_preserving));
    match &r.commutant {
        Some(c) => {
            let verdict = if c.equal { "equal" } else { "DISAGREES" };
            let _ = writeln!(
                out,
                "fixed-equals-commutant check: {verdict} (commutant dimension {}, max residual {:e})",
                c.dim, c.max_residual
            );
        }
        None => {
            let _ = writeln!(
                out,
                "fixed-equals-commutant check: skipped (not a unital trace-preserving channel)"
            );
        }
    }
    if r.closure.closed {
        let _ = writeln!(
            out,
            "multiplicative closure: closed (max residual {:e})",
            r.closure.max_residual
        );
    } else {
        let witness = r
            .closure
            .witness
            .map(|[i, j]| format!(", witness basis pair ({i}, {j})"))
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "multiplicative closure: fails (max residual {:e}{witness})",
            r.closure.max_residual
        );
    }
    for (i, m) in r.basis.iter().enumerate() {
        let _ = writeln!(out, "basis element {i}:");
        out.push_str(&render_matrix(m));
    }
    out
}

pub fn decompose(
    ch: &Channel,
    seed: u64,
    exhaustive: bool,
    tol: &Tolerance,
) -> Result<DecompositionReportRepr> {
    let report = anchor_projections_with(ch, AnchorOptions { seed, exhaustive }, tol)?;
    Ok(DecompositionReportRepr::from_report(&report))
}

pub fn render_decompose(r: &DecompositionReportRepr) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "summands: {}", r.summand_count);
    let ranks: Vec<String> = r.anchor_dims.iter().map(usize::to_string).collect();
    let _ = writeln!(out, "anchor ranks: {}", ranks.join(", "));
    let _ = writeln!(out, "irreducible: {}", yes_no(r.irreducible));
    match &r.equivalence_classes {
        Some(classes) => {
            let rendered: Vec<String> = classes
                .iter()
                .map(|class| {
                    let ids: Vec<String> = class.iter().map(usize::to_string).collect();
                    format!("{{{}}}", ids.join(", "))
                })
                .collect();
            let _ = writeln!(out, "equivalence classes: {}", rendered.join(", "));
        }
        None => {
            let _ = writeln!(
                out,
                "equivalence classes: not computed (map is not trace-preserving)"
            );
        }
    }
    for (i, anchor) in r.anchors.iter().enumerate() {
        let _ = writeln!(out, "anchor {i} (rank {}):", r.anchor_dims[i]);
        out.push_str(&render_matrix(anchor));
    }
    for (i, basis) in r.cyclic_vectors.iter().enumerate() {
        let _ = writeln!(out, "cyclic vectors for summand {i}:");
        for v in basis {
            let _ = writeln!(out, "  {}", render_vector(v));
        }
    }
    out
}

pub fn classify_qubit(ch: &Channel, tol: &Tolerance) -> Result<QubitReportRepr> {
    let class = classify(ch, tol)?;
    let form = pauli_form(ch, tol)?;
    Ok(QubitReportRepr::from_classification(&form, &class))
}

pub fn render_qubit(r: &QubitReportRepr) -> String {
    let mut out = String::new();
    match r.lambdas {
        Some([l1, l2, l3]) => {
            let _ = writeln!(out, "Pauli diagonal: ({l1}, {l2}, {l3})");
        }
        None => {
            let _ = writeln!(out, "Pauli diagonal: none (channel is not Pauli-diagonal)");
        }
    }
    let _ = writeln!(out, "case: {}", r.case);
    let _ = writeln!(out, "fixed-point algebra dimension: {}", r.fixed_dim);
    if let Some(projections) = &r.projections {
        for (i, p) in projections.iter().enumerate() {
            let _ = writeln!(out, "fixed projection {i}:");
            out.push_str(&render_matrix(p));
        }
    }
    out
}

#[derive(Serialize)]
pub struct PhiInfinityRepr {
    pub dim: usize,
    pub direction: MonotoneDirection,
    pub limit_characterization: &'static str,
    pub iterations: usize,
    pub residual: f64,
    pub limit: MatrixRepr,
}

pub fn run_phi_infinity(
    ch: &Channel,
    p: &CMatrix,
    max_iter: usize,
    tol: &Tolerance,
) -> Result<PhiInfinityRepr> {
    let p = Projection::new(p.clone(), tol)?;
    let rep = phi_infinity(ch, &p, tol, max_iter)?;
    let limit_characterization = match rep.direction {
        MonotoneDirection::Increasing => "infimum of the fixed points dominating the projection",
        MonotoneDirection::Decreasing => "supremum of the fixed points dominated by the projection",
        MonotoneDirection::Fixed => "the projection itself, already fixed",
    };
    Ok(PhiInfinityRepr {
        dim: ch.dim(),
        direction: rep.direction,
        limit_characterization,
        iterations: rep.iterations,
        residual: rep.residual,
        limit: MatrixRepr::from_matrix(&rep.limit),
    })
}

pub fn render_phi_infinity(r: &PhiInfinityRepr) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "dim: {}", r.dim);
    let direction = match r.direction {
        MonotoneDirection::Increasing => "increasing",
        MonotoneDirection::Decreasing => "decreasing",
        MonotoneDirection::Fixed => "fixed",
    };
    let _ = writeln!(out, "direction: {direction}");
    let _ = writeln!(out, "limit characterization: {}", r.limit_characterization);
    let _ = writeln!(out, "iterations: {}", r.iterations);
    let _ = writeln!(out, "final residual: {:e}", r.residual);
    let _ = writeln!(out, "limit:");
    out.push_str(&render_matrix(&r.limit));
    out
}

#[derive(Serialize)]
pub struct WaveletReport {
    pub scale: usize,
    pub filter_count: usize,
    pub support_radius: i64,
    pub dim: usize,
    pub unitary: bool,
    pub unitarity_max_defect: f64,
    pub unitarity_samples: usize,
    pub unital: bool,
    pub unitality_defect: f64,
    /// Path the compressed channel was written to, when `--out` is given.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    /// The compressed channel, embedded when no `--out` is given.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub channel: Option<ChannelRepr>,
}

pub fn wavelet(fb: &FilterBank, dim: usize, tol: &Tolerance) -> Result<(WaveletReport, Channel)> {
    let unitarity = check_filter_unitarity(fb, DEFAULT_UNITARITY_SAMPLES, tol)?;
    let space = CompressionSpace::new(dim)?;
    let compression = compress(fb, &space);
    let report = WaveletReport {
        scale: fb.scale(),
        filter_count: fb.filters().len(),
        support_radius: fb.support_radius(),
        dim,
        unitary: unitarity.pass,
        unitarity_max_defect: unitarity.max_defect,
        unitarity_samples: unitarity.samples,
        unital: compression.unital(tol),
        unitality_defect: compression.unitality_defect,
        out: None,
        channel: None,
    };
    Ok((report, compression.channel))
}

pub fn render_wavelet(r: &WaveletReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "scale: {}", r.scale);
    let _ = writeln!(out, "filters: {}", r.filter_count);
    let _ = writeln!(out, "support radius: {}", r.support_radius);
    let _ = writeln!(out, "compression dim: {}", r.dim);
    let _ = writeln!(
        out,
        "filter bank unitary on sampled circle: {} (max defect {:e} over {} samples)",
        yes_no(r.unitary),
        r.unitarity_max_defect,
        r.unitarity_samples
    );
    if !r.unitary {
        let _ = writeln!(
            out,
            "warning: the bank fails unitarity, so the compression below has no isometric dilation reading; emitted anyway"
        );
    }
    let _ = writeln!(
        out,
        "compression unital: {} (defect {:e})",
        yes_no(r.unital),
        r.unitality_defect
    );
    if !r.unital {
        let _ = writeln!(
            out,
            "note: unitality usually needs the compression dim to exceed the support radius; try a larger --dim"
        );
    }
    if let Some(path) = &r.out {
        let _ = writeln!(out, "channel written to: {path}");
    }
    if let Some(channel) = &r.channel {
        let _ = writeln!(out, "channel:");
        let _ = writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(channel).expect("channel serialization cannot fail")
        );
    }
    out
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn render_entry(entry: &[f64; 2]) -> String {
    let [re, im] = entry;
    if *im == 0.0 {
        format!("{re}")
    } else if *re == 0.0 {
        format!("{im}i")
    } else {
        format!("{re}{im:+}i")
    }
}

fn render_vector(v: &[[f64; 2]]) -> String {
    let parts: Vec<String> = v.iter().map(render_entry).collect();
    format!("[{}]", parts.join(", "))
}

fn render_matrix(m: &MatrixRepr) -> String {
    let mut out = String::new();
    for r in 0..m.rows {
        let row: Vec<String> =
            (0..m.cols).map(|c| render_entry(&m.entries[r * m.cols + c])).collect();
        let _ = writeln!(out, "  [{}]", row.join(", "));
    }
    out
}
