//! Compressions of filter-induced isometries to finite Fourier windows.
//!
//! A bank of Laurent filters `m_1, ..., m_n` on the circle induces
//! operators `S_i f(z) = m_i(z) f(z^n)`. Compressing each `S_i` to the
//! span of the Fourier basis vectors `z^0, z^{-1}, ..., z^{-(d-1)}` gives
//! a tuple of `d x d` matrices whose entries are plain filter
//! coefficients; when the bank satisfies the unitarity condition and the
//! window is wide enough, the tuple is a unital channel of the kind the
//! rest of this crate analyzes.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::mat::{CMatrix, Tolerance, C64};

/// Default sample count for [`check_filter_unitarity`]: prime, so the
/// sample grid never aliases against the scale-`n` root-of-unity lattice.
pub const DEFAULT_UNITARITY_SAMPLES: usize = 257;

/// A scale and one Laurent filter per letter, each a finitely supported
/// coefficient map `exponent -> coefficient`.
#[derive(Debug, Clone)]
pub struct FilterBank {
    scale: usize,
    filters: Vec<BTreeMap<i64, C64>>,
}

impl FilterBank {
    /// Builds a bank from `(exponent, coefficient)` lists, one list per
    /// filter. The scale must be at least 2 and the filter count must
    /// equal the scale; repeated exponents within a filter are rejected.
    pub fn new(scale: usize, filters: Vec<Vec<(i64, C64)>>) -> Result<Self> {
        if scale < 2 {
            return Err(Error::InvalidInput {
                detail: format!("filter bank scale must be at least 2, got {scale}"),
            });
        }
        if filters.len() != scale {
            return Err(Error::InvalidInput {
                detail: format!(
                    "filter bank needs exactly one filter per letter: scale {scale}, got {} filters",
                    filters.len()
                ),
            });
        }
        let mut maps = Vec::with_capacity(filters.len());
        for (i, coeffs) in filters.into_iter().enumerate() {
            let mut map = BTreeMap::new();
            for (exponent, coeff) in coeffs {
                if map.insert(exponent, coeff).is_some() {
                    return Err(Error::InvalidInput {
                        detail: format!("filter {i} repeats exponent {exponent}"),
                    });
                }
            }
            maps.push(map);
        }
        Ok(Self { scale, filters: maps })
    }

    pub fn scale(&self) -> usize {
        self.scale
    }

    pub fn filters(&self) -> &[BTreeMap<i64, C64>] {
        &self.filters
    }

    /// Coefficient of `z^exponent` in filter `i` (zero when absent).
    pub fn coefficient(&self, i: usize, exponent: i64) -> C64 {
        self.filters[i].get(&exponent).copied().unwrap_or_else(|| C64::new(0.0, 0.0))
    }

    /// Value of filter `i` at a point of the unit circle.
    pub fn evaluate(&self, i: usize, z: C64) -> C64 {
        self.filters[i]
            .iter()
            .map(|(&e, &c)| c * z.powi(e as i32))
            .fold(C64::new(0.0, 0.0), |acc, t| acc + t)
    }

    /// Largest absolute exponent carried by any filter.
    pub fn support_radius(&self) -> i64 {
        self.filters
            .iter()
            .flat_map(|f| f.keys())
            .map(|&e| e.abs())
            .max()
            .unwrap_or(0)
    }
}

/// The span of `z^0, z^{-1}, ..., z^{-(d-1)}`, the Fourier window the
/// isometries are compressed to.
#[derive(Debug, Clone, Copy)]
pub struct CompressionSpace {
    dim: usize,
}

impl CompressionSpace {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput {
                detail: "compression space must have positive dimension".into(),
            });
        }
        Ok(Self { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Basis exponents in order: `0, -1, ..., -(dim-1)`.
    pub fn exponents(&self) -> Vec<i64> {
        (0..self.dim).map(|a| -(a as i64)).collect()
    }
}

/// A compressed filter tuple together with its unitality defect.
///
/// The defect is `||sum_i A_i A_i* - I||`; a nonzero value means the
/// window is too small to be co-invariant and the compression is not a
/// unital channel. Widening the window past the filter support repairs
/// this for any bank that passes [`check_filter_unitarity`].
#[derive(Debug, Clone)]
pub struct Compression {
    pub channel: Channel,
    pub unitality_defect: f64,
}

impl Compression {
    /// Whether the compression came out unital, at the same gate used by
    /// [`Channel::is_unital`].
    pub fn unital(&self, tol: &Tolerance) -> bool {
        self.channel.is_unital(tol)
    }
}

/// Compresses each induced isometry to the window.
///
/// The entry of `A_i` at row exponent `j` and column exponent `k` is the
/// coefficient of `z^j` in `m_i(z) z^{nk}`, which is the filter
/// coefficient at `j - nk`; entries are copied exactly, with no floating
/// arithmetic.
pub fn compress(fb: &FilterBank, space: &CompressionSpace) -> Compression {
    let d = space.dim();
    let n = fb.scale() as i64;
    let exponents = space.exponents();
    let kraus: Vec<CMatrix> = (0..fb.scale())
        .map(|i| {
            CMatrix::from_fn(d, d, |a, b| {
                let j = exponents[a];
                let k = exponents[b];
                fb.coefficient(i, j - n * k)
            })
        })
        .collect();
    let channel = Channel::new(kraus).expect("compression matrices are square and consistent");
    let unitality_defect = channel.unital_defect();
    Compression { channel, unitality_defect }
}

/// Result of sampling the filter unitarity condition on the circle.
#[derive(Debug, Clone, Serialize)]
pub struct UnitarityReport {
    pub max_defect: f64,
    pub samples: usize,
    pub pass: bool,
}

/// Samples `M(z) = (1/sqrt(n)) (m_i(rho^k z))` over the circle and
/// reports the largest deviation of `M(z)* M(z)` from the identity.
///
/// Sample points are equispaced with a fractional phase offset, so none
/// of them lands on a root of unity, where the almost-everywhere
/// unitarity statement says nothing. Passing means `max_defect`
/// stays below `rel_eps`.
pub fn check_filter_unitarity(
    fb: &FilterBank,
    samples: usize,
    tol: &Tolerance,
) -> Result<UnitarityReport> {
    if samples == 0 {
        return Err(Error::InvalidInput { detail: "sample count must be at least 1".into() });
    }
    let n = fb.scale();
    let rho = C64::from_polar(1.0, std::f64::consts::TAU / n as f64);
    let scale_factor = 1.0 / (n as f64).sqrt();
    let eye = CMatrix::identity(n, n);
    let mut max_defect = 0.0f64;
    for t in 0..samples {
        let angle = std::f64::consts::TAU * (t as f64 + 0.37) / samples as f64;
        let z = C64::from_polar(1.0, angle);
        let m = CMatrix::from_fn(n, n, |i, k| {
            fb.evaluate(i, rho.powu(k as u32) * z) * scale_factor
        });
        let defect = (m.adjoint() * &m - &eye).norm();
        max_defect = max_defect.max(defect);
    }
    Ok(UnitarityReport { max_defect, samples, pass: max_defect < tol.rel_eps })
}
