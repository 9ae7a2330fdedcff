//! Corner-reflector extraction and receiver removal.
//!
//! A trihedral has the identity as its ideal scattering matrix, so its
//! observed matrix is the product R*T. Left-multiplying every pixel by the
//! inverse of that estimate removes the receiver completely, leaving a
//! pure similarity distortion by the transmitter.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{Rect, SlcImage, Stage};
use crate::math::{hermitian_eig, mat2_inv, mat2_mul, C64, Mat2};
use crate::pauli::ScatteringMatrix;

/// Estimated corner-reflector product matrix, normalized so that the
/// (1,1) entry is exactly one.
#[derive(Debug, Clone, Copy)]
pub struct CrEstimate {
    pub s_cr: Mat2,
    pub s_cr_inv: Mat2,
    pub peak: (usize, usize),
    /// Dominant-eigenvalue fraction of the covariance trace, in [0, 1].
    pub dominance: f64,
}

/// Default side of the square patch centered on the detected peak.
pub const DEFAULT_PATCH: usize = 5;

/// Pixel of maximum total power within the window.
pub fn find_peak(img: &SlcImage, window: Rect) -> Result<(usize, usize)> {
    if window.is_empty() {
        return Err(Error::EmptyWindow);
    }
    if !window.fits_in(img.width, img.height) {
        return Err(Error::WindowOutOfBounds);
    }
    let mut best = 0.0;
    let mut best_xy = None;
    for (x, y) in window.pixels() {
        let p = img.total_power(x, y);
        if p > best {
            best = p;
            best_xy = Some((x, y));
        }
    }
    best_xy.ok_or(Error::NoPeak)
}

/// Estimates the corner-reflector matrix from one or more patches: the
/// 4x4 covariance of the lexicographic pixel vectors is accumulated over
/// all patches and its dominant eigenvector, reshaped row-major to 2x2,
/// is the estimate.
pub fn estimate_cr_matrix(img: &SlcImage, patches: &[Rect], peak: (usize, usize)) -> Result<CrEstimate> {
    let total: usize = patches.iter().map(Rect::area).sum();
    if total < 4 {
        return Err(Error::PatchTooSmall { min: 4, got: total });
    }
    let mut cov = [[C64::new(0.0, 0.0); 4]; 4];
    for patch in patches {
        if !patch.fits_in(img.width, img.height) {
            return Err(Error::WindowOutOfBounds);
        }
        for (x, y) in patch.pixels() {
            let s = img.get(x, y);
            let v = [s.hh, s.hv, s.vh, s.vv];
            for i in 0..4 {
                for j in 0..4 {
                    cov[i][j] += v[i] * v[j].conj();
                }
            }
        }
    }
    let trace: f64 = (0..4).map(|i| cov[i][i].re).sum();
    if trace <= 0.0 {
        return Err(Error::NoPeak);
    }
    let (vals, vecs) = hermitian_eig(&cov);
    if vals[0] <= 0.0 || (vals[0] - vals[1]) <= 1e-6 * vals[0] {
        return Err(Error::AmbiguousReflector);
    }
    let v = vecs[0];
    if v[0].norm() < 1e-9 {
        return Err(Error::CannotNormalize);
    }
    let scale = C64::new(1.0, 0.0) / v[0];
    let s_cr: Mat2 = [[v[0] * scale, v[1] * scale], [v[2] * scale, v[3] * scale]];
    // exact unity in (1,1) regardless of rounding in the division
    let mut s_cr = s_cr;
    s_cr[0][0] = C64::new(1.0, 0.0);
    let s_cr_inv = mat2_inv(&s_cr).ok_or(Error::SingularDistortion)?;
    Ok(CrEstimate {
        s_cr,
        s_cr_inv,
        peak,
        dominance: (vals[0] / trace).clamp(0.0, 1.0),
    })
}

/// Convenience: locate the peak within the window and estimate from a
/// `patch x patch` neighborhood around it.
pub fn extract_cr(img: &SlcImage, window: Rect, patch: usize) -> Result<CrEstimate> {
    let peak = find_peak(img, window)?;
    let rect = Rect::centered(peak.0, peak.1, patch, img.width, img.height);
    estimate_cr_matrix(img, &[rect], peak)
}

/// Left-multiplies every pixel by the inverse corner-reflector estimate,
/// removing the receiver distortion. The result carries the
/// receiver-removed flag; the remaining per-pixel model is T^-1 S T up to
/// the normalization constant.
pub fn remove_receiver(img: &SlcImage, cr: &CrEstimate) -> Result<SlcImage> {
    if img.stage != Stage::Raw {
        return Err(Error::StageMismatch {
            expected: "raw",
            found: img.stage.name(),
            missing: "a raw input dataset",
        });
    }
    let mut out = img.clone();
    for i in 0..img.len() {
        let s = img.get_idx(i).to_mat2();
        let r = mat2_mul(&cr.s_cr_inv, &s);
        out.set_idx(i, ScatteringMatrix::from_mat2(&r));
    }
    out.stage = Stage::ReceiverRemoved;
    out.note(format!(
        "receiver removed with corner-reflector estimate at ({}, {}), dominance {:.6}",
        cr.peak.0, cr.peak.1, cr.dominance
    ));
    Ok(out)
}

/// JSON form of a corner-reflector estimate (`cr.json`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrArtifact {
    pub format_version: u32,
    pub peak: [usize; 2],
    #[serde(with = "crate::jsoncpx::mat2")]
    pub s_cr: Mat2,
    #[serde(with = "crate::jsoncpx::mat2")]
    pub s_cr_inv: Mat2,
    pub dominance: f64,
}

impl From<&CrEstimate> for CrArtifact {
    fn from(cr: &CrEstimate) -> Self {
        Self {
            format_version: 1,
            peak: [cr.peak.0, cr.peak.1],
            s_cr: cr.s_cr,
            s_cr_inv: cr.s_cr_inv,
            dominance: cr.dominance,
        }
    }
}

impl CrArtifact {
    pub fn to_estimate(&self) -> Result<CrEstimate> {
        if self.format_version != 1 {
            return Err(Error::UnsupportedFormatVersion(self.format_version));
        }
        Ok(CrEstimate {
            s_cr: self.s_cr,
            s_cr_inv: self.s_cr_inv,
            peak: (self.peak[0], self.peak[1]),
            dominance: self.dominance,
        })
    }
}
