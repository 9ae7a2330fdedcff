//! Faraday-rotation distortion model and its separation from system
//! cross-talk.
//!
//! The one-way ionospheric rotation combines with a diagonal transmitter
//! as `T = R(theta_f) T_D`. After receiver removal the rotation becomes
//! an ordinary rotation of every Pauli vector, so the reciprocity solve
//! correctly reports zero system cross-talk no matter how large the
//! rotation is.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{cr, C64, Mat2, Mat4};
use crate::pauli::PauliVector;

/// Faraday distortion parameters: one-way rotation in degrees plus the
/// diagonal transmitter gains.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FaradayConfig {
    pub faraday_deg: f64,
    #[serde(with = "crate::jsoncpx::c64")]
    pub t11d: C64,
    #[serde(with = "crate::jsoncpx::c64")]
    pub t22d: C64,
}

impl FaradayConfig {
    pub fn new(faraday_deg: f64, t11d: C64, t22d: C64) -> Self {
        Self {
            faraday_deg,
            t11d,
            t22d,
        }
    }
}

/// The transmitter matrix `R(theta_f) * diag(t11d, t22d)`.
pub fn faraday_t(cfg: &FaradayConfig) -> Mat2 {
    let th = cfg.faraday_deg.to_radians();
    let (s, c) = th.sin_cos();
    [
        [cr(c) * cfg.t11d, cr(-s) * cfg.t22d],
        [cr(s) * cfg.t11d, cr(c) * cfg.t22d],
    ]
}

/// Pauli rotation operator matching the similarity action of `R(theta)`:
/// conjugation `R(-theta) S R(theta)` rotates (k1, k2) by 2*theta while
/// k0 and k3 stay fixed.
fn rotation_pauli(theta_rad: f64) -> Mat4 {
    let (s2, c2) = (2.0 * theta_rad).sin_cos();
    let z = C64::new(0.0, 0.0);
    [
        [cr(1.0), z, z, z],
        [z, cr(c2), cr(s2), z],
        [z, cr(-s2), cr(c2), z],
        [z, z, z, cr(1.0)],
    ]
}

/// The Pauli-basis distortion of the Faraday model: product of the
/// diagonal-imbalance sparse matrix and the 2*theta rotation block, in
/// that order (matching `S_obs = T_D^-1 R(-theta) S R(theta) T_D`).
/// Agrees with the exact similarity operator on the reciprocal (k3 = 0)
/// subspace.
pub fn faraday_pauli(cfg: &FaradayConfig) -> Result<Mat4> {
    let td = [
        [cfg.t11d, C64::new(0.0, 0.0)],
        [C64::new(0.0, 0.0), cfg.t22d],
    ];
    let p = crate::distortion::build_pauli_distortion(&td)?;
    let rot = rotation_pauli(cfg.faraday_deg.to_radians());
    Ok(crate::math::mat4_mul(&p.a, &rot))
}

/// The effective sparse-form parameters of the Faraday distortion.
#[derive(Debug, Clone, Copy)]
pub struct EffectiveParams {
    pub x1: C64,
    pub x2: C64,
    pub x3: C64,
    pub c1: C64,
    pub c2: C64,
}

impl EffectiveParams {
    /// a42 of the effective form; identically zero for any rotation.
    pub fn a42(&self) -> C64 {
        self.x2 * self.c2 - self.c1 * self.x3
    }

    /// The reciprocity observable a43/(C1 - x1 x2); equals -C2/C1
    /// independent of the rotation angle.
    pub fn epsilon(&self) -> C64 {
        (self.x1 * self.x3 - self.c2) / (self.c1 - self.x1 * self.x2)
    }
}

/// Factors the Faraday Pauli distortion into the sparse form: with
/// `t = tan(2 theta_f)`, the effective ratios are `x1 = t`,
/// `x2 = -C1 t`, `x3 = -C2 t` and the copolar terms are unchanged.
pub fn effective_params(cfg: &FaradayConfig) -> Result<EffectiveParams> {
    let two_theta = 2.0 * cfg.faraday_deg.to_radians();
    if two_theta.cos().abs() <= 1e-12 {
        return Err(Error::RotationSingular);
    }
    let t = cr(two_theta.tan());
    let td = [
        [cfg.t11d, C64::new(0.0, 0.0)],
        [C64::new(0.0, 0.0), cfg.t22d],
    ];
    let p = crate::distortion::build_pauli_distortion(&td)?;
    Ok(EffectiveParams {
        x1: t,
        x2: -p.c1 * t,
        x3: -p.c2 * t,
        c1: p.c1,
        c2: p.c2,
    })
}

/// Rotates (k1, k2) of a Pauli vector by 2*theta, fixing k0 and k3; use
/// to undo a known residual rotation after reciprocity-only calibration.
pub fn rotate_pauli(k: PauliVector, theta_rad: f64) -> PauliVector {
    let (s2, c2) = (2.0 * theta_rad).sin_cos();
    let [k0, k1, k2, k3] = k.0;
    PauliVector([
        k0,
        k1 * cr(c2) + k2 * cr(s2),
        k1 * cr(-s2) + k2 * cr(c2),
        k3,
    ])
}
