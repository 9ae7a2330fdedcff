//! Solving the calibration problem on receiver-removed data.
//!
//! Reciprocity (k3 of the true scattering vector is zero) gives an
//! overdetermined linear system in the two normalized entries of the
//! bottom row of the inverse distortion matrix. Its solution yields the
//! copolar imbalance up to sign; an uncalibrated symmetric point target
//! then supplies the cross ratios, fully populating the calibration
//! matrix.

use serde::{Deserialize, Serialize};

use crate::distortion::x1_from;
use crate::error::{Error, Result};
use crate::image::{SlcImage, Stage};
use crate::math::{cr, C64, Lstsq2, Mat4};
use crate::pauli::pauli_inverse;

/// Branch of the square root in the copolar-ratio recovery. The minus
/// branch only changes the sign of the calibrated cross-polar (hv+vh)
/// channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum SignChoice {
    #[default]
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CalMode {
    ReciprocityOnly,
    Full,
}

/// Least-squares estimate of the normalized bottom-row entries
/// `a42n = a42/(C1 - x1 x2)` and `a43n = a43/(C1 - x1 x2)`.
#[derive(Debug, Clone, Copy)]
pub struct ReciprocitySolution {
    pub a42n: C64,
    pub a43n: C64,
    /// a43n doubles as the copolar-imbalance observable epsilon.
    pub epsilon: C64,
    pub n_pixels: usize,
    pub residual_rms: f64,
}

/// Fully assembled calibration operator.
#[derive(Debug, Clone, Copy)]
pub struct CalibrationSolution {
    pub c: C64,
    pub c1: C64,
    pub c2: C64,
    pub x1: C64,
    pub x2: C64,
    pub x3: C64,
    pub a42n: C64,
    pub a43n: C64,
    pub a_inv: Mat4,
    pub sign_choice: SignChoice,
    pub mode: CalMode,
}

/// Default power percentile for the reciprocity pixel mask: pixels above
/// the image median are used.
pub const DEFAULT_MASK_PERCENTILE: f64 = 50.0;

/// Total-power threshold at the given percentile (0..100).
pub fn power_percentile(img: &SlcImage, percentile: f64) -> f64 {
    let mut powers: Vec<f64> = (0..img.len()).map(|i| img.get_idx(i).total_power()).collect();
    if powers.is_empty() {
        return 0.0;
    }
    powers.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let p = percentile.clamp(0.0, 100.0) / 100.0;
    let idx = ((powers.len() - 1) as f64 * p).round() as usize;
    powers[idx]
}

fn require_receiver_removed(img: &SlcImage) -> Result<()> {
    if img.stage != Stage::ReceiverRemoved {
        return Err(Error::StageMismatch {
            expected: "receiver-removed",
            found: img.stage.name(),
            missing: "remove-rx",
        });
    }
    Ok(())
}

/// Reciprocity least squares over the given pixel indices: each pixel
/// contributes a row `a42n z1 + a43n z2 = -z3` of the Pauli components.
pub fn reciprocity_solve_masked(
    img: &SlcImage,
    indices: impl IntoIterator<Item = usize>,
) -> Result<ReciprocitySolution> {
    require_receiver_removed(img)?;
    let mut ls = Lstsq2::new();
    for i in indices {
        let k = img.pauli_idx(i);
        ls.push(k.0[1], k.0[2], -k.0[3]);
    }
    if ls.count() < 2 {
        return Err(Error::TooFewPixels {
            min: 2,
            got: ls.count(),
        });
    }
    let (a42n, a43n, residual_rms) = ls.solve().ok_or(Error::DegenerateClutter)?;
    Ok(ReciprocitySolution {
        a42n,
        a43n,
        epsilon: a43n,
        n_pixels: ls.count(),
        residual_rms,
    })
}

/// Reciprocity least squares using the default power mask: pixels whose
/// total power is at or above the given percentile.
pub fn reciprocity_solve(img: &SlcImage, mask_percentile: f64) -> Result<ReciprocitySolution> {
    require_receiver_removed(img)?;
    let threshold = power_percentile(img, mask_percentile);
    let indices = (0..img.len()).filter(|&i| img.get_idx(i).total_power() >= threshold);
    reciprocity_solve_masked(img, indices)
}

/// Copolar imbalance from the reciprocity observable:
/// `c = +/- sqrt((1 - eps)/(1 + eps))`. The plus branch is the principal
/// root (Re(c) >= 0, and Im(c) >= 0 when Re(c) = 0).
pub fn copolar_imbalance(epsilon: C64, sign_choice: SignChoice) -> Result<C64> {
    let denom = cr(1.0) + epsilon;
    if denom.norm() <= 1e-12 {
        return Err(Error::CopolarRatioPole);
    }
    let c = ((cr(1.0) - epsilon) / denom).sqrt();
    Ok(match sign_choice {
        SignChoice::Plus => c,
        SignChoice::Minus => -c,
    })
}

/// Relative floor below which the target's z1 = a - b component counts as
/// unobservable.
pub const Z1_REL_THRESHOLD: f64 = 1e3 * f64::EPSILON;

/// Cross ratios from a symmetric (diagonal, a != b) point target on
/// receiver-removed data: `x2 = z2/z1`, `x3 = z3/z1`.
pub fn crosstalk_from_target(
    img: &SlcImage,
    target: (usize, usize),
    abs_floor: f64,
) -> Result<(C64, C64)> {
    require_receiver_removed(img)?;
    let k = img.pauli_at(target.0, target.1);
    let z0 = k.0[0];
    let z1 = k.0[1];
    if z1.norm() <= Z1_REL_THRESHOLD * z0.norm() + abs_floor {
        return Err(Error::TargetUnobservable);
    }
    Ok((k.0[2] / z1, k.0[3] / z1))
}

/// Assembles the inverse calibration matrix from the reciprocity solution
/// and (optionally) target-derived cross ratios. With no target the cross
/// ratios are zero and only channel imbalance and the bottom row are
/// corrected.
pub fn assemble_solution(
    recip: &ReciprocitySolution,
    xtalk: Option<(C64, C64)>,
    sign_choice: SignChoice,
) -> Result<CalibrationSolution> {
    let c = copolar_imbalance(recip.epsilon, sign_choice)?;
    if c.norm() <= 1e-300 {
        return Err(Error::CopolarGainZero);
    }
    let c1 = (cr(1.0) + c * c) / (cr(2.0) * c);
    let c2 = (c - cr(1.0) / c) * cr(0.5);
    let (x1, x2, x3, mode) = match xtalk {
        Some((x2, x3)) => (x1_from(x2, x3, c)?, x2, x3, CalMode::Full),
        None => {
            let z = C64::new(0.0, 0.0);
            (z, z, z, CalMode::ReciprocityOnly)
        }
    };
    // Normalizing the center rows by (C1 - x1 x2) instead of C1 keeps
    // them the exact inverse of the sparse model; the two coincide in
    // reciprocity-only mode and differ only at second order otherwise.
    let d = c1 - x1 * x2;
    if d.norm() <= 1e-9 {
        return Err(Error::DegenerateCalibration);
    }
    let z = C64::new(0.0, 0.0);
    let one = cr(1.0);
    let a_inv = [
        [one, z, z, z],
        [z, c1 / d, -x1 / d, z],
        [z, -x2 / d, one / d, z],
        [z, recip.a42n, recip.a43n, one],
    ];
    Ok(CalibrationSolution {
        c,
        c1,
        c2,
        x1,
        x2,
        x3,
        a42n: recip.a42n,
        a43n: recip.a43n,
        a_inv,
        sign_choice,
        mode,
    })
}

/// Applies the inverse calibration matrix to every pixel's Pauli vector
/// and converts back to scattering channels.
pub fn apply_calibration(img: &SlcImage, sol: &CalibrationSolution) -> Result<SlcImage> {
    require_receiver_removed(img)?;
    let mut out = img.clone();
    for i in 0..img.len() {
        let k = img.pauli_idx(i);
        let kc = crate::math::mat4_vec(&sol.a_inv, &k.0);
        out.set_idx(i, pauli_inverse(crate::pauli::PauliVector(kc)).into());
    }
    out.stage = Stage::Calibrated;
    out.note(format!(
        "calibrated ({} mode, sign {:?})",
        match sol.mode {
            CalMode::ReciprocityOnly => "reciprocity-only",
            CalMode::Full => "full",
        },
        sol.sign_choice
    ));
    Ok(out)
}

/// JSON form of a calibration solution (`cal.json`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CalArtifact {
    pub format_version: u32,
    #[serde(with = "crate::jsoncpx::c64")]
    pub c: C64,
    #[serde(with = "crate::jsoncpx::c64")]
    pub c1: C64,
    #[serde(with = "crate::jsoncpx::c64")]
    pub c2: C64,
    #[serde(with = "crate::jsoncpx::c64")]
    pub x1: C64,
    #[serde(with = "crate::jsoncpx::c64")]
    pub x2: C64,
    #[serde(with = "crate::jsoncpx::c64")]
    pub x3: C64,
    #[serde(with = "crate::jsoncpx::c64")]
    pub a42n: C64,
    #[serde(with = "crate::jsoncpx::c64")]
    pub a43n: C64,
    #[serde(with = "crate::jsoncpx::mat4")]
    pub a_inv: Mat4,
    pub sign_choice: SignChoice,
    pub mode: CalMode,
}

impl From<&CalibrationSolution> for CalArtifact {
    fn from(s: &CalibrationSolution) -> Self {
        Self {
            format_version: 1,
            c: s.c,
            c1: s.c1,
            c2: s.c2,
            x1: s.x1,
            x2: s.x2,
            x3: s.x3,
            a42n: s.a42n,
            a43n: s.a43n,
            a_inv: s.a_inv,
            sign_choice: s.sign_choice,
            mode: s.mode,
        }
    }
}

impl CalArtifact {
    pub fn to_solution(&self) -> Result<CalibrationSolution> {
        if self.format_version != 1 {
            return Err(Error::UnsupportedFormatVersion(self.format_version));
        }
        Ok(CalibrationSolution {
            c: self.c,
            c1: self.c1,
            c2: self.c2,
            x1: self.x1,
            x2: self.x2,
            x3: self.x3,
            a42n: self.a42n,
            a43n: self.a43n,
            a_inv: self.a_inv,
            sign_choice: self.sign_choice,
            mode: self.mode,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::c;
    use crate::pauli::{pauli_inverse as pinv, PauliVector, ScatteringMatrix};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn removed_image_from_pauli(pixels: &[[C64; 4]]) -> SlcImage {
        let mut img = SlcImage::zeros(pixels.len(), 1);
        for (i, k) in pixels.iter().enumerate() {
            img.set_idx(i, pinv(PauliVector(*k)).into());
        }
        img.stage = Stage::ReceiverRemoved;
        img
    }

    #[test]
    fn undistorted_reciprocal_data_gives_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let pixels: Vec<[C64; 4]> = (0..100)
            .map(|_| {
                [
                    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                    c(0.0, 0.0),
                ]
            })
            .collect();
        let img = removed_image_from_pauli(&pixels);
        let sol = reciprocity_solve(&img, 0.0).unwrap();
        assert!(sol.a42n.norm() < 1e-12);
        assert!(sol.a43n.norm() < 1e-12);
        assert!(sol.residual_rms < 1e-12);
        assert_eq!(sol.n_pixels, 100);
    }

    #[test]
    fn diagonal_t_gives_symbolic_epsilon() {
        // diagonal T with c = 2: eps = (1 - 4)/(1 + 4) = -0.6, a42n = 0
        let t = [[cr(1.0), c(0.0, 0.0)], [c(0.0, 0.0), cr(2.0)]];
        let p = crate::distortion::build_pauli_distortion(&t).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let pixels: Vec<[C64; 4]> = (0..200)
            .map(|_| {
                let k = [
                    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                    c(0.0, 0.0),
                ];
                crate::math::mat4_vec(&p.a, &k)
            })
            .collect();
        let img = removed_image_from_pauli(&pixels);
        let sol = reciprocity_solve(&img, 0.0).unwrap();
        assert!(sol.a42n.norm() < 1e-10, "a42n = {}", sol.a42n);
        assert!((sol.a43n - cr(-0.6)).norm() < 1e-10, "a43n = {}", sol.a43n);
        let cc = copolar_imbalance(sol.epsilon, SignChoice::Plus).unwrap();
        assert!((cc - cr(2.0)).norm() < 1e-10);
    }

    #[test]
    fn solve_requires_receiver_removed() {
        let img = SlcImage::zeros(4, 4);
        assert!(matches!(
            reciprocity_solve(&img, 50.0),
            Err(Error::StageMismatch { .. })
        ));
    }

    #[test]
    fn solve_needs_two_pixels() {
        let img = removed_image_from_pauli(&[[cr(1.0), cr(1.0), cr(1.0), cr(0.0)]]);
        assert!(matches!(
            reciprocity_solve_masked(&img, [0usize]),
            Err(Error::TooFewPixels { .. })
        ));
    }

    #[test]
    fn degenerate_clutter_geometry() {
        // all rows proportional: columns collinear
        let k = [cr(0.0), cr(1.0), c(2.0, 1.0), cr(0.5)];
        let pixels: Vec<[C64; 4]> = (1..20)
            .map(|i| {
                let g = cr(i as f64);
                [k[0] * g, k[1] * g, k[2] * g, k[3] * g]
            })
            .collect();
        let img = removed_image_from_pauli(&pixels);
        assert!(matches!(
            reciprocity_solve(&img, 0.0),
            Err(Error::DegenerateClutter)
        ));
    }

    #[test]
    fn copolar_imbalance_branches() {
        assert!((copolar_imbalance(c(0.0, 0.0), SignChoice::Plus).unwrap() - cr(1.0)).norm() < 1e-15);
        let cc = copolar_imbalance(cr(-0.6), SignChoice::Plus).unwrap();
        assert!((cc - cr(2.0)).norm() < 1e-12);
        let cm = copolar_imbalance(cr(-0.6), SignChoice::Minus).unwrap();
        assert!((cm + cr(2.0)).norm() < 1e-12);
        assert!(matches!(
            copolar_imbalance(cr(-1.0), SignChoice::Plus),
            Err(Error::CopolarRatioPole)
        ));
    }

    #[test]
    fn crosstalk_from_undistorted_dihedral() {
        let mut img = SlcImage::zeros(2, 1);
        img.set(0, 0, ScatteringMatrix::diag(cr(1.0), cr(-1.0)));
        img.stage = Stage::ReceiverRemoved;
        let (x2, x3) = crosstalk_from_target(&img, (0, 0), 0.0).unwrap();
        assert!(x2.norm() < 1e-15);
        assert!(x3.norm() < 1e-15);
    }

    #[test]
    fn crosstalk_recovers_transmitter_ratios() {
        // oracle: forward-simulate the sparse model on a dihedral vector
        let t = [
            [cr(1.0), c(0.03, -0.02)],
            [c(-0.01, 0.04), c(1.2, 0.5)],
        ];
        let p = crate::distortion::build_pauli_distortion(&t).unwrap();
        let k_dihedral = [c(0.0, 0.0), cr(crate::pauli::SQRT2), c(0.0, 0.0), c(0.0, 0.0)];
        let obs = crate::math::mat4_vec(&p.a, &k_dihedral);
        let img = removed_image_from_pauli(&[obs, [cr(1.0); 4]]);
        let (x2, x3) = crosstalk_from_target(&img, (0, 0), 0.0).unwrap();
        assert!((x2 - p.x2).norm() < 1e-10);
        assert!((x3 - p.x3).norm() < 1e-10);
    }

    #[test]
    fn crosstalk_rejects_trihedral() {
        let mut img = SlcImage::zeros(1, 1);
        img.set(0, 0, ScatteringMatrix::identity());
        img.stage = Stage::ReceiverRemoved;
        assert!(matches!(
            crosstalk_from_target(&img, (0, 0), 0.0),
            Err(Error::TargetUnobservable)
        ));
    }

    #[test]
    fn assemble_identity_from_zero_distortion() {
        let recip = ReciprocitySolution {
            a42n: c(0.0, 0.0),
            a43n: c(0.0, 0.0),
            epsilon: c(0.0, 0.0),
            n_pixels: 10,
            residual_rms: 0.0,
        };
        let sol = assemble_solution(&recip, None, SignChoice::Plus).unwrap();
        let err = crate::math::mat4_frob(&crate::math::mat4_sub(
            &sol.a_inv,
            &crate::math::mat4_identity(),
        ));
        assert!(err < 1e-14);
        assert_eq!(sol.mode, CalMode::ReciprocityOnly);
    }

    #[test]
    fn apply_identity_solution_is_noop() {
        let mut img = SlcImage::zeros(3, 3);
        img.set(1, 1, ScatteringMatrix::new(c(1.0, 2.0), c(0.3, 0.0), c(0.3, 0.0), c(-1.0, 0.5)));
        img.stage = Stage::ReceiverRemoved;
        let recip = ReciprocitySolution {
            a42n: c(0.0, 0.0),
            a43n: c(0.0, 0.0),
            epsilon: c(0.0, 0.0),
            n_pixels: 9,
            residual_rms: 0.0,
        };
        let sol = assemble_solution(&recip, None, SignChoice::Plus).unwrap();
        let out = apply_calibration(&img, &sol).unwrap();
        assert_eq!(out.stage, Stage::Calibrated);
        for i in 0..img.len() {
            assert!((out.hh[i] - img.hh[i]).norm() < 1e-14);
            assert!((out.hv[i] - img.hv[i]).norm() < 1e-14);
            assert!((out.vh[i] - img.vh[i]).norm() < 1e-14);
            assert!((out.vv[i] - img.vv[i]).norm() < 1e-14);
        }
    }

    #[test]
    fn sign_flip_negates_crosspolar_channel_only() {
        let t = [
            [cr(1.0), c(0.02, -0.01)],
            [c(0.01, 0.03), c(1.3, -0.4)],
        ];
        let p = crate::distortion::build_pauli_distortion(&t).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let pixels: Vec<[C64; 4]> = (0..300)
            .map(|_| {
                let k = [
                    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                    c(0.0, 0.0),
                ];
                crate::math::mat4_vec(&p.a, &k)
            })
            .collect();
        let img = removed_image_from_pauli(&pixels);
        let recip = reciprocity_solve(&img, 0.0).unwrap();
        let plus = assemble_solution(&recip, None, SignChoice::Plus).unwrap();
        let minus = assemble_solution(&recip, None, SignChoice::Minus).unwrap();
        let out_p = apply_calibration(&img, &plus).unwrap();
        let out_m = apply_calibration(&img, &minus).unwrap();
        for i in 0..img.len() {
            let kp = out_p.pauli_idx(i);
            let km = out_m.pauli_idx(i);
            assert!((kp.0[0] - km.0[0]).norm() < 1e-12);
            assert!((kp.0[1] - km.0[1]).norm() < 1e-12);
            assert!((kp.0[2] + km.0[2]).norm() < 1e-12, "k2 must flip sign");
            assert!((kp.0[3] - km.0[3]).norm() < 1e-12);
        }
    }
}
