//! Synthetic quad-pol scene simulator: speckled clutter classes plus
//! point targets, with the full distortion model applied on top. Every
//! pipeline claim in this crate is verified against the ground truth this
//! module produces.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::distortion::DistortionPair;
use crate::error::{Error, Result};
use crate::faraday::{faraday_t, FaradayConfig};
use crate::image::{Rect, SlcImage, Stage};
use crate::math::{c, hermitian_eig, C64, Mat2};
use crate::pauli::{pauli_inverse, PauliVector, ScatteringMatrix};

pub type Mat3 = [[C64; 3]; 3];

/// A clutter region drawn as fully developed single-look speckle with the
/// given Hermitian PSD covariance over the reciprocal Pauli components
/// (k0, k1, k2); generated pixels have k3 = 0 exactly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClutterClass {
    pub name: String,
    pub region: Rect,
    #[serde(with = "crate::jsoncpx::mat3")]
    pub pauli_cov: Mat3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetKind {
    Trihedral,
    Dihedral,
    CustomDiag,
}

/// Single-pixel diagonal point target `S = diag(a, b)`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PointTarget {
    pub kind: TargetKind,
    pub position: [usize; 2],
    #[serde(with = "crate::jsoncpx::c64")]
    pub a: C64,
    #[serde(with = "crate::jsoncpx::c64")]
    pub b: C64,
}

impl PointTarget {
    pub fn trihedral(x: usize, y: usize, amplitude: f64) -> Self {
        Self {
            kind: TargetKind::Trihedral,
            position: [x, y],
            a: c(amplitude, 0.0),
            b: c(amplitude, 0.0),
        }
    }

    pub fn dihedral(x: usize, y: usize, amplitude: f64) -> Self {
        Self {
            kind: TargetKind::Dihedral,
            position: [x, y],
            a: c(amplitude, 0.0),
            b: c(-amplitude, 0.0),
        }
    }

    pub fn custom_diag(x: usize, y: usize, a: C64, b: C64) -> Self {
        Self {
            kind: TargetKind::CustomDiag,
            position: [x, y],
            a,
            b,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self.kind {
            TargetKind::Trihedral => (self.a - self.b).norm() <= 1e-12 * self.a.norm(),
            TargetKind::Dihedral => (self.a + self.b).norm() <= 1e-12 * self.a.norm(),
            TargetKind::CustomDiag => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::BadSceneConfig(format!(
                "target at {:?} violates its kind constraint",
                self.position
            )))
        }
    }
}

/// Distortion description as it appears in scene/distortion JSON files.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum DistortionSpec {
    Pair {
        #[serde(with = "crate::jsoncpx::mat2")]
        r: Mat2,
        #[serde(with = "crate::jsoncpx::mat2")]
        t: Mat2,
    },
    Faraday {
        #[serde(flatten)]
        faraday: FaradayConfig,
        /// Optional receiver matrix; identity when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        receiver: Option<[[ [f64; 2]; 2]; 2]>,
    },
}

impl DistortionSpec {
    pub fn materialize(&self) -> Result<DistortionPair> {
        let pair = match self {
            DistortionSpec::Pair { r, t } => DistortionPair { r: *r, t: *t },
            DistortionSpec::Faraday { faraday, receiver } => {
                let r = match receiver {
                    Some(m) => {
                        let mut out = crate::math::mat2_identity();
                        for i in 0..2 {
                            for j in 0..2 {
                                out[i][j] = crate::jsoncpx::from_pair(m[i][j]);
                            }
                        }
                        out
                    }
                    None => crate::math::mat2_identity(),
                };
                DistortionPair {
                    r,
                    t: faraday_t(faraday),
                }
            }
        };
        if !pair.invertible() {
            return Err(Error::SingularDistortion);
        }
        Ok(pair)
    }

    /// One-way Faraday rotation in degrees, when this is a Faraday model.
    pub fn faraday_deg(&self) -> Option<f64> {
        match self {
            DistortionSpec::Faraday { faraday, .. } => Some(faraday.faraday_deg),
            _ => None,
        }
    }
}

/// Scene description (`scene.json`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SceneConfig {
    #[serde(default = "default_format_version")]
    pub format_version: u32,
    pub width: usize,
    pub height: usize,
    pub classes: Vec<ClutterClass>,
    #[serde(default)]
    pub targets: Vec<PointTarget>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distortion: Option<DistortionSpec>,
    /// Signal-to-noise ratio in dB; absent means noise-free.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snr_db: Option<f64>,
    pub seed: u64,
}

fn default_format_version() -> u32 {
    1
}

impl SceneConfig {
    pub fn validate(&self) -> Result<()> {
        if self.format_version != 1 {
            return Err(Error::UnsupportedFormatVersion(self.format_version));
        }
        for class in &self.classes {
            if !class.region.fits_in(self.width, self.height) {
                return Err(Error::BadSceneConfig(format!(
                    "class {:?} region out of bounds",
                    class.name
                )));
            }
        }
        for t in &self.targets {
            if t.position[0] >= self.width || t.position[1] >= self.height {
                return Err(Error::BadSceneConfig(format!(
                    "target position {:?} out of bounds",
                    t.position
                )));
            }
            t.validate()?;
        }
        Ok(())
    }

    /// A default desk-scale scene: rough surface background, a forest
    /// patch, one trihedral and one dihedral. Class covariances are
    /// plausible stand-ins, not measured values.
    pub fn default_scene(seed: u64) -> Self {
        let surface_cov: Mat3 = [
            [c(1.0, 0.0), c(0.25, 0.0), c(0.0, 0.0)],
            [c(0.25, 0.0), c(0.25, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(0.0, 0.0), c(0.05, 0.0)],
        ];
        let forest_cov: Mat3 = [
            [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(0.4, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(0.0, 0.0), c(0.45, 0.0)],
        ];
        SceneConfig {
            format_version: 1,
            width: 256,
            height: 256,
            classes: vec![
                ClutterClass {
                    name: "surface".into(),
                    region: Rect::new(0, 0, 256, 256),
                    pauli_cov: surface_cov,
                },
                ClutterClass {
                    name: "forest".into(),
                    region: Rect::new(96, 96, 64, 64),
                    pauli_cov: forest_cov,
                },
            ],
            targets: vec![
                PointTarget::trihedral(48, 48, 100.0),
                PointTarget::dihedral(208, 48, 100.0),
            ],
            distortion: None,
            snr_db: None,
            seed,
        }
    }
}

/// Factor of a 3x3 Hermitian PSD covariance such that `L w` with unit
/// circular Gaussian `w` has the requested covariance. Eigenvalues below
/// the PSD tolerance are clamped to zero.
fn cov_factor(cov: &Mat3) -> Result<Mat3> {
    let (vals, vecs) = hermitian_eig(cov);
    let trace: f64 = vals.iter().sum();
    let tol = 1e-12 * trace.abs().max(f64::MIN_POSITIVE);
    let mut l = [[C64::new(0.0, 0.0); 3]; 3];
    for (j, (lam, v)) in vals.iter().zip(vecs.iter()).enumerate() {
        if *lam < -tol {
            return Err(Error::NotPsd);
        }
        let s = lam.max(0.0).sqrt();
        for i in 0..3 {
            l[i][j] = v[i] * c(s, 0.0);
        }
    }
    Ok(l)
}

/// One standard normal via Box-Muller.
fn gauss(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.random_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Circular complex Gaussian with unit expected power.
fn circular_gauss(rng: &mut impl Rng) -> C64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    c(gauss(rng) * s, gauss(rng) * s)
}

/// Generates the ground-truth image: speckled clutter (reciprocal by
/// construction) plus single-pixel diagonal targets. Deterministic given
/// the seed; rows use independent RNG substreams keyed by row index, so
/// the result does not depend on evaluation order.
pub fn generate_truth(cfg: &SceneConfig) -> Result<SlcImage> {
    cfg.validate()?;
    let factors: Vec<Mat3> = cfg
        .classes
        .iter()
        .map(|cl| cov_factor(&cl.pauli_cov))
        .collect::<Result<_>>()?;
    let mut img = SlcImage::zeros(cfg.width, cfg.height);
    for y in 0..cfg.height {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(y as u64);
        for x in 0..cfg.width {
            // last listed class containing the pixel wins
            let mut chosen = None;
            for (cl, l) in cfg.classes.iter().zip(factors.iter()) {
                let r = cl.region;
                if x >= r.x && x < r.x + r.width && y >= r.y && y < r.y + r.height {
                    chosen = Some(l);
                }
            }
            let Some(l) = chosen else { continue };
            let w = [
                circular_gauss(&mut rng),
                circular_gauss(&mut rng),
                circular_gauss(&mut rng),
            ];
            let mut k = [C64::new(0.0, 0.0); 4];
            for i in 0..3 {
                k[i] = l[i][0] * w[0] + l[i][1] * w[1] + l[i][2] * w[2];
            }
            img.set(x, y, pauli_inverse(PauliVector(k)).into());
        }
    }
    for t in &cfg.targets {
        img.set(t.position[0], t.position[1], ScatteringMatrix::diag(t.a, t.b));
    }
    img.stage = Stage::Raw;
    img.note(format!(
        "synthetic truth: {}x{}, {} classes, {} targets, seed {}",
        cfg.width,
        cfg.height,
        cfg.classes.len(),
        cfg.targets.len(),
        cfg.seed
    ));
    Ok(img)
}

/// Per-channel mean power with the brightest 0.1% of pixels excluded, so
/// point targets do not skew the noise calibration.
fn robust_channel_power(plane: &[C64]) -> f64 {
    let mut powers: Vec<f64> = plane.iter().map(|v| v.norm_sqr()).collect();
    powers.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let drop = powers.len().div_ceil(1000);
    let keep = &powers[..powers.len() - drop.min(powers.len().saturating_sub(1))];
    if keep.is_empty() {
        0.0
    } else {
        keep.iter().sum::<f64>() / keep.len() as f64
    }
}

/// Applies `S_obs = R S T + N` per pixel. Noise is i.i.d. circular
/// complex Gaussian per channel, scaled so each channel's mean clutter
/// power over its noise variance equals the linear SNR;
/// `snr_db = +infinity` means noise-free.
pub fn distort(img: &SlcImage, d: &DistortionPair, snr_db: f64, seed: u64) -> SlcImage {
    let mut out = img.clone();
    for i in 0..img.len() {
        let s = img.get_idx(i).to_mat2();
        let m = crate::math::mat2_mul(&crate::math::mat2_mul(&d.r, &s), &d.t);
        out.set_idx(i, ScatteringMatrix::from_mat2(&m));
    }
    if snr_db.is_finite() {
        let snr_lin = 10f64.powf(snr_db / 10.0);
        let sigma: [f64; 4] = [
            (robust_channel_power(&out.hh) / snr_lin).sqrt(),
            (robust_channel_power(&out.hv) / snr_lin).sqrt(),
            (robust_channel_power(&out.vh) / snr_lin).sqrt(),
            (robust_channel_power(&out.vv) / snr_lin).sqrt(),
        ];
        for y in 0..out.height {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6e6f697365);
            rng.set_stream(y as u64);
            for x in 0..out.width {
                let i = out.index(x, y);
                out.hh[i] += circular_gauss(&mut rng) * c(sigma[0], 0.0);
                out.hv[i] += circular_gauss(&mut rng) * c(sigma[1], 0.0);
                out.vh[i] += circular_gauss(&mut rng) * c(sigma[2], 0.0);
                out.vv[i] += circular_gauss(&mut rng) * c(sigma[3], 0.0);
            }
        }
    }
    out.stage = Stage::Raw;
    out.note(if snr_db.is_finite() {
        format!("distorted, snr {snr_db} dB, seed {seed}")
    } else {
        "distorted, noise-free".to_string()
    });
    out
}

/// Boxcar-filtered Pauli amplitude rasters for display.
#[derive(Debug, Clone)]
pub struct PauliAmplitudes {
    pub width: usize,
    pub height: usize,
    /// |k0|, |k1|, |k2|, |k3| after w x w mean-power smoothing.
    pub channels: [Vec<f64>; 4],
}

/// Mean power over a w x w window (clipped at the edges) per Pauli
/// channel, square-rooted to amplitude.
pub fn boxcar(img: &SlcImage, w: usize) -> Result<PauliAmplitudes> {
    if w % 2 == 0 || w == 0 {
        return Err(Error::EvenBoxcar(w));
    }
    let half = w / 2;
    let mut power = [
        vec![0.0; img.len()],
        vec![0.0; img.len()],
        vec![0.0; img.len()],
        vec![0.0; img.len()],
    ];
    for i in 0..img.len() {
        let k = img.pauli_idx(i);
        for ch in 0..4 {
            power[ch][i] = k.0[ch].norm_sqr();
        }
    }
    let mut channels = [
        vec![0.0; img.len()],
        vec![0.0; img.len()],
        vec![0.0; img.len()],
        vec![0.0; img.len()],
    ];
    for y in 0..img.height {
        let y0 = y.saturating_sub(half);
        let y1 = (y + half + 1).min(img.height);
        for x in 0..img.width {
            let x0 = x.saturating_sub(half);
            let x1 = (x + half + 1).min(img.width);
            let n = ((x1 - x0) * (y1 - y0)) as f64;
            for ch in 0..4 {
                let mut acc = 0.0;
                for yy in y0..y1 {
                    for xx in x0..x1 {
                        acc += power[ch][yy * img.width + xx];
                    }
                }
                channels[ch][img.index(x, y)] = (acc / n).sqrt();
            }
        }
    }
    Ok(PauliAmplitudes {
        width: img.width,
        height: img.height,
        channels,
    })
}

/// Ground-truth sidecar written next to simulated datasets
/// (`truth.json`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TruthArtifact {
    pub format_version: u32,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distortion: Option<DistortionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snr_db: Option<f64>,
    pub targets: Vec<PointTarget>,
}
