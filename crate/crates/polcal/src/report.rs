//! Human-inspection output: Pauli amplitude PNGs and a metrics JSON with
//! reciprocity residual and channel power figures.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::image::SlcImage;
use crate::sim::{boxcar, PauliAmplitudes};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PeakMetrics {
    pub position: [usize; 2],
    /// |k0|^2 .. |k3|^2 at the peak pixel (unfiltered).
    pub pauli_power: [f64; 4],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Metrics {
    pub format_version: u32,
    pub stage: String,
    pub width: usize,
    pub height: usize,
    /// Image-wide |k3|^2 power over total Pauli power.
    pub k3_total_power_ratio: f64,
    pub k3_total_power_db: f64,
    /// Summed |k|^2 per channel.
    pub channel_power: BTreeMap<String, f64>,
    /// Brightest pixel by total power.
    pub peak: PeakMetrics,
}

/// Computes the report metrics for an image at any pipeline stage.
pub fn metrics(img: &SlcImage) -> Metrics {
    let pauli = img.pauli_channel_powers();
    let total: f64 = pauli.iter().sum();
    let ratio = if total > 0.0 { pauli[3] / total } else { 0.0 };

    let mut channel_power = BTreeMap::new();
    for (name, v) in ["k0", "k1", "k2", "k3"].iter().zip(pauli.iter()) {
        channel_power.insert((*name).to_string(), *v);
    }
    for (name, plane) in ["hh", "hv", "vh", "vv"]
        .iter()
        .zip([&img.hh, &img.hv, &img.vh, &img.vv])
    {
        channel_power.insert(
            (*name).to_string(),
            plane.iter().map(|v| v.norm_sqr()).sum(),
        );
    }

    let mut best = 0.0;
    let mut peak_xy = (0usize, 0usize);
    for y in 0..img.height {
        for x in 0..img.width {
            let p = img.total_power(x, y);
            if p > best {
                best = p;
                peak_xy = (x, y);
            }
        }
    }
    let kp = img.pauli_at(peak_xy.0, peak_xy.1);
    Metrics {
        format_version: 1,
        stage: img.stage.name().to_string(),
        width: img.width,
        height: img.height,
        k3_total_power_ratio: ratio,
        k3_total_power_db: if ratio > 0.0 {
            10.0 * ratio.log10()
        } else {
            f64::NEG_INFINITY
        },
        channel_power,
        peak: PeakMetrics {
            position: [peak_xy.0, peak_xy.1],
            pauli_power: core::array::from_fn(|i| kp.0[i].norm_sqr()),
        },
    }
}

/// 8-bit quantization of an amplitude raster: linear clip at
/// mean + 2.5 standard deviations, fixed so images are comparable across
/// runs.
fn quantize(amp: &[f64]) -> Vec<u8> {
    let n = amp.len() as f64;
    let mean = amp.iter().sum::<f64>() / n;
    let var = amp.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let clip = mean + 2.5 * var.sqrt();
    if clip <= 0.0 {
        return vec![0; amp.len()];
    }
    amp.iter()
        .map(|v| ((v / clip).clamp(0.0, 1.0) * 255.0).round() as u8)
        .collect()
}

/// Writes `k0.png` .. `k3.png` grayscale amplitude images.
pub fn write_pauli_pngs(amps: &PauliAmplitudes, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for (i, amp) in amps.channels.iter().enumerate() {
        let bytes = quantize(amp);
        let buf = image::GrayImage::from_raw(amps.width as u32, amps.height as u32, bytes)
            .expect("buffer matches dimensions");
        buf.save(dir.join(format!("k{i}.png")))?;
    }
    Ok(())
}

/// Full report: boxcar-filtered Pauli PNGs plus `metrics.json`.
pub fn write_report(img: &SlcImage, dir: &Path, boxcar_w: usize) -> Result<Metrics> {
    let amps = boxcar(img, boxcar_w)?;
    write_pauli_pngs(&amps, dir)?;
    let m = metrics(img);
    crate::dataset::write_json(&m, &dir.join("metrics.json"))?;
    Ok(m)
}
