//! In-memory single-look complex image: four complex channel planes plus
//! a pipeline stage flag.

use serde::{Deserialize, Serialize};

use crate::math::C64;
use crate::pauli::{pauli_forward, PauliVector, ScatteringMatrix};

/// Pipeline stage of a dataset; stages only ever advance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Raw,
    ReceiverRemoved,
    Calibrated,
}

impl Stage {
    pub fn name(&self) -> &'static str {
        match self {
            Stage::Raw => "raw",
            Stage::ReceiverRemoved => "receiver-removed",
            Stage::Calibrated => "calibrated",
        }
    }
}

/// Axis-aligned pixel rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect {
    pub x: usize,
    pub y: usize,
    pub width: usize,
    pub height: usize,
}

impl Rect {
    pub fn new(x: usize, y: usize, width: usize, height: usize) -> Self {
        Self {
            x,
            y,
            width,
            height,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.width == 0 || self.height == 0
    }

    pub fn area(&self) -> usize {
        self.width * self.height
    }

    pub fn fits_in(&self, width: usize, height: usize) -> bool {
        self.x + self.width <= width && self.y + self.height <= height
    }

    /// A w x w window centered on (x, y), clipped to the image bounds.
    pub fn centered(x: usize, y: usize, w: usize, width: usize, height: usize) -> Self {
        let half = w / 2;
        let x0 = x.saturating_sub(half);
        let y0 = y.saturating_sub(half);
        let x1 = (x + half + 1).min(width);
        let y1 = (y + half + 1).min(height);
        Rect::new(x0, y0, x1 - x0, y1 - y0)
    }

    pub fn pixels(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let (x0, y0, w) = (self.x, self.y, self.width);
        (0..self.area()).map(move |i| (x0 + i % w, y0 + i / w))
    }
}

/// Quad-pol single-look complex raster.
#[derive(Debug, Clone)]
pub struct SlcImage {
    pub width: usize,
    pub height: usize,
    pub hh: Vec<C64>,
    pub hv: Vec<C64>,
    pub vh: Vec<C64>,
    pub vv: Vec<C64>,
    pub stage: Stage,
    pub provenance: Vec<String>,
}

impl SlcImage {
    pub fn zeros(width: usize, height: usize) -> Self {
        let n = width * height;
        let zero = C64::new(0.0, 0.0);
        Self {
            width,
            height,
            hh: vec![zero; n],
            hv: vec![zero; n],
            vh: vec![zero; n],
            vv: vec![zero; n],
            stage: Stage::Raw,
            provenance: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    pub fn get(&self, x: usize, y: usize) -> ScatteringMatrix {
        let i = self.index(x, y);
        ScatteringMatrix::new(self.hh[i], self.hv[i], self.vh[i], self.vv[i])
    }

    pub fn set(&mut self, x: usize, y: usize, s: ScatteringMatrix) {
        let i = self.index(x, y);
        self.hh[i] = s.hh;
        self.hv[i] = s.hv;
        self.vh[i] = s.vh;
        self.vv[i] = s.vv;
    }

    pub fn get_idx(&self, i: usize) -> ScatteringMatrix {
        ScatteringMatrix::new(self.hh[i], self.hv[i], self.vh[i], self.vv[i])
    }

    pub fn set_idx(&mut self, i: usize, s: ScatteringMatrix) {
        self.hh[i] = s.hh;
        self.hv[i] = s.hv;
        self.vh[i] = s.vh;
        self.vv[i] = s.vv;
    }

    pub fn pauli_at(&self, x: usize, y: usize) -> PauliVector {
        pauli_forward(self.get(x, y).into())
    }

    pub fn pauli_idx(&self, i: usize) -> PauliVector {
        pauli_forward(self.get_idx(i).into())
    }

    pub fn total_power(&self, x: usize, y: usize) -> f64 {
        self.get(x, y).total_power()
    }

    /// Mean per-pixel total power over all four channels.
    pub fn mean_power(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        let sum: f64 = (0..self.len()).map(|i| self.get_idx(i).total_power()).sum();
        sum / self.len() as f64
    }

    /// Sum over the image of |k_ch|^2 for each Pauli channel.
    pub fn pauli_channel_powers(&self) -> [f64; 4] {
        let mut acc = [0.0; 4];
        for i in 0..self.len() {
            let k = self.pauli_idx(i);
            for (a, v) in acc.iter_mut().zip(k.0.iter()) {
                *a += v.norm_sqr();
            }
        }
        acc
    }

    pub fn note(&mut self, msg: impl Into<String>) {
        self.provenance.push(msg.into());
    }
}
