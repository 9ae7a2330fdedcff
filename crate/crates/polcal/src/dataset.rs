//! On-disk dataset format: a directory with `meta.json` plus four raw
//! little-endian binary planes (`hh.bin`, `hv.bin`, `vh.bin`, `vv.bin`),
//! row-major interleaved (re, im) pairs.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{SlcImage, Stage};
use crate::math::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dtype {
    #[serde(rename = "c64")]
    C64,
    #[serde(rename = "c128")]
    C128,
}

impl Dtype {
    pub fn element_size(&self) -> u64 {
        match self {
            Dtype::C64 => 8,
            Dtype::C128 => 16,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub format_version: u32,
    pub width: usize,
    pub height: usize,
    pub dtype: Dtype,
    pub byte_order: String,
    pub stage: Stage,
    #[serde(default)]
    pub provenance: Vec<String>,
}

const PLANES: [&str; 4] = ["hh.bin", "hv.bin", "vh.bin", "vv.bin"];

fn write_plane(path: &Path, data: &[C64], dtype: Dtype) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    match dtype {
        Dtype::C64 => {
            for v in data {
                w.write_f32::<LittleEndian>(v.re as f32)?;
                w.write_f32::<LittleEndian>(v.im as f32)?;
            }
        }
        Dtype::C128 => {
            for v in data {
                w.write_f64::<LittleEndian>(v.re)?;
                w.write_f64::<LittleEndian>(v.im)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn read_plane(path: &Path, n: usize, dtype: Dtype, name: &'static str) -> Result<Vec<C64>> {
    let file = File::open(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::MissingPlane(name)
        } else {
            Error::Io(e)
        }
    })?;
    let expected = n as u64 * dtype.element_size();
    let found = file.metadata()?.len();
    if found != expected {
        return Err(Error::PlaneSizeMismatch {
            plane: name,
            expected,
            found,
        });
    }
    let mut r = BufReader::new(file);
    let mut out = Vec::with_capacity(n);
    match dtype {
        Dtype::C64 => {
            for _ in 0..n {
                let re = r.read_f32::<LittleEndian>()?;
                let im = r.read_f32::<LittleEndian>()?;
                out.push(C64::new(re as f64, im as f64));
            }
        }
        Dtype::C128 => {
            for _ in 0..n {
                let re = r.read_f64::<LittleEndian>()?;
                let im = r.read_f64::<LittleEndian>()?;
                out.push(C64::new(re, im));
            }
        }
    }
    // ensure nothing trails (size already checked, but be strict)
    let mut probe = [0u8; 1];
    if r.read(&mut probe)? != 0 {
        return Err(Error::PlaneSizeMismatch {
            plane: name,
            expected,
            found: expected + 1,
        });
    }
    Ok(out)
}

/// Writes an image as a dataset directory; creates the directory if
/// needed.
pub fn write_dataset(img: &SlcImage, dir: &Path, dtype: Dtype) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let meta = DatasetMeta {
        format_version: 1,
        width: img.width,
        height: img.height,
        dtype,
        byte_order: "little-endian".into(),
        stage: img.stage,
        provenance: img.provenance.clone(),
    };
    let f = File::create(dir.join("meta.json"))?;
    serde_json::to_writer_pretty(BufWriter::new(f), &meta)?;
    for (name, plane) in PLANES.iter().zip([&img.hh, &img.hv, &img.vh, &img.vv]) {
        write_plane(&dir.join(name), plane, dtype)?;
    }
    Ok(())
}

/// Reads a dataset directory back into memory.
pub fn read_dataset(dir: &Path) -> Result<SlcImage> {
    let meta_file = File::open(dir.join("meta.json"))?;
    let meta: DatasetMeta = serde_json::from_reader(BufReader::new(meta_file))?;
    if meta.format_version != 1 {
        return Err(Error::UnsupportedFormatVersion(meta.format_version));
    }
    if meta.byte_order != "little-endian" {
        return Err(Error::UnknownDtype(meta.byte_order));
    }
    let n = meta.width * meta.height;
    let hh = read_plane(&dir.join(PLANES[0]), n, meta.dtype, PLANES[0])?;
    let hv = read_plane(&dir.join(PLANES[1]), n, meta.dtype, PLANES[1])?;
    let vh = read_plane(&dir.join(PLANES[2]), n, meta.dtype, PLANES[2])?;
    let vv = read_plane(&dir.join(PLANES[3]), n, meta.dtype, PLANES[3])?;
    Ok(SlcImage {
        width: meta.width,
        height: meta.height,
        hh,
        hv,
        vh,
        vv,
        stage: meta.stage,
        provenance: meta.provenance,
    })
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let f = File::create(path)?;
    serde_json::to_writer_pretty(BufWriter::new(f), value)?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let f = File::open(path)?;
    Ok(serde_json::from_reader(BufReader::new(f))?)
}
