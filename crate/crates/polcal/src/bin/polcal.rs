//! File-based calibration pipeline:
//! simulate -> distort -> extract-cr -> remove-rx -> solve -> apply -> report.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use polcal::calibrate::{self, SignChoice, DEFAULT_MASK_PERCENTILE};
use polcal::cr::{CrArtifact, DEFAULT_PATCH};
use polcal::dataset::{read_dataset, read_json, write_dataset, write_json, Dtype};
use polcal::image::Rect;
use polcal::sim::{DistortionSpec, SceneConfig, TruthArtifact};

#[derive(Parser)]
#[command(name = "polcal", version, about = "Quad-pol radar calibration pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic truth dataset from a scene config.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Apply the distortion model (and optional noise) to a raw dataset.
    Distort {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        distortion: PathBuf,
        /// SNR in dB; omit for noise-free.
        #[arg(long)]
        snr_db: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Locate the corner reflector in a window and estimate its matrix.
    ExtractCr {
        #[arg(long = "in")]
        input: PathBuf,
        /// Search window as X,Y,W,H.
        #[arg(long)]
        window: String,
        #[arg(long, default_value_t = DEFAULT_PATCH)]
        patch: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Remove receiver distortion using a corner-reflector estimate.
    RemoveRx {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        cr: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve the calibration from reciprocity (and an optional target).
    Solve {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MASK_PERCENTILE)]
        mask_percentile: f64,
        /// Symmetric point target pixel as X,Y; enables full mode.
        #[arg(long)]
        target: Option<String>,
        /// Copolar square-root branch: + or -.
        #[arg(long, default_value = "+")]
        sign: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Apply a calibration solution to a receiver-removed dataset.
    Apply {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        cal: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render Pauli amplitude PNGs and metrics.json.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 3)]
        boxcar: usize,
    },
}

fn parse_rect(s: &str) -> Result<Rect, String> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse().map_err(|e| format!("bad window {s:?}: {e}")))
        .collect::<Result<_, _>>()?;
    if parts.len() != 4 {
        return Err(format!("window must be X,Y,W,H, got {s:?}"));
    }
    Ok(Rect::new(parts[0], parts[1], parts[2], parts[3]))
}

fn parse_xy(s: &str) -> Result<(usize, usize), String> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse().map_err(|e| format!("bad pixel {s:?}: {e}")))
        .collect::<Result<_, _>>()?;
    if parts.len() != 2 {
        return Err(format!("pixel must be X,Y, got {s:?}"));
    }
    Ok((parts[0], parts[1]))
}

fn run(cmd: Command) -> Result<(), Box<dyn std::error::Error>> {
    match cmd {
        Command::Simulate { config, out, seed } => {
            let mut cfg: SceneConfig = read_json(&config)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            let img = polcal::generate_truth(&cfg)?;
            write_dataset(&img, &out, Dtype::C128)?;
            let truth = TruthArtifact {
                format_version: 1,
                seed: cfg.seed,
                distortion: cfg.distortion.clone(),
                snr_db: cfg.snr_db,
                targets: cfg.targets.clone(),
            };
            write_json(&truth, &out.join("truth.json"))?;
            println!(
                "simulated {}x{} truth dataset at {}",
                img.width,
                img.height,
                out.display()
            );
        }
        Command::Distort {
            input,
            distortion,
            snr_db,
            seed,
            out,
        } => {
            let img = read_dataset(&input)?;
            if img.stage != polcal::Stage::Raw {
                return Err(polcal::Error::StageMismatch {
                    expected: "raw",
                    found: img.stage.name(),
                    missing: "a raw (truth) dataset",
                }
                .into());
            }
            let spec: DistortionSpec = read_json(&distortion)?;
            let pair = spec.materialize()?;
            let snr = snr_db.unwrap_or(f64::INFINITY);
            let distorted = polcal::distort(&img, &pair, snr, seed);
            write_dataset(&distorted, &out, Dtype::C128)?;
            println!("distorted dataset written to {}", out.display());
        }
        Command::ExtractCr {
            input,
            window,
            patch,
            out,
        } => {
            let img = read_dataset(&input)?;
            let rect = parse_rect(&window)?;
            let est = polcal::extract_cr(&img, rect, patch)?;
            write_json(&CrArtifact::from(&est), &out)?;
            println!(
                "corner reflector at ({}, {}), dominance {:.6}; wrote {}",
                est.peak.0,
                est.peak.1,
                est.dominance,
                out.display()
            );
        }
        Command::RemoveRx { input, cr, out } => {
            let img = read_dataset(&input)?;
            let artifact: CrArtifact = read_json(&cr)?;
            let est = artifact.to_estimate()?;
            let removed = polcal::remove_receiver(&img, &est)?;
            write_dataset(&removed, &out, Dtype::C128)?;
            println!("receiver-removed dataset written to {}", out.display());
        }
        Command::Solve {
            input,
            mask_percentile,
            target,
            sign,
            out,
        } => {
            let img = read_dataset(&input)?;
            let sign = match sign.as_str() {
                "+" => SignChoice::Plus,
                "-" => SignChoice::Minus,
                other => return Err(format!("sign must be + or -, got {other:?}").into()),
            };
            let recip = calibrate::reciprocity_solve(&img, mask_percentile)?;
            let xtalk = match target {
                Some(t) => {
                    let xy = parse_xy(&t)?;
                    Some(calibrate::crosstalk_from_target(&img, xy, 0.0)?)
                }
                None => None,
            };
            let sol = calibrate::assemble_solution(&recip, xtalk, sign)?;
            write_json(&calibrate::CalArtifact::from(&sol), &out)?;
            println!(
                "solved over {} pixels, residual rms {:.3e}; wrote {}",
                recip.n_pixels,
                recip.residual_rms,
                out.display()
            );
        }
        Command::Apply { input, cal, out } => {
            let img = read_dataset(&input)?;
            let artifact: calibrate::CalArtifact = read_json(&cal)?;
            let sol = artifact.to_solution()?;
            let calibrated = calibrate::apply_calibration(&img, &sol)?;
            write_dataset(&calibrated, &out, Dtype::C128)?;
            println!("calibrated dataset written to {}", out.display());
        }
        Command::Report { input, out, boxcar } => {
            let img = read_dataset(&input)?;
            let m = polcal::report::write_report(&img, &out, boxcar)?;
            println!(
                "report written to {}; k3/total = {:.2} dB",
                out.display(),
                m.k3_total_power_db
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
