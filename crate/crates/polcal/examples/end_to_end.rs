//! Runs the whole file-based pipeline in one process: simulate, distort,
//! extract the corner reflector, remove the receiver, solve, apply, and
//! report — writing the same artifacts the `polcal` binary produces.
//!
//! Output goes to a `polcal-end-to-end` directory under the system temp
//! directory; each stage is a directory of binary channel planes with a
//! `meta.json` sidecar, and the report stage adds Pauli amplitude PNGs
//! plus a `metrics.json`.
//!
//! ```bash
//! cargo run --example end_to_end
//! ```

use polcal::dataset::{read_dataset, write_dataset, write_json, Dtype};
use polcal::math::{c, cr, Mat2};
use polcal::report::write_report;
use polcal::sim::SceneConfig;
use polcal::{
    apply_calibration, assemble_solution, crosstalk_from_target, distort, extract_cr,
    generate_truth, reciprocity_solve, remove_receiver, DistortionPair, Rect, Result, SignChoice,
};

fn main() -> Result<()> {
    let root = std::env::temp_dir().join("polcal-end-to-end");
    std::fs::create_dir_all(&root)?;

    // simulate + distort
    let cfg = SceneConfig::default_scene(99);
    let truth = generate_truth(&cfg)?;
    let t: Mat2 = [[cr(1.0), c(0.05, -0.02)], [c(0.03, 0.04), c(1.15, 0.50)]];
    let r: Mat2 = [[c(0.98, 0.06), c(-0.03, 0.04)], [c(0.05, -0.02), c(1.05, -0.10)]];
    let observed = distort(&truth, &DistortionPair { r, t }, 35.0, 99);
    write_dataset(&truth, &root.join("truth"), Dtype::C128)?;
    write_dataset(&observed, &root.join("raw"), Dtype::C128)?;

    // extract-cr + remove-rx, round-tripping through the files
    let raw = read_dataset(&root.join("raw"))?;
    let est = extract_cr(&raw, Rect::new(0, 0, 128, 128), 5)?;
    write_json(&polcal::cr::CrArtifact::from(&est), &root.join("cr.json"))?;
    let removed = remove_receiver(&raw, &est)?;
    write_dataset(&removed, &root.join("removed"), Dtype::C128)?;

    // solve + apply
    let recip = reciprocity_solve(&removed, 50.0)?;
    let xtalk = crosstalk_from_target(&removed, (208, 48), 0.0)?;
    let sol = assemble_solution(&recip, Some(xtalk), SignChoice::Plus)?;
    write_json(&polcal::calibrate::CalArtifact::from(&sol), &root.join("cal.json"))?;
    let calibrated = apply_calibration(&removed, &sol)?;
    write_dataset(&calibrated, &root.join("calibrated"), Dtype::C128)?;

    // report on the raw and calibrated stages
    let before = write_report(&raw, &root.join("report-raw"), 3)?;
    let after = write_report(&calibrated, &root.join("report-calibrated"), 3)?;
    println!(
        "k3 power ratio: {:.1} dB raw -> {:.1} dB calibrated",
        before.k3_total_power_db, after.k3_total_power_db
    );
    println!("artifacts under {}", root.display());
    for entry in ["truth", "raw", "cr.json", "removed", "cal.json", "calibrated", "report-raw", "report-calibrated"] {
        println!("  {entry}");
    }
    Ok(())
}
