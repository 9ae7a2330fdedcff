//! Recovers the cross-talk ratios from one uncalibrated symmetric point
//! target and assembles the full calibration.
//!
//! Any diagonal target with unequal diagonal entries (a dihedral is the
//! convenient case) has a pure k1 cross-polar signature, so on
//! receiver-removed data the ratios `x2 = z2/z1` and `x3 = z3/z1` at the
//! target pixel read off the transmitter cross-talk directly; no
//! knowledge of the target amplitude or phase is needed.
//!
//! ```bash
//! cargo run --example crosstalk_target
//! ```

use polcal::math::{c, cr, Mat2};
use polcal::sim::SceneConfig;
use polcal::{
    apply_calibration, assemble_solution, build_pauli_distortion, crosstalk_from_target, distort,
    extract_cr, generate_truth, reciprocity_solve, remove_receiver, DistortionPair, Rect, Result,
    SignChoice,
};

fn main() -> Result<()> {
    let t: Mat2 = [[cr(1.0), c(0.06, -0.03)], [c(-0.04, 0.05), c(0.85, 0.35)]];
    let r: Mat2 = [[c(1.02, 0.05), c(0.03, 0.02)], [c(-0.05, 0.01), c(1.08, -0.12)]];
    let pair = DistortionPair { r, t };
    let truth_params = build_pauli_distortion(&t)?;

    let cfg = SceneConfig::default_scene(42); // dihedral at (208, 48)
    let truth = generate_truth(&cfg)?;
    let observed = distort(&truth, &pair, 35.0, 42);

    let est = extract_cr(&observed, Rect::new(0, 0, 128, 128), 5)?;
    let removed = remove_receiver(&observed, &est)?;

    let (x2, x3) = crosstalk_from_target(&removed, (208, 48), 0.0)?;
    println!("cross ratios from the dihedral pixel:");
    println!(
        "  x2: estimated {:.4}{:+.4}i, true {:.4}{:+.4}i",
        x2.re, x2.im, truth_params.x2.re, truth_params.x2.im
    );
    println!(
        "  x3: estimated {:.4}{:+.4}i, true {:.4}{:+.4}i",
        x3.re, x3.im, truth_params.x3.re, truth_params.x3.im
    );

    let recip = reciprocity_solve(&removed, 50.0)?;
    let sol = assemble_solution(&recip, Some((x2, x3)), SignChoice::Plus)?;
    println!(
        "  x1: closed form {:.4}{:+.4}i, true {:.4}{:+.4}i",
        sol.x1.re, sol.x1.im, truth_params.x1.re, truth_params.x1.im
    );

    let calibrated = apply_calibration(&removed, &sol)?;
    let before = removed.pauli_channel_powers();
    let after = calibrated.pauli_channel_powers();
    let db = |p: [f64; 4]| 10.0 * (p[3] / p.iter().sum::<f64>()).log10();
    println!(
        "k3 power ratio: {:.1} dB before, {:.1} dB after full calibration",
        db(before),
        db(after)
    );
    Ok(())
}
