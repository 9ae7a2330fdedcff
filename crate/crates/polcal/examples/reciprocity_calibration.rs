//! Recovers the copolar channel imbalance from clutter alone using the
//! reciprocity least squares.
//!
//! On receiver-removed data every reciprocal pixel satisfies
//! `a42n z1 + a43n z2 = -z3` in the Pauli basis. Solving that system over
//! the bright half of the image yields the observable
//! `epsilon = a43n = (1 - c^2)/(1 + c^2)`, from which the imbalance
//! `c = t22/t11` follows up to a sign.
//!
//! ```bash
//! cargo run --example reciprocity_calibration
//! ```

use polcal::math::{c, cr, Mat2};
use polcal::sim::SceneConfig;
use polcal::{
    apply_calibration, assemble_solution, copolar_imbalance, distort, extract_cr, generate_truth,
    reciprocity_solve, remove_receiver, DistortionPair, Rect, Result, SignChoice,
};

fn main() -> Result<()> {
    // Transmitter with a strong copolar imbalance and weak coupling.
    let t22 = c(1.35, 0.40);
    let t: Mat2 = [[cr(1.0), c(0.03, -0.05)], [c(0.04, 0.02), t22]];
    let r: Mat2 = [[c(1.05, -0.08), c(-0.04, 0.03)], [c(0.02, -0.06), c(0.92, 0.15)]];
    let pair = DistortionPair { r, t };

    let cfg = SceneConfig::default_scene(23);
    let truth = generate_truth(&cfg)?;
    let observed = distort(&truth, &pair, 35.0, 23);

    let est = extract_cr(&observed, Rect::new(0, 0, 128, 128), 5)?;
    let removed = remove_receiver(&observed, &est)?;

    // Pixels at or above the median total power contribute rows.
    let recip = reciprocity_solve(&removed, 50.0)?;
    println!(
        "reciprocity fit over {} pixels, residual rms {:.3e}",
        recip.n_pixels, recip.residual_rms
    );
    println!("a42n = {:.5}{:+.5}i  (system cross-talk observable)", recip.a42n.re, recip.a42n.im);
    println!("epsilon = {:.5}{:+.5}i", recip.epsilon.re, recip.epsilon.im);

    let c_est = copolar_imbalance(recip.epsilon, SignChoice::Plus)?;
    println!(
        "copolar imbalance: estimated {:.4}{:+.4}i, true {:.4}{:+.4}i",
        c_est.re, c_est.im, t22.re, t22.im
    );

    // Reciprocity-only calibration corrects the imbalance and restores
    // reciprocity (k3 -> 0) without any reference target.
    let sol = assemble_solution(&recip, None, SignChoice::Plus)?;
    let calibrated = apply_calibration(&removed, &sol)?;
    let before = removed.pauli_channel_powers();
    let after = calibrated.pauli_channel_powers();
    let db = |p: [f64; 4]| 10.0 * (p[3] / p.iter().sum::<f64>()).log10();
    println!(
        "k3 power ratio: {:.1} dB before, {:.1} dB after calibration",
        db(before),
        db(after)
    );
    Ok(())
}
