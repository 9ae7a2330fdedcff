//! Estimates the receiver-transmitter product from a trihedral corner
//! reflector and removes the receiver distortion.
//!
//! A trihedral scatters as the identity matrix, so the observed pixel at
//! the reflector is the product R*T (up to a scalar). The dominant
//! eigenvector of the pixel covariance around the detected peak recovers
//! that product; left-multiplying every pixel by its inverse removes the
//! receiver completely.
//!
//! ```bash
//! cargo run --example corner_reflector
//! ```

use polcal::math::{c, cr, mat2_mul, mat2_scale, Mat2};
use polcal::sim::SceneConfig;
use polcal::{distort, extract_cr, generate_truth, remove_receiver, DistortionPair, Rect, Result};

fn main() -> Result<()> {
    // Receiver and transmitter with moderate gain imbalance and weak
    // cross-coupling.
    let r: Mat2 = [[c(0.95, 0.10), c(0.04, -0.02)], [c(-0.03, 0.05), c(1.10, -0.20)]];
    let t: Mat2 = [[cr(1.0), c(0.05, 0.03)], [c(-0.02, 0.04), c(1.20, 0.45)]];
    let pair = DistortionPair { r, t };

    let cfg = SceneConfig::default_scene(11);
    let truth = generate_truth(&cfg)?;
    let observed = distort(&truth, &pair, 35.0, 11);

    // Search the quadrant that contains the trihedral; average a 5x5
    // patch around the peak.
    let est = extract_cr(&observed, Rect::new(0, 0, 128, 128), 5)?;
    println!(
        "peak at ({}, {}), dominance {:.4}",
        est.peak.0, est.peak.1, est.dominance
    );

    // The estimate is normalized so its (1,1) entry is one; compare it
    // against the true product R*T under the same normalization.
    let rt = mat2_mul(&r, &t);
    let want = mat2_scale(&rt, cr(1.0) / rt[0][0]);
    println!("normalized R*T, estimated vs true:");
    let mut worst = 0.0f64;
    for i in 0..2 {
        for j in 0..2 {
            let err = (est.s_cr[i][j] - want[i][j]).norm();
            worst = worst.max(err);
            println!(
                "  ({i},{j}): {:.4}{:+.4}i  vs  {:.4}{:+.4}i  (|err| {err:.2e})",
                est.s_cr[i][j].re, est.s_cr[i][j].im, want[i][j].re, want[i][j].im
            );
        }
    }
    println!("worst entry error: {worst:.2e}");

    let removed = remove_receiver(&observed, &est)?;
    println!("stage after removal: {}", removed.stage.name());
    // At the reflector the remaining distortion is T^-1 * I * T = I, so
    // the pixel is back to a scaled identity: k1 and k2 are tiny.
    let k = removed.pauli_at(est.peak.0, est.peak.1);
    println!(
        "reflector pixel after removal: |k1|/|k0| = {:.2e}, |k2|/|k0| = {:.2e}",
        k.0[1].norm() / k.0[0].norm(),
        k.0[2].norm() / k.0[0].norm()
    );
    Ok(())
}
