//! Quad-pol radar polarimetric calibration in the Pauli basis.
//!
//! After a trihedral corner reflector removes the receiver distortion,
//! the remaining transmitter distortion acts as a similarity
//! transformation of the true scattering matrix. In the Pauli basis that
//! similarity becomes a sparse 4x4 operator: reciprocity alone recovers
//! the copolar channel imbalance by least squares, a single uncalibrated
//! symmetric point target recovers the cross-talk ratios, and Faraday
//! rotation separates cleanly from system cross-talk as an ordinary
//! rotation of the data.
//!
//! The crate ships a synthetic scene simulator so the whole pipeline is
//! verifiable end to end against known ground truth; see the `examples/`
//! directory for one runnable walk-through per capability, and the
//! `polcal` binary for the file-based pipeline.

pub mod calibrate;
pub mod cr;
pub mod dataset;
pub mod distortion;
pub mod error;
pub mod faraday;
pub mod image;
pub mod jsoncpx;
pub mod math;
pub mod pauli;
pub mod report;
pub mod sim;

pub use calibrate::{
    apply_calibration, assemble_solution, copolar_imbalance, crosstalk_from_target,
    reciprocity_solve, reciprocity_solve_masked, CalMode, CalibrationSolution,
    ReciprocitySolution, SignChoice,
};
pub use cr::{estimate_cr_matrix, extract_cr, find_peak, remove_receiver, CrEstimate};
pub use distortion::{
    build_pauli_distortion, invert_a, similarity_pauli_exact, x1_from, DistortionPair,
    PauliDistortion,
};
pub use error::{Error, Result};
pub use faraday::{effective_params, faraday_pauli, faraday_t, rotate_pauli, FaradayConfig};
pub use image::{Rect, SlcImage, Stage};
pub use math::{C64, Mat2, Mat4};
pub use pauli::{pauli_forward, pauli_inverse, LexVector, PauliVector, ScatteringMatrix};
pub use sim::{
    boxcar, distort, generate_truth, ClutterClass, DistortionSpec, PointTarget, SceneConfig,
    TargetKind,
};
