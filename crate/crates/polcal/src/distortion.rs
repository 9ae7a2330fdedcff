//! Transmitter/receiver distortion model and its Pauli-basis form.
//!
//! A transmitter distortion acts on the true scattering matrix as a
//! similarity transformation `S_obs = T^-1 S T` once the receiver has been
//! removed with a corner-reflector measurement. In the Pauli basis and
//! under weak coupling this reduces to the sparse 4x4 matrix built here,
//! whose closed-form inverse is the calibration operator.

use crate::error::{Error, Result};
use crate::math::{cr, kron2, mat2_frob, mat2_inv, mat2_transpose, C64, Mat2, Mat4};
use crate::pauli::pauli_matrix;

/// The receiver/transmitter matrix pair of the distortion model
/// `S_obs = R S T + N`.
#[derive(Debug, Clone, Copy)]
pub struct DistortionPair {
    pub r: Mat2,
    pub t: Mat2,
}

impl DistortionPair {
    pub fn identity() -> Self {
        Self {
            r: crate::math::mat2_identity(),
            t: crate::math::mat2_identity(),
        }
    }

    pub fn invertible(&self) -> bool {
        mat2_inv(&self.r).is_some() && mat2_inv(&self.t).is_some()
    }

    /// Largest transmitter cross-coupling ratio, max(|t12/t11|, |t21/t22|).
    pub fn coupling_ratio(&self) -> f64 {
        let t = &self.t;
        let r1 = if t[0][0].norm() > 0.0 {
            t[0][1].norm() / t[0][0].norm()
        } else {
            f64::INFINITY
        };
        let r2 = if t[1][1].norm() > 0.0 {
            t[1][0].norm() / t[1][1].norm()
        } else {
            f64::INFINITY
        };
        r1.max(r2)
    }

    /// Whether the sparse Pauli form can be trusted for this transmitter.
    pub fn weak_coupling(&self, delta_max: f64) -> bool {
        self.coupling_ratio() <= delta_max
    }
}

/// Default coupling bound for trusting the sparse form (about -20 dB).
pub const DEFAULT_DELTA_MAX: f64 = 0.1;

/// Transmitter distortion expressed in the Pauli basis: copolar terms
/// `m`, `c` and cross ratios `x1..x3`, plus the materialized sparse
/// matrix `a`.
#[derive(Debug, Clone, Copy)]
pub struct PauliDistortion {
    pub m: C64,
    pub c: C64,
    pub c1: C64,
    pub c2: C64,
    pub x1: C64,
    pub x2: C64,
    pub x3: C64,
    pub a: Mat4,
}

/// Exact Pauli-basis similarity operator `A_P = U_P (T^-1 (x) T^T) U_P^-1`
/// for `S_obs = T^-1 S T`. Used as the oracle against the sparse form;
/// full inversion of this matrix is only needed for bistatic problems and
/// is not a calibration path here.
pub fn similarity_pauli_exact(t: &Mat2) -> Result<Mat4> {
    let t_inv = mat2_inv(t).ok_or(Error::SingularDistortion)?;
    let k = kron2(&t_inv, &mat2_transpose(t));
    let up = pauli_matrix();
    // U_P * K * U_P^T, with U_P real orthogonal
    let mut out = [[C64::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut acc = C64::new(0.0, 0.0);
            for (p, krow) in k.iter().enumerate() {
                if up[i][p] == 0.0 {
                    continue;
                }
                for q in 0..4 {
                    acc += krow[q] * cr(up[i][p] * up[j][q]);
                }
            }
            out[i][j] = acc;
        }
    }
    Ok(out)
}

/// Builds the sparse Pauli distortion from a transmitter matrix:
/// `m = t11 t22 / (t11 t22 - t12 t21)`, `c = t22/t11`,
/// `C1 = (c + 1/c)/2`, `C2 = (c - 1/c)/2`,
/// `x1 = t21/t11 - t12/t22`, `x2 = t12/t11 - t21/t22`,
/// `x3 = t12/t11 + t21/t22`.
pub fn build_pauli_distortion(t: &Mat2) -> Result<PauliDistortion> {
    let t11 = t[0][0];
    let t12 = t[0][1];
    let t21 = t[1][0];
    let t22 = t[1][1];
    let scale = mat2_frob(t);
    if t11.norm() <= 1e-14 * scale || t22.norm() <= 1e-14 * scale {
        return Err(Error::CopolarGainZero);
    }
    let det = t11 * t22 - t12 * t21;
    if det.norm() <= 1e-14 * scale * scale {
        return Err(Error::SingularDistortion);
    }
    let m = t11 * t22 / det;
    let c = t22 / t11;
    let c1 = (c + cr(1.0) / c) * cr(0.5);
    let c2 = (c - cr(1.0) / c) * cr(0.5);
    let x1 = t21 / t11 - t12 / t22;
    let x2 = t12 / t11 - t21 / t22;
    let x3 = t12 / t11 + t21 / t22;
    let z = C64::new(0.0, 0.0);
    let a = [
        [m, z, z, z],
        [z, m, m * x1, z],
        [z, m * x2, m * c1, z],
        [z, m * x3, m * c2, m],
    ];
    Ok(PauliDistortion {
        m,
        c,
        c1,
        c2,
        x1,
        x2,
        x3,
        a,
    })
}

/// Closed form `x1 = (x3 (c^2 - 1) - x2 (c^2 + 1)) / (2c)`.
pub fn x1_from(x2: C64, x3: C64, c: C64) -> Result<C64> {
    if c.norm() <= 1e-300 {
        return Err(Error::CopolarGainZero);
    }
    let c2 = c * c;
    Ok((x3 * (c2 - cr(1.0)) - x2 * (c2 + cr(1.0))) / (cr(2.0) * c))
}

/// Exact inverse of the sparse Pauli distortion matrix:
/// `a42 = x2 C2 - C1 x3`, `a43 = x1 x3 - C2`, scaled by
/// `1 / (m (C1 - x1 x2))`.
pub fn invert_a(p: &PauliDistortion) -> Result<Mat4> {
    let d = p.c1 - p.x1 * p.x2;
    if d.norm() <= 1e-9 {
        return Err(Error::DegenerateCalibration);
    }
    if p.m.norm() <= 1e-300 {
        return Err(Error::DegenerateCalibration);
    }
    let a42 = p.x2 * p.c2 - p.c1 * p.x3;
    let a43 = p.x1 * p.x3 - p.c2;
    let s = cr(1.0) / (p.m * d);
    let z = C64::new(0.0, 0.0);
    Ok([
        [s * d, z, z, z],
        [z, s * p.c1, s * -p.x1, z],
        [z, s * -p.x2, s * cr(1.0), z],
        [z, s * a42, s * a43, s * d],
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{c, mat4_frob, mat4_identity, mat4_mul, mat4_sub, mat4_vec};
    use crate::pauli::{pauli_forward, LexVector};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn rand_c64(rng: &mut impl Rng) -> C64 {
        c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    }

    fn rand_mat2(rng: &mut impl Rng) -> Mat2 {
        [
            [rand_c64(rng), rand_c64(rng)],
            [rand_c64(rng), rand_c64(rng)],
        ]
    }

    /// Transmitter with unit t11, random copolar imbalance, and cross
    /// ratios of the given magnitude.
    fn weak_t(rng: &mut impl Rng, delta: f64) -> Mat2 {
        let c22 = c(
            rng.random_range(0.5..1.5),
            rng.random_range(-0.8..0.8),
        );
        let phi12: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let phi21: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let t12 = c(phi12.cos(), phi12.sin()) * cr(delta);
        let t21 = c(phi21.cos(), phi21.sin()) * cr(delta) * c22;
        [[cr(1.0), t12], [t21, c22]]
    }

    #[test]
    fn exact_similarity_identity() {
        let a = similarity_pauli_exact(&crate::math::mat2_identity()).unwrap();
        let err = mat4_frob(&mat4_sub(&a, &mat4_identity()));
        assert!(err < 1e-14);
    }

    #[test]
    fn exact_similarity_singular_t() {
        let t = [[cr(1.0), cr(1.0)], [cr(1.0), cr(1.0)]];
        assert!(matches!(
            similarity_pauli_exact(&t),
            Err(Error::SingularDistortion)
        ));
    }

    #[test]
    fn kron_convention_matches_vectorization() {
        // vec(T^-1 S T) == (T^-1 (x) T^T) vec(S), row-major
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..1000 {
            let s = rand_mat2(&mut rng);
            let t = rand_mat2(&mut rng);
            let Some(t_inv) = mat2_inv(&t) else { continue };
            let direct = crate::math::mat2_mul(&crate::math::mat2_mul(&t_inv, &s), &t);
            let k = kron2(&t_inv, &mat2_transpose(&t));
            let vec_s = [s[0][0], s[0][1], s[1][0], s[1][1]];
            let via_kron = mat4_vec(&k, &vec_s);
            let direct_vec = [direct[0][0], direct[0][1], direct[1][0], direct[1][1]];
            let t_inv_frob = mat2_frob(&t_inv);
            let tol = 1e-10 * mat2_frob(&s) * mat2_frob(&t) * t_inv_frob;
            for i in 0..4 {
                assert!((via_kron[i] - direct_vec[i]).norm() <= tol.max(1e-14));
            }
        }
    }

    #[test]
    fn exact_similarity_diagonal_t_on_reciprocal() {
        // diagonal T: k0, k1 unchanged; k2 -> C1 k2; k3 -> C2 k2
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let t11 = rand_c64(&mut rng) + cr(2.0);
            let t22 = rand_c64(&mut rng) + cr(2.0);
            let t = [[t11, c(0.0, 0.0)], [c(0.0, 0.0), t22]];
            let p = build_pauli_distortion(&t).unwrap();
            let a = similarity_pauli_exact(&t).unwrap();
            let hh = rand_c64(&mut rng);
            let hv = rand_c64(&mut rng);
            let vv = rand_c64(&mut rng);
            let k = pauli_forward(LexVector([hh, hv, hv, vv]));
            let out = mat4_vec(&a, &k.0);
            assert!((out[0] - k.0[0]).norm() < 1e-12);
            assert!((out[1] - k.0[1]).norm() < 1e-12);
            assert!((out[2] - p.c1 * k.0[2]).norm() < 1e-12);
            assert!((out[3] - p.c2 * k.0[2]).norm() < 1e-12);
        }
    }

    #[test]
    fn exact_similarity_rotation() {
        // rotation T: exact 2-theta block rotation of (k1, k2), k0 and k3 fixed
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let th: f64 = rng.random_range(-1.0..1.0);
            let (s, co) = th.sin_cos();
            let t = [[cr(co), cr(-s)], [cr(s), cr(co)]];
            let a = similarity_pauli_exact(&t).unwrap();
            let hh = rand_c64(&mut rng);
            let hv = rand_c64(&mut rng);
            let vv = rand_c64(&mut rng);
            let k = pauli_forward(LexVector([hh, hv, hv, vv]));
            let out = mat4_vec(&a, &k.0);
            let (s2, c2) = (2.0 * th).sin_cos();
            // conjugation by R(theta) rotates (k1, k2) by -2*theta
            let want1 = k.0[1] * cr(c2) + k.0[2] * cr(s2);
            let want2 = k.0[1] * cr(-s2) + k.0[2] * cr(c2);
            assert!((out[0] - k.0[0]).norm() < 1e-12);
            assert!((out[1] - want1).norm() < 1e-12);
            assert!((out[2] - want2).norm() < 1e-12);
            assert!(out[3].norm() < 1e-12);
        }
    }

    #[test]
    fn build_identity() {
        let p = build_pauli_distortion(&crate::math::mat2_identity()).unwrap();
        assert!((p.m - cr(1.0)).norm() < 1e-15);
        assert!((p.c - cr(1.0)).norm() < 1e-15);
        assert!((p.c1 - cr(1.0)).norm() < 1e-15);
        assert!(p.c2.norm() < 1e-15);
        assert!(p.x1.norm() < 1e-15);
        assert!(p.x2.norm() < 1e-15);
        assert!(p.x3.norm() < 1e-15);
        let err = mat4_frob(&mat4_sub(&p.a, &mat4_identity()));
        assert!(err < 1e-14);
    }

    /// The published worked-example transmitter matrix.
    pub(crate) fn example_t() -> Mat2 {
        [
            [cr(0.9986), c(-0.0589, -0.034)],
            [cr(0.0523), c(1.1243, 0.6491)],
        ]
    }

    #[test]
    fn build_example_t_copolar_terms() {
        // oracle: direct arithmetic on the printed entries
        let t = example_t();
        let p = build_pauli_distortion(&t).unwrap();
        let c_direct = t[1][1] / t[0][0];
        assert!((p.c - c_direct).norm() < 1e-15);
        let one_over_c = cr(1.0) / c_direct;
        let c1_direct = (c_direct + one_over_c) * cr(0.5);
        let c2_direct = (c_direct - one_over_c) * cr(0.5);
        assert!((p.c1 - c1_direct).norm() < 1e-15);
        assert!((p.c2 - c2_direct).norm() < 1e-15);
        // recomputed reference values
        assert!((p.c1 - c(0.89602, 0.13271)).norm() < 1e-4);
        assert!((p.c2 - c(0.22986, 0.51730)).norm() < 1e-4);
    }

    #[test]
    fn build_zero_copolar_gain() {
        let t = [[c(0.0, 0.0), cr(1.0)], [cr(1.0), cr(1.0)]];
        assert!(matches!(
            build_pauli_distortion(&t),
            Err(Error::CopolarGainZero)
        ));
    }

    #[test]
    fn sparse_matches_exact_to_second_order() {
        // oracle: similarity_pauli_exact; agreement on columns 0-2 should
        // be second order in the cross ratios
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let delta = 0.05;
            let t = weak_t(&mut rng, delta);
            let p = build_pauli_distortion(&t).unwrap();
            let exact = similarity_pauli_exact(&t).unwrap();
            let mut max_err: f64 = 0.0;
            for i in 0..4 {
                for j in 0..3 {
                    max_err = max_err.max((p.a[i][j] - exact[i][j]).norm());
                }
            }
            assert!(
                max_err < 20.0 * delta * delta,
                "first-order mismatch: {max_err}"
            );
        }
    }

    #[test]
    fn invert_a_identity() {
        let p = build_pauli_distortion(&crate::math::mat2_identity()).unwrap();
        let inv = invert_a(&p).unwrap();
        assert!(mat4_frob(&mat4_sub(&inv, &mat4_identity())) < 1e-14);
    }

    #[test]
    fn invert_a_is_exact_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..200 {
            let delta = rng.random_range(0.0..0.3);
            let t = weak_t(&mut rng, delta);
            let p = build_pauli_distortion(&t).unwrap();
            let inv = invert_a(&p).unwrap();
            let prod = mat4_mul(&inv, &p.a);
            let err = mat4_frob(&mat4_sub(&prod, &mat4_identity()));
            assert!(err < 1e-12, "inverse error {err}");
        }
    }

    #[test]
    fn invert_a_zero_crosstalk_special_case() {
        // x = 0, m = 1: inverse = diag(1, 1, 1/C1, 1) with (4,3) = -C2/C1
        let t = [[cr(1.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.3, 0.4)]];
        let p = build_pauli_distortion(&t).unwrap();
        let inv = invert_a(&p).unwrap();
        let one_over_c1 = cr(1.0) / p.c1;
        assert!((inv[0][0] - cr(1.0)).norm() < 1e-14);
        assert!((inv[1][1] - cr(1.0)).norm() < 1e-14);
        assert!((inv[2][2] - one_over_c1).norm() < 1e-14);
        assert!((inv[3][3] - cr(1.0)).norm() < 1e-14);
        assert!((inv[3][2] + p.c2 / p.c1).norm() < 1e-14);
        assert!((inv[3][1]).norm() < 1e-14);
    }

    #[test]
    fn c1_c2_hyperbolic_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..200 {
            let delta = rng.random_range(0.0..0.3);
            let t = weak_t(&mut rng, delta);
            let p = build_pauli_distortion(&t).unwrap();
            let id = p.c1 * p.c1 - p.c2 * p.c2;
            assert!((id - cr(1.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn x1_closed_form_matches_ratios() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..200 {
            let delta = rng.random_range(0.0..0.3);
            let t = weak_t(&mut rng, delta);
            let p = build_pauli_distortion(&t).unwrap();
            let x1 = x1_from(p.x2, p.x3, p.c).unwrap();
            assert!((x1 - p.x1).norm() < 1e-12);
        }
    }

    #[test]
    fn x1_trivial_cases() {
        let z = c(0.0, 0.0);
        assert!(x1_from(z, z, cr(2.0)).unwrap().norm() < 1e-15);
        // c = 1: x1 = -x2
        let x2 = c(0.1, -0.2);
        let x3 = c(0.05, 0.3);
        let x1 = x1_from(x2, x3, cr(1.0)).unwrap();
        assert!((x1 + x2).norm() < 1e-15);
        assert!(x1_from(x2, x3, z).is_err());
    }
}
