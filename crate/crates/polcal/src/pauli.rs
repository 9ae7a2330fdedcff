//! Scattering-matrix vector forms and the Pauli change of basis.

use crate::math::{c, cr, C64, CVec4, Mat2};

/// Per-pixel 2x2 complex scattering matrix (linear units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringMatrix {
    pub hh: C64,
    pub hv: C64,
    pub vh: C64,
    pub vv: C64,
}

impl ScatteringMatrix {
    pub fn new(hh: C64, hv: C64, vh: C64, vv: C64) -> Self {
        Self { hh, hv, vh, vv }
    }

    pub fn zero() -> Self {
        Self::new(c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0))
    }

    pub fn identity() -> Self {
        Self::new(cr(1.0), c(0.0, 0.0), c(0.0, 0.0), cr(1.0))
    }

    pub fn diag(a: C64, b: C64) -> Self {
        Self::new(a, c(0.0, 0.0), c(0.0, 0.0), b)
    }

    pub fn from_mat2(m: &Mat2) -> Self {
        Self::new(m[0][0], m[0][1], m[1][0], m[1][1])
    }

    pub fn to_mat2(&self) -> Mat2 {
        [[self.hh, self.hv], [self.vh, self.vv]]
    }

    pub fn is_reciprocal(&self, tol: f64) -> bool {
        (self.hv - self.vh).norm() <= tol
    }

    pub fn total_power(&self) -> f64 {
        self.hh.norm_sqr() + self.hv.norm_sqr() + self.vh.norm_sqr() + self.vv.norm_sqr()
    }
}

/// Row-major flattening of a scattering matrix: `[hh, hv, vh, vv]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LexVector(pub CVec4);

impl LexVector {
    pub fn norm(&self) -> f64 {
        crate::math::vec4_norm(&self.0)
    }
}

impl From<ScatteringMatrix> for LexVector {
    fn from(s: ScatteringMatrix) -> Self {
        LexVector([s.hh, s.hv, s.vh, s.vv])
    }
}

impl From<LexVector> for ScatteringMatrix {
    fn from(v: LexVector) -> Self {
        ScatteringMatrix::new(v.0[0], v.0[1], v.0[2], v.0[3])
    }
}

/// Pauli scattering vector: `[(hh+vv), (hh-vv), (hv+vh), (hv-vh)] / sqrt(2)`.
/// For reciprocal scatterers the last component vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliVector(pub CVec4);

impl PauliVector {
    pub fn norm(&self) -> f64 {
        crate::math::vec4_norm(&self.0)
    }
}

pub const SQRT2: f64 = std::f64::consts::SQRT_2;
const INV_SQRT2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// The Pauli change-of-basis matrix U_P (real orthogonal).
pub fn pauli_matrix() -> [[f64; 4]; 4] {
    let h = INV_SQRT2;
    [
        [h, 0.0, 0.0, h],
        [h, 0.0, 0.0, -h],
        [0.0, h, h, 0.0],
        [0.0, h, -h, 0.0],
    ]
}

/// k = U_P s.
pub fn pauli_forward(s: LexVector) -> PauliVector {
    let [hh, hv, vh, vv] = s.0;
    PauliVector([
        (hh + vv) * INV_SQRT2,
        (hh - vv) * INV_SQRT2,
        (hv + vh) * INV_SQRT2,
        (hv - vh) * INV_SQRT2,
    ])
}

/// s = U_P^{-1} k (U_P is orthogonal, so the inverse is the transpose).
pub fn pauli_inverse(k: PauliVector) -> LexVector {
    let [k0, k1, k2, k3] = k.0;
    LexVector([
        (k0 + k1) * INV_SQRT2,
        (k2 + k3) * INV_SQRT2,
        (k2 - k3) * INV_SQRT2,
        (k0 - k1) * INV_SQRT2,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn rand_lex(rng: &mut impl Rng) -> LexVector {
        LexVector(core::array::from_fn(|_| {
            c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        }))
    }

    #[test]
    fn trihedral_maps_to_k0() {
        let k = pauli_forward(LexVector([cr(1.0), cr(0.0), cr(0.0), cr(1.0)]));
        assert!((k.0[0] - cr(SQRT2)).norm() < 1e-15);
        for i in 1..4 {
            assert_eq!(k.0[i], cr(0.0));
        }
    }

    #[test]
    fn dihedral_maps_to_k1() {
        let k = pauli_forward(LexVector([cr(1.0), cr(0.0), cr(0.0), cr(-1.0)]));
        assert!((k.0[1] - cr(SQRT2)).norm() < 1e-15);
        assert_eq!(k.0[0], cr(0.0));
        assert_eq!(k.0[2], cr(0.0));
        assert_eq!(k.0[3], cr(0.0));
    }

    #[test]
    fn inverse_trivial_cases() {
        let s = pauli_inverse(PauliVector([cr(SQRT2), cr(0.0), cr(0.0), cr(0.0)]));
        for (got, want) in s.0.iter().zip([1.0, 0.0, 0.0, 1.0]) {
            assert!((got - cr(want)).norm() < 1e-15);
        }
        let s = pauli_inverse(PauliVector([cr(0.0), cr(0.0), cr(SQRT2), cr(0.0)]));
        for (got, want) in s.0.iter().zip([0.0, 1.0, 1.0, 0.0]) {
            assert!((got - cr(want)).norm() < 1e-15);
        }
    }

    #[test]
    fn forward_matches_matrix_product() {
        // oracle: direct evaluation of the printed U_P
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let up = pauli_matrix();
        for _ in 0..100 {
            let s = rand_lex(&mut rng);
            let k = pauli_forward(s);
            for i in 0..4 {
                let mut acc = c(0.0, 0.0);
                for j in 0..4 {
                    acc += s.0[j] * up[i][j];
                }
                assert!((k.0[i] - acc).norm() < 1e-15);
            }
            assert!((k.norm() - s.norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn round_trip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut max_err: f64 = 0.0;
        for _ in 0..1000 {
            let s = rand_lex(&mut rng);
            let back = pauli_inverse(pauli_forward(s));
            for i in 0..4 {
                max_err = max_err.max((back.0[i] - s.0[i]).norm());
            }
        }
        assert!(max_err < 1e-12, "max round-trip error {max_err}");
    }

    #[test]
    fn reciprocal_has_zero_k3() {
        let s = ScatteringMatrix::new(c(1.0, 2.0), c(0.3, -0.1), c(0.3, -0.1), c(-0.5, 0.7));
        let k = pauli_forward(s.into());
        assert_eq!(k.0[3], c(0.0, 0.0));
    }
}
