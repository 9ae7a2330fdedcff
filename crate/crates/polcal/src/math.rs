//! Small fixed-size complex linear algebra used throughout the crate.
//!
//! Everything here operates on stack arrays of `Complex64`; the matrices
//! involved in Pauli-basis calibration are at most 4x4, so no general
//! matrix library is needed.

use num_complex::Complex64;

pub type C64 = Complex64;
pub type Mat2 = [[C64; 2]; 2];
pub type Mat4 = [[C64; 4]; 4];
pub type CVec4 = [C64; 4];

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn mat2_identity() -> Mat2 {
    [[cr(1.0), cr(0.0)], [cr(0.0), cr(1.0)]]
}

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[C64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn mat2_det(a: &Mat2) -> C64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

/// Inverse of a 2x2 complex matrix; `None` when the determinant is
/// negligible relative to the matrix scale.
pub fn mat2_inv(a: &Mat2) -> Option<Mat2> {
    let det = mat2_det(a);
    let scale = mat2_frob(a);
    if det.norm() <= 1e-14 * scale * scale {
        return None;
    }
    let inv_det = cr(1.0) / det;
    Some([
        [a[1][1] * inv_det, -a[0][1] * inv_det],
        [-a[1][0] * inv_det, a[0][0] * inv_det],
    ])
}

pub fn mat2_scale(a: &Mat2, s: C64) -> Mat2 {
    let mut out = *a;
    for row in out.iter_mut() {
        for v in row.iter_mut() {
            *v *= s;
        }
    }
    out
}

pub fn mat2_frob(a: &Mat2) -> f64 {
    a.iter()
        .flatten()
        .map(|v| v.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

pub fn mat4_identity() -> Mat4 {
    let mut out = [[C64::new(0.0, 0.0); 4]; 4];
    for (i, row) in out.iter_mut().enumerate() {
        row[i] = cr(1.0);
    }
    out
}

pub fn mat4_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = [[C64::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut acc = C64::new(0.0, 0.0);
            for (k, bk) in b.iter().enumerate() {
                acc += a[i][k] * bk[j];
            }
            out[i][j] = acc;
        }
    }
    out
}

pub fn mat4_vec(a: &Mat4, v: &CVec4) -> CVec4 {
    let mut out = [C64::new(0.0, 0.0); 4];
    for (i, row) in a.iter().enumerate() {
        out[i] = row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3];
    }
    out
}

pub fn mat4_sub(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = *a;
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] -= b[i][j];
        }
    }
    out
}

pub fn mat4_frob(a: &Mat4) -> f64 {
    a.iter()
        .flatten()
        .map(|v| v.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

pub fn vec4_norm(v: &CVec4) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Kronecker product of two 2x2 matrices, row-major blocks:
/// `K[2i+k][2j+l] = a[i][j] * b[k][l]`.
pub fn kron2(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut out = [[C64::new(0.0, 0.0); 4]; 4];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[2 * i + k][2 * j + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn mat2_transpose(a: &Mat2) -> Mat2 {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

/// Eigen-decomposition of a small complex Hermitian matrix by cyclic
/// Jacobi rotations. Returns eigenvalues in descending order together
/// with the corresponding unit eigenvectors.
pub fn hermitian_eig<const N: usize>(m: &[[C64; N]; N]) -> ([f64; N], [[C64; N]; N]) {
    let mut a = *m;
    let mut v = [[C64::new(0.0, 0.0); N]; N];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = cr(1.0);
    }
    let scale: f64 = a.iter().flatten().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let tol = (1e-15 * scale.max(f64::MIN_POSITIVE)).powi(2);

    for _sweep in 0..60 {
        let mut off = 0.0;
        for p in 0..N {
            for q in (p + 1)..N {
                off += a[p][q].norm_sqr();
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                let apq = a[p][q];
                let r = apq.norm();
                if r <= 1e-300 {
                    continue;
                }
                let phase = apq / r;
                let app = a[p][p].re;
                let aqq = a[q][q].re;
                let tau = (aqq - app) / (2.0 * r);
                // smaller-magnitude root of t^2 - 2 tau t - 1 = 0
                let t = if tau >= 0.0 {
                    -1.0 / (tau + (tau * tau + 1.0).sqrt())
                } else {
                    1.0 / (-tau + (tau * tau + 1.0).sqrt())
                };
                let cth = 1.0 / (1.0 + t * t).sqrt();
                let sth = t * cth;
                // unitary G: G[p][p]=c, G[p][q]=-s*phase, G[q][p]=s*conj(phase), G[q][q]=c
                let gpq = -phase * sth;
                let gqp = phase.conj() * sth;
                // A <- G^H A G
                for k in 0..N {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = akp * cth + akq * gqp;
                    a[k][q] = akp * gpq + akq * cth;
                }
                for k in 0..N {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = cth * apk + gqp.conj() * aqk;
                    a[q][k] = gpq.conj() * apk + cth * aqk;
                }
                for row in v.iter_mut() {
                    let vp = row[p];
                    let vq = row[q];
                    row[p] = vp * cth + vq * gqp;
                    row[q] = vp * gpq + vq * cth;
                }
            }
        }
    }

    let mut order: [usize; N] = core::array::from_fn(|i| i);
    order.sort_by(|&i, &j| a[j][j].re.partial_cmp(&a[i][i].re).unwrap());
    let mut vals = [0.0; N];
    let mut vecs = [[C64::new(0.0, 0.0); N]; N];
    for (rank, &idx) in order.iter().enumerate() {
        vals[rank] = a[idx][idx].re;
        for k in 0..N {
            vecs[rank][k] = v[k][idx];
        }
    }
    (vals, vecs)
}

/// Streaming complex least squares for systems with two unknowns,
/// `x0*c0 + x1*c1 = b`, maintained as a 3x3 R factor updated by Givens
/// rotations per incoming row.
#[derive(Debug, Clone)]
pub struct Lstsq2 {
    r: [[C64; 3]; 3],
    col_sq: [f64; 2],
    n: usize,
}

impl Default for Lstsq2 {
    fn default() -> Self {
        Self::new()
    }
}

impl Lstsq2 {
    pub fn new() -> Self {
        Self {
            r: [[C64::new(0.0, 0.0); 3]; 3],
            col_sq: [0.0; 2],
            n: 0,
        }
    }

    pub fn push(&mut self, c0: C64, c1: C64, b: C64) {
        self.col_sq[0] += c0.norm_sqr();
        self.col_sq[1] += c1.norm_sqr();
        self.n += 1;
        let mut row = [c0, c1, b];
        for k in 0..3 {
            let bk = row[k];
            if bk.norm_sqr() == 0.0 {
                continue;
            }
            let ak = self.r[k][k];
            let denom = (ak.norm_sqr() + bk.norm_sqr()).sqrt();
            let cs = ak.conj() / denom;
            let sn = bk.conj() / denom;
            for j in k..3 {
                let rj = self.r[k][j];
                let wj = row[j];
                self.r[k][j] = cs * rj + sn * wj;
                row[j] = -sn.conj() * rj + cs.conj() * wj;
            }
        }
    }

    pub fn count(&self) -> usize {
        self.n
    }

    /// Returns `(x0, x1, residual_rms)`, or `None` when the columns are
    /// numerically collinear.
    pub fn solve(&self) -> Option<(C64, C64, f64)> {
        let r00 = self.r[0][0];
        let r11 = self.r[1][1];
        if r00.norm() <= 1e-300 {
            return None;
        }
        if r11.norm() <= 1e-10 * self.col_sq[1].sqrt() {
            return None;
        }
        let x1 = self.r[1][2] / r11;
        let x0 = (self.r[0][2] - self.r[0][1] * x1) / r00;
        let rms = self.r[2][2].norm() / (self.n as f64).sqrt();
        Some((x0, x1, rms))
    }
}
