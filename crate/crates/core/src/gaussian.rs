//! Two-mode Gaussian covariance matrices and the Simon PPT functional.
//! Vacuum has covariance matrix equal to the identity.

use nalgebra::{Matrix4, SMatrix, SymmetricEigen};
use serde::Serialize;

use crate::channel::{CompositionForm, BOUNDARY_TOL};

/// Covariance matrix in the ordering `(x_A, p_A, x_B, p_B)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CovMatrix4 {
    pub entries: [[f64; 4]; 4],
}

fn det2(m: [[f64; 2]; 2]) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

impl CovMatrix4 {
    pub fn from_blocks(va: [[f64; 2]; 2], vb: [[f64; 2]; 2], vab: [[f64; 2]; 2]) -> Self {
        let mut e = [[0.0; 4]; 4];
        for r in 0..2 {
            for c in 0..2 {
                e[r][c] = va[r][c];
                e[r + 2][c + 2] = vb[r][c];
                e[r][c + 2] = vab[r][c];
                e[c + 2][r] = vab[r][c];
            }
        }
        Self { entries: e }
    }

    fn block(&self, r0: usize, c0: usize) -> [[f64; 2]; 2] {
        let e = &self.entries;
        [[e[r0][c0], e[r0][c0 + 1]], [e[r0 + 1][c0], e[r0 + 1][c0 + 1]]]
    }

    pub fn va(&self) -> [[f64; 2]; 2] {
        self.block(0, 0)
    }

    pub fn vb(&self) -> [[f64; 2]; 2] {
        self.block(2, 2)
    }

    pub fn vab(&self) -> [[f64; 2]; 2] {
        self.block(0, 2)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..4).all(|r| (0..4).all(|c| (self.entries[r][c] - self.entries[c][r]).abs() <= tol))
    }

    /// Cofactor expansion along the first row.
    pub fn det(&self) -> f64 {
        let e = &self.entries;
        let mut acc = 0.0;
        for j in 0..4 {
            let mut minor = [[0.0; 3]; 3];
            for r in 1..4 {
                let mut cc = 0;
                for c in 0..4 {
                    if c != j {
                        minor[r - 1][cc] = e[r][c];
                        cc += 1;
                    }
                }
            }
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * e[0][j] * det3(minor);
        }
        acc
    }

    pub fn matrix(&self) -> Matrix4<f64> {
        Matrix4::from_fn(|r, c| self.entries[r][c])
    }

    /// Checks `V + iΩ >= 0` through the real 8x8 embedding.
    pub fn is_physical(&self, tol: f64) -> bool {
        let omega = Matrix4::new(
            0.0, 1.0, 0.0, 0.0, //
            -1.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 1.0, //
            0.0, 0.0, -1.0, 0.0,
        );
        let v = self.matrix();
        let mut big = SMatrix::<f64, 8, 8>::zeros();
        big.fixed_view_mut::<4, 4>(0, 0).copy_from(&v);
        big.fixed_view_mut::<4, 4>(4, 4).copy_from(&v);
        big.fixed_view_mut::<4, 4>(0, 4).copy_from(&(-omega));
        big.fixed_view_mut::<4, 4>(4, 0).copy_from(&omega);
        SymmetricEigen::new(big).eigenvalues.min() >= -tol
    }
}

const SIGMA_Z: [[f64; 2]; 2] = [[1.0, 0.0], [0.0, -1.0]];

fn scaled(m: [[f64; 2]; 2], s: f64) -> [[f64; 2]; 2] {
    m.map(|row| row.map(|x| x * s))
}

const ID2: [[f64; 2]; 2] = [[1.0, 0.0], [0.0, 1.0]];

/// Two-mode squeezed vacuum with `ns` mean photons per mode.
pub fn tmsv_cov(ns: f64) -> CovMatrix4 {
    let a = 2.0 * ns + 1.0;
    let c = 2.0 * (ns * (ns + 1.0)).sqrt();
    CovMatrix4::from_blocks(scaled(ID2, a), scaled(ID2, a), scaled(SIGMA_Z, c))
}

/// Two-mode squeezed vacuum with its second mode sent through the channel.
pub fn choi_cov(cf: &CompositionForm, ns: f64) -> CovMatrix4 {
    let a = 2.0 * ns + 1.0;
    let b = 2.0 * cf.g * (1.0 + cf.lambda * ns) - 1.0;
    let c = 2.0 * (cf.g * cf.lambda * ns * (ns + 1.0)).sqrt();
    CovMatrix4::from_blocks(scaled(ID2, a), scaled(ID2, b), scaled(SIGMA_Z, c))
}

/// `1 + det V + 2 det V_AB - det V_A - det V_B`; negative iff entangled.
pub fn simon_f(v: &CovMatrix4) -> f64 {
    1.0 + v.det() + 2.0 * det2(v.vab()) - det2(v.va()) - det2(v.vb())
}

/// `simon_f < 0` with a relative margin against round-off.
pub fn simon_entangled(v: &CovMatrix4) -> bool {
    let scale = 1.0 + v.det().abs() + 2.0 * det2(v.vab()).abs() + det2(v.va()).abs() + det2(v.vb()).abs();
    simon_f(v) < -BOUNDARY_TOL * scale
}
