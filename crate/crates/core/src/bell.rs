//! Bell-diagonal states, the post-selected conditional state of the qubit
//! protocol and partial-transpose tests.
//!
//! Bell states are labelled `psi_{mn} = (|0,n> + (-1)^m |1,1+n>)/sqrt(2)`:
//! `m` is the phase index and `n` the bit index.

use nalgebra::{Matrix4, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::channel::{CompositionForm, BOUNDARY_TOL};
use crate::error::{check, Error, Result};
use crate::numeric::csum;

pub const PPT_THRESHOLD: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BellDiag2 {
    pub a00: f64,
    pub a01: f64,
    pub a10: f64,
    pub a11: f64,
}

impl BellDiag2 {
    pub fn new(a00: f64, a01: f64, a10: f64, a11: f64) -> Result<Self> {
        let bd = Self { a00, a01, a10, a11 };
        for a in bd.to_array() {
            check(a >= 0.0 && a.is_finite(), "alpha", a, "must be finite and >= 0")?;
        }
        let s = bd.sum();
        check((s - 1.0).abs() <= 1e-12, "sum(alpha)", s, "must equal 1")?;
        Ok(bd)
    }

    /// Ordered as `[a00, a01, a10, a11]`, i.e. index `2m + n`.
    pub fn to_array(&self) -> [f64; 4] {
        [self.a00, self.a01, self.a10, self.a11]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self {
            a00: a[0],
            a01: a[1],
            a10: a[2],
            a11: a[3],
        }
    }

    pub fn get(&self, m: usize, n: usize) -> f64 {
        self.to_array()[2 * m + n]
    }

    pub fn sum(&self) -> f64 {
        csum(self.to_array())
    }

    pub fn to_qudit(&self) -> BellDiagD {
        BellDiagD {
            d: 2,
            alpha: self.to_array().to_vec(),
        }
    }

    pub fn density_matrix(&self) -> Matrix4<f64> {
        let mut rho = Matrix4::zeros();
        for m in 0..2 {
            for n in 0..2 {
                let v = bell_vector(m, n);
                rho += self.get(m, n) * v * v.transpose();
            }
        }
        rho
    }
}

/// Qudit Bell-diagonal distribution, `alpha[m * d + n]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BellDiagD {
    pub d: usize,
    pub alpha: Vec<f64>,
}

impl BellDiagD {
    pub fn new(d: usize, alpha: Vec<f64>) -> Result<Self> {
        check(d >= 2, "d", d as f64, "must be >= 2")?;
        check(alpha.len() == d * d, "len(alpha)", alpha.len() as f64, "must equal d^2")?;
        for &a in &alpha {
            check(a >= 0.0 && a.is_finite(), "alpha", a, "must be finite and >= 0")?;
        }
        let s = csum(alpha.iter().copied());
        check((s - 1.0).abs() <= 1e-10, "sum(alpha)", s, "must equal 1")?;
        Ok(Self { d, alpha })
    }

    pub fn perfect(d: usize) -> Self {
        let mut alpha = vec![0.0; d * d];
        alpha[0] = 1.0;
        Self { d, alpha }
    }

    pub fn uniform(d: usize) -> Self {
        Self {
            d,
            alpha: vec![1.0 / (d * d) as f64; d * d],
        }
    }

    pub fn get(&self, m: usize, n: usize) -> f64 {
        self.alpha[m * self.d + n]
    }

    pub fn to_qubit(&self) -> Option<BellDiag2> {
        (self.d == 2).then(|| BellDiag2::from_array([self.alpha[0], self.alpha[1], self.alpha[2], self.alpha[3]]))
    }
}

/// Two-qubit vector of `psi_{mn}` in the computational basis `{00, 01, 10, 11}`.
pub fn bell_vector(m: usize, n: usize) -> nalgebra::Vector4<f64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = nalgebra::Vector4::zeros();
    v[n] = s;
    v[2 + (1 - n)] = if m == 0 { s } else { -s };
    v
}

/// Overlaps `<psi_{mn}|rho|psi_{mn}>`, i.e. the Pauli twirl of `rho`.
pub fn bell_overlaps(rho: &Matrix4<f64>) -> BellDiag2 {
    let mut a = [0.0; 4];
    for m in 0..2 {
        for n in 0..2 {
            let v = bell_vector(m, n);
            a[2 * m + n] = (v.transpose() * rho * v)[(0, 0)];
        }
    }
    BellDiag2::from_array(a)
}

/// Partial transpose on the second qubit.
pub fn partial_transpose(rho: &Matrix4<f64>) -> Matrix4<f64> {
    let mut out = Matrix4::zeros();
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                for d in 0..2 {
                    out[(2 * a + d, 2 * c + b)] = rho[(2 * a + b, 2 * c + d)];
                }
            }
        }
    }
    out
}

pub fn min_pt_eigenvalue(rho: &Matrix4<f64>) -> f64 {
    let pt = partial_transpose(rho);
    let pt = 0.5 * (pt + pt.transpose());
    SymmetricEigen::new(pt).eigenvalues.min()
}

pub fn is_npt(rho: &Matrix4<f64>) -> bool {
    min_pt_eigenvalue(rho) < -PPT_THRESHOLD
}

pub fn bell_diag_distillable(bd: &BellDiag2) -> bool {
    is_npt(&bd.density_matrix())
}

/// Post-selected two-qubit state in the logical basis `{00, 0M, M0, MM}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConditionalState {
    /// Probability of keeping the pair.
    pub prob: f64,
    /// Diagonal entries, normalized.
    pub diag: [f64; 4],
    /// Real coherence `<00|rho|MM>`.
    pub coherence: f64,
    pub m: usize,
    pub c: f64,
}

impl ConditionalState {
    pub fn matrix(&self) -> Matrix4<f64> {
        let mut rho = Matrix4::from_diagonal(&self.diag.into());
        rho[(0, 3)] = self.coherence;
        rho[(3, 0)] = self.coherence;
        rho
    }

    pub fn twirl(&self) -> BellDiag2 {
        twirl(self)
    }
}

pub fn conditional_state(cf: &CompositionForm, m: usize, c: f64) -> Result<ConditionalState> {
    check(m >= 1, "M", m as f64, "must be >= 1")?;
    check(c > 0.0 && c < 1.0, "c", c, "must lie in (0, 1)")?;
    let c2 = c * c;
    let s2 = 1.0 - c2;
    let f000 = cf.f_coeff(0, 0, 0);
    let f00m = cf.f_coeff(0, 0, m);
    let fmm0 = cf.f_coeff(m, m, 0);
    let fmmm = cf.f_coeff(m, m, m);
    let f0mm = cf.f_coeff(0, m, m);
    let raw = [c2 * f000, c2 * f00m, s2 * fmm0, s2 * fmmm];
    let prob = csum(raw);
    if !(prob > 0.0) {
        return Err(Error::Degenerate("post-selection probability is zero"));
    }
    Ok(ConditionalState {
        prob,
        diag: raw.map(|x| x / prob),
        coherence: c * s2.sqrt() * f0mm / prob,
        m,
        c,
    })
}

pub fn twirl(cs: &ConditionalState) -> BellDiag2 {
    let [d00, d0m, dm0, dmm] = cs.diag;
    let off = cs.coherence;
    let plus = 0.5 * (d00 + dmm + 2.0 * off);
    let minus = 0.5 * (d00 + dmm - 2.0 * off);
    let cross = 0.5 * (d0m + dm0);
    BellDiag2::from_array([plus, cross, minus.max(0.0), cross])
}

/// Closed-form distillability of the conditional state.
pub fn conditional_is_distillable(cf: &CompositionForm) -> bool {
    !cf.is_entanglement_breaking()
}

/// The same predicate from the partial-transpose determinant of the
/// conditional state, `f_{0,0,M} f_{M,M,0} < f_{0,M,M} f_{M,0,0}`.
pub fn determinant_condition(cf: &CompositionForm, m: usize) -> bool {
    let lhs = cf.f_coeff(0, 0, m) * cf.f_coeff(m, m, 0);
    let rhs = cf.f_coeff(0, m, m) * cf.f_coeff(m, 0, 0);
    lhs < rhs * (1.0 - BOUNDARY_TOL)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CBar {
    pub value: f64,
    /// Set when g = 1 and the conventional value 1/sqrt(2) is returned.
    pub boundary: bool,
}

pub fn c_bar(cf: &CompositionForm, m: usize) -> CBar {
    if cf.g <= 1.0 {
        return CBar {
            value: std::f64::consts::FRAC_1_SQRT_2,
            boundary: true,
        };
    }
    CBar {
        value: 1.0 / (1.0 + (cf.g - 1.0).powi(m as i32)).sqrt(),
        boundary: false,
    }
}
