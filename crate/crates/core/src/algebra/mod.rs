//! Wigner–Heisenberg (parity-deformed) oscillator algebra on a truncated
//! Fock space, plus the even cat states built on it.

mod cat;
mod special;

pub use cat::{
    wcs_build, wcs_build_capped, wcs_eigenstate_residual, CatStateParams, FieldState,
    DEFAULT_MAX_EVEN_LEVELS, DEFAULT_TAIL_TOL,
};
pub use special::{bessel_i, ln_bessel_i, ln_gamma};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Wigner deformation parameter λ. Cat states are defined for λ > -1/2.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct DeformationParam(f64);

impl DeformationParam {
    pub fn new(lambda: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda <= -0.5 {
            return Err(invalid("lambda", format!("must be finite and > -1/2, got {lambda}")));
        }
        Ok(Self(lambda))
    }

    /// The undeformed (ordinary boson) case.
    pub const fn zero() -> Self {
        Self(0.0)
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for DeformationParam {
    type Error = crate::Error;
    fn try_from(v: f64) -> Result<Self> {
        Self::new(v)
    }
}

impl From<DeformationParam> for f64 {
    fn from(l: DeformationParam) -> f64 {
        l.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderDirection {
    Lower,
    Raise,
}

/// Matrix element of the deformed ladder operators between adjacent Fock levels.
///
/// `Lower` gives ⟨n-1|𝔞|n⟩, `Raise` gives ⟨n+1|𝔞†|n⟩:
///
/// ```text
/// 𝔞|2m⟩   = √(2m)        |2m-1⟩     𝔞|2m+1⟩  = √(2m+2λ+1) |2m⟩
/// 𝔞†|2m⟩  = √(2m+2λ+1)   |2m+1⟩     𝔞†|2m+1⟩ = √(2m+2)    |2m+2⟩
/// ```
pub fn ladder_coefficient(direction: LadderDirection, n: usize, lambda: DeformationParam) -> f64 {
    let l = lambda.value();
    let nf = n as f64;
    let even = n.is_multiple_of(2);
    match (direction, even) {
        (LadderDirection::Lower, true) => nf.sqrt(),
        (LadderDirection::Lower, false) => (nf + 2.0 * l).sqrt(),
        (LadderDirection::Raise, true) => (nf + 2.0 * l + 1.0).sqrt(),
        (LadderDirection::Raise, false) => (nf + 1.0).sqrt(),
    }
}

/// Eigenvalue of 𝔞†𝔞 = N + λ(1 - R̂) on |n⟩.
pub fn number_operator_eigenvalue(n: usize, lambda: DeformationParam) -> f64 {
    let nf = n as f64;
    if n.is_multiple_of(2) {
        nf
    } else {
        nf + 2.0 * lambda.value()
    }
}

/// Parity eigenvalue (-1)ⁿ.
#[inline]
pub fn parity(n: usize) -> f64 {
    if n.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Truncated Fock-space representation of the algebra on levels `0..=n_trunc`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockLadder {
    lambda: DeformationParam,
    n_trunc: usize,
}

impl FockLadder {
    pub fn new(lambda: DeformationParam, n_trunc: usize) -> Result<Self> {
        if n_trunc < 1 {
            return Err(invalid("n_trunc", "must be at least 1"));
        }
        Ok(Self { lambda, n_trunc })
    }

    pub fn lambda(&self) -> DeformationParam {
        self.lambda
    }

    /// Highest Fock index retained (inclusive).
    pub fn n_trunc(&self) -> usize {
        self.n_trunc
    }

    pub fn dim(&self) -> usize {
        self.n_trunc + 1
    }

    /// Matrix of 𝔞; entry (n-1, n) holds the lowering coefficient.
    pub fn lower_matrix(&self) -> DMatrix<f64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |i, j| {
            if j == i + 1 {
                ladder_coefficient(LadderDirection::Lower, j, self.lambda)
            } else {
                0.0
            }
        })
    }

    /// Matrix of 𝔞†; the raise out of the top level is dropped.
    pub fn raise_matrix(&self) -> DMatrix<f64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |i, j| {
            if i == j + 1 {
                ladder_coefficient(LadderDirection::Raise, j, self.lambda)
            } else {
                0.0
            }
        })
    }

    pub fn parity_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim(), self.dim(), |i, j| if i == j { parity(i) } else { 0.0 })
    }

    /// Diagonal N̂ with entries n.
    pub fn number_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim(), self.dim(), |i, j| if i == j { i as f64 } else { 0.0 })
    }

    /// Applies 𝔞 to a state vector over levels `0..=n_trunc`.
    pub fn apply_lower(&self, psi: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(psi)?;
        let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
        for n in 1..psi.len() {
            out[n - 1] = psi[n] * ladder_coefficient(LadderDirection::Lower, n, self.lambda);
        }
        Ok(out)
    }

    /// Applies 𝔞†; amplitude pushed above `n_trunc` is discarded.
    pub fn apply_raise(&self, psi: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(psi)?;
        let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
        for n in 0..psi.len() - 1 {
            out[n + 1] = psi[n] * ladder_coefficient(LadderDirection::Raise, n, self.lambda);
        }
        Ok(out)
    }

    fn check_len(&self, psi: &[Complex64]) -> Result<()> {
        if psi.len() != self.dim() {
            return Err(crate::Error::DimensionMismatch(format!(
                "state has {} components, ladder dimension is {}",
                psi.len(),
                self.dim()
            )));
        }
        Ok(())
    }
}
