//! Dressed states of the deformed JC Hamiltonian.
//!
//! The Hamiltonian is block diagonal in the two-dimensional subspaces
//! span{|2n,+⟩, |2n+1,−⟩}; each block is a real symmetric 2×2 matrix.

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::algebra::DeformationParam;
use crate::error::{invalid, Result};

/// Physical constants of the model. The detuning is Δ = ω − ω₀.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    omega: f64,
    omega0: f64,
    g: f64,
    lambda: DeformationParam,
}

impl ModelParams {
    pub fn new(omega: f64, omega0: f64, g: f64, lambda: DeformationParam) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(invalid("omega", format!("must be finite and > 0, got {omega}")));
        }
        if !(omega0.is_finite() && omega0 > 0.0) {
            return Err(invalid("omega0", format!("must be finite and > 0, got {omega0}")));
        }
        if !(g.is_finite() && g >= 0.0) {
            return Err(invalid("g", format!("must be finite and >= 0, got {g}")));
        }
        Ok(Self {
            omega,
            omega0,
            g,
            lambda,
        })
    }

    /// Parameters fixed by field frequency and detuning, ω₀ = ω − Δ.
    pub fn from_detuning(omega: f64, delta: f64, g: f64, lambda: DeformationParam) -> Result<Self> {
        Self::new(omega, omega - delta, g, lambda)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn lambda(&self) -> DeformationParam {
        self.lambda
    }

    pub fn detuning(&self) -> f64 {
        self.omega - self.omega0
    }

    /// Off-diagonal coupling of block n, g√(2n+2λ+1).
    pub fn block_coupling(&self, n: usize) -> f64 {
        self.g * (2.0 * n as f64 + 2.0 * self.lambda.value() + 1.0).sqrt()
    }
}

/// Generalized Rabi frequency Ωₙ,λ = √(Δ² + 4g²(2n+2λ+1)).
pub fn rabi_frequency(n: usize, params: &ModelParams) -> f64 {
    params.detuning().hypot(2.0 * params.block_coupling(n))
}

/// Block n of the Hamiltonian in the basis {|2n,+⟩, |2n+1,−⟩}.
pub fn block_hamiltonian(n: usize, params: &ModelParams) -> Matrix2<f64> {
    let nf = n as f64;
    let l = params.lambda.value();
    let w = params.omega;
    let w0 = params.omega0;
    let off = params.block_coupling(n);
    Matrix2::new(
        w * (2.0 * nf + l + 0.5) + 0.5 * w0,
        off,
        off,
        w * (2.0 * nf + l + 1.5) - 0.5 * w0,
    )
}

/// Dressed eigenpair of block n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DressedPair {
    pub n: usize,
    pub rabi: f64,
    pub e_plus: f64,
    pub e_minus: f64,
    pub v_plus: [f64; 2],
    pub v_minus: [f64; 2],
}

impl DressedPair {
    /// max ‖H·v± − e±·v±‖ for the given block matrix.
    pub fn residual(&self, block: &Matrix2<f64>) -> f64 {
        let r = |v: [f64; 2], e: f64| {
            let x = block[(0, 0)] * v[0] + block[(0, 1)] * v[1] - e * v[0];
            let y = block[(1, 0)] * v[0] + block[(1, 1)] * v[1] - e * v[1];
            x.hypot(y)
        };
        r(self.v_plus, self.e_plus).max(r(self.v_minus, self.e_minus))
    }
}

/// Mixing coefficients (c₁, c₂) in the printed form
/// c₁ = (Δ−Ω)/N, c₂ = 2g√(2n+2λ+1)/N with N = √((Δ−Ω)² + 4g²(2n+2λ+1)).
///
/// `None` when N vanishes (g = 0 with Δ ≥ 0). The eigenvector of E⁻ is
/// (c₂, c₁) and that of E⁺ is (−c₁, c₂); see [`dressed_pair`].
pub fn mixing_coefficients(n: usize, params: &ModelParams) -> Option<(f64, f64)> {
    let delta = params.detuning();
    let omega = rabi_frequency(n, params);
    let coupling2 = 2.0 * params.block_coupling(n);
    let norm = (delta - omega).hypot(coupling2);
    if norm == 0.0 {
        return None;
    }
    Some(((delta - omega) / norm, coupling2 / norm))
}

/// Eigenvalues e± = (2n+λ+1)ω ± Ω/2 and the matching unit eigenvectors.
///
/// Vectors are constructed from whichever of the two equivalent null-vector
/// forms is better conditioned, and each has its first nonzero component
/// positive.
pub fn dressed_pair(n: usize, params: &ModelParams) -> DressedPair {
    let delta = params.detuning();
    let rabi = rabi_frequency(n, params);
    let coupling = params.block_coupling(n);
    let center = (2.0 * n as f64 + params.lambda.value() + 1.0) * params.omega;

    // Null vectors of (H − E⁻): (2G, Δ−Ω) from the first row, (Δ+Ω, −2G) from the second.
    let v_minus = if rabi == 0.0 {
        [1.0, 0.0]
    } else if delta >= 0.0 {
        normalize([delta + rabi, -2.0 * coupling])
    } else {
        normalize([2.0 * coupling, delta - rabi])
    };
    let v_minus = fix_sign(v_minus);
    let v_plus = fix_sign([-v_minus[1], v_minus[0]]);

    DressedPair {
        n,
        rabi,
        e_plus: center + 0.5 * rabi,
        e_minus: center - 0.5 * rabi,
        v_plus,
        v_minus,
    }
}

fn normalize(v: [f64; 2]) -> [f64; 2] {
    let norm = v[0].hypot(v[1]);
    [v[0] / norm, v[1] / norm]
}

fn fix_sign(v: [f64; 2]) -> [f64; 2] {
    let lead = if v[0] != 0.0 { v[0] } else { v[1] };
    if lead < 0.0 {
        [-v[0], -v[1]]
    } else {
        v
    }
}

/// Detuning grid `start, start+step, …` up to `end` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetuningRange {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

impl DetuningRange {
    /// Grid points; empty when `end < start`.
    pub fn points(&self) -> Result<Vec<f64>> {
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(invalid("delta_step", format!("must be finite and > 0, got {}", self.step)));
        }
        if !self.start.is_finite() || !self.end.is_finite() {
            return Err(invalid("delta_range", "bounds must be finite"));
        }
        if self.end < self.start {
            return Ok(Vec::new());
        }
        let count = ((self.end - self.start) / self.step + 1e-9).floor() as usize + 1;
        Ok((0..count).map(|i| self.start + i as f64 * self.step).collect())
    }
}

/// One row of a level-repulsion scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub n: usize,
    pub delta: f64,
    pub e_plus: f64,
    pub e_minus: f64,
}

/// Dressed energies over a detuning grid at fixed ω, g, λ (ω₀ follows Δ).
pub fn spectrum_scan(
    n_list: &[usize],
    omega: f64,
    g: f64,
    lambda: DeformationParam,
    range: &DetuningRange,
) -> Result<Vec<SpectrumRow>> {
    let deltas = range.points()?;
    let mut rows = Vec::with_capacity(n_list.len() * deltas.len());
    for &n in n_list {
        for &delta in &deltas {
            let params = ModelParams::from_detuning(omega, delta, g, lambda)?;
            let pair = dressed_pair(n, &params);
            rows.push(SpectrumRow {
                n,
                delta,
                e_plus: pair.e_plus,
                e_minus: pair.e_minus,
            });
        }
    }
    Ok(rows)
}
