//! Atomic and field observables of a joint state.
//!
//! All field operators act diagonally in the atom label, so expectation
//! values are sums over the two sectors {|2n,+⟩} and {|2n+1,−⟩}.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{
    ladder_coefficient, number_operator_eigenvalue, parity, DeformationParam, FieldState, LadderDirection,
};
use crate::dynamics::JointState;
use crate::error::{Error, Result};
use crate::spectrum::{rabi_frequency, ModelParams};

/// ⟨σ_z⟩ = Σₙ (|c₊,₂ₙ|² − |c₋,₂ₙ₊₁|²).
pub fn atomic_inversion(state: &JointState) -> f64 {
    state
        .c_plus
        .iter()
        .zip(&state.c_minus)
        .map(|(p, m)| p.norm_sqr() - m.norm_sqr())
        .sum()
}

/// Inversion for an excited atom, directly from the photon distribution:
/// Σₙ |c₂ₙ(0)|² [(Δ/Ωₙ)² + 4g²(2n+2λ+1)/Ωₙ² · cos(Ωₙt)].
pub fn inversion_closed_form(field: &FieldState, params: &ModelParams, t: f64) -> f64 {
    let delta = params.detuning();
    field
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(n, c0)| {
            let rabi = rabi_frequency(n, params);
            if rabi == 0.0 {
                return c0.norm_sqr();
            }
            let coupling = params.block_coupling(n);
            let static_part = (delta / rabi).powi(2);
            let swing = 4.0 * coupling * coupling / (rabi * rabi);
            c0.norm_sqr() * (static_part + swing * (rabi * t).cos())
        })
        .sum()
}

/// |⟨Ψ(0)|Ψ(t)⟩|².
pub fn fidelity(initial: &JointState, state: &JointState) -> Result<f64> {
    if initial.blocks() != state.blocks() {
        return Err(Error::DimensionMismatch(format!(
            "initial state has {} blocks, evolved state has {}",
            initial.blocks(),
            state.blocks()
        )));
    }
    let overlap: Complex64 = initial
        .c_plus
        .iter()
        .zip(&state.c_plus)
        .chain(initial.c_minus.iter().zip(&state.c_minus))
        .map(|(a, b)| a.conj() * b)
        .sum();
    Ok(overlap.norm_sqr())
}

/// Reduced atomic populations and the von Neumann entropy of ρ_A.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntanglementReport {
    pub g_plus: f64,
    pub g_minus: f64,
    pub entropy: f64,
}

/// ρ_A is diagonal with g± = Σ|c±|²; S = −g₊ln g₊ − g₋ln g₋ with 0·ln 0 = 0.
/// Populations are not renormalized for the truncated tail.
pub fn entanglement(state: &JointState) -> EntanglementReport {
    let g_plus: f64 = state.c_plus.iter().map(|c| c.norm_sqr()).sum();
    let g_minus: f64 = state.c_minus.iter().map(|c| c.norm_sqr()).sum();
    EntanglementReport {
        g_plus,
        g_minus,
        entropy: binary_entropy(g_plus, g_minus),
    }
}

/// Entropy of the two-outcome distribution proportional to (a, b), in [0, ln 2].
pub(crate) fn binary_entropy(a: f64, b: f64) -> f64 {
    let total = a + b;
    if total <= 0.0 {
        return 0.0;
    }
    let h = |p: f64| if p > 0.0 { -p * p.ln() } else { 0.0 };
    (h(a / total) + h(b / total)).clamp(0.0, std::f64::consts::LN_2)
}

/// ⟨(𝔞†𝔞)^k⟩; 𝔞†𝔞 is diagonal with eigenvalue 2n on |2n,+⟩ and 2n+1+2λ on |2n+1,−⟩.
pub fn field_moment(state: &JointState, k: u32) -> f64 {
    let lambda = state.params.lambda();
    let k = k as i32;
    state
        .c_plus
        .iter()
        .zip(&state.c_minus)
        .enumerate()
        .map(|(n, (p, m))| {
            number_operator_eigenvalue(2 * n, lambda).powi(k) * p.norm_sqr()
                + number_operator_eigenvalue(2 * n + 1, lambda).powi(k) * m.norm_sqr()
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatisticsReport {
    pub mean_n: f64,
    pub mean_n2: f64,
    pub mandel_q: f64,
}

impl StatisticsReport {
    pub fn is_sub_poissonian(&self) -> bool {
        self.mandel_q < 0.0
    }
}

/// Mandel Q^λ = (⟨(𝔞†𝔞)²⟩ − ⟨𝔞†𝔞⟩²)/⟨𝔞†𝔞⟩ − 1.
pub fn mandel_q(state: &JointState) -> Result<StatisticsReport> {
    let mean_n = field_moment(state, 1);
    let mean_n2 = field_moment(state, 2);
    if mean_n <= 0.0 {
        return Err(Error::UndefinedStatistics(format!(
            "<a†a> = {mean_n}; Mandel Q needs a populated field"
        )));
    }
    Ok(StatisticsReport {
        mean_n,
        mean_n2,
        mandel_q: (mean_n2 - mean_n * mean_n) / mean_n - 1.0,
    })
}

/// Expectation values of the algebra generators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WhaMoments {
    /// ⟨𝔞⟩; always zero because each sector has a single Fock parity.
    pub m_a: Complex64,
    /// ⟨𝔞²⟩
    pub m_a2: Complex64,
    /// ⟨𝔞†𝔞⟩
    pub m_n: f64,
    /// ⟨𝔞𝔞†⟩
    pub m_aad: f64,
    /// ⟨1 + 2λR̂⟩
    pub m_comm: f64,
}

fn lower_twice(n: usize, lambda: DeformationParam) -> f64 {
    // ⟨n-2|𝔞²|n⟩
    ladder_coefficient(LadderDirection::Lower, n, lambda) * ladder_coefficient(LadderDirection::Lower, n - 1, lambda)
}

pub fn wha_moments(state: &JointState) -> WhaMoments {
    let lambda = state.params.lambda();
    let l = lambda.value();
    let blocks = state.blocks();
    let mut m_a2 = Complex64::new(0.0, 0.0);
    let (mut m_n, mut m_aad, mut m_comm) = (0.0, 0.0, 0.0);
    for n in 0..blocks {
        let (p, m) = (state.c_plus[n], state.c_minus[n]);
        let (even, odd) = (2 * n, 2 * n + 1);
        if n + 1 < blocks {
            m_a2 += p.conj() * state.c_plus[n + 1] * lower_twice(even + 2, lambda);
            m_a2 += m.conj() * state.c_minus[n + 1] * lower_twice(odd + 2, lambda);
        }
        let (pp, mm) = (p.norm_sqr(), m.norm_sqr());
        m_n += number_operator_eigenvalue(even, lambda) * pp + number_operator_eigenvalue(odd, lambda) * mm;
        let raise_sq = |k: usize| ladder_coefficient(LadderDirection::Raise, k, lambda).powi(2);
        m_aad += raise_sq(even) * pp + raise_sq(odd) * mm;
        m_comm += (1.0 + 2.0 * l * parity(even)) * pp + (1.0 + 2.0 * l * parity(odd)) * mm;
    }
    WhaMoments {
        m_a: Complex64::new(0.0, 0.0),
        m_a2,
        m_n,
        m_aad,
        m_comm,
    }
}

/// Quadrature variances against the deformed uncertainty bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezingReport {
    pub sigma_xx: f64,
    pub sigma_pp: f64,
    /// |⟨1+2λR̂⟩|/2
    pub bound: f64,
    pub s_x: f64,
    pub s_p: f64,
    pub uncertainty_ok: bool,
}

/// Squeezing of x̂ = (𝔞+𝔞†)/√2 and p̂ = (𝔞−𝔞†)/(i√2), in the interaction picture.
pub fn squeezing(state: &JointState) -> SqueezingReport {
    squeezing_from_moments(&wha_moments(state))
}

pub fn squeezing_from_moments(m: &WhaMoments) -> SqueezingReport {
    // ⟨𝔞⟩ = 0 so the variances are the second moments
    let sym = 0.5 * (m.m_n + m.m_aad);
    let sigma_xx = sym + m.m_a2.re;
    let sigma_pp = sym - m.m_a2.re;
    let bound = 0.5 * m.m_comm.abs();
    SqueezingReport {
        sigma_xx,
        sigma_pp,
        bound,
        s_x: (sigma_xx - bound) / bound,
        s_p: (sigma_pp - bound) / bound,
        uncertainty_ok: sigma_xx * sigma_pp >= bound * bound * (1.0 - 1e-10),
    }
}
