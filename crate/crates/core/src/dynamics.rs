//! Exact interaction-picture dynamics.
//!
//! Each block {|2n,+⟩, |2n+1,−⟩} evolves independently; the amplitudes are
//! rotated in closed form, so every time point is computed directly with no
//! stepping error.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::algebra::FieldState;
use crate::error::{Error, Result};
use crate::spectrum::{rabi_frequency, ModelParams};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Joint atom–field state in the interaction picture at time `time`.
///
/// `c_plus[n]` is the amplitude of |2n,+⟩ and `c_minus[n]` that of |2n+1,−⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    pub time: f64,
    pub c_plus: Vec<Complex64>,
    pub c_minus: Vec<Complex64>,
    pub params: ModelParams,
    /// Probability carried by levels dropped from the initial field.
    pub tail_mass: f64,
}

impl JointState {
    /// General initial amplitudes at t = 0.
    pub fn new(params: ModelParams, c_plus: Vec<Complex64>, c_minus: Vec<Complex64>) -> Result<Self> {
        if c_plus.len() != c_minus.len() {
            return Err(Error::DimensionMismatch(format!(
                "c_plus has {} blocks, c_minus has {}",
                c_plus.len(),
                c_minus.len()
            )));
        }
        let norm: f64 = c_plus.iter().chain(&c_minus).map(|c| c.norm_sqr()).sum();
        if !norm.is_finite() || norm > 1.0 + 1e-12 {
            return Err(crate::error::invalid("amplitudes", format!("squared norm {norm} exceeds 1")));
        }
        Ok(Self {
            time: 0.0,
            c_plus,
            c_minus,
            params,
            tail_mass: (1.0 - norm).max(0.0),
        })
    }

    /// Atom excited, field in `field`: c₊,₂ₙ(0) = c₂ₙ(0), c₋,₂ₙ₊₁(0) = 0.
    pub fn excited(field: &FieldState, params: ModelParams) -> Self {
        let blocks = field.amplitudes().len();
        Self {
            time: 0.0,
            c_plus: field.amplitudes().to_vec(),
            c_minus: vec![ZERO; blocks],
            params,
            tail_mass: field.tail_mass(),
        }
    }

    pub fn blocks(&self) -> usize {
        self.c_plus.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c_plus.iter().chain(&self.c_minus).map(|c| c.norm_sqr()).sum()
    }

    /// Probability of block n, |c₊,₂ₙ|² + |c₋,₂ₙ₊₁|².
    pub fn block_probability(&self, n: usize) -> f64 {
        self.c_plus[n].norm_sqr() + self.c_minus[n].norm_sqr()
    }
}

/// Per-block rotation coefficients for a time step `dt`:
/// returns (cos + iΔ/Ω sin, cos − iΔ/Ω sin, −2iG/Ω sin) at half-angle Ωdt/2.
fn block_rotation(n: usize, params: &ModelParams, dt: f64) -> (Complex64, Complex64, Complex64) {
    let rabi = rabi_frequency(n, params);
    if rabi == 0.0 {
        return (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), ZERO);
    }
    let delta = params.detuning();
    let (s, c) = (0.5 * rabi * dt).sin_cos();
    let ratio = delta / rabi;
    let mix = -2.0 * I * (params.block_coupling(n) / rabi * s);
    (Complex64::new(c, ratio * s), Complex64::new(c, -ratio * s), mix)
}

/// Advances `state` by `dt`.
///
/// For a state at t = 0 this is the general two-amplitude solution
///
/// ```text
/// c₊(t) = {c₊(0)[cos(Ωt/2) + i(Δ/Ω)sin(Ωt/2)] − 2i(G/Ω) c₋(0) sin(Ωt/2)} e^{−iΔt/2}
/// c₋(t) = {c₋(0)[cos(Ωt/2) − i(Δ/Ω)sin(Ωt/2)] − 2i(G/Ω) c₊(0) sin(Ωt/2)} e^{+iΔt/2}
/// ```
///
/// with G = g√(2n+2λ+1). For a state stamped at t₀ ≠ 0 the explicit
/// e^{∓iΔt/2} frame phases are removed at t₀ and reapplied at t₀ + dt, so
/// propagation composes: advancing by t₁ then t₂ equals advancing by t₁ + t₂.
pub fn evolve_general(state: &JointState, dt: f64) -> JointState {
    let params = &state.params;
    let delta = params.detuning();
    let t0 = state.time;
    let t1 = t0 + dt;
    // unwind the frame phase at t0, reapply at t1
    let unwind = Complex64::from_polar(1.0, 0.5 * delta * t0);
    let rewind = Complex64::from_polar(1.0, -0.5 * delta * t1);

    let mut c_plus = Vec::with_capacity(state.blocks());
    let mut c_minus = Vec::with_capacity(state.blocks());
    for n in 0..state.blocks() {
        let (diag_p, diag_m, mix) = block_rotation(n, params, dt);
        let (p, m) = (state.c_plus[n] * unwind, state.c_minus[n] * unwind.conj());
        c_plus.push((p * diag_p + mix * m) * rewind);
        c_minus.push((m * diag_m + mix * p) * rewind.conj());
    }
    JointState {
        time: t1,
        c_plus,
        c_minus,
        params: *params,
        tail_mass: state.tail_mass,
    }
}

/// Excited-atom solution at time `t`:
///
/// ```text
/// c₊,₂ₙ(t)   = c₂ₙ(0)[cos(Ωₙt/2) + i(Δ/Ωₙ)sin(Ωₙt/2)] e^{−iΔt/2}
/// c₋,₂ₙ₊₁(t) = −2ig(√(2n+2λ+1)/Ωₙ) c₂ₙ(0) sin(Ωₙt/2) e^{+iΔt/2}
/// ```
pub fn evolve_excited(field: &FieldState, params: &ModelParams, t: f64) -> JointState {
    let delta = params.detuning();
    let frame = Complex64::from_polar(1.0, -0.5 * delta * t);
    let mut c_plus = Vec::with_capacity(field.amplitudes().len());
    let mut c_minus = Vec::with_capacity(field.amplitudes().len());
    for (n, &c0) in field.amplitudes().iter().enumerate() {
        let rabi = rabi_frequency(n, params);
        if rabi == 0.0 {
            c_plus.push(c0);
            c_minus.push(ZERO);
            continue;
        }
        let (s, c) = (0.5 * rabi * t).sin_cos();
        c_plus.push(c0 * Complex64::new(c, delta / rabi * s) * frame);
        c_minus.push(c0 * (-2.0 * I) * (params.block_coupling(n) / rabi * s) * frame.conj());
    }
    JointState {
        time: t,
        c_plus,
        c_minus,
        params: *params,
        tail_mass: field.tail_mass(),
    }
}

/// States on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTrajectory {
    pub grid: Vec<f64>,
    pub states: Vec<JointState>,
}

impl JointTrajectory {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }
}

pub(crate) fn check_grid(grid: &[f64]) -> Result<()> {
    if let Some(bad) = grid.iter().find(|t| !t.is_finite()) {
        return Err(Error::Grid(format!("non-finite time {bad}")));
    }
    if let Some(w) = grid.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::Grid(format!(
            "grid must be strictly increasing, found {} then {}",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// Excited-atom evolution at every grid time; points are evaluated independently.
pub fn trajectory(field: &FieldState, params: &ModelParams, grid: &[f64]) -> Result<JointTrajectory> {
    check_grid(grid)?;
    let states = grid.par_iter().map(|&t| evolve_excited(field, params, t)).collect();
    Ok(JointTrajectory {
        grid: grid.to_vec(),
        states,
    })
}

/// `n_points` equally spaced times over `[0, t_max]`.
pub fn uniform_grid(t_max: f64, n_points: usize) -> Result<Vec<f64>> {
    if n_points < 2 {
        return Err(Error::Grid(format!("need at least 2 points, got {n_points}")));
    }
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(Error::Grid(format!("t_max must be finite and > 0, got {t_max}")));
    }
    let last = (n_points - 1) as f64;
    Ok((0..n_points).map(|i| t_max * i as f64 / last).collect())
}
