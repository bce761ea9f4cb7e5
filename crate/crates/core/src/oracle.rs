//! Brute-force validator: the full truncated Hamiltonian on Fock ⊗ qubit,
//! evolved by dense eigendecomposition and rotated into the interaction
//! picture.
//!
//! Basis ordering: index(m, +) = 2m, index(m, −) = 2m + 1, m = 0..=n_trunc.

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::FockLadder;
use crate::dynamics::{check_grid, JointState, JointTrajectory};
use crate::error::{Error, Result};
use crate::spectrum::ModelParams;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Spin {
    Excited,
    Ground,
}

/// Position of |m⟩ ⊗ |spin⟩ in the product basis.
pub fn basis_index(m: usize, spin: Spin) -> usize {
    2 * m
        + match spin {
            Spin::Excited => 0,
            Spin::Ground => 1,
        }
}

/// A real symmetric operator on the truncated product space.
#[derive(Debug, Clone, PartialEq)]
pub struct FullOperator {
    n_trunc: usize,
    matrix: DMatrix<f64>,
}

impl FullOperator {
    /// Wraps a caller-built matrix of dimension 2·(n_trunc+1); it must be symmetric.
    pub fn from_matrix(n_trunc: usize, matrix: DMatrix<f64>) -> Result<Self> {
        let dim = 2 * (n_trunc + 1);
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "expected {dim}x{dim}, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let asym = (&matrix - matrix.transpose()).abs().max();
        if asym != 0.0 {
            return Err(Error::Eigen(format!("operator is not Hermitian (max |H - H†| = {asym:e})")));
        }
        Ok(Self { n_trunc, matrix })
    }

    pub fn n_trunc(&self) -> usize {
        self.n_trunc
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().copied().collect()
    }

    /// Restriction to span{|2n,+⟩, |2n+1,−⟩}.
    pub fn block(&self, n: usize) -> Option<Matrix2<f64>> {
        if 2 * n + 1 > self.n_trunc {
            return None;
        }
        let (a, b) = (basis_index(2 * n, Spin::Excited), basis_index(2 * n + 1, Spin::Ground));
        Some(Matrix2::new(
            self.matrix[(a, a)],
            self.matrix[(a, b)],
            self.matrix[(b, a)],
            self.matrix[(b, b)],
        ))
    }
}

fn sigma3() -> Matrix2<f64> {
    Matrix2::new(1.0, 0.0, 0.0, -1.0)
}

/// σ₋ = |−⟩⟨+|
fn sigma_minus() -> Matrix2<f64> {
    Matrix2::new(0.0, 0.0, 1.0, 0.0)
}

fn kron(field: &DMatrix<f64>, spin: &Matrix2<f64>) -> DMatrix<f64> {
    let spin = DMatrix::from_fn(2, 2, |i, j| spin[(i, j)]);
    field.kronecker(&spin)
}

fn free_field_part(ladder: &FockLadder, params: &ModelParams) -> DMatrix<f64> {
    let d = ladder.dim();
    let ada = ladder.raise_matrix() * ladder.lower_matrix();
    (ada + DMatrix::identity(d, d) * 0.5 + ladder.parity_matrix() * params.lambda().value()) * params.omega()
}

/// H = ω(𝔞†𝔞 + ½ + λR̂)⊗1 + (ω₀/2) 1⊗σ₃ + g(𝔞†⊗σ₋ + 𝔞⊗σ₊), assembled from the
/// truncated ladder matrices.
pub fn build_hamiltonian(params: &ModelParams, n_trunc: usize) -> Result<FullOperator> {
    let ladder = FockLadder::new(params.lambda(), n_trunc)?;
    let d = ladder.dim();
    let mut h = kron(&free_field_part(&ladder, params), &Matrix2::identity());
    h += kron(&DMatrix::identity(d, d), &(sigma3() * (0.5 * params.omega0())));
    let coupling = kron(&ladder.raise_matrix(), &sigma_minus()) * params.g();
    h += &coupling + coupling.transpose();
    FullOperator::from_matrix(n_trunc, h)
}

/// Free part H₀ = ω(𝔞†𝔞 + ½ + λR̂) + ½ω₀σ₃ (diagonal).
pub fn build_h0(params: &ModelParams, n_trunc: usize) -> Result<FullOperator> {
    let ladder = FockLadder::new(params.lambda(), n_trunc)?;
    let d = ladder.dim();
    let mut h0 = kron(&free_field_part(&ladder, params), &Matrix2::identity());
    h0 += kron(&DMatrix::identity(d, d), &(sigma3() * (0.5 * params.omega0())));
    FullOperator::from_matrix(n_trunc, h0)
}

/// Diagonalized H together with the diagonal of H₀, ready to evolve any
/// initial vector to any time.
#[derive(Debug, Clone)]
pub struct OracleEvolution {
    n_trunc: usize,
    energies: DVector<f64>,
    eigenvectors: DMatrix<f64>,
    h0_diag: Vec<f64>,
}

impl OracleEvolution {
    pub fn new(h: &FullOperator, h0: &FullOperator) -> Result<Self> {
        if h.dim() != h0.dim() {
            return Err(Error::DimensionMismatch(format!("H is {}-dim, H0 is {}-dim", h.dim(), h0.dim())));
        }
        let off_diag = h0.matrix().iter().enumerate().any(|(k, &x)| k % (h0.dim() + 1) != 0 && x != 0.0);
        if off_diag {
            return Err(Error::Eigen("H0 must be diagonal".into()));
        }
        let eig = h
            .matrix()
            .clone()
            .try_symmetric_eigen(f64::EPSILON, 0)
            .ok_or_else(|| Error::Eigen("symmetric eigensolver did not converge".into()))?;
        Ok(Self {
            n_trunc: h.n_trunc(),
            energies: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
            h0_diag: h0.diagonal(),
        })
    }

    pub fn n_trunc(&self) -> usize {
        self.n_trunc
    }

    pub fn energies(&self) -> &DVector<f64> {
        &self.energies
    }

    /// e^{+iH₀t} e^{−iHt} ψ₀.
    pub fn evolve(&self, psi0: &[Complex64], t: f64) -> Result<Vec<Complex64>> {
        let d = self.energies.len();
        if psi0.len() != d {
            return Err(Error::DimensionMismatch(format!("state has {} components, operator {d}", psi0.len())));
        }
        let v = &self.eigenvectors;
        // coefficients in the eigenbasis, then phases
        let coeffs: Vec<Complex64> = (0..d)
            .map(|k| {
                let c: Complex64 = (0..d).map(|i| psi0[i] * v[(i, k)]).sum();
                c * Complex64::from_polar(1.0, -self.energies[k] * t)
            })
            .collect();
        Ok((0..d)
            .map(|i| {
                let s: Complex64 = (0..d).map(|k| coeffs[k] * v[(i, k)]).sum();
                s * Complex64::from_polar(1.0, self.h0_diag[i] * t)
            })
            .collect())
    }
}

/// One-shot form: diagonalize H and evolve `psi0` to `t` in the interaction picture.
pub fn evolve_numeric(psi0: &[Complex64], h: &FullOperator, h0: &FullOperator, t: f64) -> Result<Vec<Complex64>> {
    OracleEvolution::new(h, h0)?.evolve(psi0, t)
}

/// Places a joint state into the product basis. Amplitudes on levels above
/// `n_trunc` cannot be represented; their total probability is returned.
pub fn embed(state: &JointState, n_trunc: usize) -> (Vec<Complex64>, f64) {
    let mut psi = vec![ZERO; 2 * (n_trunc + 1)];
    let mut dropped = 0.0;
    for n in 0..state.blocks() {
        for (level, spin, amp) in [(2 * n, Spin::Excited, state.c_plus[n]), (2 * n + 1, Spin::Ground, state.c_minus[n])] {
            if level <= n_trunc {
                psi[basis_index(level, spin)] = amp;
            } else {
                dropped += amp.norm_sqr();
            }
        }
    }
    (psi, dropped)
}

/// Probability outside the tracked sector {|2n,+⟩, |2n+1,−⟩}.
pub fn complementary_weight(psi: &[Complex64]) -> f64 {
    psi.iter()
        .enumerate()
        .filter(|(i, _)| {
            let (m, spin) = (i / 2, i % 2);
            (spin == 0) != (m % 2 == 0)
        })
        .map(|(_, c)| c.norm_sqr())
        .sum()
}

/// Oracle states on a time grid.
#[derive(Debug, Clone)]
pub struct OracleRun {
    pub n_trunc: usize,
    pub grid: Vec<f64>,
    pub states: Vec<Vec<Complex64>>,
}

/// Evolves the t = 0 state of `initial` over `grid` with the brute-force propagator.
pub fn oracle_run(initial: &JointState, n_trunc: usize, grid: &[f64]) -> Result<OracleRun> {
    check_grid(grid)?;
    let h = build_hamiltonian(&initial.params, n_trunc)?;
    let h0 = build_h0(&initial.params, n_trunc)?;
    oracle_run_with(&OracleEvolution::new(&h, &h0)?, initial, grid)
}

/// As [`oracle_run`] with a prepared propagator.
pub fn oracle_run_with(evolution: &OracleEvolution, initial: &JointState, grid: &[f64]) -> Result<OracleRun> {
    check_grid(grid)?;
    let (psi0, _) = embed(initial, evolution.n_trunc());
    let states = grid
        .par_iter()
        .map(|&t| evolution.evolve(&psi0, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(OracleRun {
        n_trunc: evolution.n_trunc(),
        grid: grid.to_vec(),
        states,
    })
}

/// Largest amplitude disagreement between closed form and oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Deviation {
    pub max_abs: f64,
    pub time: f64,
    /// Fock level of the worst component.
    pub level: usize,
    pub spin: Spin,
    /// Closed-form probability on levels the oracle cannot represent (max over the grid).
    pub unrepresented: f64,
}

/// Max over (t, basis index) of |closed-form − oracle|.
pub fn compare(trajectory: &JointTrajectory, run: &OracleRun) -> Result<Deviation> {
    if trajectory.grid.len() != run.grid.len() || trajectory.grid.iter().zip(&run.grid).any(|(a, b)| a != b) {
        return Err(Error::Grid("trajectory and oracle run use different grids".into()));
    }
    let mut worst = Deviation {
        max_abs: 0.0,
        time: trajectory.grid.first().copied().unwrap_or(0.0),
        level: 0,
        spin: Spin::Excited,
        unrepresented: 0.0,
    };
    for ((state, psi), &t) in trajectory.states.iter().zip(&run.states).zip(&run.grid) {
        let (closed, dropped) = embed(state, run.n_trunc);
        worst.unrepresented = worst.unrepresented.max(dropped);
        if dropped.sqrt() > worst.max_abs {
            worst.max_abs = dropped.sqrt();
            worst.time = t;
            worst.level = run.n_trunc + 1;
        }
        for (i, (a, b)) in closed.iter().zip(psi).enumerate() {
            let d = (a - b).norm();
            if d > worst.max_abs {
                worst.max_abs = d;
                worst.time = t;
                worst.level = i / 2;
                worst.spin = if i % 2 == 0 { Spin::Excited } else { Spin::Ground };
            }
        }
    }
    Ok(worst)
}
