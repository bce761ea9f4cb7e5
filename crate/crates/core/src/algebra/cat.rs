//! Wigner cat states: even-sector eigenstates of 𝔞² normalized with a
//! modified Bessel function.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::special::{ln_bessel_i, ln_gamma};
use super::{DeformationParam, FockLadder};
use crate::error::{invalid, Error, Result};

pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

/// Default hard cap on the number of retained even levels.
pub const DEFAULT_MAX_EVEN_LEVELS: usize = 2048;

/// Cat-state label w = |w| e^{iφ}, given as |w|² and φ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CatStateParams {
    pub modulus_sq: f64,
    pub phase: f64,
}

impl CatStateParams {
    pub fn new(modulus_sq: f64, phase: f64) -> Result<Self> {
        if !modulus_sq.is_finite() || modulus_sq < 0.0 {
            return Err(invalid("w_mod_sq", format!("must be finite and >= 0, got {modulus_sq}")));
        }
        if !phase.is_finite() {
            return Err(invalid("w_phase", "must be finite"));
        }
        Ok(Self { modulus_sq, phase })
    }

    /// w² = |w|² e^{2iφ}, the 𝔞² eigenvalue.
    pub fn w_squared(&self) -> Complex64 {
        Complex64::from_polar(self.modulus_sq, 2.0 * self.phase)
    }
}

/// Field amplitudes c₂ₙ over the even Fock levels 2n, n = 0..amplitudes.len().
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    lambda: DeformationParam,
    amplitudes: Vec<Complex64>,
    tail_mass: f64,
}

impl FieldState {
    /// User-supplied even-sector amplitudes. `Σ|c₂ₙ|²` must not exceed one; the
    /// shortfall is booked as tail mass.
    pub fn from_even_amplitudes(lambda: DeformationParam, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(invalid("amplitudes", "at least one even level is required"));
        }
        if amplitudes.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(invalid("amplitudes", "must be finite"));
        }
        let norm: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if norm > 1.0 + 1e-12 {
            return Err(invalid("amplitudes", format!("squared norm {norm} exceeds 1")));
        }
        Ok(Self {
            lambda,
            amplitudes,
            tail_mass: (1.0 - norm).max(0.0),
        })
    }

    pub fn vacuum(lambda: DeformationParam) -> Self {
        Self {
            lambda,
            amplitudes: vec![Complex64::new(1.0, 0.0)],
            tail_mass: 0.0,
        }
    }

    pub fn lambda(&self) -> DeformationParam {
        self.lambda
    }

    /// c₂ₙ(0) indexed by n.
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// Largest retained n (the state lives on levels up to 2·n_even_max).
    pub fn n_even_max(&self) -> usize {
        self.amplitudes.len() - 1
    }

    /// Fock truncation needed so that one raising step never leaves the space.
    pub fn required_n_trunc(&self) -> usize {
        2 * self.n_even_max() + 2
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Dense vector over Fock levels `0..=n_trunc`.
    pub fn to_fock_vector(&self, n_trunc: usize) -> Result<Vec<Complex64>> {
        if 2 * self.n_even_max() > n_trunc {
            return Err(Error::Truncation {
                required: 2 * self.n_even_max(),
                actual: n_trunc,
            });
        }
        let mut v = vec![Complex64::new(0.0, 0.0); n_trunc + 1];
        for (n, c) in self.amplitudes.iter().enumerate() {
            v[2 * n] = *c;
        }
        Ok(v)
    }
}

/// Builds the Wigner cat state |w⟩_{λ,+} with the default level cap.
pub fn wcs_build(params: CatStateParams, lambda: DeformationParam, tail_tol: f64) -> Result<FieldState> {
    wcs_build_capped(params, lambda, tail_tol, DEFAULT_MAX_EVEN_LEVELS)
}

/// Builds |w⟩_{λ,+} keeping at most `max_even_levels` even levels.
///
/// Probabilities are
///
/// ```text
/// |c₂ₙ|² = (|w|²/2)^{2n+λ-1/2} / (n! Γ(n+λ+1/2) I_{λ-1/2}(|w|²))
/// ```
///
/// and the phase of c₂ₙ is e^{2inφ}. The cutoff n_even_max is the smallest n
/// for which both the discarded tail and the boundary term `|w|⁴|c₂ₙ|²` fall
/// below `tail_tol`; the second condition bounds the 𝔞² eigen-residual of the
/// truncated state by √tail_tol.
pub fn wcs_build_capped(
    params: CatStateParams,
    lambda: DeformationParam,
    tail_tol: f64,
    max_even_levels: usize,
) -> Result<FieldState> {
    if !(tail_tol > 0.0 && tail_tol <= 1e-6) {
        return Err(invalid("tail_tol", format!("must lie in (0, 1e-6], got {tail_tol}")));
    }
    let z = params.modulus_sq;
    if z == 0.0 {
        return Ok(FieldState::vacuum(lambda));
    }

    let l = lambda.value();
    let ln_half_z = (0.5 * z).ln();
    let ln_norm = ln_bessel_i(l - 0.5, z)?;
    let log_prob = |n: usize| -> Result<f64> {
        let nf = n as f64;
        Ok((2.0 * nf + l - 0.5) * ln_half_z - ln_gamma(nf + 1.0)? - ln_gamma(nf + l + 0.5)? - ln_norm)
    };

    // Generate well past the peak so the suffix sums below resolve the tail.
    const NEGLIGIBLE_LOG: f64 = -80.0;
    let generation_cap = 2 * max_even_levels + 64;
    let mut probs: Vec<f64> = Vec::new();
    let mut prev = f64::NEG_INFINITY;
    loop {
        let n = probs.len();
        if n > generation_cap {
            return Err(Error::TruncationBudget(format!(
                "|w|^2 = {z} needs more than {max_even_levels} even levels"
            )));
        }
        let lp = log_prob(n)?;
        probs.push(lp.exp());
        if lp < prev && lp < NEGLIGIBLE_LOG {
            break;
        }
        prev = lp;
    }

    // suffix[n] = Σ_{m ≥ n} p_m, summed from the small end.
    let mut suffix = vec![0.0; probs.len() + 1];
    for n in (0..probs.len()).rev() {
        suffix[n] = suffix[n + 1] + probs[n];
    }

    let boundary_weight = (z * z).max(1.0);
    let cutoff = (0..probs.len())
        .find(|&n| suffix[n + 1] < tail_tol && probs[n] * boundary_weight < tail_tol)
        .ok_or_else(|| Error::TruncationBudget("no admissible cutoff found".into()))?;
    if cutoff + 1 > max_even_levels {
        return Err(Error::TruncationBudget(format!(
            "|w|^2 = {z}, lambda = {l} needs {} even levels, cap is {max_even_levels}",
            cutoff + 1
        )));
    }

    let amplitudes = (0..=cutoff)
        .map(|n| Complex64::from_polar(probs[n].sqrt(), 2.0 * n as f64 * params.phase))
        .collect();
    Ok(FieldState {
        lambda,
        amplitudes,
        tail_mass: suffix[cutoff + 1],
    })
}

/// ‖𝔞²|state⟩ − w²|state⟩‖ evaluated with the truncated ladder matrices.
pub fn wcs_eigenstate_residual(state: &FieldState, params: CatStateParams, ladder: &FockLadder) -> Result<f64> {
    let required = state.required_n_trunc();
    if ladder.n_trunc() < required {
        return Err(Error::Truncation {
            required,
            actual: ladder.n_trunc(),
        });
    }
    let psi = state.to_fock_vector(ladder.n_trunc())?;
    let a2 = ladder.apply_lower(&ladder.apply_lower(&psi)?)?;
    let w2 = params.w_squared();
    Ok(a2
        .iter()
        .zip(&psi)
        .map(|(x, p)| (x - w2 * p).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lam(l: f64) -> DeformationParam {
        DeformationParam::new(l).unwrap()
    }

    #[test]
    fn undeformed_vacuum_probability_is_sech() {
        let s = wcs_build(CatStateParams::new(1.0, 0.0).unwrap(), lam(0.0), 1e-12).unwrap();
        let p0 = s.amplitudes()[0].norm_sqr();
        assert!((p0 - 1.0 / 1f64.cosh()).abs() < 1e-14);
        assert!((p0 - 0.648_054).abs() < 1e-6);
    }

    #[test]
    fn undeformed_distribution_matches_even_cat() {
        // |c₂ₙ|² = x^{2n} / ((2n)! cosh x) at λ = 0
        let x: f64 = 4.0;
        let s = wcs_build(CatStateParams::new(x, 0.3).unwrap(), lam(0.0), 1e-12).unwrap();
        let mut fact = 1.0f64;
        for (n, c) in s.amplitudes().iter().enumerate() {
            if n > 0 {
                fact *= (2 * n - 1) as f64 * (2 * n) as f64;
            }
            let expected = x.powi(2 * n as i32) / (fact * x.cosh());
            assert!((c.norm_sqr() - expected).abs() < 1e-14 * (1.0 + expected), "n = {n}");
        }
    }

    #[test]
    fn vacuum_limit() {
        let s = wcs_build(CatStateParams::new(0.0, 1.0).unwrap(), lam(3.0), 1e-12).unwrap();
        assert_eq!(s.amplitudes(), &[Complex64::new(1.0, 0.0)]);
        assert_eq!(s.tail_mass(), 0.0);
        let ladder = FockLadder::new(lam(3.0), s.required_n_trunc()).unwrap();
        assert_eq!(wcs_eigenstate_residual(&s, CatStateParams::new(0.0, 1.0).unwrap(), &ladder).unwrap(), 0.0);
    }

    #[test]
    fn eigenstate_residual_examples() {
        for &(z, l) in &[(1.0, 0.0), (9.0, 10.0)] {
            let p = CatStateParams::new(z, 0.0).unwrap();
            let s = wcs_build(p, lam(l), 1e-12).unwrap();
            let ladder = FockLadder::new(lam(l), s.required_n_trunc()).unwrap();
            let r = wcs_eigenstate_residual(&s, p, &ladder).unwrap();
            assert!(r < 1e-5, "|w|^2 = {z}, λ = {l}: residual {r}");
        }
    }

    #[test]
    fn residual_requires_room_for_one_raise() {
        let p = CatStateParams::new(2.0, 0.0).unwrap();
        let s = wcs_build(p, lam(1.0), 1e-12).unwrap();
        let small = FockLadder::new(lam(1.0), s.required_n_trunc() - 1).unwrap();
        assert!(matches!(
            wcs_eigenstate_residual(&s, p, &small),
            Err(Error::Truncation { .. })
        ));
    }

    #[test]
    fn hard_cap_is_enforced() {
        let p = CatStateParams::new(100.0, 0.0).unwrap();
        assert!(matches!(
            wcs_build_capped(p, lam(0.0), 1e-12, 10),
            Err(Error::TruncationBudget(_))
        ));
        // and a large-argument state builds within the default cap
        let s = wcs_build(p, lam(200.0), 1e-12).unwrap();
        assert!((s.norm_sqr() + s.tail_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tail_tol_domain() {
        let p = CatStateParams::new(1.0, 0.0).unwrap();
        assert!(wcs_build(p, lam(0.0), 0.0).is_err());
        assert!(wcs_build(p, lam(0.0), 1e-3).is_err());
        assert!(CatStateParams::new(-1.0, 0.0).is_err());
    }

    #[test]
    fn normalization_improves_monotonically_with_tighter_tolerance() {
        let p = CatStateParams::new(30.0, 0.0).unwrap();
        let mut last = 0.0;
        for tol in [1e-6, 1e-8, 1e-10, 1e-12, 1e-14] {
            let s = wcs_build(p, lam(2.0), tol).unwrap();
            assert!(s.tail_mass() < tol);
            let norm = s.norm_sqr();
            assert!(norm >= last);
            last = norm;
        }
        assert!((1.0 - last).abs() < 1e-13);
    }

    #[test]
    fn user_supplied_amplitudes() {
        let amps = vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        let s = FieldState::from_even_amplitudes(lam(0.0), amps).unwrap();
        assert!(s.tail_mass() < 1e-15);
        let too_big = vec![Complex64::new(1.0, 0.0), Complex64::new(0.1, 0.0)];
        assert!(FieldState::from_even_amplitudes(lam(0.0), too_big).is_err());
        assert!(FieldState::from_even_amplitudes(lam(0.0), vec![]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn normalization_and_tail(z in 0.0f64..100.0, l in -0.49f64..200.0, phi in -3.2f64..3.2) {
            let s = wcs_build(CatStateParams::new(z, phi).unwrap(), lam(l), 1e-12).unwrap();
            prop_assert!(s.tail_mass() < 1e-12);
            prop_assert!((s.norm_sqr() + s.tail_mass() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn probabilities_do_not_depend_on_phase(z in 0.1f64..50.0, l in -0.49f64..50.0, phi in -3.2f64..3.2) {
            let a = wcs_build(CatStateParams::new(z, 0.0).unwrap(), lam(l), 1e-12).unwrap();
            let b = wcs_build(CatStateParams::new(z, phi).unwrap(), lam(l), 1e-12).unwrap();
            prop_assert_eq!(a.amplitudes().len(), b.amplitudes().len());
            for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
                prop_assert!((x.norm_sqr() - y.norm_sqr()).abs() < 1e-15);
            }
        }
    }
}
