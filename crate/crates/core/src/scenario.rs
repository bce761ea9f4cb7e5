//! Scenario runner behind the command-line tool: run configuration, spectrum
//! scans, observable time series and oracle validation, with their CSV and
//! JSON encodings.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{wcs_build, CatStateParams, DeformationParam, FieldState};
use crate::dynamics::{trajectory, uniform_grid, JointState, JointTrajectory};
use crate::error::{invalid, Error, Result};
use crate::observables::{atomic_inversion, entanglement, fidelity, mandel_q, squeezing};
use crate::oracle::{compare, oracle_run};
use crate::spectrum::{block_hamiltonian, dressed_pair, spectrum_scan, DetuningRange, ModelParams, SpectrumRow};

pub const DEVIATION_THRESHOLD: f64 = 1e-8;
pub const SPECTRUM_RESIDUAL_THRESHOLD: f64 = 1e-10;
pub const NORM_DEFECT_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservableKind {
    Inversion,
    Fidelity,
    Entropy,
    MandelQ,
    Squeezing,
}

impl ObservableKind {
    pub const ALL: [ObservableKind; 5] = [
        ObservableKind::Inversion,
        ObservableKind::Fidelity,
        ObservableKind::Entropy,
        ObservableKind::MandelQ,
        ObservableKind::Squeezing,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ObservableKind::Inversion => "inversion",
            ObservableKind::Fidelity => "fidelity",
            ObservableKind::Entropy => "entropy",
            ObservableKind::MandelQ => "mandel_q",
            ObservableKind::Squeezing => "squeezing",
        }
    }

    fn columns(self) -> &'static [&'static str] {
        match self {
            ObservableKind::Inversion => &["inversion"],
            ObservableKind::Fidelity => &["fidelity"],
            ObservableKind::Entropy => &["entropy", "g_plus", "g_minus"],
            ObservableKind::MandelQ => &["mandel_q"],
            ObservableKind::Squeezing => &["s_x", "s_p", "sigma_xx", "sigma_pp", "bound"],
        }
    }
}

impl fmt::Display for ObservableKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ObservableKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ObservableKind::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| invalid("observables", format!("unknown observable `{s}`")))
    }
}

/// Parses a comma-separated observable list such as `inversion,entropy`.
pub fn parse_observables(list: &str) -> Result<Vec<ObservableKind>> {
    list.split(',').filter(|s| !s.trim().is_empty()).map(str::parse).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumConfig {
    pub n_list: Vec<usize>,
    pub delta_start: f64,
    pub delta_end: f64,
    pub delta_step: f64,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self {
            n_list: vec![1, 2],
            delta_start: -0.1,
            delta_end: 0.1,
            delta_step: 0.001,
        }
    }
}

/// A single JSON run description. Defaults: ω = 1, g = 0.01, |w|² = 30,
/// λ = 0, Δ = 0, gt ∈ [0, 200] on 2001 points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub omega: f64,
    /// Atomic frequency; defaults to ω − Δ.
    pub omega0: Option<f64>,
    /// Detuning Δ = ω − ω₀; defaults to 0 when ω₀ is not given.
    pub delta: Option<f64>,
    pub g: f64,
    pub lambda: f64,
    pub w_mod_sq: f64,
    pub w_phase: f64,
    /// Final scaled time gt.
    pub t_max_scaled: f64,
    /// Final absolute time; required (and only used) when g = 0.
    pub t_max: Option<f64>,
    pub n_points: usize,
    pub tail_tol: f64,
    pub n_trunc_override: Option<usize>,
    pub observables: Vec<ObservableKind>,
    pub with_oracle: bool,
    pub spectrum: SpectrumConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            omega: 1.0,
            omega0: None,
            delta: None,
            g: 0.01,
            lambda: 0.0,
            w_mod_sq: 30.0,
            w_phase: 0.0,
            t_max_scaled: 200.0,
            t_max: None,
            n_points: 2001,
            tail_tol: crate::algebra::DEFAULT_TAIL_TOL,
            n_trunc_override: None,
            observables: ObservableKind::ALL.to_vec(),
            with_oracle: false,
            spectrum: SpectrumConfig::default(),
        }
    }
}

fn finite(field: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(field, "must be finite"))
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| invalid("config", e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn lambda(&self) -> Result<DeformationParam> {
        DeformationParam::new(finite("lambda", self.lambda)?)
    }

    pub fn model_params(&self) -> Result<ModelParams> {
        let omega = finite("omega", self.omega)?;
        let omega0 = match (self.omega0, self.delta) {
            (Some(w0), None) => finite("omega0", w0)?,
            (None, Some(d)) => omega - finite("delta", d)?,
            (None, None) => omega,
            (Some(w0), Some(d)) => {
                let w0 = finite("omega0", w0)?;
                if ((omega - w0) - finite("delta", d)?).abs() > 1e-12 * omega.abs().max(1.0) {
                    return Err(invalid("delta", format!("inconsistent with omega - omega0 = {}", omega - w0)));
                }
                w0
            }
        };
        ModelParams::new(omega, omega0, finite("g", self.g)?, self.lambda()?)
    }

    pub fn cat_params(&self) -> Result<CatStateParams> {
        CatStateParams::new(self.w_mod_sq, self.w_phase)
    }

    pub fn field_state(&self) -> Result<FieldState> {
        wcs_build(self.cat_params()?, self.lambda()?, self.tail_tol)
    }

    /// Time grid: `axis` holds the reported values (gt, or t when g = 0),
    /// `times` the absolute times.
    pub fn time_axis(&self) -> Result<TimeAxis> {
        if self.n_points < 2 {
            return Err(invalid("n_points", format!("need at least 2, got {}", self.n_points)));
        }
        if self.g > 0.0 {
            if !(self.t_max_scaled.is_finite() && self.t_max_scaled > 0.0) {
                return Err(invalid("t_max_scaled", format!("must be > 0 (degenerate grid), got {}", self.t_max_scaled)));
            }
            let axis = uniform_grid(self.t_max_scaled, self.n_points)?;
            let times = axis.iter().map(|gt| gt / self.g).collect();
            Ok(TimeAxis { label: "gt", axis, times })
        } else {
            let t_max = self.t_max.ok_or_else(|| invalid("t_max", "required when g = 0 (no scaled time axis)"))?;
            if !(t_max.is_finite() && t_max > 0.0) {
                return Err(invalid("t_max", format!("must be > 0 (degenerate grid), got {t_max}")));
            }
            let axis = uniform_grid(t_max, self.n_points)?;
            Ok(TimeAxis { label: "t", times: axis.clone(), axis })
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.model_params()?;
        self.cat_params()?;
        finite("tail_tol", self.tail_tol)?;
        self.time_axis()?;
        if self.observables.is_empty() {
            return Err(invalid("observables", "at least one observable is required"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeAxis {
    pub label: &'static str,
    pub axis: Vec<f64>,
    pub times: Vec<f64>,
}

/// Full-precision number formatting used in every CSV.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn run_spectrum(config: &RunConfig) -> Result<Vec<SpectrumRow>> {
    let s = &config.spectrum;
    let range = DetuningRange {
        start: s.delta_start,
        end: s.delta_end,
        step: s.delta_step,
    };
    spectrum_scan(&s.n_list, finite("omega", config.omega)?, finite("g", config.g)?, config.lambda()?, &range)
}

pub fn write_spectrum_csv<W: Write>(rows: &[SpectrumRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "n,delta,e_plus,e_minus")?;
    for r in rows {
        writeln!(out, "{},{},{},{}", r.n, fmt_num(r.delta), fmt_num(r.e_plus), fmt_num(r.e_minus))?;
    }
    Ok(())
}

/// Observable columns on a time grid; `None` marks an undefined value.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSeries {
    pub time_label: &'static str,
    pub columns: Vec<&'static str>,
    pub axis: Vec<f64>,
    pub rows: Vec<Vec<Option<f64>>>,
}

/// Column names in schema order for a set of observables.
pub fn series_columns(observables: &[ObservableKind]) -> Vec<&'static str> {
    ObservableKind::ALL
        .into_iter()
        .filter(|k| observables.contains(k))
        .flat_map(|k| k.columns().iter().copied())
        .collect()
}

fn row_values(kind: ObservableKind, initial: &JointState, state: &JointState) -> Vec<Option<f64>> {
    match kind {
        ObservableKind::Inversion => vec![Some(atomic_inversion(state))],
        ObservableKind::Fidelity => vec![fidelity(initial, state).ok()],
        ObservableKind::Entropy => {
            let e = entanglement(state);
            vec![Some(e.entropy), Some(e.g_plus), Some(e.g_minus)]
        }
        ObservableKind::MandelQ => vec![mandel_q(state).ok().map(|q| q.mandel_q)],
        ObservableKind::Squeezing => {
            let s = squeezing(state);
            [s.s_x, s.s_p, s.sigma_xx, s.sigma_pp, s.bound]
                .into_iter()
                .map(|v| v.is_finite().then_some(v))
                .collect()
        }
    }
}

pub fn observable_series(traj: &JointTrajectory, axis: &TimeAxis, observables: &[ObservableKind]) -> ObservableSeries {
    let kinds: Vec<ObservableKind> = ObservableKind::ALL.into_iter().filter(|k| observables.contains(k)).collect();
    let rows = match traj.states.first() {
        None => Vec::new(),
        Some(initial) => traj
            .states
            .par_iter()
            .map(|s| kinds.iter().flat_map(|&k| row_values(k, initial, s)).collect())
            .collect(),
    };
    ObservableSeries {
        time_label: axis.label,
        columns: series_columns(observables),
        axis: axis.axis.clone(),
        rows,
    }
}

pub fn write_series_csv<W: Write>(series: &ObservableSeries, mut out: W) -> std::io::Result<()> {
    let mut header = vec![series.time_label];
    header.extend(&series.columns);
    writeln!(out, "{}", header.join(","))?;
    for (t, row) in series.axis.iter().zip(&series.rows) {
        let mut line = fmt_num(*t);
        for v in row {
            line.push(',');
            if let Some(x) = v {
                line.push_str(&fmt_num(*x));
            }
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColumnSummary {
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub arg_gt_min: Option<f64>,
    pub arg_gt_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionSummary {
    pub norm_defect_max: f64,
    pub oracle_deviation_max: Option<f64>,
    pub per_observable: BTreeMap<String, ColumnSummary>,
}

impl EvolutionSummary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }
}

fn summarize_column(axis: &[f64], values: impl Iterator<Item = Option<f64>>) -> ColumnSummary {
    let mut s = ColumnSummary {
        min: None,
        max: None,
        arg_gt_min: None,
        arg_gt_max: None,
    };
    for (t, v) in axis.iter().zip(values) {
        let Some(v) = v else { continue };
        if s.min.is_none_or(|m| v < m) {
            s.min = Some(v);
            s.arg_gt_min = Some(*t);
        }
        if s.max.is_none_or(|m| v > m) {
            s.max = Some(v);
            s.arg_gt_max = Some(*t);
        }
    }
    s
}

pub fn norm_defect_max(traj: &JointTrajectory) -> f64 {
    let Some(first) = traj.states.first() else { return 0.0 };
    let n0 = first.norm_sqr();
    traj.states.iter().map(|s| (s.norm_sqr() - n0).abs()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionOutput {
    pub series: ObservableSeries,
    pub summary: EvolutionSummary,
}

/// Excited atom + cat state, evolved over the configured grid. The oracle
/// comparison is included when `config.with_oracle` is set.
pub fn run_evolution(config: &RunConfig) -> Result<EvolutionOutput> {
    config.validate()?;
    let params = config.model_params()?;
    let field = config.field_state()?;
    let axis = config.time_axis()?;
    let traj = trajectory(&field, &params, &axis.times)?;
    let series = observable_series(&traj, &axis, &config.observables);

    let oracle_deviation_max = if config.with_oracle {
        let n_trunc = config.n_trunc_override.unwrap_or_else(|| field.required_n_trunc());
        let run = oracle_run(&traj.states[0], n_trunc, &axis.times)?;
        Some(compare(&traj, &run)?.max_abs)
    } else {
        None
    };

    let per_observable = series
        .columns
        .iter()
        .enumerate()
        .map(|(j, name)| (name.to_string(), summarize_column(&series.axis, series.rows.iter().map(|r| r[j]))))
        .collect();
    Ok(EvolutionOutput {
        summary: EvolutionSummary {
            norm_defect_max: norm_defect_max(&traj),
            oracle_deviation_max,
            per_observable,
        },
        series,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub failures: Vec<String>,
    pub n_trunc_used: usize,
    pub n_trunc_required: usize,
    /// Max |closed form − oracle| over grid and basis.
    pub amplitude_deviation_max: f64,
    pub deviation_at: f64,
    pub deviation_level: usize,
    /// Max relative dressed-pair residual ‖Hv − ev‖/‖H‖ over the populated blocks.
    pub spectrum_residual_max: f64,
    pub norm_defect_closed_form: f64,
    pub norm_defect_oracle: f64,
    /// Closed-form probability on levels beyond the oracle truncation.
    pub truncation_leakage: f64,
    /// Oracle population of the top retained Fock level.
    pub boundary_population: f64,
    pub thresholds: BTreeMap<String, f64>,
}

impl ValidationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn run_validate(config: &RunConfig) -> Result<ValidationReport> {
    config.validate()?;
    let params = config.model_params()?;
    let field = config.field_state()?;
    let axis = config.time_axis()?;
    let traj = trajectory(&field, &params, &axis.times)?;
    let required = field.required_n_trunc();
    let n_trunc = config.n_trunc_override.unwrap_or(required);
    let run = oracle_run(&traj.states[0], n_trunc, &axis.times)?;
    let deviation = compare(&traj, &run)?;

    let spectrum_residual_max = (0..field.amplitudes().len())
        .map(|n| {
            let h = block_hamiltonian(n, &params);
            dressed_pair(n, &params).residual(&h) / h.norm()
        })
        .fold(0.0, f64::max);

    let n0: f64 = run.states[0].iter().map(|c| c.norm_sqr()).sum();
    let norm_defect_oracle = run
        .states
        .iter()
        .map(|psi| (psi.iter().map(|c| c.norm_sqr()).sum::<f64>() - n0).abs())
        .fold(0.0, f64::max);
    let norm_defect_closed_form = norm_defect_max(&traj);
    let boundary_population = run
        .states
        .iter()
        .map(|psi| psi[2 * n_trunc].norm_sqr() + psi[2 * n_trunc + 1].norm_sqr())
        .fold(0.0, f64::max);

    // axis value at which the worst deviation occurred
    let deviation_at = axis
        .times
        .iter()
        .position(|&t| t == deviation.time)
        .map_or(deviation.time, |i| axis.axis[i]);

    let mut failures = Vec::new();
    if n_trunc < required || deviation.unrepresented > 0.0 {
        failures.push(format!(
            "truncation_boundary_leakage: n_trunc = {n_trunc} < required {required}; \
             closed-form probability beyond the boundary {:.3e}, boundary population {:.3e}",
            deviation.unrepresented, boundary_population
        ));
    }
    if !(deviation.max_abs <= DEVIATION_THRESHOLD) {
        failures.push(format!(
            "amplitude_deviation: {:.3e} > {DEVIATION_THRESHOLD:e} at {} = {deviation_at}, level {}",
            deviation.max_abs, axis.label, deviation.level
        ));
    }
    if !(spectrum_residual_max <= SPECTRUM_RESIDUAL_THRESHOLD) {
        failures.push(format!("spectrum_residual: {spectrum_residual_max:.3e} > {SPECTRUM_RESIDUAL_THRESHOLD:e}"));
    }
    let norm_defect = norm_defect_closed_form.max(norm_defect_oracle);
    if !(norm_defect <= NORM_DEFECT_THRESHOLD) {
        failures.push(format!("norm_defect: {norm_defect:.3e} > {NORM_DEFECT_THRESHOLD:e}"));
    }

    let thresholds = [
        ("amplitude_deviation", DEVIATION_THRESHOLD),
        ("spectrum_residual", SPECTRUM_RESIDUAL_THRESHOLD),
        ("norm_defect", NORM_DEFECT_THRESHOLD),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();

    Ok(ValidationReport {
        passed: failures.is_empty(),
        failures,
        n_trunc_used: n_trunc,
        n_trunc_required: required,
        amplitude_deviation_max: deviation.max_abs,
        deviation_at,
        deviation_level: deviation.level,
        spectrum_residual_max,
        norm_defect_closed_form,
        norm_defect_oracle,
        truncation_leakage: deviation.unrepresented,
        boundary_population,
        thresholds,
    })
}
