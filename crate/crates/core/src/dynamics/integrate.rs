//! Fixed-step fourth-order Runge-Kutta integration of the master equation.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::feedback::FeedbackScheme;
use super::observables::ObservableSet;
use super::Generator;
use crate::error::{Error, Result};
use crate::model::CollapseChannel;
use crate::operator::{DensityMatrix, SparseOperator};

pub const TRAJECTORY_HEADER: &str = "t,fidelity_T1,pop_T1,pop_T2,pop_T3,pop_gLg0,pop_gRg0,pop_gagL,trace_drift";

const STANDARD: [&str; 6] = ["T1", "T2", "T3", "gLg0", "gRg0", "gagL"];

#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorConfig {
    /// Requested step; shortened so that a whole number of steps ends at `t_final`.
    pub step: f64,
    pub t_final: f64,
    /// Steps between recorded samples.
    pub record_every: usize,
    pub trace_tolerance: f64,
    pub positivity_tolerance: f64,
    /// Samples between eigenvalue checks; the last sample is always checked.
    pub positivity_every: usize,
    /// `‖dρ/dt‖_max` below which a sample counts as stationary.
    pub steady_tolerance: f64,
    /// Consecutive stationary samples needed to call the state steady.
    pub steady_window: usize,
}

impl IntegratorConfig {
    /// Step used for the full model, well below `1/(δ+J)`.
    pub const FULL_STEP: f64 = 0.02;
    /// Upper bound on effective-model steps.
    pub const MAX_EFFECTIVE_STEP: f64 = 2.0;

    pub fn new(step: f64, t_final: f64) -> Result<Self> {
        let c = IntegratorConfig {
            step,
            t_final,
            record_every: 1,
            trace_tolerance: 1e-6,
            positivity_tolerance: 1e-8,
            positivity_every: 10,
            steady_tolerance: 1e-9,
            steady_window: 100,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn full(t_final: f64) -> Result<Self> {
        Self::new(Self::FULL_STEP, t_final)
    }

    /// Step `0.5 / (2‖H‖_F + Σ‖L‖_F²)`, capped at [`Self::MAX_EFFECTIVE_STEP`].
    pub fn effective(h: &SparseOperator, channels: &[CollapseChannel], t_final: f64) -> Result<Self> {
        let scale = 2.0 * h.frobenius_norm()
            + channels
                .iter()
                .map(|c| c.operator.frobenius_norm().powi(2))
                .sum::<f64>();
        let step = if scale > 0.0 {
            (0.5 / scale).min(Self::MAX_EFFECTIVE_STEP)
        } else {
            Self::MAX_EFFECTIVE_STEP
        };
        Self::new(step.min(t_final), t_final)
    }

    /// Sets `record_every` for roughly `samples` recorded points after `t = 0`.
    pub fn with_samples(mut self, samples: usize) -> Self {
        let steps = self.steps();
        self.record_every = (steps / samples.max(1)).max(1);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.step.is_finite() || self.step <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "step must be positive, got {}",
                self.step
            )));
        }
        if !self.t_final.is_finite() || self.t_final < self.step {
            return Err(Error::InvalidConfig(format!(
                "t_final = {} must be at least one step ({})",
                self.t_final, self.step
            )));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidConfig("record_every must be at least 1".into()));
        }
        Ok(())
    }

    /// Number of steps actually taken.
    pub fn steps(&self) -> usize {
        let n = self.t_final / self.step;
        let r = n.round();
        if (n - r).abs() < 1e-9 * n.max(1.0) {
            r as usize
        } else {
            n.ceil() as usize
        }
    }

    /// Step actually taken.
    pub fn effective_step(&self) -> f64 {
        self.t_final / self.steps() as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// Overlap with the first observable.
    pub fidelity: Vec<f64>,
    pub populations: Vec<Series>,
    pub trace_drift: Vec<f64>,
    pub hermiticity_error: Vec<f64>,
    /// `(t, smallest eigenvalue)` at the checked samples.
    pub min_eigenvalues: Vec<(f64, f64)>,
    /// `‖dρ/dt‖_max` per sample.
    pub rhs_norm: Vec<f64>,
    /// Start of the final run of stationary samples, if long enough.
    pub steady_since: Option<f64>,
    pub final_state: DensityMatrix,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_fidelity(&self) -> f64 {
        *self.fidelity.last().unwrap_or(&f64::NAN)
    }

    pub fn population(&self, label: &str) -> Option<&[f64]> {
        self.populations
            .iter()
            .find(|s| s.label == label)
            .map(|s| s.values.as_slice())
    }

    pub fn final_population(&self, label: &str) -> Option<f64> {
        self.population(label).and_then(|v| v.last().copied())
    }

    pub fn max_trace_drift(&self) -> f64 {
        self.trace_drift.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_hermiticity_error(&self) -> f64 {
        self.hermiticity_error.iter().copied().fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalues.iter().map(|p| p.1).fold(f64::INFINITY, f64::min)
    }

    /// Fidelity at the last sample with `t ≤ t`.
    pub fn fidelity_at(&self, t: f64) -> Option<f64> {
        let i = self.times.partition_point(|&s| s <= t + 1e-9);
        i.checked_sub(1).map(|i| self.fidelity[i])
    }
}

/// Integrates `dρ/dt = -i[H,ρ] + Σ D[L]ρ` from `t = 0` to `config.t_final`.
pub fn evolve(
    rho0: &DensityMatrix,
    h: &SparseOperator,
    channels: &[CollapseChannel],
    config: &IntegratorConfig,
    observables: &ObservableSet,
) -> Result<Trajectory> {
    run(rho0, &Generator::new(h, channels, None)?, config, observables)
}

/// As [`evolve`], with each jump followed by its feedback unitary:
/// `U L ρ L† U†` replaces `L ρ L†` while the decay terms are unchanged.
pub fn evolve_with_feedback(
    rho0: &DensityMatrix,
    h: &SparseOperator,
    channels: &[CollapseChannel],
    feedback: &FeedbackScheme,
    config: &IntegratorConfig,
    observables: &ObservableSet,
) -> Result<Trajectory> {
    run(rho0, &Generator::new(h, channels, Some(feedback))?, config, observables)
}

struct Recorder<'a> {
    traj: Trajectory,
    config: &'a IntegratorConfig,
    observables: &'a ObservableSet,
    stationary_run: usize,
    run_start: f64,
    samples: usize,
}

impl Recorder<'_> {
    fn record(&mut self, t: f64, rho: &DMatrix<Complex64>, rhs: &DMatrix<Complex64>, last: bool) -> Result<()> {
        if !rho.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite { t });
        }
        let state = DensityMatrix::from_matrix(rho.clone());
        let drift = (state.trace() - Complex64::new(1.0, 0.0)).norm();
        if drift > self.config.trace_tolerance {
            return Err(Error::TraceDrift { t, drift });
        }
        let values = self.observables.measure(&state)?;
        let traj = &mut self.traj;
        traj.times.push(t);
        traj.fidelity.push(values[0]);
        for (s, v) in traj.populations.iter_mut().zip(values) {
            s.values.push(v);
        }
        traj.trace_drift.push(drift);
        traj.hermiticity_error.push(state.hermiticity_error());
        let every = self.config.positivity_every;
        if last || (every > 0 && self.samples.is_multiple_of(every)) {
            traj.min_eigenvalues.push((t, state.min_eigenvalue()));
        }
        let norm = rhs.iter().map(|z| z.norm()).fold(0.0, f64::max);
        traj.rhs_norm.push(norm);
        if norm < self.config.steady_tolerance {
            if self.stationary_run == 0 {
                self.run_start = t;
            }
            self.stationary_run += 1;
            if self.stationary_run >= self.config.steady_window && traj.steady_since.is_none() {
                traj.steady_since = Some(self.run_start);
            }
        } else {
            self.stationary_run = 0;
            traj.steady_since = None;
        }
        self.samples += 1;
        if last {
            traj.final_state = state;
        }
        Ok(())
    }
}

fn run(
    rho0: &DensityMatrix,
    gen: &Generator,
    config: &IntegratorConfig,
    observables: &ObservableSet,
) -> Result<Trajectory> {
    config.validate()?;
    let n = gen.dim();
    if rho0.dim() != n {
        return Err(Error::DimensionMismatch {
            left: rho0.dim(),
            right: n,
        });
    }
    if observables.dim() != n {
        return Err(Error::DimensionMismatch {
            left: observables.dim(),
            right: n,
        });
    }
    rho0.validate(config.trace_tolerance.max(1e-10))?;

    // Blocks the initial state does not touch stay empty, so integrate on the rest.
    let m = rho0.as_matrix();
    let touched = |i: usize| (0..n).any(|j| m[(i, j)] != Complex64::new(0.0, 0.0));
    let mut active: Vec<usize> = gen
        .blocks()
        .into_iter()
        .filter(|b| b.iter().any(|&i| touched(i)))
        .flatten()
        .collect();
    if active.len() == n {
        return integrate(rho0, gen, config, observables);
    }
    active.sort_unstable();
    let k = active.len();
    let sub = DensityMatrix::from_matrix(DMatrix::from_fn(k, k, |a, b| m[(active[a], active[b])]));
    let mut traj = integrate(&sub, &gen.restrict(&active), config, &observables.restrict(&active))?;
    let mut full = DMatrix::zeros(n, n);
    for (a, &r) in active.iter().enumerate() {
        for (b, &c) in active.iter().enumerate() {
            full[(r, c)] = traj.final_state.as_matrix()[(a, b)];
        }
    }
    traj.final_state = DensityMatrix::from_matrix(full);
    // The untouched block contributes exact zero eigenvalues.
    for e in &mut traj.min_eigenvalues {
        e.1 = e.1.min(0.0);
    }
    Ok(traj)
}

fn integrate(
    rho0: &DensityMatrix,
    gen: &Generator,
    config: &IntegratorConfig,
    observables: &ObservableSet,
) -> Result<Trajectory> {
    let n = gen.dim();
    let steps = config.steps();
    let h = config.effective_step();
    let mut rec = Recorder {
        traj: Trajectory {
            times: Vec::new(),
            fidelity: Vec::new(),
            populations: observables
                .labels()
                .map(|l| Series {
                    label: l.to_string(),
                    values: Vec::new(),
                })
                .collect(),
            trace_drift: Vec::new(),
            hermiticity_error: Vec::new(),
            min_eigenvalues: Vec::new(),
            rhs_norm: Vec::new(),
            steady_since: None,
            final_state: rho0.clone(),
        },
        config,
        observables,
        stationary_run: 0,
        run_start: 0.0,
        samples: 0,
    };

    let zero = || DMatrix::<Complex64>::zeros(n, n);
    let mut rho = rho0.as_matrix().clone();
    let (mut k1, mut k2, mut k3, mut k4) = (zero(), zero(), zero(), zero());
    let (mut tmp, mut scratch) = (zero(), zero());
    let half = Complex64::new(h / 2.0, 0.0);
    let full = Complex64::new(h, 0.0);
    let sixth = Complex64::new(h / 6.0, 0.0);
    let third = Complex64::new(h / 3.0, 0.0);

    gen.apply(&rho, &mut k1, &mut scratch);
    rec.record(0.0, &rho, &k1, steps == 0)?;
    for step in 1..=steps {
        // k1 holds f(ρ) on entry.
        tmp.copy_from(&rho);
        axpy(&mut tmp, half, &k1);
        gen.apply(&tmp, &mut k2, &mut scratch);
        tmp.copy_from(&rho);
        axpy(&mut tmp, half, &k2);
        gen.apply(&tmp, &mut k3, &mut scratch);
        tmp.copy_from(&rho);
        axpy(&mut tmp, full, &k3);
        gen.apply(&tmp, &mut k4, &mut scratch);
        axpy(&mut rho, sixth, &k1);
        axpy(&mut rho, third, &k2);
        axpy(&mut rho, third, &k3);
        axpy(&mut rho, sixth, &k4);
        gen.apply(&rho, &mut k1, &mut scratch);
        let last = step == steps;
        if last || step % config.record_every == 0 {
            rec.record(step as f64 * h, &rho, &k1, last)?;
        }
    }
    Ok(rec.traj)
}

/// `y += a x`
fn axpy(y: &mut DMatrix<Complex64>, a: Complex64, x: &DMatrix<Complex64>) {
    for (y, x) in y.as_mut_slice().iter_mut().zip(x.as_slice()) {
        *y += a * x;
    }
}

/// CSV with the fixed header, standard columns first and extra observables
/// appended as `pop_<label>`; numbers carry 12 significant digits.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::from(TRAJECTORY_HEADER);
    let extras: Vec<&Series> = traj
        .populations
        .iter()
        .filter(|s| !STANDARD.contains(&s.label.as_str()))
        .collect();
    for s in &extras {
        let _ = write!(out, ",pop_{}", s.label);
    }
    out.push('\n');
    let standard: Vec<Option<&[f64]>> = STANDARD.iter().map(|l| traj.population(l)).collect();
    for i in 0..traj.times.len() {
        let _ = write!(out, "{:.11e},{:.11e}", traj.times[i], traj.fidelity[i]);
        for col in &standard {
            match col {
                Some(v) => {
                    let _ = write!(out, ",{:.11e}", v[i]);
                }
                None => out.push(','),
            }
        }
        let _ = write!(out, ",{:.11e}", traj.trace_drift[i]);
        for s in &extras {
            let _ = write!(out, ",{:.11e}", s.values[i]);
        }
        out.push('\n');
    }
    out
}
