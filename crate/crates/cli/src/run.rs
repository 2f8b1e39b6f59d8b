//! Building and running a single scenario.

use std::path::PathBuf;
use std::time::Instant;

use cavity_entangle::dynamics::{
    build_feedback_unitary, evolve, evolve_with_feedback, fidelity, steady_state_effective, FeedbackScheme,
    IntegratorConfig, ObservableSet, SteadyState, Trajectory,
};
use cavity_entangle::effective::{closed_form_gamma, closed_form_kappa, reduce_effective, EffectiveModel};
use cavity_entangle::model::{build_collapse_channels, build_h_full, target_states, CollapseChannel};
use cavity_entangle::operator::{DensityMatrix, SparseOperator, StateSpace, StateVector};
use serde::Serialize;

use crate::config::{FeedbackChoice, ModelChoice, ScenarioSpec};
use crate::error::{CliError, Result};
use crate::output::{append_record, write_trajectory_csv};

/// Space, Hamiltonian and channels a scenario integrates.
#[derive(Debug, Clone)]
pub struct BuiltModel {
    pub space: StateSpace,
    pub h: SparseOperator,
    pub channels: Vec<CollapseChannel>,
    pub effective: Option<EffectiveModel>,
}

pub fn build_model(spec: &ScenarioSpec) -> cavity_entangle::Result<BuiltModel> {
    let p = &spec.params;
    let effective = match spec.model {
        ModelChoice::Full => {
            let space = StateSpace::new(1, 1)?;
            return Ok(BuiltModel {
                h: build_h_full(p, &space)?,
                channels: build_collapse_channels(p, &space)?,
                space,
                effective: None,
            });
        }
        ModelChoice::Effective => reduce_effective(p, &StateSpace::new(1, 1)?)?,
        ModelChoice::ClosedForm if p.kappa == 0.0 => closed_form_gamma(p)?,
        ModelChoice::ClosedForm if p.gamma == 0.0 => closed_form_kappa(p)?,
        ModelChoice::ClosedForm => {
            return Err(cavity_entangle::Error::Unsupported(
                "closed forms need kappa = 0 or gamma = 0".into(),
            ))
        }
    };
    Ok(BuiltModel {
        space: effective.space.clone(),
        h: effective.h_eff.clone(),
        channels: effective.channels.clone(),
        effective: Some(effective),
    })
}

/// `T1`, `T2`, `T3` or a ground basis label such as `gagL`.
pub fn initial_state(space: &StateSpace, label: &str) -> cavity_entangle::Result<DensityMatrix> {
    let targets = target_states(space)?;
    let psi = match label {
        "T1" => targets.t1,
        "T2" => targets.t2,
        "T3" => targets.t3,
        _ => {
            let i = space
                .states()
                .iter()
                .position(|s| s.is_vacuum() && s.excitation() == 0 && s.label() == label)
                .ok_or_else(|| cavity_entangle::Error::InvalidState(format!("unknown initial state '{label}'")))?;
            StateVector::basis(space, i)
        }
    };
    Ok(DensityMatrix::pure(&psi))
}

/// Feedback on the configured channel. `None` when feedback is off or the
/// channel has zero rate in this run.
pub fn feedback_scheme(spec: &ScenarioSpec, built: &BuiltModel) -> cavity_entangle::Result<Option<FeedbackScheme>> {
    let Some(kind) = spec.feedback.kind() else {
        return Ok(None);
    };
    if built.effective.is_some() && spec.feedback == FeedbackChoice::SigmaX2 {
        return Err(cavity_entangle::Error::Unsupported(
            "sigma-x2 pairs g0 with an excited level; it needs the full model".into(),
        ));
    }
    if !built.channels.iter().any(|c| c.label == spec.feedback_channel) {
        return Ok(None);
    }
    let u = build_feedback_unitary(kind, &built.space);
    Ok(Some(FeedbackScheme::identity().with(spec.feedback_channel.clone(), u)?))
}

pub fn integrator_config(spec: &ScenarioSpec, built: &BuiltModel) -> cavity_entangle::Result<IntegratorConfig> {
    let cfg = match (spec.step, spec.model) {
        (Some(step), _) => IntegratorConfig::new(step, spec.t_final)?,
        (None, ModelChoice::Full) => IntegratorConfig::full(spec.t_final)?,
        (None, _) => IntegratorConfig::effective(&built.h, &built.channels, spec.t_final)?,
    };
    Ok(cfg.with_samples(spec.samples))
}

#[derive(Debug, Clone)]
pub struct Simulation {
    pub spec: ScenarioSpec,
    pub config: IntegratorConfig,
    pub trajectory: Trajectory,
    /// Liouvillian fixed point, for effective models without feedback.
    pub steady: Option<SteadyState>,
    pub steady_fidelity: Option<f64>,
    pub steady_error: Option<String>,
}

fn simulate_inner(spec: &ScenarioSpec) -> cavity_entangle::Result<Simulation> {
    let built = build_model(spec)?;
    let rho0 = initial_state(&built.space, &spec.initial)?;
    let obs = ObservableSet::standard(&built.space)?;
    let config = integrator_config(spec, &built)?;
    let trajectory = match feedback_scheme(spec, &built)? {
        Some(fb) => evolve_with_feedback(&rho0, &built.h, &built.channels, &fb, &config, &obs)?,
        None => evolve(&rho0, &built.h, &built.channels, &config, &obs)?,
    };
    let (mut steady, mut steady_fidelity, mut steady_error) = (None, None, None);
    if let (Some(m), FeedbackChoice::None) = (&built.effective, spec.feedback) {
        match steady_state_effective(m, &rho0) {
            Ok(ss) => {
                steady_fidelity = Some(fidelity(&ss.rho, obs.target())?);
                steady = Some(ss);
            }
            Err(e) => steady_error = Some(e.to_string()),
        }
    }
    Ok(Simulation {
        spec: spec.clone(),
        config,
        trajectory,
        steady,
        steady_fidelity,
        steady_error,
    })
}

/// Builds the model, integrates, and solves for the fixed point where possible.
pub fn simulate(spec: &ScenarioSpec) -> Result<Simulation> {
    simulate_inner(spec).map_err(|source| CliError::Scenario {
        scenario: spec.tag(),
        source,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamsRecord {
    pub g: f64,
    #[serde(rename = "Omega")]
    pub drive: f64,
    #[serde(rename = "omega")]
    pub microwave: f64,
    #[serde(rename = "Delta")]
    pub atom_detuning: f64,
    #[serde(rename = "delta")]
    pub cavity_detuning: f64,
    #[serde(rename = "J")]
    pub hopping: f64,
    pub kappa: f64,
    pub gamma: f64,
}

/// One line of the run log.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub scenario: String,
    pub model: String,
    pub feedback: String,
    pub feedback_channel: String,
    pub initial: String,
    pub params: ParamsRecord,
    pub t_final: f64,
    pub step: f64,
    pub code_version: String,
    pub wall_time_s: f64,
    pub final_fidelity: f64,
    pub steady_fidelity: Option<f64>,
    pub steady_error: Option<String>,
    pub steady_since: Option<f64>,
    pub max_trace_drift: f64,
    pub min_eigenvalue: f64,
    pub output: Option<PathBuf>,
    pub digest: Option<String>,
}

impl RunRecord {
    pub fn from_simulation(sim: &Simulation, wall_time_s: f64) -> Self {
        let s = &sim.spec;
        let p = &s.params;
        RunRecord {
            scenario: s.scenario.to_string(),
            model: s.model.name().into(),
            feedback: s.feedback.name().into(),
            feedback_channel: s.feedback_channel.clone(),
            initial: s.initial.clone(),
            params: ParamsRecord {
                g: p.g,
                drive: p.drive,
                microwave: p.microwave,
                atom_detuning: p.atom_detuning,
                cavity_detuning: p.cavity_detuning,
                hopping: p.hopping,
                kappa: p.kappa,
                gamma: p.gamma,
            },
            t_final: s.t_final,
            step: sim.config.effective_step(),
            code_version: env!("CARGO_PKG_VERSION").into(),
            wall_time_s,
            final_fidelity: sim.trajectory.final_fidelity(),
            steady_fidelity: sim.steady_fidelity,
            steady_error: sim.steady_error.clone(),
            steady_since: sim.trajectory.steady_since,
            max_trace_drift: sim.trajectory.max_trace_drift(),
            min_eigenvalue: sim.trajectory.min_eigenvalue(),
            output: None,
            digest: None,
        }
    }
}

/// Simulates `spec`; with an output directory, writes `<tag>.csv` and
/// appends the record to `runs.jsonl` there.
pub fn run_scenario(spec: &ScenarioSpec) -> Result<(RunRecord, Simulation)> {
    let start = Instant::now();
    let sim = simulate(spec)?;
    let mut record = RunRecord::from_simulation(&sim, start.elapsed().as_secs_f64());
    if let Some(dir) = &spec.out {
        std::fs::create_dir_all(dir).map_err(CliError::io(dir))?;
        let path = dir.join(format!("{}.csv", spec.tag()));
        record.digest = Some(write_trajectory_csv(&sim.trajectory, &path)?);
        record.output = Some(path);
        append_record(&dir.join("runs.jsonl"), &record)?;
    }
    Ok((record, sim))
}
