use cavity_entangle::dynamics::{
    build_feedback_unitary, evolve, evolve_with_feedback, steady_state_effective, FeedbackKind, FeedbackScheme,
    IntegratorConfig, ObservableSet,
};
use cavity_entangle::effective::{closed_form_gamma, closed_form_kappa, reduce_effective};
use cavity_entangle::model::{build_collapse_channels, build_h_full, target_states, ModelParams};
use cavity_entangle::operator::{AtomLevel, BasisState, DensityMatrix, StateSpace, StateVector};

fn fig2() -> ModelParams {
    ModelParams::at_delta_star(1.0, 0.01, 0.002, 1.0, 6.0, 0.0, 0.04).unwrap()
}

fn basis(space: &StateSpace, a: AtomLevel, b: AtomLevel) -> DensityMatrix {
    DensityMatrix::pure(&StateVector::from_basis_state(space, &BasisState::ground(a, b)).unwrap())
}

#[test]
fn t1_is_an_attractor_of_the_gamma_model() {
    // At γ = 0.04 the fixed point itself sits at F ≈ 0.983, so use a weaker decay.
    let p = ModelParams::at_delta_star(1.0, 0.01, 0.002, 1.0, 6.0, 0.0, 0.01).unwrap();
    let m = closed_form_gamma(&p).unwrap();
    let obs = ObservableSet::standard(&m.space).unwrap();
    let rho0 = DensityMatrix::pure(&target_states(&m.space).unwrap().t1);
    let cfg = IntegratorConfig::effective(&m.h_eff, &m.channels, 20000.0)
        .unwrap()
        .with_samples(400);
    let traj = evolve(&rho0, &m.h_eff, &m.channels, &cfg, &obs).unwrap();
    let worst = traj.fidelity.iter().copied().fold(1.0, f64::min);
    assert!(worst >= 0.99, "{worst}");
}

#[test]
fn experimental_rates_reach_high_fidelity() {
    let p = ModelParams::at_delta_star(1.0, 0.02, 0.008, 1.0, 6.0, 2.65 / 750.0, 3.5 / 750.0).unwrap();
    let m = reduce_effective(&p, &StateSpace::new(1, 1).unwrap()).unwrap();
    let rho0 = basis(&m.space, AtomLevel::Ga, AtomLevel::GL);
    let ss = steady_state_effective(&m, &rho0).unwrap();
    let obs = ObservableSet::standard(&m.space).unwrap();
    let f = cavity_entangle::dynamics::fidelity(&ss.rho, obs.target()).unwrap();
    assert!(f >= 0.972, "{f}");
}

#[test]
fn step_halving_is_converged() {
    let m = closed_form_gamma(&fig2()).unwrap();
    let obs = ObservableSet::standard(&m.space).unwrap();
    let rho0 = basis(&m.space, AtomLevel::Ga, AtomLevel::GL);
    let cfg = IntegratorConfig::effective(&m.h_eff, &m.channels, 4000.0).unwrap();
    let mut half = cfg.clone();
    half.step = cfg.effective_step() / 2.0;
    let a = evolve(&rho0, &m.h_eff, &m.channels, &cfg, &obs).unwrap();
    let b = evolve(&rho0, &m.h_eff, &m.channels, &half, &obs).unwrap();
    assert!((a.final_fidelity() - b.final_fidelity()).abs() <= 1e-6);
}

#[test]
fn full_model_keeps_unused_levels_dark() {
    let space = StateSpace::new(1, 1).unwrap();
    let p = fig2();
    let h = build_h_full(&p, &space).unwrap();
    let ch = build_collapse_channels(&p, &space).unwrap();
    let obs = ObservableSet::standard(&space).unwrap();
    let rho0 = basis(&space, AtomLevel::Ga, AtomLevel::GL);
    let cfg = IntegratorConfig::full(40.0).unwrap().with_samples(20);
    let traj = evolve(&rho0, &h, &ch, &cfg, &obs).unwrap();
    let rho = &traj.final_state;
    for (i, s) in space.states().iter().enumerate() {
        let dark = matches!(s.atom1, AtomLevel::EL | AtomLevel::ER) || s.atom1 == AtomLevel::G0;
        if dark {
            assert!(rho.population(i).abs() < 1e-14, "{}", s.label());
        }
    }
    assert!(traj.max_trace_drift() <= 1e-6);
    assert!(traj.max_hermiticity_error() <= 1e-10);
    assert!(traj.min_eigenvalue() >= -1e-8);
}

#[test]
fn feedback_lifts_the_cavity_case() {
    let p = ModelParams::at_delta_star(1.0, 0.04, 0.002, 1.0, 6.0, 0.1, 0.0).unwrap();
    let m = closed_form_kappa(&p).unwrap();
    let obs = ObservableSet::standard(&m.space).unwrap();
    let rho0 = basis(&m.space, AtomLevel::Ga, AtomLevel::GL);
    let cfg = IntegratorConfig::effective(&m.h_eff, &m.channels, 20000.0)
        .unwrap()
        .with_samples(50);
    let plain = evolve(&rho0, &m.h_eff, &m.channels, &cfg, &obs).unwrap();
    let fb = FeedbackScheme::identity()
        .with("kappa.cR1", build_feedback_unitary(FeedbackKind::SigmaX1, &m.space))
        .unwrap();
    let with = evolve_with_feedback(&rho0, &m.h_eff, &m.channels, &fb, &cfg, &obs).unwrap();
    assert!(with.final_fidelity() > plain.final_fidelity());
}
