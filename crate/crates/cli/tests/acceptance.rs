//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.
//!
//! Every trajectory integrated here is also checked for trace drift,
//! Hermiticity and positivity under criterion 7.

use std::collections::HashMap;
use std::rc::Rc;
use std::time::Instant;

use cavity_entangle::dynamics::{
    evolve, evolve_with_feedback, lindblad_rhs, FeedbackScheme, IntegratorConfig, ObservableSet,
};
use cavity_entangle::effective::{
    closed_form_gamma, closed_form_kappa, compare_operators, reduce_effective, sector_without_atom2_ga, EffectiveModel,
};
use cavity_entangle::model::{build_hg, delocalized_modes, target_states, CollapseChannel, ModelParams};
use cavity_entangle::operator::{lift_mode_annihilator, DensityMatrix, ModeId, SparseOperator, StateSpace};
use cavity_entangle_cli::{
    build_model, initial_state, simulate, FeedbackChoice, ModelChoice, Scenario, ScenarioSpec, Simulation, SweepGrid,
    INITIAL_STATES,
};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};

const ORACLE_REL: f64 = 1e-6;
const ORACLE_ABS: f64 = 1e-10;
const EXPERIMENT_MIN_F: f64 = 0.97;
const RESIDUAL_MIN_POP: f64 = 0.10;
const GAP_RANGE: (f64, f64) = (0.15, 0.27);
const FEEDBACK_MIN_GAIN: f64 = 0.05;
const SWEEP_MIN_PEAK: f64 = 0.85;
const J_MAX_SPREAD: f64 = 0.05;
const INITIAL_MAX_SPREAD: f64 = 0.01;
const MAX_TRACE_DRIFT: f64 = 1e-6;
const MAX_HERMITICITY: f64 = 1e-10;
const MIN_EIGENVALUE: f64 = -1e-8;
const MIXING_TOL: f64 = 1e-12;
const HG_TOL: f64 = 1e-12;
const STEP_HALVING_TOL: f64 = 1e-6;
const FULL_VS_EFFECTIVE_TOL: f64 = 0.02;
const FULL_VS_EFFECTIVE_HORIZON: f64 = 2000.0;
const IDENTITY_FEEDBACK_TOL: f64 = 1e-12;

type Check = Result<(bool, String), String>;

/// Invariant summary of one integrated trajectory.
struct Health {
    tag: String,
    drift: f64,
    hermiticity: f64,
    min_eigenvalue: f64,
}

#[derive(Default)]
struct Runs {
    cache: HashMap<String, Rc<Simulation>>,
    health: Vec<Health>,
}

impl Runs {
    fn get(&mut self, spec: &ScenarioSpec) -> Result<Rc<Simulation>, String> {
        let key = format!("{}initial = {}\n", spec.describe(), spec.initial);
        if let Some(s) = self.cache.get(&key) {
            return Ok(s.clone());
        }
        let start = Instant::now();
        let sim = Rc::new(simulate(spec).map_err(|e| e.to_string())?);
        eprintln!(
            "  ran {} [{}] in {:.1}s",
            spec.tag(),
            spec.initial,
            start.elapsed().as_secs_f64()
        );
        self.note(&spec.tag(), &sim.trajectory);
        self.cache.insert(key, sim.clone());
        Ok(sim)
    }

    fn note(&mut self, tag: &str, t: &cavity_entangle::dynamics::Trajectory) {
        self.health.push(Health {
            tag: tag.to_string(),
            drift: t.max_trace_drift(),
            hermiticity: t.max_hermiticity_error(),
            min_eigenvalue: t.min_eigenvalue(),
        });
    }
}

fn spread(values: &[f64]) -> f64 {
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    hi - lo
}

fn mismatches(numeric: &EffectiveModel, closed: &EffectiveModel) -> Result<usize, String> {
    let sector = sector_without_atom2_ga(&closed.space);
    if numeric.labels() != closed.labels() {
        return Err(format!(
            "channel sets differ: {:?} vs {:?}",
            numeric.labels(),
            closed.labels()
        ));
    }
    let mut n = compare_operators(&numeric.h_eff, &closed.h_eff, &sector, ORACLE_REL, ORACLE_ABS)
        .map_err(|e| e.to_string())?
        .len();
    for ch in &numeric.channels {
        let other = closed.channel(&ch.label).ok_or("missing channel")?;
        n += compare_operators(&ch.operator, other, &sector, ORACLE_REL, ORACLE_ABS)
            .map_err(|e| e.to_string())?
            .len();
    }
    Ok(n)
}

fn oracle_equivalence() -> Check {
    let space = StateSpace::new(1, 1).map_err(|e| e.to_string())?;
    let p2 = ScenarioSpec::named(Scenario::Fig2).params;
    let p3 = ScenarioSpec::named(Scenario::Fig3).params;
    let numeric2 = reduce_effective(&p2, &space).map_err(|e| e.to_string())?;
    let numeric3 = reduce_effective(&p3, &space).map_err(|e| e.to_string())?;
    let bad2 = mismatches(&numeric2, &closed_form_gamma(&p2).map_err(|e| e.to_string())?)?;
    let bad3 = mismatches(&numeric3, &closed_form_kappa(&p3).map_err(|e| e.to_string())?)?;
    Ok((
        bad2 == 0 && bad3 == 0,
        format!("mismatched entries: gamma case {bad2}, kappa case {bad3} (rel {ORACLE_REL:e}, abs {ORACLE_ABS:e})"),
    ))
}

fn experimental_fidelity(runs: &mut Runs) -> Check {
    let sim = runs.get(&ScenarioSpec::named(Scenario::Fig8))?;
    let f = sim
        .steady_fidelity
        .ok_or_else(|| format!("no steady state: {:?}", sim.steady_error))?;
    Ok((
        f >= EXPERIMENT_MIN_F,
        format!(
            "steady F = {f:.6} (F(t={}) = {:.6}), need >= {EXPERIMENT_MIN_F}",
            sim.spec.t_final,
            sim.trajectory.final_fidelity()
        ),
    ))
}

fn residual_populations(runs: &mut Runs) -> Check {
    let decay = runs.get(&ScenarioSpec::named(Scenario::Fig3))?;
    let emission = runs.get(&ScenarioSpec::named(Scenario::Fig2))?;
    let pop = |label| {
        decay
            .trajectory
            .final_population(label)
            .ok_or(format!("no {label} series"))
    };
    let (l0, r0) = (pop("gLg0")?, pop("gRg0")?);
    let gap = emission.trajectory.final_fidelity() - decay.trajectory.final_fidelity();
    let ok = l0 > RESIDUAL_MIN_POP && r0 > RESIDUAL_MIN_POP && (GAP_RANGE.0..=GAP_RANGE.1).contains(&gap);
    Ok((
        ok,
        format!(
            "at t={}: P(gLg0) = {l0:.4}, P(gRg0) = {r0:.4} (> {RESIDUAL_MIN_POP}); gap {:.4} - {:.4} = {gap:.4} in [{}, {}]",
            decay.spec.t_final,
            emission.trajectory.final_fidelity(),
            decay.trajectory.final_fidelity(),
            GAP_RANGE.0,
            GAP_RANGE.1
        ),
    ))
}

fn feedback_gain(runs: &mut Runs) -> Check {
    let with = ScenarioSpec::named(Scenario::Fig4);
    let mut without = with.clone();
    without.feedback = FeedbackChoice::None;
    let fb = runs.get(&with)?.trajectory.final_fidelity();
    let plain = runs.get(&without)?.trajectory.final_fidelity();
    let gain = fb - plain;
    Ok((
        gain >= FEEDBACK_MIN_GAIN,
        format!("F with feedback {fb:.6}, without {plain:.6}, gain {gain:.4} (need >= {FEEDBACK_MIN_GAIN})"),
    ))
}

fn sweep_peak(runs: &mut Runs) -> Check {
    let grid = SweepGrid::named(Scenario::Fig5).ok_or("no grid")?;
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut failed = 0;
    for point in grid.points() {
        let spec = grid.spec_at(&point).map_err(|e| e.to_string())?;
        match runs.get(&spec) {
            Ok(sim) => {
                let f = sim.trajectory.final_fidelity();
                if best.as_ref().is_none_or(|b| f > b.1) {
                    best = Some((point, f));
                }
            }
            Err(e) => {
                eprintln!("  point {point:?} failed: {e}");
                failed += 1;
            }
        }
    }
    let (point, f) = best.ok_or("every grid point failed")?;
    Ok((
        f >= SWEEP_MIN_PEAK,
        format!(
            "max F(t={}) = {f:.6} at (kappa, gamma) = {point:?} over {} points ({failed} failed), need >= {SWEEP_MIN_PEAK}",
            grid.template.t_final,
            grid.cardinality()
        ),
    ))
}

fn hopping_robustness(runs: &mut Runs) -> Check {
    let grid = SweepGrid::named(Scenario::Fig7).ok_or("no grid")?;
    let mut values = Vec::new();
    for point in grid.points() {
        let sim = runs.get(&grid.spec_at(&point).map_err(|e| e.to_string())?)?;
        values.push(
            sim.steady_fidelity
                .ok_or_else(|| format!("J = {}: {:?}", point[0], sim.steady_error))?,
        );
    }
    let s = spread(&values);
    Ok((
        s <= J_MAX_SPREAD,
        format!("steady F at J = 5, 6, 7: {values:.6?}, spread {s:.2e} (need <= {J_MAX_SPREAD})"),
    ))
}

fn initial_state_independence(runs: &mut Runs) -> Check {
    let mut steady = Vec::new();
    let mut late = Vec::new();
    for label in INITIAL_STATES {
        let mut spec = ScenarioSpec::named(Scenario::Fig2);
        spec.initial = label.to_string();
        let sim = runs.get(&spec)?;
        steady.push(
            sim.steady_fidelity
                .ok_or_else(|| format!("{label}: {:?}", sim.steady_error))?,
        );
        late.push(sim.trajectory.final_fidelity());
    }
    let (s, l) = (spread(&steady), spread(&late));
    Ok((
        s <= INITIAL_MAX_SPREAD && l <= INITIAL_MAX_SPREAD,
        format!(
            "{INITIAL_STATES:?}: steady F spread {s:.2e}, F(t=60000) spread {l:.2e} (need <= {INITIAL_MAX_SPREAD}); steady F {steady:.6?}"
        ),
    ))
}

fn random_state(n: usize, rng: &mut rand::rngs::StdRng) -> DensityMatrix {
    let a = DMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let r = &a * a.adjoint();
    DensityMatrix::from_matrix(r.unscale(r.trace().re))
}

fn mode_mixing_invariance() -> Result<f64, String> {
    let space = StateSpace::new(1, 1).map_err(|e| e.to_string())?;
    let rate = 0.05f64.sqrt();
    let local: Vec<_> = ModeId::ALL
        .iter()
        .map(|&m| CollapseChannel::new(format!("{m:?}"), lift_mode_annihilator(&space, m).scale_real(rate)))
        .collect();
    let mixed: Vec<_> = delocalized_modes(&space)
        .into_iter()
        .map(|(m, op)| CollapseChannel::new(m.name(), op.scale_real(rate)))
        .collect();
    let zero = SparseOperator::zeros(space.dim());
    let mut rng = rand::rngs::StdRng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let rho = random_state(space.dim(), &mut rng);
        let a = lindblad_rhs(&zero, &local, &rho).map_err(|e| e.to_string())?;
        let c = lindblad_rhs(&zero, &mixed, &rho).map_err(|e| e.to_string())?;
        worst = worst.max((a.as_matrix() - c.as_matrix()).camax());
    }
    Ok(worst)
}

fn hg_on_t1() -> Result<f64, String> {
    let p: ModelParams = ScenarioSpec::named(Scenario::Fig2).params;
    let mut worst = 0.0f64;
    for space in [
        StateSpace::new(1, 1).map_err(|e| e.to_string())?,
        StateSpace::ground_manifold(),
    ] {
        let hg = build_hg(&p, &space).map_err(|e| e.to_string())?;
        let t1 = target_states(&space).map_err(|e| e.to_string())?.t1;
        worst = worst.max(hg.apply(t1.as_vector()).map_err(|e| e.to_string())?.norm());
    }
    Ok(worst)
}

fn identity_feedback(runs: &mut Runs) -> Result<f64, String> {
    let spec = ScenarioSpec::named(Scenario::Fig4);
    let built = build_model(&spec).map_err(|e| e.to_string())?;
    let mut fb = FeedbackScheme::identity();
    for ch in &built.channels {
        fb = fb
            .with(ch.label.clone(), SparseOperator::identity(built.space.dim()))
            .map_err(|e| e.to_string())?;
    }
    let obs = ObservableSet::standard(&built.space).map_err(|e| e.to_string())?;
    let rho0 = initial_state(&built.space, &spec.initial).map_err(|e| e.to_string())?;
    let cfg = IntegratorConfig::effective(&built.h, &built.channels, spec.t_final)
        .map_err(|e| e.to_string())?
        .with_samples(spec.samples);
    let plain = evolve(&rho0, &built.h, &built.channels, &cfg, &obs).map_err(|e| e.to_string())?;
    let with = evolve_with_feedback(&rho0, &built.h, &built.channels, &fb, &cfg, &obs).map_err(|e| e.to_string())?;
    runs.note("identity_feedback_plain", &plain);
    runs.note("identity_feedback_with", &with);
    let series = plain
        .fidelity
        .iter()
        .zip(&with.fidelity)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(series.max((plain.final_state.as_matrix() - with.final_state.as_matrix()).camax()))
}

fn full_vs_effective(runs: &mut Runs) -> Result<(f64, f64), String> {
    let mut eff = ScenarioSpec::named(Scenario::Fig2);
    eff.t_final = FULL_VS_EFFECTIVE_HORIZON;
    eff.samples = 200;
    let mut full = eff.clone();
    full.model = ModelChoice::Full;
    let full = runs.get(&full)?;
    let eff = runs.get(&eff)?;
    let mut worst = (0.0, 0.0);
    for (&t, &f) in full.trajectory.times.iter().zip(&full.trajectory.fidelity) {
        let e = eff.trajectory.fidelity_at(t).ok_or("effective trajectory too short")?;
        if (f - e).abs() > worst.1 {
            worst = (t, (f - e).abs());
        }
    }
    Ok(worst)
}

fn step_halving(runs: &mut Runs) -> Result<f64, String> {
    let base = ScenarioSpec::named(Scenario::Fig2);
    let coarse = runs.get(&base)?;
    let mut fine = base.clone();
    fine.step = Some(coarse.config.effective_step() / 2.0);
    let fine = runs.get(&fine)?;
    // Every sample, not only the end point, where both sit on the fixed point.
    let mut worst = 0.0f64;
    let (a, b) = (&coarse.trajectory, &fine.trajectory);
    if a.times != b.times {
        return Err("halved step records at different times".into());
    }
    for (f, g) in a.fidelity.iter().zip(&b.fidelity) {
        worst = worst.max((f - g).abs());
    }
    Ok(worst)
}

fn property_suite(runs: &mut Runs) -> Check {
    let mut ok = true;
    let mut lines = Vec::new();
    let mut sub = |name: &str, pass: bool, detail: String| {
        ok &= pass;
        lines.push(format!(
            "    [{}] {name}: {detail}",
            if pass { "ok" } else { "violated" }
        ));
    };

    let mixing = mode_mixing_invariance()?;
    sub(
        "a/c mode mixing",
        mixing <= MIXING_TOL,
        format!("max |dD| = {mixing:.2e} (<= {MIXING_TOL:e})"),
    );
    let hg = hg_on_t1()?;
    sub("Hg|T1>", hg <= HG_TOL, format!("norm {hg:.2e} (<= {HG_TOL:e})"));
    let halving = step_halving(runs)?;
    sub(
        "step halving",
        halving <= STEP_HALVING_TOL,
        format!("max |dF(t)| for t <= 60000 = {halving:.2e} (<= {STEP_HALVING_TOL:e})"),
    );
    let (t, diff) = full_vs_effective(runs)?;
    sub(
        "full vs effective",
        diff <= FULL_VS_EFFECTIVE_TOL,
        format!("max |F_full - F_eff| = {diff:.4} at t = {t} for t <= {FULL_VS_EFFECTIVE_HORIZON} (<= {FULL_VS_EFFECTIVE_TOL})"),
    );
    let ident = identity_feedback(runs)?;
    sub(
        "identity feedback",
        ident <= IDENTITY_FEEDBACK_TOL,
        format!("max deviation {ident:.2e} (<= {IDENTITY_FEEDBACK_TOL:e})"),
    );

    let worst = |key: fn(&Health) -> f64, max: bool| {
        runs.health
            .iter()
            .map(|h| (key(h), h.tag.as_str()))
            .reduce(|a, b| if (b.0 > a.0) == max { b } else { a })
            .map(|(v, t)| (v, t.to_string()))
            .unwrap_or((0.0, String::new()))
    };
    let drift = worst(|h| h.drift, true);
    let herm = worst(|h| h.hermiticity, true);
    let eig = worst(|h| h.min_eigenvalue, false);
    let n = runs.health.len();
    sub(
        "trace drift",
        drift.0 <= MAX_TRACE_DRIFT,
        format!(
            "worst {:.2e} ({}) over {n} trajectories (<= {MAX_TRACE_DRIFT:e})",
            drift.0, drift.1
        ),
    );
    sub(
        "hermiticity",
        herm.0 <= MAX_HERMITICITY,
        format!("worst {:.2e} ({}) (<= {MAX_HERMITICITY:e})", herm.0, herm.1),
    );
    sub(
        "positivity",
        eig.0 >= MIN_EIGENVALUE,
        format!("lowest eigenvalue {:.2e} ({}) (>= {MIN_EIGENVALUE:e})", eig.0, eig.1),
    );
    Ok((ok, format!("\n{}", lines.join("\n"))))
}

fn main() {
    // `cargo test` passes harness flags; a name filter that excludes this target skips it.
    let args: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if !args.is_empty() && !args.iter().any(|a| "acceptance".contains(a.as_str())) {
        return;
    }
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }

    let mut runs = Runs::default();
    let mut results: Vec<(usize, &str, Check)> = Vec::new();
    let mut run = |id, name, f: &mut dyn FnMut(&mut Runs) -> Check| {
        eprintln!("criterion {id}: {name}");
        let start = Instant::now();
        let r = f(&mut runs);
        eprintln!("  done in {:.1}s", start.elapsed().as_secs_f64());
        results.push((id, name, r));
    };
    run(1, "effective-operator oracle equivalence", &mut |_| {
        oracle_equivalence()
    });
    run(2, "experimental-parameter fidelity", &mut experimental_fidelity);
    run(3, "cavity-decay residual populations", &mut residual_populations);
    run(4, "feedback improvement", &mut feedback_gain);
    run(5, "combined-sweep peak", &mut sweep_peak);
    run(6, "hopping robustness", &mut hopping_robustness);
    run(8, "initial-state independence", &mut initial_state_independence);
    // Last, so the invariant checks see every trajectory above.
    run(7, "property suite", &mut property_suite);
    results.sort_by_key(|r| r.0);

    let mut failed = 0;
    for (id, name, r) in &results {
        let (pass, detail) = match r {
            Ok((pass, detail)) => (*pass, detail.clone()),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!pass);
        println!(
            "criterion {id} {}: {name}: {detail}",
            if pass { "PASS" } else { "FAIL" }
        );
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
