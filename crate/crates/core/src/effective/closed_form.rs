//! Analytic effective operators for the two single-dissipation limits.
//!
//! Both forms act on the ground manifold and reproduce [`super::reduce_effective`]
//! everywhere except the block with atom 2 in `ga`, which they leave empty.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{EffectiveModel, Provenance};
use crate::error::{Error, Result};
use crate::model::{build_hg, CollapseChannel, ModelParams};
use crate::operator::{AtomLevel, BasisState, SparseOperator, StateSpace};

use AtomLevel::*;

/// Complex detunings entering the closed forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormContext {
    /// `J² - δ²`
    pub j_tilde_sq: Complex64,
    /// `Δ - iγ/2`
    pub big_delta_tilde: Complex64,
    /// `δ - iκ/2`
    pub delta_tilde: Complex64,
    /// `J² - δ̃²`
    pub j_tilde_sq_prime: Complex64,
}

impl ClosedFormContext {
    pub fn new(p: &ModelParams) -> Self {
        let i = Complex64::i();
        let delta_tilde = p.cavity_detuning - 0.5 * p.kappa * i;
        let j2 = p.hopping * p.hopping;
        ClosedFormContext {
            j_tilde_sq: Complex64::new(j2 - p.cavity_detuning * p.cavity_detuning, 0.0),
            big_delta_tilde: p.atom_detuning - 0.5 * p.gamma * i,
            delta_tilde,
            j_tilde_sq_prime: j2 - delta_tilde * delta_tilde,
        }
    }
}

/// Dense accumulator on the ground manifold.
struct Ground {
    space: StateSpace,
}

impl Ground {
    fn new() -> Self {
        Ground {
            space: StateSpace::ground_manifold(),
        }
    }

    fn ket(&self, a: AtomLevel, b: AtomLevel) -> DVector<Complex64> {
        let mut v = DVector::zeros(16);
        v[self.space.index_of(&BasisState::ground(a, b)).unwrap()] = Complex64::new(1.0, 0.0);
        v
    }

    fn t(&self, k: usize) -> DVector<Complex64> {
        let (lr, rl, a0) = (self.ket(GL, GR), self.ket(GR, GL), self.ket(Ga, G0));
        match k {
            1 => (lr + rl + a0).unscale(3f64.sqrt()),
            2 => (lr + rl - a0 * Complex64::new(2.0, 0.0)).unscale(6f64.sqrt()),
            _ => (lr - rl).unscale(2f64.sqrt()),
        }
    }

    fn zeros(&self) -> DMatrix<Complex64> {
        DMatrix::zeros(16, 16)
    }
}

/// `m += z |u⟩⟨v|`
fn add(m: &mut DMatrix<Complex64>, z: Complex64, u: &DVector<Complex64>, v: &DVector<Complex64>) {
    *m += u * v.adjoint() * z;
}

fn finish(
    ground: Ground,
    params: &ModelParams,
    stark: DMatrix<Complex64>,
    channels: Vec<(String, DMatrix<Complex64>)>,
    provenance: Provenance,
) -> Result<EffectiveModel> {
    let finite = |m: &DMatrix<Complex64>| m.iter().all(|z| z.re.is_finite() && z.im.is_finite());
    if !finite(&stark) || !channels.iter().all(|(_, m)| finite(m)) {
        return Err(Error::InvalidParameter(format!(
            "closed form is singular at {params:?}"
        )));
    }
    let hg = build_hg(params, &ground.space)?;
    let h_eff = &SparseOperator::from_dense(&stark) + &hg;
    Ok(EffectiveModel {
        space: ground.space,
        h_eff,
        channels: channels
            .into_iter()
            .map(|(label, m)| CollapseChannel::new(label, SparseOperator::from_dense(&m)))
            .collect(),
        provenance,
    })
}

fn re(z: Complex64) -> Complex64 {
    Complex64::new(z.re, 0.0)
}

/// Light shifts shared by both limits; `d` and `big_d` may carry the decay.
///
/// `d3 = 2g⁴ - 3g²dD - J̃²D²` with the caller's complex `d`, `D` and `J̃²`.
#[allow(clippy::too_many_arguments)]
fn stark_shifts(
    gr: &Ground,
    g: f64,
    omega2: f64,
    j: f64,
    d: Complex64,
    big_d: Complex64,
    jt: Complex64,
    d3: Complex64,
) -> DMatrix<Complex64> {
    let g2 = g * g;
    let a1 = re(-jt / (g2 * d + jt * big_d)) * omega2;
    let a2 = re(-jt / (2.0 * g2 * d + jt * big_d)) * omega2;
    let mut h = gr.zeros();
    for (a, b) in [(GL, GL), (GR, GR), (G0, GL), (G0, GR)] {
        let k = gr.ket(a, b);
        add(&mut h, a1, &k, &k);
    }
    add(&mut h, a1, &gr.t(3), &gr.t(3));
    for b in [GL, GR] {
        let k = gr.ket(Ga, b);
        add(&mut h, a1 + a2, &k, &k);
    }
    let (t1, t2) = (gr.t(1), gr.t(2));
    add(
        &mut h,
        re((g2 * (4.0 * j + 5.0 * d) + 3.0 * jt * big_d) / d3) * (omega2 / 3.0),
        &t1,
        &t1,
    );
    add(
        &mut h,
        re((-4.0 * g2 * (j - d) + 3.0 * jt * big_d) / d3) * (omega2 / 3.0),
        &t2,
        &t2,
    );
    let cross = re(-g2 * (j - d) / d3) * (2f64.sqrt() * omega2 / 3.0);
    add(&mut h, cross, &t1, &t2);
    add(&mut h, cross, &t2, &t1);
    h
}

/// Effective model for `κ = 0`: light shifts plus the seven spontaneous-emission channels.
pub fn closed_form_gamma(params: &ModelParams) -> Result<EffectiveModel> {
    params.validate()?;
    if params.kappa != 0.0 {
        return Err(Error::InvalidParameter(format!(
            "closed_form_gamma requires kappa = 0, got {}",
            params.kappa
        )));
    }
    let gr = Ground::new();
    let ctx = ClosedFormContext::new(params);
    let (g, om, j, ga) = (params.g, params.drive, params.hopping, params.gamma);
    let d = Complex64::new(params.cavity_detuning, 0.0);
    let (jt, dt) = (ctx.j_tilde_sq, ctx.big_delta_tilde);
    let g2 = g * g;
    let d3 = 2.0 * g2 * g2 - 3.0 * g2 * d * dt - jt * dt * dt;
    let stark = stark_shifts(&gr, g, om * om, j, d, dt, jt, d3);

    let mut channels = Vec::new();
    if ga > 0.0 {
        let (t1, t2, t3) = (gr.t(1), gr.t(2), gr.t(3));
        let side = (ga / 3.0).sqrt() * om * jt / (2.0 * g2 * d + jt * dt);
        let to_t1 = ga.sqrt() * om / 3.0 * (-g2 * (2.0 * j + d) - jt * dt) / d3;
        let to_t2 = (2.0 * ga).sqrt() * om / 3.0 * (-g2 * (j - d) + jt * dt) / d3;
        for x in [GL, Ga, GR] {
            let mut l = gr.zeros();
            for b in [GL, GR] {
                add(&mut l, side, &gr.ket(x, b), &gr.ket(Ga, b));
            }
            add(&mut l, to_t1, &gr.ket(x, G0), &t1);
            add(&mut l, to_t2, &gr.ket(x, G0), &t2);
            channels.push((format!("gamma1.{x}"), l));
        }

        let c1 = (6.0 * ga).sqrt() * om / 6.0 * (-g2 * (j + 2.0 * d) - jt * dt) / d3;
        let c2 = (3.0 * ga).sqrt() * om / 6.0 * (2.0 * g2 * (j - d) - jt * dt) / d3;
        let c3 = (2.0 * ga).sqrt() * om / 2.0 * jt / (g2 * d + jt * dt);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // (final atom-2 level, excited level it decays from, atom-2 level that was driven to it)
        for (fin, exc, src) in [(GL, EL, GL), (G0, EL, GL), (GR, ER, GR), (G0, ER, GR)] {
            let partner = if src == GL { GR } else { GL };
            let sign = if src == GL { -s } else { s };
            let mut l = gr.zeros();
            add(&mut l, c1, &gr.ket(partner, fin), &t1);
            add(&mut l, c2, &gr.ket(partner, fin), &t2);
            for a in [src, Ga, G0] {
                add(&mut l, c3, &gr.ket(a, fin), &gr.ket(a, src));
            }
            add(&mut l, c3 * sign, &gr.ket(partner, fin), &t3);
            channels.push((format!("gamma2.{fin}_from_{exc}"), l));
        }
    }
    finish(gr, params, stark, channels, Provenance::ClosedFormGamma)
}

/// Effective model for `γ = 0`: light shifts plus the four cavity-loss channels.
pub fn closed_form_kappa(params: &ModelParams) -> Result<EffectiveModel> {
    params.validate()?;
    if params.gamma != 0.0 {
        return Err(Error::InvalidParameter(format!(
            "closed_form_kappa requires gamma = 0, got {}",
            params.gamma
        )));
    }
    let gr = Ground::new();
    let ctx = ClosedFormContext::new(params);
    let (g, om, j, ka) = (params.g, params.drive, params.hopping, params.kappa);
    let big_d = Complex64::new(params.atom_detuning, 0.0);
    let (jt, dt) = (ctx.j_tilde_sq_prime, ctx.delta_tilde);
    let g2 = g * g;
    let d3 = 2.0 * g2 * g2 - 3.0 * g2 * dt * big_d - jt * big_d * big_d;
    let stark = stark_shifts(&gr, g, om * om, j, dt, big_d, jt, d3);

    let mut channels = Vec::new();
    if ka > 0.0 {
        let (t1, t2, t3) = (gr.t(1), gr.t(2), gr.t(3));
        let s2 = (2.0 * ka).sqrt() * om / 2.0;
        let s6 = (6.0 * ka).sqrt() * om / 6.0;
        let s3 = (3.0 * ka).sqrt() * om / 6.0;
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let near = 2.0 * g2 * dt + big_d * jt;
        let far = g2 * dt + big_d * jt;
        for (mode, fired, other, sign) in [("L", GL, GR, r), ("R", GR, GL, -r)] {
            // Antisymmetric delocalised mode.
            let plus = j + dt;
            let mut l1 = gr.zeros();
            for b in [GL, GR] {
                add(&mut l1, s2 * g * plus / near, &gr.ket(fired, b), &gr.ket(Ga, b));
            }
            let spect = -s2 * g * plus / far;
            for a in [Ga, other, G0] {
                add(&mut l1, spect, &gr.ket(a, G0), &gr.ket(a, other));
            }
            add(&mut l1, spect * sign, &gr.ket(fired, G0), &t3);
            add(&mut l1, -s6 * g * g2 / d3, &gr.ket(fired, G0), &t1);
            add(
                &mut l1,
                s3 * g * (-4.0 * g2 + 3.0 * big_d * plus) / d3,
                &gr.ket(fired, G0),
                &t2,
            );

            // Symmetric delocalised mode.
            let minus = j - dt;
            let mut l2 = gr.zeros();
            for b in [GL, GR] {
                add(&mut l2, -s2 * g * minus / near, &gr.ket(fired, b), &gr.ket(Ga, b));
            }
            let spect = -s2 * g * minus / far;
            for a in [Ga, other, G0] {
                add(&mut l2, spect, &gr.ket(a, G0), &gr.ket(a, other));
            }
            add(&mut l2, spect * sign, &gr.ket(fired, G0), &t3);
            add(
                &mut l2,
                s6 * g * (3.0 * g2 + 2.0 * big_d * minus) / d3,
                &gr.ket(fired, G0),
                &t1,
            );
            add(&mut l2, -s3 * g * big_d * minus / d3, &gr.ket(fired, G0), &t2);

            channels.push((format!("kappa.c{mode}1"), l1));
            channels.push((format!("kappa.c{mode}2"), l2));
        }
    }
    finish(gr, params, stark, channels, Provenance::ClosedFormKappa)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::effective::{compare_operators, reduce_effective, sector_without_atom2_ga};

    fn fig2() -> ModelParams {
        ModelParams::at_delta_star(1.0, 0.01, 0.002, 1.0, 6.0, 0.0, 0.04).unwrap()
    }

    fn fig3() -> ModelParams {
        ModelParams::at_delta_star(1.0, 0.03, 0.0015, 1.0, 6.0, 0.05, 0.0).unwrap()
    }

    fn generic(kappa: f64, gamma: f64) -> ModelParams {
        ModelParams {
            g: 0.9,
            drive: 0.07,
            microwave: 0.01,
            atom_detuning: 1.3,
            cavity_detuning: 3.7,
            hopping: 4.2,
            kappa,
            gamma,
        }
    }

    fn assert_oracle(closed: &EffectiveModel, p: &ModelParams) {
        let numeric = reduce_effective(p, &StateSpace::new(1, 1).unwrap()).unwrap();
        let sector = sector_without_atom2_ga(&closed.space);
        let bad = compare_operators(&numeric.h_eff, &closed.h_eff, &sector, 1e-6, 1e-10).unwrap();
        assert!(bad.is_empty(), "H_eff {bad:?}");
        assert_eq!(numeric.labels(), closed.labels());
        for ch in &numeric.channels {
            let other = closed.channel(&ch.label).unwrap();
            let bad = compare_operators(&ch.operator, other, &sector, 1e-6, 1e-10).unwrap();
            assert!(bad.is_empty(), "{} {bad:?}", ch.label);
        }
    }

    #[test]
    fn gamma_form_matches_numeric() {
        assert_oracle(&closed_form_gamma(&fig2()).unwrap(), &fig2());
        let p = generic(0.0, 0.3);
        assert_oracle(&closed_form_gamma(&p).unwrap(), &p);
    }

    #[test]
    fn kappa_form_matches_numeric() {
        assert_oracle(&closed_form_kappa(&fig3()).unwrap(), &fig3());
        let p = generic(0.3, 0.0);
        assert_oracle(&closed_form_kappa(&p).unwrap(), &p);
    }

    #[test]
    fn limits_are_enforced() {
        assert!(closed_form_gamma(&fig3()).is_err());
        assert!(closed_form_kappa(&fig2()).is_err());
    }

    #[test]
    fn t1_t2_cross_term() {
        let p = fig2();
        let m = closed_form_gamma(&p).unwrap();
        let gr = Ground::new();
        let ctx = ClosedFormContext::new(&p);
        let (g2, j, d) = (p.g * p.g, p.hopping, p.cavity_detuning);
        let dt = ctx.big_delta_tilde;
        let d3 = 2.0 * g2 * g2 - 3.0 * g2 * d * dt - ctx.j_tilde_sq * dt * dt;
        let expected = 2f64.sqrt() * p.drive * p.drive / 3.0 * (-g2 * (j - d) / d3).re;
        let h = m.h_eff.to_dense();
        let got = (gr.t(1).adjoint() * h * gr.t(2))[(0, 0)];
        assert!((got.re - expected).abs() < 1e-15 && got.im.abs() < 1e-15);
    }

    #[test]
    fn kappa_spectator_coefficient() {
        let p = fig3();
        let m = closed_form_kappa(&p).unwrap();
        let ctx = ClosedFormContext::new(&p);
        let dt = ctx.delta_tilde;
        let expected = -(2.0 * p.kappa).sqrt() * p.drive / 2.0 * p.g * (p.hopping + dt)
            / (p.g * p.g * dt + p.atom_detuning * ctx.j_tilde_sq_prime);
        let gr = Ground::new();
        let row = gr.space.index_of(&BasisState::ground(Ga, G0)).unwrap();
        let col = gr.space.index_of(&BasisState::ground(Ga, GR)).unwrap();
        let got = m.channel("kappa.cL1").unwrap().get(row, col);
        assert!((got - expected).norm() < 1e-15);
    }

    #[test]
    fn split_g0_channels_sum_to_lumped_form() {
        let p = fig2();
        let m = closed_form_gamma(&p).unwrap();
        let gr = Ground::new();
        let ctx = ClosedFormContext::new(&p);
        let (g2, j, d, om, ga) = (p.g * p.g, p.hopping, p.cavity_detuning, p.drive, p.gamma);
        let (jt, dt) = (ctx.j_tilde_sq, ctx.big_delta_tilde);
        let d3 = 2.0 * g2 * g2 - 3.0 * g2 * d * dt - jt * dt * dt;
        let c1 = (6.0 * ga).sqrt() * om / 6.0 * (-g2 * (j + 2.0 * d) - jt * dt) / d3;
        let c2 = (3.0 * ga).sqrt() * om / 6.0 * (2.0 * g2 * (j - d) - jt * dt) / d3;
        let c3 = (2.0 * ga).sqrt() * om / 2.0 * jt / (g2 * d + jt * dt);
        let mut lumped = gr.zeros();
        let (l0, r0) = (gr.ket(GL, G0), gr.ket(GR, G0));
        add(&mut lumped, c3, &l0, &gr.ket(GL, GL));
        add(&mut lumped, c3, &gr.ket(Ga, G0), &gr.ket(Ga, GL));
        add(&mut lumped, c3, &gr.ket(Ga, G0), &gr.ket(Ga, GR));
        add(&mut lumped, c3, &r0, &gr.ket(GR, GR));
        add(
            &mut lumped,
            c3 * std::f64::consts::FRAC_1_SQRT_2,
            &(&l0 - &r0),
            &gr.t(3),
        );
        add(&mut lumped, c1, &(&l0 + &r0), &gr.t(1));
        add(&mut lumped, c2, &(&l0 + &r0), &gr.t(2));
        let sum = m.channel("gamma2.g0_from_eL").unwrap() + m.channel("gamma2.g0_from_eR").unwrap();
        let sum = sum.to_dense();
        // The lumped form omits the atom-1 g0 spectator, compare the remaining rows.
        let g0g0 = gr.space.index_of(&BasisState::ground(G0, G0)).unwrap();
        for r in (0..16).filter(|&r| r != g0g0) {
            for c in 0..16 {
                assert!((sum[(r, c)] - lumped[(r, c)]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn channels_vanish_with_rate() {
        // Away from δ*: at δ* the resonant terms scale as Ω/√rate instead.
        let p = ModelParams {
            gamma: 1e-12,
            cavity_detuning: 3.3,
            ..fig2()
        };
        let m = closed_form_gamma(&p).unwrap();
        assert!(m.channels.iter().all(|c| c.operator.max_abs() < 1e-6));
        assert!(m.h_eff.max_abs() < 1.0);
        let p = ModelParams {
            kappa: 1e-12,
            cavity_detuning: 3.3,
            ..fig3()
        };
        let m = closed_form_kappa(&p).unwrap();
        assert!(m.channels.iter().all(|c| c.operator.max_abs() < 1e-6));
        assert!(m.h_eff.max_abs() < 1.0);
    }

    #[test]
    fn resonant_terms_grow_as_rate_shrinks() {
        let at = |gamma| {
            let m = closed_form_gamma(&ModelParams { gamma, ..fig2() }).unwrap();
            m.channel("gamma2.gL_from_eL").unwrap().max_abs()
        };
        let ratio = at(0.01) / at(0.04);
        assert!((ratio - 2.0).abs() < 0.05, "{ratio}");
    }

    #[test]
    fn context_reduces_to_real_without_decay() {
        let p = ModelParams {
            kappa: 0.0,
            gamma: 0.0,
            ..fig2()
        };
        let ctx = ClosedFormContext::new(&p);
        assert_eq!(ctx.j_tilde_sq, ctx.j_tilde_sq_prime);
        assert_eq!(ctx.big_delta_tilde.im, 0.0);
        assert_eq!(ctx.delta_tilde.im, 0.0);
    }
}
