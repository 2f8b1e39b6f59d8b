//! Scenario definitions and the `key = value` configuration format.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use cavity_entangle::dynamics::FeedbackKind;
use cavity_entangle::model::{delta_star, ModelParams};

use crate::error::{CliError, Result};

/// Ground states cycled by `--all-initial`.
pub const INITIAL_STATES: [&str; 5] = ["gagL", "gagR", "gLgL", "gRgR", "gLg0"];

/// Rates of the reference experiment, `(κ, γ)/g = (2.65, 3.5)/750`.
pub const EXPERIMENT_KAPPA: f64 = 2.65 / 750.0;
pub const EXPERIMENT_GAMMA: f64 = 3.5 / 750.0;

/// Horizon of effective-model runs unless a scenario says otherwise.
pub const EFFECTIVE_HORIZON: f64 = 60000.0;
/// Horizon of full-model runs when none is given.
pub const FULL_HORIZON: f64 = 2000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Custom,
}

impl Scenario {
    pub const ALL: [Scenario; 8] = [
        Scenario::Fig2,
        Scenario::Fig3,
        Scenario::Fig4,
        Scenario::Fig5,
        Scenario::Fig6,
        Scenario::Fig7,
        Scenario::Fig8,
        Scenario::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Fig2 => "fig2",
            Scenario::Fig3 => "fig3",
            Scenario::Fig4 => "fig4",
            Scenario::Fig5 => "fig5",
            Scenario::Fig6 => "fig6",
            Scenario::Fig7 => "fig7",
            Scenario::Fig8 => "fig8",
            Scenario::Custom => "custom",
        }
    }

    /// `(Ω, ω/Ω, κ, γ, J)` in units of `g`; `Δ = g` throughout.
    fn defaults(self) -> (f64, f64, f64, f64, f64) {
        match self {
            Scenario::Fig2 | Scenario::Custom => (0.01, 0.2, 0.0, 0.04, 6.0),
            Scenario::Fig3 => (0.03, 0.05, 0.05, 0.0, 6.0),
            Scenario::Fig4 => (0.04, 0.05, 0.1, 0.0, 6.0),
            Scenario::Fig5 | Scenario::Fig6 => (0.03, 0.2, 0.05, 0.05, 6.0),
            Scenario::Fig7 | Scenario::Fig8 => (0.02, 0.4, EXPERIMENT_KAPPA, EXPERIMENT_GAMMA, 6.0),
        }
    }

    fn feedback(self) -> FeedbackChoice {
        match self {
            Scenario::Fig4 | Scenario::Fig6 => FeedbackChoice::SigmaX1,
            _ => FeedbackChoice::None,
        }
    }

    fn horizon(self) -> f64 {
        match self {
            Scenario::Fig6 => 20000.0,
            _ => EFFECTIVE_HORIZON,
        }
    }
}

impl FromStr for Scenario {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| CliError::Config(format!("unknown scenario '{s}'")))
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelChoice {
    Full,
    /// Numerical adiabatic elimination.
    Effective,
    /// Analytic effective operators; needs κ = 0 or γ = 0.
    ClosedForm,
}

impl ModelChoice {
    pub fn name(self) -> &'static str {
        match self {
            ModelChoice::Full => "full",
            ModelChoice::Effective => "effective",
            ModelChoice::ClosedForm => "closed-form",
        }
    }
}

impl FromStr for ModelChoice {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(ModelChoice::Full),
            "effective" => Ok(ModelChoice::Effective),
            "closed-form" => Ok(ModelChoice::ClosedForm),
            _ => Err(CliError::Config(format!("unknown model '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeedbackChoice {
    None,
    SigmaX1,
    SigmaX2,
}

impl FeedbackChoice {
    pub fn name(self) -> &'static str {
        match self.kind() {
            None => "none",
            Some(k) => k.name(),
        }
    }

    pub fn kind(self) -> Option<FeedbackKind> {
        match self {
            FeedbackChoice::None => None,
            FeedbackChoice::SigmaX1 => Some(FeedbackKind::SigmaX1),
            FeedbackChoice::SigmaX2 => Some(FeedbackKind::SigmaX2),
        }
    }
}

impl FromStr for FeedbackChoice {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(FeedbackChoice::None),
            "sigma-x1" => Ok(FeedbackChoice::SigmaX1),
            "sigma-x2" => Ok(FeedbackChoice::SigmaX2),
            _ => Err(CliError::Config(format!("unknown feedback '{s}'"))),
        }
    }
}

/// A fully resolved run description.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub scenario: Scenario,
    pub params: ModelParams,
    /// δ was given explicitly rather than derived from `(g, J, Δ)`.
    pub delta_fixed: bool,
    pub model: ModelChoice,
    pub feedback: FeedbackChoice,
    /// Channel whose jumps trigger the feedback unitary.
    pub feedback_channel: String,
    pub t_final: f64,
    /// Integration step; `None` picks the model's default.
    pub step: Option<f64>,
    /// Recorded samples after `t = 0`.
    pub samples: usize,
    pub initial: String,
    pub out: Option<PathBuf>,
}

impl ScenarioSpec {
    pub fn named(scenario: Scenario) -> Self {
        Settings::new(scenario).resolve().expect("built-in scenarios are valid")
    }

    /// Replaces one physical parameter, recomputing δ* unless δ is fixed.
    pub fn with_param(&self, key: &str, value: f64) -> Result<Self> {
        let mut s = Settings::from_spec(self);
        s.set(key, &value.to_string())?;
        s.resolve()
    }

    /// Short tag used in file names.
    pub fn tag(&self) -> String {
        let mut tag = format!("{}_{}", self.scenario, self.model.name());
        if self.feedback != FeedbackChoice::None {
            tag.push('_');
            tag.push_str(self.feedback.name());
        }
        tag.push('_');
        tag.push_str(&self.initial);
        tag
    }

    /// One `key = value` line per resolved setting, in a fixed order.
    pub fn describe(&self) -> String {
        let p = &self.params;
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        line("scenario", self.scenario.to_string());
        line("g", format!("{:.11e}", p.g));
        line("Omega", format!("{:.11e}", p.drive));
        line("omega", format!("{:.11e}", p.microwave));
        line("Delta", format!("{:.11e}", p.atom_detuning));
        line("delta", format!("{:.11e}", p.cavity_detuning));
        line("J", format!("{:.11e}", p.hopping));
        line("kappa", format!("{:.11e}", p.kappa));
        line("gamma", format!("{:.11e}", p.gamma));
        line("model", self.model.name().into());
        line("feedback", self.feedback.name().into());
        line("feedback_channel", self.feedback_channel.clone());
        line("t_final", format!("{}", self.t_final));
        line("step", self.step.map_or("auto".into(), |s| s.to_string()));
        line("samples", self.samples.to_string());
        line("initial", self.initial.clone());
        out
    }
}

/// Unresolved settings: scenario defaults plus explicit overrides.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    scenario: Scenario,
    g: Option<f64>,
    drive: Option<f64>,
    microwave: Option<f64>,
    atom_detuning: Option<f64>,
    cavity_detuning: Option<f64>,
    hopping: Option<f64>,
    kappa: Option<f64>,
    gamma: Option<f64>,
    model: Option<ModelChoice>,
    feedback: Option<FeedbackChoice>,
    feedback_channel: Option<String>,
    t_final: Option<f64>,
    step: Option<f64>,
    samples: Option<usize>,
    initial: Option<String>,
    out: Option<PathBuf>,
}

fn number(key: &str, value: &str) -> Result<f64> {
    let v: f64 = value
        .parse()
        .map_err(|_| CliError::Config(format!("{key}: cannot parse '{value}' as a number")))?;
    if !v.is_finite() {
        return Err(CliError::Config(format!("{key}: value must be finite")));
    }
    Ok(v)
}

impl Settings {
    pub fn new(scenario: Scenario) -> Self {
        Settings {
            scenario,
            g: None,
            drive: None,
            microwave: None,
            atom_detuning: None,
            cavity_detuning: None,
            hopping: None,
            kappa: None,
            gamma: None,
            model: None,
            feedback: None,
            feedback_channel: None,
            t_final: None,
            step: None,
            samples: None,
            initial: None,
            out: None,
        }
    }

    fn from_spec(spec: &ScenarioSpec) -> Self {
        let p = &spec.params;
        Settings {
            scenario: spec.scenario,
            g: Some(p.g),
            drive: Some(p.drive),
            microwave: Some(p.microwave),
            atom_detuning: Some(p.atom_detuning),
            cavity_detuning: spec.delta_fixed.then_some(p.cavity_detuning),
            hopping: Some(p.hopping),
            kappa: Some(p.kappa),
            gamma: Some(p.gamma),
            model: Some(spec.model),
            feedback: Some(spec.feedback),
            feedback_channel: Some(spec.feedback_channel.clone()),
            t_final: Some(spec.t_final),
            step: spec.step,
            samples: Some(spec.samples),
            initial: Some(spec.initial.clone()),
            out: spec.out.clone(),
        }
    }

    /// Reads `key = value` lines; `#` starts a comment. A `scenario` line
    /// anywhere selects the defaults the other keys override.
    pub fn parse(text: &str) -> Result<Self> {
        let mut s = Settings::new(Scenario::Custom);
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected 'key = value'", n + 1)))?;
            s.set(k.trim(), v.trim())
                .map_err(|e| CliError::Config(format!("line {}: {e}", n + 1)))?;
        }
        Ok(s)
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "scenario" => self.scenario = value.parse()?,
            "g" => self.g = Some(number(key, value)?),
            "Omega" => self.drive = Some(number(key, value)?),
            "omega" => self.microwave = Some(number(key, value)?),
            "Delta" => self.atom_detuning = Some(number(key, value)?),
            "delta" => {
                self.cavity_detuning = match value {
                    "auto" => None,
                    v => Some(number(key, v)?),
                }
            }
            "J" => self.hopping = Some(number(key, value)?),
            "kappa" => self.kappa = Some(number(key, value)?),
            "gamma" => self.gamma = Some(number(key, value)?),
            "model" => self.model = Some(value.parse()?),
            "feedback" => self.feedback = Some(value.parse()?),
            "feedback_channel" => self.feedback_channel = Some(value.to_string()),
            "t_final" => self.t_final = Some(number(key, value)?),
            "step" => {
                self.step = match value {
                    "auto" => None,
                    v => Some(number(key, v)?),
                }
            }
            "samples" => {
                self.samples = Some(
                    value
                        .parse()
                        .map_err(|_| CliError::Config(format!("samples: cannot parse '{value}'")))?,
                )
            }
            "initial" => self.initial = Some(value.to_string()),
            "out" => self.out = Some(PathBuf::from(value)),
            _ => return Err(CliError::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Applies a `key=value` override.
    pub fn set_pair(&mut self, pair: &str) -> Result<()> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("expected key=value, got '{pair}'")))?;
        self.set(k.trim(), v.trim())
    }

    pub fn resolve(&self) -> Result<ScenarioSpec> {
        let (drive, ratio, kappa, gamma, hopping) = self.scenario.defaults();
        let drive = self.drive.unwrap_or(drive);
        let g = self.g.unwrap_or(1.0);
        let atom_detuning = self.atom_detuning.unwrap_or(1.0);
        let hopping = self.hopping.unwrap_or(hopping);
        let cavity_detuning = match self.cavity_detuning {
            Some(d) => d,
            None => delta_star(g, hopping, atom_detuning)?,
        };
        let params = ModelParams {
            g,
            drive,
            microwave: self.microwave.unwrap_or(ratio * drive),
            atom_detuning,
            cavity_detuning,
            hopping,
            kappa: self.kappa.unwrap_or(kappa),
            gamma: self.gamma.unwrap_or(gamma),
        };
        params.validate()?;
        if g <= 0.0 {
            return Err(CliError::Config(format!("g must be positive, got {g}")));
        }
        let model = self.model.unwrap_or(ModelChoice::Effective);
        let default_horizon = match model {
            ModelChoice::Full => FULL_HORIZON,
            _ => self.scenario.horizon(),
        };
        let t_final = self.t_final.unwrap_or(default_horizon);
        if t_final <= 0.0 {
            return Err(CliError::Config(format!("t_final must be positive, got {t_final}")));
        }
        if let Some(step) = self.step {
            if step <= 0.0 || step > t_final {
                return Err(CliError::Config(format!("step {step} outside (0, t_final]")));
            }
        }
        let samples = self.samples.unwrap_or(1000);
        if samples == 0 {
            return Err(CliError::Config("samples must be at least 1".into()));
        }
        Ok(ScenarioSpec {
            scenario: self.scenario,
            params,
            delta_fixed: self.cavity_detuning.is_some(),
            model,
            feedback: self.feedback.unwrap_or(self.scenario.feedback()),
            feedback_channel: self.feedback_channel.clone().unwrap_or_else(|| "kappa.cR1".into()),
            t_final,
            step: self.step,
            samples,
            initial: self.initial.clone().unwrap_or_else(|| "gagL".into()),
            out: self.out.clone(),
        })
    }
}

/// Parses a configuration file into a resolved spec.
pub fn parse_config(text: &str) -> Result<ScenarioSpec> {
    Settings::parse(text)?.resolve()
}
