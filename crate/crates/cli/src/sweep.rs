//! Cartesian parameter sweeps.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;

use crate::config::{Scenario, ScenarioSpec};
use crate::error::{CliError, Result};
use crate::run::{simulate, RunRecord};

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: String,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Self {
        Axis {
            name: name.into(),
            values,
        }
    }

    /// `count` evenly spaced values from `start` to `stop` inclusive.
    pub fn linspace(name: impl Into<String>, start: f64, stop: f64, count: usize) -> Self {
        let values = match count {
            0 => vec![],
            1 => vec![start],
            _ => (0..count)
                .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
                .collect(),
        };
        Axis::new(name, values)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub template: ScenarioSpec,
    pub axes: Vec<Axis>,
}

impl SweepGrid {
    /// Checks that every axis is non-empty and names a settable parameter.
    pub fn new(template: ScenarioSpec, axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() {
            return Err(CliError::Config("sweep needs at least one axis".into()));
        }
        for a in &axes {
            let first = a
                .values
                .first()
                .ok_or_else(|| CliError::Config(format!("axis '{}' has no values", a.name)))?;
            if !matches!(
                a.name.as_str(),
                "g" | "Omega" | "omega" | "Delta" | "delta" | "J" | "kappa" | "gamma"
            ) {
                return Err(CliError::Config(format!("cannot sweep '{}'", a.name)));
            }
            template.with_param(&a.name, *first)?;
        }
        Ok(SweepGrid { template, axes })
    }

    /// The grids behind the sweep figures.
    pub fn named(scenario: Scenario) -> Option<Self> {
        Self::named_from(ScenarioSpec::named(scenario))
    }

    /// The named grid of `template.scenario`, applied to a modified template.
    pub fn named_from(template: ScenarioSpec) -> Option<Self> {
        let rates = || {
            vec![
                Axis::linspace("kappa", 0.0, 0.1, 11),
                Axis::linspace("gamma", 0.0, 0.1, 11),
            ]
        };
        let axes = match template.scenario {
            Scenario::Fig5 | Scenario::Fig6 => rates(),
            Scenario::Fig7 => vec![Axis::new("J", vec![5.0, 6.0, 7.0])],
            _ => return None,
        };
        SweepGrid::new(template, axes).ok()
    }

    pub fn cardinality(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }

    /// All points, last axis varying fastest.
    pub fn points(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![]];
        for a in &self.axes {
            out = out
                .into_iter()
                .flat_map(|p| {
                    a.values.iter().map(move |&v| {
                        let mut q = p.clone();
                        q.push(v);
                        q
                    })
                })
                .collect();
        }
        out
    }

    pub fn spec_at(&self, point: &[f64]) -> Result<ScenarioSpec> {
        let mut spec = self.template.clone();
        for (a, &v) in self.axes.iter().zip(point) {
            spec = spec.with_param(&a.name, v)?;
        }
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub point: Vec<f64>,
    pub fidelity: f64,
    pub record: RunRecord,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepFailure {
    pub point: Vec<f64>,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub axes: Vec<String>,
    pub t_final: f64,
    pub rows: Vec<SweepRow>,
    pub failures: Vec<SweepFailure>,
}

impl SweepOutcome {
    pub fn max_fidelity(&self) -> Option<&SweepRow> {
        self.rows.iter().max_by(|a, b| a.fidelity.total_cmp(&b.fidelity))
    }

    /// `axis1,axis2,...,fidelity_at_t` with one row per successful point, in grid order.
    pub fn aggregate_csv(&self) -> String {
        let mut out = self.axes.join(",");
        out.push_str(",fidelity_at_t\n");
        for r in &self.rows {
            for v in &r.point {
                let _ = write!(out, "{v:.11e},");
            }
            let _ = writeln!(out, "{:.11e}", r.fidelity);
        }
        out
    }
}

/// Runs every grid point on `jobs` threads (all cores when `None`). Failed
/// points are collected, not fatal.
pub fn sweep(grid: &SweepGrid, jobs: Option<usize>) -> Result<SweepOutcome> {
    let points = grid.points();
    let run = |point: &Vec<f64>| -> std::result::Result<SweepRow, SweepFailure> {
        let start = Instant::now();
        let fail = |e: CliError| SweepFailure {
            point: point.clone(),
            error: e.to_string(),
        };
        let spec = grid.spec_at(point).map_err(fail)?;
        let sim = simulate(&spec).map_err(fail)?;
        let record = RunRecord::from_simulation(&sim, start.elapsed().as_secs_f64());
        Ok(SweepRow {
            point: point.clone(),
            fidelity: sim.trajectory.final_fidelity(),
            record,
        })
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    let results: Vec<_> = pool.install(|| points.par_iter().map(run).collect());
    let mut outcome = SweepOutcome {
        axes: grid.axes.iter().map(|a| a.name.clone()).collect(),
        t_final: grid.template.t_final,
        rows: vec![],
        failures: vec![],
    };
    for r in results {
        match r {
            Ok(row) => outcome.rows.push(row),
            Err(f) => outcome.failures.push(f),
        }
    }
    Ok(outcome)
}
