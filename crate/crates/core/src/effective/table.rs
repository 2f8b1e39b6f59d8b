//! Coefficient listing of an effective model.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use super::EffectiveModel;

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientRow {
    pub label: String,
    pub row: String,
    pub col: String,
    pub re: f64,
    pub im: f64,
}

/// Non-zero entries of `H_eff` (label `H_eff`) followed by each jump operator.
pub fn coefficient_table(model: &EffectiveModel) -> Vec<CoefficientRow> {
    let ops =
        std::iter::once(("H_eff", &model.h_eff)).chain(model.channels.iter().map(|c| (c.label.as_str(), &c.operator)));
    let mut rows = Vec::new();
    for (label, op) in ops {
        for (r, c, v) in op.triplets() {
            rows.push(CoefficientRow {
                label: label.to_string(),
                row: model.space.state(r).label(),
                col: model.space.state(c).label(),
                re: v.re,
                im: v.im,
            });
        }
    }
    rows
}

pub fn coefficient_csv(model: &EffectiveModel) -> String {
    let mut out = String::from("label,row,col,real,imag\n");
    for r in coefficient_table(model) {
        let _ = writeln!(out, "{},{},{},{:.11e},{:.11e}", r.label, r.row, r.col, r.re, r.im);
    }
    out
}

pub fn write_coefficient_csv(model: &EffectiveModel, path: &Path) -> io::Result<()> {
    fs::write(path, coefficient_csv(model)).map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}
