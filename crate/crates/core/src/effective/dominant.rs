//! Pruning of weak effective jump terms.

use super::EffectiveModel;
use crate::model::CollapseChannel;
use crate::operator::SparseOperator;

pub const DEFAULT_CUTOFF: f64 = 0.2;

/// What [`dominant_channels`] removed.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DiscardReport {
    /// Largest coefficient magnitude over all channels.
    pub largest: f64,
    pub discarded_entries: usize,
    /// `Σ |c|²` over discarded entries.
    pub discarded_weight: f64,
    /// `Σ |c|²` over all entries.
    pub total_weight: f64,
    /// Largest discarded magnitude divided by `largest`.
    pub max_discarded_ratio: f64,
    /// Channels with no entry left.
    pub dropped_channels: Vec<String>,
}

/// Keeps the jump-operator entries with magnitude at least `cutoff` times the
/// largest one; channels left empty are removed. The Hamiltonian is untouched.
///
/// A cutoff of 1 or more keeps exactly one entry, the first largest in
/// channel order.
pub fn dominant_channels(model: &EffectiveModel, cutoff: f64) -> (EffectiveModel, DiscardReport) {
    let mut report = DiscardReport::default();
    let mut peak: Option<(usize, usize, usize)> = None;
    for (k, ch) in model.channels.iter().enumerate() {
        for (r, c, v) in ch.operator.triplets() {
            report.total_weight += v.norm_sqr();
            if v.norm() > report.largest {
                report.largest = v.norm();
                peak = Some((k, r, c));
            }
        }
    }
    let threshold = cutoff * report.largest;
    let mut channels = Vec::new();
    for (k, ch) in model.channels.iter().enumerate() {
        let mut kept = Vec::new();
        for (r, c, v) in ch.operator.triplets() {
            let keep = if cutoff >= 1.0 {
                peak == Some((k, r, c))
            } else {
                v.norm() >= threshold
            };
            if keep {
                kept.push((r, c, v));
            } else {
                report.discarded_entries += 1;
                report.discarded_weight += v.norm_sqr();
                report.max_discarded_ratio = report.max_discarded_ratio.max(v.norm() / report.largest);
            }
        }
        if kept.is_empty() {
            report.dropped_channels.push(ch.label.clone());
        } else {
            let op = SparseOperator::from_triplets(ch.operator.dim(), kept);
            channels.push(CollapseChannel::new(ch.label.clone(), op));
        }
    }
    let pruned = EffectiveModel {
        space: model.space.clone(),
        h_eff: model.h_eff.clone(),
        channels,
        provenance: model.provenance,
    };
    (pruned, report)
}
