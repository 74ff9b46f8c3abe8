//! Full Courant-sharp determination for a preset surface.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::nodal::{default_samples_per_dim, eigenspace_sweep_with, DEFAULT_BASE_N};
use crate::pleijel::{candidates_for, CandidateStatus};
use crate::surfaces::{Preset, SurfaceDescriptor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Decision {
    Sharp,
    NotSharp,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reason {
    /// `l_1` and `l_2` are Courant-sharp on every surface.
    AlwaysSharpLowIndex,
    RatioExcluded,
    BoundExcluded,
    NodalCountBelowLabel,
    NodalCountAttainsLabel,
    /// Measured counts exceed the known ceiling or an unstable sample could reach the label.
    SweepDisagreement,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evidence {
    pub eigenvalue: f64,
    pub k_min: usize,
    pub k_max: usize,
    pub multiplicity: usize,
    pub max_nodal_count: Option<usize>,
    /// Proven maximum nodal count over the eigenspace, where one is known.
    pub analytic_ceiling: Option<usize>,
    pub sweep_samples: usize,
    pub unstable_samples: usize,
    pub decision: Decision,
    pub reason: Reason,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CourantSharpVerdict {
    pub surface: SurfaceDescriptor,
    pub courant_sharp_labels: BTreeSet<usize>,
    pub lambda_bound: f64,
    pub evidence: Vec<Evidence>,
}

impl CourantSharpVerdict {
    pub fn is_conclusive(&self) -> bool {
        self.evidence
            .iter()
            .all(|e| e.decision != Decision::Inconclusive)
    }
}

/// Known maximal nodal counts over the eigenspaces that survive the filter.
pub fn analytic_ceiling(preset: Preset, eigenvalue: f64) -> Option<usize> {
    let table: &[(f64, usize)] = match preset {
        Preset::K1 => &[(2.0, 2), (4.0, 4)],
        Preset::K2 => &[],
        Preset::CHalf => &[(5.0, 2)],
        Preset::C1 => &[(4.0, 2), (5.0, 4)],
    };
    table
        .iter()
        .find(|(v, _)| (v - eigenvalue).abs() < 1e-9)
        .map(|&(_, c)| c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecideOptions {
    /// Cells per length `pi` for nodal counting.
    pub base_n: usize,
    /// Overrides the angular samples per coordinate of the eigenspace sweep.
    pub samples_per_dim: Option<usize>,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions {
            base_n: DEFAULT_BASE_N,
            samples_per_dim: None,
        }
    }
}

pub fn decide(surface: &SurfaceDescriptor) -> Result<CourantSharpVerdict> {
    decide_with(surface, DecideOptions::default())
}

pub fn decide_with(
    surface: &SurfaceDescriptor,
    options: DecideOptions,
) -> Result<CourantSharpVerdict> {
    let preset = surface.preset.ok_or_else(|| Error::Unsupported {
        operation: "decide",
        surface: surface.name(),
    })?;
    let report = candidates_for(surface)?;

    let mut evidence = Vec::with_capacity(report.candidates.len());
    for candidate in &report.candidates {
        let entry = &candidate.entry;
        let ceiling = analytic_ceiling(preset, entry.value);
        let mut record = Evidence {
            eigenvalue: entry.value,
            k_min: entry.k_min,
            k_max: entry.k_max,
            multiplicity: entry.multiplicity,
            max_nodal_count: None,
            analytic_ceiling: ceiling,
            sweep_samples: 0,
            unstable_samples: 0,
            decision: Decision::NotSharp,
            reason: Reason::RatioExcluded,
        };
        match candidate.status {
            CandidateStatus::RatioExcluded => {}
            CandidateStatus::BoundExcluded => record.reason = Reason::BoundExcluded,
            _ if entry.k_min <= 2 => {
                record.decision = Decision::Sharp;
                record.reason = Reason::AlwaysSharpLowIndex;
            }
            _ => {
                let samples = options
                    .samples_per_dim
                    .unwrap_or_else(|| default_samples_per_dim(entry.multiplicity));
                let sweep = eigenspace_sweep_with(surface, entry.value, samples, options.base_n)?;
                record.max_nodal_count = sweep.max_count;
                record.sweep_samples = sweep.samples;
                record.unstable_samples = sweep.unstable.len();
                let unstable_reaches_label = sweep
                    .unstable
                    .iter()
                    .any(|u| u.counts.iter().any(|&c| c >= entry.k_min));
                let over_ceiling = matches!(
                    (sweep.max_count, ceiling),
                    (Some(m), Some(c)) if m > c
                );
                (record.decision, record.reason) = match sweep.max_count {
                    _ if over_ceiling => (Decision::Inconclusive, Reason::SweepDisagreement),
                    Some(m) if m == entry.k_min => {
                        (Decision::Sharp, Reason::NodalCountAttainsLabel)
                    }
                    _ if unstable_reaches_label => {
                        (Decision::Inconclusive, Reason::SweepDisagreement)
                    }
                    Some(m) if m < entry.k_min => {
                        (Decision::NotSharp, Reason::NodalCountBelowLabel)
                    }
                    // above the label would contradict Courant's theorem
                    _ => (Decision::Inconclusive, Reason::SweepDisagreement),
                };
            }
        }
        evidence.push(record);
    }

    let courant_sharp_labels = evidence
        .iter()
        .filter(|e| e.decision == Decision::Sharp)
        .map(|e| e.k_min)
        .collect();
    Ok(CourantSharpVerdict {
        surface: *surface,
        courant_sharp_labels,
        lambda_bound: report.lambda_bound,
        evidence,
    })
}
