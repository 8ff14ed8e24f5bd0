//! Experiment results: structured report plus JSON and CSV emission.
//!
//! Reports are plain data with a documented schema: everything a reader
//! needs to audit a run (seed, config hash, per-variant results) and the
//! headline metrics (fidelities and target probabilities per aggregation
//! strategy). Serialization is deterministic — map keys are sorted
//! bitstrings and floats round-trip exactly — so identical runs emit
//! byte-identical files.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::circuit::fmt_significant;
use crate::error::Result;

/// Run provenance and derived experiment facts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub seed: u64,
    pub config_hash: String,
    pub variants: usize,
    pub shots: usize,
    pub n_physical: usize,
    pub symmetry_mode: String,
    pub infinite_shots: bool,
    /// Largest pair-delta magnitude after any calibration.
    pub noise_max_abs_delta: f64,
    pub depolarizing: f64,
    /// Pair-delta scale factor chosen by calibration, when it ran.
    pub calibration_scale: Option<f64>,
    /// Initial vote threshold, when the run voted.
    pub vote_threshold: Option<usize>,
    pub vote_scrambles: usize,
    pub circuit_qubits: usize,
    pub circuit_xx_gates: usize,
    /// Ideal most-probable outcome, as a bitstring.
    pub target_bitstring: String,
}

/// One variant's realization and measured quality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantReport {
    pub index: usize,
    /// The qubit mapping in `map L:P ...` text form.
    pub mapping: String,
    /// Ordinals of sign-flip-decomposed entangling gates.
    pub masked_gates: Vec<usize>,
    pub fidelity: f64,
    pub target_probability: f64,
    pub histogram: BTreeMap<String, f64>,
}

/// Aggregate metrics for a strategy (or for the unsymmetrized mean).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryMetrics {
    pub fidelity: f64,
    pub target_probability: f64,
}

/// An aggregated histogram with its provenance and metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyOutcome {
    /// `average`, `vote(t)`, or `vote-fallback-average`.
    pub method: String,
    /// Winning groups behind a voted histogram; 0 otherwise.
    pub winner_count: usize,
    pub fidelity: f64,
    pub target_probability: f64,
    pub histogram: BTreeMap<String, f64>,
}

/// The full result of one experiment run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub metadata: RunMetadata,
    /// Ideal outcome distribution of the logical circuit.
    pub ideal: BTreeMap<String, f64>,
    pub variants: Vec<VariantReport>,
    /// Mean per-variant fidelity and target probability — the paper-style
    /// "unsymmetrized" reference.
    pub unsymmetrized: SummaryMetrics,
    pub averaged: Option<StrategyOutcome>,
    pub voted: Option<StrategyOutcome>,
    /// Human-readable caveats, e.g. when voting lowered the fidelity.
    pub warnings: Vec<String>,
}

/// Output format for [`emit_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(format!("unknown format {other:?} (expected json or csv)")),
        }
    }
}

impl ExperimentReport {
    /// The canonical JSON rendering (pretty, trailing newline).
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }

    /// Fidelity and target-probability rows: one per variant, then the
    /// unsymmetrized mean and each aggregate that ran.
    pub fn fidelity_csv(&self) -> String {
        let mut out = String::from("label,fidelity,target_probability\n");
        let mut push = |label: &str, fidelity: f64, target: f64| {
            out.push_str(&format!(
                "{label},{},{}\n",
                fmt_significant(fidelity, 17),
                fmt_significant(target, 17)
            ));
        };
        for v in &self.variants {
            push(&format!("variant-{}", v.index), v.fidelity, v.target_probability);
        }
        push("unsymmetrized", self.unsymmetrized.fidelity, self.unsymmetrized.target_probability);
        if let Some(a) = &self.averaged {
            push("averaged", a.fidelity, a.target_probability);
        }
        if let Some(v) = &self.voted {
            push("voted", v.fidelity, v.target_probability);
        }
        out
    }

    /// All histograms as `label,bitstring,frequency` rows.
    pub fn histogram_csv(&self) -> String {
        let mut out = String::from("label,bitstring,frequency\n");
        let mut block = |label: &str, h: &BTreeMap<String, f64>| {
            for (bits, p) in h {
                out.push_str(&format!("{label},{bits},{}\n", fmt_significant(*p, 17)));
            }
        };
        block("ideal", &self.ideal);
        for v in &self.variants {
            block(&format!("variant-{}", v.index), &v.histogram);
        }
        if let Some(a) = &self.averaged {
            block("averaged", &a.histogram);
        }
        if let Some(v) = &self.voted {
            block("voted", &v.histogram);
        }
        out
    }
}

/// Writes the report under `out_dir` and returns the written paths:
/// `report.json` for JSON; `fidelities.csv` and `histograms.csv` for CSV.
/// Emission is deterministic, so re-emitting is byte-identical.
pub fn emit_report(
    report: &ExperimentReport,
    format: ReportFormat,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)?;
    match format {
        ReportFormat::Json => {
            let path = out_dir.join("report.json");
            std::fs::write(&path, report.to_json())?;
            Ok(vec![path])
        }
        ReportFormat::Csv => {
            let fid = out_dir.join("fidelities.csv");
            std::fs::write(&fid, report.fidelity_csv())?;
            let hist = out_dir.join("histograms.csv");
            std::fs::write(&hist, report.histogram_csv())?;
            Ok(vec![fid, hist])
        }
    }
}

/// One unsymmetrized run of a circuit under a noise model: the ideal,
/// exact-noisy, and finite-shot views side by side. The reference point
/// symmetrized reports are judged against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineReport {
    pub config_hash: String,
    pub seed: u64,
    pub shots: usize,
    /// Ideal most-probable outcome, as a bitstring.
    pub target_bitstring: String,
    pub fidelity_exact: f64,
    pub fidelity_sampled: f64,
    pub target_probability_exact: f64,
    pub target_probability_sampled: f64,
    pub ideal: BTreeMap<String, f64>,
    pub noisy: BTreeMap<String, f64>,
    pub sampled: BTreeMap<String, f64>,
}

impl BaselineReport {
    /// The canonical JSON rendering (pretty, trailing newline).
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }

    /// Fidelity and target-probability rows for the exact and sampled views.
    pub fn fidelity_csv(&self) -> String {
        let mut out = String::from("label,fidelity,target_probability\n");
        let mut push = |label: &str, fidelity: f64, target: f64| {
            out.push_str(&format!(
                "{label},{},{}\n",
                fmt_significant(fidelity, 17),
                fmt_significant(target, 17)
            ));
        };
        push("exact", self.fidelity_exact, self.target_probability_exact);
        push("sampled", self.fidelity_sampled, self.target_probability_sampled);
        out
    }

    /// All three histograms as `label,bitstring,frequency` rows.
    pub fn histogram_csv(&self) -> String {
        let mut out = String::from("label,bitstring,frequency\n");
        let mut block = |label: &str, h: &BTreeMap<String, f64>| {
            for (bits, p) in h {
                out.push_str(&format!("{label},{bits},{}\n", fmt_significant(*p, 17)));
            }
        };
        block("ideal", &self.ideal);
        block("noisy", &self.noisy);
        block("sampled", &self.sampled);
        out
    }
}

/// Writes the baseline report under `out_dir`, mirroring [`emit_report`]'s
/// file layout.
pub fn emit_baseline(
    report: &BaselineReport,
    format: ReportFormat,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)?;
    match format {
        ReportFormat::Json => {
            let path = out_dir.join("report.json");
            std::fs::write(&path, report.to_json())?;
            Ok(vec![path])
        }
        ReportFormat::Csv => {
            let fid = out_dir.join("fidelities.csv");
            std::fs::write(&fid, report.fidelity_csv())?;
            let hist = out_dir.join("histograms.csv");
            std::fs::write(&hist, report.histogram_csv())?;
            Ok(vec![fid, hist])
        }
    }
}
