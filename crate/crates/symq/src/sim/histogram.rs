//! Outcome histograms and shot lists.

use crate::error::{Error, Result};
use crate::seeds::{stream_rng, Stream};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use std::collections::BTreeMap;

/// How far from 1.0 a histogram's total mass may drift.
pub(crate) const NORMALIZATION_TOL: f64 = 1e-9;

/// Probabilities below this are dropped when a histogram is built from a
/// dense vector; the dust from `2^16` entries stays within the
/// normalization tolerance.
const DUST: f64 = 1e-14;

/// A normalized outcome distribution with sparse storage.
///
/// Absent outcomes have probability zero. Entries iterate in outcome order,
/// so every derived artifact (samples, serializations, reports) is
/// deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    n_bits: usize,
    entries: BTreeMap<u64, f64>,
}

impl Histogram {
    /// Builds a histogram from explicit entries. Outcomes must fit in
    /// `n_bits`, frequencies must be finite and nonnegative, and the total
    /// must be 1 within `1e-9`.
    pub fn from_entries(
        n_bits: usize,
        entries: impl IntoIterator<Item = (u64, f64)>,
    ) -> Result<Self> {
        if n_bits == 0 || n_bits > 64 {
            return Err(Error::Aggregation(format!("unsupported bit width {n_bits}")));
        }
        let mut map = BTreeMap::new();
        for (outcome, freq) in entries {
            if n_bits < 64 && outcome >= (1u64 << n_bits) {
                return Err(Error::Aggregation(format!(
                    "outcome {outcome} does not fit in {n_bits} bits"
                )));
            }
            if !freq.is_finite() || freq < 0.0 {
                return Err(Error::Aggregation(format!(
                    "frequency for outcome {outcome} must be finite and nonnegative, got {freq}"
                )));
            }
            if freq > 0.0 {
                *map.entry(outcome).or_insert(0.0) += freq;
            }
        }
        let total: f64 = map.values().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::Aggregation(format!(
                "histogram mass is {total}, expected 1 within {NORMALIZATION_TOL}"
            )));
        }
        Ok(Histogram { n_bits, entries: map })
    }

    /// Builds a histogram from a dense probability vector of length
    /// `2^n_bits`, dropping numerical dust.
    pub fn from_probabilities(n_bits: usize, probs: &[f64]) -> Self {
        debug_assert_eq!(probs.len(), 1usize << n_bits);
        let entries = probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > DUST)
            .map(|(i, &p)| (i as u64, p))
            .collect();
        Histogram { n_bits, entries }
    }

    /// Point mass on a single outcome.
    pub fn point_mass(n_bits: usize, outcome: u64) -> Result<Self> {
        Histogram::from_entries(n_bits, [(outcome, 1.0)])
    }

    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    /// Number of outcomes carrying mass.
    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn probability(&self, outcome: u64) -> f64 {
        self.entries.get(&outcome).copied().unwrap_or(0.0)
    }

    /// Entries in outcome order.
    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }

    pub fn total_mass(&self) -> f64 {
        self.entries.values().sum()
    }

    /// `Some(outcome)` if the entire distribution sits on one outcome.
    pub fn single_outcome(&self) -> Option<u64> {
        if self.entries.len() == 1 {
            self.entries.keys().next().copied()
        } else {
            None
        }
    }

    /// The most probable outcome; ties break toward the smaller outcome.
    pub fn argmax(&self) -> Option<u64> {
        let mut best: Option<(u64, f64)> = None;
        for (k, v) in self.iter() {
            match best {
                Some((_, bv)) if v <= bv => {}
                _ => best = Some((k, v)),
            }
        }
        best.map(|(k, _)| k)
    }

    /// Dense probability vector of length `2^n_bits`.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut v = vec![0.0; 1usize << self.n_bits];
        for (k, p) in self.iter() {
            v[k as usize] = p;
        }
        v
    }

    /// `(1 - eps) h + eps u`, the readout depolarizing channel over the full
    /// `2^n_bits` outcome space.
    pub fn mixed_with_uniform(&self, eps: f64) -> Result<Histogram> {
        check_eps(eps)?;
        let dim = 1u64 << self.n_bits;
        let floor = eps / dim as f64;
        let mut entries: BTreeMap<u64, f64> = (0..dim).map(|k| (k, floor)).collect();
        for (k, p) in self.iter() {
            *entries.get_mut(&k).unwrap() += (1.0 - eps) * p;
        }
        entries.retain(|_, p| *p > 0.0);
        Ok(Histogram { n_bits: self.n_bits, entries })
    }

    /// Depolarizing mix that spreads the error mass over the off-target
    /// outcomes only: the target keeps `(1 - eps)` of its mass and every
    /// other outcome gains `eps / (2^n - 1)`.
    pub fn mixed_excluding_target(&self, eps: f64, target: u64) -> Result<Histogram> {
        check_eps(eps)?;
        let dim = 1u64 << self.n_bits;
        if target >= dim {
            return Err(Error::Aggregation(format!(
                "target {target} does not fit in {} bits",
                self.n_bits
            )));
        }
        if dim == 1 {
            return Ok(self.clone());
        }
        let floor = eps / (dim - 1) as f64;
        let mut entries: BTreeMap<u64, f64> =
            (0..dim).filter(|&k| k != target).map(|k| (k, floor)).collect();
        for (k, p) in self.iter() {
            *entries.entry(k).or_insert(0.0) += (1.0 - eps) * p;
        }
        entries.retain(|_, p| *p > 0.0);
        Ok(Histogram { n_bits: self.n_bits, entries })
    }

    /// Renders an outcome as a bitstring, qubit 0 rightmost.
    pub fn bitstring(&self, outcome: u64) -> String {
        format_bitstring(outcome, self.n_bits)
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&eps) || !eps.is_finite() {
        return Err(Error::Aggregation(format!("mixing strength must be in [0, 1], got {eps}")));
    }
    Ok(())
}

/// Renders an outcome as an `n_bits`-wide bitstring, qubit 0 rightmost.
pub fn format_bitstring(outcome: u64, n_bits: usize) -> String {
    format!("{outcome:0width$b}", width = n_bits)
}

/// Parses a bitstring (qubit 0 rightmost) into an outcome.
pub fn parse_bitstring(s: &str) -> Result<(u64, usize)> {
    if s.is_empty() || s.len() > 64 || !s.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(Error::Aggregation(format!("invalid bitstring `{s}`")));
    }
    Ok((u64::from_str_radix(s, 2).expect("binary digits"), s.len()))
}

/// An ordered list of measured outcomes for one circuit variant.
#[derive(Debug, Clone, PartialEq)]
pub struct ShotList {
    n_bits: usize,
    outcomes: Vec<u64>,
}

impl ShotList {
    pub fn new(n_bits: usize, outcomes: Vec<u64>) -> Result<Self> {
        if n_bits == 0 || n_bits > 64 {
            return Err(Error::Aggregation(format!("unsupported bit width {n_bits}")));
        }
        if n_bits < 64 {
            if let Some(&bad) = outcomes.iter().find(|&&o| o >= (1u64 << n_bits)) {
                return Err(Error::Aggregation(format!(
                    "outcome {bad} does not fit in {n_bits} bits"
                )));
            }
        }
        Ok(ShotList { n_bits, outcomes })
    }

    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn outcomes(&self) -> &[u64] {
        &self.outcomes
    }

    /// The first `n` shots.
    pub fn truncated(&self, n: usize) -> ShotList {
        ShotList {
            n_bits: self.n_bits,
            outcomes: self.outcomes[..n.min(self.outcomes.len())].to_vec(),
        }
    }
}

/// Draws `n_shots` independent samples from a histogram. Deterministic for
/// a given seed; sampling consumes one uniform draw per shot in order.
pub fn sample_shots(h: &Histogram, n_shots: usize, seed: u64) -> ShotList {
    let entries: Vec<(u64, f64)> = h.iter().collect();
    let mut cumulative = Vec::with_capacity(entries.len());
    let mut acc = 0.0;
    for &(_, p) in &entries {
        acc += p;
        cumulative.push(acc);
    }
    let total = acc;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let outcomes = (0..n_shots)
        .map(|_| {
            let u: f64 = rng.gen::<f64>() * total;
            let idx = cumulative.partition_point(|&c| c < u).min(entries.len() - 1);
            entries[idx].0
        })
        .collect();
    ShotList { n_bits: h.n_bits, outcomes }
}

/// Draws shots with an RNG stream derived from `(master_seed, label,
/// index)`; convenience for pipeline code that samples many variants.
pub fn sample_shots_stream(
    h: &Histogram,
    n_shots: usize,
    master_seed: u64,
    label: Stream,
    index: u32,
) -> ShotList {
    let mut rng = stream_rng(master_seed, label, index);
    let entries: Vec<(u64, f64)> = h.iter().collect();
    let mut cumulative = Vec::with_capacity(entries.len());
    let mut acc = 0.0;
    for &(_, p) in &entries {
        acc += p;
        cumulative.push(acc);
    }
    let total = acc;
    let outcomes = (0..n_shots)
        .map(|_| {
            let u: f64 = rng.gen::<f64>() * total;
            let idx = cumulative.partition_point(|&c| c < u).min(entries.len() - 1);
            entries[idx].0
        })
        .collect();
    ShotList { n_bits: h.n_bits, outcomes }
}

/// Empirical distribution of a shot list. Errors on an empty list.
pub fn shots_to_histogram(shots: &ShotList) -> Result<Histogram> {
    if shots.is_empty() {
        return Err(Error::Aggregation("cannot build a histogram from zero shots".into()));
    }
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for &o in shots.outcomes() {
        *counts.entry(o).or_insert(0) += 1;
    }
    let n = shots.len() as f64;
    let entries = counts.into_iter().map(|(k, c)| (k, c as f64 / n));
    Histogram::from_entries(shots.n_bits, entries)
}
