//! Aggregation of per-variant measurement statistics.
//!
//! Two strategies are provided. **Averaging** takes the componentwise mean
//! of the variant histograms; it is simple and unbiased but keeps every
//! erroneous count. **Plurality voting** groups one shot from each variant,
//! awards the group to a bitstring only when it is the unique most frequent
//! member and appears at least `t` times, and tallies the winners. Voting
//! suppresses uncorrelated errors at the price of a nonlinear bias, which
//! the voting-theory module quantifies exactly.

use crate::circuit::fmt_significant;
use crate::error::{Error, Result};
use crate::seeds::{stream_rng, Stream};
use crate::sim::{format_bitstring, parse_bitstring, shots_to_histogram, Histogram, ShotList};
use rand::seq::SliceRandom;
use std::collections::BTreeMap;
use std::fmt;

/// Default number of scrambled-order passes for plurality voting.
pub const DEFAULT_SCRAMBLES: usize = 10;

/// Measurement statistics for `m` variants of one circuit: histograms
/// always, raw shot lists when shot-level aggregation is wanted.
#[derive(Debug, Clone, PartialEq)]
pub struct VariantBatch {
    n_bits: usize,
    histograms: Vec<Histogram>,
    shots: Option<Vec<ShotList>>,
}

impl VariantBatch {
    /// Builds a batch from per-variant shot lists; all must share the bit
    /// width and the shot count, and be nonempty.
    pub fn from_shots(shots: Vec<ShotList>) -> Result<Self> {
        if shots.is_empty() {
            return Err(Error::Aggregation("batch needs at least one variant".into()));
        }
        let n_bits = shots[0].n_bits();
        let s = shots[0].len();
        for (v, list) in shots.iter().enumerate() {
            if list.n_bits() != n_bits {
                return Err(Error::Aggregation(format!(
                    "variant {v} is over {} bits, expected {n_bits}",
                    list.n_bits()
                )));
            }
            if list.len() != s {
                return Err(Error::Aggregation(format!(
                    "variant {v} has {} shots, expected {s}",
                    list.len()
                )));
            }
        }
        let histograms =
            shots.iter().map(shots_to_histogram).collect::<Result<Vec<_>>>()?;
        Ok(VariantBatch { n_bits, histograms, shots: Some(shots) })
    }

    /// Builds a histogram-only batch (averaging only; voting needs shots).
    pub fn from_histograms(histograms: Vec<Histogram>) -> Result<Self> {
        if histograms.is_empty() {
            return Err(Error::Aggregation("batch needs at least one variant".into()));
        }
        let n_bits = histograms[0].n_bits();
        if let Some(bad) = histograms.iter().find(|h| h.n_bits() != n_bits) {
            return Err(Error::Aggregation(format!(
                "variant histograms mix widths {n_bits} and {}",
                bad.n_bits()
            )));
        }
        Ok(VariantBatch { n_bits, histograms, shots: None })
    }

    /// Variant count `m`.
    pub fn m(&self) -> usize {
        self.histograms.len()
    }

    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    /// Shots per variant, when shot-level data is present.
    pub fn shot_count(&self) -> Option<usize> {
        self.shots.as_ref().map(|s| s[0].len())
    }

    pub fn histograms(&self) -> &[Histogram] {
        &self.histograms
    }

    pub fn shots(&self) -> Option<&[ShotList]> {
        self.shots.as_deref()
    }
}

/// Parameters for plurality voting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VoteConfig {
    /// Threshold the winner's multiplicity must reach before the global
    /// reduction loop lowers it.
    pub initial_threshold: usize,
    /// Number of shot-order passes; pass 0 uses the as-measured order and
    /// each later pass reshuffles every variant independently.
    pub scrambles: usize,
    /// Master seed for the scramble streams.
    pub seed: u64,
}

impl VoteConfig {
    /// Majority-style default: threshold just above half the variants
    /// (`ceil(m/2) + 1`) and ten scrambles. Fails when `m < 2`, where that
    /// threshold is unsatisfiable.
    pub fn default_for(m: usize, seed: u64) -> Result<Self> {
        let initial_threshold = (m + 1) / 2 + 1;
        let cfg = VoteConfig { initial_threshold, scrambles: DEFAULT_SCRAMBLES, seed };
        cfg.validate_for(m)?;
        Ok(cfg)
    }

    /// Checks `2 <= t0 <= m` and at least one scramble pass.
    pub fn validate_for(&self, m: usize) -> Result<()> {
        if self.initial_threshold < 2 || self.initial_threshold > m {
            return Err(Error::Aggregation(format!(
                "initial threshold {} must be between 2 and the variant count {m}",
                self.initial_threshold
            )));
        }
        if self.scrambles == 0 {
            return Err(Error::Aggregation("at least one scramble pass is required".into()));
        }
        Ok(())
    }
}

/// How an aggregated histogram was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AggregationMethod {
    /// Componentwise mean of variant histograms.
    Average,
    /// Plurality vote that found winners at the recorded threshold.
    Vote { threshold: usize },
    /// Voting found no winner at any threshold down to 2 and fell back to
    /// averaging.
    VoteFallbackAverage,
}

impl fmt::Display for AggregationMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AggregationMethod::Average => write!(f, "average"),
            AggregationMethod::Vote { threshold } => write!(f, "vote({threshold})"),
            AggregationMethod::VoteFallbackAverage => write!(f, "vote-fallback-average"),
        }
    }
}

/// An aggregated histogram plus provenance: which method produced it and,
/// for voting, how many groups produced a winner.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregationResult {
    pub histogram: Histogram,
    pub method: AggregationMethod,
    /// Number of winning groups accumulated across scrambles; zero for
    /// plain averaging and for the fallback.
    pub winner_count: usize,
}

/// Componentwise mean of the variant histograms.
pub fn average_histograms(batch: &VariantBatch) -> Result<AggregationResult> {
    let m = batch.m() as f64;
    let mut sums: BTreeMap<u64, f64> = BTreeMap::new();
    for h in batch.histograms() {
        for (outcome, p) in h.iter() {
            *sums.entry(outcome).or_insert(0.0) += p;
        }
    }
    let entries: Vec<(u64, f64)> = sums.into_iter().map(|(o, s)| (o, s / m)).collect();
    Ok(AggregationResult {
        histogram: Histogram::from_entries(batch.n_bits(), entries)?,
        method: AggregationMethod::Average,
        winner_count: 0,
    })
}

/// Plurality voting over shot groups.
///
/// For every scramble pass and every shot index, the group of `m`
/// bitstrings (one per variant) is examined once: it elects its unique
/// most-frequent bitstring if one exists, remembering the multiplicity.
/// Thresholds are then tried from `t0` down to 2; the first threshold with
/// at least one winner anywhere wins globally, and the winner counts at
/// that threshold are normalized into the result. If even `t = 2` finds
/// nothing, the componentwise average is returned instead and the method
/// records the fallback.
pub fn plurality_vote(batch: &VariantBatch, cfg: &VoteConfig) -> Result<AggregationResult> {
    let counts_by_multiplicity = tally_winners(batch, cfg)?;
    for t in (2..=cfg.initial_threshold).rev() {
        if let Some(result) = threshold_result(batch, &counts_by_multiplicity, t)? {
            return Ok(result);
        }
    }
    vote_fallback(batch)
}

/// Plurality voting with the threshold taken literally: winners must reach
/// `t0` exactly as configured, with no reduction loop. Falls back to
/// averaging when nothing reaches it. Threshold training uses this so each
/// candidate is judged by what it alone achieves — under the reduction
/// loop, every `t0` above the best winning multiplicity collapses to the
/// same result and ties.
pub fn plurality_vote_strict(batch: &VariantBatch, cfg: &VoteConfig) -> Result<AggregationResult> {
    let counts_by_multiplicity = tally_winners(batch, cfg)?;
    if let Some(result) = threshold_result(batch, &counts_by_multiplicity, cfg.initial_threshold)? {
        return Ok(result);
    }
    vote_fallback(batch)
}

/// Runs every scramble pass and group election, tallying winners by their
/// multiplicity: `result[k]` counts winners that appeared exactly `k`
/// times in their group.
fn tally_winners(batch: &VariantBatch, cfg: &VoteConfig) -> Result<Vec<BTreeMap<u64, usize>>> {
    let shots = batch
        .shots()
        .ok_or_else(|| Error::Aggregation("plurality voting needs shot-level data".into()))?;
    let m = batch.m();
    cfg.validate_for(m)?;
    let s = batch.shot_count().expect("shot-level batches know their shot count");

    let mut counts_by_multiplicity: Vec<BTreeMap<u64, usize>> = vec![BTreeMap::new(); m + 1];
    let mut group = Vec::with_capacity(m);
    for pass in 0..cfg.scrambles {
        let orders: Vec<Vec<usize>> = (0..m)
            .map(|v| {
                let mut order: Vec<usize> = (0..s).collect();
                if pass > 0 {
                    let mut rng =
                        stream_rng(cfg.seed, Stream::Scramble, (pass * m + v) as u32);
                    order.shuffle(&mut rng);
                }
                order
            })
            .collect();
        for j in 0..s {
            group.clear();
            group.extend((0..m).map(|v| shots[v].outcomes()[orders[v][j]]));
            if let Some((winner, multiplicity)) = unique_plurality(&group) {
                *counts_by_multiplicity[multiplicity].entry(winner).or_insert(0) += 1;
            }
        }
    }
    Ok(counts_by_multiplicity)
}

/// Normalizes the winners at multiplicity `t` or above into a histogram,
/// or `None` when there are none.
fn threshold_result(
    batch: &VariantBatch,
    counts_by_multiplicity: &[BTreeMap<u64, usize>],
    t: usize,
) -> Result<Option<AggregationResult>> {
    let mut tally: BTreeMap<u64, usize> = BTreeMap::new();
    for bucket in &counts_by_multiplicity[t..] {
        for (&outcome, &count) in bucket {
            *tally.entry(outcome).or_insert(0) += count;
        }
    }
    let total: usize = tally.values().sum();
    if total == 0 {
        return Ok(None);
    }
    let entries: Vec<(u64, f64)> =
        tally.into_iter().map(|(o, c)| (o, c as f64 / total as f64)).collect();
    Ok(Some(AggregationResult {
        histogram: Histogram::from_entries(batch.n_bits(), entries)?,
        method: AggregationMethod::Vote { threshold: t },
        winner_count: total,
    }))
}

fn vote_fallback(batch: &VariantBatch) -> Result<AggregationResult> {
    let averaged = average_histograms(batch)?;
    Ok(AggregationResult {
        histogram: averaged.histogram,
        method: AggregationMethod::VoteFallbackAverage,
        winner_count: 0,
    })
}

/// The unique most-frequent element of a group and its multiplicity, or
/// `None` on a tie.
fn unique_plurality(group: &[u64]) -> Option<(u64, usize)> {
    let mut counts: BTreeMap<u64, usize> = BTreeMap::new();
    for &outcome in group {
        *counts.entry(outcome).or_insert(0) += 1;
    }
    let max = counts.values().copied().max()?;
    let mut at_max = counts.iter().filter(|(_, &c)| c == max);
    let (&winner, _) = at_max.next()?;
    if at_max.next().is_some() {
        return None;
    }
    Some((winner, max))
}

/// `(1 - eps) h + eps * uniform` over the full outcome space.
pub fn mix_depolarizing(h: &Histogram, eps: f64) -> Result<Histogram> {
    h.mixed_with_uniform(eps)
}

/// Depolarizing mix in the off-target form: the target keeps `1 - eps` of
/// its mass and each other outcome gains `eps / (2^n - 1)`.
pub fn mix_depolarizing_excluding_target(
    h: &Histogram,
    eps: f64,
    target: u64,
) -> Result<Histogram> {
    h.mixed_excluding_target(eps, target)
}

/// Writes per-variant shots as text: one bitstring per line (qubit 0
/// rightmost), variant blocks separated by one blank line.
pub fn write_shot_blocks(variants: &[ShotList]) -> String {
    let mut out = String::new();
    for (v, list) in variants.iter().enumerate() {
        if v > 0 {
            out.push('\n');
        }
        for &outcome in list.outcomes() {
            out.push_str(&format_bitstring(outcome, list.n_bits()));
            out.push('\n');
        }
    }
    out
}

/// Parses the block text form written by [`write_shot_blocks`]. Lines
/// starting with `#` are skipped; blank lines separate variants; all
/// bitstrings must share one width.
pub fn parse_shot_blocks(text: &str) -> Result<Vec<ShotList>> {
    let mut variants: Vec<ShotList> = Vec::new();
    let mut n_bits: Option<usize> = None;
    let mut current: Vec<u64> = Vec::new();
    let mut flush = |current: &mut Vec<u64>, n_bits: usize| -> Result<()> {
        if !current.is_empty() {
            variants.push(ShotList::new(n_bits, std::mem::take(current))?);
        }
        Ok(())
    };
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.starts_with('#') {
            continue;
        }
        if line.is_empty() {
            if let Some(w) = n_bits {
                flush(&mut current, w)?;
            }
            continue;
        }
        let (outcome, width) = parse_bitstring(line)
            .map_err(|e| Error::Parse { line: idx + 1, message: e.to_string() })?;
        match n_bits {
            None => n_bits = Some(width),
            Some(w) if w != width => {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("bitstring width {width} differs from earlier width {w}"),
                });
            }
            _ => {}
        }
        current.push(outcome);
    }
    if let Some(w) = n_bits {
        flush(&mut current, w)?;
    }
    if variants.is_empty() {
        return Err(Error::Aggregation("shot file contains no bitstrings".into()));
    }
    Ok(variants)
}

/// Writes a histogram as `bitstring,frequency` CSV with a header line.
pub fn write_histogram_csv(h: &Histogram) -> String {
    let mut out = String::from("bitstring,frequency\n");
    for (outcome, p) in h.iter() {
        out.push_str(&format_bitstring(outcome, h.n_bits()));
        out.push(',');
        out.push_str(&fmt_significant(p, 17));
        out.push('\n');
    }
    out
}

/// Parses `bitstring,frequency` CSV (header optional). The entries must
/// form a normalized histogram.
pub fn parse_histogram_csv(text: &str) -> Result<Histogram> {
    let mut entries: Vec<(u64, f64)> = Vec::new();
    let mut n_bits: Option<usize> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line == "bitstring,frequency" {
            continue;
        }
        let fail = |message: String| Error::Parse { line: idx + 1, message };
        let (bits, freq) = line
            .split_once(',')
            .ok_or_else(|| fail("expected `bitstring,frequency`".into()))?;
        let (outcome, width) =
            parse_bitstring(bits.trim()).map_err(|e| fail(e.to_string()))?;
        match n_bits {
            None => n_bits = Some(width),
            Some(w) if w != width => {
                return Err(fail(format!(
                    "bitstring width {width} differs from earlier width {w}"
                )));
            }
            _ => {}
        }
        let freq: f64 = freq
            .trim()
            .parse()
            .map_err(|_| fail(format!("invalid frequency `{}`", freq.trim())))?;
        entries.push((outcome, freq));
    }
    let n_bits =
        n_bits.ok_or_else(|| Error::Aggregation("histogram file contains no entries".into()))?;
    Histogram::from_entries(n_bits, entries)
}
