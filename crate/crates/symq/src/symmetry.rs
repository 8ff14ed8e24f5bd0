//! Computation-preserving circuit symmetries.
//!
//! Two families are implemented, and both leave the noiseless output
//! distribution of a circuit exactly unchanged:
//!
//! * **Qubit remapping**: run the circuit on a different injective
//!   assignment of logical qubits onto the physical register and permute
//!   the measured bits back.
//! * **Sign-flip decomposition**: rewrite selected `XX(theta)` gates as
//!   `XX(theta - pi)` followed by `RX(pi)` on both targets, which equals
//!   the original gate up to a global phase. Under multiplicative
//!   under-rotation the rewritten gate errs in the *opposite* direction,
//!   so mixing direct and rewritten variants cancels coherent error to
//!   first order.
//!
//! Variants produced here are intended to be executed independently and
//! combined by the aggregation module.

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::seeds::{stream_rng, Stream};
use crate::sim::{Histogram, ShotList};
use rand::seq::SliceRandom;
use std::collections::BTreeSet;
use std::f64::consts::PI;

/// Candidate-pool size for greedy dissimilar sampling when the caller does
/// not choose one.
pub const DEFAULT_DISSIMILAR_POOL: usize = 200;

/// An injective assignment of logical qubits onto a physical register.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QubitMapping {
    n_physical: usize,
    assignment: Vec<usize>,
}

impl QubitMapping {
    /// Builds a mapping from `assignment[logical] = physical`. The
    /// assignment must be injective and fit the physical register.
    pub fn new(n_physical: usize, assignment: Vec<usize>) -> Result<Self> {
        if assignment.is_empty() {
            return Err(Error::Mapping("mapping must cover at least one logical qubit".into()));
        }
        if assignment.len() > n_physical {
            return Err(Error::Mapping(format!(
                "cannot place {} logical qubits on {n_physical} physical qubits",
                assignment.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for &p in &assignment {
            if p >= n_physical {
                return Err(Error::Mapping(format!(
                    "physical index {p} is outside the {n_physical}-qubit register"
                )));
            }
            if !seen.insert(p) {
                return Err(Error::Mapping(format!(
                    "physical qubit {p} is assigned to two logical qubits"
                )));
            }
        }
        Ok(QubitMapping { n_physical, assignment })
    }

    /// The mapping that sends logical qubit `l` to physical qubit `l`.
    pub fn identity(n_logical: usize, n_physical: usize) -> Result<Self> {
        QubitMapping::new(n_physical, (0..n_logical).collect())
    }

    pub fn n_logical(&self) -> usize {
        self.assignment.len()
    }

    pub fn n_physical(&self) -> usize {
        self.n_physical
    }

    /// `assignment[logical] = physical`.
    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn physical(&self, logical: usize) -> usize {
        self.assignment[logical]
    }

    /// The unordered physical pair carrying a logical pair.
    pub fn physical_pair(&self, a: usize, b: usize) -> (usize, usize) {
        let (p, q) = (self.assignment[a], self.assignment[b]);
        (p.min(q), p.max(q))
    }

    /// Maps a measured physical outcome back to the logical outcome:
    /// logical bit `l` reads physical bit `assignment[l]`; unmapped
    /// physical bits are discarded.
    pub fn relabel_outcome(&self, physical_outcome: u64) -> u64 {
        self.assignment
            .iter()
            .enumerate()
            .fold(0u64, |acc, (l, &p)| acc | (((physical_outcome >> p) & 1) << l))
    }

    /// Canonical one-line text form, `map 0:p0 1:p1 ...`.
    pub fn serialize_line(&self) -> String {
        let fields: Vec<String> =
            self.assignment.iter().enumerate().map(|(l, p)| format!("{l}:{p}")).collect();
        format!("map {}", fields.join(" "))
    }

    /// Parses a `map l:p ...` line. Every logical index `0..k` must appear
    /// exactly once; order in the line is free.
    pub fn parse_line(line: &str, n_physical: usize) -> Result<Self> {
        let mut fields = line.split_whitespace();
        if fields.next() != Some("map") {
            return Err(Error::Mapping(format!("expected a `map` line, got `{line}`")));
        }
        let mut pairs = Vec::new();
        for field in fields {
            let (l, p) = field
                .split_once(':')
                .ok_or_else(|| Error::Mapping(format!("expected `logical:physical`, got `{field}`")))?;
            let l: usize = l
                .parse()
                .map_err(|_| Error::Mapping(format!("invalid logical index `{l}`")))?;
            let p: usize = p
                .parse()
                .map_err(|_| Error::Mapping(format!("invalid physical index `{p}`")))?;
            pairs.push((l, p));
        }
        let n_logical = pairs.len();
        let mut assignment = vec![usize::MAX; n_logical];
        for (l, p) in pairs {
            if l >= n_logical || assignment[l] != usize::MAX {
                return Err(Error::Mapping(format!(
                    "logical indices must cover 0..{n_logical} exactly once"
                )));
            }
            assignment[l] = p;
        }
        QubitMapping::new(n_physical, assignment)
    }
}

/// A full symmetry: a qubit remapping plus the set of XX-gate ordinals to
/// rewrite through the sign-flip identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetryTransform {
    pub mapping: QubitMapping,
    pub decomposition_mask: BTreeSet<usize>,
}

impl SymmetryTransform {
    pub fn new(mapping: QubitMapping, decomposition_mask: BTreeSet<usize>) -> Self {
        SymmetryTransform { mapping, decomposition_mask }
    }

    /// The do-nothing transform on an `n_logical == n_physical` register.
    pub fn identity(n_logical: usize, n_physical: usize) -> Result<Self> {
        Ok(SymmetryTransform::new(
            QubitMapping::identity(n_logical, n_physical)?,
            BTreeSet::new(),
        ))
    }

    /// Text form: a `map` line, then a `mask i,j,k` line when the mask is
    /// nonempty.
    pub fn serialize(&self) -> String {
        let mut out = self.mapping.serialize_line();
        out.push('\n');
        if !self.decomposition_mask.is_empty() {
            let items: Vec<String> =
                self.decomposition_mask.iter().map(|o| o.to_string()).collect();
            out.push_str(&format!("mask {}\n", items.join(",")));
        }
        out
    }

    /// Parses the text form produced by [`serialize`](Self::serialize).
    pub fn parse(text: &str, n_physical: usize) -> Result<Self> {
        let mut mapping = None;
        let mut mask = BTreeSet::new();
        for raw in text.lines() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with("map") {
                if mapping.is_some() {
                    return Err(Error::Mapping("duplicate `map` line".into()));
                }
                mapping = Some(QubitMapping::parse_line(line, n_physical)?);
            } else if let Some(rest) = line.strip_prefix("mask") {
                mask = parse_mask_items(rest)?;
            } else {
                return Err(Error::Mapping(format!("unknown transform line `{line}`")));
            }
        }
        let mapping =
            mapping.ok_or_else(|| Error::Mapping("transform needs a `map` line".into()))?;
        Ok(SymmetryTransform::new(mapping, mask))
    }
}

fn parse_mask_items(rest: &str) -> Result<BTreeSet<usize>> {
    let rest = rest.trim();
    let mut mask = BTreeSet::new();
    if rest.is_empty() {
        return Ok(mask);
    }
    for item in rest.split(',') {
        let ordinal: usize = item
            .trim()
            .parse()
            .map_err(|_| Error::Mapping(format!("invalid mask ordinal `{item}`")))?;
        mask.insert(ordinal);
    }
    Ok(mask)
}

/// A circuit variant ready to execute on the physical register, together
/// with the mapping needed to read its results back in logical order.
#[derive(Debug, Clone, PartialEq)]
pub struct VariantRealization {
    physical_circuit: Circuit,
    mapping: QubitMapping,
}

impl VariantRealization {
    pub fn physical_circuit(&self) -> &Circuit {
        &self.physical_circuit
    }

    pub fn mapping(&self) -> &QubitMapping {
        &self.mapping
    }

    /// Maps a measured physical histogram back to logical outcomes.
    /// Distinct physical outcomes that agree on the mapped bits fold into
    /// one logical entry.
    pub fn relabel_histogram(&self, physical: &Histogram) -> Result<Histogram> {
        if physical.n_bits() != self.mapping.n_physical() {
            return Err(Error::Mapping(format!(
                "histogram is over {} bits but the register has {}",
                physical.n_bits(),
                self.mapping.n_physical()
            )));
        }
        let entries = physical.iter().map(|(o, p)| (self.mapping.relabel_outcome(o), p));
        Histogram::from_entries(self.mapping.n_logical(), entries.collect::<Vec<_>>())
    }

    /// Maps measured physical shots back to logical outcomes, in order.
    pub fn relabel_shots(&self, physical: &ShotList) -> Result<ShotList> {
        if physical.n_bits() != self.mapping.n_physical() {
            return Err(Error::Mapping(format!(
                "shots are over {} bits but the register has {}",
                physical.n_bits(),
                self.mapping.n_physical()
            )));
        }
        let outcomes =
            physical.outcomes().iter().map(|&o| self.mapping.relabel_outcome(o)).collect();
        ShotList::new(self.mapping.n_logical(), outcomes)
    }
}

/// Applies a symmetry transform: re-targets every gate through the
/// mapping and rewrites each masked `XX(theta)` as `XX(theta - pi)`
/// followed by `RX(pi)` on both targets (equal to the original up to
/// global phase). The relabeled noiseless distribution of the variant
/// equals the base circuit's exactly.
pub fn apply_symmetry(circuit: &Circuit, transform: &SymmetryTransform) -> Result<VariantRealization> {
    let mapping = &transform.mapping;
    if mapping.n_logical() != circuit.n_qubits() {
        return Err(Error::Mapping(format!(
            "mapping covers {} logical qubits but the circuit has {}",
            mapping.n_logical(),
            circuit.n_qubits()
        )));
    }
    let n_xx = circuit.xx_count();
    if let Some(&bad) = transform.decomposition_mask.iter().find(|&&o| o >= n_xx) {
        return Err(Error::MaskOutOfRange { ordinal: bad, n_xx });
    }

    let mut gates = Vec::with_capacity(circuit.gates().len());
    let mut ordinal = 0;
    for gate in circuit.gates() {
        let remapped = gate.retargeted(|q| mapping.physical(q));
        if gate.is_xx() {
            if transform.decomposition_mask.contains(&ordinal) {
                if let Gate::Xx { a, b, angle } = remapped {
                    gates.push(Gate::xx(a, b, angle - PI));
                    gates.push(Gate::rx(a, PI));
                    gates.push(Gate::rx(b, PI));
                } else {
                    unreachable!("is_xx gates remap to Xx");
                }
            } else {
                gates.push(remapped);
            }
            ordinal += 1;
        } else {
            gates.push(remapped);
        }
    }
    let physical_circuit = Circuit::new(mapping.n_physical(), gates, circuit.measured())?;
    Ok(VariantRealization { physical_circuit, mapping: mapping.clone() })
}

/// Ordinals of XX gates with `ordinal % m == offset % m` — e.g. `m = 4,
/// offset = 0` rewrites every fourth entangling gate.
pub fn decomposition_mask_every_mth(circuit: &Circuit, m: usize, offset: usize) -> BTreeSet<usize> {
    assert!(m >= 1, "stride must be at least 1");
    (0..circuit.xx_count()).filter(|o| o % m == offset % m).collect()
}

/// Draws `k` uniformly random injective mappings, one independent RNG
/// stream per variant index, so the sample is reproducible and insensitive
/// to evaluation order.
pub fn sample_mappings_random(
    n_logical: usize,
    n_physical: usize,
    k: usize,
    master_seed: u64,
) -> Result<Vec<QubitMapping>> {
    check_sampling_args(n_logical, n_physical, k)?;
    (0..k)
        .map(|i| {
            let mut rng = stream_rng(master_seed, Stream::Mapping, i as u32);
            let mut physical: Vec<usize> = (0..n_physical).collect();
            let (chosen, _) = physical.partial_shuffle(&mut rng, n_logical);
            QubitMapping::new(n_physical, chosen.to_vec())
        })
        .collect()
}

/// Greedy dissimilar sampling with the default candidate-pool size.
pub fn sample_mappings_dissimilar(
    circuit: &Circuit,
    n_physical: usize,
    k: usize,
    master_seed: u64,
) -> Result<Vec<QubitMapping>> {
    sample_mappings_dissimilar_with_pool(circuit, n_physical, k, master_seed, DEFAULT_DISSIMILAR_POOL)
}

/// Greedy dissimilar sampling: at each step, draw `pool_size` fresh random
/// injections and keep the one whose XX gates reuse the fewest physical
/// pairs already claimed by earlier selections (first minimum wins).
/// Spreading entangling gates over distinct pairs decorrelates the
/// variants' coherent errors.
pub fn sample_mappings_dissimilar_with_pool(
    circuit: &Circuit,
    n_physical: usize,
    k: usize,
    master_seed: u64,
    pool_size: usize,
) -> Result<Vec<QubitMapping>> {
    let n_logical = circuit.n_qubits();
    check_sampling_args(n_logical, n_physical, k)?;
    if pool_size == 0 {
        return Err(Error::Mapping("candidate pool must not be empty".into()));
    }
    let logical_pairs = circuit.xx_pairs();
    let mut chosen: Vec<QubitMapping> = Vec::with_capacity(k);
    let mut used: BTreeSet<(usize, usize)> = BTreeSet::new();
    for step in 0..k {
        let mut rng = stream_rng(master_seed, Stream::DissimilarPool, step as u32);
        let mut best: Option<(usize, QubitMapping)> = None;
        for _ in 0..pool_size {
            let mut physical: Vec<usize> = (0..n_physical).collect();
            let (sel, _) = physical.partial_shuffle(&mut rng, n_logical);
            let candidate = QubitMapping::new(n_physical, sel.to_vec())?;
            let score = logical_pairs
                .iter()
                .filter(|&&(a, b)| used.contains(&candidate.physical_pair(a, b)))
                .count();
            if best.as_ref().map_or(true, |(s, _)| score < *s) {
                best = Some((score, candidate));
                if score == 0 {
                    break;
                }
            }
        }
        let (_, winner) = best.expect("pool is nonempty");
        for &(a, b) in &logical_pairs {
            used.insert(winner.physical_pair(a, b));
        }
        chosen.push(winner);
    }
    Ok(chosen)
}

fn check_sampling_args(n_logical: usize, n_physical: usize, k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::Mapping("at least one mapping must be requested".into()));
    }
    if n_logical > n_physical {
        return Err(Error::Mapping(format!(
            "cannot place {n_logical} logical qubits on {n_physical} physical qubits"
        )));
    }
    Ok(())
}

/// Number of `candidate` XX gates whose physical pair is also used by some
/// XX gate under `prior` — the per-step quantity the greedy sampler
/// minimizes.
pub fn mapping_overlap(circuit: &Circuit, prior: &QubitMapping, candidate: &QubitMapping) -> usize {
    let prior_pairs: BTreeSet<(usize, usize)> =
        circuit.xx_pairs().iter().map(|&(a, b)| prior.physical_pair(a, b)).collect();
    circuit
        .xx_pairs()
        .iter()
        .filter(|&&(a, b)| prior_pairs.contains(&candidate.physical_pair(a, b)))
        .count()
}

/// Sum of `mapping_overlap` over all ordered index pairs `i < j`.
pub fn total_pairwise_overlap(circuit: &Circuit, mappings: &[QubitMapping]) -> usize {
    let mut total = 0;
    for i in 0..mappings.len() {
        for j in (i + 1)..mappings.len() {
            total += mapping_overlap(circuit, &mappings[i], &mappings[j]);
        }
    }
    total
}
