//! Config-driven experiment runner.
//!
//! Ties the toolkit together into the four-step symmetrized execution
//! flow: sample symmetry transforms, build variant realizations, simulate
//! each under the shared device noise, and aggregate the measurement
//! statistics. The same prepared pipeline also powers threshold training
//! (sweep vote thresholds on circuits with known outputs) and shot-grid
//! sweeps (how aggregate quality scales with shots per variant).
//!
//! Determinism is a hard guarantee: every random choice draws from a
//! stream derived from the master seed and a fixed role — mappings,
//! device noise, per-variant shots, vote scrambles, sweep replicas — so a
//! config and seed reproduce a report byte for byte. Because noise is a
//! property of the simulated device, a single realization is shared by
//! all variants; only the mapping changes which pair errors a variant
//! feels.

mod config;
mod report;

pub use config::{
    load_config, parse_config, CircuitSource, ExperimentConfig, NoiseSource, Strategy,
    SymmetryMode,
};
pub use report::{
    emit_baseline, emit_report, BaselineReport, ExperimentReport, ReportFormat, RunMetadata,
    StrategyOutcome, SummaryMetrics, VariantReport,
};

use std::collections::BTreeMap;

use crate::aggregate::{
    average_histograms, plurality_vote, plurality_vote_strict, AggregationResult, VariantBatch,
    VoteConfig,
};
use crate::analysis::hellinger_fidelity;
use crate::circuit::{gen_bell, gen_qft_adder, gen_random_circuit, parse_circuit, Circuit};
use crate::error::{Error, Result};
use crate::seeds::Stream;
use crate::sim::{
    identity_assignment, sample_shots_stream, simulate_ideal, simulate_noisy, Histogram,
    NoiseModel, ShotList, MAX_SIM_QUBITS,
};
use crate::symmetry::{
    apply_symmetry, decomposition_mask_every_mth, sample_mappings_dissimilar_with_pool,
    sample_mappings_random, QubitMapping, SymmetryTransform,
};

/// Seed replicas used to report dispersion in shot sweeps.
pub const SWEEP_REPLICAS: usize = 10;

/// Everything derived from a config before any shots are drawn: the
/// logical circuit, its ideal distribution, the (possibly calibrated)
/// device noise, the sampled transforms, and each variant's exact noisy
/// outcome distribution.
#[derive(Debug, Clone)]
pub struct PreparedExperiment {
    pub config: ExperimentConfig,
    pub circuit: Circuit,
    pub ideal: Histogram,
    /// Ideal most-probable outcome; metrics report its probability.
    pub target: u64,
    pub noise: NoiseModel,
    /// Scale applied to the pair deltas by calibration, when requested.
    pub calibration_scale: Option<f64>,
    pub transforms: Vec<SymmetryTransform>,
    /// Exact noisy outcome distribution per variant, relabeled to the
    /// logical register.
    pub exact: Vec<Histogram>,
}

/// Materializes the circuit named by the config.
pub fn load_circuit(cfg: &ExperimentConfig) -> Result<Circuit> {
    match &cfg.circuit {
        CircuitSource::File(path) => parse_circuit(&std::fs::read_to_string(path)?),
        CircuitSource::Bell => Ok(gen_bell()),
        CircuitSource::QftAdder { bits, a, b } => gen_qft_adder(*bits, *a, *b),
        CircuitSource::Random { qubits, xx_gates } => {
            gen_random_circuit(*qubits, *xx_gates, cfg.seed)
        }
        CircuitSource::Inline(c) => Ok(c.clone()),
    }
}

/// Materializes the device noise named by the config. The config's
/// depolarizing strength always applies to generated models; for noise
/// files it applies only when nonzero, letting the file carry its own.
pub fn build_noise(cfg: &ExperimentConfig) -> Result<NoiseModel> {
    let mut noise = match &cfg.noise {
        NoiseSource::Ideal => NoiseModel::ideal(),
        NoiseSource::Uniform { delta_min, delta_max } => {
            NoiseModel::random_uniform(cfg.n_physical, *delta_min, *delta_max, cfg.seed)?
        }
        NoiseSource::File(path) => NoiseModel::parse(&std::fs::read_to_string(path)?)?,
    };
    if !matches!(cfg.noise, NoiseSource::File(_)) || cfg.depolarizing > 0.0 {
        noise.set_depolarizing(cfg.depolarizing)?;
    }
    Ok(noise)
}

/// Samples the variant transforms for `circuit` under the config's
/// symmetry mode.
pub fn build_transforms(cfg: &ExperimentConfig, circuit: &Circuit) -> Result<Vec<SymmetryTransform>> {
    let (n_logical, n_physical, m) = (circuit.n_qubits(), cfg.n_physical, cfg.variants);
    let mappings: Vec<QubitMapping> = match cfg.symmetry_mode {
        SymmetryMode::RandomMaps | SymmetryMode::MapsWithDecomposition => {
            sample_mappings_random(n_logical, n_physical, m, cfg.seed)?
        }
        SymmetryMode::DissimilarMaps => {
            sample_mappings_dissimilar_with_pool(circuit, n_physical, m, cfg.seed, cfg.pool)?
        }
    };
    Ok(mappings
        .into_iter()
        .enumerate()
        .map(|(i, mapping)| {
            let mask = match cfg.symmetry_mode {
                SymmetryMode::MapsWithDecomposition => {
                    decomposition_mask_every_mth(circuit, cfg.stride, i)
                }
                _ => Default::default(),
            };
            SymmetryTransform::new(mapping, mask)
        })
        .collect())
}

/// Simulates every variant exactly under the shared noise model and folds
/// the physical outcomes back to the logical register.
pub fn exact_variant_histograms(
    circuit: &Circuit,
    transforms: &[SymmetryTransform],
    noise: &NoiseModel,
    n_physical: usize,
) -> Result<Vec<Histogram>> {
    let physical_map = identity_assignment(n_physical);
    transforms
        .iter()
        .map(|t| {
            let variant = apply_symmetry(circuit, t)?;
            let physical = simulate_noisy(variant.physical_circuit(), &physical_map, noise)?;
            variant.relabel_histogram(&physical)
        })
        .collect()
}

/// Mean over variants of the exact probability of `target` — the
/// unsymmetrized reference the calibration band constrains.
fn unsymmetrized_target_probability(
    circuit: &Circuit,
    transforms: &[SymmetryTransform],
    noise: &NoiseModel,
    n_physical: usize,
    target: u64,
) -> Result<f64> {
    let hists = exact_variant_histograms(circuit, transforms, noise, n_physical)?;
    Ok(hists.iter().map(|h| h.probability(target)).sum::<f64>() / hists.len() as f64)
}

/// Scales the pair deltas of `base` until the unsymmetrized target
/// probability lands inside `band`, returning the scaled model and the
/// scale. Expands the scale upward until the probability drops below the
/// band's top, then bisects; the band's interior width guarantees
/// termination for the continuous probability curve.
pub fn calibrate_noise(
    circuit: &Circuit,
    base: &NoiseModel,
    transforms: &[SymmetryTransform],
    n_physical: usize,
    target: u64,
    band: (f64, f64),
) -> Result<(NoiseModel, f64)> {
    let (band_lo, band_hi) = band;
    if base.max_abs_delta() == 0.0 {
        return Err(Error::Runtime(
            "calibration needs pair errors to scale, but the noise model has none".into(),
        ));
    }
    let eval = |scale: f64| -> Result<f64> {
        unsymmetrized_target_probability(circuit, transforms, &base.scaled(scale)?, n_physical, target)
    };

    let noiseless = eval(0.0)?;
    if noiseless < band_lo {
        return Err(Error::Runtime(format!(
            "target probability is {noiseless} even without noise, below the band [{band_lo}, {band_hi}]"
        )));
    }
    if noiseless <= band_hi {
        return Ok((base.scaled(0.0)?, 0.0));
    }

    let scale_cap = 1.0 / base.max_abs_delta();
    let mut lo = 0.0;
    let mut hi = 1.0f64.min(scale_cap);
    let mut p_hi = eval(hi)?;
    while p_hi > band_hi {
        if hi >= scale_cap {
            return Err(Error::Runtime(format!(
                "target probability is still {p_hi} at the largest admissible noise scale {scale_cap}"
            )));
        }
        lo = hi;
        hi = (hi * 2.0).min(scale_cap);
        p_hi = eval(hi)?;
    }
    if p_hi >= band_lo {
        return Ok((base.scaled(hi)?, hi));
    }

    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        let p = eval(mid)?;
        if p > band_hi {
            lo = mid;
        } else if p < band_lo {
            hi = mid;
        } else {
            return Ok((base.scaled(mid)?, mid));
        }
    }
    Err(Error::Runtime(format!(
        "calibration did not land in [{band_lo}, {band_hi}] after 100 bisection steps"
    )))
}

/// Runs every step that precedes measurement: circuit, ideal
/// distribution, noise (with calibration when configured), transforms,
/// and exact per-variant distributions.
pub fn prepare_experiment(cfg: &ExperimentConfig) -> Result<PreparedExperiment> {
    cfg.validate()?;
    let circuit = load_circuit(cfg)?;
    if circuit.n_qubits() > cfg.n_physical {
        return Err(Error::Config(format!(
            "circuit uses {} qubits but only {} physical ions are configured",
            circuit.n_qubits(),
            cfg.n_physical
        )));
    }
    if cfg.n_physical > MAX_SIM_QUBITS {
        return Err(Error::Config(format!(
            "{} physical ions exceed the simulable maximum of {MAX_SIM_QUBITS}",
            cfg.n_physical
        )));
    }
    let ideal = simulate_ideal(&circuit)?;
    let target = ideal.argmax().expect("normalized histograms have an argmax");
    let base_noise = build_noise(cfg)?;
    let transforms = build_transforms(cfg, &circuit)?;
    let (noise, calibration_scale) = match cfg.calibration {
        Some(band) => {
            let (noise, scale) =
                calibrate_noise(&circuit, &base_noise, &transforms, cfg.n_physical, target, band)?;
            (noise, Some(scale))
        }
        None => (base_noise, None),
    };
    let exact = exact_variant_histograms(&circuit, &transforms, &noise, cfg.n_physical)?;
    Ok(PreparedExperiment {
        config: cfg.clone(),
        circuit,
        ideal,
        target,
        noise,
        calibration_scale,
        transforms,
        exact,
    })
}

/// The vote parameters a config implies for `m` variants.
fn vote_config(cfg: &ExperimentConfig, m: usize) -> Result<VoteConfig> {
    let vc = match cfg.threshold {
        Some(t) => VoteConfig { initial_threshold: t, scrambles: cfg.scrambles, seed: cfg.seed },
        None => {
            let mut vc = VoteConfig::default_for(m, cfg.seed)?;
            vc.scrambles = cfg.scrambles;
            vc
        }
    };
    vc.validate_for(m)?;
    Ok(vc)
}

fn hist_map(h: &Histogram) -> BTreeMap<String, f64> {
    h.iter().map(|(o, p)| (h.bitstring(o), p)).collect()
}

fn strategy_outcome(
    result: &AggregationResult,
    ideal: &Histogram,
    target: u64,
) -> Result<StrategyOutcome> {
    Ok(StrategyOutcome {
        method: result.method.to_string(),
        winner_count: result.winner_count,
        fidelity: hellinger_fidelity(&result.histogram, ideal)?,
        target_probability: result.histogram.probability(target),
        histogram: hist_map(&result.histogram),
    })
}

/// Runs the full experiment for a config: prepare, measure, aggregate,
/// and report. Deterministic in the master seed.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    run_prepared(&prepare_experiment(cfg)?)
}

/// The measurement-and-aggregation half of [`run_experiment`], reusable
/// when the prepared pipeline is shared across runs.
pub fn run_prepared(prep: &PreparedExperiment) -> Result<ExperimentReport> {
    let cfg = &prep.config;
    let m = cfg.variants;

    // Measured per-variant histograms, and the shot batch voting consumes.
    let (measured, vote_batch): (Vec<Histogram>, Option<VariantBatch>) = if cfg.infinite_shots {
        let vote_batch = if cfg.strategy.includes_vote() {
            let lists: Vec<ShotList> = prep
                .exact
                .iter()
                .enumerate()
                .map(|(i, h)| {
                    sample_shots_stream(h, cfg.synthetic_shots, cfg.seed, Stream::VoteSynthetic, i as u32)
                })
                .collect();
            Some(VariantBatch::from_shots(lists)?)
        } else {
            None
        };
        (prep.exact.clone(), vote_batch)
    } else {
        let lists: Vec<ShotList> = prep
            .exact
            .iter()
            .enumerate()
            .map(|(i, h)| sample_shots_stream(h, cfg.shots, cfg.seed, Stream::Shots, i as u32))
            .collect();
        let batch = VariantBatch::from_shots(lists)?;
        (batch.histograms().to_vec(), Some(batch))
    };

    let averaged = if cfg.strategy.includes_average() {
        let batch = VariantBatch::from_histograms(measured.clone())?;
        Some(strategy_outcome(&average_histograms(&batch)?, &prep.ideal, prep.target)?)
    } else {
        None
    };
    let (voted, vote_threshold) = if cfg.strategy.includes_vote() {
        let vc = vote_config(cfg, m)?;
        let batch = vote_batch.expect("vote strategies build a shot batch");
        let result = plurality_vote(&batch, &vc)?;
        (Some(strategy_outcome(&result, &prep.ideal, prep.target)?), Some(vc.initial_threshold))
    } else {
        (None, None)
    };

    let variants: Vec<VariantReport> = prep
        .transforms
        .iter()
        .zip(&measured)
        .enumerate()
        .map(|(index, (transform, h))| {
            Ok(VariantReport {
                index,
                mapping: transform.mapping.serialize_line(),
                masked_gates: transform.decomposition_mask.iter().copied().collect(),
                fidelity: hellinger_fidelity(h, &prep.ideal)?,
                target_probability: h.probability(prep.target),
                histogram: hist_map(h),
            })
        })
        .collect::<Result<_>>()?;
    let unsymmetrized = SummaryMetrics {
        fidelity: variants.iter().map(|v| v.fidelity).sum::<f64>() / m as f64,
        target_probability: variants.iter().map(|v| v.target_probability).sum::<f64>() / m as f64,
    };

    let mut warnings = Vec::new();
    if let (Some(a), Some(v)) = (&averaged, &voted) {
        if v.fidelity < a.fidelity {
            warnings.push(
                "plurality voting lowered the fidelity below componentwise averaging; \
                 broad output distributions are skewed by voting"
                    .to_string(),
            );
        }
    }

    Ok(ExperimentReport {
        metadata: RunMetadata {
            seed: cfg.seed,
            config_hash: cfg.config_hash(),
            variants: m,
            shots: cfg.shots,
            n_physical: cfg.n_physical,
            symmetry_mode: cfg.symmetry_mode.to_string(),
            infinite_shots: cfg.infinite_shots,
            noise_max_abs_delta: prep.noise.max_abs_delta(),
            depolarizing: prep.noise.depolarizing(),
            calibration_scale: prep.calibration_scale,
            vote_threshold,
            vote_scrambles: cfg.scrambles,
            circuit_qubits: prep.circuit.n_qubits(),
            circuit_xx_gates: prep.circuit.xx_count(),
            target_bitstring: prep.ideal.bitstring(prep.target),
        },
        ideal: hist_map(&prep.ideal),
        variants,
        unsymmetrized,
        averaged,
        voted,
        warnings,
    })
}

/// Simulates the configured circuit once, unsymmetrized, under the
/// configured noise: the reference point symmetrized runs are compared
/// against.
pub fn run_baseline(cfg: &ExperimentConfig) -> Result<BaselineReport> {
    cfg.validate()?;
    let circuit = load_circuit(cfg)?;
    if cfg.n_physical < circuit.n_qubits() {
        return Err(Error::Config(format!(
            "circuit uses {} qubits but only {} physical ions are configured",
            circuit.n_qubits(),
            cfg.n_physical
        )));
    }
    let ideal = simulate_ideal(&circuit)?;
    let target = ideal.argmax().expect("normalized histograms have an argmax");
    let noise = build_noise(cfg)?;
    let exact = simulate_noisy(&circuit, &identity_assignment(circuit.n_qubits()), &noise)?;
    let sampled_list = sample_shots_stream(&exact, cfg.shots, cfg.seed, Stream::Baseline, 0);
    let sampled = crate::sim::shots_to_histogram(&sampled_list)?;
    Ok(BaselineReport {
        config_hash: cfg.config_hash(),
        seed: cfg.seed,
        shots: cfg.shots,
        target_bitstring: ideal.bitstring(target),
        fidelity_exact: hellinger_fidelity(&exact, &ideal)?,
        fidelity_sampled: hellinger_fidelity(&sampled, &ideal)?,
        target_probability_exact: exact.probability(target),
        target_probability_sampled: sampled.probability(target),
        ideal: hist_map(&ideal),
        noisy: hist_map(&exact),
        sampled: hist_map(&sampled),
    })
}

/// A circuit with a known ideal output, used to train the vote threshold.
#[derive(Debug, Clone)]
pub struct TrainingCircuit {
    pub circuit: Circuit,
    pub ideal: Histogram,
}

impl TrainingCircuit {
    /// Pairs a circuit with its known ideal distribution.
    pub fn new(circuit: Circuit, ideal: Histogram) -> Result<Self> {
        if ideal.n_bits() != circuit.n_qubits() {
            return Err(Error::Config(format!(
                "ideal distribution over {} bits does not match the {}-qubit circuit",
                ideal.n_bits(),
                circuit.n_qubits()
            )));
        }
        Ok(TrainingCircuit { circuit, ideal })
    }

    /// Derives the ideal distribution by noiseless simulation.
    pub fn from_circuit(circuit: Circuit) -> Result<Self> {
        let ideal = simulate_ideal(&circuit)?;
        Ok(TrainingCircuit { circuit, ideal })
    }
}

/// Outcome of a threshold sweep: the recommended threshold and the mean
/// voted fidelity behind every candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdTraining {
    pub recommended: usize,
    /// `(threshold, mean fidelity)` for every candidate in `[2, m]`.
    pub scores: Vec<(usize, f64)>,
}

/// Sweeps the vote threshold over `[2, m]` on the training circuits and
/// recommends the value with the best mean voted fidelity, breaking ties
/// toward the larger threshold.
///
/// Candidates are evaluated with the threshold taken literally (no
/// reduction loop): under reduction, every candidate above the best
/// winning multiplicity would collapse to the same result and tie.
pub fn train_threshold(
    cfg: &ExperimentConfig,
    training: &[TrainingCircuit],
) -> Result<ThresholdTraining> {
    if training.is_empty() {
        return Err(Error::Config(
            "threshold training needs at least one circuit with a known ideal output".into(),
        ));
    }
    let m = cfg.variants;
    if m < 2 {
        return Err(Error::Config("threshold training needs at least 2 variants".into()));
    }
    let noise = build_noise(cfg)?;

    let mut sums = vec![0.0; m + 1];
    for tc in training {
        let transforms = build_transforms(cfg, &tc.circuit)?;
        let exact = exact_variant_histograms(&tc.circuit, &transforms, &noise, cfg.n_physical)?;
        let (s, stream) = if cfg.infinite_shots {
            (cfg.synthetic_shots, Stream::VoteSynthetic)
        } else {
            (cfg.shots, Stream::Shots)
        };
        let lists: Vec<ShotList> = exact
            .iter()
            .enumerate()
            .map(|(i, h)| sample_shots_stream(h, s, cfg.seed, stream, i as u32))
            .collect();
        let batch = VariantBatch::from_shots(lists)?;
        for t in 2..=m {
            let vc = VoteConfig { initial_threshold: t, scrambles: cfg.scrambles, seed: cfg.seed };
            let voted = plurality_vote_strict(&batch, &vc)?;
            sums[t] += hellinger_fidelity(&voted.histogram, &tc.ideal)?;
        }
    }

    let mut scores = Vec::with_capacity(m - 1);
    let mut recommended = 2;
    let mut best = f64::NEG_INFINITY;
    for t in 2..=m {
        let mean = sums[t] / training.len() as f64;
        scores.push((t, mean));
        if mean >= best {
            best = mean;
            recommended = t;
        }
    }
    Ok(ThresholdTraining { recommended, scores })
}

/// One row of a shot sweep: aggregate target probabilities at a shot
/// count, across the seed replicas.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ShotSweepRow {
    pub shots: usize,
    /// Voted target probability per replica.
    pub voted: Vec<f64>,
    /// Averaged target probability per replica.
    pub averaged: Vec<f64>,
    pub voted_mean: f64,
    /// Population standard deviation across replicas.
    pub voted_std: f64,
    pub averaged_mean: f64,
    pub averaged_std: f64,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Re-aggregates the experiment at every shot count in `grid`, reporting
/// target probabilities with dispersion over [`SWEEP_REPLICAS`] seed
/// replicas. Replica 0 shares the main run's shot streams, so the full-s
/// row reproduces [`run_experiment`]'s aggregates exactly; later replicas
/// redraw every variant's shots. Smaller counts subsample (truncate) each
/// replica's largest draw.
pub fn run_shot_sweep(cfg: &ExperimentConfig, grid: &[usize]) -> Result<Vec<ShotSweepRow>> {
    if grid.is_empty() {
        return Err(Error::Config("shot sweep grid must not be empty".into()));
    }
    if cfg.infinite_shots {
        return Err(Error::Config(
            "shot sweeps subsample sampled shots; infinite-shot mode has none".into(),
        ));
    }
    for &s in grid {
        if s == 0 || s > cfg.shots {
            return Err(Error::Runtime(format!(
                "grid entry {s} outside the available 1..={} shots per variant",
                cfg.shots
            )));
        }
    }
    let prep = prepare_experiment(cfg)?;
    let m = cfg.variants;
    let vc = vote_config(cfg, m)?;

    let mut voted: Vec<Vec<f64>> = vec![Vec::with_capacity(SWEEP_REPLICAS); grid.len()];
    let mut averaged: Vec<Vec<f64>> = vec![Vec::with_capacity(SWEEP_REPLICAS); grid.len()];
    for replica in 0..SWEEP_REPLICAS {
        let full: Vec<ShotList> = (0..m)
            .map(|v| {
                if replica == 0 {
                    sample_shots_stream(&prep.exact[v], cfg.shots, cfg.seed, Stream::Shots, v as u32)
                } else {
                    let index = (replica * m + v) as u32;
                    sample_shots_stream(&prep.exact[v], cfg.shots, cfg.seed, Stream::SweepReplica, index)
                }
            })
            .collect();
        for (row, &s) in grid.iter().enumerate() {
            let lists: Vec<ShotList> = full.iter().map(|l| l.truncated(s)).collect();
            let batch = VariantBatch::from_shots(lists)?;
            averaged[row]
                .push(average_histograms(&batch)?.histogram.probability(prep.target));
            voted[row].push(plurality_vote(&batch, &vc)?.histogram.probability(prep.target));
        }
    }

    Ok(grid
        .iter()
        .zip(voted.into_iter().zip(averaged))
        .map(|(&shots, (voted, averaged))| {
            let (voted_mean, voted_std) = mean_std(&voted);
            let (averaged_mean, averaged_std) = mean_std(&averaged);
            ShotSweepRow { shots, voted, averaged, voted_mean, voted_std, averaged_mean, averaged_std }
        })
        .collect())
}
