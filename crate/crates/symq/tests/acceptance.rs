//! Acceptance suite: the toolkit's headline behaviors, one test per
//! criterion. Each test prints a single `criterion N: PASS|FAIL` line
//! with the measured numbers before asserting, so a full run doubles as
//! a scoreboard (`cargo test --test acceptance -- --nocapture`).
//!
//! Criterion 6 is a known honest failure: under the static per-pair
//! under-rotation model, plurality voting cannot reproduce the
//! order-of-magnitude target-probability boost seen on hardware at this
//! scale. The test runs the frozen configuration, verifies every
//! sub-claim that does hold, and fails with the measured ratio rather
//! than weakening the check. See `criterion_06_adder_voting_boost` for
//! the full argument.

use std::collections::BTreeSet;
use std::f64::consts::FRAC_PI_2;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use symq::aggregate::{average_histograms, VariantBatch};
use symq::analysis::{
    deviation, hellinger_fidelity, mean_deviation, pca_project, DeviationVector,
};
use symq::circuit::{
    circuit_unitary, gen_qft_adder, gen_random_circuit, phase_aligned_distance, Circuit,
    Gate,
};
use symq::harness::{parse_config, run_experiment, CircuitSource, ExperimentReport};
use symq::sim::{
    identity_assignment, simulate_ideal, simulate_noisy, Histogram, NoiseModel,
};
use symq::symmetry::{
    apply_symmetry, decomposition_mask_every_mth, sample_mappings_random, QubitMapping,
    SymmetryTransform,
};
use symq::voting::{
    brute_force_g, check_leak_amplification, check_ratio_damping,
    check_transfer_amplification, small_g, OutcomeDistribution, VotingModel,
};

/// Prints the per-criterion scoreboard line, then asserts.
fn verdict(n: usize, ok: bool, detail: &str) {
    println!("criterion {n}: {} — {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {n} failed: {detail}");
}

fn max_abs_diff(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

/// L-infinity distance between two histograms over the union support.
fn hist_max_diff(p: &Histogram, q: &Histogram) -> f64 {
    let mut d = 0.0f64;
    for (o, v) in p.iter() {
        d = d.max((v - q.probability(o)).abs());
    }
    for (o, v) in q.iter() {
        d = d.max((v - p.probability(o)).abs());
    }
    d
}

/// Total-variation distance between two histograms.
fn total_variation(p: &Histogram, q: &Histogram) -> f64 {
    let mut outcomes: BTreeSet<u64> = p.iter().map(|(o, _)| o).collect();
    outcomes.extend(q.iter().map(|(o, _)| o));
    0.5 * outcomes
        .iter()
        .map(|&o| (p.probability(o) - q.probability(o)).abs())
        .sum::<f64>()
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Noisy relabeled output of one symmetrized variant.
fn variant_output(
    circuit: &Circuit,
    transform: &SymmetryTransform,
    n_physical: usize,
    noise: &NoiseModel,
) -> Histogram {
    let variant = apply_symmetry(circuit, transform).unwrap();
    let physical = simulate_noisy(
        variant.physical_circuit(),
        &identity_assignment(n_physical),
        noise,
    )
    .unwrap();
    variant.relabel_histogram(&physical).unwrap()
}

// ---------------------------------------------------------------------
// Criterion 1: voting-theory oracle equivalence
// ---------------------------------------------------------------------

#[test]
fn criterion_01_voting_oracle_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0f64;
    let mut cases = 0usize;
    for r in 1..=4usize {
        for m in 1..=8usize {
            for t in 1..=m {
                for _ in 0..50 {
                    let weights: Vec<f64> =
                        (0..r).map(|_| rng.gen_range(0.05..1.0)).collect();
                    let h = OutcomeDistribution::normalized(weights).unwrap();
                    let model = VotingModel::new(h, m, t).unwrap();
                    let fast = small_g(&model).unwrap();
                    let brute = brute_force_g(&model).unwrap();
                    worst = worst
                        .max(max_abs_diff(fast.probabilities(), brute.probabilities()));
                    cases += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let ok = worst < 1e-10 && elapsed.as_secs() < 120;
    verdict(
        1,
        ok,
        &format!(
            "dynamic-programming g matched brute force on {cases} models \
             (max |Δ| = {worst:.2e}, {elapsed:.1?})"
        ),
    );
}

// ---------------------------------------------------------------------
// Criterion 2: ratio damping and its corollaries
// ---------------------------------------------------------------------

#[test]
fn criterion_02_ratio_damping_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);

    // 200 random instances: voting must damp every strict probability
    // ratio, with zero violations.
    let mut violations = 0usize;
    for _ in 0..200 {
        let r = rng.gen_range(2..=5usize);
        let m = rng.gen_range(2..=10usize);
        let t = rng.gen_range(2..=m.max(2));
        let weights: Vec<f64> = (0..r).map(|_| rng.gen_range(0.05..1.0)).collect();
        let h = OutcomeDistribution::normalized(weights).unwrap();
        let report = check_ratio_damping(&h, m, t).unwrap();
        violations += report.violations().len();
    }

    // Unsupported outcomes stay exactly unsupported.
    let mut zero_exact = true;
    for h in [vec![0.3, 0.7, 0.0], vec![0.5, 0.5, 0.0, 0.0]] {
        let dist = OutcomeDistribution::new(h).unwrap();
        let model = VotingModel::new(dist.clone(), 7, 3).unwrap();
        let g = small_g(&model).unwrap();
        for (i, &hi) in dist.probabilities().iter().enumerate() {
            if hi == 0.0 && g.probabilities()[i] != 0.0 {
                zero_exact = false;
            }
        }
    }

    // Uniform distributions over l outcomes are fixed points.
    let mut uniform_fixed = 0.0f64;
    for l in 1..=4usize {
        let h = OutcomeDistribution::new(vec![1.0 / l as f64; l]).unwrap();
        let model = VotingModel::new(h.clone(), 7, 3).unwrap();
        let g = small_g(&model).unwrap();
        uniform_fixed =
            uniform_fixed.max(max_abs_diff(g.probabilities(), h.probabilities()));
    }

    // Imbalance directions on a 20-point grid, leak and transfer forms.
    let mut imbalance_ok = true;
    for l in [3usize, 4] {
        let leak_bound = 1.0 / (2 * l) as f64;
        for k in 0..20 {
            let d = leak_bound * (k + 1) as f64 / 21.0;
            let check = check_leak_amplification(l, d, 7, 3).unwrap();
            imbalance_ok &= check.holds();
        }
        let transfer_bound = 1.0 / l as f64;
        for k in 0..20usize {
            let d = transfer_bound * k as f64 / 20.0;
            let check = check_transfer_amplification(l, d, 7, 3).unwrap();
            if k == 0 {
                // Uniform fixed point: both ratios exactly one.
                imbalance_ok &= (check.voted_ratio - 1.0).abs() < 1e-12
                    && (check.ideal_ratio - 1.0).abs() < 1e-12;
            } else {
                imbalance_ok &= check.holds();
            }
        }
    }

    let ok = violations == 0 && zero_exact && uniform_fixed < 1e-12 && imbalance_ok;
    verdict(
        2,
        ok,
        &format!(
            "0 of expected 0 ratio-damping violations in 200 instances \
             ({violations} seen); zero-mass outcomes exact: {zero_exact}; \
             uniform fixed points within {uniform_fixed:.2e}; \
             imbalance directions on 20-point grids: {imbalance_ok}"
        ),
    );
}

// ---------------------------------------------------------------------
// Criterion 3: relabeling invariance of noiseless variants
// ---------------------------------------------------------------------

#[test]
fn criterion_03_relabeling_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut worst = 0.0f64;
    for i in 0..100u64 {
        let n = rng.gen_range(2..=5usize);
        let n_xx = rng.gen_range(1..=(n * (n - 1) / 2).min(8));
        let n_physical = rng.gen_range(n..=(n + 3).min(8));
        let circuit = gen_random_circuit(n, n_xx, 9000 + i).unwrap();
        let ideal = simulate_ideal(&circuit).unwrap();
        let mapping =
            sample_mappings_random(n, n_physical, 1, 5000 + i).unwrap().remove(0);
        let mask = if i % 2 == 0 {
            decomposition_mask_every_mth(&circuit, 2, i as usize)
        } else {
            BTreeSet::new()
        };
        let transform = SymmetryTransform::new(mapping, mask);
        let variant = apply_symmetry(&circuit, &transform).unwrap();
        let physical = simulate_ideal(variant.physical_circuit()).unwrap();
        let logical = variant.relabel_histogram(&physical).unwrap();
        worst = worst.max(hist_max_diff(&logical, &ideal));
    }
    let ok = worst < 1e-10;
    verdict(
        3,
        ok,
        &format!(
            "100 random symmetrized noiseless variants reproduced the base \
             distribution (max |Δ| = {worst:.2e})"
        ),
    );
}

// ---------------------------------------------------------------------
// Criterion 4: sign-flip decomposition reverses the error direction
// ---------------------------------------------------------------------

#[test]
fn criterion_04_error_direction_flip() {
    let delta = 0.1;
    let noise = NoiseModel::parse("pair 0 1 0.1").unwrap();
    let identity = QubitMapping::new(2, vec![0, 1]).unwrap();
    let direct = SymmetryTransform::new(identity.clone(), BTreeSet::new());
    let masked = SymmetryTransform::new(identity, BTreeSet::from([0]));

    // Dense-unitary verification of the effective angles: scaling the
    // entangling angles of each variant's physical circuit by (1 − δ)
    // reproduces, up to global phase, a single XX at 0.9·π/2 for the
    // direct variant and 1.1·π/2 for the masked one.
    let bare = Circuit::new(2, vec![Gate::xx(0, 1, FRAC_PI_2)], true).unwrap();
    let noisy_physical = |transform: &SymmetryTransform| {
        let variant = apply_symmetry(&bare, transform).unwrap();
        let gates = variant
            .physical_circuit()
            .gates()
            .iter()
            .map(|g| match *g {
                Gate::Xx { a, b, angle } => Gate::xx(a, b, angle * (1.0 - delta)),
                other => other,
            })
            .collect();
        circuit_unitary(&Circuit::new(2, gates, true).unwrap()).unwrap()
    };
    let mut angle_err = 0.0f64;
    for (transform, factor) in [(&direct, 1.0 - delta), (&masked, 1.0 + delta)] {
        let observed = noisy_physical(transform);
        let reference = circuit_unitary(
            &Circuit::new(2, vec![Gate::xx(0, 1, factor * FRAC_PI_2)], true).unwrap(),
        )
        .unwrap();
        angle_err = angle_err.max(phase_aligned_distance(&observed, &reference));
    }

    // Averaging the two variants must nearly cancel the coherent error.
    let ideal = simulate_ideal(&bare).unwrap();
    let h_direct = variant_output(&bare, &direct, 2, &noise);
    let h_masked = variant_output(&bare, &masked, 2, &noise);
    let averaged = average_histograms(
        &VariantBatch::from_histograms(vec![h_direct.clone(), h_masked.clone()])
            .unwrap(),
    )
    .unwrap();
    let tv_direct = total_variation(&h_direct, &ideal);
    let tv_masked = total_variation(&h_masked, &ideal);
    let tv_avg = total_variation(&averaged.histogram, &ideal);

    let ok = angle_err < 1e-12
        && tv_avg < 0.3 * tv_direct
        && tv_avg < 0.3 * tv_masked;
    verdict(
        4,
        ok,
        &format!(
            "masked variant ran at 1.1·π/2 and direct at 0.9·π/2 \
             (unitary check |Δ| = {angle_err:.2e}); averaged TV {tv_avg:.4} vs \
             individual TVs {tv_direct:.4}/{tv_masked:.4}"
        ),
    );
}

// ---------------------------------------------------------------------
// Criterion 5: decompositions cancel what mappings alone cannot
// ---------------------------------------------------------------------

#[test]
fn criterion_05_decomposition_cancels_coherent_bias() {
    let start = Instant::now();
    let mut individual = 0.0;
    let mut maps_only = 0.0;
    let mut maps_decomp = 0.0;
    for seed in 0..10u64 {
        let circuit = gen_random_circuit(4, 6, seed).unwrap();
        let ideal = simulate_ideal(&circuit).unwrap();
        let noise = NoiseModel::random_uniform(8, 0.02, 0.10, seed).unwrap();
        let mappings = sample_mappings_random(4, 8, 8, seed).unwrap();

        let deviations = |masked: bool| -> Vec<DeviationVector> {
            mappings
                .iter()
                .enumerate()
                .map(|(i, mapping)| {
                    let mask = if masked {
                        decomposition_mask_every_mth(&circuit, 2, i)
                    } else {
                        BTreeSet::new()
                    };
                    let transform = SymmetryTransform::new(mapping.clone(), mask);
                    let logical = variant_output(&circuit, &transform, 8, &noise);
                    deviation(&logical, &ideal).unwrap()
                })
                .collect()
        };

        let plain = deviations(false);
        individual +=
            plain.iter().map(DeviationVector::norm).sum::<f64>() / plain.len() as f64;
        maps_only += mean_deviation(&plain).unwrap().norm();
        maps_decomp += mean_deviation(&deviations(true)).unwrap().norm();
    }
    let elapsed = start.elapsed();
    let ok = maps_only >= 0.5 * individual
        && maps_decomp <= 0.5 * maps_only
        && elapsed.as_secs() < 60;
    verdict(
        5,
        ok,
        &format!(
            "10-seed deviation norms: individual {:.4}, maps-only aggregate {:.4} \
             (≥ 0.5× individual), maps+decomposition {:.4} (≥ 2× below), {elapsed:.1?}",
            individual / 10.0,
            maps_only / 10.0,
            maps_decomp / 10.0
        ),
    );
}

// ---------------------------------------------------------------------
// Criterion 6: calibrated adder demonstration (known honest failure)
// ---------------------------------------------------------------------

/// Frozen demonstration config: 5-bit adder on 8 ions with a heavily
/// miscalibrated pair landscape, calibrated into the 1–5% band.
fn adder_demo_config(seed: u64) -> String {
    let noise_path =
        concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/adder_demo.noise");
    format!(
        "[circuit]\n\
         source = qft-adder\n\
         bits = 5\n\
         a = 21\n\
         b = 11\n\
         \n\
         [symmetry]\n\
         n_physical = 8\n\
         variants = 25\n\
         mode = random-maps\n\
         \n\
         [noise]\n\
         source = file\n\
         path = {noise_path}\n\
         calibrate_low = 0.01\n\
         calibrate_high = 0.05\n\
         \n\
         [aggregation]\n\
         strategy = both\n\
         \n\
         [run]\n\
         seed = {seed}\n\
         shots = 100\n\
         \n\
         [output]\n\
         dir = out\n"
    )
}

fn run_adder_demo(seed: u64) -> ExperimentReport {
    let cfg = parse_config(&adder_demo_config(seed)).unwrap();
    run_experiment(&cfg).unwrap()
}

#[test]
fn criterion_06_adder_voting_boost() {
    let start = Instant::now();
    let report = run_adder_demo(1);
    let elapsed = start.elapsed();

    let unsym = report.unsymmetrized.target_probability;
    let averaged = report.averaged.as_ref().unwrap().target_probability;
    let voted = report.voted.as_ref().unwrap().target_probability;
    let avg_ratio = averaged / unsym;
    let vote_ratio = voted / unsym;

    // The sub-claims that do hold: calibration lands the unsymmetrized
    // target probability in the 1–5% band, componentwise averaging moves
    // it by far less than 1.5×, and the whole run takes seconds.
    assert!(
        (0.01..=0.05).contains(&unsym),
        "calibration missed the band: unsymmetrized = {unsym}"
    );
    assert!(
        avg_ratio < 1.5,
        "averaging moved the target probability by {avg_ratio}×"
    );
    assert!(elapsed.as_secs() < 300, "run took {elapsed:?}");

    // The headline voting claim. This fails, and fails for a structural
    // reason rather than a tuning one: with 100 shots split over 25
    // variants whose mean target probability is capped at 5% by the band
    // (and held there by the averaging bound), the expected target count
    // per vote group is at most 1.25 ballots. Meanwhile the adder's
    // coherent failure modes are arithmetic — truncated-carry outcomes
    // shared across mappings — so wrong ballots collide on a handful of
    // bins at 2–3 expected ballots each and win the plurality in most
    // groups no matter how the pair landscape is shaped. A depolarizing
    // landscape decorrelates the wrong ballots but spreads them over
    // only 31 wrong bins, which caps the achievable boost near 7× before
    // vote groups stop producing winners at all. Every landscape family
    // tried (uniform, bimodal, valley, clean-island, near-flip, with and
    // without decompositions, thresholds 2 through 14, 5 to 16 ions)
    // tops out well below the required boost while inside the band.
    let ok = vote_ratio >= 10.0;
    verdict(
        6,
        ok,
        &format!(
            "unsymmetrized {unsym:.4} in [0.01, 0.05]; averaging ratio \
             {avg_ratio:.2}× < 1.5×; runtime {elapsed:.1?} < 5 min; but plurality \
             voting reached {voted:.4} = {vote_ratio:.2}× of unsymmetrized, \
             short of the required 10× — structurally unattainable under the \
             static per-pair under-rotation model (see comment above)"
        ),
    );
}

// ---------------------------------------------------------------------
// Criterion 7: fidelity orderings across output shapes
// ---------------------------------------------------------------------

/// Runs a small symmetrized experiment on the given circuit and returns
/// (unsymmetrized, averaged, voted) Hellinger fidelities plus whether
/// the voting-skew warning fired.
fn ordering_run(circuit: &Circuit, seed: u64, depolarizing: f64) -> (f64, f64, f64, bool) {
    let cfg_text = format!(
        "[circuit]\n\
         source = bell\n\
         \n\
         [symmetry]\n\
         n_physical = 5\n\
         variants = 8\n\
         \n\
         [noise]\n\
         source = uniform\n\
         delta_min = -0.2\n\
         delta_max = 0.2\n\
         depolarizing = {depolarizing}\n\
         \n\
         [aggregation]\n\
         strategy = both\n\
         threshold = 2\n\
         \n\
         [run]\n\
         seed = {seed}\n\
         shots = 400\n\
         \n\
         [output]\n\
         dir = out\n"
    );
    let mut cfg = parse_config(&cfg_text).unwrap();
    cfg.circuit = CircuitSource::Inline(circuit.clone());
    let report = run_experiment(&cfg).unwrap();
    let skew_flagged = !report.warnings.is_empty();
    (
        report.unsymmetrized.fidelity,
        report.averaged.as_ref().unwrap().fidelity,
        report.voted.as_ref().unwrap().fidelity,
        skew_flagged,
    )
}

#[test]
fn criterion_07_fidelity_orderings() {
    // Single-output circuit: a small adder.
    let adder = gen_qft_adder(3, 2, 3).unwrap();
    let mut single = (vec![], vec![], vec![]);
    for seed in 0..10u64 {
        let (u, a, v, _) = ordering_run(&adder, seed, 0.0);
        single.0.push(u);
        single.1.push(a);
        single.2.push(v);
    }
    let (su, sa, sv) = (mean(&single.0), mean(&single.1), mean(&single.2));
    let single_ok = sv > sa && (sa - su).abs() < 0.02;

    // Uniform-4 circuit: XX(π/2) then RX(π/2) spreads mass evenly over
    // four of eight outcomes; a depolarizing floor leaks mass onto the
    // other four, which voting filters but averaging keeps.
    let uniform4 = Circuit::new(
        3,
        vec![Gate::xx(0, 1, FRAC_PI_2), Gate::rx(0, FRAC_PI_2)],
        true,
    )
    .unwrap();
    let mut unif = (vec![], vec![], vec![]);
    for seed in 0..10u64 {
        let (u, a, v, _) = ordering_run(&uniform4, seed, 0.3);
        unif.0.push(u);
        unif.1.push(a);
        unif.2.push(v);
    }
    let (uu, ua, uv) = (mean(&unif.0), mean(&unif.1), mean(&unif.2));
    let uniform_ok = uv >= ua - 1e-12 && ua >= uu - 1e-12;

    // Broad-output circuit: random continuous-angle ansatz. Averaging
    // must not hurt, and the report must flag exactly the runs where
    // voting skewed the result below averaging.
    let mut broad = (vec![], vec![], vec![]);
    let mut flags_consistent = true;
    for seed in 0..10u64 {
        let circuit = gen_random_circuit(4, 6, 7000 + seed).unwrap();
        let (u, a, v, flagged) = ordering_run(&circuit, seed, 0.0);
        broad.0.push(u);
        broad.1.push(a);
        broad.2.push(v);
        flags_consistent &= flagged == (v < a);
    }
    let (bu, ba, bv) = (mean(&broad.0), mean(&broad.1), mean(&broad.2));
    let broad_ok = ba >= bu - 1e-12 && flags_consistent;

    let ok = single_ok && uniform_ok && broad_ok;
    verdict(
        7,
        ok,
        &format!(
            "single-output means (unsym {su:.3}, avg {sa:.3}, voted {sv:.3}): \
             voted > avg ≈ unsym: {single_ok}; uniform-4 means (unsym {uu:.3}, \
             avg {ua:.3}, voted {uv:.3}): voted ≥ avg ≥ unsym: {uniform_ok}; \
             broad means (unsym {bu:.3}, avg {ba:.3}, voted {bv:.3}): \
             avg ≥ unsym with consistent skew flags: {broad_ok}"
        ),
    );
}

// ---------------------------------------------------------------------
// Criterion 8: depolarizing noise is filtered by voting
// ---------------------------------------------------------------------

#[test]
fn criterion_08_depolarizing_filter() {
    let mut wins = 0usize;
    let mut ratios = vec![];
    for seed in 1..=10u64 {
        let cfg_text = format!(
            "[circuit]\n\
             source = qft-adder\n\
             bits = 5\n\
             a = 21\n\
             b = 11\n\
             \n\
             [symmetry]\n\
             n_physical = 8\n\
             variants = 9\n\
             \n\
             [noise]\n\
             source = ideal\n\
             depolarizing = 0.5\n\
             \n\
             [aggregation]\n\
             strategy = both\n\
             \n\
             [run]\n\
             seed = {seed}\n\
             shots = 100\n\
             \n\
             [output]\n\
             dir = out\n"
        );
        let cfg = parse_config(&cfg_text).unwrap();
        let report = run_experiment(&cfg).unwrap();
        let averaged = report.averaged.as_ref().unwrap().target_probability;
        let voted = report.voted.as_ref().unwrap().target_probability;
        if voted > averaged {
            wins += 1;
        }
        ratios.push(voted / averaged);
    }
    let ok = wins >= 9;
    verdict(
        8,
        ok,
        &format!(
            "voted target probability beat averaged in {wins}/10 seeds at ε = 0.5 \
             (mean boost {:.2}×)",
            mean(&ratios)
        ),
    );
}

// ---------------------------------------------------------------------
// Criterion 9: metric unit suite
// ---------------------------------------------------------------------

#[test]
fn criterion_09_metric_unit_suite() {
    let p = Histogram::from_entries(2, [(0u64, 0.5), (3u64, 0.5)]).unwrap();
    let q =
        Histogram::from_entries(2, [(0u64, 0.4), (1u64, 0.1), (2u64, 0.1), (3u64, 0.4)])
            .unwrap();
    let disjoint = Histogram::from_entries(2, [(1u64, 0.5), (2u64, 0.5)]).unwrap();

    let self_one = hellinger_fidelity(&p, &p).unwrap() == 1.0;
    let disjoint_zero = hellinger_fidelity(&p, &disjoint).unwrap() == 0.0;
    let symmetric = hellinger_fidelity(&p, &q).unwrap() == hellinger_fidelity(&q, &p).unwrap();
    let worked = (hellinger_fidelity(&p, &q).unwrap() - 0.8).abs() < 1e-12;

    // Axis-aligned PCA: all variance along one coordinate axis.
    let vectors = vec![
        DeviationVector::from_entries(vec![1.0, -1.0, 0.0, 0.0]).unwrap(),
        DeviationVector::from_entries(vec![-1.0, 1.0, 0.0, 0.0]).unwrap(),
    ];
    let proj = pca_project(&vectors).unwrap();
    let sqrt2 = 2.0f64.sqrt();
    let pca_ok = (proj.projections[0].0 - sqrt2).abs() < 1e-12
        && (proj.projections[1].0 + sqrt2).abs() < 1e-12
        && proj.projections.iter().all(|&(_, c2)| c2.abs() < 1e-12)
        && (proj.explained.0 - 1.0).abs() < 1e-12
        && proj.components.0[0] > 0.0;

    let ok = self_one && disjoint_zero && symmetric && worked && pca_ok;
    verdict(
        9,
        ok,
        &format!(
            "identity {self_one}, disjoint {disjoint_zero}, symmetry {symmetric}, \
             worked 0.8 value {worked}, axis-aligned PCA {pca_ok}"
        ),
    );
}

// ---------------------------------------------------------------------
// Criterion 10: byte-identical reports
// ---------------------------------------------------------------------

#[test]
fn criterion_10_byte_identical_reports() {
    let first = run_adder_demo(1).to_json();
    let second = run_adder_demo(1).to_json();
    let ok = first == second;
    verdict(
        10,
        ok,
        &format!(
            "two runs of the adder demonstration config produced {} JSON \
             reports ({} bytes)",
            if ok { "byte-identical" } else { "DIFFERING" },
            first.len()
        ),
    );
}

