//! Dense statevector simulation with a trapped-ion noise model.
//!
//! Simulation is exact (no trajectory sampling): a circuit maps to its final
//! state, the state to its Born distribution, and measurement sampling is a
//! separate, seeded step. Noise enters in two places:
//!
//! * each `xx` gate under-rotates multiplicatively, `th_phys = th_req *
//!   (1 - delta)`, where `delta` is fixed per unordered physical ion pair
//!   for the lifetime of a run, and
//! * the output distribution is mixed with the uniform distribution,
//!   `h' = (1 - eps) h + eps u`, a readout-level depolarizing channel.
//!
//! Single-qubit gates are noiseless; on hardware they are an order of
//! magnitude more accurate than the entangling gates abstracted here, and
//! the model keeps all coherent error in the `xx` angles.

mod histogram;
mod noise;

pub use histogram::{
    format_bitstring, parse_bitstring, sample_shots, sample_shots_stream, shots_to_histogram,
    Histogram, ShotList,
};
pub use noise::NoiseModel;

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Largest register the dense simulator accepts.
pub const MAX_SIM_QUBITS: usize = 16;

/// A dense state over `n_qubits` qubits; amplitude index bit `q` is qubit
/// `q`'s basis value.
#[derive(Debug, Clone)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// The all-zeros computational basis state.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::Circuit("register must have at least one qubit".into()));
        }
        if n_qubits > MAX_SIM_QUBITS {
            return Err(Error::TooManyQubits {
                n_qubits,
                max: MAX_SIM_QUBITS,
                what: "dense simulation",
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n_qubits, amps })
    }

    /// Runs a circuit on the zero state.
    pub fn from_circuit(c: &Circuit) -> Result<Self> {
        let mut sv = StateVector::zero(c.n_qubits())?;
        for gate in c.gates() {
            sv.apply(gate);
        }
        Ok(sv)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Applies a gate in place. Targets must be in range (checked by
    /// `Circuit` construction; debug-asserted here).
    pub fn apply(&mut self, gate: &Gate) {
        apply_gate(&mut self.amps, gate);
    }

    /// Born-rule outcome probabilities, indexed by outcome.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Squared overlap with another state; global-phase invariant.
    pub fn fidelity_with(&self, other: &StateVector) -> f64 {
        let ip: Complex64 = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum();
        ip.norm_sqr()
    }
}

/// Applies a native gate to a raw amplitude slice. Shared by the simulator
/// and by dense unitary construction, which runs it column by column.
pub(crate) fn apply_gate(amps: &mut [Complex64], gate: &Gate) {
    match *gate {
        Gate::Rx { qubit, angle } => {
            let (c, s) = half_angle(angle);
            let ms = Complex64::new(0.0, -s);
            apply_single(amps, qubit, [[c.into(), ms], [ms, c.into()]]);
        }
        Gate::Ry { qubit, angle } => {
            let (c, s) = half_angle(angle);
            apply_single(amps, qubit, [
                [c.into(), (-s).into()],
                [s.into(), c.into()],
            ]);
        }
        Gate::Rz { qubit, angle } => {
            let (c, s) = half_angle(angle);
            let e0 = Complex64::new(c, -s);
            let e1 = Complex64::new(c, s);
            let bit = 1usize << qubit;
            for (i, a) in amps.iter_mut().enumerate() {
                *a *= if i & bit == 0 { e0 } else { e1 };
            }
        }
        Gate::Xx { a, b, angle } => {
            let (c, s) = half_angle(angle);
            let ms = Complex64::new(0.0, -s);
            let mask = (1usize << a) | (1usize << b);
            for i in 0..amps.len() {
                let j = i ^ mask;
                if i < j {
                    let (x, y) = (amps[i], amps[j]);
                    amps[i] = c * x + ms * y;
                    amps[j] = c * y + ms * x;
                }
            }
        }
    }
}

fn half_angle(angle: f64) -> (f64, f64) {
    ((angle / 2.0).cos(), (angle / 2.0).sin())
}

fn apply_single(amps: &mut [Complex64], qubit: usize, m: [[Complex64; 2]; 2]) {
    let bit = 1usize << qubit;
    debug_assert!(bit < amps.len());
    for i in 0..amps.len() {
        if i & bit == 0 {
            let j = i | bit;
            let (x, y) = (amps[i], amps[j]);
            amps[i] = m[0][0] * x + m[0][1] * y;
            amps[j] = m[1][0] * x + m[1][1] * y;
        }
    }
}

/// Identity assignment `0..n`, the physical map of an unsymmetrized run.
pub fn identity_assignment(n: usize) -> Vec<usize> {
    (0..n).collect()
}

/// Simulates a circuit without noise and returns its outcome distribution.
pub fn simulate_ideal(c: &Circuit) -> Result<Histogram> {
    let sv = StateVector::from_circuit(c)?;
    Ok(Histogram::from_probabilities(c.n_qubits(), &sv.probabilities()))
}

/// Simulates a circuit under a noise model.
///
/// `physical_map` sends each logical qubit of `c` to the physical ion it
/// runs on; it must be injective. Each `xx` gate's angle is scaled by
/// `1 - delta` for its mapped pair; the final distribution is mixed with
/// the uniform distribution at the model's depolarizing strength.
///
/// The simulation itself runs in the logical register: the mapping only
/// selects which pair errors apply, so results are reported in the
/// circuit's own bit order.
pub fn simulate_noisy(c: &Circuit, physical_map: &[usize], noise: &NoiseModel) -> Result<Histogram> {
    if physical_map.len() != c.n_qubits() {
        return Err(Error::Mapping(format!(
            "map covers {} qubits but the circuit has {}",
            physical_map.len(),
            c.n_qubits()
        )));
    }
    let mut seen = std::collections::BTreeSet::new();
    for &p in physical_map {
        if !seen.insert(p) {
            return Err(Error::Mapping(format!("physical qubit {p} assigned twice")));
        }
    }

    let mut sv = StateVector::zero(c.n_qubits())?;
    for gate in c.gates() {
        match *gate {
            Gate::Xx { a, b, angle } => {
                let delta = noise.pair_delta(physical_map[a], physical_map[b]);
                sv.apply(&Gate::xx(a, b, angle * (1.0 - delta)));
            }
            ref single => sv.apply(single),
        }
    }
    let h = Histogram::from_probabilities(c.n_qubits(), &sv.probabilities());
    if noise.depolarizing() > 0.0 {
        h.mixed_with_uniform(noise.depolarizing())
    } else {
        Ok(h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{gen_bell, parse_circuit};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn empty_circuit_gives_all_zeros() {
        let c = Circuit::new(3, vec![], true).unwrap();
        let h = simulate_ideal(&c).unwrap();
        assert_eq!(h.support_len(), 1);
        assert_relative_eq!(h.probability(0), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn bell_distribution() {
        let h = simulate_ideal(&gen_bell()).unwrap();
        assert_eq!(h.support_len(), 2);
        assert_relative_eq!(h.probability(0b00), 0.5, epsilon = 1e-12);
        assert_relative_eq!(h.probability(0b11), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn rx_pi_flips_a_qubit() {
        let c = parse_circuit("qubits 2\nrx 1 3.14159265358979\n").unwrap();
        let h = simulate_ideal(&c).unwrap();
        assert_relative_eq!(h.probability(0b10), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn norm_is_preserved_over_long_circuits() {
        let c = crate::circuit::gen_random_circuit(4, 6, 11).unwrap();
        let mut sv = StateVector::zero(4).unwrap();
        for _ in 0..40 {
            for g in c.gates() {
                sv.apply(g);
            }
        }
        let norm: f64 = sv.probabilities().iter().sum();
        assert_relative_eq!(norm, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn zero_noise_matches_ideal() {
        let c = crate::circuit::gen_random_circuit(3, 3, 5).unwrap();
        let ideal = simulate_ideal(&c).unwrap();
        let noisy = simulate_noisy(&c, &identity_assignment(3), &NoiseModel::ideal()).unwrap();
        for outcome in 0..8u64 {
            assert_relative_eq!(
                ideal.probability(outcome),
                noisy.probability(outcome),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn full_underrotation_freezes_bell_pair() {
        // delta = 1 zeroes the xx angle, so the state never leaves |00>.
        let mut nm = NoiseModel::ideal();
        nm.set_pair_delta(0, 1, 1.0).unwrap();
        let h = simulate_noisy(&gen_bell(), &identity_assignment(2), &nm).unwrap();
        assert_relative_eq!(h.probability(0b00), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn full_depolarizing_gives_uniform() {
        let mut nm = NoiseModel::ideal();
        nm.set_depolarizing(1.0).unwrap();
        let h = simulate_noisy(&gen_bell(), &identity_assignment(2), &nm).unwrap();
        for outcome in 0..4u64 {
            assert_relative_eq!(h.probability(outcome), 0.25, epsilon = 1e-12);
        }
    }

    #[test]
    fn noise_is_local_to_mapped_pairs() {
        // Entries for pairs the mapped circuit never touches are irrelevant.
        let mut nm = NoiseModel::ideal();
        nm.set_pair_delta(0, 1, 0.2).unwrap();
        let mut nm_extra = nm.clone();
        nm_extra.set_pair_delta(2, 3, 0.7).unwrap();
        nm_extra.set_pair_delta(1, 3, 0.4).unwrap();
        let a = simulate_noisy(&gen_bell(), &identity_assignment(2), &nm).unwrap();
        let b = simulate_noisy(&gen_bell(), &identity_assignment(2), &nm_extra).unwrap();
        for outcome in 0..4u64 {
            assert_relative_eq!(a.probability(outcome), b.probability(outcome), epsilon = 1e-15);
        }
    }

    #[test]
    fn mapping_selects_the_pair_error() {
        let mut nm = NoiseModel::ideal();
        nm.set_pair_delta(4, 6, 0.3).unwrap();
        let mapped = simulate_noisy(&gen_bell(), &[6, 4], &nm).unwrap();
        let mut direct = NoiseModel::ideal();
        direct.set_pair_delta(0, 1, 0.3).unwrap();
        let expect = simulate_noisy(&gen_bell(), &identity_assignment(2), &direct).unwrap();
        for outcome in 0..4u64 {
            assert_relative_eq!(
                mapped.probability(outcome),
                expect.probability(outcome),
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn rejects_non_injective_map() {
        let err = simulate_noisy(&gen_bell(), &[1, 1], &NoiseModel::ideal()).unwrap_err();
        assert!(matches!(err, Error::Mapping(_)));
    }

    #[test]
    fn rejects_oversized_register() {
        let c = Circuit::new(MAX_SIM_QUBITS + 1, vec![], false).unwrap();
        assert!(matches!(simulate_ideal(&c), Err(Error::TooManyQubits { .. })));
    }

    #[test]
    fn xx_pi_over_2_entangles_to_expected_amplitudes() {
        // XX(pi/2)|00> = (|00> - i|11>)/sqrt(2)
        let c = Circuit::new(2, vec![Gate::xx(0, 1, PI / 2.0)], false).unwrap();
        let sv = StateVector::from_circuit(&c).unwrap();
        let amps = sv.amplitudes();
        let r = 1.0 / f64::sqrt(2.0);
        assert_relative_eq!(amps[0].re, r, epsilon = 1e-12);
        assert_relative_eq!(amps[0].im, 0.0, epsilon = 1e-12);
        assert_relative_eq!(amps[3].re, 0.0, epsilon = 1e-12);
        assert_relative_eq!(amps[3].im, -r, epsilon = 1e-12);
    }
}
