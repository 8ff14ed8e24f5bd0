//! Built-in circuit generators: the Bell pair, an in-register adder, and
//! seeded random benchmark circuits.

use crate::circuit::{transpile_to_native, Circuit, ExtCircuit, ExtGate, Gate};
use crate::error::{Error, Result};
use crate::seeds::{stream_rng, Stream};
use crate::sim::MAX_SIM_QUBITS;
use rand::seq::SliceRandom;
use rand::Rng;
use std::f64::consts::{FRAC_PI_2, PI};

/// The two-qubit Bell-pair circuit: one fully entangling `XX(pi/2)` and a
/// phase correction, preparing `(|00> + |11>)/sqrt(2)` up to global phase.
pub fn gen_bell() -> Circuit {
    let gates = vec![Gate::xx(0, 1, FRAC_PI_2), Gate::rz(0, FRAC_PI_2)];
    Circuit::new(2, gates, true).expect("bell construction is statically valid")
}

/// An in-register adder over `bits` qubits: prepares `|b>`, rotates into
/// the Fourier basis, applies the classically-folded addend `a` as phase
/// rotations, and rotates back. Noiseless measurement reads
/// `(a + b) mod 2^bits` with probability 1.
pub fn gen_qft_adder(bits: usize, a: u64, b: u64) -> Result<Circuit> {
    if bits == 0 {
        return Err(Error::Generator("adder register must have at least one bit".into()));
    }
    if bits > MAX_SIM_QUBITS {
        return Err(Error::TooManyQubits {
            n_qubits: bits,
            max: MAX_SIM_QUBITS,
            what: "adder register",
        });
    }
    let modulus = 1u64 << bits;
    for (name, value) in [("a", a), ("b", b)] {
        if value >= modulus {
            return Err(Error::Generator(format!(
                "operand {name} = {value} does not fit in {bits} bits"
            )));
        }
    }

    let mut gates = Vec::new();
    // Prepare |b> bit by bit; the X rotations' global phase is irrelevant.
    for k in 0..bits {
        if (b >> k) & 1 == 1 {
            gates.push(ExtGate::Native(Gate::rx(k, PI)));
        }
    }
    // Fourier rotation without the final bit-reversal swaps: afterwards
    // qubit k carries the phase exp(2*pi*i * b / 2^(k+1)), so the swaps
    // cancel against the inverse rotation below and are never emitted.
    let mut fourier = Vec::new();
    for k in (0..bits).rev() {
        fourier.push(ExtGate::H { qubit: k });
        for j in (0..k).rev() {
            fourier.push(ExtGate::Cphase { a: j, b: k, angle: PI / (1u64 << (k - j)) as f64 });
        }
    }
    gates.extend_from_slice(&fourier);
    // Adding a is diagonal in the Fourier basis: advance qubit k's phase
    // by exp(2*pi*i * a / 2^(k+1)). Reducing a mod 2^(k+1) first keeps the
    // angles small; the dropped multiples of 2*pi are global phase.
    for k in 0..bits {
        let reduced = a % (1u64 << (k + 1));
        if reduced != 0 {
            gates.push(ExtGate::Native(Gate::rz(k, PI * reduced as f64 / (1u64 << k) as f64)));
        }
    }
    // Inverse Fourier rotation: the reversed gate list with conjugated
    // phases (H is self-inverse).
    for gate in fourier.iter().rev() {
        gates.push(match *gate {
            ExtGate::Cphase { a, b, angle } => ExtGate::Cphase { a, b, angle: -angle },
            other => other,
        });
    }

    let ext = ExtCircuit::new(bits, gates, true)?;
    transpile_to_native(&ext)
}

/// A seeded random benchmark circuit: `n_xx` fully entangling `XX(pi/2)`
/// gates on distinct qubit pairs, interleaved with layers of random
/// single-qubit rotations (uniform axis and angle). Deterministic for a
/// given seed.
pub fn gen_random_circuit(n_qubits: usize, n_xx: usize, seed: u64) -> Result<Circuit> {
    if n_qubits == 0 {
        return Err(Error::Generator("register must have at least one qubit".into()));
    }
    let mut pairs: Vec<(usize, usize)> = (0..n_qubits)
        .flat_map(|a| ((a + 1)..n_qubits).map(move |b| (a, b)))
        .collect();
    if n_xx > pairs.len() {
        return Err(Error::Generator(format!(
            "{n_xx} entangling gates requested but only {} distinct pairs exist on {n_qubits} \
             qubits",
            pairs.len()
        )));
    }
    let mut rng = stream_rng(seed, Stream::Generator, 0);
    let (chosen, _) = pairs.partial_shuffle(&mut rng, n_xx);

    let mut gates = Vec::new();
    let push_rotation_layer = |gates: &mut Vec<Gate>, rng: &mut rand_chacha::ChaCha8Rng| {
        for q in 0..n_qubits {
            let angle = rng.gen_range(-PI..PI);
            gates.push(match rng.gen_range(0..3u8) {
                0 => Gate::rx(q, angle),
                1 => Gate::ry(q, angle),
                _ => Gate::rz(q, angle),
            });
        }
    };
    for &(a, b) in chosen.iter() {
        push_rotation_layer(&mut gates, &mut rng);
        gates.push(Gate::xx(a, b, FRAC_PI_2));
    }
    push_rotation_layer(&mut gates, &mut rng);
    Circuit::new(n_qubits, gates, true)
}
