//! Circuit representation: native and extended gate sets, text format,
//! generators, transpilation and dense unitaries.
//!
//! # Gate conventions
//!
//! The native gate set is the trapped-ion set `rx`, `ry`, `rz`, `xx` with
//!
//! ```text
//! RX(th) = exp(-i th X/2)        RY(th) = exp(-i th Y/2)
//! RZ(th) = exp(-i th Z/2)        XX(th) = exp(-i th (X (x) X)/2)
//! ```
//!
//! `XX(pi/2)` is the fully entangling Molmer-Sorensen gate. Angles are kept
//! in the canonical range `(-2pi, 2pi]`; reduction is modulo `4pi`, which is
//! exact for all four generators.
//!
//! # Bit order
//!
//! Qubit 0 is the least significant bit of a measured outcome. A serialized
//! bitstring therefore prints qubit 0 rightmost: outcome `0b10` on two qubits
//! means qubit 1 read `1` and qubit 0 read `0`.

mod generate;
mod text;
mod transpile;
mod unitary;

pub use generate::{gen_bell, gen_qft_adder, gen_random_circuit};
pub(crate) use text::fmt_significant;
pub use text::{parse_circuit, parse_ext_circuit, serialize_circuit};
pub use transpile::transpile_to_native;
pub use unitary::{circuit_unitary, phase_aligned_distance, MAX_UNITARY_QUBITS};

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// A native gate. Angles are canonicalized on circuit construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    Rx { qubit: usize, angle: f64 },
    Ry { qubit: usize, angle: f64 },
    Rz { qubit: usize, angle: f64 },
    Xx { a: usize, b: usize, angle: f64 },
}

impl Gate {
    pub fn rx(qubit: usize, angle: f64) -> Self {
        Gate::Rx { qubit, angle }
    }

    pub fn ry(qubit: usize, angle: f64) -> Self {
        Gate::Ry { qubit, angle }
    }

    pub fn rz(qubit: usize, angle: f64) -> Self {
        Gate::Rz { qubit, angle }
    }

    pub fn xx(a: usize, b: usize, angle: f64) -> Self {
        Gate::Xx { a, b, angle }
    }

    /// The rotation angle of the gate.
    pub fn angle(&self) -> f64 {
        match *self {
            Gate::Rx { angle, .. }
            | Gate::Ry { angle, .. }
            | Gate::Rz { angle, .. }
            | Gate::Xx { angle, .. } => angle,
        }
    }

    /// `true` for the two-qubit `xx` gate.
    pub fn is_xx(&self) -> bool {
        matches!(self, Gate::Xx { .. })
    }

    /// Gate with every target pushed through `f` and the angle kept.
    pub(crate) fn retargeted(&self, f: impl Fn(usize) -> usize) -> Gate {
        match *self {
            Gate::Rx { qubit, angle } => Gate::Rx { qubit: f(qubit), angle },
            Gate::Ry { qubit, angle } => Gate::Ry { qubit: f(qubit), angle },
            Gate::Rz { qubit, angle } => Gate::Rz { qubit: f(qubit), angle },
            Gate::Xx { a, b, angle } => Gate::Xx { a: f(a), b: f(b), angle },
        }
    }

    fn validate(&self, n_qubits: usize) -> Result<()> {
        let check = |qubit: usize| {
            if qubit >= n_qubits {
                Err(Error::QubitOutOfRange { qubit, n_qubits })
            } else {
                Ok(())
            }
        };
        if !self.angle().is_finite() {
            return Err(Error::NonFiniteAngle { angle: self.angle() });
        }
        match *self {
            Gate::Rx { qubit, .. } | Gate::Ry { qubit, .. } | Gate::Rz { qubit, .. } => {
                check(qubit)
            }
            Gate::Xx { a, b, .. } => {
                check(a)?;
                check(b)?;
                if a == b {
                    return Err(Error::DuplicateXxTargets { qubit: a });
                }
                Ok(())
            }
        }
    }

    fn canonicalized(self) -> Gate {
        let fix = canonical_angle;
        match self {
            Gate::Rx { qubit, angle } => Gate::Rx { qubit, angle: fix(angle) },
            Gate::Ry { qubit, angle } => Gate::Ry { qubit, angle: fix(angle) },
            Gate::Rz { qubit, angle } => Gate::Rz { qubit, angle: fix(angle) },
            Gate::Xx { a, b, angle } => Gate::Xx { a, b, angle: fix(angle) },
        }
    }
}

/// Reduces an angle to the canonical range `(-2pi, 2pi]`.
///
/// All native generators square to a phase, so the unitary is `4pi`-periodic
/// in the angle and the reduction is exact. Values already in range are
/// returned bit-for-bit unchanged, which keeps parse/serialize round trips
/// stable.
pub fn canonical_angle(angle: f64) -> f64 {
    const TWO_PI: f64 = 2.0 * PI;
    const FOUR_PI: f64 = 4.0 * PI;
    if angle > -TWO_PI && angle <= TWO_PI {
        return angle;
    }
    let r = angle.rem_euclid(FOUR_PI);
    if r > TWO_PI {
        r - FOUR_PI
    } else {
        r
    }
}

/// A circuit over the native gate set.
///
/// `measured` records whether the circuit ends in a full-register measurement
/// (the `measure` line of the text format). Simulation of an unmeasured
/// circuit still produces a distribution; the flag exists so that files
/// round-trip exactly and downstream tools can distinguish fragments from
/// runnable programs.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    measured: bool,
}

impl Circuit {
    /// Validates targets and angles, canonicalizes angles, and builds the
    /// circuit.
    pub fn new(n_qubits: usize, gates: Vec<Gate>, measured: bool) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::Circuit("register must have at least one qubit".into()));
        }
        for gate in &gates {
            gate.validate(n_qubits)?;
        }
        let gates = gates.into_iter().map(Gate::canonicalized).collect();
        Ok(Circuit { n_qubits, gates, measured })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn measured(&self) -> bool {
        self.measured
    }

    /// Number of `xx` gates; decomposition masks index these by ordinal.
    pub fn xx_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_xx()).count()
    }

    /// The unordered qubit pairs of the `xx` gates, in ordinal order.
    pub fn xx_pairs(&self) -> Vec<(usize, usize)> {
        self.gates
            .iter()
            .filter_map(|g| match *g {
                Gate::Xx { a, b, .. } => Some((a.min(b), a.max(b))),
                _ => None,
            })
            .collect()
    }
}

/// A gate from the extended input set: natives plus `h`, `cnot`, `cphase`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtGate {
    Native(Gate),
    H { qubit: usize },
    Cnot { control: usize, target: usize },
    Cphase { a: usize, b: usize, angle: f64 },
}

impl ExtGate {
    fn validate(&self, n_qubits: usize) -> Result<()> {
        let check = |qubit: usize| {
            if qubit >= n_qubits {
                Err(Error::QubitOutOfRange { qubit, n_qubits })
            } else {
                Ok(())
            }
        };
        match *self {
            ExtGate::Native(g) => g.validate(n_qubits),
            ExtGate::H { qubit } => check(qubit),
            ExtGate::Cnot { control, target } => {
                check(control)?;
                check(target)?;
                if control == target {
                    return Err(Error::DuplicateXxTargets { qubit: control });
                }
                Ok(())
            }
            ExtGate::Cphase { a, b, angle } => {
                if !angle.is_finite() {
                    return Err(Error::NonFiniteAngle { angle });
                }
                check(a)?;
                check(b)?;
                if a == b {
                    return Err(Error::DuplicateXxTargets { qubit: a });
                }
                Ok(())
            }
        }
    }
}

/// A circuit over the extended gate set, the input to
/// [`transpile_to_native`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExtCircuit {
    n_qubits: usize,
    gates: Vec<ExtGate>,
    measured: bool,
}

impl ExtCircuit {
    pub fn new(n_qubits: usize, gates: Vec<ExtGate>, measured: bool) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::Circuit("register must have at least one qubit".into()));
        }
        for gate in &gates {
            gate.validate(n_qubits)?;
        }
        Ok(ExtCircuit { n_qubits, gates, measured })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[ExtGate] {
        &self.gates
    }

    pub fn measured(&self) -> bool {
        self.measured
    }
}
