//! Lowering of extended gates onto the native trapped-ion set.
//!
//! The native set is `{RX, RY, RZ, XX}`. Three convenience gates are
//! accepted on input and rewritten here, each exact up to a global phase:
//!
//! * `H(q)`       -> `RZ(q, pi)`, `RY(q, pi/2)`
//! * `CNOT(c, t)` -> `RY(c, -pi/2)`, `XX(c, t, pi/2)`, `RY(c, pi/2)`,
//!   `RX(t, pi/2)`, `RZ(c, pi/2)`
//! * `CPHASE(a, b, phi)` -> `RZ(a, phi/2)`, `RZ(b, phi/2)`, `CNOT(a, b)`,
//!   `RZ(b, -phi/2)`, `CNOT(a, b)` (with the CNOTs lowered in turn)
//!
//! Each rule is pinned by a dense-unitary equality test below.

use crate::circuit::{Circuit, ExtCircuit, ExtGate, Gate};
use crate::error::Result;
use std::f64::consts::{FRAC_PI_2, PI};

/// Rewrites every extended gate into native gates, preserving the unitary
/// up to global phase.
pub fn transpile_to_native(circuit: &ExtCircuit) -> Result<Circuit> {
    let mut gates = Vec::new();
    for gate in circuit.gates() {
        lower(gate, &mut gates);
    }
    Circuit::new(circuit.n_qubits(), gates, circuit.measured())
}

fn lower(gate: &ExtGate, out: &mut Vec<Gate>) {
    match *gate {
        ExtGate::Native(g) => out.push(g),
        ExtGate::H { qubit } => {
            out.push(Gate::rz(qubit, PI));
            out.push(Gate::ry(qubit, FRAC_PI_2));
        }
        ExtGate::Cnot { control, target } => lower_cnot(control, target, out),
        ExtGate::Cphase { a, b, angle } => {
            out.push(Gate::rz(a, angle / 2.0));
            out.push(Gate::rz(b, angle / 2.0));
            lower_cnot(a, b, out);
            out.push(Gate::rz(b, -angle / 2.0));
            lower_cnot(a, b, out);
        }
    }
}

fn lower_cnot(control: usize, target: usize, out: &mut Vec<Gate>) {
    out.push(Gate::ry(control, -FRAC_PI_2));
    out.push(Gate::xx(control, target, FRAC_PI_2));
    out.push(Gate::ry(control, FRAC_PI_2));
    out.push(Gate::rx(target, FRAC_PI_2));
    out.push(Gate::rz(control, FRAC_PI_2));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{circuit_unitary, phase_aligned_distance};
    use nalgebra::DMatrix;
    use num_complex::Complex64;

    const TOL: f64 = 1e-10;

    fn ext(n_qubits: usize, gates: Vec<ExtGate>) -> ExtCircuit {
        ExtCircuit::new(n_qubits, gates, false).unwrap()
    }

    fn unitary_of(c: &ExtCircuit) -> DMatrix<Complex64> {
        circuit_unitary(&transpile_to_native(c).unwrap()).unwrap()
    }

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn hadamard_rule_matches_dense_hadamard() {
        let s = 1.0 / 2.0_f64.sqrt();
        let h = DMatrix::from_row_slice(2, 2, &[re(s), re(s), re(s), re(-s)]);
        let u = unitary_of(&ext(1, vec![ExtGate::H { qubit: 0 }]));
        assert!(phase_aligned_distance(&u, &h) < TOL);
    }

    #[test]
    fn cnot_rule_matches_dense_cnot_both_orientations() {
        // Qubit 0 is the least significant bit, so CNOT(0, 1) flips bit 1
        // when bit 0 is set: it swaps basis states 1 and 3.
        let mut cnot01 = DMatrix::<Complex64>::zeros(4, 4);
        for (col, row) in [(0usize, 0usize), (1, 3), (2, 2), (3, 1)] {
            cnot01[(row, col)] = re(1.0);
        }
        let u01 = unitary_of(&ext(2, vec![ExtGate::Cnot { control: 0, target: 1 }]));
        assert!(phase_aligned_distance(&u01, &cnot01) < TOL);

        // CNOT(1, 0) flips bit 0 when bit 1 is set: swaps states 2 and 3.
        let mut cnot10 = DMatrix::<Complex64>::zeros(4, 4);
        for (col, row) in [(0usize, 0usize), (1, 1), (2, 3), (3, 2)] {
            cnot10[(row, col)] = re(1.0);
        }
        let u10 = unitary_of(&ext(2, vec![ExtGate::Cnot { control: 1, target: 0 }]));
        assert!(phase_aligned_distance(&u10, &cnot10) < TOL);
    }

    #[test]
    fn cnot_rule_uses_exactly_one_xx() {
        let c = transpile_to_native(&ext(2, vec![ExtGate::Cnot { control: 0, target: 1 }]))
            .unwrap();
        assert_eq!(c.xx_count(), 1);
        assert_eq!(c.gates().len(), 5);
    }

    #[test]
    fn cphase_rule_matches_dense_controlled_phase() {
        for phi in [std::f64::consts::FRAC_PI_4, 1.0, -2.5, PI] {
            let mut target = DMatrix::<Complex64>::identity(4, 4);
            target[(3, 3)] = Complex64::from_polar(1.0, phi);
            let u = unitary_of(&ext(2, vec![ExtGate::Cphase { a: 0, b: 1, angle: phi }]));
            assert!(phase_aligned_distance(&u, &target) < TOL, "phi = {phi}");
        }
    }

    #[test]
    fn cphase_is_symmetric_in_its_qubits() {
        let a = unitary_of(&ext(2, vec![ExtGate::Cphase { a: 0, b: 1, angle: 0.7 }]));
        let b = unitary_of(&ext(2, vec![ExtGate::Cphase { a: 1, b: 0, angle: 0.7 }]));
        assert!(phase_aligned_distance(&a, &b) < TOL);
    }

    #[test]
    fn native_gates_pass_through_unchanged() {
        let gates = vec![
            ExtGate::Native(Gate::rx(0, 0.3)),
            ExtGate::Native(Gate::xx(0, 2, FRAC_PI_2)),
        ];
        let c = transpile_to_native(&ExtCircuit::new(3, gates, true).unwrap()).unwrap();
        assert_eq!(c.gates(), &[Gate::rx(0, 0.3), Gate::xx(0, 2, FRAC_PI_2)]);
        assert!(c.measured());
    }

    #[test]
    fn identity_input_gives_identity_output() {
        let c = transpile_to_native(&ext(2, vec![])).unwrap();
        assert!(c.gates().is_empty());
        let u = circuit_unitary(&c).unwrap();
        assert!(phase_aligned_distance(&u, &DMatrix::identity(4, 4)) < TOL);
    }

    #[test]
    fn three_qubit_mixed_program_stays_unitary() {
        let gates = vec![
            ExtGate::H { qubit: 2 },
            ExtGate::Cnot { control: 2, target: 0 },
            ExtGate::Cphase { a: 1, b: 2, angle: 0.9 },
            ExtGate::Native(Gate::ry(1, -1.1)),
        ];
        let u = unitary_of(&ExtCircuit::new(3, gates, false).unwrap());
        let gram = u.adjoint() * &u;
        assert!((gram - DMatrix::<Complex64>::identity(8, 8)).norm() < TOL);
    }
}
