//! Dense unitaries for small circuit oracles.

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::sim::apply_gate;
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Cap on register width for dense unitary construction; `2^10` columns of
/// `2^10` amplitudes is the largest matrix the oracle paths need.
pub const MAX_UNITARY_QUBITS: usize = 10;

/// The full `2^n x 2^n` unitary a circuit implements, with qubit 0 as the
/// least significant bit of row and column indices.
pub fn circuit_unitary(circuit: &Circuit) -> Result<DMatrix<Complex64>> {
    let n = circuit.n_qubits();
    if n > MAX_UNITARY_QUBITS {
        return Err(Error::TooManyQubits {
            n_qubits: n,
            max: MAX_UNITARY_QUBITS,
            what: "dense unitary construction",
        });
    }
    let dim = 1usize << n;
    let mut mat = DMatrix::<Complex64>::zeros(dim, dim);
    let mut column = vec![Complex64::new(0.0, 0.0); dim];
    for k in 0..dim {
        column.iter_mut().for_each(|a| *a = Complex64::new(0.0, 0.0));
        column[k] = Complex64::new(1.0, 0.0);
        for gate in circuit.gates() {
            apply_gate(&mut column, gate);
        }
        for (r, &a) in column.iter().enumerate() {
            mat[(r, k)] = a;
        }
    }
    Ok(mat)
}

/// Frobenius distance between two unitaries after aligning the global
/// phase: the phase of `tr(V^dagger U)` is removed from `V` before
/// subtracting, so physically identical circuits score zero.
pub fn phase_aligned_distance(u: &DMatrix<Complex64>, v: &DMatrix<Complex64>) -> f64 {
    assert_eq!(u.shape(), v.shape(), "unitaries must have the same shape");
    let trace: Complex64 = (0..u.nrows())
        .map(|i| (0..u.nrows()).map(|k| v[(k, i)].conj() * u[(k, i)]).sum::<Complex64>())
        .sum();
    let phase = if trace.norm() > 1e-300 {
        trace / trace.norm()
    } else {
        // Orthogonal in the Hilbert-Schmidt sense; any alignment leaves
        // them far apart, so skip the rotation.
        Complex64::new(1.0, 0.0)
    };
    (u - v.map(|x| x * phase)).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Gate;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn z_mat() -> DMatrix<Complex64> {
        DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(-1.0, 0.0),
            ],
        )
    }

    #[test]
    fn identity_circuit_is_identity_matrix() {
        let c = Circuit::new(2, vec![], true).unwrap();
        let u = circuit_unitary(&c).unwrap();
        assert!(phase_aligned_distance(&u, &DMatrix::identity(4, 4)) < 1e-12);
    }

    #[test]
    fn rz_pi_matches_pauli_z_up_to_phase() {
        // RZ(pi) = diag(e^{-i pi/2}, e^{i pi/2}) = -i Z.
        let c = Circuit::new(1, vec![Gate::rz(0, PI)], true).unwrap();
        let u = circuit_unitary(&c).unwrap();
        assert!(phase_aligned_distance(&u, &z_mat()) < 1e-12);
        // Without alignment the raw Frobenius distance is macroscopic.
        assert!((&u - z_mat()).norm() > 1.0);
    }

    #[test]
    fn xx_half_pi_matrix_entries() {
        // XX(pi/2) = (I - i X(x)X)/sqrt(2): diagonal 1/sqrt(2),
        // anti-diagonal -i/sqrt(2).
        let c = Circuit::new(2, vec![Gate::xx(0, 1, FRAC_PI_2)], true).unwrap();
        let u = circuit_unitary(&c).unwrap();
        let s = 1.0 / 2.0_f64.sqrt();
        for r in 0..4 {
            for k in 0..4 {
                let expected = if r == k {
                    Complex64::new(s, 0.0)
                } else if r == 3 - k {
                    Complex64::new(0.0, -s)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                assert!(
                    (u[(r, k)] - expected).norm() < 1e-12,
                    "entry ({r},{k}) = {}",
                    u[(r, k)]
                );
            }
        }
    }

    #[test]
    fn generated_unitaries_are_unitary() {
        let c = crate::circuit::gen_random_circuit(3, 3, 42).unwrap();
        let u = circuit_unitary(&c).unwrap();
        let gram = u.adjoint() * &u;
        assert!((gram - DMatrix::<Complex64>::identity(8, 8)).norm() < 1e-10);
    }

    #[test]
    fn dense_construction_refuses_wide_registers() {
        let c = Circuit::new(MAX_UNITARY_QUBITS + 1, vec![], true).unwrap();
        assert!(matches!(circuit_unitary(&c), Err(Error::TooManyQubits { .. })));
    }
}
