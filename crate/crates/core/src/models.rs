//! Reference generators and noise bases used by tests, examples and the CLI.

use crate::generator::{Channel, LindbladModel};
use crate::linquant::{complete_basis, identity, kron, pauli, r, ComplexMatrix, ComplexVector, SpaceDecomposition};

/// `H = omega sigma_z` with emission `gamma D(|1><0|)`; index 0 is the excited level.
pub fn spontaneous_emission(omega: f64, gamma: f64) -> LindbladModel {
    LindbladModel::new(pauli::z() * r(omega), vec![Channel::new(gamma, pauli::lowering())]).expect("valid two-level model")
}

/// `H = sigma_z`, single unit-rate channel `L = sigma_z + |0><1|`.
pub fn upper_triangular_noise() -> LindbladModel {
    LindbladModel::new(pauli::z(), vec![Channel::new(1.0, pauli::z() + pauli::raising())]).expect("valid two-level model")
}

/// [`upper_triangular_noise`] with the constant correction `sigma_y / 2`
/// that makes `diag(1, 0)` invariant.
pub fn upper_triangular_noise_compensated() -> LindbladModel {
    upper_triangular_noise().with_added_hamiltonian(&(pauli::y() * r(0.5))).expect("Hermitian correction")
}

/// `sigma_a` acting on qubit `k` of `q`, all others identity.
pub fn single_qubit_operator(op: &ComplexMatrix, k: usize, q: usize) -> ComplexMatrix {
    let mut out = identity(1);
    for j in 0..q {
        out = if j == k { kron(&out, op) } else { kron(&out, &identity(2)) };
    }
    out
}

/// Orthonormal basis `{sigma_a^(k) / sqrt(2^q)}` for independent noise on each of `q` qubits.
pub fn linear_decoherence_basis(q: usize) -> Vec<ComplexMatrix> {
    let norm = r(1.0 / ((1usize << q) as f64).sqrt());
    let mut basis = Vec::with_capacity(3 * q);
    for k in 0..q {
        for op in [pauli::x(), pauli::y(), pauli::z()] {
            basis.push(single_qubit_operator(&op, k, q) * norm);
        }
    }
    basis
}

/// Normalized collective operators `S_a = sum_k sigma_a^(k)` on `q` qubits.
pub fn collective_decoherence_basis(q: usize) -> Vec<ComplexMatrix> {
    let norm = r(1.0 / ((q * (1usize << q)) as f64).sqrt());
    [pauli::x(), pauli::y(), pauli::z()]
        .iter()
        .map(|op| (0..q).map(|k| single_qubit_operator(op, k, q)).fold(ComplexMatrix::zeros(1 << q, 1 << q), |acc, x| acc + x) * norm)
        .collect()
}

/// Three qubits split as `(C^2 (x) spin-1/2) (+) spin-3/2`. The first
/// factor is the two-fold multiplicity of the total-spin-1/2 sector, which
/// collective noise leaves untouched (n = 2, f = 2, r = 4).
pub fn collective_three_qubit_decomposition() -> SpaceDecomposition {
    let ket = |bits: &[(usize, f64)]| {
        let mut v = ComplexVector::zeros(8);
        for &(index, amp) in bits {
            v[index] = r(amp);
        }
        v
    };
    // |abc> has index 4a + 2b + c, with 0 the spin-up level.
    let a_up = ket(&[(1, 1.0), (2, -1.0)]) * r(1.0 / 2f64.sqrt());
    let b_up = ket(&[(1, 1.0), (2, 1.0), (4, -2.0)]) * r(1.0 / 6f64.sqrt());
    let lower: ComplexMatrix = (0..3).map(|k| single_qubit_operator(&pauli::lowering(), k, 3)).fold(ComplexMatrix::zeros(8, 8), |acc, x| acc + x);
    let a_down = &lower * &a_up;
    let b_down = &lower * &b_up;
    let u = complete_basis(&[a_up, a_down, b_up, b_down], 8).expect("orthonormal spin-1/2 states");
    SpaceDecomposition::new(2, 2, 4, u).expect("unitary completion")
}
