//! Shared helpers for unit tests.

pub use crate::sample::{random_hermitian, random_matrix, random_psd, random_rank_one, random_unitary, rng};

use crate::linalg::{C64, ComplexMatrix};

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real(&[&[0.0, 1.0], &[1.0, 0.0]])
}

pub fn pauli_y() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2, 2);
    m[(0, 1)] = C64::new(0.0, -1.0);
    m[(1, 0)] = C64::new(0.0, 1.0);
    m
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real(&[&[1.0, 0.0], &[0.0, -1.0]])
}

/// Lowering operator |0><1|.
pub fn sigma_minus() -> ComplexMatrix {
    ComplexMatrix::unit(2, 0, 1)
}
