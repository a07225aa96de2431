//! Seeded random sampling of matrices used by the statistical checks.

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::ComplexMatrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(r: &mut impl Rng) -> f64 {
    // Box-Muller.
    let u1: f64 = r.gen_range(f64::EPSILON..1.0);
    let u2: f64 = r.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn random_matrix(r: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        C64::new(gaussian(r) / 2f64.sqrt(), gaussian(r) / 2f64.sqrt())
    })
}

pub fn random_hermitian(r: &mut impl Rng, n: usize) -> ComplexMatrix {
    random_matrix(r, n, n).symmetrize()
}

pub fn random_psd(r: &mut impl Rng, n: usize) -> ComplexMatrix {
    let g = random_matrix(r, n, n);
    g.matmul(&g.dagger()).scale_re(1.0 / n as f64)
}

/// Rank-one PSD projector onto a Haar-ish random unit vector.
pub fn random_rank_one(r: &mut impl Rng, n: usize) -> ComplexMatrix {
    let v = random_matrix(r, n, 1);
    let norm = v.frobenius_norm();
    let v = v.scale_re(1.0 / norm);
    v.matmul(&v.dagger())
}

/// Unitary from modified Gram-Schmidt on a Gaussian matrix.
pub fn random_unitary(r: &mut impl Rng, n: usize) -> ComplexMatrix {
    let g = random_matrix(r, n, n);
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| (0..n).map(|i| g[(i, j)]).collect()).collect();
    for j in 0..n {
        for k in 0..j {
            let proj: C64 = (0..n).map(|i| cols[k][i].conj() * cols[j][i]).sum();
            for i in 0..n {
                let c = cols[k][i];
                cols[j][i] -= proj * c;
            }
        }
        let norm: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for i in 0..n {
            cols[j][i] /= norm;
        }
    }
    ComplexMatrix::from_fn(n, n, |i, j| cols[j][i])
}
