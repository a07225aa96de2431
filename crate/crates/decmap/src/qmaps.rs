//! Representations of linear maps on M_d: superoperators acting on
//! row-vectorized operators, Choi matrices, and Kraus families.
//!
//! Index conventions (fixed crate-wide):
//! - superoperator entry: `S[(k*d_out + l), (i*d_in + j)]` sends `E_ij` to the
//!   matrix with entry `(k,l)`;
//! - Choi matrix: `C = Σ_ij E_ij ⊗ Φ(E_ij)`, so `C[(i*d_out + k), (j*d_out + l)]
//!   = S[(k*d_out + l), (i*d_in + j)]` — an exact index permutation.

use crate::error::{Error, Result};
use crate::linalg::{
    kron, partial_transpose, unvec, vec, C64, ComplexMatrix, Factor,
};

/// Linear map on matrices, stored as a (d_out²)x(d_in²) matrix acting on
/// row-vectorized operators.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperOperator {
    dim_in: usize,
    dim_out: usize,
    matrix: ComplexMatrix,
}

impl SuperOperator {
    pub fn new(dim_in: usize, dim_out: usize, matrix: ComplexMatrix) -> Result<Self> {
        if matrix.rows() != dim_out * dim_out || matrix.cols() != dim_in * dim_in {
            return Err(Error::DimensionMismatch(format!(
                "superoperator for {dim_in}->{dim_out} must be {}x{}, got {}x{}",
                dim_out * dim_out,
                dim_in * dim_in,
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Self { dim_in, dim_out, matrix })
    }

    pub fn identity(d: usize) -> Self {
        Self { dim_in: d, dim_out: d, matrix: ComplexMatrix::identity(d * d) }
    }

    pub fn zero(d: usize) -> Self {
        Self { dim_in: d, dim_out: d, matrix: ComplexMatrix::zeros(d * d, d * d) }
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Superoperator of `X -> A X B`.
    pub fn sandwich(a: &ComplexMatrix, b: &ComplexMatrix) -> Self {
        Self {
            dim_in: a.cols(),
            dim_out: a.rows(),
            matrix: kron(a, &b.transpose()),
        }
    }

    /// Superoperator of left multiplication `X -> M X`.
    pub fn left_mul(m: &ComplexMatrix) -> Self {
        Self::sandwich(m, &ComplexMatrix::identity(m.cols()))
    }

    /// Superoperator of right multiplication `X -> X M`.
    pub fn right_mul(m: &ComplexMatrix) -> Self {
        Self::sandwich(&ComplexMatrix::identity(m.rows()), m)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.dim_in, self.dim_out), (other.dim_in, other.dim_out));
        Self { dim_in: self.dim_in, dim_out: self.dim_out, matrix: self.matrix.add(&other.matrix) }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.dim_in, self.dim_out), (other.dim_in, other.dim_out));
        Self { dim_in: self.dim_in, dim_out: self.dim_out, matrix: self.matrix.sub(&other.matrix) }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { dim_in: self.dim_in, dim_out: self.dim_out, matrix: self.matrix.scale(s) }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }
}

/// Apply the map to a matrix: `unvec(S · vec(X))`.
pub fn apply(s: &SuperOperator, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    if x.rows() != s.dim_in || x.cols() != s.dim_in {
        return Err(Error::DimensionMismatch(format!(
            "apply: input is {}x{}, map expects {d}x{d}",
            x.rows(),
            x.cols(),
            d = s.dim_in
        )));
    }
    let v = s.matrix.matvec(&vec(x));
    unvec(&v, s.dim_out, s.dim_out)
}

/// Composition `S2 ∘ S1` as a matrix product.
pub fn compose(s2: &SuperOperator, s1: &SuperOperator) -> Result<SuperOperator> {
    if s2.dim_in != s1.dim_out {
        return Err(Error::DimensionMismatch(format!(
            "compose: inner dims {} vs {}",
            s2.dim_in, s1.dim_out
        )));
    }
    SuperOperator::new(s1.dim_in, s2.dim_out, s2.matrix.matmul(&s1.matrix))
}

/// Adjoint with respect to the Hilbert-Schmidt pairing Tr(A† Φ(B)).
///
/// With row-stacking vectorization this is the conjugate transpose of the
/// superoperator matrix.
pub fn dual(s: &SuperOperator) -> SuperOperator {
    SuperOperator {
        dim_in: s.dim_out,
        dim_out: s.dim_in,
        matrix: s.matrix.dagger(),
    }
}

/// Choi matrix of a map: `C = Σ_ij E_ij ⊗ Φ(E_ij)`, the index factor first.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    d_in: usize,
    d_out: usize,
    matrix: ComplexMatrix,
}

impl ChoiMatrix {
    pub fn new(d_in: usize, d_out: usize, matrix: ComplexMatrix) -> Result<Self> {
        let n = d_in * d_out;
        if matrix.rows() != n || matrix.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "Choi matrix for {d_in}->{d_out} must be {n}x{n}, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Self { d_in, d_out, matrix })
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Partial transpose on the second (output) tensor factor.
    pub fn partial_transpose(&self) -> ComplexMatrix {
        partial_transpose(&self.matrix, self.d_in, self.d_out, Factor::Second)
            .expect("Choi matrix dimensions are consistent by construction")
    }

    /// Trace over the second (output) factor; equals 1 iff the map in the
    /// Schrödinger picture preserves trace.
    pub fn trace_out_second(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.d_in, self.d_in);
        for i in 0..self.d_in {
            for j in 0..self.d_in {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..self.d_out {
                    acc += self.matrix[(i * self.d_out + k, j * self.d_out + k)];
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    /// Trace over the first (index) factor; equals Φ(1).
    pub fn trace_out_first(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.d_out, self.d_out);
        for k in 0..self.d_out {
            for l in 0..self.d_out {
                let mut acc = C64::new(0.0, 0.0);
                for i in 0..self.d_in {
                    acc += self.matrix[(i * self.d_out + k, i * self.d_out + l)];
                }
                out[(k, l)] = acc;
            }
        }
        out
    }
}

/// Choi matrix of a superoperator, by index reshuffle.
pub fn choi_of(s: &SuperOperator) -> ChoiMatrix {
    let (din, dout) = (s.dim_in, s.dim_out);
    let n = din * dout;
    let mut c = ComplexMatrix::zeros(n, n);
    for i in 0..din {
        for j in 0..din {
            for k in 0..dout {
                for l in 0..dout {
                    c[(i * dout + k, j * dout + l)] = s.matrix[(k * dout + l, i * din + j)];
                }
            }
        }
    }
    ChoiMatrix { d_in: din, d_out: dout, matrix: c }
}

/// Superoperator of a Choi matrix; inverse of [`choi_of`].
pub fn superop_of(c: &ChoiMatrix) -> SuperOperator {
    let (din, dout) = (c.d_in, c.d_out);
    let mut s = ComplexMatrix::zeros(dout * dout, din * din);
    for i in 0..din {
        for j in 0..din {
            for k in 0..dout {
                for l in 0..dout {
                    s[(k * dout + l, i * din + j)] = c.matrix[(i * dout + k, j * dout + l)];
                }
            }
        }
    }
    SuperOperator { dim_in: din, dim_out: dout, matrix: s }
}

/// Superoperator of entrywise transposition in the standard basis.
pub fn transpose_map(d: usize) -> SuperOperator {
    let mut m = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            m[(j * d + i, i * d + j)] = C64::new(1.0, 0.0);
        }
    }
    SuperOperator { dim_in: d, dim_out: d, matrix: m }
}

/// Superoperator of the tensor extension `id_n ⊗ Φ` acting block-wise on
/// M_n(M_d) ≅ M_{nd}.
pub fn extend(s: &SuperOperator, n: usize) -> SuperOperator {
    assert!(n >= 1);
    let (din, dout) = (s.dim_in, s.dim_out);
    let (nin, nout) = (n * din, n * dout);
    let mut m = ComplexMatrix::zeros(nout * nout, nin * nin);
    for a in 0..n {
        for b in 0..n {
            for k in 0..dout {
                for l in 0..dout {
                    let row = (a * dout + k) * nout + (b * dout + l);
                    for i in 0..din {
                        for j in 0..din {
                            let col = (a * din + i) * nin + (b * din + j);
                            m[(row, col)] = s.matrix[(k * dout + l, i * din + j)];
                        }
                    }
                }
            }
        }
    }
    SuperOperator { dim_in: nin, dim_out: nout, matrix: m }
}

/// Whether a Kraus family acts as `X -> Σ V X V†` (cp) or `X -> Σ W Xᵀ W†`
/// (cocp).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KrausSide {
    Cp,
    Cocp,
}

/// Ordered family of Kraus operators together with its action convention.
#[derive(Debug, Clone)]
pub struct KrausFamily {
    pub operators: Vec<ComplexMatrix>,
    pub side: KrausSide,
}

impl KrausFamily {
    pub fn cp(operators: Vec<ComplexMatrix>) -> Self {
        Self { operators, side: KrausSide::Cp }
    }

    pub fn cocp(operators: Vec<ComplexMatrix>) -> Self {
        Self { operators, side: KrausSide::Cocp }
    }
}

/// Superoperator of a Kraus family.
pub fn superop_from_kraus(family: &KrausFamily) -> Result<SuperOperator> {
    let first = family
        .operators
        .first()
        .ok_or_else(|| Error::PreconditionFailed("empty Kraus family".into()))?;
    let (dout, din) = (first.rows(), first.cols());
    let mut m = ComplexMatrix::zeros(dout * dout, din * din);
    for v in &family.operators {
        if v.rows() != dout || v.cols() != din {
            return Err(Error::DimensionMismatch(format!(
                "Kraus operators have mixed shapes: {}x{} vs {}x{}",
                v.rows(),
                v.cols(),
                dout,
                din
            )));
        }
        // X -> V X V† is V ⊗ conj(V) on row-vectorized X.
        m = m.add(&kron(v, &v.conj()));
    }
    let cp = SuperOperator { dim_in: din, dim_out: dout, matrix: m };
    match family.side {
        KrausSide::Cp => Ok(cp),
        KrausSide::Cocp => compose(&cp, &transpose_map(din)),
    }
}

/// Extract a CP Kraus family from a PSD Choi matrix by eigendecomposition.
///
/// Eigenvalues below `-tol` raise [`Error::NotCp`]; eigenvalues in
/// `[-tol, tol]` are dropped as numerical rank noise. Operators come out in
/// descending eigenvalue order with the first nonzero component of each
/// eigenvector rotated to the positive real axis.
pub fn kraus_from_choi(c: &ChoiMatrix, tol: f64) -> Result<KrausFamily> {
    let eig = crate::linalg::herm_eig(&c.matrix)?;
    let min_eig = eig.eigenvalues[0];
    if min_eig < -tol {
        return Err(Error::NotCp { min_eig, tol });
    }
    let n = c.matrix.rows();
    let mut ops = Vec::new();
    for k in (0..n).rev() {
        let lambda = eig.eigenvalues[k];
        if lambda <= tol {
            continue;
        }
        let mut v: Vec<C64> = (0..n).map(|i| eig.eigenvectors[(i, k)]).collect();
        // Deterministic phase: first component of magnitude > 1e-12 made real positive.
        if let Some(z) = v.iter().find(|z| z.norm() > 1e-12) {
            let phase = C64::from_polar(1.0, -z.arg());
            for entry in v.iter_mut() {
                *entry *= phase;
            }
        }
        let w = lambda.sqrt();
        // Choi eigenvector index is (i, k) with i the input index, so the Kraus
        // operator is the transposed reshape.
        let mut op = ComplexMatrix::zeros(c.d_out, c.d_in);
        for i in 0..c.d_in {
            for m in 0..c.d_out {
                op[(m, i)] = v[i * c.d_out + m] * w;
            }
        }
        ops.push(op);
    }
    Ok(KrausFamily::cp(ops))
}

/// Sampled Hermiticity-preservation check: Φ(X) stays Hermitian for Hermitian X.
pub fn is_hermiticity_preserving(s: &SuperOperator, samples: usize, seed: u64, tol: f64) -> bool {
    let mut r = crate::sample::rng(seed);
    for _ in 0..samples {
        let x = crate::sample::random_hermitian(&mut r, s.dim_in);
        let y = match apply(s, &x) {
            Ok(y) => y,
            Err(_) => return false,
        };
        if y.sub(&y.dagger()).frobenius_norm() > tol * y.frobenius_norm().max(1.0) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::herm_eig;
    use crate::testutil::*;

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn apply_identity() {
        let mut r = rng(1);
        let x = random_matrix(&mut r, 3, 3);
        let y = apply(&SuperOperator::identity(3), &x).unwrap();
        assert!(x.sub(&y).frobenius_norm() < 1e-15);
    }

    #[test]
    fn apply_transpose_unit() {
        let tau = transpose_map(2);
        let y = apply(&tau, &ComplexMatrix::unit(2, 0, 1)).unwrap();
        assert_eq!(y, ComplexMatrix::unit(2, 1, 0));
    }

    #[test]
    fn apply_kraus_conjugation() {
        let s = superop_from_kraus(&KrausFamily::cp(vec![pauli_x()])).unwrap();
        let y = apply(&s, &pauli_z()).unwrap();
        assert!(y.add(&pauli_z()).frobenius_norm() < 1e-15); // σx σz σx = -σz
    }

    #[test]
    fn dual_identity_and_involution() {
        let id = SuperOperator::identity(2);
        assert_eq!(dual(&id), id);
        let mut r = rng(2);
        let s = SuperOperator::new(2, 2, random_matrix(&mut r, 4, 4)).unwrap();
        assert_eq!(dual(&dual(&s)), s);
    }

    #[test]
    fn dual_of_sandwich() {
        // dual(X -> V X V†) = X -> V† X V under the HS pairing.
        let v = sigma_minus();
        let s = superop_from_kraus(&KrausFamily::cp(vec![v.clone()])).unwrap();
        let d = dual(&s);
        let expect = SuperOperator::sandwich(&v.dagger(), &v);
        assert!(d.matrix().sub(expect.matrix()).frobenius_norm() < 1e-15);
    }

    #[test]
    fn dual_reverses_composition() {
        let mut r = rng(3);
        let a = SuperOperator::new(2, 2, random_matrix(&mut r, 4, 4)).unwrap();
        let b = SuperOperator::new(2, 2, random_matrix(&mut r, 4, 4)).unwrap();
        let lhs = dual(&compose(&a, &b).unwrap());
        let rhs = compose(&dual(&b), &dual(&a)).unwrap();
        assert!(lhs.matrix().sub(rhs.matrix()).frobenius_norm() < 1e-13);
    }

    #[test]
    fn transpose_compose_is_identity() {
        let tau = transpose_map(3);
        let id = compose(&tau, &tau).unwrap();
        assert_eq!(id, SuperOperator::identity(3));
    }

    #[test]
    fn transpose_of_pauli_y() {
        let tau = transpose_map(2);
        let y = apply(&tau, &pauli_y()).unwrap();
        assert!(y.add(&pauli_y()).frobenius_norm() < 1e-15);
    }

    #[test]
    fn transpose_fixes_symmetric() {
        let x = ComplexMatrix::from_real(&[&[1.0, 2.0], &[2.0, 5.0]]);
        let tau = transpose_map(2);
        assert_eq!(apply(&tau, &x).unwrap(), x);
    }

    #[test]
    fn choi_of_identity() {
        let c = choi_of(&SuperOperator::identity(2));
        // C = 2|Ω><Ω| has eigenvalues (0,0,0,2).
        let eig = herm_eig(c.matrix()).unwrap();
        let expect = [0.0, 0.0, 0.0, 2.0];
        for (got, want) in eig.eigenvalues.iter().zip(expect) {
            assert!((got - want).abs() < 1e-13);
        }
    }

    #[test]
    fn choi_of_transpose_is_swap() {
        let c = choi_of(&transpose_map(2));
        let mut swap = ComplexMatrix::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                swap[(i * 2 + j, j * 2 + i)] = re(1.0);
            }
        }
        assert_eq!(*c.matrix(), swap);
    }

    #[test]
    fn choi_superop_round_trip() {
        let mut r = rng(5);
        let s = SuperOperator::new(3, 3, random_matrix(&mut r, 9, 9)).unwrap();
        let back = superop_of(&choi_of(&s));
        assert_eq!(back, s);
    }

    #[test]
    fn extend_identity() {
        let id = SuperOperator::identity(2);
        assert_eq!(extend(&id, 3), SuperOperator::identity(6));
    }

    #[test]
    fn extend_transpose_blockwise() {
        // (id_2 ⊗ τ)([[A,B],[C,D]]) = [[Aᵀ,Bᵀ],[Cᵀ,Dᵀ]].
        let mut r = rng(6);
        let blocks: Vec<ComplexMatrix> = (0..4).map(|_| random_matrix(&mut r, 2, 2)).collect();
        let mut x = ComplexMatrix::zeros(4, 4);
        for (idx, blk) in blocks.iter().enumerate() {
            let (a, b) = (idx / 2, idx % 2);
            for i in 0..2 {
                for j in 0..2 {
                    x[(a * 2 + i, b * 2 + j)] = blk[(i, j)];
                }
            }
        }
        let ext = extend(&transpose_map(2), 2);
        let y = apply(&ext, &x).unwrap();
        for (idx, blk) in blocks.iter().enumerate() {
            let (a, b) = (idx / 2, idx % 2);
            for i in 0..2 {
                for j in 0..2 {
                    assert_eq!(y[(a * 2 + i, b * 2 + j)], blk[(j, i)]);
                }
            }
        }
    }

    #[test]
    fn extend_preserves_cp() {
        let mut r = rng(7);
        for _ in 0..10 {
            let v = random_matrix(&mut r, 2, 2);
            let s = superop_from_kraus(&KrausFamily::cp(vec![v])).unwrap();
            let c = choi_of(&extend(&s, 2));
            let min = herm_eig(c.matrix()).unwrap().eigenvalues[0];
            assert!(min >= -1e-11, "extension lost CP: min eig {min}");
        }
    }

    #[test]
    fn kraus_identity_superop() {
        let s = superop_from_kraus(&KrausFamily::cp(vec![ComplexMatrix::identity(2)])).unwrap();
        assert_eq!(s, SuperOperator::identity(2));
    }

    #[test]
    fn kraus_cocp_identity_is_transpose() {
        let s = superop_from_kraus(&KrausFamily::cocp(vec![ComplexMatrix::identity(2)])).unwrap();
        assert_eq!(s, transpose_map(2));
    }

    #[test]
    fn kraus_amplitude_damping_transfers_population() {
        let s = superop_from_kraus(&KrausFamily::cp(vec![sigma_minus()])).unwrap();
        let excited = ComplexMatrix::unit(2, 1, 1);
        let y = apply(&s, &excited).unwrap();
        assert!(y.sub(&ComplexMatrix::unit(2, 0, 0)).frobenius_norm() < 1e-15);
    }

    #[test]
    fn kraus_from_choi_identity() {
        let c = choi_of(&SuperOperator::identity(2));
        let fam = kraus_from_choi(&c, 1e-9).unwrap();
        assert_eq!(fam.operators.len(), 1);
        let op = &fam.operators[0];
        // Proportional to the identity with positive scale sqrt(2)... up to phase fixed real.
        assert!(op.sub(&ComplexMatrix::identity(2).scale_re(op[(0, 0)].re)).frobenius_norm() < 1e-12);
    }

    #[test]
    fn kraus_from_choi_bit_flip_mixture() {
        // X -> (X + σx X σx)/2 has rank-2 Choi with Kraus {1/√2, σx/√2}.
        let s_id = SuperOperator::identity(2).scale_re(0.5);
        let s_x = superop_from_kraus(&KrausFamily::cp(vec![pauli_x()])).unwrap().scale_re(0.5);
        let fam = kraus_from_choi(&choi_of(&s_id.add(&s_x)), 1e-9).unwrap();
        assert_eq!(fam.operators.len(), 2);
        let rebuilt = superop_from_kraus(&fam).unwrap();
        assert!(rebuilt.matrix().sub(s_id.add(&s_x).matrix()).frobenius_norm() < 1e-10);
    }

    #[test]
    fn kraus_from_choi_rejects_swap() {
        let c = choi_of(&transpose_map(2)); // SWAP, eigenvalue -1
        assert!(matches!(kraus_from_choi(&c, 1e-9), Err(Error::NotCp { .. })));
    }

    #[test]
    fn kraus_round_trip_random_cp() {
        let mut r = rng(8);
        for _ in 0..5 {
            let ops: Vec<ComplexMatrix> = (0..2).map(|_| random_matrix(&mut r, 3, 3)).collect();
            let s = superop_from_kraus(&KrausFamily::cp(ops)).unwrap();
            let fam = kraus_from_choi(&choi_of(&s), 1e-9).unwrap();
            let rebuilt = superop_from_kraus(&fam).unwrap();
            assert!(rebuilt.matrix().sub(s.matrix()).frobenius_norm() < 1e-9);
        }
    }

    #[test]
    fn trace_out_second_detects_trace_preservation() {
        // Schrödinger amplitude damping channel: K0 = |0><0| + √(1-p)|1><1|, K1 = √p |0><1|.
        let p: f64 = 0.3;
        let mut k0 = ComplexMatrix::identity(2);
        k0[(1, 1)] = re((1.0 - p).sqrt());
        let k1 = ComplexMatrix::unit(2, 0, 1).scale_re(p.sqrt());
        let s = superop_from_kraus(&KrausFamily::cp(vec![k0, k1])).unwrap();
        let c = choi_of(&s);
        let t2 = c.trace_out_second();
        assert!(t2.sub(&ComplexMatrix::identity(2)).frobenius_norm() < 1e-11);
        // Heisenberg dual is unital: Tr1 of the dual's Choi equals Φ(1) = 1.
        let t1 = choi_of(&dual(&s)).trace_out_first();
        assert!(t1.sub(&ComplexMatrix::identity(2)).frobenius_norm() < 1e-11);
    }

    #[test]
    fn hermiticity_preserving_flag() {
        let s = superop_from_kraus(&KrausFamily::cp(vec![sigma_minus()])).unwrap();
        assert!(is_hermiticity_preserving(&s, 20, 1, 1e-10));
        // A generic matrix is not Hermiticity-preserving.
        let mut r = rng(9);
        let g = SuperOperator::new(2, 2, random_matrix(&mut r, 4, 4)).unwrap();
        assert!(!is_hermiticity_preserving(&g, 20, 1, 1e-10));
    }
}
