//! Dense complex linear algebra on small matrices.
//!
//! Everything here works on row-major `ComplexMatrix` values and sticks to the
//! row-stacking vectorization convention: `vec(X)[i*cols + j] = X[i,j]`, so the
//! superoperator of `X -> A X B` is literally `A ⊗ Bᵀ`.

use num_complex::Complex64;
use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Relative Hermiticity tolerance used throughout the crate.
pub const HERM_TOL: f64 = 1e-12;

/// Which tensor factor `partial_transpose` acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    First,
    Second,
}

/// Norm selector for [`ComplexMatrix::norm`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    Frobenius,
    Trace,
    Spectral,
}

/// Dense d x d' complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
        Self { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch { len: data.len(), rows, cols });
        }
        Ok(Self { rows, cols, data })
    }

    /// Matrix with real entries given row by row.
    pub fn from_real(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows[0].len();
        Self::from_fn(r, c, |i, j| C64::new(rows[i][j], 0.0))
    }

    /// Standard basis unit E_ij of size n x n (1-based in math notation, 0-based here).
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(i, j)] = C64::new(1.0, 0.0);
        m
    }

    pub fn diag(entries: &[f64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = C64::new(e, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius distance to the conjugate transpose, relative to the norm.
    pub fn hermitian_asymmetry(&self) -> f64 {
        let diff = self.sub(&self.dagger());
        diff.frobenius_norm() / self.frobenius_norm().max(1.0)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.hermitian_asymmetry() <= tol
    }

    /// Hermitian part (A + A†)/2.
    pub fn symmetrize(&self) -> Self {
        self.add(&self.dagger()).scale_re(0.5)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "add: shape mismatch");
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "sub: shape mismatch");
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul: inner dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "matvec: length mismatch");
        let mut out = vec![C64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..self.cols {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn norm(&self, kind: NormKind) -> f64 {
        match kind {
            NormKind::Frobenius => self.frobenius_norm(),
            NormKind::Trace => self.singular_values().iter().sum(),
            NormKind::Spectral => self.singular_values().last().copied().unwrap_or(0.0),
        }
    }

    /// Singular values in ascending order, via the Hermitian eigenproblem of A†A.
    pub fn singular_values(&self) -> Vec<f64> {
        let gram = self.dagger().matmul(self);
        let eig = herm_eig(&gram).expect("Gram matrix is Hermitian by construction");
        eig.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).collect()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::add(self, rhs)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::sub(self, rhs)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale_re(-1.0)
    }
}

/// Kronecker product A ⊗ B.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for ia in 0..a.rows() {
        for ja in 0..a.cols() {
            let av = a[(ia, ja)];
            if av.norm_sqr() == 0.0 {
                continue;
            }
            for ib in 0..b.rows() {
                for jb in 0..b.cols() {
                    out[(ia * b.rows() + ib, ja * b.cols() + jb)] = av * b[(ib, jb)];
                }
            }
        }
    }
    out
}

/// Row-stacking vectorization: vec(X)[i*cols + j] = X[i,j].
pub fn vec(x: &ComplexMatrix) -> Vec<C64> {
    x.data().to_vec()
}

pub fn unvec(v: &[C64], rows: usize, cols: usize) -> Result<ComplexMatrix> {
    ComplexMatrix::from_vec(rows, cols, v.to_vec())
}

/// Transpose the chosen tensor factor of a (dA*dB) x (dA*dB) matrix.
pub fn partial_transpose(
    c: &ComplexMatrix,
    d_a: usize,
    d_b: usize,
    factor: Factor,
) -> Result<ComplexMatrix> {
    let n = d_a * d_b;
    if c.rows() != n || c.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "partial_transpose: expected {n}x{n}, got {}x{}",
            c.rows(),
            c.cols()
        )));
    }
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..d_a {
        for k in 0..d_b {
            for j in 0..d_a {
                for l in 0..d_b {
                    let (r, s) = (i * d_b + k, j * d_b + l);
                    let (rs, ss) = match factor {
                        // C'_{(i,k),(j,l)} = C_{(j,k),(i,l)}
                        Factor::First => (j * d_b + k, i * d_b + l),
                        // C'_{(i,k),(j,l)} = C_{(i,l),(j,k)}
                        Factor::Second => (i * d_b + l, j * d_b + k),
                    };
                    out[(r, s)] = c[(rs, ss)];
                }
            }
        }
    }
    Ok(out)
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// Real eigenvalues in ascending order.
    pub eigenvalues: Vec<f64>,
    /// Unitary matrix whose columns are the corresponding eigenvectors.
    pub eigenvectors: ComplexMatrix,
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigensolver for Hermitian matrices.
///
/// Each off-diagonal element is annihilated by a phase rotation followed by a
/// real Jacobi rotation; sweeps repeat until the off-diagonal Frobenius norm
/// falls below 1e-14 relative to the matrix scale.
pub fn herm_eig(a: &ComplexMatrix) -> Result<EigenDecomposition> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "herm_eig: matrix is {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let asym = a.hermitian_asymmetry();
    if asym > HERM_TOL.max(1e-10) {
        return Err(Error::NonHermitian { asymmetry: asym, tol: HERM_TOL });
    }
    let n = a.rows();
    let mut m = a.symmetrize();
    let mut u = ComplexMatrix::identity(n);
    let scale = m.frobenius_norm().max(1.0);
    let target = 1e-15 * scale;

    let mut off = off_diag_norm(&m);
    let mut sweeps = 0;
    while off > target {
        if sweeps >= JACOBI_MAX_SWEEPS {
            return Err(Error::EigNonConvergence { sweeps, off });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let b = m[(p, q)];
                let absb = b.norm();
                if absb <= target / (n as f64) {
                    continue;
                }
                let beta = b.arg();
                let phase = C64::from_polar(1.0, -beta);
                // Real Jacobi rotation zeroing the phase-aligned off-diagonal.
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let tau = (aqq - app) / (2.0 * absb);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // G is identity except:
                //   G[p][p] = c, G[p][q] = s, G[q][p] = -s e^{-i beta}, G[q][q] = c e^{-i beta}
                let gpp = C64::new(c, 0.0);
                let gpq = C64::new(s, 0.0);
                let gqp = -phase * s;
                let gqq = phase * c;
                // Column update: B = M G.
                for k in 0..n {
                    let mp = m[(k, p)];
                    let mq = m[(k, q)];
                    m[(k, p)] = mp * gpp + mq * gqp;
                    m[(k, q)] = mp * gpq + mq * gqq;
                }
                // Row update: M' = G† B.
                for k in 0..n {
                    let mp = m[(p, k)];
                    let mq = m[(q, k)];
                    m[(p, k)] = gpp.conj() * mp + gqp.conj() * mq;
                    m[(q, k)] = gpq.conj() * mp + gqq.conj() * mq;
                }
                // Accumulate eigenvectors.
                for k in 0..n {
                    let up = u[(k, p)];
                    let uq = u[(k, q)];
                    u[(k, p)] = up * gpp + uq * gqp;
                    u[(k, q)] = up * gpq + uq * gqq;
                }
            }
        }
        off = off_diag_norm(&m);
        sweeps += 1;
    }

    let mut order: Vec<usize> = (0..n).collect();
    let vals: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    order.sort_by(|&i, &j| vals[i].partial_cmp(&vals[j]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| vals[i]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| u[(i, order[j])]);
    Ok(EigenDecomposition { eigenvalues, eigenvectors })
}

fn off_diag_norm(m: &ComplexMatrix) -> f64 {
    let n = m.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += m[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Frobenius-nearest positive semidefinite matrix: clip negative eigenvalues at zero.
pub fn psd_project(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = herm_eig(a)?;
    let n = a.rows();
    let u = &eig.eigenvectors;
    let mut out = ComplexMatrix::zeros(n, n);
    for (k, &l) in eig.eigenvalues.iter().enumerate() {
        if l <= 0.0 {
            continue;
        }
        for i in 0..n {
            let ui = u[(i, k)];
            if ui.norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..n {
                out[(i, j)] += ui * u[(j, k)].conj() * l;
            }
        }
    }
    Ok(out.symmetrize())
}

/// Minimal eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(a: &ComplexMatrix) -> Result<f64> {
    Ok(herm_eig(a)?.eigenvalues[0])
}

// Padé coefficients and norm thresholds for the scaling-and-squaring exponential
// (Higham 2005).
const THETA: [(usize, f64); 5] = [
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
    (13, 5.371920351148152e0),
];

fn pade_coeffs(m: usize) -> Vec<f64> {
    match m {
        3 => vec![120.0, 60.0, 12.0, 1.0],
        5 => vec![30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0],
        7 => vec![17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0],
        9 => vec![
            17643225600.0,
            8821612800.0,
            2075673600.0,
            302702400.0,
            30270240.0,
            2162160.0,
            110880.0,
            3960.0,
            90.0,
            1.0,
        ],
        13 => vec![
            64764752532480000.0,
            32382376266240000.0,
            7771770303897600.0,
            1187353796428800.0,
            129060195264000.0,
            10559470521600.0,
            670442572800.0,
            33522128640.0,
            1323241920.0,
            40840800.0,
            960960.0,
            16380.0,
            182.0,
            1.0,
        ],
        _ => unreachable!(),
    }
}

/// Matrix exponential by scaling-and-squaring with diagonal Padé approximants.
pub fn expm(a: &ComplexMatrix) -> ComplexMatrix {
    assert!(a.is_square(), "expm: matrix must be square");
    let norm = a.one_norm();

    for &(m, theta) in &THETA[..4] {
        if norm <= theta {
            return pade_exp(a, m);
        }
    }
    let theta13 = THETA[4].1;
    let mut s = 0u32;
    let mut scaled = a.clone();
    if norm > theta13 {
        s = ((norm / theta13).log2().ceil()).max(0.0) as u32;
        scaled = a.scale_re(1.0 / (2f64.powi(s as i32)));
    }
    let mut e = pade_exp(&scaled, 13);
    for _ in 0..s {
        e = e.matmul(&e);
    }
    e
}

fn pade_exp(a: &ComplexMatrix, m: usize) -> ComplexMatrix {
    let n = a.rows();
    let b = pade_coeffs(m);
    let id = ComplexMatrix::identity(n);
    let a2 = a.matmul(a);
    let (u, v) = if m == 13 {
        let a4 = a2.matmul(&a2);
        let a6 = a4.matmul(&a2);
        let w1 = a6
            .scale_re(b[13])
            .add(&a4.scale_re(b[11]))
            .add(&a2.scale_re(b[9]));
        let w2 = a6
            .scale_re(b[7])
            .add(&a4.scale_re(b[5]))
            .add(&a2.scale_re(b[3]))
            .add(&id.scale_re(b[1]));
        let u = a.matmul(&a6.matmul(&w1).add(&w2));
        let z1 = a6
            .scale_re(b[12])
            .add(&a4.scale_re(b[10]))
            .add(&a2.scale_re(b[8]));
        let z2 = a6
            .scale_re(b[6])
            .add(&a4.scale_re(b[4]))
            .add(&a2.scale_re(b[2]))
            .add(&id.scale_re(b[0]));
        let v = a6.matmul(&z1).add(&z2);
        (u, v)
    } else {
        // U = A * sum b[2k+1] A^{2k}, V = sum b[2k] A^{2k}
        let mut pow = id.clone();
        let mut usum = ComplexMatrix::zeros(n, n);
        let mut vsum = ComplexMatrix::zeros(n, n);
        let mut k = 0;
        loop {
            vsum = vsum.add(&pow.scale_re(b[2 * k]));
            if 2 * k + 1 <= m {
                usum = usum.add(&pow.scale_re(b[2 * k + 1]));
            }
            if 2 * (k + 1) > m {
                break;
            }
            pow = pow.matmul(&a2);
            k += 1;
        }
        (a.matmul(&usum), vsum)
    };
    let num = v.add(&u);
    let den = v.sub(&u);
    solve(&den, &num).expect("Padé denominator is nonsingular for scaled input")
}

/// Solve A X = B by LU decomposition with partial pivoting.
pub fn solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() || a.rows() != b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "solve: A is {}x{}, B is {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let n = a.rows();
    let mut lu = a.clone();
    let mut x = b.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        // Pivot.
        let (mut pk, mut pmax) = (k, lu[(k, k)].norm());
        for i in (k + 1)..n {
            let v = lu[(i, k)].norm();
            if v > pmax {
                pk = i;
                pmax = v;
            }
        }
        if pmax == 0.0 {
            return Err(Error::PreconditionFailed("solve: singular matrix".into()));
        }
        if pk != k {
            for j in 0..n {
                let t = lu[(k, j)];
                lu[(k, j)] = lu[(pk, j)];
                lu[(pk, j)] = t;
            }
            for j in 0..x.cols() {
                let t = x[(k, j)];
                x[(k, j)] = x[(pk, j)];
                x[(pk, j)] = t;
            }
            perm.swap(k, pk);
        }
        let piv = lu[(k, k)];
        for i in (k + 1)..n {
            let f = lu[(i, k)] / piv;
            lu[(i, k)] = f;
            for j in (k + 1)..n {
                let lkj = lu[(k, j)];
                lu[(i, j)] -= f * lkj;
            }
            for j in 0..x.cols() {
                let xkj = x[(k, j)];
                x[(i, j)] -= f * xkj;
            }
        }
    }
    // Back substitution.
    for j in 0..x.cols() {
        for i in (0..n).rev() {
            let mut acc = x[(i, j)];
            for k in (i + 1)..n {
                acc -= lu[(i, k)] * x[(k, j)];
            }
            x[(i, j)] = acc / lu[(i, i)];
        }
    }
    Ok(x)
}

/// Inverse via LU solve against the identity.
pub fn inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    solve(a, &ComplexMatrix::identity(a.rows()))
}

/// Spectral (2-norm) condition number via singular values.
pub fn condition_number(a: &ComplexMatrix) -> f64 {
    let sv = a.singular_values();
    let smin = sv.first().copied().unwrap_or(0.0);
    let smax = sv.last().copied().unwrap_or(0.0);
    if smin <= 0.0 {
        f64::INFINITY
    } else {
        smax / smin
    }
}
