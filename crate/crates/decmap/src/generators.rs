//! Builders for generators in standard form and their dissipation checks.
//!
//! The central object is the Heisenberg-picture generator
//! `L(A) = i[H,A] + Σ Vₘ†AVₘ + Σ Wₖ†AᵀWₖ − ½{Σ Vₘ†Vₘ + Wₖ†Wₖ, A}`,
//! which is unital by construction and splits as `L = L₁ + L₂` with `L₁` a
//! completely dissipative (GKSL-type) part and `L₂` completely copositive.

use crate::cones::{ConeVerdict, DykstraConfig};
use crate::error::{Error, Result};
use crate::linalg::{min_eigenvalue, C64, ComplexMatrix};
use crate::qmaps::{
    apply, compose, dual, extend, is_hermiticity_preserving, superop_from_kraus, transpose_map,
    ChoiMatrix, KrausFamily, SuperOperator,
};
use crate::sample::{random_hermitian, random_matrix, random_rank_one, random_unitary, rng};
use rand::Rng;

/// Data of the unital standard form: Hamiltonian plus CP and coCP Kraus lists.
#[derive(Debug, Clone)]
pub struct DecomposableGeneratorSpec {
    pub h: ComplexMatrix,
    pub v_list: Vec<ComplexMatrix>,
    pub w_list: Vec<ComplexMatrix>,
}

impl DecomposableGeneratorSpec {
    pub fn new(
        h: ComplexMatrix,
        v_list: Vec<ComplexMatrix>,
        w_list: Vec<ComplexMatrix>,
    ) -> Result<Self> {
        let spec = Self { h, v_list, w_list };
        spec.validate()?;
        Ok(spec)
    }

    pub fn hamiltonian_only(h: ComplexMatrix) -> Result<Self> {
        Self::new(h, Vec::new(), Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.h.rows()
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.h.rows();
        if self.h.cols() != d {
            return Err(Error::DimensionMismatch("Hamiltonian must be square".into()));
        }
        let asym = self.h.hermitian_asymmetry();
        if asym > 1e-12 {
            return Err(Error::NonHermitian { asymmetry: asym, tol: 1e-12 });
        }
        for op in self.v_list.iter().chain(&self.w_list) {
            if op.rows() != d || op.cols() != d {
                return Err(Error::DimensionMismatch(format!(
                    "Kraus operator is {}x{}, expected {d}x{d}",
                    op.rows(),
                    op.cols()
                )));
            }
        }
        Ok(())
    }

    /// Random spec with `n_v` CP and `n_w` coCP operators, scaled so that the
    /// generator norm stays O(1) in the dimension.
    pub fn random<R: Rng>(r: &mut R, d: usize, n_v: usize, n_w: usize) -> Self {
        let scale = 1.0 / d as f64;
        Self {
            h: random_hermitian(r, d),
            v_list: (0..n_v).map(|_| random_matrix(r, d, d).scale_re(scale)).collect(),
            w_list: (0..n_w).map(|_| random_matrix(r, d, d).scale_re(scale)).collect(),
        }
    }
}

/// Data of the nonunital form `L(a) = φ(a) + τψ(a) + Ka + aK†`.
#[derive(Debug, Clone)]
pub struct NonunitalGeneratorSpec {
    /// Kraus operators of the CP part `a ↦ Σ F a F†`.
    pub phi_kraus: Vec<ComplexMatrix>,
    /// Kraus operators of the coCP part `a ↦ Σ G aᵀ G†`.
    pub psi_kraus: Vec<ComplexMatrix>,
    /// Arbitrary square matrix; not assumed Hermitian.
    pub k: ComplexMatrix,
}

impl NonunitalGeneratorSpec {
    pub fn dim(&self) -> usize {
        self.k.rows()
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.k.rows();
        if self.k.cols() != d {
            return Err(Error::DimensionMismatch("K must be square".into()));
        }
        for op in self.phi_kraus.iter().chain(&self.psi_kraus) {
            if op.rows() != d || op.cols() != d {
                return Err(Error::DimensionMismatch(format!(
                    "Kraus operator is {}x{}, expected {d}x{d}",
                    op.rows(),
                    op.cols()
                )));
            }
        }
        Ok(())
    }
}

fn commutator_superop(h: &ComplexMatrix) -> SuperOperator {
    // i[H, ·]
    SuperOperator::left_mul(h)
        .sub(&SuperOperator::right_mul(h))
        .scale(C64::new(0.0, 1.0))
}

fn anticommutator_superop(g: &ComplexMatrix) -> SuperOperator {
    SuperOperator::left_mul(g).add(&SuperOperator::right_mul(g))
}

/// Heisenberg CP part `A ↦ Σ Vₘ†AVₘ` of the spec.
fn heisenberg_cp(ops: &[ComplexMatrix], d: usize) -> SuperOperator {
    let mut s = SuperOperator::zero(d);
    for v in ops {
        s = s.add(&SuperOperator::sandwich(&v.dagger(), v));
    }
    s
}

/// Heisenberg coCP part `A ↦ Σ Wₖ†AᵀWₖ` of the spec.
fn heisenberg_cocp(ops: &[ComplexMatrix], d: usize) -> SuperOperator {
    let mut s = SuperOperator::zero(d);
    for w in ops {
        s = s.add(&SuperOperator::sandwich(&w.dagger(), w));
    }
    compose(&s, &transpose_map(d)).expect("square dims")
}

fn gram_sum(ops: &[ComplexMatrix], d: usize) -> ComplexMatrix {
    let mut g = ComplexMatrix::zeros(d, d);
    for op in ops {
        g = g.add(&op.dagger().matmul(op));
    }
    g
}

/// Heisenberg-picture generator of the full standard form; unital (`L(1)=0`)
/// and hermiticity-preserving by construction.
pub fn build_standard_heisenberg(spec: &DecomposableGeneratorSpec) -> Result<SuperOperator> {
    spec.validate()?;
    Ok(dissipative_part(spec)?.add(&cocp_part(spec)?))
}

/// The completely dissipative half `L₁ = i[H,·] + Σ Vₘ†·Vₘ − ½{G, ·}` where
/// `G = Σ Vₘ†Vₘ + Σ Wₖ†Wₖ` carries the normalization of both halves.
pub fn dissipative_part(spec: &DecomposableGeneratorSpec) -> Result<SuperOperator> {
    spec.validate()?;
    let d = spec.dim();
    let g = gram_sum(&spec.v_list, d).add(&gram_sum(&spec.w_list, d));
    Ok(commutator_superop(&spec.h)
        .add(&heisenberg_cp(&spec.v_list, d))
        .sub(&anticommutator_superop(&g).scale_re(0.5)))
}

/// The completely copositive half `L₂(A) = Σ Wₖ†AᵀWₖ`.
pub fn cocp_part(spec: &DecomposableGeneratorSpec) -> Result<SuperOperator> {
    spec.validate()?;
    Ok(heisenberg_cocp(&spec.w_list, spec.dim()))
}

/// Schrödinger-picture generator: the Hilbert-Schmidt dual of the Heisenberg
/// one; annihilates trace.
pub fn build_standard_schrodinger(spec: &DecomposableGeneratorSpec) -> Result<SuperOperator> {
    Ok(dual(&build_standard_heisenberg(spec)?))
}

/// Nonunital Heisenberg generator `L(a) = φ(a) + τψ(a) + Ka + aK†`.
pub fn build_nonunital(spec: &NonunitalGeneratorSpec) -> Result<SuperOperator> {
    spec.validate()?;
    let mut s = SuperOperator::left_mul(&spec.k).add(&SuperOperator::right_mul(&spec.k.dagger()));
    if !spec.phi_kraus.is_empty() {
        s = s.add(&superop_from_kraus(&KrausFamily::cp(spec.phi_kraus.clone()))?);
    }
    if !spec.psi_kraus.is_empty() {
        s = s.add(&superop_from_kraus(&KrausFamily::cocp(spec.psi_kraus.clone()))?);
    }
    Ok(s)
}

/// Dissipation function `D_T(x) = T(x†x) − T(x†)x − x†T(x)`.
pub fn dissipation_function(t: &SuperOperator, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let xd = x.dagger();
    let a = apply(t, &xd.matmul(x))?;
    let b = apply(t, &xd)?.matmul(x);
    let c = xd.matmul(&apply(t, x)?);
    Ok(a.sub(&b).sub(&c))
}

/// Sampled dissipation verdict per tensor extension level.
#[derive(Debug, Clone)]
pub struct DissipationReport {
    pub max_level: usize,
    pub samples: usize,
    pub tol: f64,
    /// Worst (most negative) eigenvalue of `D(X)` per level, index 0 = level 1.
    pub per_level: Vec<f64>,
    pub worst_margin: f64,
    pub worst_level: usize,
    /// Sampled necessary condition only; a pass certifies nothing beyond the
    /// tested levels and inputs.
    pub pass: bool,
}

fn sample_input<R: Rng>(r: &mut R, d: usize, k: usize) -> ComplexMatrix {
    match k % 4 {
        0 => random_matrix(r, d, d),
        1 => random_hermitian(r, d),
        2 => random_unitary(r, d),
        _ => random_rank_one(r, d),
    }
}

fn dissipation_check_impl(
    t: &SuperOperator,
    max_level: usize,
    samples: usize,
    tol: f64,
    seed: u64,
    nonunital: bool,
) -> Result<DissipationReport> {
    if max_level < 1 {
        return Err(Error::PreconditionFailed("max_level must be at least 1".into()));
    }
    let d = t.dim_in();
    let mut r = rng(seed);
    let mut per_level = Vec::with_capacity(max_level);
    let mut worst = f64::INFINITY;
    let mut worst_level = 1;
    for n in 1..=max_level {
        let tn = extend(t, n);
        let tn_unit = apply(&tn, &ComplexMatrix::identity(n * d))?;
        let mut level_min = f64::INFINITY;
        for k in 0..samples {
            let x = sample_input(&mut r, n * d, k);
            let mut dx = dissipation_function(&tn, &x)?;
            if nonunital {
                dx = dx.add(&x.dagger().matmul(&tn_unit).matmul(&x));
            }
            level_min = level_min.min(min_eigenvalue(&dx.symmetrize())?);
        }
        if level_min < worst {
            worst = level_min;
            worst_level = n;
        }
        per_level.push(level_min);
    }
    Ok(DissipationReport {
        max_level,
        samples,
        tol,
        per_level,
        worst_margin: worst,
        worst_level,
        pass: worst >= -tol,
    })
}

/// Sampled complete-dissipation check: `D_{Tₙ}(X) ⪰ 0` for random `X` at
/// levels `n = 1..max_level`. Necessary condition only.
pub fn dissipation_check(
    t: &SuperOperator,
    max_level: usize,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<DissipationReport> {
    dissipation_check_impl(t, max_level, samples, tol, seed, false)
}

/// Nonunital variant: tests `D_{Tₙ}(X) + X†Tₙ(1)X ⪰ 0`.
pub fn nonunital_dissipation_check(
    t: &SuperOperator,
    max_level: usize,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<DissipationReport> {
    dissipation_check_impl(t, max_level, samples, tol, seed, true)
}

/// Closed-form PSD expression for the dissipation of the `L₁` half at level
/// `n`: `Σₘ [X, 1ₙ⊗Vₘ]†[X, 1ₙ⊗Vₘ] + Σₖ ((1ₙ⊗Wₖ)X)†((1ₙ⊗Wₖ)X)`.
///
/// Equals `dissipation_function(extend(dissipative_part(spec), n), x)` as an
/// algebraic identity, and is manifestly positive semidefinite.
pub fn dissipation_sum_of_squares(
    spec: &DecomposableGeneratorSpec,
    x: &ComplexMatrix,
    n: usize,
) -> Result<ComplexMatrix> {
    spec.validate()?;
    let d = spec.dim();
    if x.rows() != n * d || x.cols() != n * d {
        return Err(Error::DimensionMismatch(format!(
            "X is {}x{}, expected {m}x{m}",
            x.rows(),
            x.cols(),
            m = n * d
        )));
    }
    let eye_n = ComplexMatrix::identity(n);
    let mut acc = ComplexMatrix::zeros(n * d, n * d);
    for v in &spec.v_list {
        let vn = crate::linalg::kron(&eye_n, v);
        let comm = x.matmul(&vn).sub(&vn.matmul(x));
        acc = acc.add(&comm.dagger().matmul(&comm));
    }
    for w in &spec.w_list {
        let wn = crate::linalg::kron(&eye_n, w);
        let wx = wn.matmul(x);
        acc = acc.add(&wx.dagger().matmul(&wx));
    }
    Ok(acc)
}

/// Which side of the Hilbert-Schmidt duality a generator acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Picture {
    /// On observables; unital generators satisfy `L(1) = 0`.
    Heisenberg,
    /// On states; trace-annihilating generators.
    Schrodinger,
}

/// Settings for [`classify_generator`].
#[derive(Debug, Clone)]
pub struct ClassifyConfig {
    pub tol: f64,
    pub seed: u64,
    pub hermiticity_samples: usize,
    pub dykstra: DykstraConfig,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self { tol: 1e-8, seed: 1, hermiticity_samples: 20, dykstra: DykstraConfig::default() }
    }
}

/// Generator-level cone verdicts.
#[derive(Debug, Clone)]
pub struct GeneratorClassification {
    pub hermiticity_preserving: bool,
    /// `L(1) = 0` in the Heisenberg picture, trace annihilation in the
    /// Schrödinger picture (both reduce to unitality of the dual).
    pub unit_annihilating: bool,
    /// Conditional complete positivity: the Choi matrix compressed away from
    /// the maximally entangled direction is PSD.
    pub ccp: bool,
    /// Same compression tested against the decomposable cone.
    pub cc_decomposable: ConeVerdict,
}

/// Conditional-cone classification of a generator.
///
/// Let `ω` be the normalized maximally entangled vector of the Choi carrier,
/// `P = |ω⟩⟨ω|` and `Q = 1 − P`. Multiplier terms `A ↦ KA + AK†` have Choi
/// matrices spanning the subspace `T = {|ω⟩⟨x| + |x⟩⟨ω|}`, so:
///
/// - `ccp` (conditional complete positivity, the GKSL criterion) is
///   `C_L ∈ PSD + T`, equivalent to `Q C_L Q ⪰ 0`;
/// - `cc_decomposable` is `C_L ∈ Dec + T`, i.e. `L` splits as a CP part, a
///   coCP part and a multiplier term. The compression shortcut is not valid
///   for this cone (`Q X Q` can leave `Dec`), so membership is decided by a
///   cyclic Dykstra projection of `-C_L` onto `PPT ∩ T^⊥` with witness
///   certification; `W ∈ T^⊥` means `W|ω⟩ = 0`.
pub fn classify_generator(
    l: &SuperOperator,
    picture: Picture,
    cfg: &ClassifyConfig,
) -> Result<GeneratorClassification> {
    let heis = match picture {
        Picture::Heisenberg => l.clone(),
        Picture::Schrodinger => dual(l),
    };
    let d = heis.dim_in();
    let hermiticity_preserving =
        is_hermiticity_preserving(&heis, cfg.hermiticity_samples, cfg.seed, 1e-10);
    let unit_defect = apply(&heis, &ComplexMatrix::identity(d))?.frobenius_norm();
    let unit_annihilating = unit_defect <= cfg.tol * heis.matrix().frobenius_norm().max(1.0);
    if !unit_annihilating {
        return Err(Error::PreconditionFailed(format!(
            "generator does not annihilate the unit/trace: defect {unit_defect:.3e}"
        )));
    }
    let c = crate::qmaps::choi_of(&heis);
    let n = d * d;
    let mut omega = ComplexMatrix::zeros(n, 1);
    for i in 0..d {
        omega[(i * d + i, 0)] = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    }
    let p = omega.matmul(&omega.dagger());
    let q = ComplexMatrix::identity(n).sub(&p);
    let compressed = q.matmul(c.matrix()).matmul(&q).symmetrize();
    let scale = compressed.frobenius_norm().max(1.0);
    let ccp = min_eigenvalue(&compressed)? >= -cfg.tol * scale;
    let cc_decomposable = decomposable_modulo_multipliers(&c, &q, d, cfg)?;
    Ok(GeneratorClassification { hermiticity_preserving, unit_annihilating, ccp, cc_decomposable })
}

fn gamma_second(m: &ComplexMatrix, d: usize) -> ComplexMatrix {
    crate::linalg::partial_transpose(m, d, d, crate::linalg::Factor::Second)
        .expect("square Choi carrier")
}

/// Tests `C ∈ Dec + T` via the dual cone `PPT ∩ T^⊥`.
fn decomposable_modulo_multipliers(
    c: &ChoiMatrix,
    q: &ComplexMatrix,
    d: usize,
    cfg: &ClassifyConfig,
) -> Result<ConeVerdict> {
    let m = c.matrix().symmetrize();
    let n = m.rows();
    let scale = m.frobenius_norm().max(1.0);
    let tol = cfg.dykstra.residual_tol * scale;
    // Cyclic Dykstra: PSD and Γ(PSD) carry corrections; the subspace
    // projection X ↦ QXQ is affine and needs none.
    let mut x = m.scale_re(-1.0);
    let mut corr_psd = ComplexMatrix::zeros(n, n);
    let mut corr_gamma = ComplexMatrix::zeros(n, n);
    let mut iterations = cfg.dykstra.max_iterations;
    let mut converged = false;
    for iter in 1..=cfg.dykstra.max_iterations {
        let x_prev = x.clone();
        let z1 = x.add(&corr_psd);
        let y1 = crate::linalg::psd_project(&z1)?;
        corr_psd = z1.sub(&y1);
        let z2 = y1.add(&corr_gamma);
        let y2 = gamma_second(&crate::linalg::psd_project(&gamma_second(&z2, d))?, d);
        corr_gamma = z2.sub(&y2);
        x = q.matmul(&y2).matmul(q).symmetrize();
        let change = x.sub(&x_prev).frobenius_norm();
        if change <= cfg.dykstra.stall_tol * scale {
            iterations = iter;
            converged = true;
            break;
        }
    }
    let dist = x.frobenius_norm();
    if dist <= tol {
        return Ok(ConeVerdict {
            member: true,
            margin: -dist,
            marginal: dist > 0.1 * tol,
            inconclusive: false,
            iterations,
            witness: None,
        });
    }
    // Certify: W already satisfies W|ω> = 0 exactly after the last subspace
    // step; shift by a multiple of Q, which is PPT (Q^Γ = 1 − SWAP/d ⪰ 0 for
    // d ≥ 2) and annihilates ω, to clear both cone defects exactly.
    let w = x.scale_re(1.0 / dist);
    let psd_defect = (-min_eigenvalue(&w)?).max(0.0);
    let gamma_defect = (-min_eigenvalue(&gamma_second(&w, d))?).max(0.0);
    let gamma_floor = 1.0 - 1.0 / d as f64;
    let delta = psd_defect.max(if gamma_floor > 0.0 { gamma_defect / gamma_floor } else { 0.0 });
    let shifted = w.add(&q.scale_re(delta));
    let witness = shifted.scale_re(1.0 / shifted.frobenius_norm());
    let pairing = witness.dagger().matmul(&m).trace().re;
    if pairing <= -tol {
        Ok(ConeVerdict {
            member: false,
            margin: pairing,
            marginal: pairing >= -10.0 * tol,
            inconclusive: false,
            iterations,
            witness: Some(witness),
        })
    } else {
        Ok(ConeVerdict {
            member: true,
            margin: -dist,
            marginal: true,
            inconclusive: !converged && pairing <= 0.0,
            iterations,
            witness: None,
        })
    }
}
