//! Semigroup evolution `e^{tL}`, Trotter products, the even/odd exponential
//! series of a coCP generator, and time-grid classification scans.

use crate::cones::{is_cocp, is_cp, is_decomposable, ConeVerdict, DykstraConfig};
use crate::error::{Error, Result};
use crate::linalg::{expm, min_eigenvalue, ComplexMatrix};
use crate::qmaps::{
    apply, choi_of, compose, superop_from_kraus, transpose_map, KrausFamily, KrausSide,
    SuperOperator,
};

/// `e^{tL}` by dense matrix exponential of the superoperator.
pub fn semigroup_at(l: &SuperOperator, t: f64) -> Result<SuperOperator> {
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    SuperOperator::new(l.dim_in(), l.dim_out(), expm(&l.matrix().scale_re(t)))
}

/// First-order Trotter product `(e^{tL₁/n} e^{tL₂/n})ⁿ` and its Frobenius
/// distance to `e^{t(L₁+L₂)}`.
pub fn trotter(
    l1: &SuperOperator,
    l2: &SuperOperator,
    t: f64,
    n: usize,
) -> Result<(SuperOperator, f64)> {
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    if n < 1 {
        return Err(Error::PreconditionFailed("Trotter step count must be at least 1".into()));
    }
    let step1 = semigroup_at(l1, t / n as f64)?;
    let step2 = semigroup_at(l2, t / n as f64)?;
    let step = compose(&step1, &step2)?;
    let mut approx = SuperOperator::identity(l1.dim_in());
    for _ in 0..n {
        approx = compose(&step, &approx)?;
    }
    let exact = semigroup_at(&l1.add(l2), t)?;
    let error = approx.matrix().sub(exact.matrix()).frobenius_norm();
    Ok((approx, error))
}

/// Partial sums of `exp(t·τψ)` grouped by parity of the power.
///
/// With `ψ` CP (Kraus `W_k`) and `ψ′` the CP map with Kraus `conj(W_k)` one
/// has `τ∘ψ = ψ′∘τ`, hence `(τψ)^{2n} = (ψ′ψ)ⁿ` and
/// `(τψ)^{2n+1} = τψ(ψ′ψ)ⁿ`: the even partial sum is CP and the odd one is
/// coCP. Returns `(even_cp, odd_cocp, truncation_bound)` where the bound is
/// the standard exponential remainder `(t‖τψ‖)^{terms+1}/(terms+1)!`.
pub fn cocp_exponential_series(
    psi_kraus: &KrausFamily,
    t: f64,
    terms: usize,
) -> Result<(SuperOperator, SuperOperator, f64)> {
    if terms < 1 {
        return Err(Error::PreconditionFailed("series needs at least one term".into()));
    }
    if psi_kraus.side != KrausSide::Cp {
        return Err(Error::PreconditionFailed(
            "series expects the CP data ψ; the τ factor is applied internally".into(),
        ));
    }
    let psi = superop_from_kraus(psi_kraus)?;
    let d = psi.dim_in();
    let psi_prime = superop_from_kraus(&KrausFamily::cp(
        psi_kraus.operators.iter().map(|w| w.conj()).collect(),
    ))?;
    let tau_psi = compose(&transpose_map(d), &psi)?;
    let pp = compose(&psi_prime, &psi)?;
    let mut even = SuperOperator::zero(d);
    let mut odd_cp = SuperOperator::zero(d);
    // power = (ψ'ψ)^n accumulated once per even step; coefficients by parity.
    let mut power = SuperOperator::identity(d);
    let mut factorial = 1.0f64;
    let mut k = 0usize;
    loop {
        // k = 2n: even term t^k/k! (ψ'ψ)^n.
        even = even.add(&power.scale_re(t.powi(k as i32) / factorial));
        if k + 1 > terms {
            break;
        }
        // k+1 = 2n+1: odd term t^{k+1}/(k+1)! ψ-side factor applied after loop.
        let fact_next = factorial * (k + 1) as f64;
        odd_cp = odd_cp.add(&power.scale_re(t.powi(k as i32 + 1) / fact_next));
        if k + 2 > terms {
            break;
        }
        factorial = fact_next * (k + 2) as f64;
        power = compose(&pp, &power)?;
        k += 2;
    }
    let odd = compose(&tau_psi, &odd_cp)?;
    let norm = tau_psi.matrix().frobenius_norm();
    let mut bound = 1.0f64;
    for j in 1..=terms + 1 {
        bound *= t * norm / j as f64;
    }
    Ok((even, odd, bound))
}

/// Classification of `e^{tL}` at a single time.
#[derive(Debug, Clone)]
pub struct TimeVerdict {
    pub t: f64,
    /// `‖e^{tL}(1) − 1‖_F`.
    pub unital_defect: f64,
    /// `1 − e^{tL}(1) ⪰ −tol`.
    pub subunital: bool,
    pub cp: ConeVerdict,
    pub cocp: ConeVerdict,
    pub decomposable: ConeVerdict,
}

/// Time-grid classification of a semigroup.
#[derive(Debug, Clone)]
pub struct SemigroupScan {
    pub times: Vec<f64>,
    pub verdicts: Vec<TimeVerdict>,
}

impl SemigroupScan {
    pub fn all_decomposable(&self) -> bool {
        self.verdicts.iter().all(|v| v.decomposable.member)
    }

    pub fn all_cp(&self) -> bool {
        self.verdicts.iter().all(|v| v.cp.member)
    }

    pub fn max_unital_defect(&self) -> f64 {
        self.verdicts.iter().fold(0.0, |acc, v| acc.max(v.unital_defect))
    }
}

/// Settings for [`scan_semigroup`].
#[derive(Debug, Clone)]
pub struct ScanConfig {
    pub tol: f64,
    pub dykstra: DykstraConfig,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self { tol: 1e-9, dykstra: DykstraConfig::default() }
    }
}

/// Default time grid; decomposability loss, when present, tends to show at
/// small times.
pub fn default_scan_grid() -> Vec<f64> {
    vec![0.05, 0.1, 0.2, 0.5, 1.0, 2.0]
}

/// Classifies `e^{tL}` (Heisenberg picture) on a time grid: unitality defect,
/// subunitality and the CP/coCP/Dec cone verdicts of the Choi matrix.
pub fn scan_semigroup(
    l: &SuperOperator,
    times: &[f64],
    cfg: &ScanConfig,
) -> Result<SemigroupScan> {
    if times.windows(2).any(|w| w[0] >= w[1]) || times.first().is_some_and(|t| *t < 0.0) {
        return Err(Error::InvalidSchedule("times must be nonnegative and strictly ascending".into()));
    }
    let d = l.dim_in();
    let eye = ComplexMatrix::identity(d);
    let mut verdicts = Vec::with_capacity(times.len());
    for &t in times {
        let e = semigroup_at(l, t)?;
        let e_unit = apply(&e, &eye)?;
        let unital_defect = e_unit.sub(&eye).frobenius_norm();
        let gap = eye.sub(&e_unit).symmetrize();
        let subunital = min_eigenvalue(&gap)? >= -cfg.tol;
        let c = choi_of(&e);
        verdicts.push(TimeVerdict {
            t,
            unital_defect,
            subunital,
            cp: is_cp(&c, cfg.tol)?,
            cocp: is_cocp(&c, cfg.tol)?,
            decomposable: is_decomposable(&c, &cfg.dykstra)?,
        });
    }
    Ok(SemigroupScan { times: times.to_vec(), verdicts })
}
