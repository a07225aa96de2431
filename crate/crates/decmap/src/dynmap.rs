//! Time-dependent master equations, trajectory integration, propagators and
//! D-divisibility scans.
//!
//! Schedules are piecewise constant in the Schrödinger picture: each segment
//! holds a trace-annihilating generator `𝓛` and the dynamical map obeys
//! `dΛ_t/dt = 𝓛_t Λ_t` with `Λ₀ = id`. The propagators `V_{t,s} = Λ_t Λ_s⁻¹`
//! are classified against the CP/coCP/Dec cones pair by pair; decomposability
//! of every propagator is the D-divisibility criterion (tested pointwise on
//! the grid, which cannot distinguish smooth from merely pointwise
//! decomposability).

use crate::cones::{is_cocp, is_cp, is_decomposable, positivity_sample_test, ConeVerdict, DykstraConfig};
use crate::error::{Error, Result};
use crate::generators::{
    build_standard_schrodinger, classify_generator, ClassifyConfig, DecomposableGeneratorSpec,
    GeneratorClassification, Picture,
};
use crate::linalg::{condition_number, expm, inverse, ComplexMatrix};
use crate::qmaps::{choi_of, compose, SuperOperator};

/// Generator data of one schedule segment.
#[derive(Debug, Clone)]
pub enum SegmentGenerator {
    /// Standard-form data; converted to the Schrödinger picture on use.
    Spec(DecomposableGeneratorSpec),
    /// Raw Schrödinger-picture superoperator.
    Raw(SuperOperator),
}

impl SegmentGenerator {
    fn schrodinger(&self) -> Result<SuperOperator> {
        match self {
            SegmentGenerator::Spec(spec) => build_standard_schrodinger(spec),
            SegmentGenerator::Raw(s) => Ok(s.clone()),
        }
    }

    fn dim(&self) -> usize {
        match self {
            SegmentGenerator::Spec(spec) => spec.dim(),
            SegmentGenerator::Raw(s) => s.dim_in(),
        }
    }
}

/// One piece of a piecewise-constant schedule, active on `[t_start, next)`.
#[derive(Debug, Clone)]
pub struct Segment {
    pub t_start: f64,
    pub generator: SegmentGenerator,
}

/// Piecewise-constant generator schedule on `[0, horizon]`.
#[derive(Debug, Clone)]
pub struct GeneratorSchedule {
    pub segments: Vec<Segment>,
    pub horizon: f64,
}

impl GeneratorSchedule {
    pub fn constant(generator: SegmentGenerator, horizon: f64) -> Self {
        Self { segments: vec![Segment { t_start: 0.0, generator }], horizon }
    }

    pub fn validate(&self) -> Result<()> {
        if self.segments.is_empty() {
            return Err(Error::InvalidSchedule("schedule has no segments".into()));
        }
        if self.segments[0].t_start != 0.0 {
            return Err(Error::InvalidSchedule("first segment must start at t = 0".into()));
        }
        if self
            .segments
            .windows(2)
            .any(|w| w[0].t_start >= w[1].t_start)
        {
            return Err(Error::InvalidSchedule("segment starts must be strictly ascending".into()));
        }
        let last = self.segments.last().expect("nonempty").t_start;
        if self.horizon <= last {
            return Err(Error::InvalidSchedule(format!(
                "horizon {} must exceed the last segment start {last}",
                self.horizon
            )));
        }
        let d = self.dim();
        if self.segments.iter().any(|s| s.generator.dim() != d) {
            return Err(Error::InvalidSchedule("segments have mixed dimensions".into()));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.segments.first().map(|s| s.generator.dim()).unwrap_or(0)
    }

    /// Schrödinger generator active at time `t`.
    pub fn generator_at(&self, t: f64) -> Result<SuperOperator> {
        if t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
        let seg = self
            .segments
            .iter()
            .rev()
            .find(|s| s.t_start <= t)
            .ok_or_else(|| Error::InvalidSchedule(format!("no segment covers t = {t}")))?;
        seg.generator.schrodinger()
    }
}

/// Integration scheme for the superoperator ODE.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegrationMethod {
    /// `Λ_{j+1} = expm(Δt·𝓛_{t_j})·Λ_j`; exact per aligned constant segment.
    TimeSplitting,
    /// Classical fourth-order Runge-Kutta on `dΛ/dt = 𝓛_t Λ`.
    Rk4,
}

/// Dynamical map sampled on a uniform grid.
#[derive(Debug, Clone)]
pub struct DynamicalMapTrajectory {
    pub grid: Vec<f64>,
    pub maps: Vec<SuperOperator>,
    pub method: IntegrationMethod,
    pub step: f64,
    /// `‖Tr₂ C(Λ_t) − 1‖_F` per grid point.
    pub trace_defects: Vec<f64>,
}

fn trace_defect(map: &SuperOperator) -> f64 {
    let c = choi_of(map);
    c.trace_out_second()
        .sub(&ComplexMatrix::identity(map.dim_in()))
        .frobenius_norm()
}

/// Integrates the schedule into a trajectory of `steps + 1` maps.
pub fn integrate(
    schedule: &GeneratorSchedule,
    steps: usize,
    method: IntegrationMethod,
) -> Result<DynamicalMapTrajectory> {
    schedule.validate()?;
    if steps < 1 {
        return Err(Error::PreconditionFailed("integration needs at least one step".into()));
    }
    let d = schedule.dim();
    let dt = schedule.horizon / steps as f64;
    let mut maps = Vec::with_capacity(steps + 1);
    let mut grid = Vec::with_capacity(steps + 1);
    let mut lambda = SuperOperator::identity(d);
    maps.push(lambda.clone());
    grid.push(0.0);
    for j in 0..steps {
        let t_j = j as f64 * dt;
        lambda = match method {
            IntegrationMethod::TimeSplitting => {
                let l = schedule.generator_at(t_j)?;
                let step = SuperOperator::new(d, d, expm(&l.matrix().scale_re(dt)))?;
                compose(&step, &lambda)?
            }
            IntegrationMethod::Rk4 => {
                let l0 = schedule.generator_at(t_j)?;
                let lh = schedule.generator_at(t_j + 0.5 * dt)?;
                // right endpoint sampled just inside the step to keep the
                // half-open segment semantics
                let l1 = schedule.generator_at(t_j + dt * (1.0 - 1e-12))?;
                let y = lambda.matrix();
                let k1 = l0.matrix().matmul(y);
                let k2 = lh.matrix().matmul(&y.add(&k1.scale_re(0.5 * dt)));
                let k3 = lh.matrix().matmul(&y.add(&k2.scale_re(0.5 * dt)));
                let k4 = l1.matrix().matmul(&y.add(&k3.scale_re(dt)));
                let incr = k1
                    .add(&k2.scale_re(2.0))
                    .add(&k3.scale_re(2.0))
                    .add(&k4)
                    .scale_re(dt / 6.0);
                SuperOperator::new(d, d, y.add(&incr))?
            }
        };
        maps.push(lambda.clone());
        grid.push((j + 1) as f64 * dt);
    }
    let trace_defects = maps.iter().map(trace_defect).collect();
    Ok(DynamicalMapTrajectory { grid, maps, method, step: dt, trace_defects })
}

/// Cap on the condition number of `Λ_s` before inversion is refused.
pub const CONDITION_CAP: f64 = 1e10;

fn grid_index(traj: &DynamicalMapTrajectory, t: f64) -> Result<usize> {
    traj.grid
        .iter()
        .position(|g| (g - t).abs() <= 1e-9 * traj.step.max(1.0))
        .ok_or_else(|| Error::PreconditionFailed(format!("time {t} is not on the trajectory grid")))
}

/// Propagator `V_{t,s} = Λ_t Λ_s⁻¹` with the condition number of `Λ_s`.
pub fn propagator(
    traj: &DynamicalMapTrajectory,
    t: f64,
    s: f64,
) -> Result<(SuperOperator, f64)> {
    if s > t {
        return Err(Error::PreconditionFailed(format!("propagator needs s <= t, got s={s}, t={t}")));
    }
    let it = grid_index(traj, t)?;
    let is = grid_index(traj, s)?;
    let lam_s = &traj.maps[is];
    let cond = condition_number(lam_s.matrix());
    if !cond.is_finite() || cond > CONDITION_CAP {
        return Err(Error::SingularIntermediateMap { t: s, cond, cap: CONDITION_CAP });
    }
    let inv = inverse(lam_s.matrix())?;
    let d = lam_s.dim_in();
    let v = SuperOperator::new(d, d, traj.maps[it].matrix().matmul(&inv))?;
    Ok((v, cond))
}

/// Cone verdicts of one propagator.
#[derive(Debug, Clone)]
pub struct PairVerdict {
    pub s: f64,
    pub t: f64,
    pub trace_defect: f64,
    pub positivity_sampled: bool,
    pub cp: ConeVerdict,
    pub cocp: ConeVerdict,
    pub decomposable: ConeVerdict,
    pub condition_number: f64,
}

/// Outcome per scanned pair; singular intermediate maps are recorded, not
/// fatal.
#[derive(Debug, Clone)]
pub enum PairResult {
    Classified(PairVerdict),
    Singular { s: f64, t: f64, condition_number: f64 },
}

/// Pairwise decomposability scan of a trajectory.
#[derive(Debug, Clone)]
pub struct DivisibilityReport {
    pub pairs: Vec<PairResult>,
}

impl DivisibilityReport {
    pub fn all_decomposable(&self) -> bool {
        self.pairs.iter().all(|p| match p {
            PairResult::Classified(v) => v.decomposable.member,
            PairResult::Singular { .. } => false,
        })
    }

    pub fn all_cp(&self) -> bool {
        self.pairs.iter().all(|p| match p {
            PairResult::Classified(v) => v.cp.member,
            PairResult::Singular { .. } => false,
        })
    }

    pub fn failing_pairs(&self) -> Vec<&PairVerdict> {
        self.pairs
            .iter()
            .filter_map(|p| match p {
                PairResult::Classified(v) if !v.decomposable.member => Some(v),
                _ => None,
            })
            .collect()
    }

    pub fn singular_pairs(&self) -> usize {
        self.pairs
            .iter()
            .filter(|p| matches!(p, PairResult::Singular { .. }))
            .count()
    }
}

/// Settings for [`divisibility_scan`].
#[derive(Debug, Clone)]
pub struct DivisibilityConfig {
    pub tol: f64,
    pub seed: u64,
    pub positivity_samples: usize,
    pub dykstra: DykstraConfig,
}

impl Default for DivisibilityConfig {
    fn default() -> Self {
        Self { tol: 1e-9, seed: 1, positivity_samples: 50, dykstra: DykstraConfig::default() }
    }
}

/// All grid pairs `(s, t)` with `t − s ≥ stride·Δt`, subsampled by `stride`.
pub fn default_pair_grid(traj: &DynamicalMapTrajectory, stride: usize) -> Vec<(f64, f64)> {
    let stride = stride.max(1);
    let mut pairs = Vec::new();
    for (i, &s) in traj.grid.iter().enumerate().step_by(stride) {
        for (j, &t) in traj.grid.iter().enumerate().skip(i + stride).step_by(stride) {
            let _ = j;
            pairs.push((s, t));
        }
    }
    pairs
}

/// Classifies the propagator of every requested pair.
pub fn divisibility_scan(
    traj: &DynamicalMapTrajectory,
    pair_grid: &[(f64, f64)],
    cfg: &DivisibilityConfig,
) -> Result<DivisibilityReport> {
    let mut pairs = Vec::with_capacity(pair_grid.len());
    for &(s, t) in pair_grid {
        if s > t {
            return Err(Error::PreconditionFailed(format!("pair ({s}, {t}) has s > t")));
        }
        let (v, cond) = match propagator(traj, t, s) {
            Ok(ok) => ok,
            Err(Error::SingularIntermediateMap { cond, .. }) => {
                pairs.push(PairResult::Singular { s, t, condition_number: cond });
                continue;
            }
            Err(e) => return Err(e),
        };
        let c = choi_of(&v);
        let pos = positivity_sample_test(&v, cfg.positivity_samples, cfg.seed, cfg.tol)?;
        pairs.push(PairResult::Classified(PairVerdict {
            s,
            t,
            trace_defect: trace_defect(&v),
            positivity_sampled: pos.pass,
            cp: is_cp(&c, cfg.tol)?,
            cocp: is_cocp(&c, cfg.tol)?,
            decomposable: is_decomposable(&c, &cfg.dykstra)?,
            condition_number: cond,
        }));
    }
    Ok(DivisibilityReport { pairs })
}

/// Pointwise divisibility criterion: every segment generator classified.
#[derive(Debug, Clone)]
pub struct ScheduleCheck {
    pub per_segment: Vec<(f64, GeneratorClassification)>,
    /// All segments admit the standard-form splitting.
    pub pointwise_divisible: bool,
}

/// Classifies each segment generator; the aggregate is the pointwise
/// D-divisibility criterion.
pub fn dynmap_generator_check(
    schedule: &GeneratorSchedule,
    cfg: &ClassifyConfig,
) -> Result<ScheduleCheck> {
    schedule.validate()?;
    let mut per_segment = Vec::with_capacity(schedule.segments.len());
    let mut all = true;
    for seg in &schedule.segments {
        let l = seg.generator.schrodinger()?;
        let class = classify_generator(&l, Picture::Schrodinger, cfg)?;
        all &= class.cc_decomposable.member;
        per_segment.push((seg.t_start, class));
    }
    Ok(ScheduleCheck { per_segment, pointwise_divisible: all })
}
