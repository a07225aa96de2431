//! Scenario ingestion, command dispatch and report emission.
//!
//! Scenario files are JSON: a version string plus named objects (maps,
//! generator data or schedules). Complex numbers are `[re, im]` pairs and
//! matrices row-major nested arrays. Reports are built as a single JSON tree;
//! the machine rendering serializes it canonically (sorted keys, default
//! float formatting) and the human rendering walks the same tree, so both
//! carry exactly the same numbers. Wall-clock time is never part of a report
//! (it would break byte-level determinism); the human mode prints it to
//! stderr instead.
//!
//! Exit codes: 0 affirmative, 1 negative with certificate, 2 input error,
//! 3 numeric non-convergence.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::cones::{
    is_cocp, is_cp, is_decomposable, is_ppt, positivity_sample_test, split_decomposable,
    ConeVerdict, DykstraConfig,
};
use crate::dynmap::{
    default_pair_grid, divisibility_scan, dynmap_generator_check, integrate, DivisibilityConfig,
    GeneratorSchedule, IntegrationMethod, PairResult, Segment, SegmentGenerator,
};
use crate::error::{Error, Result};
use crate::generators::{
    build_nonunital, build_standard_heisenberg, classify_generator, dissipation_check,
    ClassifyConfig, DecomposableGeneratorSpec, NonunitalGeneratorSpec, Picture,
};
use crate::linalg::{C64, ComplexMatrix};
use crate::qmaps::{
    choi_of, dual, kraus_from_choi, superop_from_kraus, superop_of, ChoiMatrix,
    KrausFamily, SuperOperator,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

// ---------------------------------------------------------------------------
// Scenario format

type MatrixData = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub version: String,
    pub objects: BTreeMap<String, ObjectSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObjectSpec {
    Superop {
        matrix: MatrixData,
    },
    Choi {
        d_in: usize,
        d_out: usize,
        matrix: MatrixData,
    },
    Kraus {
        side: KrausSideData,
        operators: Vec<MatrixData>,
    },
    GeneratorSpec {
        h: MatrixData,
        #[serde(default)]
        v_list: Vec<MatrixData>,
        #[serde(default)]
        w_list: Vec<MatrixData>,
    },
    NonunitalSpec {
        #[serde(default)]
        phi_kraus: Vec<MatrixData>,
        #[serde(default)]
        psi_kraus: Vec<MatrixData>,
        k: MatrixData,
    },
    Schedule {
        segments: Vec<SegmentData>,
        horizon: f64,
    },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KrausSideData {
    Cp,
    Cocp,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentData {
    pub t: f64,
    #[serde(default)]
    pub spec: Option<GeneratorSpecData>,
    #[serde(default)]
    pub superop: Option<MatrixData>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpecData {
    pub h: MatrixData,
    #[serde(default)]
    pub v_list: Vec<MatrixData>,
    #[serde(default)]
    pub w_list: Vec<MatrixData>,
}

fn to_matrix(data: &MatrixData) -> Result<ComplexMatrix> {
    let rows = data.len();
    if rows == 0 {
        return Err(Error::Schema("matrix has no rows".into()));
    }
    let cols = data[0].len();
    if cols == 0 || data.iter().any(|r| r.len() != cols) {
        return Err(Error::Schema("matrix rows have inconsistent lengths".into()));
    }
    let mut m = ComplexMatrix::zeros(rows, cols);
    for (i, row) in data.iter().enumerate() {
        for (j, &[re, im]) in row.iter().enumerate() {
            m[(i, j)] = C64::new(re, im);
        }
    }
    Ok(m)
}

fn superop_from_data(data: &MatrixData) -> Result<SuperOperator> {
    let m = to_matrix(data)?;
    let dout = (m.rows() as f64).sqrt().round() as usize;
    let din = (m.cols() as f64).sqrt().round() as usize;
    if dout * dout != m.rows() || din * din != m.cols() {
        return Err(Error::Schema(format!(
            "superoperator shape {}x{} is not a pair of squares",
            m.rows(),
            m.cols()
        )));
    }
    SuperOperator::new(din, dout, m)
}

fn generator_spec_from(h: &MatrixData, v: &[MatrixData], w: &[MatrixData]) -> Result<DecomposableGeneratorSpec> {
    DecomposableGeneratorSpec::new(
        to_matrix(h)?,
        v.iter().map(to_matrix).collect::<Result<_>>()?,
        w.iter().map(to_matrix).collect::<Result<_>>()?,
    )
}

/// A scenario object resolved into crate types.
pub enum ResolvedObject {
    Map(SuperOperator),
    Generator(SuperOperator),
    Schedule(GeneratorSchedule),
}

pub fn resolve_object(spec: &ObjectSpec) -> Result<ResolvedObject> {
    Ok(match spec {
        ObjectSpec::Superop { matrix } => ResolvedObject::Map(superop_from_data(matrix)?),
        ObjectSpec::Choi { d_in, d_out, matrix } => {
            ResolvedObject::Map(superop_of(&ChoiMatrix::new(*d_in, *d_out, to_matrix(matrix)?)?))
        }
        ObjectSpec::Kraus { side, operators } => {
            let ops = operators.iter().map(to_matrix).collect::<Result<Vec<_>>>()?;
            let family = match side {
                KrausSideData::Cp => KrausFamily::cp(ops),
                KrausSideData::Cocp => KrausFamily::cocp(ops),
            };
            ResolvedObject::Map(superop_from_kraus(&family)?)
        }
        ObjectSpec::GeneratorSpec { h, v_list, w_list } => {
            ResolvedObject::Generator(build_standard_heisenberg(&generator_spec_from(h, v_list, w_list)?)?)
        }
        ObjectSpec::NonunitalSpec { phi_kraus, psi_kraus, k } => {
            let spec = NonunitalGeneratorSpec {
                phi_kraus: phi_kraus.iter().map(to_matrix).collect::<Result<_>>()?,
                psi_kraus: psi_kraus.iter().map(to_matrix).collect::<Result<_>>()?,
                k: to_matrix(k)?,
            };
            ResolvedObject::Generator(build_nonunital(&spec)?)
        }
        ObjectSpec::Schedule { segments, horizon } => {
            let mut segs = Vec::with_capacity(segments.len());
            for seg in segments {
                let generator = match (&seg.spec, &seg.superop) {
                    (Some(spec), None) => SegmentGenerator::Spec(generator_spec_from(
                        &spec.h,
                        &spec.v_list,
                        &spec.w_list,
                    )?),
                    (None, Some(data)) => SegmentGenerator::Raw(superop_from_data(data)?),
                    _ => {
                        return Err(Error::Schema(
                            "each segment needs exactly one of `spec` or `superop`".into(),
                        ))
                    }
                };
                segs.push(Segment { t_start: seg.t, generator });
            }
            ResolvedObject::Schedule(GeneratorSchedule { segments: segs, horizon: *horizon })
        }
    })
}

// ---------------------------------------------------------------------------
// Command line

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Human,
    Machine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PictureArg {
    Heisenberg,
    Schrodinger,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    TimeSplitting,
    Rk4,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Scenario file (JSON).
    pub scenario: PathBuf,
    /// Object name; may be omitted when the scenario has exactly one object.
    #[arg(long)]
    pub object: Option<String>,
    /// Cone and defect tolerance.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Seed for sampled checks; mandatory in machine mode.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Iteration cap for the projection solver.
    #[arg(long, default_value_t = 20000)]
    pub max_iter: usize,
    #[arg(long, value_enum, default_value_t = OutputFormat::Human)]
    pub format: OutputFormat,
}

#[derive(Debug, Parser)]
#[command(name = "decmap", version, about = "Decomposable maps and D-divisible dynamics toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a map against the CP / coCP / PPT / decomposable cones.
    ClassifyMap(CommonArgs),
    /// Extract a CP + coCP split of a map, with Kraus families.
    DecomposeMap(CommonArgs),
    /// Dissipation and conditional-cone checks of a generator.
    CheckGenerator {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum, default_value_t = PictureArg::Heisenberg)]
        picture: PictureArg,
        /// Highest tensor extension level for the dissipation check.
        #[arg(long, default_value_t = 3)]
        levels: usize,
        /// Random inputs per level.
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
    /// Integrate a schedule into a dynamical map trajectory.
    Evolve {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 40)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::TimeSplitting)]
        method: MethodArg,
        /// Also classify each trajectory map against the cones.
        #[arg(long)]
        scan: bool,
    },
    /// Scan all propagators of a schedule for D-divisibility.
    CheckDivisibility {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 20)]
        steps: usize,
        /// Subsampling stride of the pair grid.
        #[arg(long, default_value_t = 2)]
        pair_stride: usize,
    },
}

// ---------------------------------------------------------------------------
// Report plumbing

fn matrix_json(m: &ComplexMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| {
                Value::Array(
                    (0..m.cols())
                        .map(|j| json!([m[(i, j)].re, m[(i, j)].im]))
                        .collect(),
                )
            })
            .collect(),
    )
}

fn verdict_json(v: &ConeVerdict, with_witness: bool) -> Value {
    let mut obj = json!({
        "member": v.member,
        "margin": v.margin,
        "marginal": v.marginal,
        "inconclusive": v.inconclusive,
        "iterations": v.iterations,
    });
    if with_witness {
        if let Some(w) = &v.witness {
            obj["witness"] = matrix_json(w);
        }
    }
    obj
}

fn render_human(value: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                match v {
                    Value::Object(_) | Value::Array(_) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render_human(v, indent + 1, out);
                    }
                    _ => out.push_str(&format!("{pad}{k}: {v}\n")),
                }
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                match v {
                    Value::Object(_) | Value::Array(_) => {
                        out.push_str(&format!("{pad}[{i}]:\n"));
                        render_human(v, indent + 1, out);
                    }
                    _ => out.push_str(&format!("{pad}[{i}]: {v}\n")),
                }
            }
        }
        _ => out.push_str(&format!("{pad}{value}\n")),
    }
}

/// Renders the report tree; machine mode is canonical JSON (sorted keys).
pub fn render_report(report: &Value, format: OutputFormat) -> String {
    match format {
        OutputFormat::Machine => {
            let mut s = serde_json::to_string(report).expect("report serializes");
            s.push('\n');
            s
        }
        OutputFormat::Human => {
            let mut out = String::new();
            render_human(report, 0, &mut out);
            out
        }
    }
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::IterationCap { .. }
        | Error::EigNonConvergence { .. }
        | Error::SingularIntermediateMap { .. } => EXIT_NUMERIC,
        _ => EXIT_INPUT,
    }
}

struct Context {
    scenario: ScenarioFile,
    object_name: String,
    tol: f64,
    seed: u64,
    dykstra: DykstraConfig,
}

impl Context {
    fn new(common: &CommonArgs) -> Result<Self> {
        let seed = match (common.seed, common.format) {
            (Some(s), _) => s,
            (None, OutputFormat::Machine) => {
                return Err(Error::Schema(
                    "machine format requires an explicit --seed".into(),
                ))
            }
            (None, OutputFormat::Human) => 0,
        };
        let text = std::fs::read_to_string(&common.scenario)?;
        let scenario: ScenarioFile =
            serde_json::from_str(&text).map_err(|e| Error::Schema(e.to_string()))?;
        let object_name = match &common.object {
            Some(name) => {
                if !scenario.objects.contains_key(name) {
                    return Err(Error::Schema(format!("object `{name}` not in scenario")));
                }
                name.clone()
            }
            None => {
                if scenario.objects.len() == 1 {
                    scenario.objects.keys().next().expect("one object").clone()
                } else {
                    return Err(Error::Schema(
                        "scenario has multiple objects; select one with --object".into(),
                    ));
                }
            }
        };
        Ok(Self {
            scenario,
            object_name,
            tol: common.tol,
            seed,
            dykstra: DykstraConfig {
                max_iterations: common.max_iter,
                ..DykstraConfig::default()
            },
        })
    }

    fn object(&self) -> &ObjectSpec {
        &self.scenario.objects[&self.object_name]
    }

    fn base_report(&self, command: &str) -> Value {
        json!({
            "command": command,
            "object": self.object_name,
            "seed": self.seed,
            "tol": self.tol,
            "max_iterations": self.dykstra.max_iterations,
        })
    }
}

// ---------------------------------------------------------------------------
// Commands

fn map_of(ctx: &Context) -> Result<SuperOperator> {
    match resolve_object(ctx.object())? {
        ResolvedObject::Map(s) => Ok(s),
        ResolvedObject::Generator(s) => Ok(s),
        ResolvedObject::Schedule(_) => {
            Err(Error::Schema("this command needs a map object, got a schedule".into()))
        }
    }
}

fn cmd_classify_map(ctx: &Context) -> Result<(Value, i32)> {
    let s = map_of(ctx)?;
    let c = choi_of(&s);
    let d = s.dim_in();
    let pos = positivity_sample_test(&s, 100, ctx.seed, ctx.tol)?;
    let cp = is_cp(&c, ctx.tol)?;
    let cocp = is_cocp(&c, ctx.tol)?;
    let ppt = is_ppt(&c, ctx.tol)?;
    let dec = is_decomposable(&c, &ctx.dykstra)?;
    let tp_defect = c
        .trace_out_second()
        .sub(&ComplexMatrix::identity(d))
        .frobenius_norm();
    let unital_defect = c
        .trace_out_first()
        .sub(&ComplexMatrix::identity(s.dim_out()))
        .frobenius_norm();
    let mut report = ctx.base_report("classify-map");
    report["positivity_sampled"] = json!({
        "pass": pos.pass,
        "samples": pos.samples,
        "min_output_eigenvalue": pos.min_output_eigenvalue,
    });
    report["cp"] = verdict_json(&cp, false);
    report["cocp"] = verdict_json(&cocp, false);
    report["ppt"] = verdict_json(&ppt, false);
    report["decomposable"] = verdict_json(&dec, true);
    report["trace_preservation_defect"] = json!(tp_defect);
    report["unitality_defect"] = json!(unital_defect);
    let code = if dec.member { EXIT_OK } else { EXIT_NEGATIVE };
    Ok((report, code))
}

fn kraus_json(ops: &[ComplexMatrix]) -> Value {
    Value::Array(ops.iter().map(matrix_json).collect())
}

fn cmd_decompose_map(ctx: &Context) -> Result<(Value, i32)> {
    let s = map_of(ctx)?;
    let c = choi_of(&s);
    let mut report = ctx.base_report("decompose-map");
    match split_decomposable(&c, &ctx.dykstra) {
        Ok(split) => {
            let cp_kraus = kraus_from_choi(&split.cp_part, 1e-7)?;
            // Γ(cocp Choi) is the Choi of the CP factor ψ with Φ₂ = τ∘ψ... the
            // coCP factor's own Kraus operators come from the partially
            // transposed block.
            let gamma = ChoiMatrix::new(
                split.cocp_part.d_in(),
                split.cocp_part.d_out(),
                split.cocp_part.partial_transpose(),
            )?;
            let cocp_kraus = kraus_from_choi(&gamma, 1e-7)?;
            report["feasible"] = json!(true);
            report["residual"] = json!(split.residual);
            report["iterations"] = json!(split.iterations);
            report["cp_part_choi"] = matrix_json(split.cp_part.matrix());
            report["cocp_part_choi"] = matrix_json(split.cocp_part.matrix());
            report["cp_kraus"] = kraus_json(&cp_kraus.operators);
            report["cocp_kraus"] = kraus_json(&cocp_kraus.operators);
            Ok((report, EXIT_OK))
        }
        Err(Error::IterationCap { residual, max_iterations }) => {
            report["feasible"] = json!(false);
            report["best_residual"] = json!(residual);
            report["iterations"] = json!(max_iterations);
            Ok((report, EXIT_NEGATIVE))
        }
        Err(e) => Err(e),
    }
}

fn cmd_check_generator(
    ctx: &Context,
    picture: PictureArg,
    levels: usize,
    samples: usize,
) -> Result<(Value, i32)> {
    if let ObjectSpec::NonunitalSpec { .. } = ctx.object() {
        // Unit-translated generators: only the shifted dissipation
        // inequality applies, not the unit-annihilating cone tests.
        let l = match resolve_object(ctx.object())? {
            ResolvedObject::Generator(s) => s,
            _ => unreachable!("nonunital spec resolves to a generator"),
        };
        let heis = match picture {
            PictureArg::Heisenberg => l.clone(),
            PictureArg::Schrodinger => dual(&l),
        };
        let dissipation =
            crate::generators::nonunital_dissipation_check(&heis, levels, samples, ctx.tol, ctx.seed)?;
        let mut report = ctx.base_report("check-generator");
        report["picture"] = json!(match picture {
            PictureArg::Heisenberg => "heisenberg",
            PictureArg::Schrodinger => "schrodinger",
        });
        report["unit_translated"] = json!(true);
        report["dissipation"] = json!({
            "max_level": dissipation.max_level,
            "samples": dissipation.samples,
            "per_level_min_eigenvalue": dissipation.per_level,
            "worst_margin": dissipation.worst_margin,
            "worst_level": dissipation.worst_level,
            "pass": dissipation.pass,
            "note": "sampled necessary check up to the stated level; not a certificate",
        });
        let code = if dissipation.pass { EXIT_OK } else { EXIT_NEGATIVE };
        return Ok((report, code));
    }
    let l = match resolve_object(ctx.object())? {
        ResolvedObject::Generator(s) | ResolvedObject::Map(s) => s,
        ResolvedObject::Schedule(_) => {
            return Err(Error::Schema("this command needs a generator object".into()))
        }
    };
    let pic = match picture {
        PictureArg::Heisenberg => Picture::Heisenberg,
        PictureArg::Schrodinger => Picture::Schrodinger,
    };
    let cfg = ClassifyConfig {
        tol: ctx.tol,
        seed: ctx.seed,
        dykstra: ctx.dykstra.clone(),
        ..ClassifyConfig::default()
    };
    let class = classify_generator(&l, pic, &cfg)?;
    let heis = match pic {
        Picture::Heisenberg => l.clone(),
        Picture::Schrodinger => dual(&l),
    };
    let dissipation = dissipation_check(&heis, levels, samples, ctx.tol, ctx.seed)?;
    let mut report = ctx.base_report("check-generator");
    report["picture"] = json!(match picture {
        PictureArg::Heisenberg => "heisenberg",
        PictureArg::Schrodinger => "schrodinger",
    });
    report["hermiticity_preserving"] = json!(class.hermiticity_preserving);
    report["unit_annihilating"] = json!(class.unit_annihilating);
    report["ccp"] = json!(class.ccp);
    report["cc_decomposable"] = verdict_json(&class.cc_decomposable, true);
    report["dissipation"] = json!({
        "max_level": dissipation.max_level,
        "samples": dissipation.samples,
        "per_level_min_eigenvalue": dissipation.per_level,
        "worst_margin": dissipation.worst_margin,
        "worst_level": dissipation.worst_level,
        "pass": dissipation.pass,
        "note": "sampled necessary check up to the stated level; not a certificate",
    });
    let code = if class.cc_decomposable.member { EXIT_OK } else { EXIT_NEGATIVE };
    Ok((report, code))
}

fn schedule_of(ctx: &Context) -> Result<GeneratorSchedule> {
    match resolve_object(ctx.object())? {
        ResolvedObject::Schedule(s) => Ok(s),
        _ => Err(Error::Schema("this command needs a schedule object".into())),
    }
}

fn cmd_evolve(
    ctx: &Context,
    steps: usize,
    method: MethodArg,
    scan: bool,
) -> Result<(Value, i32)> {
    let schedule = schedule_of(ctx)?;
    let m = match method {
        MethodArg::TimeSplitting => IntegrationMethod::TimeSplitting,
        MethodArg::Rk4 => IntegrationMethod::Rk4,
    };
    let traj = integrate(&schedule, steps, m)?;
    let mut report = ctx.base_report("evolve");
    report["method"] = json!(match method {
        MethodArg::TimeSplitting => "time_splitting",
        MethodArg::Rk4 => "rk4",
    });
    report["steps"] = json!(steps);
    report["step_size"] = json!(traj.step);
    report["grid"] = json!(traj.grid);
    report["trace_defects"] = json!(traj.trace_defects);
    report["max_trace_defect"] =
        json!(traj.trace_defects.iter().cloned().fold(0.0f64, f64::max));
    report["final_map"] = matrix_json(traj.maps.last().expect("nonempty").matrix());
    if scan {
        let mut verdicts = Vec::new();
        for (t, map) in traj.grid.iter().zip(&traj.maps) {
            let c = choi_of(map);
            verdicts.push(json!({
                "t": t,
                "cp": verdict_json(&is_cp(&c, ctx.tol)?, false),
                "decomposable": verdict_json(&is_decomposable(&c, &ctx.dykstra)?, false),
            }));
        }
        report["scan"] = Value::Array(verdicts);
    }
    Ok((report, EXIT_OK))
}

fn cmd_check_divisibility(
    ctx: &Context,
    steps: usize,
    pair_stride: usize,
) -> Result<(Value, i32)> {
    let schedule = schedule_of(ctx)?;
    let traj = integrate(&schedule, steps, IntegrationMethod::TimeSplitting)?;
    let pairs = default_pair_grid(&traj, pair_stride);
    let cfg = DivisibilityConfig {
        tol: ctx.tol,
        seed: ctx.seed,
        dykstra: ctx.dykstra.clone(),
        ..DivisibilityConfig::default()
    };
    let scan = divisibility_scan(&traj, &pairs, &cfg)?;
    let class_cfg = ClassifyConfig {
        tol: ctx.tol,
        seed: ctx.seed,
        dykstra: ctx.dykstra.clone(),
        ..ClassifyConfig::default()
    };
    let gen_check = dynmap_generator_check(&schedule, &class_cfg)?;
    let mut pair_reports = Vec::new();
    for pair in &scan.pairs {
        pair_reports.push(match pair {
            PairResult::Classified(v) => json!({
                "s": v.s,
                "t": v.t,
                "trace_defect": v.trace_defect,
                "positivity_sampled": v.positivity_sampled,
                "condition_number": v.condition_number,
                "cp": verdict_json(&v.cp, false),
                "cocp": verdict_json(&v.cocp, false),
                "decomposable": verdict_json(&v.decomposable, true),
            }),
            PairResult::Singular { s, t, condition_number } => json!({
                "s": s,
                "t": t,
                "singular": true,
                "condition_number": condition_number,
            }),
        });
    }
    let all_dec = scan.all_decomposable();
    let mut report = ctx.base_report("check-divisibility");
    report["steps"] = json!(steps);
    report["pair_stride"] = json!(pair_stride);
    report["pairs"] = Value::Array(pair_reports);
    report["singular_pairs"] = json!(scan.singular_pairs());
    report["d_divisible_on_grid"] = json!(all_dec);
    report["cp_divisible_on_grid"] = json!(scan.all_cp());
    report["generator_criterion"] = json!(gen_check.pointwise_divisible);
    report["per_segment"] = Value::Array(
        gen_check
            .per_segment
            .iter()
            .map(|(t, c)| {
                json!({
                    "t_start": t,
                    "ccp": c.ccp,
                    "cc_decomposable": verdict_json(&c.cc_decomposable, false),
                })
            })
            .collect(),
    );
    report["note"] =
        json!("pointwise grid verdicts; smooth decomposability is not numerically testable");
    let code = if all_dec { EXIT_OK } else { EXIT_NEGATIVE };
    Ok((report, code))
}

// ---------------------------------------------------------------------------
// Entry point

fn dispatch(cli: &Cli) -> Result<(Value, i32, OutputFormat)> {
    let (common, result) = match &cli.command {
        Command::ClassifyMap(common) => {
            let ctx = Context::new(common)?;
            (common, cmd_classify_map(&ctx)?)
        }
        Command::DecomposeMap(common) => {
            let ctx = Context::new(common)?;
            (common, cmd_decompose_map(&ctx)?)
        }
        Command::CheckGenerator { common, picture, levels, samples } => {
            let ctx = Context::new(common)?;
            (common, cmd_check_generator(&ctx, *picture, *levels, *samples)?)
        }
        Command::Evolve { common, steps, method, scan } => {
            let ctx = Context::new(common)?;
            (common, cmd_evolve(&ctx, *steps, *method, *scan)?)
        }
        Command::CheckDivisibility { common, steps, pair_stride } => {
            let ctx = Context::new(common)?;
            (common, cmd_check_divisibility(&ctx, *steps, *pair_stride)?)
        }
    };
    Ok((result.0, result.1, common.format))
}

/// Runs the CLI against explicit arguments; returns the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version with success codes itself
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let started = std::time::Instant::now();
    match dispatch(&cli) {
        Ok((report, code, format)) => {
            print!("{}", render_report(&report, format));
            if format == OutputFormat::Human {
                eprintln!("elapsed: {:.3}s", started.elapsed().as_secs_f64());
            }
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

/// Runs the CLI against the process arguments.
pub fn run() -> i32 {
    run_from(std::env::args_os())
}
