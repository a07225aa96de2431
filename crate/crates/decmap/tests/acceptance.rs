//! Acceptance suite: one test per top-level criterion, each printing a
//! single PASS/FAIL line (visible with `--nocapture`; a FAIL also fails the
//! test itself).

use std::time::Instant;

use decmap::cones::{
    choi_map_choi_matrix, is_cocp, is_cp, is_decomposable, split_decomposable, DykstraConfig,
};
use decmap::dynmap::{
    default_pair_grid, divisibility_scan, dynmap_generator_check, integrate, propagator,
    DivisibilityConfig, GeneratorSchedule, IntegrationMethod, PairResult, Segment,
    SegmentGenerator,
};
use decmap::generators::{
    build_nonunital, build_standard_heisenberg, cocp_part, dissipation_function,
    dissipation_sum_of_squares, dissipative_part, nonunital_dissipation_check, ClassifyConfig,
    DecomposableGeneratorSpec, NonunitalGeneratorSpec,
};
use decmap::linalg::{
    kron, min_eigenvalue, partial_transpose, unvec, vec, ComplexMatrix, Factor, C64,
};
use decmap::qmaps::{
    apply, choi_of, compose, dual, superop_from_kraus, superop_of, transpose_map, ChoiMatrix,
    KrausFamily, SuperOperator,
};
use decmap::sample::{random_hermitian, random_matrix, random_psd, rng};
use decmap::semigroup::{
    cocp_exponential_series, default_scan_grid, scan_semigroup, semigroup_at, trotter, ScanConfig,
};

fn report(number: u32, name: &str, outcome: Result<String, String>) {
    match outcome {
        Ok(detail) => println!("criterion {number:02} {name}: PASS ({detail})"),
        Err(why) => {
            println!("criterion {number:02} {name}: FAIL ({why})");
            panic!("criterion {number:02} {name} failed: {why}");
        }
    }
}

fn re_pairing(w: &ComplexMatrix, c: &ComplexMatrix) -> f64 {
    let mut acc = 0.0;
    for i in 0..w.rows() {
        for j in 0..w.cols() {
            acc += (w[(i, j)].conj() * c[(i, j)]).re;
        }
    }
    acc
}

#[test]
fn criterion_01_conventions() {
    let run = || -> Result<String, String> {
        let started = Instant::now();
        let mut r = rng(101);
        let mut max_err = 0.0f64;
        for case in 0..200 {
            let d = 2 + case % 3;
            // vec(AXB) = (A ⊗ Bᵀ) vec(X) under row-stacking
            let a = random_matrix(&mut r, d, d);
            let x = random_matrix(&mut r, d, d);
            let b = random_matrix(&mut r, d, d);
            let lhs = vec(&a.matmul(&x).matmul(&b));
            let lhs = unvec(&lhs, d * d, 1).unwrap();
            let rhs = kron(&a, &b.transpose())
                .matmul(&unvec(&vec(&x), d * d, 1).unwrap());
            max_err = max_err.max(lhs.sub(&rhs).frobenius_norm());

            // Choi <-> superoperator round trip
            let s = SuperOperator::new(d, d, random_matrix(&mut r, d * d, d * d)).unwrap();
            let back = superop_of(&choi_of(&s));
            max_err = max_err.max(back.matrix().sub(s.matrix()).frobenius_norm());

            // dual involution
            let twice = dual(&dual(&s));
            max_err = max_err.max(twice.matrix().sub(s.matrix()).frobenius_norm());

            // partial transpose involution (both factors)
            let m = random_matrix(&mut r, d * d, d * d);
            for f in [Factor::First, Factor::Second] {
                let once = partial_transpose(&m, d, d, f).unwrap();
                let back = partial_transpose(&once, d, d, f).unwrap();
                max_err = max_err.max(back.sub(&m).frobenius_norm());
            }
        }
        let elapsed = started.elapsed().as_secs_f64();
        if max_err > 1e-11 {
            return Err(format!("max convention error {max_err:.3e} > 1e-11"));
        }
        if elapsed > 10.0 {
            return Err(format!("runtime {elapsed:.1}s > 10s"));
        }
        Ok(format!("200 cases each, max error {max_err:.3e}, {elapsed:.2}s"))
    };
    report(1, "conventions", run());
}

#[test]
fn criterion_02_cone_ground_truths() {
    let run = || -> Result<String, String> {
        let started = Instant::now();
        let cfg = DykstraConfig::default();
        let tol = 1e-9;

        // identity map on qubits: CP, not coCP
        let id = SuperOperator::identity(2);
        let c_id = choi_of(&id);
        if !is_cp(&c_id, tol).unwrap().member {
            return Err("identity not CP".into());
        }
        if is_cocp(&c_id, tol).unwrap().member {
            return Err("identity reported coCP".into());
        }

        // transpose map: coCP, not CP; Choi is SWAP with eigenvalue -1
        let tau = transpose_map(2);
        let c_tau = choi_of(&tau);
        if is_cp(&c_tau, tol).unwrap().member || !is_cocp(&c_tau, tol).unwrap().member {
            return Err("transpose cone verdicts wrong".into());
        }
        let min_eig = min_eigenvalue(c_tau.matrix()).unwrap();
        if (min_eig + 1.0).abs() > 1e-12 {
            return Err(format!("transpose Choi min eigenvalue {min_eig} != -1"));
        }

        // half identity + half transpose: decomposable with a feasible split
        let mix = id.scale_re(0.5).add(&tau.scale_re(0.5));
        let split = split_decomposable(&choi_of(&mix), &cfg)
            .map_err(|e| format!("split infeasible: {e}"))?;
        if split.residual > 1e-8 {
            return Err(format!("split residual {:.3e} > 1e-8", split.residual));
        }

        // positive indecomposable map on M3: certified witness
        let c = choi_map_choi_matrix();
        let verdict = is_decomposable(&c, &cfg).unwrap();
        if verdict.member {
            return Err("indecomposable map classified as member".into());
        }
        if verdict.iterations > 20000 {
            return Err(format!("projection used {} iterations", verdict.iterations));
        }
        let w = verdict.witness.as_ref().ok_or("no witness returned")?;
        let w_eig = min_eigenvalue(w).unwrap();
        let wg_eig =
            min_eigenvalue(&partial_transpose(w, 3, 3, Factor::Second).unwrap()).unwrap();
        let pairing = re_pairing(w, c.matrix());
        if w_eig < -1e-9 || wg_eig < -1e-9 {
            return Err(format!("witness not PPT: eigs {w_eig:.2e}, {wg_eig:.2e}"));
        }
        if pairing > -1e-6 {
            return Err(format!("witness pairing {pairing:.3e} not decisive"));
        }
        let elapsed = started.elapsed().as_secs_f64();
        if elapsed > 30.0 {
            return Err(format!("runtime {elapsed:.1}s > 30s"));
        }
        Ok(format!(
            "split residual {:.2e}, witness pairing {pairing:.3e}, {elapsed:.2}s",
            split.residual
        ))
    };
    report(2, "cone_ground_truths", run());
}

#[test]
fn criterion_03_standard_form_semigroups_decomposable() {
    let run = || -> Result<String, String> {
        let started = Instant::now();
        let cfg = ScanConfig::default();
        let grid = default_scan_grid();
        let mut worst_defect = 0.0f64;
        for d in [2usize, 3] {
            let mut r = rng(300 + d as u64);
            for case in 0..20 {
                let spec = DecomposableGeneratorSpec::random(&mut r, d, 2, 1);
                let l = build_standard_heisenberg(&spec).unwrap();
                let scan = scan_semigroup(&l, &grid, &cfg).unwrap();
                worst_defect = worst_defect.max(scan.max_unital_defect());
                if scan.max_unital_defect() > 1e-9 {
                    return Err(format!(
                        "d={d} case {case}: unital defect {:.3e}",
                        scan.max_unital_defect()
                    ));
                }
                if let Some(v) = scan.verdicts.iter().find(|v| !v.decomposable.member) {
                    return Err(format!(
                        "d={d} case {case}: exp(tL) not decomposable at t={} (margin {:.3e})",
                        v.t, v.decomposable.margin
                    ));
                }
            }
        }
        Ok(format!(
            "40 random generators x 6 times, max unital defect {worst_defect:.2e}, {:.1}s",
            started.elapsed().as_secs_f64()
        ))
    };
    report(3, "standard_form_semigroups_decomposable", run());
}

#[test]
fn criterion_04_dissipation_sum_of_squares_identity() {
    let run = || -> Result<String, String> {
        let mut r = rng(400);
        let mut max_err = 0.0f64;
        let mut min_eig = f64::INFINITY;
        for case in 0..100 {
            let d = 2 + case % 2;
            let n = 1 + case % 3;
            let spec = DecomposableGeneratorSpec::random(&mut r, d, 2, 1);
            let x = random_matrix(&mut r, n * d, n * d);
            let l1n = decmap::qmaps::extend(&dissipative_part(&spec).unwrap(), n);
            let direct = dissipation_function(&l1n, &x).unwrap();
            let sos = dissipation_sum_of_squares(&spec, &x, n).unwrap();
            max_err = max_err.max(direct.sub(&sos).frobenius_norm());
            min_eig = min_eig.min(min_eigenvalue(&direct.symmetrize()).unwrap());
        }
        if max_err > 1e-9 {
            return Err(format!("identity mismatch {max_err:.3e} > 1e-9"));
        }
        if min_eig < -1e-9 {
            return Err(format!("dissipation min eigenvalue {min_eig:.3e} < -1e-9"));
        }
        Ok(format!("100 pairs, max identity error {max_err:.2e}, min eigenvalue {min_eig:.2e}"))
    };
    report(4, "dissipation_sum_of_squares_identity", run());
}

#[test]
fn criterion_05_dissipative_generators_give_cp_subunital() {
    let run = || -> Result<String, String> {
        let mut r = rng(500);
        let tol = 1e-9;
        let mut worst = f64::INFINITY;
        for case in 0..10 {
            let d = 2 + case % 2;
            let phi: Vec<ComplexMatrix> = (0..2)
                .map(|_| random_matrix(&mut r, d, d).scale(C64::new(1.0 / d as f64, 0.0)))
                .collect();
            // the Kraus superoperator acts as X -> sum V X V†, so the image
            // of the unit is sum V V†
            let phi_unit: ComplexMatrix = phi
                .iter()
                .fold(ComplexMatrix::zeros(d, d), |acc, v| acc.add(&v.matmul(&v.dagger())));
            let k = phi_unit
                .scale(C64::new(-0.5, 0.0))
                .add(&ComplexMatrix::identity(d).scale(C64::new(-0.1, 0.0)));
            let spec = NonunitalGeneratorSpec { phi_kraus: phi, psi_kraus: vec![], k };
            let m = build_nonunital(&spec).unwrap();

            // strictly negative M(1)
            let m_unit = apply(&m, &ComplexMatrix::identity(d)).unwrap().symmetrize();
            let top = -min_eigenvalue(&m_unit.scale(C64::new(-1.0, 0.0))).unwrap();
            if top >= 0.0 {
                return Err(format!("case {case}: M(1) not strictly negative (max eig {top:.2e})"));
            }

            // sampled complete dissipation
            let check = nonunital_dissipation_check(&m, 3, 100, tol, 42 + case as u64).unwrap();
            if !check.pass {
                return Err(format!(
                    "case {case}: dissipation check failed, margin {:.3e}",
                    check.worst_margin
                ));
            }

            for t in [0.1, 0.5, 1.0] {
                let e = semigroup_at(&m, t).unwrap();
                let cp = is_cp(&choi_of(&e), tol).unwrap();
                if !cp.member {
                    return Err(format!("case {case}: exp({t}M) not CP, margin {:.3e}", cp.margin));
                }
                let gap = ComplexMatrix::identity(d)
                    .sub(&apply(&e, &ComplexMatrix::identity(d)).unwrap())
                    .symmetrize();
                let sub_margin = min_eigenvalue(&gap).unwrap();
                worst = worst.min(sub_margin);
                if sub_margin < -1e-9 {
                    return Err(format!(
                        "case {case}: exp({t}M) not subunital, margin {sub_margin:.3e}"
                    ));
                }
            }
        }
        Ok(format!("10 generators x 3 times CP and subunital, worst margin {worst:.2e}"))
    };
    report(5, "dissipative_generators_give_cp_subunital", run());
}

#[test]
fn criterion_06_parity_series_matches_exponential() {
    let run = || -> Result<String, String> {
        let mut r = rng(600);
        let cfg = DykstraConfig::default();
        let mut max_err = 0.0f64;
        for case in 0..10 {
            let d = 2 + case % 2;
            let ops: Vec<ComplexMatrix> = (0..1 + case % 2)
                .map(|_| random_matrix(&mut r, d, d).scale(C64::new(0.8 / d as f64, 0.0)))
                .collect();
            let psi = KrausFamily::cp(ops);
            let tau_psi =
                compose(&transpose_map(d), &superop_from_kraus(&psi).unwrap()).unwrap();
            for t in [0.25, 0.5, 1.0] {
                let (even, odd, _) = cocp_exponential_series(&psi, t, 20).unwrap();
                let exact = semigroup_at(&tau_psi, t).unwrap();
                let err = even.add(&odd).matrix().sub(exact.matrix()).frobenius_norm();
                max_err = max_err.max(err);
                if err > 1e-10 {
                    return Err(format!("case {case} t={t}: series error {err:.3e} > 1e-10"));
                }
                let even_eig = min_eigenvalue(choi_of(&even).matrix()).unwrap();
                if even_eig < -1e-9 {
                    return Err(format!("case {case} t={t}: even part Choi eig {even_eig:.3e}"));
                }
                let dec = is_decomposable(&choi_of(&exact), &cfg).unwrap();
                if !dec.member {
                    return Err(format!(
                        "case {case} t={t}: exponential not decomposable (margin {:.3e})",
                        dec.margin
                    ));
                }
            }
        }
        Ok(format!("10 generators x 3 times, max series error {max_err:.2e}"))
    };
    report(6, "parity_series_matches_exponential", run());
}

#[test]
fn criterion_07_trotter_first_order() {
    let run = || -> Result<String, String> {
        let mut r = rng(700);
        let mut ratios: Vec<f64> = Vec::new();
        for case in 0..10 {
            let d = 2 + case % 2;
            let l1 = dissipative_part(&DecomposableGeneratorSpec::random(&mut r, d, 2, 0))
                .unwrap();
            let l2 = cocp_part(&DecomposableGeneratorSpec::random(&mut r, d, 0, 2)).unwrap();
            let errs: Vec<f64> = [8usize, 16, 32, 64]
                .iter()
                .map(|&n| trotter(&l1, &l2, 1.0, n).unwrap().1)
                .collect();
            for w in errs.windows(2) {
                let ratio = w[0] / w[1];
                if !(1.7..=2.3).contains(&ratio) {
                    return Err(format!("case {case}: error ratio {ratio:.3} outside [1.7, 2.3]"));
                }
                ratios.push(ratio);
            }
            // commuting pair: scaled copies of the same generator
            let (_, exact_err) = trotter(&l1, &l1.scale_re(0.7), 1.0, 8).unwrap();
            if exact_err > 1e-12 {
                return Err(format!("case {case}: commuting pair error {exact_err:.3e} > 1e-12"));
            }
        }
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        Ok(format!("10 pairs, mean halving ratio {mean:.3}, commuting pairs exact"))
    };
    report(7, "trotter_first_order", run());
}

fn indecomposable_schrodinger_generator(seed: u64, d: usize) -> SuperOperator {
    let mut r = rng(seed);
    let c = ChoiMatrix::new(d, d, random_hermitian(&mut r, d * d)).unwrap();
    let phi = superop_of(&c);
    let unit = apply(&phi, &ComplexMatrix::identity(d)).unwrap().symmetrize();
    let anti = SuperOperator::left_mul(&unit)
        .add(&SuperOperator::right_mul(&unit))
        .scale_re(0.5);
    dual(&phi.sub(&anti))
}

#[test]
fn criterion_08_divisibility_consistency() {
    let run = || -> Result<String, String> {
        let div_cfg = DivisibilityConfig::default();
        let class_cfg = ClassifyConfig::default();

        // positive direction: piecewise decomposable-spec schedules
        for seed in [81u64, 82, 83] {
            let mut r = rng(seed);
            let schedule = GeneratorSchedule {
                segments: vec![
                    Segment {
                        t_start: 0.0,
                        generator: SegmentGenerator::Spec(DecomposableGeneratorSpec::random(
                            &mut r, 2, 1, 1,
                        )),
                    },
                    Segment {
                        t_start: 0.5,
                        generator: SegmentGenerator::Spec(DecomposableGeneratorSpec::random(
                            &mut r, 2, 2, 0,
                        )),
                    },
                ],
                horizon: 1.0,
            };
            let traj = integrate(&schedule, 10, IntegrationMethod::TimeSplitting).unwrap();
            let scan =
                divisibility_scan(&traj, &default_pair_grid(&traj, 2), &div_cfg).unwrap();
            let gen = dynmap_generator_check(&schedule, &class_cfg).unwrap();
            if !scan.all_decomposable() || scan.singular_pairs() > 0 {
                return Err(format!("seed {seed}: benign schedule has failing pairs"));
            }
            if !gen.pointwise_divisible {
                return Err(format!("seed {seed}: generator criterion disagrees with scan"));
            }
        }

        // negative control: second segment generated outside the
        // decomposable standard form
        let d = 3;
        let mut v = ComplexMatrix::zeros(d, d);
        v[(0, 1)] = C64::new(0.4, 0.0);
        let benign = DecomposableGeneratorSpec::new(ComplexMatrix::zeros(d, d), vec![v], vec![])
            .unwrap();
        let schedule = GeneratorSchedule {
            segments: vec![
                Segment { t_start: 0.0, generator: SegmentGenerator::Spec(benign) },
                Segment {
                    t_start: 0.5,
                    generator: SegmentGenerator::Raw(indecomposable_schrodinger_generator(7, d)),
                },
            ],
            horizon: 1.0,
        };
        let traj = integrate(&schedule, 10, IntegrationMethod::TimeSplitting).unwrap();
        let scan = divisibility_scan(&traj, &default_pair_grid(&traj, 2), &div_cfg).unwrap();
        let gen = dynmap_generator_check(&schedule, &class_cfg).unwrap();
        if gen.pointwise_divisible {
            return Err("generator criterion missed the negative control".into());
        }
        let bad = scan
            .pairs
            .iter()
            .find_map(|p| match p {
                PairResult::Classified(vd)
                    if !vd.decomposable.member && vd.decomposable.witness.is_some() =>
                {
                    Some(vd)
                }
                _ => None,
            })
            .ok_or("no indecomposable pair with witness found")?;

        // independent re-verification of the witness
        let w = bad.decomposable.witness.as_ref().unwrap();
        let (vmap, _) = propagator(&traj, bad.t, bad.s).unwrap();
        let c = choi_of(&vmap);
        let w_eig = min_eigenvalue(w).unwrap();
        let wg_eig =
            min_eigenvalue(&partial_transpose(w, d, d, Factor::Second).unwrap()).unwrap();
        let pairing = re_pairing(w, c.matrix());
        if w_eig < -1e-9 || wg_eig < -1e-9 || pairing > -1e-6 {
            return Err(format!(
                "witness re-verification failed: eigs {w_eig:.2e}/{wg_eig:.2e}, pairing {pairing:.3e}"
            ));
        }
        Ok(format!(
            "3 benign schedules agree; negative control pair V({:.2},{:.2}) refuted, pairing {pairing:.3e}",
            bad.t, bad.s
        ))
    };
    report(8, "divisibility_consistency", run());
}

#[test]
fn criterion_09_nonunital_generators() {
    let run = || -> Result<String, String> {
        let mut r = rng(900);
        let scan_cfg = ScanConfig::default();
        let mut max_unital_defect = 0.0f64;
        for case in 0..10 {
            let d = 2 + case % 2;
            let phi: Vec<ComplexMatrix> = (0..2)
                .map(|_| random_matrix(&mut r, d, d).scale(C64::new(1.0 / d as f64, 0.0)))
                .collect();
            let psi: Vec<ComplexMatrix> =
                vec![random_matrix(&mut r, d, d).scale(C64::new(1.0 / d as f64, 0.0))];
            let h = random_hermitian(&mut r, d);
            let g: ComplexMatrix = phi
                .iter()
                .chain(psi.iter())
                .fold(ComplexMatrix::zeros(d, d), |acc, v| acc.add(&v.matmul(&v.dagger())));
            let k = h
                .scale(C64::new(0.0, 1.0))
                .add(&g.scale(C64::new(-0.5, 0.0)))
                .add(&random_psd(&mut r, d).scale(C64::new(-0.05, 0.0)));

            // the shifted dissipation inequality holds for the CP-plus-drift
            // half of the generator (the coCP half is covered by the cone
            // scan below, not by complete dissipativity)
            let cp_half = build_nonunital(&NonunitalGeneratorSpec {
                phi_kraus: phi.clone(),
                psi_kraus: vec![],
                k: k.clone(),
            })
            .unwrap();
            let check = nonunital_dissipation_check(&cp_half, 3, 100, 1e-9, 90 + case as u64)
                .unwrap();
            if !check.pass || check.worst_margin < -1e-9 {
                return Err(format!(
                    "case {case}: dissipation check failed, margin {:.3e}",
                    check.worst_margin
                ));
            }

            let full = build_nonunital(&NonunitalGeneratorSpec {
                phi_kraus: phi,
                psi_kraus: psi,
                k,
            })
            .unwrap();
            let scan = scan_semigroup(&full, &default_scan_grid(), &scan_cfg).unwrap();
            max_unital_defect = max_unital_defect.max(scan.max_unital_defect());
            if let Some(v) = scan.verdicts.iter().find(|v| !v.decomposable.member) {
                return Err(format!(
                    "case {case}: exp(tM) not decomposable at t={} (margin {:.3e})",
                    v.t, v.decomposable.margin
                ));
            }
        }
        Ok(format!(
            "10 nonunital generators pass; semigroups decomposable, max unital defect {max_unital_defect:.2e} (reported, unbounded)"
        ))
    };
    report(9, "nonunital_generators", run());
}

#[test]
fn criterion_10_cli_determinism() {
    let run = || -> Result<String, String> {
        let started = Instant::now();
        let scenarios = std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
        let maps = scenarios.join("maps.json");
        let gens = scenarios.join("generators.json");
        let sched = scenarios.join("schedule.json");
        let sched_neg = scenarios.join("schedule_negative.json");
        let maps = maps.to_str().unwrap();
        let gens = gens.to_str().unwrap();
        let sched = sched.to_str().unwrap();
        let sched_neg = sched_neg.to_str().unwrap();
        let golden: Vec<Vec<&str>> = vec![
            vec!["classify-map", maps, "--object", "amplitude_damping"],
            vec!["classify-map", maps, "--object", "transpose"],
            vec!["classify-map", maps, "--object", "choi_map"],
            vec!["decompose-map", maps, "--object", "transpose"],
            vec!["check-generator", gens, "--object", "damped_precession"],
            vec!["check-generator", gens, "--object", "driven_pump"],
            vec!["evolve", sched, "--steps", "20"],
            vec!["check-divisibility", sched, "--steps", "10", "--pair-stride", "3"],
            vec!["check-divisibility", sched_neg, "--steps", "10", "--pair-stride", "3"],
        ];
        for args in &golden {
            let full: Vec<&str> = args
                .iter()
                .copied()
                .chain(["--seed", "11", "--format", "machine"])
                .collect();
            let run_once = || {
                std::process::Command::new(env!("CARGO_BIN_EXE_decmap"))
                    .args(&full)
                    .output()
                    .expect("binary runs")
            };
            let first = run_once();
            let second = run_once();
            if first.stdout.is_empty() {
                return Err(format!("{args:?}: empty report"));
            }
            if first.stdout != second.stdout || first.status.code() != second.status.code() {
                return Err(format!("{args:?}: outputs differ between runs"));
            }
        }
        let elapsed = started.elapsed().as_secs_f64();
        if elapsed > 120.0 {
            return Err(format!("golden suite took {elapsed:.0}s > 120s"));
        }
        Ok(format!("{} commands byte-identical across runs, {elapsed:.1}s", golden.len()))
    };
    report(10, "cli_determinism", run());
}
