//! Scan a semigroup `t ↦ exp(tL)` for complete positivity and
//! decomposability, and cross-check against the generator-level verdict.
//!
//! Two generators are scanned:
//! - a standard-form generator with a coCP jump part: every `exp(tL)` is
//!   decomposable, although the maps leave the CP cone immediately;
//! - the dissipator of a random hermiticity-preserving map: the generator
//!   fails the conditional-cone test, and the scan finds times at which
//!   `exp(tL)` is certified indecomposable — the two verdicts agree.
//!
//! ```bash
//! cargo run --release --example semigroup_scan
//! ```

use decmap::generators::{
    build_standard_heisenberg, classify_generator, ClassifyConfig, DecomposableGeneratorSpec,
    Picture,
};
use decmap::linalg::ComplexMatrix;
use decmap::qmaps::{apply, superop_of, ChoiMatrix, SuperOperator};
use decmap::sample::{random_hermitian, rng};
use decmap::semigroup::{default_scan_grid, scan_semigroup, ScanConfig};

/// `L(a) = Φ(a) − ½{Φ(1), a}`: hermiticity-preserving and unit-annihilating
/// for any hermiticity-preserving Φ, but decomposable only for special Φ.
fn dissipator_of(phi: &SuperOperator) -> decmap::Result<SuperOperator> {
    let unit = apply(phi, &ComplexMatrix::identity(phi.dim_in()))?.symmetrize();
    let anti = SuperOperator::left_mul(&unit)
        .add(&SuperOperator::right_mul(&unit))
        .scale_re(0.5);
    Ok(phi.sub(&anti))
}

fn scan_and_print(name: &str, l: &SuperOperator) -> decmap::Result<()> {
    let class = classify_generator(l, Picture::Heisenberg, &ClassifyConfig::default())?;
    let scan = scan_semigroup(l, &default_scan_grid(), &ScanConfig::default())?;
    println!("{name}");
    println!(
        "  generator in decomposable standard form: {} (margin {:+.3e})",
        class.cc_decomposable.member, class.cc_decomposable.margin
    );
    for v in &scan.verdicts {
        println!(
            "  t = {:4.2}  CP: {:5}  decomposable: {:5} (margin {:+.3e})",
            v.t, v.cp.member, v.decomposable.member, v.decomposable.margin
        );
    }
    println!(
        "  scan agrees with generator verdict: {}\n",
        scan.all_decomposable() == class.cc_decomposable.member
    );
    Ok(())
}

fn main() -> decmap::Result<()> {
    let h = ComplexMatrix::from_real(&[&[0.0, 1.0], &[1.0, 0.0]]);
    let v = ComplexMatrix::from_real(&[&[0.0, 0.4], &[0.0, 0.0]]);
    let w = ComplexMatrix::from_real(&[&[0.0, 0.3], &[0.3, 0.0]]);
    let spec = DecomposableGeneratorSpec::new(h, vec![v], vec![w])?;
    scan_and_print("standard form with coCP jumps (qubit)", &build_standard_heisenberg(&spec)?)?;

    let mut r = rng(9);
    let choi = random_hermitian(&mut r, 9);
    let phi = superop_of(&ChoiMatrix::new(3, 3, choi)?);
    scan_and_print(
        "dissipator of a random hermiticity-preserving map (d = 3)",
        &dissipator_of(&phi)?,
    )?;
    Ok(())
}
