//! Structural checks on semigroup generators in the Heisenberg picture.
//!
//! A generator built from Hamiltonian + jump operators `V` (CP side) and
//! `W` (coCP side) is checked three ways:
//! 1. the dissipation function `D(X) = L(X†X) − L(X†)X − X†L(X)` sampled at
//!    tensor-extension levels 1..3;
//! 2. the closed-form sum-of-squares identity for the same quantity,
//!    verified to agree to machine precision;
//! 3. the conditional-cone classification: is the generator a standard-form
//!    generator of a decomposable semigroup?
//!
//! ```bash
//! cargo run --release --example generator_checks
//! ```

use decmap::generators::{
    build_standard_heisenberg, classify_generator, dissipation_check, dissipation_function,
    dissipation_sum_of_squares, dissipative_part, ClassifyConfig, DecomposableGeneratorSpec,
    Picture,
};
use decmap::linalg::ComplexMatrix;
use decmap::qmaps::extend;
use decmap::sample::{random_matrix, rng};

fn main() -> decmap::Result<()> {
    let h = ComplexMatrix::from_real(&[&[0.5, 0.0], &[0.0, -0.5]]);
    let v = ComplexMatrix::from_real(&[&[0.0, 0.3], &[0.0, 0.0]]);
    let w = ComplexMatrix::from_real(&[&[0.0, 0.2], &[0.2, 0.0]]);
    let spec = DecomposableGeneratorSpec::new(h, vec![v], vec![w])?;
    let l = build_standard_heisenberg(&spec)?;

    // 1. Sampled dissipation. The coCP part deliberately breaks *complete*
    //    dissipativity: expect level 1 to pass and level ≥ 2 to go negative.
    let report = dissipation_check(&l, 3, 50, 1e-9, 7)?;
    for (level, min_eig) in report.per_level.iter().enumerate() {
        println!("level {}: min eigenvalue of D(X) over samples = {:+.4e}", level + 1, min_eig);
    }
    println!("completely dissipative up to level 3: {}\n", report.pass);

    // 2. Sum-of-squares identity for the dissipative half L₁ at level n = 3.
    let n = 3;
    let l1n = extend(&dissipative_part(&spec)?, n);
    let mut r = rng(11);
    let x = random_matrix(&mut r, n * 2, n * 2);
    let direct = dissipation_function(&l1n, &x)?;
    let sos = dissipation_sum_of_squares(&spec, &x, n)?;
    println!(
        "‖D(X) − Σ(squares)‖ = {:.3e} at level {n} (identity check)",
        direct.sub(&sos).frobenius_norm()
    );

    // 3. Conditional-cone classification.
    let class = classify_generator(&l, Picture::Heisenberg, &ClassifyConfig::default())?;
    println!("\nhermiticity preserving : {}", class.hermiticity_preserving);
    println!("annihilates the unit   : {}", class.unit_annihilating);
    println!("conditionally CP       : {} (false: the W-part is coCP, not CP)", class.ccp);
    println!(
        "standard decomposable-semigroup form : {} (margin {:+.3e})",
        class.cc_decomposable.member, class.cc_decomposable.margin
    );
    Ok(())
}
