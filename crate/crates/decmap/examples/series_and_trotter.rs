//! Two ways to build a semigroup out of pieces.
//!
//! 1. Trotter product: `(exp(tL₁/n) exp(tL₂/n))ⁿ → exp(t(L₁+L₂))`, with the
//!    error halving (up to curvature) as `n` doubles.
//! 2. Parity-split exponential of a coCP generator `τ∘ψ`: the even powers
//!    form a CP map and the odd powers a coCP map, so the partial sums give
//!    an explicit decomposable approximation with a factorial tail bound.
//!
//! ```bash
//! cargo run --release --example series_and_trotter
//! ```

use decmap::generators::{build_standard_heisenberg, cocp_part, DecomposableGeneratorSpec, dissipative_part};
use decmap::linalg::ComplexMatrix;
use decmap::qmaps::{superop_from_kraus, transpose_map, compose, KrausFamily};
use decmap::semigroup::{cocp_exponential_series, semigroup_at, trotter};

fn main() -> decmap::Result<()> {
    let h = ComplexMatrix::from_real(&[&[0.5, 0.0], &[0.0, -0.5]]);
    let v = ComplexMatrix::from_real(&[&[0.0, 0.3], &[0.0, 0.0]]);
    let w = ComplexMatrix::from_real(&[&[0.0, 0.2], &[0.2, 0.0]]);
    let spec = DecomposableGeneratorSpec::new(h, vec![v.clone()], vec![w.clone()])?;

    // --- Trotter: split L into its dissipative and coCP halves.
    let l1 = dissipative_part(&spec)?;
    let l2 = cocp_part(&spec)?;
    let t = 1.0;
    println!("Trotter error for exp(t(L₁+L₂)), t = {t}:");
    let mut prev: Option<f64> = None;
    for n in [8usize, 16, 32, 64] {
        let (_, err) = trotter(&l1, &l2, t, n)?;
        match prev {
            Some(p) => println!("  n = {n:3}: error {err:.4e}  (ratio vs previous: {:.3})", p / err),
            None => println!("  n = {n:3}: error {err:.4e}"),
        }
        prev = Some(err);
    }

    // --- Parity-split series for exp(t·τψ) with ψ the CP map from Kraus {w}.
    let psi = KrausFamily::cp(vec![w.clone()]);
    let (even_cp, odd_cocp, bound) = cocp_exponential_series(&psi, t, 12)?;
    let total = even_cp.add(&odd_cocp);
    let tau_psi = compose(&transpose_map(2), &superop_from_kraus(&psi)?)?;
    let exact = semigroup_at(&tau_psi, t)?;
    let err = total.matrix().sub(exact.matrix()).frobenius_norm();
    println!("\nparity-split series for exp(t·τψ), 12 terms:");
    println!("  actual error            : {err:.3e} (floating-point floor)");
    println!("  a-priori tail bound     : {bound:.3e}");
    println!("  (even partial sum is CP, odd partial sum is coCP — the");
    println!("   approximation is decomposable by construction)");

    // The full semigroup exp(tL) stays decomposable too; show one time.
    let l = build_standard_heisenberg(&spec)?;
    let map = semigroup_at(&l, t)?;
    let verdict = decmap::cones::is_decomposable(
        &decmap::qmaps::choi_of(&map),
        &decmap::cones::DykstraConfig::default(),
    )?;
    println!("\nexp(tL) at t = {t} decomposable: {} (margin {:+.3e})", verdict.member, verdict.margin);
    Ok(())
}
