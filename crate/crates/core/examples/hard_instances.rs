//! The three hard ensembles: minimizers, separation and a grid cross-check.
use scolb::ensembles::{
    build_ensemble, discrepancy_checked, packing_for, separation_psi, ClassSpec, OracleKind,
};
use scolb::norms::PNorm;

fn main() -> scolb::Result<()> {
    let specs = [
        ClassSpec::convex(3, 1.0, PNorm::TWO, 0.5, 0.1, OracleKind::B),
        ClassSpec::strongly_convex(3, 1.0, PNorm::ONE, 0.5, 0.1, 0.2, OracleKind::A),
        ClassSpec::sparse(3, 1, 1.0, 0.5, 0.1),
    ];
    for spec in specs {
        let packing = packing_for(&spec, 1, Default::default())?;
        let ensemble = build_ensemble(&spec, &packing)?;
        println!("{} ({} instances), psi = {:.4e}", spec.kind, ensemble.len(), separation_psi(&ensemble)?);
        let g = &ensemble[0];
        println!("  alpha {:?} -> x* {:?}, g(x*) = {:.5}", g.alpha(), g.minimizer(), g.min_value());
        if ensemble.len() > 1 {
            let rep = discrepancy_checked(&ensemble[0], &ensemble[1], 1e-3)?;
            println!("  rho analytic {:.6e}, grid {:.6e}", rep.analytic, rep.bruteforce.unwrap_or(f64::NAN));
        }
    }
    Ok(())
}
