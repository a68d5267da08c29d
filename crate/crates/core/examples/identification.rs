//! Optimizing well enough identifies the hidden vertex.
use scolb::bounds;
use scolb::ensembles::{build_ensemble, packing_for, ClassSpec, OracleKind};
use scolb::norms::PNorm;
use scolb::solvers::{default_eta0, FeasibleSet, Prox, SolverConfig, Stepsize};

fn main() -> scolb::Result<()> {
    let spec = ClassSpec::convex(16, 1.0, PNorm::TWO, 0.5, 0.1, OracleKind::B);
    let ensemble = build_ensemble(&spec, &packing_for(&spec, 6, Default::default())?)?;
    let set = FeasibleSet::Box { radius: 0.5 };
    let eta0 = default_eta0(Prox::EuclideanHalf, &set, 16, 1.0);
    for horizon in [1, 256, 4096, 16384] {
        let cfg = SolverConfig::new(Prox::EuclideanHalf, set, horizon, Stepsize::InverseSqrt { eta0 });
        let res = bounds::identification_experiment(&ensemble, &cfg, 100, 1)?;
        println!(
            "T={horizon:>6}: mean gap {:.3e} (psi/9 = {:.3e}), error rate {:.2}, fallbacks {}",
            res.mean_opt_gap, res.psi_over_9, res.empirical_error_rate, res.fallbacks
        );
    }
    Ok(())
}
