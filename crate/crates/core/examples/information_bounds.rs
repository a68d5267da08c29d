//! Fano and Le Cam calculators and the rate expressions.
use scolb::bounds::{self, BoundInputs, RateConstants};
use scolb::ensembles::{ClassSpec, OracleKind};
use scolb::norms::PNorm;

fn main() -> scolb::Result<()> {
    for delta in [0.01, 0.05, 0.1, 0.25] {
        println!("kl(1/2 + {delta} || 1/2 - {delta}) = {:.5}  (16 delta^2 = {:.5})", bounds::bernoulli_kl(delta)?, 16.0 * delta * delta);
    }
    for horizon in [1, 10, 100, 1000] {
        let fano = bounds::fano_bound(&BoundInputs {
            dim: 1000,
            horizon,
            coins_per_round: 1,
            delta: 0.05,
            sparsity: None,
            constants: RateConstants::default(),
        });
        println!("T={horizon:>5}: fano {fano:.4}, lecam {:.4}", bounds::lecam_bound(horizon, 0.05)?);
    }
    let spec = ClassSpec::convex(64, 1.0, PNorm::TWO, 0.5, 0.1, OracleKind::B);
    for horizon in [10, 1000, 100_000] {
        let rate = bounds::theorem_rate(&spec, horizon, &RateConstants::default())?;
        println!("convex d=64 T={horizon}: rate {:.4e} ({})", rate.value, rate.active_term);
    }
    Ok(())
}
