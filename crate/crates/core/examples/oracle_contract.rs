//! Unbiasedness and second-moment checks for both oracle kinds.
use scolb::ensembles::{make_instance, ClassSpec, OracleKind};
use scolb::norms::PNorm;
use scolb::oracles::{self, FirstOrderOracle, OracleStream};

fn main() -> scolb::Result<()> {
    for oracle in [OracleKind::A, OracleKind::B] {
        let spec = ClassSpec::convex(8, 1.0, PNorm::TWO, 0.5, 0.2, oracle);
        let g = make_instance(&spec, &[1, -1, 1, 1, -1, -1, 1, -1])?;
        let mut stream = OracleStream::new(&g, 3);
        let x = vec![0.1; 8];
        let answer = stream.query(&x)?;
        println!("oracle {oracle}: one answer value {:.4}, gradient {:?}", answer.value_estimate, answer.gradient_estimate);
        let rep = oracles::self_test(&g, 5, 50_000)?;
        println!(
            "  bias worst {:.2} sigma, E|g|^2 = {:.4} (L^2 = 1), norm bound {:.4}, pass = {}",
            rep.bias.gradient_worst_sigma, rep.second_moment.mean_sq_norm, rep.norm_bound, rep.pass
        );
    }
    Ok(())
}
