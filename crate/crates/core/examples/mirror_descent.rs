//! SGD and l_a mirror descent on a hard instance, with gap traces.
use scolb::ensembles::{make_instance, ClassSpec, OracleKind};
use scolb::norms::PNorm;
use scolb::oracles::OracleStream;
use scolb::solvers::{self, default_eta0, FeasibleSet, Geometry, Prox, SolverConfig, Stepsize};

fn main() -> scolb::Result<()> {
    let p = PNorm::new(4.0).expect("valid exponent");
    let spec = ClassSpec::convex(32, 1.0, p, 0.5, 0.1, OracleKind::B);
    let alpha: Vec<i8> = (0..32).map(|i| if i % 3 == 0 { -1 } else { 1 }).collect();
    let g = make_instance(&spec, &alpha)?;
    let set = FeasibleSet::Box { radius: 0.5 };
    let recommended = solvers::recommended_prox(Geometry::Box, 32, p)?;
    for prox in [Prox::EuclideanHalf, recommended] {
        let eta0 = default_eta0(prox, &set, 32, 1.0);
        let cfg = SolverConfig::new(prox, set, 4096, Stepsize::InverseSqrt { eta0 }).with_trace_every(1024);
        let run = solvers::run(&mut OracleStream::new(&g, 9), &cfg)?;
        let trace: Vec<String> = run.gap_trace.iter().map(|(t, gap)| format!("T={t}: {gap:.3e}")).collect();
        println!("{prox}: {}", trace.join(", "));
    }
    Ok(())
}
