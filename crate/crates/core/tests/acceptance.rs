//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails.
//!
//! `ACCEPTANCE_ONLY=1,4` runs a subset.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scolb::bounds::{self, BoundInputs, RateConstants};
use scolb::ensembles::{
    self, build_ensemble, discrepancy, discrepancy_bruteforce, grid_min_value, make_instance, packing_for,
    ClassKind, ClassSpec, HardInstance, OracleKind,
};
use scolb::harness::{emit_report, fit_rate, run_sweep, Axis, RowFilter, ScheduleTemplate, SweepConfig, SweepRow};
use scolb::norms::PNorm;
use scolb::oracles::{self, OracleStream};
use scolb::solvers::{self, Geometry, Prox, SolverConfig};
use std::time::Instant;

const GRID_STEP: f64 = 1e-3;

type Criterion = (usize, &'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn convex_sweep(dims: Vec<usize>, horizons: Vec<usize>) -> SweepConfig {
    let mut cfg = SweepConfig::new(ClassSpec::convex(16, 1.0, PNorm::TWO, 0.5, 0.1, OracleKind::B));
    cfg.dims = dims;
    cfg.horizons = horizons;
    cfg.seeds = (0..50).collect();
    cfg.master_seed = 2024;
    cfg.max_vertices = 8;
    cfg.solver.prox = Some(Prox::EuclideanHalf);
    cfg
}

fn powers_of_two(lo: u32, hi: u32) -> Vec<usize> {
    (lo..=hi).map(|e| 1usize << e).collect()
}

fn slope_check(rows: &[SweepRow], axis: Axis, target: f64, tol: f64) -> (bool, String) {
    match fit_rate(rows, axis, &RowFilter::default()) {
        Ok(fit) => (
            (fit.slope - target).abs() <= tol,
            format!("slope in {axis} = {:.3} ± {:.3} (target {target} ± {tol})", fit.slope, fit.stderr),
        ),
        Err(e) => (false, format!("fit failed: {e}")),
    }
}

fn gaps(rows: &[SweepRow]) -> String {
    rows.iter()
        .map(|r| format!("{:.3e}", r.mean_gap))
        .collect::<Vec<_>>()
        .join(" ")
}

fn criterion_1() -> Outcome {
    let rows = run_sweep(&convex_sweep(vec![16], powers_of_two(8, 14))).unwrap();
    let (pass, detail) = slope_check(&rows, Axis::T, -0.5, 0.1);
    outcome(pass, format!("{detail}; gaps {}", gaps(&rows)))
}

fn criterion_2() -> Outcome {
    let rows = run_sweep(&convex_sweep(vec![4, 16, 64, 256], vec![4096])).unwrap();
    let (pass, detail) = slope_check(&rows, Axis::D, 0.5, 0.15);
    outcome(pass, format!("{detail}; gaps {}", gaps(&rows)))
}

fn criterion_3() -> Outcome {
    let p = PNorm::new(4.0).unwrap();
    let prox = solvers::recommended_prox(Geometry::Box, 16, p).unwrap();
    let mut cfg = SweepConfig::new(ClassSpec::convex(16, 1.0, p, 0.5, 0.1, OracleKind::B));
    cfg.seeds = (0..20).collect();
    cfg.master_seed = 77;
    cfg.dims = vec![16];
    cfg.horizons = powers_of_two(8, 13);
    let t_rows = run_sweep(&cfg).unwrap();
    let (t_ok, t_detail) = slope_check(&t_rows, Axis::T, -0.5, 0.1);
    cfg.dims = vec![16, 256];
    cfg.horizons = vec![4096];
    let d_rows = run_sweep(&cfg).unwrap();
    let ratio = d_rows[1].mean_gap / d_rows[0].mean_gap;
    let expected = 16f64.powf(0.75);
    let r_ok = ratio >= expected / 2.0 && ratio <= expected * 2.0;
    outcome(
        t_ok && r_ok && prox == Prox::Power(4.0 / 3.0),
        format!("prox {prox}; {t_detail}; gap(256)/gap(16) = {ratio:.2} (d^(3/4) ratio {expected:.0}, factor 2 band)"),
    )
}

fn criterion_4() -> Outcome {
    // case 1 needs (1 - th)/(1 + th) >= 2 delta
    let spec = ClassSpec::strongly_convex(16, 1.0, PNorm::ONE, 0.5, 0.1, 0.2, OracleKind::A);
    let case1 = spec.strong_interior_case();
    let compat = ensembles::check_compat(&spec).unwrap();
    let mut cfg = SweepConfig::new(spec.clone());
    cfg.horizons = powers_of_two(8, 14);
    cfg.seeds = (0..30).collect();
    cfg.master_seed = 4;
    cfg.solver.prox = Some(Prox::EuclideanHalf);
    cfg.solver.schedule = ScheduleTemplate::InverseT { lambda: None };
    let rows = run_sweep(&cfg).unwrap();
    let (pass, detail) = slope_check(&rows, Axis::T, -1.0, 0.2);
    outcome(
        pass && case1 && compat,
        format!("kappa^2 = {:.4e}, case 1 = {case1}, compat = {compat}; {detail}; gaps {}", spec.kappa_sq().unwrap(), gaps(&rows)),
    )
}

fn criterion_5() -> Outcome {
    let mut cfg = SweepConfig::new(ClassSpec::sparse(1024, 4, 1.0, 0.5, 0.1));
    cfg.dims = vec![1024];
    cfg.seeds = (0..4).collect();
    cfg.master_seed = 5;
    cfg.max_vertices = 4;
    cfg.packing_max_size = 64;
    cfg.solver.eta_scale = 4.0;
    cfg.horizons = powers_of_two(11, 15);
    let t_rows = run_sweep(&cfg).unwrap();
    let (t_ok, t_detail) = slope_check(&t_rows, Axis::T, -0.5, 0.1);
    cfg.sparsities = vec![2, 8];
    cfg.horizons = vec![4096];
    let k_rows = run_sweep(&cfg).unwrap();
    let ratio = k_rows[1].mean_gap / k_rows[0].mean_gap;
    let r_ok = (2.0..=8.0).contains(&ratio);
    outcome(
        t_ok && r_ok,
        format!("{t_detail}; gaps {}; gap(k=8)/gap(k=2) = {ratio:.2} (4 within factor 2)", gaps(&t_rows)),
    )
}

fn criterion_6() -> Outcome {
    let spec = ClassSpec::convex(16, 1.0, PNorm::TWO, 0.5, 0.1, OracleKind::B);
    let packing = packing_for(&spec, 6, Default::default()).unwrap();
    let ensemble = build_ensemble(&spec, &packing).unwrap();
    let set = solvers::FeasibleSet::Box { radius: 0.5 };
    let eta0 = solvers::default_eta0(Prox::EuclideanHalf, &set, 16, 1.0);
    let mut horizon = 1024;
    let good = loop {
        let cfg = SolverConfig::new(Prox::EuclideanHalf, set, horizon, solvers::Stepsize::InverseSqrt { eta0 });
        let res = bounds::identification_experiment(&ensemble, &cfg, 300, 60).unwrap();
        if res.mean_opt_gap <= res.psi_over_9 || horizon >= 1 << 20 {
            break res;
        }
        horizon *= 2;
    };
    let cfg = SolverConfig::new(Prox::EuclideanHalf, set, 1, solvers::Stepsize::InverseSqrt { eta0 });
    let hopeless = bounds::identification_experiment(&ensemble, &cfg, 300, 61).unwrap();
    let fano = bounds::fano_bound(&BoundInputs {
        dim: 16,
        horizon: 1,
        coins_per_round: 16,
        delta: 0.1,
        sparsity: None,
        constants: RateConstants::default(),
    });
    let good_ok = good.mean_opt_gap <= good.psi_over_9 && good.empirical_error_rate <= 1.0 / 3.0 + 0.07;
    let bad_ok = hopeless.empirical_error_rate >= fano - 0.07;
    outcome(
        good_ok && bad_ok,
        format!(
            "T={}: gap {:.3e} <= psi/9 {:.3e}, error {:.3}; T=1: error {:.3} vs fano {:.3}",
            good.horizon,
            good.mean_opt_gap,
            good.psi_over_9,
            good.empirical_error_rate,
            hopeless.empirical_error_rate,
            fano
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let kl_ok = (0..1000).all(|_| {
        let d: f64 = rng.random_range(f64::MIN_POSITIVE..=0.25);
        bounds::bernoulli_kl(d).unwrap() <= 16.0 * d * d
    });
    let fano = bounds::fano_bound(&BoundInputs {
        dim: 1000,
        horizon: 100,
        coins_per_round: 1,
        delta: 0.05,
        sparsity: None,
        constants: RateConstants::default(),
    });
    let lecam = bounds::lecam_bound(8, 0.1).unwrap();
    outcome(
        kl_ok && (fano - 0.9514).abs() <= 1e-4 && (lecam - 0.2).abs() <= 1e-12,
        format!("kl <= 16 delta^2 on 1000 draws: {kl_ok}; fano = {fano:.6}; lecam = {lecam:.15}"),
    )
}

fn random_spec(rng: &mut ChaCha8Rng, kind: ClassKind, dim: usize) -> ClassSpec {
    let l = rng.random_range(0.5..2.0);
    let r = rng.random_range(0.25..1.0);
    let delta = rng.random_range(0.01..=0.25);
    match kind {
        ClassKind::ConvexLipschitz => {
            let oracle = if rng.random_bool(0.5) { OracleKind::A } else { OracleKind::B };
            ClassSpec::convex(dim, l, PNorm::new(rng.random_range(1.0..6.0)).unwrap(), r, delta, oracle)
        }
        ClassKind::StronglyConvex => {
            let (p, oracle) = if rng.random_bool(0.5) {
                (PNorm::ONE, OracleKind::A)
            } else {
                (PNorm::new(rng.random_range(2.5..6.0)).unwrap(), OracleKind::B)
            };
            ClassSpec::strongly_convex(dim, l, p, r, delta, rng.random_range(0.0..0.9), oracle)
        }
        ClassKind::SparseOpt => ClassSpec::sparse(dim, 1, l, r, delta),
    }
}

fn random_vertex(rng: &mut ChaCha8Rng, spec: &ClassSpec) -> Vec<i8> {
    let sign = |rng: &mut ChaCha8Rng| if rng.random_bool(0.5) { 1 } else { -1 };
    match spec.kind {
        ClassKind::SparseOpt => {
            let mut v = vec![0i8; spec.dim];
            for i in rand::seq::index::sample(rng, spec.dim, spec.sparsity) {
                v[i] = sign(rng);
            }
            v
        }
        _ => (0..spec.dim).map(|_| sign(rng)).collect(),
    }
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut checked = 0;
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for kind in [ClassKind::ConvexLipschitz, ClassKind::StronglyConvex, ClassKind::SparseOpt] {
        for dim in 1..=3 {
            if kind == ClassKind::SparseOpt && dim < 2 {
                continue;
            }
            for _ in 0..20 {
                let spec = random_spec(&mut rng, kind, dim);
                let a = make_instance(&spec, &random_vertex(&mut rng, &spec)).unwrap();
                let b = make_instance(&spec, &random_vertex(&mut rng, &spec)).unwrap();
                let tol = 2.0 * 2.0 * spec.lipschitz * GRID_STEP;
                let analytic = discrepancy(&a, &b).unwrap().analytic;
                let brute = discrepancy_bruteforce(&a, &b, GRID_STEP).unwrap();
                let min_err = |g: &HardInstance| (grid_min_value(g, GRID_STEP).unwrap() - g.min_value()).abs();
                let errs = [(analytic - brute).abs(), min_err(&a), min_err(&b)];
                for e in errs {
                    worst = worst.max(e / tol);
                }
                if errs.iter().any(|&e| e > tol) {
                    failures.push(format!("{kind} d={dim}: errors {errs:?} tol {tol:.2e}"));
                }
                checked += 1;
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{checked} draws (sparse needs d >= 2), worst error / tolerance = {worst:.3}{}",
            if failures.is_empty() { String::new() } else { format!("; {}", failures.join("; ")) }
        ),
    )
}

fn criterion_9() -> Outcome {
    let specs = [
        ClassSpec::convex(8, 1.0, PNorm::TWO, 0.5, 0.2, OracleKind::A),
        ClassSpec::convex(8, 1.0, PNorm::new(3.0).unwrap(), 0.5, 0.2, OracleKind::B),
        ClassSpec::strongly_convex(8, 1.0, PNorm::ONE, 0.5, 0.2, 0.2, OracleKind::A),
        ClassSpec::strongly_convex(8, 1.0, PNorm::new(4.0).unwrap(), 0.5, 0.2, 0.2, OracleKind::B),
        ClassSpec::sparse(8, 2, 1.0, 0.5, 0.2),
    ];
    let mut lines = Vec::new();
    let mut all = true;
    for (i, spec) in specs.iter().enumerate() {
        let packing = packing_for(spec, 9, Default::default()).unwrap();
        let inst = make_instance(spec, &packing.vertices()[0]).unwrap();
        let rep = oracles::self_test(&inst, 90 + i as u64, 100_000).unwrap();
        // hard bound on every answer of a separate 1e5-query stream
        let mut stream = OracleStream::new(&inst, 900 + i as u64);
        let bound = oracles::per_sample_norm_bound(&inst);
        let mut hard_ok = bound <= spec.lipschitz * (1.0 + 1e-12);
        for _ in 0..100_000 {
            let a = oracles::FirstOrderOracle::query(&mut stream, &rep.point).unwrap();
            hard_ok &= spec.p.norm(&a.gradient_estimate) <= bound * (1.0 + 1e-12);
        }
        all &= rep.pass && hard_ok;
        lines.push(format!(
            "{}/{}: bias {} ({:.1} sigma), E|g|^2 = {:.3} <= 1.05 L^2, hard bound {}",
            spec.kind,
            spec.oracle,
            rep.bias.pass,
            rep.bias.gradient_worst_sigma,
            rep.second_moment.mean_sq_norm,
            hard_ok
        ));
    }
    outcome(all, lines.join("; "))
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let cfg = convex_sweep(vec![16], powers_of_two(8, 14));
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    emit_report(&run_sweep(&cfg).unwrap(), &[], &cfg, &a).unwrap();
    emit_report(&run_sweep(&cfg).unwrap(), &[], &cfg, &b).unwrap();
    let (x, y) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    outcome(x == y, format!("{} bytes, identical = {}", x.len(), x == y))
}

fn main() {
    let only: Option<Vec<usize>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|v| v.trim().parse().ok()).collect());
    let criteria: [Criterion; 10] = [
        (1, "convex rate in T", criterion_1),
        (2, "convex rate in d", criterion_2),
        (3, "large-p rate with mirror descent", criterion_3),
        (4, "strongly convex fast rate", criterion_4),
        (5, "sparse rate", criterion_5),
        (6, "identification reduction", criterion_6),
        (7, "information calculators", criterion_7),
        (8, "analytic vs brute force", criterion_8),
        (9, "oracle contract", criterion_9),
        (10, "determinism", criterion_10),
    ];
    let mut failed = 0;
    for (n, name, f) in criteria {
        if only.as_ref().is_some_and(|o| !o.contains(&n)) {
            continue;
        }
        let start = Instant::now();
        let o = f();
        let secs = start.elapsed().as_secs_f64();
        println!(
            "{} criterion {n} ({name}) [{secs:.1}s]: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
