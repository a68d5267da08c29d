use clap::{Args, Parser, Subcommand, ValueEnum};
use scolb::bounds::{self, BoundInputs, RateConstants};
use scolb::ensembles::{
    build_ensemble, discrepancy_checked, ensemble_prefactor, grid_min_value, make_instance, packing_for,
    separation_psi, ClassKind, ClassSpec, OracleKind,
};
use scolb::harness::{self, emit_report, fit_rate, parse_sweep_config, read_rows, Axis, RowFilter, SolverTemplate};
use scolb::norms::PNorm;
use scolb::oracles::{self, OracleStream};
use scolb::packing::{build_dense_packing_with, build_sparse_packing_with, verify_packing, PackingOptions};
use scolb::solvers::{self, FeasibleSet, Geometry, Prox, SolverConfig, Stepsize};
use scolb::{Error, Result};
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "scolb", version, about = "Hard stochastic convex optimization instances and rate experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build and verify a Hamming packing.
    Packing {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        sparsity: Option<usize>,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        max_size: Option<usize>,
        /// Write vertices as CSV, one vertex per row.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Describe one hard instance.
    Instance {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long, default_value_t = 0)]
        alpha_index: usize,
        #[arg(long, default_value_t = 0)]
        packing_seed: u64,
    },
    /// Cross-check analytic minima and discrepancies against grid search.
    Verify {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long, default_value_t = 3)]
        max_dim: usize,
        #[arg(long, default_value_t = 1e-3)]
        grid_step: f64,
        #[arg(long, default_value_t = 0)]
        packing_seed: u64,
    },
    /// Run one solver against one instance.
    Run {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long, value_enum, default_value_t = SolverKind::Sgd)]
        solver: SolverKind,
        /// Exponent of the power prox; defaults to the recommended one.
        #[arg(long)]
        prox_a: Option<f64>,
        #[arg(long, value_enum, default_value_t = SetKind::Box)]
        set: SetKind,
        #[arg(long = "T")]
        horizon: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        alpha_index: usize,
        #[arg(long, default_value_t = 0)]
        packing_seed: u64,
        /// Use `1/(lambda t)` steps with lambda = kappa^2 (strong class only).
        #[arg(long)]
        inverse_t: bool,
        #[arg(long)]
        eta0: Option<f64>,
        #[arg(long, default_value_t = 1)]
        trace_every: usize,
        /// Write `t,gap` rows here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Information-theoretic calculators, the identification experiment and oracle self-tests.
    Bounds(BoundsArgs),
    /// Run a sweep described by a key = value config file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit a log-log rate to sweep results.
    Fit {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "T")]
        axis: Axis,
        /// e.g. `d=16,T=4096`
        #[arg(long, default_value = "")]
        filter: String,
        /// `axis=T target=-0.5 tol=0.1`; exits with code 2 when violated.
        #[arg(long, num_args = 1..)]
        assert_slope: Option<Vec<String>>,
    },
}

#[derive(Args, Clone)]
struct ClassArgs {
    #[arg(long, default_value = "convex")]
    class: ClassKind,
    #[arg(long, default_value_t = 16)]
    dim: usize,
    #[arg(long, default_value_t = 1.0)]
    lipschitz: f64,
    #[arg(long, default_value = "2")]
    p: PNorm,
    #[arg(long, default_value_t = 0.5)]
    radius: f64,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[arg(long, default_value_t = 0.5)]
    theta: f64,
    #[arg(long, default_value_t = 1)]
    sparsity: usize,
    #[arg(long, default_value = "B")]
    oracle: OracleKind,
}

impl ClassArgs {
    fn spec(&self) -> Result<ClassSpec> {
        let spec = ClassSpec {
            kind: self.class,
            dim: self.dim,
            lipschitz: self.lipschitz,
            p: if self.class == ClassKind::SparseOpt { PNorm::INFINITY } else { self.p },
            radius: self.radius,
            delta: self.delta,
            theta: self.theta,
            sparsity: self.sparsity,
            oracle: if self.class == ClassKind::SparseOpt { OracleKind::B } else { self.oracle },
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long, value_enum, conflicts_with_all = ["identification", "selftest_oracle"])]
    formula: Option<Formula>,
    #[arg(long, conflicts_with = "selftest_oracle")]
    identification: bool,
    #[arg(long)]
    selftest_oracle: bool,
    #[command(flatten)]
    class: ClassArgs,
    #[arg(long = "T", default_value_t = 1)]
    horizon: usize,
    /// Coins revealed per query; defaults to the oracle's.
    #[arg(long)]
    coins: Option<usize>,
    #[arg(long, default_value_t = 300)]
    trials: usize,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    packing_seed: u64,
    #[arg(long, default_value_t = 0)]
    alpha_index: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Formula {
    Fano,
    Lecam,
    SparseFano,
    Kl,
    Rate,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum SolverKind {
    Sgd,
    Mirror,
}

#[derive(Clone, Copy, ValueEnum)]
enum SetKind {
    Box,
    L2,
    Lq,
}

enum Outcome {
    Done,
    GateFailed,
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().command) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::GateFailed) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json values always serialize"));
}

fn pick_instance(spec: &ClassSpec, packing_seed: u64, index: usize) -> Result<scolb::ensembles::HardInstance> {
    let packing = packing_for(spec, packing_seed, PackingOptions::default())?;
    let alpha = packing.vertices().get(index).ok_or_else(|| {
        Error::OutOfRange(format!("alpha index {index} outside packing of size {}", packing.len()))
    })?;
    make_instance(spec, alpha)
}

fn gate(pass: bool) -> Outcome {
    if pass {
        Outcome::Done
    } else {
        Outcome::GateFailed
    }
}

fn dispatch(command: Command) -> Result<Outcome> {
    match command {
        Command::Packing {
            dim,
            sparsity,
            seed,
            max_size,
            out,
        } => {
            let mut opts = PackingOptions::default();
            if let Some(m) = max_size {
                opts.max_size = m;
            }
            let set = match sparsity {
                Some(k) => build_sparse_packing_with(dim, k, seed, opts)?,
                None => build_dense_packing_with(dim, seed, opts)?,
            };
            let report = verify_packing(&set);
            if let Some(path) = out {
                set.write_csv(&path)?;
            }
            print_json(&json!({
                "dim": set.dim(),
                "target": set.target(),
                "capped": set.capped(),
                "required_separation": set.min_separation(),
                "report": report,
            }));
            Ok(gate(report.ok))
        }
        Command::Instance {
            class,
            alpha_index,
            packing_seed,
        } => {
            let spec = class.spec()?;
            let packing = packing_for(&spec, packing_seed, PackingOptions::default())?;
            let ensemble = build_ensemble(&spec, &packing)?;
            let inst = ensemble.get(alpha_index).ok_or_else(|| {
                Error::OutOfRange(format!("alpha index {alpha_index} outside packing of size {}", ensemble.len()))
            })?;
            print_json(&json!({
                "alpha": inst.alpha(),
                "minimizer": inst.minimizer(),
                "min_value": inst.min_value(),
                "c": ensemble_prefactor(&spec)?,
                "kappa": spec.kappa_sq().map(f64::sqrt),
                "psi": separation_psi(&ensemble)?,
                "packing_size": ensemble.len(),
            }));
            Ok(Outcome::Done)
        }
        Command::Verify {
            class,
            max_dim,
            grid_step,
            packing_seed,
        } => verify(&class, max_dim, grid_step, packing_seed),
        Command::Run {
            class,
            solver,
            prox_a,
            set,
            horizon,
            seed,
            alpha_index,
            packing_seed,
            inverse_t,
            eta0,
            trace_every,
            trace,
        } => {
            let spec = class.spec()?;
            let inst = pick_instance(&spec, packing_seed, alpha_index)?;
            let (feasible, geometry) = match set {
                SetKind::Box => (
                    FeasibleSet::Box { radius: spec.radius },
                    if spec.kind == ClassKind::SparseOpt { Geometry::Sparse } else { Geometry::Box },
                ),
                SetKind::L2 => (FeasibleSet::L2Ball { radius: spec.radius }, Geometry::Dual),
                SetKind::Lq => (
                    FeasibleSet::LqBall {
                        q: spec.p.dual(),
                        radius: spec.radius,
                    },
                    Geometry::Dual,
                ),
            };
            let prox = match (solver, prox_a) {
                (SolverKind::Sgd, _) => Prox::EuclideanHalf,
                (SolverKind::Mirror, Some(a)) => Prox::power(a)?,
                (SolverKind::Mirror, None) => solvers::recommended_prox(geometry, spec.dim, spec.p)?,
            };
            let stepsize = if inverse_t {
                Stepsize::InverseT {
                    lambda: spec
                        .kappa_sq()
                        .ok_or_else(|| Error::InvalidConfig("--inverse-t needs the strong class".into()))?,
                }
            } else {
                Stepsize::InverseSqrt {
                    eta0: eta0.unwrap_or_else(|| solvers::default_eta0(prox, &feasible, spec.dim, spec.lipschitz)),
                }
            };
            let cfg = SolverConfig::new(prox, feasible, horizon, stepsize).with_trace_every(trace_every);
            let mut oracle = OracleStream::new(&inst, seed);
            let run = solvers::run(&mut oracle, &cfg)?;
            if let Some(path) = &trace {
                write_trace(path, &run.gap_trace)?;
            }
            print_json(&json!({
                "prox": prox.to_string(),
                "set": feasible.to_string(),
                "horizon": horizon,
                "final_gap": run.final_gap,
                "mean_iterate_gap": run.mean_iterate_gap,
                "queries": run.queries_used,
            }));
            Ok(Outcome::Done)
        }
        Command::Bounds(args) => run_bounds(args),
        Command::Sweep { config, out } => {
            let text = std::fs::read_to_string(&config).map_err(|e| Error::io(&config, e))?;
            let mut cfg = parse_sweep_config(&text)?;
            if let Some(o) = out {
                cfg.output_path = Some(o);
            }
            let path = cfg
                .output_path
                .clone()
                .ok_or_else(|| Error::InvalidConfig("no output path: pass --out or set 'output'".into()))?;
            let rows = harness::run_sweep(&cfg)?;
            let manifest = emit_report(&rows, &[], &cfg, &path)?;
            let failed = rows.iter().filter(|r| r.failed()).count();
            println!("{} rows ({failed} failed) -> {}", rows.len(), path.display());
            println!("manifest -> {}", manifest.display());
            Ok(Outcome::Done)
        }
        Command::Fit {
            input,
            axis,
            filter,
            assert_slope,
        } => {
            let rows = read_rows(&input)?;
            let filter: RowFilter = filter.parse().map_err(Error::InvalidConfig)?;
            let fit = fit_rate(&rows, axis, &filter)?;
            print_json(&serde_json::to_value(&fit).expect("fit serializes"));
            let Some(tokens) = assert_slope else {
                return Ok(Outcome::Done);
            };
            let (a, target, tol) = parse_assert(&tokens)?;
            let checked = if a == axis { fit } else { fit_rate(&rows, a, &filter)? };
            let ok = (checked.slope - target).abs() <= tol;
            println!(
                "{} slope in {a} = {:.4} (target {target} ± {tol})",
                if ok { "PASS" } else { "FAIL" },
                checked.slope
            );
            Ok(gate(ok))
        }
    }
}

fn parse_assert(tokens: &[String]) -> Result<(Axis, f64, f64)> {
    let bad = |m: String| Error::InvalidConfig(m);
    let (mut axis, mut target, mut tol) = (None, None, None);
    for tok in tokens.iter().flat_map(|t| t.split_whitespace()) {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| bad(format!("expected key=value in --assert-slope, got '{tok}'")))?;
        match k {
            "axis" => axis = Some(v.parse::<Axis>().map_err(bad)?),
            "target" => target = Some(v.parse::<f64>().map_err(|_| bad(format!("bad target '{v}'")))?),
            "tol" => tol = Some(v.parse::<f64>().map_err(|_| bad(format!("bad tol '{v}'")))?),
            other => return Err(bad(format!("unknown --assert-slope key '{other}'"))),
        }
    }
    match (axis, target, tol) {
        (Some(a), Some(t), Some(e)) => Ok((a, t, e)),
        _ => Err(bad("--assert-slope needs axis=, target= and tol=".into())),
    }
}

fn write_trace(path: &Path, trace: &[(usize, f64)]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t", "gap"])?;
    for (t, gap) in trace {
        w.write_record([t.to_string(), format!("{gap:.16e}")])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn verify(class: &ClassArgs, max_dim: usize, grid_step: f64, packing_seed: u64) -> Result<Outcome> {
    if max_dim == 0 || max_dim > 4 {
        return Err(Error::OutOfRange(format!("--max-dim must lie in 1..=4, got {max_dim}")));
    }
    let mut all = true;
    for dim in 1..=max_dim {
        let mut args = class.clone();
        args.dim = dim;
        let spec = match args.spec() {
            Ok(s) => s,
            Err(e) => {
                println!("skip d={dim}: {e}");
                continue;
            }
        };
        let packing = packing_for(&spec, packing_seed, PackingOptions::default())?;
        let ensemble = build_ensemble(&spec, &packing)?;
        let tol = 2.0 * 2.0 * spec.lipschitz * grid_step;
        for (i, g) in ensemble.iter().enumerate() {
            let grid = grid_min_value(g, grid_step)?;
            let ok = (grid - g.min_value()).abs() <= tol;
            all &= ok;
            println!(
                "{} d={dim} min[{i}]: analytic {:.6e} grid {grid:.6e}",
                if ok { "ok  " } else { "FAIL" },
                g.min_value()
            );
        }
        for i in 0..ensemble.len() {
            for j in i + 1..ensemble.len() {
                match discrepancy_checked(&ensemble[i], &ensemble[j], grid_step) {
                    Ok(rep) => println!(
                        "ok   d={dim} rho[{i},{j}]: analytic {:.6e} grid {:.6e}",
                        rep.analytic,
                        rep.bruteforce.unwrap_or(f64::NAN)
                    ),
                    Err(e) => {
                        all = false;
                        println!("FAIL d={dim} rho[{i},{j}]: {e}");
                    }
                }
            }
        }
    }
    Ok(gate(all))
}

fn run_bounds(args: BoundsArgs) -> Result<Outcome> {
    let spec = args.class.spec()?;
    if args.selftest_oracle {
        let inst = pick_instance(&spec, args.packing_seed, args.alpha_index)?;
        let rep = oracles::self_test(&inst, args.seed, args.samples)?;
        print_json(&json!({
            "class": spec.kind.to_string(),
            "oracle": spec.oracle.to_string(),
            "samples": args.samples,
            "bias": rep.bias,
            "second_moment": rep.second_moment,
            "norm_bound": rep.norm_bound,
            "norm_bound_holds": rep.norm_bound_holds,
            "coin_gates_pass": rep.coins.as_ref().map(|c| c.iter().all(|t| t.pass)),
            "pass": rep.pass,
        }));
        println!("{}", if rep.pass { "PASS" } else { "FAIL" });
        return Ok(gate(rep.pass));
    }
    if args.identification {
        let packing = packing_for(&spec, args.packing_seed, PackingOptions::default())?;
        let ensemble = build_ensemble(&spec, &packing)?;
        let cfg = SolverTemplate::default().build(&spec, args.horizon)?;
        let res = bounds::identification_experiment(&ensemble, &cfg, args.trials, args.seed)?;
        match &args.out {
            Some(path) => {
                let mut w = csv::Writer::from_path(path)?;
                w.serialize(&res)?;
                w.flush().map_err(|e| Error::io(path, e))?;
            }
            None => {
                let mut w = csv::Writer::from_writer(std::io::stdout());
                w.serialize(&res)?;
                w.flush().map_err(|e| Error::io(Path::new("<stdout>"), e))?;
            }
        }
        return Ok(Outcome::Done);
    }
    let formula = args
        .formula
        .ok_or_else(|| Error::InvalidConfig("pass --formula, --identification or --selftest-oracle".into()))?;
    let value = match formula {
        Formula::Kl => bounds::bernoulli_kl(spec.delta)?,
        Formula::Lecam => bounds::lecam_bound(args.horizon, spec.delta)?,
        Formula::SparseFano => bounds::sparse_fano_bound(spec.dim, spec.sparsity, args.horizon, spec.delta)?,
        Formula::Fano => bounds::fano_bound(&BoundInputs {
            dim: spec.dim,
            horizon: args.horizon,
            coins_per_round: args.coins.unwrap_or_else(|| spec.oracle.coins_per_query(spec.dim)),
            delta: spec.delta,
            sparsity: None,
            constants: RateConstants::default(),
        }),
        Formula::Rate => {
            let rate = bounds::theorem_rate(&spec, args.horizon, &RateConstants::default())?;
            for (name, v) in &rate.terms {
                println!("{name} = {v:.10e}");
            }
            println!("active = {}", rate.active_term);
            rate.value
        }
    };
    println!("{value:.10e}");
    Ok(Outcome::Done)
}
