//! A small sweep, a log-log fit and a report on disk.
use scolb::ensembles::{ClassSpec, OracleKind};
use scolb::harness::{emit_report, fit_rate, run_sweep, Axis, RowFilter, SweepConfig};
use scolb::norms::PNorm;

fn main() -> scolb::Result<()> {
    let mut cfg = SweepConfig::new(ClassSpec::convex(16, 1.0, PNorm::TWO, 0.5, 0.1, OracleKind::B));
    cfg.dims = vec![16];
    cfg.horizons = vec![256, 512, 1024, 2048, 4096];
    cfg.seeds = (0..10).collect();
    cfg.master_seed = 1;
    let rows = run_sweep(&cfg)?;
    for r in &rows {
        println!("T={:>5}: gap {:.4e} ± {:.1e}", r.horizon, r.mean_gap, r.std_gap);
    }
    let fit = fit_rate(&rows, Axis::T, &RowFilter::default())?;
    println!("slope in T: {:.3} ± {:.3}", fit.slope, fit.stderr);
    let out = std::env::temp_dir().join("scolb_rate_sweep.csv");
    let manifest = emit_report(&rows, &[fit], &cfg, &out)?;
    println!("wrote {} and {}", out.display(), manifest.display());
    Ok(())
}
