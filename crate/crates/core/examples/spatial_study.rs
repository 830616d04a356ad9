//! Spatial convergence at a fixed small step against a cached fine-mesh
//! reference; prints the CSV rows and the
//! per-point checks, including the benchmark comparison where one exists.

use nlsw_ewi::harness::{open_cache, run_spatial_study, write_csv, StudyConfig, StudyKind, StudySummary};
use nlsw_ewi::Result;

fn main() -> Result<()> {
    let mut cfg = StudyConfig::new(StudyKind::Spatial);
    cfg.apply_text("beta = 0, 1\neps = 1, 1/4\n")?;
    let rows = run_spatial_study(&cfg, &open_cache(&cfg)?)?;
    write_csv(&rows, std::io::stdout().lock())?;
    let summary = StudySummary::spatial(&cfg, &rows);
    for c in &summary.checks {
        println!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    Ok(())
}
