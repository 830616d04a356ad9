//! Cross-checks the fine-mesh EWI reference against classical RK4 on the
//! Fourier system, and shows RK4's conservation of mass and energy.

use nlsw_ewi::harness::{run_oracle_check, StudyConfig, StudyKind};
use nlsw_ewi::oracle::RK4_TRAJECTORY_TAU;
use nlsw_ewi::{rk4_integrate, GridSpec, InitialData, ModelParams, OdeState, ReferenceCache, Result};

fn main() -> Result<()> {
    let cfg = StudyConfig::new(StudyKind::OracleCheck);
    let report = run_oracle_check(&cfg, &ReferenceCache::in_memory())?;
    for p in &report.points {
        println!("eps = {:<7} H1 disagreement {:.2e}", p.eps, p.h1);
    }

    let grid = GridSpec::symmetric(64)?;
    let params = ModelParams::default();
    let (psi0, psi1) = InitialData::Standard.sample(&grid)?;
    let q0 = OdeState::from_samples(&grid, &psi0, &psi1)?.conserved(&params)?;
    let end = rk4_integrate(&grid, &params, &psi0, &psi1, RK4_TRAJECTORY_TAU, 1.0)?;
    let (dm, de) = end.conserved(&params)?.relative_drift(&q0);
    println!("RK4 relative drift at t = 1: mass {dm:.1e}, energy {de:.1e}");
    Ok(())
}
