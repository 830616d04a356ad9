//! Temporal convergence on the three long-time cases: fitted orders and
//! the eps-scaling of the error at fixed step.

use nlsw_ewi::harness::{run_temporal_study, StudyConfig, StudyKind};
use nlsw_ewi::{ReferenceCache, Result};

fn main() -> Result<()> {
    let mut cfg = StudyConfig::new(StudyKind::Temporal);
    cfg.apply_text("eps = 1, 1/2, 1/4\nref_M = 64\n")?;
    let study = run_temporal_study(&cfg, &ReferenceCache::in_memory())?;
    for o in &study.orders {
        println!("beta = {} eps = {:<5} order {:.3}", o.beta, o.eps, o.order);
    }
    for r in study.eps_ratios.iter().filter(|r| r.tau == 0.0125) {
        println!("beta = {} err(eps = {})/err(eps/2) = {:.2}", r.beta, r.eps, r.ratio);
    }
    Ok(())
}
