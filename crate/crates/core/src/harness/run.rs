use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::diagnostics::{conserved, error_report, observed_order, scheme_conserved, ConservedQuantities};
use crate::error::{Error, Result};
use crate::grid::{inverse_dft, GridSpec, SpectralField};
use crate::oracle::{rk4_integrate, ReferenceCache, RK4_TRAJECTORY_TAU};
use crate::stepper::{step_count, EwiStepper, ModelParams, StepperState};

use super::config::{StudyConfig, StudyKind};

/// One measurement point of a study.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyRow {
    pub case: String,
    pub beta: f64,
    pub eps: f64,
    #[serde(rename = "M")]
    pub m: usize,
    pub tau: f64,
    pub t_final: f64,
    pub err_h1: f64,
    pub err_l2: f64,
    pub err_linf: f64,
    pub mass_drift: f64,
    pub energy_drift: f64,
    pub n_steps: u64,
    pub wall_ms: f64,
    /// Step at which the run blew up, if it did.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diverged_at: Option<u64>,
}

impl StudyRow {
    pub fn is_ok(&self) -> bool {
        self.diverged_at.is_none()
    }
}

/// Case label by horizon exponent.
pub fn case_label(beta: f64) -> String {
    match beta {
        b if b == 0.0 => "I".into(),
        b if b == 1.0 => "II".into(),
        b if b == 2.0 => "III".into(),
        b => format!("beta={b}"),
    }
}

#[derive(Debug, Clone, Copy)]
struct Point {
    beta: f64,
    eps: f64,
    m: usize,
    tau: f64,
}

/// Cache selected by the config: on disk when `cache` is set.
pub fn open_cache(cfg: &StudyConfig) -> Result<ReferenceCache> {
    match &cfg.cache {
        Some(dir) => ReferenceCache::on_disk(dir),
        None => Ok(ReferenceCache::in_memory()),
    }
}

fn diverged_row(pt: Point, t_final: f64, step: u64, wall_ms: f64) -> StudyRow {
    StudyRow {
        case: case_label(pt.beta),
        beta: pt.beta,
        eps: pt.eps,
        m: pt.m,
        tau: pt.tau,
        t_final,
        err_h1: f64::NAN,
        err_l2: f64::NAN,
        err_linf: f64::NAN,
        mass_drift: f64::NAN,
        energy_drift: f64::NAN,
        n_steps: step,
        wall_ms,
        diverged_at: Some(step),
    }
}

/// Conserved quantities at the state's level, one extra step supplying the
/// centered time difference.
fn conserved_at(
    stepper: &mut EwiStepper,
    state: &StepperState,
    psi1: &[num_complex::Complex64],
    params: &ModelParams,
) -> Result<ConservedQuantities> {
    let grid = *state.grid();
    let mut q = if state.n() == 0 {
        conserved(state.current_values(), psi1, &grid, params)?
    } else {
        let mut ahead = state.clone();
        stepper.step(&mut ahead)?;
        scheme_conserved(
            &inverse_dft(state.previous()),
            state.current_values(),
            ahead.current_values(),
            &grid,
            params,
            state.tau(),
        )?
    };
    q.t = state.t();
    Ok(q)
}

struct Measured {
    row: StudyRow,
    series: Vec<ConservedQuantities>,
}

fn measure(
    cfg: &StudyConfig,
    cache: &ReferenceCache,
    pt: Point,
    series_every: u64,
) -> Result<Measured> {
    let start = Instant::now();
    let elapsed = |s: Instant| s.elapsed().as_secs_f64() * 1e3;
    let params = cfg.params(pt.beta, pt.eps)?;
    let t_final = cfg.final_time(pt.beta, pt.eps)?;
    let grid = cfg.grid(pt.m)?;
    let (psi0, psi1) = cfg.initial_data.sample(&grid)?;
    let n_steps = step_count(t_final, pt.tau)?;

    let mut stepper = EwiStepper::for_params(&grid, &params, pt.tau)?;
    let mut state = stepper.initial_state(&psi0, &psi1)?;
    let q0 = conserved_at(&mut stepper, &state, &psi1, &params)?;
    let mut series = Vec::new();
    if series_every > 0 {
        series.push(q0);
    }
    let mut older: Option<SpectralField> = None;
    let mut series_err = None;
    let outcome = stepper
        .advance(&mut state, n_steps, |s| {
            if series_every == 0 || series_err.is_some() {
                return;
            }
            let level = s.n() - 1;
            if let (Some(old), true) = (&older, level % series_every == 0 && level > 0) {
                match scheme_conserved(
                    &inverse_dft(old),
                    &inverse_dft(s.previous()),
                    s.current_values(),
                    s.grid(),
                    &params,
                    s.tau(),
                ) {
                    Ok(mut q) => {
                        q.t = level as f64 * s.tau();
                        series.push(q);
                    }
                    Err(e) => series_err = Some(e),
                }
            }
            older = Some(s.previous().clone());
        })
        .and_then(|_| conserved_at(&mut stepper, &state, &psi1, &params));
    if let Some(e) = series_err {
        return Err(e);
    }
    let q_end = match outcome {
        Ok(q) => q,
        Err(Error::Diverged { step, .. }) => {
            return Ok(Measured {
                row: diverged_row(pt, t_final, step, elapsed(start)),
                series,
            })
        }
        Err(e) => return Err(e),
    };

    let reference = match cache.reference_at(
        &cfg.reference_grid()?,
        &params,
        &cfg.initial_data,
        cfg.ref_tau,
        t_final,
    ) {
        Ok(r) => r,
        Err(Error::Diverged { step, .. }) => {
            return Ok(Measured {
                row: diverged_row(pt, t_final, step, elapsed(start)),
                series,
            })
        }
        Err(e) => return Err(e),
    };
    let err = error_report(state.current(), &reference)?;
    let (mass_drift, energy_drift) = q_end.relative_drift(&q0);
    Ok(Measured {
        row: StudyRow {
            case: case_label(pt.beta),
            beta: pt.beta,
            eps: pt.eps,
            m: pt.m,
            tau: pt.tau,
            t_final,
            err_h1: err.h1,
            err_l2: err.l2,
            err_linf: err.linf,
            mass_drift,
            energy_drift,
            n_steps,
            wall_ms: elapsed(start),
            diverged_at: None,
        },
        series,
    })
}

fn sweep(cfg: &StudyConfig, cache: &ReferenceCache, points: Vec<Point>) -> Result<Vec<StudyRow>> {
    points
        .into_par_iter()
        .map(|pt| measure(cfg, cache, pt, 0).map(|m| m.row))
        .collect()
}

fn points(cfg: &StudyConfig) -> Vec<Point> {
    let mut out = Vec::new();
    for &beta in &cfg.betas {
        for &eps in &cfg.eps {
            for m in cfg.m_values() {
                for tau in cfg.tau_values() {
                    out.push(Point { beta, eps, m, tau });
                }
            }
        }
    }
    out
}

fn require_kind(cfg: &StudyConfig, kind: StudyKind) -> Result<()> {
    if cfg.kind != kind {
        return Err(Error::Config(format!("expected a {kind} config, got {}", cfg.kind)));
    }
    cfg.validate()
}

/// Errors against the fine reference for every `(beta, eps, M)` at fixed `tau`.
pub fn run_spatial_study(cfg: &StudyConfig, cache: &ReferenceCache) -> Result<Vec<StudyRow>> {
    require_kind(cfg, StudyKind::Spatial)?;
    sweep(cfg, cache, points(cfg))
}

/// Least-squares order in `tau` at fixed `(beta, eps)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderFit {
    pub beta: f64,
    pub eps: f64,
    pub order: f64,
}

/// `err_h1(eps) / err_h1(eps / 2)` at fixed `(beta, tau)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpsRatio {
    pub beta: f64,
    pub tau: f64,
    pub eps: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TemporalStudy {
    pub rows: Vec<StudyRow>,
    pub orders: Vec<OrderFit>,
    pub eps_ratios: Vec<EpsRatio>,
}

/// Errors for every `(beta, eps, tau)` at fixed `M`, with order fits and
/// eps-scaling ratios.
pub fn run_temporal_study(cfg: &StudyConfig, cache: &ReferenceCache) -> Result<TemporalStudy> {
    require_kind(cfg, StudyKind::Temporal)?;
    let rows = sweep(cfg, cache, points(cfg))?;
    let m = cfg.m_values()[0];
    let at = |beta: f64, eps: f64, tau: f64| {
        rows.iter()
            .find(|r| r.beta == beta && r.eps == eps && r.tau == tau && r.m == m && r.is_ok())
    };

    let mut orders = Vec::new();
    for &beta in &cfg.betas {
        for &eps in &cfg.eps {
            let pts: Vec<(f64, f64)> = cfg
                .tau_values()
                .into_iter()
                .filter_map(|tau| at(beta, eps, tau).map(|r| (tau, r.err_h1)))
                .collect();
            let order = observed_order(&pts).unwrap_or(f64::NAN);
            orders.push(OrderFit { beta, eps, order });
        }
    }

    let mut eps_ratios = Vec::new();
    for &beta in &cfg.betas {
        for tau in cfg.tau_values() {
            for &eps in &cfg.eps {
                let half = eps / 2.0;
                if let (Some(a), Some(b)) = (at(beta, eps, tau), at(beta, half, tau)) {
                    eps_ratios.push(EpsRatio {
                        beta,
                        tau,
                        eps,
                        ratio: a.err_h1 / b.err_h1,
                    });
                }
            }
        }
    }
    Ok(TemporalStudy { rows, orders, eps_ratios })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingleRun {
    pub row: StudyRow,
    /// Mass and energy every `series_every` steps, starting at `t = 0`.
    pub series: Vec<ConservedQuantities>,
}

/// One integration at the first entry of each list, with full diagnostics.
pub fn run_single(cfg: &StudyConfig, cache: &ReferenceCache) -> Result<SingleRun> {
    require_kind(cfg, StudyKind::Single)?;
    let pt = Point {
        beta: cfg.betas[0],
        eps: cfg.eps[0],
        m: cfg.m_values()[0],
        tau: cfg.tau_values()[0],
    };
    let measured = measure(cfg, cache, pt, cfg.series_every)?;
    if let Some(step) = measured.row.diverged_at {
        return Err(Error::Diverged {
            step,
            t: step as f64 * pt.tau,
        });
    }
    Ok(SingleRun {
        row: measured.row,
        series: measured.series,
    })
}

/// Fine-EWI versus RK4 at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OraclePoint {
    pub beta: f64,
    pub eps: f64,
    pub t_final: f64,
    pub h1: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub points: Vec<OraclePoint>,
    pub max_h1: f64,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.points.iter().all(|p| p.pass)
    }

    /// Fails with the worst violation, if any.
    pub fn ensure(&self) -> Result<()> {
        match self
            .points
            .iter()
            .filter(|p| !p.pass)
            .max_by(|a, b| (a.h1 / a.threshold).total_cmp(&(b.h1 / b.threshold)))
        {
            Some(p) => Err(Error::Disagreement {
                observed: p.h1,
                threshold: p.threshold,
            }),
            None => Ok(()),
        }
    }
}

/// Default agreement thresholds: linear runs are exact up to the RK4 error.
pub fn oracle_threshold(eps: f64) -> f64 {
    if eps == 0.0 {
        1e-10
    } else {
        1e-6
    }
}

/// Compares the fine EWI reference with an RK4 trajectory on the same grid.
pub fn run_oracle_check(cfg: &StudyConfig, cache: &ReferenceCache) -> Result<OracleReport> {
    require_kind(cfg, StudyKind::OracleCheck)?;
    let grid: GridSpec = cfg.reference_grid()?;
    let (psi0, psi1) = cfg.initial_data.sample(&grid)?;
    let mut tasks = Vec::new();
    for &beta in &cfg.betas {
        for &eps in &cfg.eps {
            tasks.push((beta, eps));
        }
    }
    let points = tasks
        .into_par_iter()
        .map(|(beta, eps)| {
            let params = cfg.params(beta, eps)?;
            let t_final = cfg.final_time(beta, eps)?;
            let ewi = cache.reference_at(&grid, &params, &cfg.initial_data, cfg.ref_tau, t_final)?;
            let rk4 = rk4_integrate(&grid, &params, &psi0, &psi1, RK4_TRAJECTORY_TAU, t_final)?;
            let h1 = error_report(&ewi, &rk4.u)?.h1;
            let threshold = cfg.oracle_threshold.unwrap_or_else(|| oracle_threshold(eps));
            Ok(OraclePoint {
                beta,
                eps,
                t_final,
                h1,
                threshold,
                pass: h1 <= threshold,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_h1 = points.iter().map(|p| p.h1).fold(0.0, f64::max);
    Ok(OracleReport { points, max_h1 })
}
