use std::io::Write;

use serde::Serialize;

use super::config::{StudyConfig, StudyKind};
use super::run::{EpsRatio, OracleReport, OrderFit, StudyRow, TemporalStudy};
use crate::initial_data::InitialData;
use crate::oracle::{REFERENCE_M, REFERENCE_TAU};

/// Fixed CSV header of every study.
pub const CSV_HEADER: &str = "case,beta,eps,M,tau,t_final,err_h1,err_l2,err_linf,mass_drift,energy_drift,n_steps,wall_ms";

/// Benchmark H1 errors of the default spatial study at `t = 1 / eps^beta`,
/// indexed `[beta][eps][M]` with `beta in {0, 1, 2}`,
/// `eps in {1, 1/2, 1/4, 1/8, 1/16}` and `M in {8, 16, 32, 64}`.
pub const SPATIAL_BENCHMARK: [[[f64; 4]; 5]; 3] = [
    [
        [1.81e-1, 5.69e-3, 8.84e-5, 7.01e-10],
        [1.28e-1, 6.57e-3, 5.95e-5, 6.43e-10],
        [1.08e-1, 7.53e-3, 5.27e-5, 6.34e-10],
        [1.04e-1, 7.74e-3, 5.10e-5, 6.29e-10],
        [1.02e-1, 7.79e-3, 5.05e-5, 6.27e-10],
    ],
    [
        [1.81e-1, 5.69e-3, 8.84e-5, 7.01e-10],
        [1.28e-1, 7.39e-3, 3.28e-5, 1.22e-10],
        [8.86e-2, 1.05e-2, 3.89e-5, 2.29e-10],
        [3.94e-2, 1.20e-2, 6.05e-5, 5.17e-10],
        [7.66e-2, 6.84e-3, 6.42e-6, 4.07e-10],
    ],
    [
        [1.81e-1, 5.69e-3, 8.84e-5, 7.01e-10],
        [8.70e-2, 1.22e-2, 5.04e-5, 2.50e-10],
        [8.60e-2, 8.43e-3, 9.12e-6, 4.10e-10],
        [1.04e-1, 4.64e-3, 3.43e-5, 5.74e-10],
        [1.15e-1, 1.14e-2, 5.78e-5, 2.81e-10],
    ],
];

/// Benchmark value for a default-study point, if it is one.
pub fn spatial_benchmark(beta: f64, eps: f64, m: usize) -> Option<f64> {
    let b = [0.0, 1.0, 2.0].iter().position(|&x| x == beta)?;
    let e = [1.0, 0.5, 0.25, 0.125, 0.0625].iter().position(|&x| x == eps)?;
    let k = [8, 16, 32, 64].iter().position(|&x| x == m)?;
    Some(SPATIAL_BENCHMARK[b][e][k])
}

/// Benchmark rule: 10% relative above `1e-6`, within a factor 10 below.
pub fn benchmark_matches(observed: f64, expected: f64) -> bool {
    if expected >= 1e-6 {
        ((observed - expected) / expected).abs() <= 0.1
    } else {
        observed > 0.0 && (observed / expected).log10().abs() <= 1.0
    }
}

/// Expected window for `err(eps) / err(eps / 2)` at fixed `tau`.
pub fn eps_ratio_window(beta: f64) -> Option<(f64, f64)> {
    match beta {
        b if b == 0.0 => Some((3.0, 5.3)),
        b if b == 1.0 => Some((1.4, 2.8)),
        b if b == 2.0 => Some((0.6, 1.7)),
        _ => None,
    }
}

/// Accepted range of fitted temporal orders.
pub const ORDER_WINDOW: (f64, f64) = (1.7, 2.3);

/// `tau` at which eps-scaling ratios are judged.
pub const EPS_RATIO_TAU: f64 = 0.0125;

/// Smallest eps used as a ratio numerator.
pub const EPS_RATIO_MIN: f64 = 0.125;

fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "NaN".into()
    }
}

/// Writes rows under [`CSV_HEADER`], floats with 17 significant digits.
pub fn write_csv<W: Write>(rows: &[StudyRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{:.3}",
            r.case,
            fmt17(r.beta),
            fmt17(r.eps),
            r.m,
            fmt17(r.tau),
            fmt17(r.t_final),
            fmt17(r.err_h1),
            fmt17(r.err_l2),
            fmt17(r.err_linf),
            fmt17(r.mass_drift),
            fmt17(r.energy_drift),
            r.n_steps,
            r.wall_ms
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }
}

/// JSON summary written next to the CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudySummary {
    pub kind: String,
    pub rows: usize,
    pub diverged: Vec<StudyRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub orders: Vec<OrderFit>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub eps_ratios: Vec<EpsRatio>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleReport>,
    pub checks: Vec<Check>,
}

impl StudySummary {
    fn base(kind: StudyKind, rows: &[StudyRow]) -> Self {
        Self {
            kind: kind.to_string(),
            rows: rows.len(),
            diverged: rows.iter().filter(|r| !r.is_ok()).cloned().collect(),
            orders: Vec::new(),
            eps_ratios: Vec::new(),
            oracle: None,
            checks: Vec::new(),
        }
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn spatial(cfg: &StudyConfig, rows: &[StudyRow]) -> Self {
        let mut s = Self::base(StudyKind::Spatial, rows);
        let default_setup = cfg.alpha == 1.0
            && cfg.p == 1
            && cfg.horizon == 1.0
            && cfg.a == -std::f64::consts::PI
            && cfg.b == std::f64::consts::PI
            && cfg.initial_data == InitialData::Standard
            && cfg.ref_m == REFERENCE_M
            && cfg.ref_tau == REFERENCE_TAU
            && cfg.tau_values() == [REFERENCE_TAU];
        if default_setup {
            for r in rows {
                if let Some(expected) = spatial_benchmark(r.beta, r.eps, r.m) {
                    s.checks.push(Check::new(
                        format!("benchmark beta={} eps={} M={}", r.beta, r.eps, r.m),
                        r.is_ok() && benchmark_matches(r.err_h1, expected),
                        format!("err_h1 {:.3e} vs {expected:.3e}", r.err_h1),
                    ));
                }
            }
        }
        let floor = 10.0 * cfg.ref_tau * cfg.ref_tau;
        for &beta in &cfg.betas {
            for &eps in &cfg.eps {
                let mut errs: Vec<(usize, f64)> = rows
                    .iter()
                    .filter(|r| r.beta == beta && r.eps == eps && r.is_ok())
                    .map(|r| (r.m, r.err_h1))
                    .collect();
                errs.sort_by_key(|e| e.0);
                let monotone = errs.windows(2).all(|w| w[1].1 <= w[0].1 || w[0].1 <= floor);
                s.checks.push(Check::new(
                    format!("monotone in M beta={beta} eps={eps}"),
                    monotone,
                    format!("{errs:?}"),
                ));
            }
        }
        s
    }

    pub fn temporal(study: &TemporalStudy) -> Self {
        let mut s = Self::base(StudyKind::Temporal, &study.rows);
        s.orders = study.orders.clone();
        s.eps_ratios = study.eps_ratios.clone();
        for o in &study.orders {
            s.checks.push(Check::new(
                format!("order beta={} eps={}", o.beta, o.eps),
                (ORDER_WINDOW.0..=ORDER_WINDOW.1).contains(&o.order),
                format!("{:.3}", o.order),
            ));
        }
        for r in &study.eps_ratios {
            if r.tau != EPS_RATIO_TAU || r.eps < EPS_RATIO_MIN {
                continue;
            }
            if let Some((lo, hi)) = eps_ratio_window(r.beta) {
                s.checks.push(Check::new(
                    format!("eps ratio beta={} eps={}", r.beta, r.eps),
                    (lo..=hi).contains(&r.ratio),
                    format!("{:.3} in [{lo}, {hi}]", r.ratio),
                ));
            }
        }
        s
    }

    pub fn single(row: &StudyRow) -> Self {
        let mut s = Self::base(StudyKind::Single, std::slice::from_ref(row));
        let finite = [row.err_h1, row.err_l2, row.err_linf, row.mass_drift, row.energy_drift]
            .iter()
            .all(|x| x.is_finite());
        s.checks.push(Check::new("finite diagnostics", finite, ""));
        s
    }

    pub fn oracle(report: &OracleReport) -> Self {
        let mut s = Self::base(StudyKind::OracleCheck, &[]);
        for p in &report.points {
            s.checks.push(Check::new(
                format!("oracle beta={} eps={}", p.beta, p.eps),
                p.pass,
                format!("h1 {:.3e} <= {:.1e}", p.h1, p.threshold),
            ));
        }
        s.oracle = Some(report.clone());
        s
    }
}
