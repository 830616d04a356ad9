//! Per-mode coefficients of the exponential wave integrator.
//!
//! Each Fourier mode of the linear part `i u' - alpha u'' - mu^2 u = 0`
//! oscillates with the two characteristic frequencies `beta^+ > 0` and
//! `beta^- <= 0`. The scheme coefficients come from integrating the
//! Duhamel kernel `exp(i beta^+ s) - exp(i beta^- s)` against a linear
//! Taylor model of the nonlinearity over one step.
//!
//! Integrals of the form `(1 - sigma(tau)) / beta` are evaluated through
//! `phi2(z) = (e^z - 1 - z) / z^2`, which stays accurate when `beta tau`
//! is small and reduces to the zero-mode expressions at `beta = 0`.

use std::collections::HashMap;
use std::io::Write;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;

use crate::error::{param, Result};
use crate::grid::GridSpec;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Characteristic frequencies of one Fourier mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeFrequencies {
    pub beta_plus: f64,
    pub beta_minus: f64,
    /// `beta^+ - beta^-`.
    pub beta_gap: f64,
}

impl ModeFrequencies {
    /// `beta^- = -2 mu^2 / (1 + sqrt(1 + 4 alpha mu^2))` avoids the
    /// cancellation in `(1 - sqrt(1 + 4 alpha mu^2)) / (2 alpha)`.
    pub fn new(alpha: f64, mu: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(param("alpha", format!("must be positive, got {alpha}")));
        }
        let root = (1.0 + 4.0 * alpha * mu * mu).sqrt();
        Ok(Self {
            beta_plus: (1.0 + root) / (2.0 * alpha),
            beta_minus: -2.0 * mu * mu / (1.0 + root),
            beta_gap: root / alpha,
        })
    }
}

/// Shorthand for [`ModeFrequencies::new`].
pub fn mode_frequencies(alpha: f64, mu: f64) -> Result<ModeFrequencies> {
    ModeFrequencies::new(alpha, mu)
}

const SINC_SWITCH: f64 = 1e-4;

/// `sin(x) / x` with `sinc(0) = 1`.
pub fn stable_sinc(x: f64) -> f64 {
    if x.abs() < SINC_SWITCH {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// `sigma(s) = exp(i beta s / 2) sinc(beta s / 2)`.
pub fn sigma(beta: f64, s: f64) -> Complex64 {
    let half = 0.5 * beta * s;
    Complex64::from_polar(stable_sinc(half), half)
}

/// `(e^{iy} - 1 - iy) / (iy)^2`, equal to `1/2` at `y = 0`.
pub(crate) fn phi2_imag(y: f64) -> Complex64 {
    if y.abs() < 0.5 {
        // sum_{k>=0} (iy)^k / (k + 2)!
        let z = I * y;
        let mut term = Complex64::new(0.5, 0.0);
        let mut sum = term;
        for k in 1..20 {
            term = term * z / (k as f64 + 2.0);
            sum += term;
        }
        sum
    } else {
        let numer = Complex64::new(-2.0 * (0.5 * y).sin().powi(2), y.sin() - y);
        numer / -(y * y)
    }
}

/// `(1 - sigma(tau)) / beta`, continuous through `beta = 0` where it is `-i tau / 2`.
pub(crate) fn one_minus_sigma_over_beta(beta: f64, tau: f64) -> Complex64 {
    -I * tau * phi2_imag(beta * tau)
}

/// Every coefficient the scheme needs for one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeCoefficients {
    pub l: i64,
    pub mu: f64,
    pub freq: ModeFrequencies,
    pub c0: Complex64,
    pub d0: Complex64,
    pub c: Complex64,
    pub d: Complex64,
    pub p: Complex64,
    pub p_star: Complex64,
    pub q: Complex64,
    pub q_star: Complex64,
    pub p_plus: Complex64,
    pub p_minus: Complex64,
    pub q_plus: Complex64,
    pub q_minus: Complex64,
    /// `e^{i beta^+ tau}` and `e^{i beta^- tau}`, the roots of
    /// `z^2 - d z - c`.
    pub e_plus: Complex64,
    pub e_minus: Complex64,
}

impl ModeCoefficients {
    pub fn compute(l: i64, mu: f64, alpha: f64, strength: f64, tau: f64) -> Result<Self> {
        let freq = ModeFrequencies::new(alpha, mu)?;
        let ModeFrequencies {
            beta_plus: bp,
            beta_minus: bm,
            beta_gap: bg,
        } = freq;
        let e_plus = Complex64::from_polar(1.0, bp * tau);
        let e_minus = Complex64::from_polar(1.0, bm * tau);
        let rot = Complex64::from_polar(1.0, tau / alpha);
        let half_rot = Complex64::from_polar(1.0, tau / (2.0 * alpha));

        let c0 = (bp * e_minus - bm * e_plus) / bg;
        let d0 = tau * half_rot * stable_sinc(0.5 * tau * bg);
        let c = -rot;
        let d = 2.0 * half_rot * (0.5 * tau * bg).cos();

        let sp = sigma(bp, tau);
        let sm = if l == 0 { Complex64::new(1.0, 0.0) } else { sigma(bm, tau) };
        let kp = I * strength * tau / (alpha * bg);
        let kq = -strength * tau / (alpha * bg);

        let p = kp * (sp - sm);
        let p_star = kp * rot * (sp.conj() - sm.conj());

        // (1 - sigma^+)/beta^+ and the beta^- counterpart
        let wp = one_minus_sigma_over_beta(bp, tau);
        let (wm, p_minus, q_minus) = if l == 0 {
            (
                -I * tau / 2.0,
                I * strength * tau / (alpha * bg),
                I * strength * tau * tau / (2.0 * alpha * bg),
            )
        } else {
            let wm = one_minus_sigma_over_beta(bm, tau);
            (wm, kp * sm.conj(), kq * wm / e_minus)
        };
        let q = kq * (wp - wm);
        let q_star = kq * rot * (wp / e_plus - wm / e_minus);
        let p_plus = kp * sp.conj();
        let q_plus = kq * wp / e_plus;

        Ok(Self {
            l,
            mu,
            freq,
            c0,
            d0,
            c,
            d,
            p,
            p_star,
            q,
            q_star,
            p_plus,
            p_minus,
            q_plus,
            q_minus,
            e_plus,
            e_minus,
        })
    }

    /// The twelve complex coefficients in CSV column order.
    pub fn values(&self) -> [Complex64; 12] {
        [
            self.c0,
            self.d0,
            self.c,
            self.d,
            self.p,
            self.p_star,
            self.q,
            self.q_star,
            self.p_plus,
            self.p_minus,
            self.q_plus,
            self.q_minus,
        ]
    }

    /// Residuals of the four split identities for `p, p*, q, q*`.
    pub fn split_residuals(&self, alpha: f64, tau: f64) -> [f64; 4] {
        let e_plus = Complex64::from_polar(1.0, self.freq.beta_plus * tau);
        let e_minus = Complex64::from_polar(1.0, self.freq.beta_minus * tau);
        let rot = Complex64::from_polar(1.0, tau / alpha);
        [
            (self.p - (e_plus * self.p_plus - e_minus * self.p_minus)).norm(),
            (self.p_star - rot * (self.p_plus - self.p_minus)).norm(),
            (self.q - (e_plus * self.q_plus - e_minus * self.q_minus)).norm(),
            (self.q_star - rot * (self.q_plus - self.q_minus)).norm(),
        ]
    }
}

pub const CSV_COLUMNS: [&str; 12] = [
    "c0", "d0", "c", "d", "p", "p_star", "q", "q_star", "p_plus", "p_minus", "q_plus", "q_minus",
];

/// Coefficients for every mode of a grid at fixed `(alpha, eps, p, tau)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    grid: GridSpec,
    alpha: f64,
    eps: f64,
    power: u32,
    tau: f64,
    /// Indexed by FFT storage slot.
    modes: Vec<ModeCoefficients>,
}

impl CoefficientTable {
    /// `eps = 0` is accepted and switches the nonlinear coefficients off.
    pub fn build(grid: &GridSpec, alpha: f64, eps: f64, power: u32, tau: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(param("alpha", format!("must be positive, got {alpha}")));
        }
        if !(0.0..=1.0).contains(&eps) {
            return Err(param("eps", format!("must lie in [0, 1], got {eps}")));
        }
        if power == 0 {
            return Err(param("p", "must be a positive integer"));
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(param("tau", format!("must be positive, got {tau}")));
        }
        let strength = nonlinear_strength(eps, power);
        let modes = (0..grid.m())
            .map(|k| {
                let l = grid.mode_at(k);
                ModeCoefficients::compute(l, grid.wavenumber(l), alpha, strength, tau)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            grid: *grid,
            alpha,
            eps,
            power,
            tau,
            modes,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn power(&self) -> u32 {
        self.power
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// `eps^{2p}`.
    pub fn strength(&self) -> f64 {
        nonlinear_strength(self.eps, self.power)
    }

    pub fn mode(&self, l: i64) -> &ModeCoefficients {
        &self.modes[self.grid.slot(l)]
    }

    /// Per-mode coefficients in FFT storage order.
    pub fn fft_order(&self) -> &[ModeCoefficients] {
        &self.modes
    }

    /// Modes in ascending `l`.
    pub fn iter(&self) -> impl Iterator<Item = &ModeCoefficients> {
        self.grid.modes().map(move |l| self.mode(l))
    }

    pub fn matches(&self, grid: &GridSpec, alpha: f64, eps: f64, power: u32, tau: f64) -> bool {
        self.grid == *grid
            && self.alpha == alpha
            && self.eps == eps
            && self.power == power
            && self.tau == tau
    }

    /// Largest residual of each split identity over all modes.
    pub fn split_residuals(&self) -> [f64; 4] {
        let mut worst = [0.0f64; 4];
        for m in &self.modes {
            for (w, r) in worst.iter_mut().zip(m.split_residuals(self.alpha, self.tau)) {
                *w = w.max(r);
            }
        }
        worst
    }

    pub fn verify_bounds(&self) -> BoundsReport {
        let s = self.strength();
        let tau = self.tau;
        let ratio = |v: f64, scale: f64| if scale > 0.0 { v / scale } else { 0.0 };
        let mut r = BoundsReport::default();
        for m in &self.modes {
            r.max_c_modulus_defect = r.max_c_modulus_defect.max((m.c.norm() - 1.0).abs());
            r.max_c0 = r.max_c0.max(m.c0.norm());
            r.max_d = r.max_d.max(m.d.norm());
            r.max_d0_over_tau = r.max_d0_over_tau.max(m.d0.norm() / tau);
            r.max_d0_over_tau2 = r.max_d0_over_tau2.max(m.d0.norm() / (tau * tau));
            let pmax = m.p.norm().max(m.p_star.norm());
            let pmax_split = m.p_plus.norm().max(m.p_minus.norm());
            let qmax = m.q.norm().max(m.q_star.norm());
            let qmax_split = m.q_plus.norm().max(m.q_minus.norm());
            r.max_p_ratio = r.max_p_ratio.max(ratio(pmax, s * tau));
            r.max_q_ratio = r.max_q_ratio.max(ratio(qmax, s * tau * tau));
            r.max_p_split_ratio = r.max_p_split_ratio.max(ratio(pmax_split, s * tau));
            r.max_q_split_ratio = r.max_q_split_ratio.max(ratio(qmax_split, s * tau * tau));
        }
        r
    }

    /// Writes `l, mu, beta_plus, beta_minus` then real/imag pairs of all twelve coefficients.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        write!(out, "l,mu,beta_plus,beta_minus")?;
        for name in CSV_COLUMNS {
            write!(out, ",{name}_re,{name}_im")?;
        }
        writeln!(out)?;
        for m in self.iter() {
            write!(
                out,
                "{},{:.17e},{:.17e},{:.17e}",
                m.l, m.mu, m.freq.beta_plus, m.freq.beta_minus
            )?;
            for v in m.values() {
                write!(out, ",{:.17e},{:.17e}", v.re, v.im)?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Shorthand for [`CoefficientTable::build`].
pub fn build_table(grid: &GridSpec, alpha: f64, eps: f64, power: u32, tau: f64) -> Result<CoefficientTable> {
    CoefficientTable::build(grid, alpha, eps, power, tau)
}

pub fn nonlinear_strength(eps: f64, power: u32) -> f64 {
    eps.powi(2 * power as i32)
}

/// Magnitudes of the coefficients relative to their expected scaling.
///
/// `d0` is reported against `tau`: its modulus is `tau |sinc(beta tau / 2)|`,
/// so the quadratic bound quoted for it is not attainable mode by mode.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BoundsReport {
    pub max_c_modulus_defect: f64,
    pub max_c0: f64,
    pub max_d: f64,
    pub max_d0_over_tau: f64,
    pub max_d0_over_tau2: f64,
    /// `max(|p_l|, |p_l^*|) / (eps^{2p} tau)`.
    pub max_p_ratio: f64,
    /// `max(|q_l|, |q_l^*|) / (eps^{2p} tau^2)`.
    pub max_q_ratio: f64,
    pub max_p_split_ratio: f64,
    pub max_q_split_ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct TableKey {
    a: u64,
    b: u64,
    m: usize,
    alpha: u64,
    eps: u64,
    power: u32,
    tau: u64,
}

/// Shared cache of immutable tables keyed by `(grid, alpha, eps, p, tau)`.
#[derive(Debug, Default)]
pub struct TableCache {
    tables: Mutex<HashMap<TableKey, Arc<CoefficientTable>>>,
}

impl TableCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, grid: &GridSpec, alpha: f64, eps: f64, power: u32, tau: f64) -> Result<Arc<CoefficientTable>> {
        let key = TableKey {
            a: grid.a().to_bits(),
            b: grid.b().to_bits(),
            m: grid.m(),
            alpha: alpha.to_bits(),
            eps: eps.to_bits(),
            power,
            tau: tau.to_bits(),
        };
        if let Some(t) = self.tables.lock().expect("table cache poisoned").get(&key) {
            return Ok(Arc::clone(t));
        }
        let table = Arc::new(CoefficientTable::build(grid, alpha, eps, power, tau)?);
        let mut map = self.tables.lock().expect("table cache poisoned");
        Ok(Arc::clone(map.entry(key).or_insert(table)))
    }

    pub fn len(&self) -> usize {
        self.tables.lock().expect("table cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
