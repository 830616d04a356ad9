//! The EWI-FP time integrator.
//!
//! Fourier coefficients advance by
//!
//! ```text
//! u^1     = c0 u^0 + d0 v^0 + p F^0 + q G^0
//! u^{n+1} = c u^{n-1} + d u^n + p F^n + q G^n - p* F^{n-1} - q* G^{n-1}
//! ```
//!
//! where `F^n` are the interpolation coefficients of `|psi^n|^{2p} psi^n`,
//! `G^0` those of the exact time derivative of the nonlinearity at `t = 0`
//! and `G^n = (F^n - F^{n-1}) / tau` for `n >= 1`.

use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;

use crate::coefficients::CoefficientTable;
use crate::error::{param, Error, Result};
use crate::grid::{FourierTransform, GridSpec, SpectralField};

/// Physical parameters of the model and the study horizon `T / eps^beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub alpha: f64,
    pub eps: f64,
    /// Nonlinearity power `p` in `eps^{2p} |psi|^{2p} psi`.
    pub power: u32,
    /// Horizon exponent `beta`, `0 <= beta <= 2p`.
    pub beta_exp: f64,
    /// Horizon constant `T`.
    pub horizon: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            eps: 1.0,
            power: 1,
            beta_exp: 0.0,
            horizon: 1.0,
        }
    }
}

impl ModelParams {
    pub fn new(alpha: f64, eps: f64, power: u32, beta_exp: f64, horizon: f64) -> Result<Self> {
        let p = Self {
            alpha,
            eps,
            power,
            beta_exp,
            horizon,
        };
        p.validate()?;
        Ok(p)
    }

    /// `eps = 0` is allowed for linear runs, but only with `beta = 0`.
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(param("alpha", format!("must be positive, got {}", self.alpha)));
        }
        if !(0.0..=1.0).contains(&self.eps) {
            return Err(param("eps", format!("must lie in (0, 1], got {}", self.eps)));
        }
        if self.power == 0 {
            return Err(param("p", "must be a positive integer"));
        }
        if !(0.0..=2.0 * self.power as f64).contains(&self.beta_exp) {
            return Err(param(
                "beta",
                format!("must lie in [0, 2p] = [0, {}], got {}", 2 * self.power, self.beta_exp),
            ));
        }
        if self.eps == 0.0 && self.beta_exp != 0.0 {
            return Err(param("eps", "eps = 0 requires beta = 0"));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(param("T", format!("must be positive, got {}", self.horizon)));
        }
        Ok(())
    }

    /// `T / eps^beta`.
    pub fn final_time(&self) -> f64 {
        if self.beta_exp == 0.0 {
            self.horizon
        } else {
            self.horizon / self.eps.powf(self.beta_exp)
        }
    }

    pub fn strength(&self) -> f64 {
        crate::coefficients::nonlinear_strength(self.eps, self.power)
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }
}

/// Pointwise `|v|^{2p} v`. The `eps^{2p}` factor lives in the coefficients.
pub fn nonlinearity(values: &[Complex64], power: u32) -> Vec<Complex64> {
    values.iter().map(|&v| nonlinear_point(v, power)).collect()
}

#[inline]
fn nonlinear_point(v: Complex64, power: u32) -> Complex64 {
    v * v.norm_sqr().powi(power as i32)
}

/// Exact `d/dt f(psi(t))` at `t = 0` from `psi(0) = psi0`, `psi_t(0) = psi1`:
/// `(p+1) |psi0|^{2p} psi1 + p |psi0|^{2p-2} psi0^2 conj(psi1)`.
pub fn initial_g(psi0: &[Complex64], psi1: &[Complex64], power: u32) -> Result<Vec<Complex64>> {
    if psi0.len() != psi1.len() {
        return Err(Error::Length {
            expected: psi0.len(),
            got: psi1.len(),
        });
    }
    let p = power as i32;
    Ok(psi0
        .iter()
        .zip(psi1)
        .map(|(&u, &v)| {
            let r2 = u.norm_sqr();
            (p + 1) as f64 * r2.powi(p) * v + p as f64 * r2.powi(p - 1) * u * u * v.conj()
        })
        .collect())
}

/// Knobs that do not change the scheme's definition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepperConfig {
    /// Zero nonlinear coefficients with `|l| > M/3` before use. Off by default.
    pub dealias: bool,
    /// Largest admissible grid magnitude before a run is declared diverged.
    pub divergence_ceiling: f64,
}

impl Default for StepperConfig {
    fn default() -> Self {
        Self {
            dealias: false,
            divergence_ceiling: 1e6,
        }
    }
}

/// Two consecutive solution levels plus the cached nonlinear terms.
///
/// At `n = 0` the state holds the initial data and `step` performs the
/// special first step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepperState {
    n: u64,
    tau: f64,
    prev: SpectralField,
    curr: SpectralField,
    curr_values: Vec<Complex64>,
    /// Coefficients of `f(psi^{n-1})`.
    f_prev: SpectralField,
    /// Coefficients of `g(psi^{n-1})`.
    g_prev: SpectralField,
    /// `psi^n - e^{i beta^- tau} psi^{n-1}` per mode.
    w: SpectralField,
    /// Grid samples of `psi_t(0)`, consumed by the first step.
    initial_velocity: Option<Vec<Complex64>>,
}

impl StepperState {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// `n tau`, never accumulated.
    pub fn t(&self) -> f64 {
        self.n as f64 * self.tau
    }

    /// `psi^n` coefficients.
    pub fn current(&self) -> &SpectralField {
        &self.curr
    }

    /// `psi^{n-1}` coefficients (equal to `psi^0` at `n = 0`).
    pub fn previous(&self) -> &SpectralField {
        &self.prev
    }

    /// `psi^n` grid values.
    pub fn current_values(&self) -> &[Complex64] {
        &self.curr_values
    }

    pub fn grid(&self) -> &GridSpec {
        self.curr.grid()
    }

    /// Cached coefficients of `f(psi^{n-1})`.
    pub fn f_previous(&self) -> &SpectralField {
        &self.f_prev
    }

    pub fn into_current(self) -> SpectralField {
        self.curr
    }
}

/// EWI-FP integrator bound to one coefficient table.
#[derive(Debug)]
pub struct EwiStepper {
    table: Arc<CoefficientTable>,
    transform: FourierTransform,
    config: StepperConfig,
    power: u32,
    dealias_mask: Vec<bool>,
    scratch: Vec<Complex64>,
}

impl EwiStepper {
    pub fn new(table: Arc<CoefficientTable>) -> Self {
        Self::with_config(table, StepperConfig::default())
    }

    pub fn with_config(table: Arc<CoefficientTable>, config: StepperConfig) -> Self {
        let grid = *table.grid();
        let cutoff = grid.m() as f64 / 3.0;
        let dealias_mask = (0..grid.m())
            .map(|k| (grid.mode_at(k) as f64).abs() <= cutoff)
            .collect();
        Self {
            power: table.power(),
            transform: FourierTransform::new(grid),
            scratch: vec![Complex64::new(0.0, 0.0); grid.m()],
            table,
            config,
            dealias_mask,
        }
    }

    /// Builds a table for `params` at step `tau` and wraps it.
    pub fn for_params(grid: &GridSpec, params: &ModelParams, tau: f64) -> Result<Self> {
        params.validate()?;
        let table = CoefficientTable::build(grid, params.alpha, params.eps, params.power, tau)?;
        Ok(Self::new(Arc::new(table)))
    }

    pub fn table(&self) -> &CoefficientTable {
        &self.table
    }

    pub fn grid(&self) -> GridSpec {
        *self.table.grid()
    }

    pub fn tau(&self) -> f64 {
        self.table.tau()
    }

    /// State at `n = 0` from grid samples of `psi(0)` and `psi_t(0)`.
    pub fn initial_state(&mut self, psi0: &[Complex64], psi1: &[Complex64]) -> Result<StepperState> {
        let m = self.grid().m();
        for v in [psi0, psi1] {
            if v.len() != m {
                return Err(Error::Length {
                    expected: m,
                    got: v.len(),
                });
            }
        }
        let curr = self.transform.forward(psi0)?;
        let zeros = SpectralField::zeros(self.grid());
        Ok(StepperState {
            n: 0,
            tau: self.tau(),
            prev: curr.clone(),
            curr,
            curr_values: psi0.to_vec(),
            f_prev: zeros.clone(),
            g_prev: zeros.clone(),
            w: zeros,
            initial_velocity: Some(psi1.to_vec()),
        })
    }

    /// `psi^1` from the initial data.
    pub fn first_step(&mut self, psi0: &[Complex64], psi1: &[Complex64]) -> Result<StepperState> {
        let mut state = self.initial_state(psi0, psi1)?;
        self.step(&mut state)?;
        Ok(state)
    }

    fn check_state(&self, state: &StepperState) -> Result<()> {
        if *state.grid() != self.grid() || state.tau != self.tau() {
            return Err(Error::Grid(format!(
                "state (M = {}, tau = {}) does not match table (M = {}, tau = {})",
                state.grid().m(),
                state.tau,
                self.grid().m(),
                self.tau()
            )));
        }
        Ok(())
    }

    fn nonlinear_coeffs(&mut self, values: &[Complex64]) -> SpectralField {
        let power = self.power;
        for (s, &v) in self.scratch.iter_mut().zip(values) {
            *s = nonlinear_point(v, power);
        }
        let mut buf = self.scratch.clone();
        self.transform.forward_in_place(&mut buf);
        self.filter(&mut buf);
        SpectralField::from_fft_order(self.grid(), buf).expect("length matches grid")
    }

    fn filter(&self, buf: &mut [Complex64]) {
        if self.config.dealias {
            for (c, keep) in buf.iter_mut().zip(&self.dealias_mask) {
                if !keep {
                    *c = Complex64::new(0.0, 0.0);
                }
            }
        }
    }

    /// Advances `state` from `n` to `n + 1` in place.
    pub fn step(&mut self, state: &mut StepperState) -> Result<()> {
        self.check_state(state)?;
        let tau = self.tau();
        let f_curr = self.nonlinear_coeffs(&state.curr_values);

        let table = self.table.fft_order();
        let u = state.curr.as_fft_order();
        let (next, w_next, g_curr) = if let Some(psi1) = state.initial_velocity.take() {
            let mut v = psi1.clone();
            self.transform.forward_in_place(&mut v);
            let mut g = initial_g(&state.curr_values, &psi1, self.power)?;
            self.transform.forward_in_place(&mut g);
            self.filter(&mut g);
            let f0 = f_curr.as_fft_order();
            let next: Vec<Complex64> = table
                .iter()
                .enumerate()
                .map(|(k, m)| m.c0 * u[k] + m.d0 * v[k] + m.p * f0[k] + m.q * g[k])
                .collect();
            let w: Vec<Complex64> = table
                .iter()
                .enumerate()
                .map(|(k, m)| next[k] - m.e_minus * u[k])
                .collect();
            (next, w, g)
        } else {
            // u^{n+1} = c u^{n-1} + d u^n + r^n evaluated through its
            // factorization: w^{n+1} = e^+ w^n + r^n, u^{n+1} = e^- u^n + w^{n+1};
            // the three-term form loses accuracy when the two roots nearly meet
            let w = state.w.as_fft_order();
            let fm = state.f_prev.as_fft_order();
            let gm = state.g_prev.as_fft_order();
            let f = f_curr.as_fft_order();
            let g: Vec<Complex64> = f.iter().zip(fm).map(|(a, b)| (a - b) / tau).collect();
            let w_next: Vec<Complex64> = table
                .iter()
                .enumerate()
                .map(|(k, m)| {
                    m.e_plus * w[k] + m.p * f[k] + m.q * g[k] - m.p_star * fm[k] - m.q_star * gm[k]
                })
                .collect();
            let next: Vec<Complex64> = table
                .iter()
                .enumerate()
                .map(|(k, m)| m.e_minus * u[k] + w_next[k])
                .collect();
            (next, w_next, g)
        };

        let grid = self.grid();
        let next = SpectralField::from_fft_order(grid, next)?;
        let mut values = next.as_fft_order().to_vec();
        self.transform.inverse_in_place(&mut values);

        let n_next = state.n + 1;
        let ceiling = self.config.divergence_ceiling;
        let bad = !next.is_finite() || values.iter().any(|v| !(v.norm() <= ceiling));
        if bad {
            return Err(Error::Diverged {
                step: n_next,
                t: n_next as f64 * tau,
            });
        }

        state.prev = std::mem::replace(&mut state.curr, next);
        state.curr_values = values;
        state.f_prev = f_curr;
        state.g_prev = SpectralField::from_fft_order(grid, g_curr)?;
        state.w = SpectralField::from_fft_order(grid, w_next)?;
        state.n = n_next;
        Ok(())
    }

    /// Runs `n_steps` steps from `state`, calling `observer` after each.
    pub fn advance<O>(&mut self, state: &mut StepperState, n_steps: u64, mut observer: O) -> Result<()>
    where
        O: FnMut(&StepperState),
    {
        for _ in 0..n_steps {
            self.step(state)?;
            observer(state);
        }
        Ok(())
    }
}

/// Number of steps of size `tau` reaching `t_final`; rejects non-integer ratios.
pub fn step_count(t_final: f64, tau: f64) -> Result<u64> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(param("tau", format!("must be positive, got {tau}")));
    }
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(param("t_final", format!("must be non-negative, got {t_final}")));
    }
    let n = (t_final / tau).round();
    if (n * tau - t_final).abs() > 1e-9 * t_final {
        return Err(param(
            "t_final",
            format!("{t_final} is not an integer multiple of tau = {tau}"),
        ));
    }
    Ok(n as u64)
}

/// Integrates from the initial data to `t_final`.
pub fn integrate(
    grid: &GridSpec,
    params: &ModelParams,
    psi0: &[Complex64],
    psi1: &[Complex64],
    tau: f64,
    t_final: f64,
    observer: Option<&mut dyn FnMut(&StepperState)>,
) -> Result<StepperState> {
    let n_steps = step_count(t_final, tau)?;
    let mut stepper = EwiStepper::for_params(grid, params, tau)?;
    let mut state = stepper.initial_state(psi0, psi1)?;
    match observer {
        Some(obs) => stepper.advance(&mut state, n_steps, obs)?,
        None => stepper.advance(&mut state, n_steps, |_| {})?,
    }
    Ok(state)
}

/// Writes `(t, coefficients)` rows every `every` steps as CSV.
///
/// Each row is `n,t` followed by real/imag pairs in ascending `l`.
pub struct SnapshotWriter<W: Write> {
    out: W,
    every: u64,
    header_written: bool,
}

impl<W: Write> SnapshotWriter<W> {
    pub fn new(out: W, every: u64) -> Self {
        Self {
            out,
            every: every.max(1),
            header_written: false,
        }
    }

    pub fn record(&mut self, state: &StepperState) -> std::io::Result<()> {
        if !self.header_written {
            write!(self.out, "n,t")?;
            for l in state.grid().modes() {
                write!(self.out, ",re_{l},im_{l}")?;
            }
            writeln!(self.out)?;
            self.header_written = true;
        }
        if state.n() % self.every != 0 {
            return Ok(());
        }
        write!(self.out, "{},{:.17e}", state.n(), state.t())?;
        for (_, c) in state.current().modes() {
            write!(self.out, ",{:.17e},{:.17e}", c.re, c.im)?;
        }
        writeln!(self.out)
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::mode_frequencies;
    use crate::initial_data::{psi0, psi1};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn nonlinearity_values() {
        assert_eq!(nonlinearity(&[c(0.0, 0.0)], 1), vec![c(0.0, 0.0)]);
        assert_eq!(nonlinearity(&[c(2.0, 0.0)], 1), vec![c(8.0, 0.0)]);
        assert_eq!(nonlinearity(&[c(0.0, 1.0)], 2), vec![c(0.0, 1.0)]);
        let v = nonlinearity(&[c(1.0, 1.0)], 1)[0];
        assert!((v - c(2.0, 2.0)).norm() < 1e-15);
    }

    #[test]
    fn initial_g_values() {
        let z = initial_g(&[c(0.0, 0.0)], &[c(0.3, -1.0)], 3).unwrap();
        assert_eq!(z[0], c(0.0, 0.0));
        let g = initial_g(&[c(1.0, 0.0)], &[c(0.0, 1.0)], 1).unwrap();
        assert!((g[0] - c(0.0, 1.0)).norm() < 1e-15);
        assert!(initial_g(&[c(1.0, 0.0)], &[], 1).is_err());
    }

    #[test]
    fn initial_g_matches_finite_difference() {
        let x0 = -std::f64::consts::PI;
        for power in [1, 2] {
            let (u, v) = (psi0(x0) * c(1.0, 0.4), psi1(x0) * c(0.7, -0.2));
            let delta = 1e-7;
            let fd = (nonlinear_point(u + delta * v, power) - nonlinear_point(u, power)) / delta;
            let g = initial_g(&[u], &[v], power).unwrap()[0];
            assert!((g - fd).norm() <= 1e-6 * g.norm(), "p = {power}: {g} vs {fd}");
        }
    }

    #[test]
    fn zero_is_a_fixed_point() {
        let grid = GridSpec::symmetric(16).unwrap();
        let params = ModelParams::default();
        let zeros = vec![c(0.0, 0.0); 16];
        let state = integrate(&grid, &params, &zeros, &zeros, 0.01, 0.05, None).unwrap();
        assert!(state.current().as_fft_order().iter().all(|z| *z == c(0.0, 0.0)));
        assert_eq!(state.n(), 5);
    }

    #[test]
    fn linear_single_mode_matches_closed_form() {
        let grid = GridSpec::symmetric(16).unwrap();
        let params = ModelParams::default().with_eps(0.0);
        let (l, alpha, tau) = (3i64, 1.0, 0.01);
        let mu = grid.wavenumber(l);
        let (u0, v0) = (c(0.8, -0.1), c(0.2, 0.5));
        let field_u = SpectralField::single_mode(grid, l, u0).unwrap();
        let field_v = SpectralField::single_mode(grid, l, v0).unwrap();
        let psi0 = crate::grid::inverse_dft(&field_u);
        let psi1 = crate::grid::inverse_dft(&field_v);
        let f = mode_frequencies(alpha, mu).unwrap();
        let exact = |t: f64| {
            -(f.beta_minus * u0 + Complex64::i() * v0) / f.beta_gap * Complex64::from_polar(1.0, f.beta_plus * t)
                + (f.beta_plus * u0 + Complex64::i() * v0) / f.beta_gap * Complex64::from_polar(1.0, f.beta_minus * t)
        };
        let mut stepper = EwiStepper::for_params(&grid, &params, tau).unwrap();
        let mut state = stepper.initial_state(&psi0, &psi1).unwrap();
        for n in 1..=3 {
            stepper.step(&mut state).unwrap();
            let got = state.current().coeff(l);
            assert!((got - exact(n as f64 * tau)).norm() < 1e-10, "n = {n}");
            for (k, z) in state.current().modes() {
                if k != l {
                    assert!(z.norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn t_final_zero_and_one_step() {
        let grid = GridSpec::symmetric(16).unwrap();
        let params = ModelParams::default();
        let p0 = grid.sample(|x| c(psi0(x), 0.0));
        let p1 = grid.sample(|x| c(psi1(x), 0.0));
        let mut calls = 0;
        let mut obs = |_: &StepperState| calls += 1;
        let s0 = integrate(&grid, &params, &p0, &p1, 0.01, 0.0, Some(&mut obs)).unwrap();
        assert_eq!(calls, 0);
        assert_eq!(s0.n(), 0);
        assert_eq!(s0.current_values(), &p0[..]);

        let s1 = integrate(&grid, &params, &p0, &p1, 0.01, 0.01, None).unwrap();
        let mut stepper = EwiStepper::for_params(&grid, &params, 0.01).unwrap();
        let direct = stepper.first_step(&p0, &p1).unwrap();
        assert_eq!(s1, direct);
    }

    #[test]
    fn step_count_consistency() {
        assert_eq!(step_count(1.0, 5e-4).unwrap(), 2000);
        assert_eq!(step_count(256.0, 5e-4).unwrap(), 512_000);
        assert_eq!(step_count(0.0, 0.1).unwrap(), 0);
        assert!(step_count(1.0, 0.3).is_err());
    }

    #[test]
    fn time_is_not_accumulated() {
        let grid = GridSpec::symmetric(8).unwrap();
        let params = ModelParams::default();
        let zeros = vec![c(0.0, 0.0); 8];
        let s = integrate(&grid, &params, &zeros, &zeros, 0.1, 1.0, None).unwrap();
        assert_eq!(s.t(), 10.0 * 0.1);
    }

    #[test]
    fn divergence_is_reported() {
        let grid = GridSpec::symmetric(8).unwrap();
        let table = CoefficientTable::build(&grid, 1.0, 1.0, 1, 0.5).unwrap();
        let mut stepper = EwiStepper::with_config(
            Arc::new(table),
            StepperConfig {
                divergence_ceiling: 50.0,
                ..Default::default()
            },
        );
        let big = vec![c(20.0, 0.0); 8];
        let mut state = stepper.initial_state(&big, &big).unwrap();
        let err = (0..100).find_map(|_| stepper.step(&mut state).err()).unwrap();
        assert!(matches!(err, Error::Diverged { step, .. } if step >= 1));
    }

    #[test]
    fn mismatched_state_is_rejected() {
        let g8 = GridSpec::symmetric(8).unwrap();
        let g16 = GridSpec::symmetric(16).unwrap();
        let params = ModelParams::default();
        let mut a = EwiStepper::for_params(&g8, &params, 0.1).unwrap();
        let mut b = EwiStepper::for_params(&g16, &params, 0.1).unwrap();
        let zeros = vec![c(0.0, 0.0); 16];
        let mut state = b.initial_state(&zeros, &zeros).unwrap();
        assert!(matches!(a.step(&mut state), Err(Error::Grid(_))));
    }

    #[test]
    fn dealias_filter_zeroes_high_modes() {
        let grid = GridSpec::symmetric(12).unwrap();
        let table = Arc::new(CoefficientTable::build(&grid, 1.0, 1.0, 1, 0.01).unwrap());
        let mut s = EwiStepper::with_config(
            table,
            StepperConfig {
                dealias: true,
                ..Default::default()
            },
        );
        let values = grid.sample(|x| c(x.cos(), x.sin()) * 1.3 + c(0.2 * (5.0 * x).cos(), 0.0));
        let f = s.nonlinear_coeffs(&values);
        for (l, z) in f.modes() {
            if l.abs() > 4 {
                assert_eq!(z, c(0.0, 0.0));
            }
        }
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(1.0, 1.0, 1, 3.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, 0.5, 2, 3.0, 1.0).is_ok());
        assert!(ModelParams::new(0.0, 1.0, 1, 0.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, 0.0, 1, 1.0, 1.0).is_err());
        let p = ModelParams::new(1.0, 0.25, 1, 2.0, 1.0).unwrap();
        assert!((p.final_time() - 16.0).abs() < 1e-12);
    }

    #[test]
    fn snapshot_writer_emits_every_k() {
        let grid = GridSpec::symmetric(8).unwrap();
        let params = ModelParams::default();
        let p0 = grid.sample(|x| c(psi0(x), 0.0));
        let p1 = grid.sample(|x| c(psi1(x), 0.0));
        let mut w = SnapshotWriter::new(Vec::new(), 2);
        let mut obs = |s: &StepperState| w.record(s).unwrap();
        integrate(&grid, &params, &p0, &p1, 0.1, 0.5, Some(&mut obs)).unwrap();
        let text = String::from_utf8(w.into_inner()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0].split(',').count(), 2 + 16);
        assert!(lines[1].starts_with("2,"));
    }
}
