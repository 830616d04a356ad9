//! Periodic grid, wavenumbers and the trigonometric interpolation transform.
//!
//! A grid on `(a, b)` with `M` samples carries the index set
//! `l = -M/2, ..., M/2 - 1` and the basis `exp(i mu_l (x - a))` with
//! `mu_l = 2 pi l / (b - a)`. Coefficients are stored in natural FFT order
//! (`0, 1, ..., M/2 - 1, -M/2, ..., -1`); every public accessor takes the
//! signed mode index `l`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{param, Error, Result};

/// Uniform periodic grid on `(a, b)` with an even number of samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    a: f64,
    b: f64,
    m: usize,
}

impl GridSpec {
    pub fn new(a: f64, b: f64, m: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || b <= a {
            return Err(param("b", format!("need a < b, got a = {a}, b = {b}")));
        }
        if m % 2 != 0 {
            return Err(param("M", format!("M must be even, got {m}")));
        }
        if m < 4 {
            return Err(param("M", format!("M must be at least 4, got {m}")));
        }
        Ok(Self { a, b, m })
    }

    /// The `(-pi, pi)` domain used throughout the numerical experiments.
    pub fn symmetric(m: usize) -> Result<Self> {
        Self::new(-PI, PI, m)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Number of samples, equal to the number of Fourier modes.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    /// Mesh size `h = (b - a) / M`.
    pub fn h(&self) -> f64 {
        self.length() / self.m as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        self.a + j as f64 * self.h()
    }

    /// Nodes `x_0, ..., x_{M-1}`; `x_M = b` is identified with `x_0`.
    pub fn nodes(&self) -> Vec<f64> {
        (0..self.m).map(|j| self.node(j)).collect()
    }

    pub fn min_mode(&self) -> i64 {
        -(self.m as i64 / 2)
    }

    pub fn max_mode(&self) -> i64 {
        self.m as i64 / 2 - 1
    }

    /// Signed mode indices in ascending order.
    pub fn modes(&self) -> impl Iterator<Item = i64> {
        self.min_mode()..=self.max_mode()
    }

    pub fn contains_mode(&self, l: i64) -> bool {
        (self.min_mode()..=self.max_mode()).contains(&l)
    }

    /// `mu_l = 2 pi l / (b - a)`.
    pub fn wavenumber(&self, l: i64) -> f64 {
        2.0 * PI * l as f64 / self.length()
    }

    /// Storage slot of mode `l` in FFT order.
    pub fn slot(&self, l: i64) -> usize {
        debug_assert!(self.contains_mode(l), "mode {l} outside grid of size {}", self.m);
        l.rem_euclid(self.m as i64) as usize
    }

    /// Signed mode index held in storage slot `k`.
    pub fn mode_at(&self, k: usize) -> i64 {
        if k < self.m / 2 {
            k as i64
        } else {
            k as i64 - self.m as i64
        }
    }

    /// Wavenumbers in storage (FFT) order.
    pub fn wavenumbers_fft_order(&self) -> Vec<f64> {
        (0..self.m).map(|k| self.wavenumber(self.mode_at(k))).collect()
    }

    pub fn same_domain(&self, other: &GridSpec) -> bool {
        self.a == other.a && self.b == other.b
    }

    /// Samples a function at the grid nodes.
    pub fn sample<F: Fn(f64) -> Complex64>(&self, f: F) -> Vec<Complex64> {
        (0..self.m).map(|j| f(self.node(j))).collect()
    }
}

/// Fourier coefficients of a trigonometric polynomial on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.m()],
        }
    }

    /// Wraps coefficients already laid out in FFT storage order.
    pub fn from_fft_order(grid: GridSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.m() {
            return Err(Error::Length {
                expected: grid.m(),
                got: coeffs.len(),
            });
        }
        Ok(Self { grid, coeffs })
    }

    /// Builds a field from a per-mode function `l -> coefficient`.
    pub fn from_modes<F: Fn(i64) -> Complex64>(grid: GridSpec, f: F) -> Self {
        let coeffs = (0..grid.m()).map(|k| f(grid.mode_at(k))).collect();
        Self { grid, coeffs }
    }

    /// A single Fourier mode `exp(i mu_l (x - a))` scaled by `amplitude`.
    pub fn single_mode(grid: GridSpec, l: i64, amplitude: Complex64) -> Result<Self> {
        if !grid.contains_mode(l) {
            return Err(param("l", format!("mode {l} not representable on M = {}", grid.m())));
        }
        let mut field = Self::zeros(grid);
        field.coeffs[grid.slot(l)] = amplitude;
        Ok(field)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn coeff(&self, l: i64) -> Complex64 {
        self.coeffs[self.grid.slot(l)]
    }

    pub fn set_coeff(&mut self, l: i64, value: Complex64) {
        let k = self.grid.slot(l);
        self.coeffs[k] = value;
    }

    /// Coefficients in FFT storage order.
    pub fn as_fft_order(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn as_fft_order_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_fft_order(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// `(l, coefficient)` pairs in ascending `l`.
    pub fn modes(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.grid.modes().map(move |l| (l, self.coeff(l)))
    }

    /// Coefficients in ascending `l` order.
    pub fn to_mode_order(&self) -> Vec<Complex64> {
        self.modes().map(|(_, c)| c).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Coefficient-wise difference `self - other` on the same grid.
    pub fn sub(&self, other: &SpectralField) -> Result<SpectralField> {
        if self.grid != other.grid {
            return Err(Error::Grid(format!(
                "cannot subtract field on M = {} from M = {}",
                other.grid.m(),
                self.grid.m()
            )));
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(x, y)| x - y)
            .collect();
        Ok(SpectralField {
            grid: self.grid,
            coeffs,
        })
    }

    pub fn scale(&self, s: Complex64) -> SpectralField {
        SpectralField {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Spectral derivative `d/dx` of the represented polynomial.
    pub fn derivative(&self) -> SpectralField {
        let i = Complex64::i();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| i * self.grid.wavenumber(self.grid.mode_at(k)) * c)
            .collect();
        SpectralField {
            grid: self.grid,
            coeffs,
        }
    }

    /// Embeds the polynomial in a finer grid on the same domain by zero-padding.
    pub fn pad_to(&self, m_target: usize) -> Result<SpectralField> {
        let target = GridSpec::new(self.grid.a(), self.grid.b(), m_target)?;
        self.pad_to_grid(&target)
    }

    pub fn pad_to_grid(&self, target: &GridSpec) -> Result<SpectralField> {
        if !self.grid.same_domain(target) {
            return Err(Error::Grid(format!(
                "domain ({}, {}) differs from target ({}, {})",
                self.grid.a(),
                self.grid.b(),
                target.a(),
                target.b()
            )));
        }
        if target.m() < self.grid.m() {
            return Err(param(
                "M_target",
                format!("{} is smaller than the source size {}", target.m(), self.grid.m()),
            ));
        }
        let mut out = SpectralField::zeros(*target);
        for (l, c) in self.modes() {
            out.set_coeff(l, c);
        }
        Ok(out)
    }

    /// Evaluates the trigonometric polynomial at an arbitrary point.
    pub fn evaluate(&self, x: f64) -> Complex64 {
        self.modes()
            .map(|(l, c)| c * Complex64::from_polar(1.0, self.grid.wavenumber(l) * (x - self.grid.a())))
            .sum()
    }
}

/// Planned forward/inverse transforms for one grid size.
///
/// Holds its own scratch buffer, so one instance per thread.
pub struct FourierTransform {
    grid: GridSpec,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
}

impl std::fmt::Debug for FourierTransform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FourierTransform").field("grid", &self.grid).finish()
    }
}

impl FourierTransform {
    pub fn new(grid: GridSpec) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(grid.m());
        let inverse = planner.plan_fft_inverse(grid.m());
        let len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Self {
            grid,
            forward,
            inverse,
            scratch: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// In place: grid samples become interpolation coefficients (FFT order).
    ///
    /// The basis is anchored at `x = a` and the samples start at `x_0 = a`,
    /// so `mu_l (x_j - a) = 2 pi l j / M` and no extra phase is needed.
    pub fn forward_in_place(&mut self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.grid.m());
        self.forward.process_with_scratch(buf, &mut self.scratch);
        let norm = 1.0 / self.grid.m() as f64;
        buf.iter_mut().for_each(|c| *c *= norm);
    }

    /// In place: coefficients (FFT order) become grid samples.
    pub fn inverse_in_place(&mut self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.grid.m());
        self.inverse.process_with_scratch(buf, &mut self.scratch);
    }

    pub fn forward(&mut self, samples: &[Complex64]) -> Result<SpectralField> {
        if samples.len() != self.grid.m() {
            return Err(Error::Length {
                expected: self.grid.m(),
                got: samples.len(),
            });
        }
        let mut buf = samples.to_vec();
        self.forward_in_place(&mut buf);
        SpectralField::from_fft_order(self.grid, buf)
    }

    pub fn inverse(&mut self, field: &SpectralField) -> Result<Vec<Complex64>> {
        if *field.grid() != self.grid {
            return Err(Error::Grid(format!(
                "transform planned for M = {}, field has M = {}",
                self.grid.m(),
                field.grid().m()
            )));
        }
        let mut buf = field.as_fft_order().to_vec();
        self.inverse_in_place(&mut buf);
        Ok(buf)
    }
}

/// Interpolation coefficients `(1/M) sum_j u_j exp(-i mu_l (x_j - a))`.
pub fn forward_dft(grid: &GridSpec, samples: &[Complex64]) -> Result<SpectralField> {
    FourierTransform::new(*grid).forward(samples)
}

/// Grid values `sum_l u_l exp(i mu_l (x_j - a))`.
pub fn inverse_dft(field: &SpectralField) -> Vec<Complex64> {
    let mut buf = field.as_fft_order().to_vec();
    FourierTransform::new(*field.grid()).inverse_in_place(&mut buf);
    buf
}
