//! Independent reference solutions.
//!
//! Two routes: classical RK4 on the Fourier-space system
//! `alpha u'' = i u' - mu^2 u - eps^{2p} F(u)` written as a first-order
//! system in `(u, v = u')`, and the fine-mesh EWI-FP run used as the
//! reference in the convergence studies. Fine-EWI references can be cached
//! on disk.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::diagnostics::{conserved, ConservedQuantities};
use crate::error::{Error, Result};
use crate::grid::{FourierTransform, GridSpec, SpectralField};
use crate::initial_data::InitialData;
use crate::stepper::{step_count, EwiStepper, ModelParams, StepperConfig};

/// Default reference step of the fine EWI run.
pub const REFERENCE_TAU: f64 = 5e-4;
/// Default reference resolution on `(-pi, pi)`, i.e. `h = pi / 64`.
pub const REFERENCE_M: usize = 128;
/// RK4 step for trajectory checks.
pub const RK4_TRAJECTORY_TAU: f64 = 1e-4;
/// RK4 step for single-step checks.
pub const RK4_SINGLE_STEP_TAU: f64 = 1e-5;

/// Fourier coefficients of `psi` and `psi_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeState {
    pub u: SpectralField,
    pub v: SpectralField,
    pub t: f64,
}

impl OdeState {
    pub fn from_samples(grid: &GridSpec, psi0: &[Complex64], psi1: &[Complex64]) -> Result<Self> {
        let mut fft = FourierTransform::new(*grid);
        Ok(Self {
            u: fft.forward(psi0)?,
            v: fft.forward(psi1)?,
            t: 0.0,
        })
    }

    /// Mass and energy using `v` as the exact time derivative.
    pub fn conserved(&self, params: &ModelParams) -> Result<ConservedQuantities> {
        let mut fft = FourierTransform::new(*self.u.grid());
        let psi = fft.inverse(&self.u)?;
        let dpsi = fft.inverse(&self.v)?;
        let mut q = conserved(&psi, &dpsi, self.u.grid(), params)?;
        q.t = self.t;
        Ok(q)
    }
}

/// Right-hand side of the first-order Fourier system.
pub struct OdeSystem {
    alpha: f64,
    strength: f64,
    power: u32,
    mu2: Vec<f64>,
    fft: FourierTransform,
}

impl OdeSystem {
    pub fn new(grid: &GridSpec, params: &ModelParams) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            alpha: params.alpha,
            strength: params.strength(),
            power: params.power,
            mu2: grid.wavenumbers_fft_order().iter().map(|m| m * m).collect(),
            fft: FourierTransform::new(*grid),
        })
    }

    /// `(du, dv)` in FFT storage order.
    pub fn rhs(&mut self, u: &[Complex64], v: &[Complex64], du: &mut [Complex64], dv: &mut [Complex64]) {
        du.copy_from_slice(v);
        let mut f = u.to_vec();
        if self.strength != 0.0 {
            self.fft.inverse_in_place(&mut f);
            let p = self.power as i32;
            f.iter_mut().for_each(|z| *z *= z.norm_sqr().powi(p));
            self.fft.forward_in_place(&mut f);
        }
        let i = Complex64::i();
        let inv_alpha = 1.0 / self.alpha;
        for k in 0..u.len() {
            let nl = if self.strength != 0.0 { self.strength * f[k] } else { Complex64::new(0.0, 0.0) };
            dv[k] = (i * v[k] - self.mu2[k] * u[k] - nl) * inv_alpha;
        }
    }
}

/// `(du, dv)` for `state`.
pub fn ode_rhs(state: &OdeState, params: &ModelParams) -> Result<(SpectralField, SpectralField)> {
    let grid = *state.u.grid();
    let mut sys = OdeSystem::new(&grid, params)?;
    let m = grid.m();
    let mut du = vec![Complex64::new(0.0, 0.0); m];
    let mut dv = du.clone();
    sys.rhs(state.u.as_fft_order(), state.v.as_fft_order(), &mut du, &mut dv);
    Ok((
        SpectralField::from_fft_order(grid, du)?,
        SpectralField::from_fft_order(grid, dv)?,
    ))
}

/// Classical fourth-order Runge-Kutta from `state` to `t_final`.
pub fn rk4_advance(
    state: &OdeState,
    params: &ModelParams,
    tau: f64,
    t_final: f64,
    mut observer: impl FnMut(&OdeState),
) -> Result<OdeState> {
    let n_steps = step_count(t_final - state.t, tau)?;
    let grid = *state.u.grid();
    let mut sys = OdeSystem::new(&grid, params)?;
    let m = grid.m();
    let zero = Complex64::new(0.0, 0.0);
    let mut u = state.u.as_fft_order().to_vec();
    let mut v = state.v.as_fft_order().to_vec();
    let mut k = [(); 4].map(|_| (vec![zero; m], vec![zero; m]));
    let mut tu = vec![zero; m];
    let mut tv = vec![zero; m];
    let t0 = state.t;
    let ceiling = StepperConfig::default().divergence_ceiling;

    for n in 1..=n_steps {
        for stage in 0..4 {
            let (a, src) = match stage {
                0 => (0.0, None),
                1 | 2 => (0.5 * tau, Some(stage - 1)),
                _ => (tau, Some(2)),
            };
            match src {
                None => {
                    tu.copy_from_slice(&u);
                    tv.copy_from_slice(&v);
                }
                Some(s) => {
                    for j in 0..m {
                        tu[j] = u[j] + a * k[s].0[j];
                        tv[j] = v[j] + a * k[s].1[j];
                    }
                }
            }
            let (du, dv) = &mut k[stage];
            sys.rhs(&tu, &tv, du, dv);
        }
        let w = tau / 6.0;
        for j in 0..m {
            u[j] += w * (k[0].0[j] + 2.0 * k[1].0[j] + 2.0 * k[2].0[j] + k[3].0[j]);
            v[j] += w * (k[0].1[j] + 2.0 * k[1].1[j] + 2.0 * k[2].1[j] + k[3].1[j]);
        }
        let t = t0 + n as f64 * tau;
        if u.iter().any(|z| !(z.norm() <= ceiling)) {
            return Err(Error::Diverged { step: n, t });
        }
        let snapshot = OdeState {
            u: SpectralField::from_fft_order(grid, u.clone())?,
            v: SpectralField::from_fft_order(grid, v.clone())?,
            t,
        };
        observer(&snapshot);
    }
    Ok(OdeState {
        u: SpectralField::from_fft_order(grid, u)?,
        v: SpectralField::from_fft_order(grid, v)?,
        t: t0 + n_steps as f64 * tau,
    })
}

/// RK4 trajectory of the Fourier system from grid samples of the initial data.
pub fn rk4_integrate(
    grid: &GridSpec,
    params: &ModelParams,
    psi0: &[Complex64],
    psi1: &[Complex64],
    tau: f64,
    t_final: f64,
) -> Result<OdeState> {
    let start = OdeState::from_samples(grid, psi0, psi1)?;
    rk4_advance(&start, params, tau, t_final, |_| {})
}

/// Where and how a reference solution is computed.
///
/// The horizon enters only through `t_final`, so runs with different
/// `(T, beta)` but the same final time share a reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSpec {
    pub a: f64,
    pub b: f64,
    #[serde(rename = "M_ref")]
    pub m_ref: usize,
    pub tau_ref: f64,
    pub alpha: f64,
    pub eps: f64,
    pub p: u32,
    pub t_final: f64,
    pub initial_data: String,
}

impl ReferenceSpec {
    pub fn new(grid: &GridSpec, params: &ModelParams, tau_ref: f64, data: &InitialData) -> Self {
        Self::at(grid, params, tau_ref, data, params.final_time())
    }

    pub fn at(grid: &GridSpec, params: &ModelParams, tau_ref: f64, data: &InitialData, t_final: f64) -> Self {
        Self {
            a: grid.a(),
            b: grid.b(),
            m_ref: grid.m(),
            tau_ref,
            alpha: params.alpha,
            eps: params.eps,
            p: params.power,
            t_final,
            initial_data: data.key(),
        }
    }

    /// Hex digest of the exact parameter bits.
    pub fn cache_key(&self) -> String {
        let mut h = Sha256::new();
        for x in [self.a, self.b, self.tau_ref, self.alpha, self.eps, self.t_final] {
            h.update(x.to_bits().to_le_bytes());
        }
        h.update((self.m_ref as u64).to_le_bytes());
        h.update(self.p.to_le_bytes());
        h.update(self.initial_data.as_bytes());
        hex::encode(h.finalize())[..32].to_string()
    }
}

/// Fine-grid EWI-FP solution at `T / eps^beta`.
pub fn make_reference(
    grid_fine: &GridSpec,
    params: &ModelParams,
    data: &InitialData,
    tau_ref: f64,
) -> Result<SpectralField> {
    make_reference_at(grid_fine, params, data, tau_ref, params.final_time())
}

pub fn make_reference_at(
    grid_fine: &GridSpec,
    params: &ModelParams,
    data: &InitialData,
    tau_ref: f64,
    t_final: f64,
) -> Result<SpectralField> {
    let (psi0, psi1) = data.sample(grid_fine)?;
    let n = step_count(t_final, tau_ref)?;
    let mut stepper = EwiStepper::for_params(grid_fine, params, tau_ref)?;
    let mut state = stepper.initial_state(&psi0, &psi1)?;
    stepper.advance(&mut state, n, |_| {})?;
    Ok(state.into_current())
}

#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    params: ReferenceSpec,
    created_unix: u64,
    solver_version: String,
    coefficient_order: String,
}

/// Disk-backed, process-deduplicated store of reference solutions.
///
/// Layout: `<dir>/<key>.ref` holds `M` little-endian `(re, im)` f64 pairs in
/// ascending `l`; `<dir>/<key>.json` holds the parameters.
#[derive(Debug, Default)]
pub struct ReferenceCache {
    dir: Option<PathBuf>,
    slots: Mutex<HashMap<String, Arc<Mutex<Option<SpectralField>>>>>,
}

impl ReferenceCache {
    /// Memory-only cache.
    pub fn in_memory() -> Self {
        Self::default()
    }

    pub fn on_disk(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Self {
            dir: Some(dir),
            slots: Mutex::default(),
        })
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    /// Returns the cached reference for `spec`, building it with `build` on a miss.
    pub fn get_or_build<F>(&self, spec: &ReferenceSpec, build: F) -> Result<SpectralField>
    where
        F: FnOnce() -> Result<SpectralField>,
    {
        let key = spec.cache_key();
        let slot = {
            let mut slots = self.slots.lock().expect("reference cache poisoned");
            Arc::clone(slots.entry(key.clone()).or_default())
        };
        // one builder per key; later callers wait here and reuse the result
        let mut guard = slot.lock().expect("reference slot poisoned");
        if let Some(field) = guard.as_ref() {
            return Ok(field.clone());
        }
        let grid = GridSpec::new(spec.a, spec.b, spec.m_ref)?;
        if let Some(field) = self.load(&key, spec, &grid)? {
            *guard = Some(field.clone());
            return Ok(field);
        }
        let field = build()?;
        self.store(&key, spec, &field)?;
        *guard = Some(field.clone());
        Ok(field)
    }

    /// Fine-EWI reference for `params`, through the cache.
    pub fn reference(
        &self,
        grid_fine: &GridSpec,
        params: &ModelParams,
        data: &InitialData,
        tau_ref: f64,
    ) -> Result<SpectralField> {
        self.reference_at(grid_fine, params, data, tau_ref, params.final_time())
    }

    /// Fine-EWI reference at an explicit time, through the cache.
    pub fn reference_at(
        &self,
        grid_fine: &GridSpec,
        params: &ModelParams,
        data: &InitialData,
        tau_ref: f64,
        t_final: f64,
    ) -> Result<SpectralField> {
        let spec = ReferenceSpec::at(grid_fine, params, tau_ref, data, t_final);
        self.get_or_build(&spec, || make_reference_at(grid_fine, params, data, tau_ref, t_final))
    }

    fn paths(&self, key: &str) -> Option<(PathBuf, PathBuf)> {
        self.dir
            .as_ref()
            .map(|d| (d.join(format!("{key}.ref")), d.join(format!("{key}.json"))))
    }

    fn load(&self, key: &str, spec: &ReferenceSpec, grid: &GridSpec) -> Result<Option<SpectralField>> {
        let Some((bin, json)) = self.paths(key) else {
            return Ok(None);
        };
        if !bin.exists() || !json.exists() {
            return Ok(None);
        }
        let sidecar: Sidecar = serde_json::from_slice(&fs::read(&json)?)?;
        if sidecar.params != *spec {
            return Ok(None);
        }
        let bytes = fs::read(&bin)?;
        if bytes.len() != 16 * grid.m() {
            return Ok(None);
        }
        let pairs: Vec<Complex64> = bytes
            .chunks_exact(16)
            .map(|c| {
                let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
                let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
                Complex64::new(re, im)
            })
            .collect();
        let mut field = SpectralField::zeros(*grid);
        for (l, z) in grid.modes().zip(pairs) {
            field.set_coeff(l, z);
        }
        Ok(Some(field))
    }

    fn store(&self, key: &str, spec: &ReferenceSpec, field: &SpectralField) -> Result<()> {
        let Some((bin, json)) = self.paths(key) else {
            return Ok(());
        };
        let mut bytes = Vec::with_capacity(16 * field.grid().m());
        for (_, z) in field.modes() {
            bytes.extend_from_slice(&z.re.to_le_bytes());
            bytes.extend_from_slice(&z.im.to_le_bytes());
        }
        let sidecar = Sidecar {
            params: spec.clone(),
            created_unix: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            solver_version: env!("CARGO_PKG_VERSION").to_string(),
            coefficient_order: "ascending l, little-endian f64 (re, im)".to_string(),
        };
        atomic_write(&bin, &bytes)?;
        atomic_write(&json, &serde_json::to_vec_pretty(&sidecar)?)?;
        Ok(())
    }
}

fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let tmp = dir.join(format!(
        ".{}.{}.tmp",
        path.file_name().and_then(|s| s.to_str()).unwrap_or("ref"),
        std::process::id()
    ));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::mode_frequencies;
    use crate::diagnostics::sobolev_norm;
    use crate::grid::inverse_dft;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rhs_of_zero_is_zero() {
        let g = GridSpec::symmetric(8).unwrap();
        let s = OdeState {
            u: SpectralField::zeros(g),
            v: SpectralField::zeros(g),
            t: 0.0,
        };
        let (du, dv) = ode_rhs(&s, &ModelParams::default()).unwrap();
        assert!(du.as_fft_order().iter().chain(dv.as_fft_order()).all(|z| z.norm() == 0.0));
    }

    #[test]
    fn linear_rhs_has_characteristic_roots() {
        // With u = exp(i b t), v = i b u the residual vanishes for b = beta^{+/-}.
        let g = GridSpec::symmetric(8).unwrap();
        let p = ModelParams::default().with_eps(0.0);
        let l = 2;
        let f = mode_frequencies(1.0, g.wavenumber(l)).unwrap();
        for b in [f.beta_plus, f.beta_minus] {
            let s = OdeState {
                u: SpectralField::single_mode(g, l, c(1.0, 0.0)).unwrap(),
                v: SpectralField::single_mode(g, l, c(0.0, b)).unwrap(),
                t: 0.0,
            };
            let (_, dv) = ode_rhs(&s, &p).unwrap();
            assert!((dv.coeff(l) - c(-b * b, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn rhs_residual_for_standard_data() {
        let g = GridSpec::symmetric(32).unwrap();
        let p = ModelParams::default();
        let (a, b) = InitialData::Standard.sample(&g).unwrap();
        let s = OdeState::from_samples(&g, &a, &b).unwrap();
        let (_, dv) = ode_rhs(&s, &p).unwrap();
        let fcoef = crate::grid::forward_dft(&g, &crate::stepper::nonlinearity(&a, 1)).unwrap();
        for l in g.modes() {
            let mu2 = g.wavenumber(l).powi(2);
            let residual = Complex64::i() * s.v.coeff(l) - p.alpha * dv.coeff(l) - mu2 * s.u.coeff(l) - fcoef.coeff(l);
            assert!(residual.norm() <= 1e-12);
        }
    }

    #[test]
    fn linear_single_mode_matches_duhamel() {
        let g = GridSpec::symmetric(16).unwrap();
        let p = ModelParams::default().with_eps(0.0);
        let l = -3;
        let (u0, v0) = (c(0.6, 0.2), c(-0.1, 0.4));
        let psi0 = inverse_dft(&SpectralField::single_mode(g, l, u0).unwrap());
        let psi1 = inverse_dft(&SpectralField::single_mode(g, l, v0).unwrap());
        let t = 1.0;
        let out = rk4_integrate(&g, &p, &psi0, &psi1, 1e-4, t).unwrap();
        let f = mode_frequencies(1.0, g.wavenumber(l)).unwrap();
        let i = Complex64::i();
        let exact = -(f.beta_minus * u0 + i * v0) / f.beta_gap * Complex64::from_polar(1.0, f.beta_plus * t)
            + (f.beta_plus * u0 + i * v0) / f.beta_gap * Complex64::from_polar(1.0, f.beta_minus * t);
        assert!((out.u.coeff(l) - exact).norm() < 1e-10);
        assert_eq!(out.t, 1.0);
    }

    #[test]
    fn rk4_is_fourth_order() {
        let g = GridSpec::symmetric(16).unwrap();
        let p = ModelParams::default();
        let (a, b) = InitialData::Standard.sample(&g).unwrap();
        let run = |tau: f64| rk4_integrate(&g, &p, &a, &b, tau, 0.5).unwrap().u;
        let (u1, u2, u3) = (run(0.01), run(0.005), run(0.0025));
        let d1 = sobolev_norm(&u1.sub(&u2).unwrap(), 1);
        let d2 = sobolev_norm(&u2.sub(&u3).unwrap(), 1);
        let ratio = d1 / d2;
        assert!((ratio - 16.0).abs() < 2.0, "ratio {ratio}");
    }

    #[test]
    fn rk4_zero_time_returns_initial_state() {
        let g = GridSpec::symmetric(8).unwrap();
        let (a, b) = InitialData::Standard.sample(&g).unwrap();
        let s = rk4_integrate(&g, &ModelParams::default(), &a, &b, 1e-3, 0.0).unwrap();
        assert_eq!(s, OdeState::from_samples(&g, &a, &b).unwrap());
    }

    #[test]
    fn cache_round_trips_through_disk() {
        let dir = tempfile::tempdir().unwrap();
        let g = GridSpec::symmetric(16).unwrap();
        let p = ModelParams::default();
        let data = InitialData::Standard;
        let cache = ReferenceCache::on_disk(dir.path()).unwrap();
        let first = cache.reference(&g, &p, &data, 0.01).unwrap();
        let spec = ReferenceSpec::new(&g, &p, 0.01, &data);
        let key = spec.cache_key();
        assert!(dir.path().join(format!("{key}.ref")).exists());
        assert!(dir.path().join(format!("{key}.json")).exists());

        let fresh = ReferenceCache::on_disk(dir.path()).unwrap();
        let second = fresh
            .get_or_build(&spec, || panic!("should hit the disk cache"))
            .unwrap();
        assert_eq!(first, second);

        let other = ReferenceSpec::new(&g, &p.with_eps(0.5), 0.01, &data);
        assert_ne!(other.cache_key(), key);
        // same final time, different (T, beta)
        let p2 = ModelParams::new(1.0, 1.0, 1, 2.0, 1.0).unwrap();
        assert_eq!(ReferenceSpec::new(&g, &p2, 0.01, &data).cache_key(), key);
    }

    #[test]
    fn cache_dedups_in_memory() {
        let cache = ReferenceCache::in_memory();
        let g = GridSpec::symmetric(8).unwrap();
        let spec = ReferenceSpec::new(&g, &ModelParams::default(), 0.1, &InitialData::Standard);
        let mut builds = 0;
        for _ in 0..3 {
            cache
                .get_or_build(&spec, || {
                    builds += 1;
                    Ok(SpectralField::zeros(g))
                })
                .unwrap();
        }
        assert_eq!(builds, 1);
    }
}
