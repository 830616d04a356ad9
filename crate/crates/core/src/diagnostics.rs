//! Norms, error measurement, conserved quantities and order fits.
//!
//! Sobolev norms follow `||u||_{H^m}^2 = sum_l (1 + mu_l^2)^m |u_l|^2` with
//! no domain-length factor. Grid norms carry the mesh weight `h`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::grid::{FourierTransform, GridSpec, SpectralField};
use crate::stepper::ModelParams;

pub fn sobolev_norm(field: &SpectralField, m: u32) -> f64 {
    let g = field.grid();
    field
        .as_fft_order()
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let mu = g.wavenumber(g.mode_at(k));
            (1.0 + mu * mu).powi(m as i32) * c.norm_sqr()
        })
        .sum::<f64>()
        .sqrt()
}

/// `L^2` norm of the derivative of the represented polynomial.
pub fn gradient_l2(field: &SpectralField) -> f64 {
    let g = field.grid();
    let s: f64 = field
        .as_fft_order()
        .iter()
        .enumerate()
        .map(|(k, c)| g.wavenumber(g.mode_at(k)).powi(2) * c.norm_sqr())
        .sum();
    (g.length() * s).sqrt()
}

/// `(sqrt(h sum |v_j|^2), max |v_j|)`.
pub fn grid_norms(values: &[Complex64], h: f64) -> (f64, f64) {
    let l2 = (h * values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt();
    let linf = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    (l2, linf)
}

/// Periodic forward difference `(v_{j+1} - v_j) / h`, wrapping at the end.
pub fn forward_difference(values: &[Complex64], h: f64) -> Vec<Complex64> {
    let m = values.len();
    (0..m).map(|j| (values[(j + 1) % m] - values[j]) / h).collect()
}

/// Error norms at one measurement point.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub h1: f64,
    pub l2: f64,
    pub linf: f64,
    pub t: f64,
    #[serde(rename = "M")]
    pub m: usize,
    pub tau: f64,
    pub eps: f64,
    pub beta_exp: f64,
}

impl ErrorReport {
    pub fn with_context(mut self, t: f64, tau: f64, eps: f64, beta_exp: f64) -> Self {
        self.t = t;
        self.tau = tau;
        self.eps = eps;
        self.beta_exp = beta_exp;
        self
    }

    /// 1D Sobolev-type consistency check `linf^2 <= 10 l2 h1`.
    pub fn is_consistent(&self) -> bool {
        self.linf * self.linf <= 10.0 * self.l2 * self.h1 + f64::MIN_POSITIVE
    }
}

/// Measures `reference - I_M numeric` on the reference grid.
pub fn error_report(numeric: &SpectralField, reference: &SpectralField) -> Result<ErrorReport> {
    if !numeric.grid().same_domain(reference.grid()) {
        return Err(Error::Grid("numeric and reference fields live on different domains".into()));
    }
    if numeric.grid().m() > reference.grid().m() {
        return Err(Error::Grid(format!(
            "reference resolution {} is coarser than numeric resolution {}",
            reference.grid().m(),
            numeric.grid().m()
        )));
    }
    let diff = reference.sub(&numeric.pad_to_grid(reference.grid())?)?;
    let grid = reference.grid();
    let mut values = diff.as_fft_order().to_vec();
    FourierTransform::new(*grid).inverse_in_place(&mut values);
    let (_, linf) = grid_norms(&values, grid.h());
    Ok(ErrorReport {
        h1: sobolev_norm(&diff, 1),
        l2: sobolev_norm(&diff, 0) * grid.length().sqrt(),
        linf,
        m: numeric.grid().m(),
        ..Default::default()
    })
}

/// Mass `N(t)` and energy `E(t)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ConservedQuantities {
    pub mass: f64,
    pub energy: f64,
    pub t: f64,
}

impl ConservedQuantities {
    /// `(|dN| / |N_ref|, |dE| / |E_ref|)`.
    pub fn relative_drift(&self, reference: &ConservedQuantities) -> (f64, f64) {
        (
            (self.mass - reference.mass).abs() / reference.mass.abs(),
            (self.energy - reference.energy).abs() / reference.energy.abs(),
        )
    }
}

/// Rectangle-rule quadrature of the mass and energy densities on the grid;
/// `grad psi` is the spectral derivative of the interpolant.
pub fn conserved(
    psi: &[Complex64],
    dpsi_dt: &[Complex64],
    grid: &GridSpec,
    params: &ModelParams,
) -> Result<ConservedQuantities> {
    let m = grid.m();
    for v in [psi, dpsi_dt] {
        if v.len() != m {
            return Err(Error::Length {
                expected: m,
                got: v.len(),
            });
        }
    }
    let mut fft = FourierTransform::new(*grid);
    let mut grad = psi.to_vec();
    fft.forward_in_place(&mut grad);
    for (k, c) in grad.iter_mut().enumerate() {
        *c *= Complex64::i() * grid.wavenumber(grid.mode_at(k));
    }
    fft.inverse_in_place(&mut grad);

    let h = grid.h();
    let alpha = params.alpha;
    let power = params.power as i32;
    let nl = params.strength() / (power as f64 + 1.0);
    let mut mass = 0.0;
    let mut energy = 0.0;
    for j in 0..m {
        let (u, v, du) = (psi[j], dpsi_dt[j], grad[j]);
        mass += u.norm_sqr() - 2.0 * alpha * (u.conj() * v).im;
        energy += alpha * v.norm_sqr() + du.norm_sqr() + nl * u.norm_sqr().powi(power + 1);
    }
    Ok(ConservedQuantities {
        mass: h * mass,
        energy: h * energy,
        t: 0.0,
    })
}

/// Conserved quantities of a scheme trajectory at level `n`, with
/// `psi_t` from the centered difference `(psi^{n+1} - psi^{n-1}) / (2 tau)`.
pub fn scheme_conserved(
    prev: &[Complex64],
    curr: &[Complex64],
    next: &[Complex64],
    grid: &GridSpec,
    params: &ModelParams,
    tau: f64,
) -> Result<ConservedQuantities> {
    if prev.len() != next.len() {
        return Err(Error::Length {
            expected: prev.len(),
            got: next.len(),
        });
    }
    let dt: Vec<Complex64> = next.iter().zip(prev).map(|(a, b)| (a - b) / (2.0 * tau)).collect();
    conserved(curr, &dt, grid, params)
}

/// Least-squares slope of `log(err)` against `log(step)`.
pub fn observed_order(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(param("errors", "need at least two points"));
    }
    if points.iter().any(|&(s, e)| !(s > 0.0 && e > 0.0)) {
        return Err(param("errors", "steps and errors must be positive"));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(param("errors", "steps must not all be equal"));
    }
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{forward_dft, inverse_dft};
    use crate::initial_data::InitialData;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn sobolev_norm_of_simple_fields() {
        let g = GridSpec::symmetric(8).unwrap();
        let one = SpectralField::single_mode(g, 0, c(1.0, 0.0)).unwrap();
        assert_eq!(sobolev_norm(&one, 1), 1.0);
        let wave = SpectralField::single_mode(g, 1, c(1.0, 0.0)).unwrap();
        assert!((sobolev_norm(&wave, 1) - 2f64.sqrt()).abs() < 1e-15);
        let f = SpectralField::from_modes(g, |l| c(l as f64, 0.5));
        let l2: f64 = f.as_fft_order().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!((sobolev_norm(&f, 0) - l2).abs() < 1e-14);
    }

    #[test]
    fn sobolev_norm_survives_padding() {
        let g = GridSpec::symmetric(16).unwrap();
        let f = SpectralField::from_modes(g, |l| c(1.0 / (1.0 + (l * l) as f64), 0.1 * l as f64));
        let padded = f.pad_to(64).unwrap();
        for m in 0..3 {
            let (a, b) = (sobolev_norm(&f, m), sobolev_norm(&padded, m));
            assert!((a - b).abs() <= 1e-14 * a);
        }
    }

    #[test]
    fn grid_norm_values() {
        let g = GridSpec::symmetric(8).unwrap();
        let (l2, linf) = grid_norms(&vec![c(1.0, 0.0); 8], g.h());
        assert!((l2 - (2.0 * PI).sqrt()).abs() < 1e-14);
        assert_eq!(linf, 1.0);
        assert_eq!(grid_norms(&vec![c(0.0, 0.0); 8], g.h()), (0.0, 0.0));

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let v: Vec<Complex64> = (0..8).map(|_| c(rng.gen(), rng.gen())).collect();
        let f = forward_dft(&g, &v).unwrap();
        let (l2, _) = grid_norms(&v, g.h());
        assert!((l2 - g.length().sqrt() * sobolev_norm(&f, 0)).abs() < 1e-12 * l2);
    }

    #[test]
    fn error_report_cases() {
        let g = GridSpec::symmetric(16).unwrap();
        let fine = GridSpec::symmetric(32).unwrap();
        let num = SpectralField::from_modes(g, |l| c(0.5f64.powi(l.abs() as i32), 0.0));
        let same = error_report(&num, &num.pad_to(32).unwrap()).unwrap();
        assert_eq!((same.h1, same.l2, same.linf), (0.0, 0.0, 0.0));

        let delta = 1e-3;
        let mut reference = num.pad_to(32).unwrap();
        reference.set_coeff(1, reference.coeff(1) + delta);
        let r = error_report(&num, &reference).unwrap();
        assert!((r.h1 - delta * 2f64.sqrt()).abs() < 1e-15);
        assert!((r.l2 - delta * (2.0 * PI).sqrt()).abs() < 1e-15);
        assert!((r.linf - delta).abs() < 1e-15);
        assert!(r.is_consistent());
        assert_eq!(r.m, 16);

        let elsewhere = SpectralField::zeros(GridSpec::new(0.0, 1.0, 32).unwrap());
        assert!(error_report(&num, &elsewhere).is_err());
        assert!(error_report(&SpectralField::zeros(fine), &num).is_err());
    }

    #[test]
    fn conserved_quantities_basic() {
        let g = GridSpec::symmetric(16).unwrap();
        let p = ModelParams::default();
        let zeros = vec![c(0.0, 0.0); 16];
        let q = conserved(&zeros, &zeros, &g, &p).unwrap();
        assert_eq!((q.mass, q.energy), (0.0, 0.0));

        let (a, b) = InitialData::Standard.sample(&g).unwrap();
        let q = conserved(&a, &b, &g, &p).unwrap();
        let plain: f64 = g.h() * a.iter().map(|z| z.norm_sqr()).sum::<f64>();
        assert!((q.mass - plain).abs() < 1e-15 * plain);
        assert!(q.energy > 0.0);
        assert!(conserved(&a, &b[..8], &g, &p).is_err());
    }

    #[test]
    fn initial_mass_is_spectrally_converged() {
        let p = ModelParams::default();
        let mass = |m: usize| {
            let g = GridSpec::symmetric(m).unwrap();
            let (a, b) = InitialData::Standard.sample(&g).unwrap();
            conserved(&a, &b, &g, &p).unwrap()
        };
        let (q1, q2) = (mass(128), mass(256));
        assert!((q1.mass - q2.mass).abs() <= 1e-12 * q2.mass);
        assert!((q1.energy - q2.energy).abs() <= 1e-12 * q2.energy);
    }

    #[test]
    fn energy_gradient_matches_spectral_norm() {
        let g = GridSpec::symmetric(32).unwrap();
        let f = SpectralField::from_modes(g, |l| c(0.3f64.powi(l.abs() as i32), 0.0));
        let v = inverse_dft(&f);
        let p = ModelParams::default().with_eps(0.0);
        let q = conserved(&v, &vec![c(0.0, 0.0); 32], &g, &p).unwrap();
        assert!((q.energy - gradient_l2(&f).powi(2)).abs() < 1e-12);
    }

    #[test]
    fn order_fit() {
        assert!((observed_order(&[(0.1, 1e-2), (0.05, 2.5e-3)]).unwrap() - 2.0).abs() < 1e-12);
        let pts: Vec<(f64, f64)> = (0..5).map(|k| {
            let h = 0.5f64.powi(k);
            (h, 3.0 * h.powi(8))
        }).collect();
        assert!((observed_order(&pts).unwrap() - 8.0).abs() < 1e-9);
        assert!(observed_order(&[(0.1, 1.0)]).is_err());
        assert!(observed_order(&[(0.1, 1.0), (0.05, 0.0)]).is_err());
    }
}
