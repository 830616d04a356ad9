//! Weak nonlinearity with O(1) data equals unit-strength nonlinearity with
//! O(eps) data: runs both forms and compares.

use num_complex::Complex64;

use nlsw_ewi::{integrate, sobolev_norm, GridSpec, InitialData, ModelParams, Result};

fn main() -> Result<()> {
    let grid = GridSpec::symmetric(32)?;
    let (psi0, psi1) = InitialData::Standard.sample(&grid)?;
    let eps = 0.3;
    let weak = integrate(&grid, &ModelParams::default().with_eps(eps), &psi0, &psi1, 0.01, 2.0, None)?;
    let scale = |v: &[Complex64]| v.iter().map(|z| z * eps).collect::<Vec<_>>();
    let small = integrate(&grid, &ModelParams::default(), &scale(&psi0), &scale(&psi1), 0.01, 2.0, None)?;
    let diff = small.current().sub(&weak.current().scale(Complex64::new(eps, 0.0)))?;
    println!(
        "|phi|_H1 = {:.6}, |phi - eps psi|_H1 = {:.1e}",
        sobolev_norm(small.current(), 1),
        sobolev_norm(&diff, 1)
    );
    Ok(())
}
