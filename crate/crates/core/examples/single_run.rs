//! Integrates the standard initial data to t = 1 and prints the solution
//! size and conserved quantities along the way.

use nlsw_ewi::diagnostics::scheme_conserved;
use nlsw_ewi::stepper::EwiStepper;
use nlsw_ewi::{conserved, inverse_dft, sobolev_norm, GridSpec, InitialData, ModelParams, Result};

fn main() -> Result<()> {
    let grid = GridSpec::symmetric(64)?;
    let params = ModelParams::new(1.0, 1.0, 1, 0.0, 1.0)?;
    let tau = 1e-3;
    let (psi0, psi1) = InitialData::Standard.sample(&grid)?;
    let q0 = conserved(&psi0, &psi1, &grid, &params)?;
    println!("t = 0.000  mass {:.12}  energy {:.12}", q0.mass, q0.energy);

    let mut stepper = EwiStepper::for_params(&grid, &params, tau)?;
    let mut state = stepper.initial_state(&psi0, &psi1)?;
    for _ in 0..4 {
        stepper.advance(&mut state, 250, |_| {})?;
        let mut ahead = state.clone();
        stepper.step(&mut ahead)?;
        let q = scheme_conserved(
            &inverse_dft(state.previous()),
            state.current_values(),
            ahead.current_values(),
            &grid,
            &params,
            tau,
        )?;
        let (dm, de) = q.relative_drift(&q0);
        println!(
            "t = {:.3}  |psi|_H1 {:.6}  mass drift {dm:.2e}  energy drift {de:.2e}",
            state.t(),
            sobolev_norm(state.current(), 1)
        );
    }
    Ok(())
}
