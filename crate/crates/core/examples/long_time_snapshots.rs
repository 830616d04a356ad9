//! Long-time run on [0, 1/eps^2] with periodic coefficient snapshots
//! written as CSV.

use nlsw_ewi::stepper::{step_count, SnapshotWriter};
use nlsw_ewi::{EwiStepper, GridSpec, InitialData, ModelParams, Result};

fn main() -> Result<()> {
    let params = ModelParams::new(1.0, 0.25, 1, 2.0, 1.0)?;
    let grid = GridSpec::symmetric(16)?;
    let tau = 0.01;
    let (psi0, psi1) = InitialData::Standard.sample(&grid)?;
    let mut stepper = EwiStepper::for_params(&grid, &params, tau)?;
    let mut state = stepper.initial_state(&psi0, &psi1)?;
    let n = step_count(params.final_time(), tau)?;

    let mut writer = SnapshotWriter::new(Vec::new(), n / 4);
    let mut io_error = None;
    stepper.advance(&mut state, n, |s| {
        if let Err(e) = writer.record(s) {
            io_error.get_or_insert(e);
        }
    })?;
    if let Some(e) = io_error {
        return Err(e.into());
    }
    let csv = String::from_utf8_lossy(&writer.into_inner()).into_owned();
    for line in csv.lines() {
        let cols: Vec<&str> = line.split(',').take(6).collect();
        println!("{} ...", cols.join(","));
    }
    Ok(())
}
