//! Builds the per-mode coefficient table, dumps a few modes as CSV and
//! reports the split-identity residuals and size bounds.

use nlsw_ewi::{build_table, GridSpec, Result};

fn main() -> Result<()> {
    let grid = GridSpec::symmetric(16)?;
    let table = build_table(&grid, 1.0, 0.5, 1, 0.05)?;

    let mut csv = Vec::new();
    table.write_csv(&mut csv)?;
    let text = String::from_utf8_lossy(&csv);
    for line in text.lines().take(4) {
        println!("{line}");
    }
    println!("...");

    let [p, p_star, q, q_star] = table.split_residuals();
    println!("split residuals: p {p:.1e}, p* {p_star:.1e}, q {q:.1e}, q* {q_star:.1e}");
    println!("{:#?}", table.verify_bounds());
    Ok(())
}
