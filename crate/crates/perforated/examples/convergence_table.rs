//! Error against closed-form solutions as the node count grows.

use perforated::convergence::{convergence_table, OracleCase};

fn main() -> perforated::Result<()> {
    let rows = convergence_table(&OracleCase::ALL, &[64, 96, 128, 192, 256])?;
    println!("{:<20} {:>5} {:>10}", "case", "n", "error");
    for r in rows {
        println!("{:<20} {:>5} {:>10.2e}", r.case, r.n, r.error);
    }
    Ok(())
}
