//! Build a problem from a TOML configuration and solve it directly.

use std::path::Path;

use perforated::cli::config::ConfigFile;
use perforated::densities::{physical_data, NodeCounts, ReferenceGeometry};
use perforated::dirichlet::InteriorSolver;
use perforated::geometry::{admissibility_check, EpsilonPair, Point};

fn main() -> perforated::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/ellipse_holes.toml");
    let file = ConfigFile::load(&path)?;
    let (name, config) = file.problem(None)?;
    let report = admissibility_check(&config);
    println!("{name}: admissible = {}", report.passed());

    let eps = EpsilonPair::new(0.1, 0.3);
    eps.check(&config)?;
    let geom = ReferenceGeometry::new(&config, NodeCounts::for_config(&config, 128))?;
    let sys = geom.physical_system(&config, eps)?;
    let u = InteriorSolver::new(&sys)?.solve_values(&physical_data(&geom, &config))?;
    for x in [Point::new(1.5, 0.5), Point::new(-1.2, -1.0), Point::new(0.0, 0.12)] {
        match u.eval(x) {
            Ok(v) => println!("u{:?} = {v:+.10}", (x.x, x.y)),
            Err(e) => println!("u{:?}: {e}", (x.x, x.y)),
        }
    }
    Ok(())
}
