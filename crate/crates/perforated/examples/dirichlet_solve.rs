//! Multiply connected interior solve, its Green function, and the limit at
//! infinity of an exterior problem.

use perforated::dirichlet::{ExteriorSingleSolver, InteriorSolver};
use perforated::geometry::{Curve, Orientation, Point};
use perforated::potentials::{BoundarySystem, Discretization};

fn main() -> perforated::Result<()> {
    let outer = Curve::ellipse(Point::zeros(), 1.5, 1.0, 0.2)?;
    let hole = Curve::circle(Point::new(-0.4, 0.1), 0.25)?.with_orientation(Orientation::Negative);
    let sys = BoundarySystem::from_curves(&[outer, hole], 160)?;
    let solver = InteriorSolver::new(&sys)?;

    let z = Point::new(-0.4, 0.1);
    let exact = move |x: Point| x.x * x.y + (x - z).norm().ln();
    let u = solver.solve_fn(exact)?;
    for x in [Point::new(0.6, 0.2), Point::new(0.0, -0.6), Point::new(-0.9, 0.3)] {
        let v = u.eval(x)?;
        println!("u{:?} = {v:+.12}  error {:.1e}", (x.x, x.y), (v - exact(x)).abs());
    }

    let (x, y) = (Point::new(0.5, 0.3), Point::new(0.3, -0.5));
    println!("G(x, y) = {:+.12}, G(y, x) = {:+.12}", solver.green(x, y)?, solver.green(y, x)?);

    let d = Discretization::shared(Curve::ellipse(Point::zeros(), 0.8, 0.4, 0.0)?, 128)?;
    let ext = ExteriorSingleSolver::new(&d)?;
    let field = ext.solve_fn(|p| p.x)?;
    println!("exterior solution with data x: limit at infinity {:+.3e}", field.limit_at_infinity().unwrap_or(f64::NAN));
    Ok(())
}
