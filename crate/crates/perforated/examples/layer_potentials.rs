//! Gauss identities and the jump of the double layer across an ellipse.

use perforated::geometry::{Curve, Point};
use perforated::potentials::{double_layer_raw, op_W, BoundarySystem, Discretization};

fn main() -> perforated::Result<()> {
    let curve = Curve::ellipse(Point::new(0.2, -0.1), 1.3, 0.7, 0.5)?;
    let sys = BoundarySystem::from_curves(std::slice::from_ref(&curve), 256)?;
    let w = op_W(&sys);
    let row_err = (0..sys.len()).map(|i| (w.row(i).sum() - 0.5).abs()).fold(0.0, f64::max);
    println!("max |W[1] - 1/2| on the boundary: {row_err:.2e}");

    let d = Discretization::shared(curve.clone(), 256)?;
    let ones = vec![1.0; d.n()];
    for x in [Point::new(0.2, -0.1), Point::new(3.0, 1.0)] {
        println!("w[1] at {:?}: {:+.12}", (x.x, x.y), double_layer_raw(&d, &ones, x));
    }

    // Approach a boundary point along the normal from both sides.
    let fine = Discretization::shared(curve, 2048)?;
    let phi: Vec<f64> = fine.params().iter().map(|s| (2.0 * s).cos()).collect();
    let (x0, nu) = (fine.points()[100], fine.normals()[100]);
    let jump = |h: f64| double_layer_raw(&fine, &phi, x0 - h * nu) - double_layer_raw(&fine, &phi, x0 + h * nu);
    for h in [0.08, 0.04, 0.02] {
        println!("h = {h:.2}: w(inside) - w(outside) = {:+.6}", jump(h));
    }
    println!("linear extrapolation to h = 0: {:+.6}, density {:+.6}", 2.0 * jump(0.02) - jump(0.04), phi[100]);
    Ok(())
}
