//! Residual of the leading-order expansion along ε₁ = t, ε₂ = γ(t).

use perforated::asymptotics::{decades, AsymptoticSetup, GammaFamily};
use perforated::densities::NodeCounts;
use perforated::geometry::{fixtures, Point};

fn main() -> perforated::Result<()> {
    let config = fixtures::fix_twin();
    let points: Vec<Point> = (0..4)
        .map(|k| {
            let a = 0.3 + k as f64 * std::f64::consts::FRAC_PI_2;
            Point::new(2.0 * a.cos(), 2.0 * a.sin())
        })
        .collect();
    let setup = AsymptoticSetup::new(&config, NodeCounts::for_config(&config, 128), points)?;
    for expr in ["gamma=t", "gamma=0.5+t"] {
        let family = GammaFamily::parse(expr)?;
        let report = setup.expansion(&family, &decades(2, 6))?;
        println!("{expr}: coefficient {:.6}, λ₀ {}", report.coefficient, report.lambda0);
        println!("{:>8} {:>12} {:>12} {:>10} {:>10}", "t", "u_direct", "u_leading", "residual", "normalized");
        for r in &report.rows {
            println!(
                "{:>8.0e} {:>12.8} {:>12.8} {:>10.3e} {:>10.3e}",
                r.t, r.u_direct, r.u_leading, r.residual, r.normalized_residual
            );
        }
        println!("decay factors {:?}", report.verdict.decay_factors);
    }
    Ok(())
}
