//! Assemble the representation at one (ε₁, ε₂) and compare it with a
//! direct solve in the perforated domain.

use perforated::densities::NodeCounts;
use perforated::geometry::{fixtures, EpsilonPair};
use perforated::structure::{EvaluationRegion, StructureBundle};

fn main() -> perforated::Result<()> {
    let config = fixtures::fix_twin_smooth();
    let eps = EpsilonPair::new(0.2, 0.4);
    let bundle = StructureBundle::new(&config, NodeCounts::for_config(&config, 128), eps)?;
    let summary = bundle.summary();
    println!("F = {:?}", summary.f);
    println!("R = {:?}", summary.r);
    println!("Λ = {:?}, 𝓡 = {:?}", summary.lambda, summary.curly_r);

    let direct = bundle.direct_solution()?;
    for x in EvaluationRegion::default_macro().points.iter().take(4) {
        let rep = bundle.represent_macro(*x)?;
        println!("macro {:?}: {rep:+.12} vs {:+.12}", (x.x, x.y), direct.eval(*x)?);
    }
    for h in [1, 2] {
        let (inside, _) = EvaluationRegion::default_micro(h).admissible(&bundle);
        if let Some(&xi) = inside.first() {
            let rep = bundle.represent_micro(h, xi)?;
            let x = bundle.physical_point(h, xi);
            println!("micro h={h} ξ={:?}: {rep:+.12} vs {:+.12}", (xi.x, xi.y), direct.eval(x)?);
        }
    }
    Ok(())
}
