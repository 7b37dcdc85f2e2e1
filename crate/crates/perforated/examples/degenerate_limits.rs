//! Closed forms of the structural quantities when one parameter vanishes.

use perforated::densities::NodeCounts;
use perforated::geometry::fixtures;
use perforated::structure::{degenerate_identities, Anchor, StructureBundle, TildeProblems};

fn main() -> perforated::Result<()> {
    let config = fixtures::fix_sym();
    let nodes = NodeCounts::for_config(&config, 128);
    for anchor in [Anchor::Eps2Zero { eps1: 0.2 }, Anchor::Eps1Zero { eps2: 0.5 }] {
        let bundle = StructureBundle::new(&config, nodes, anchor.eps())?;
        let tilde = match anchor {
            Anchor::Eps1Zero { eps2 } => Some(TildeProblems::new(&config, &bundle.geom, eps2)?),
            Anchor::Eps2Zero { .. } => None,
        };
        let checks = degenerate_identities(&bundle, anchor, tilde.as_ref())?;
        let worst = checks.iter().max_by(|a, b| a.diff.total_cmp(&b.diff)).unwrap();
        println!("{anchor:?}: {} identities, worst {:.2e} ({})", checks.len(), worst.diff, worst.identity);
        for c in checks.iter().filter(|c| c.identity.starts_with('f') || c.identity.starts_with('r')) {
            println!("  {:<24} {:+.12} {:+.12}", c.identity, c.definition, c.closed_form);
        }
    }
    Ok(())
}
