//! Enumerating the explicit superset of a ball's extreme points.
//!
//! Every extreme point of a Prokhorov ball around a discrete center is the
//! second marginal of a corner coupling from a small family: move mass
//! from center atoms toward at most one extra target each, subject to the
//! excess-mass budget. Swap filters and adjacency classes prune the
//! enumeration before any geometry is computed.
//!
//! Run with: cargo run --example ball_superset

use ambiball::extreme_sets::{filtered_families, project_candidates, CenterSpec};
use ambiball::metric_space::PointSet;
use ambiball::{DiscreteMeasure, FiniteMetricSpace};
use std::sync::Arc;

fn main() {
    let space = Arc::new(
        FiniteMetricSpace::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                vec![0.0, 0.4, 0.8],
                vec![0.4, 0.0, 0.5],
                vec![0.8, 0.5, 0.0],
            ],
        )
        .expect("valid metric"),
    );
    let mu = DiscreteMeasure::new(space.clone(), vec![(0, 0.5), (1, 0.5)]).expect("measure");
    let center = Arc::new(CenterSpec::from_measure(&mu, 0.45).expect("valid center"));

    let classes = filtered_families(&center, &PointSet::full(&space));
    println!(
        "{} family classes after filtering and deduplication",
        classes.len()
    );
    let mut expanded = Vec::new();
    for class in &classes {
        let members = class.expand();
        let (family, region) = &members[0];
        println!(
            "  {:?} x={:?} corners={:?} ({} adjacency-equivalent member(s))",
            family.index(),
            family
                .x()
                .iter()
                .map(|&p| space.label(p))
                .collect::<Vec<_>>(),
            region.corners,
            members.len(),
        );
        expanded.extend(members);
    }

    // Corner couplings project to the candidate measures; the ball's
    // extreme points all appear among them.
    let candidates = project_candidates(&expanded);
    println!("{} distinct candidate measures:", candidates.len());
    for mu in &candidates {
        let atoms: Vec<String> = mu
            .atoms()
            .iter()
            .map(|&(p, w)| format!("{}:{w:.3}", space.label(p)))
            .collect();
        println!("  {}", atoms.join(" "));
    }
}
