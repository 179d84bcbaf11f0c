//! Constructing finite metric spaces and inflating subsets.
//!
//! Run with: cargo run --example build_space

use ambiball::metric_space::{inflate, FiniteMetricSpace, MetricError, PointMetric, PointSet};
use std::sync::Arc;

fn main() -> Result<(), MetricError> {
    // Explicit distance matrix with labels.
    let space = FiniteMetricSpace::new(
        vec!["depot".into(), "north".into(), "south".into()],
        vec![
            vec![0.0, 0.4, 0.7],
            vec![0.4, 0.0, 0.5],
            vec![0.7, 0.5, 0.0],
        ],
    )?;
    println!(
        "matrix space: {} points, diameter {}",
        space.size(),
        space.diameter()
    );

    // Point cloud with a named norm; labels are generated when omitted.
    let cloud = FiniteMetricSpace::from_points(
        &[vec![0.0, 0.0], vec![3.0, 4.0], vec![6.0, 8.0]],
        PointMetric::Euclidean,
        None,
    )?;
    println!(
        "cloud space: d({}, {}) = {}",
        cloud.label(0),
        cloud.label(2),
        cloud.d(0, 2)
    );

    // Validation is strict: a triangle violation is rejected, not patched.
    let bad = FiniteMetricSpace::new(
        vec!["a".into(), "b".into(), "c".into()],
        vec![
            vec![0.0, 1.0, 5.0],
            vec![1.0, 0.0, 1.0],
            vec![5.0, 1.0, 0.0],
        ],
    );
    match bad {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!("detour a-b-c is shorter than d(a,c)"),
    }

    // Closed inflation A^{eps]} collects every point within eps of A.
    let space = Arc::new(space);
    let depot_only = PointSet::new(&space, [0])?;
    for eps in [0.1, 0.4, 0.6] {
        let grown = inflate(&space, &depot_only, eps, true);
        let labels: Vec<&str> = grown.iter().map(|i| space.label(i)).collect();
        println!("inflate({{depot}}, {eps}) = {labels:?}");
    }
    Ok(())
}
