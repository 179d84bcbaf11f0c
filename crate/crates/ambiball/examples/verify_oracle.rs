//! Cross-checking the structural claims on random small instances.
//!
//! The oracle enumerates polytope vertices by brute force and confirms,
//! per instance: every vertex has small support, the coupling-polytope
//! projection covers the ball's vertices, the explicit candidates contain
//! them, and tightening any facet yields exactly the vertices on it.
//!
//! Run with: cargo run --example verify_oracle

use ambiball::oracle::{self, OracleError};
use ambiball::BallMetric;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), OracleError> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..4 {
        let center = oracle::sample_center(&mut rng, 3..=5, 1..=3);
        let (support, cover) = oracle::verify_instance(&center, BallMetric::Prokhorov)?;
        let cover = cover.expect("indicator mode has a ball representation");
        let faces = oracle::verify_face_identities(&center)?;
        println!(
            "instance {trial}: |X|={} n={} eps={:.3}",
            center.space().size(),
            center.n(),
            center.eps()
        );
        println!(
            "  gamma vertices {} (support <= {}), ball vertices {}",
            support.gamma_vertex_count, support.gamma_max_support, cover.ball_vertex_count,
        );
        println!(
            "  cover ok: {}, faces checked {} ({} empty), mismatches {}",
            cover.ok, faces.faces_checked, faces.empty_faces, faces.mismatches
        );
        assert!(support.ok && cover.ok && faces.ok);
    }

    // The same sweep, packaged: 10 seeded instances in parallel.
    let report = oracle::verify_random_instances(7, 10, BallMetric::Prokhorov, 3..=5, 1..=3)?;
    println!(
        "sweep: {} instances, {} violations, max support {} (bound {}), {} ms",
        report.instances,
        report.violations,
        report.max_support,
        report.support_bound,
        report.runtime_ms
    );
    assert_eq!(report.violations, 0);
    Ok(())
}
