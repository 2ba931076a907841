//! Reference problems shipped with the crate, plus a seeded generator of
//! small random problems used by the test suites.

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::lcl::{parse_problem, Label, LclProblem};

pub const THREE_COLORING: &str = include_str!("../../../fixtures/three_coloring.json");
pub const TWO_COLORING: &str = include_str!("../../../fixtures/two_coloring.json");
pub const PERFECT_MATCHING: &str = include_str!("../../../fixtures/perfect_matching.json");

/// Proper 3-coloring on Δ = 3.
pub fn three_coloring() -> LclProblem {
    parse_problem(THREE_COLORING).expect("fixture parses")
}

/// Proper 2-coloring on Δ = 3.
pub fn two_coloring() -> LclProblem {
    parse_problem(TWO_COLORING).expect("fixture parses")
}

/// Perfect matching where virtual half-edges may be matched.
pub fn perfect_matching() -> LclProblem {
    parse_problem(PERFECT_MATCHING).expect("fixture parses")
}

/// A random problem with `sigma` labels on Δ = `delta`, with `num_vertex`
/// vertex configurations and `num_edge` edge configurations, drawn without
/// replacement from all multisets.
pub fn random_problem(
    seed: u64,
    delta: usize,
    sigma: usize,
    num_vertex: usize,
    num_edge: usize,
) -> LclProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<Label> = (0..sigma).map(|i| Label(i as u8)).collect();
    let mut all_vertex: Vec<Vec<Label>> = labels
        .iter()
        .copied()
        .combinations_with_replacement(delta)
        .collect();
    all_vertex.shuffle(&mut rng);
    all_vertex.truncate(num_vertex);
    let mut all_edge: Vec<(Label, Label)> = labels
        .iter()
        .copied()
        .combinations_with_replacement(2)
        .map(|p| (p[0], p[1]))
        .collect();
    all_edge.shuffle(&mut rng);
    all_edge.truncate(num_edge);
    let names = (0..sigma).map(|i| format!("{}", (b'a' + i as u8) as char)).collect();
    LclProblem::new(delta, names, all_vertex, all_edge).expect("generated problem is valid")
}
