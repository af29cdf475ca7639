//! Fixtures shared by the criterion benchmarks.

use tembed::generators::{generate, Family, GenSpec};
use tembed::ProblemGraph;

/// The desk-scale hardware the benchmark harness targets.
pub const DESK: (usize, usize) = (4, 4);

/// A fixed benchmark graph per family at density 0.25.
pub fn instance(family: Family, n: usize) -> ProblemGraph {
    generate(&GenSpec::new(family, n, 0.25, 0)).expect("fixture spec is valid")
}

/// Instances sized around the BTE threshold of the desk-scale host.
pub fn threshold_set() -> Vec<(String, ProblemGraph)> {
    let mut out = Vec::new();
    for family in [Family::ErdosRenyi, Family::BarabasiAlbert, Family::NoisyBipartite] {
        for n in [18, 24] {
            out.push((format!("{family}_n{n}"), instance(family, n)));
        }
    }
    out
}
