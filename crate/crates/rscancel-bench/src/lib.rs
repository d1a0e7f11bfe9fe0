//! Fixtures shared by the benchmarks.

use rscancel::rips_segev::{build_gamma, gen_power_coefficients, gen_underlying, incidence_graph_pg27, label_underlying, RsGraph};
use rscancel::LabeledGraph;

/// Γ over the incidence graph of PG(2,7) with power coefficients.
pub fn pg27_gamma() -> RsGraph {
    let phi = incidence_graph_pg27();
    let t = gen_power_coefficients(&(1..=phi.n as u32).collect::<Vec<_>>()).expect("power rows");
    build_gamma(&label_underlying(&phi, &t).expect("labels")).expect("construction")
}

/// Γ over a random 8-regular graph on `n` vertices.
pub fn random_gamma(n: usize, seed: u64) -> RsGraph {
    let phi = gen_underlying(n, 3, seed, 50).expect("underlying graph");
    let t = gen_power_coefficients(&(1..=n as u32).collect::<Vec<_>>()).expect("power rows");
    build_gamma(&label_underlying(&phi, &t).expect("labels")).expect("construction")
}

/// The single cycle `a b a^2 b ... a^n b`.
pub fn exponent_cycle(n: u32) -> LabeledGraph {
    LabeledGraph::exponent_cycle(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_build() {
        assert_eq!(pg27_gamma().num_lines(), 114);
        assert_eq!(random_gamma(9, 1).num_lines(), 9);
        assert_eq!(exponent_cycle(4).num_edges(), 8);
    }
}
