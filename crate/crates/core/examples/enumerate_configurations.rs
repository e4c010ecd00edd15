// Distinct correspondence configurations as directed multigraphs.

use sixpt::enumerate::{classify_match_type, count_by_cameras, enumerate_configs, graphs_equivalent, DirectedMultigraph};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for n in 1..=6 {
        let graphs = enumerate_configs(n);
        println!("{n} edges: {} configurations, by camera count {:?}", graphs.len(), count_by_cameras(&graphs));
    }

    // Relabelling cameras and swapping the two views do not change a configuration.
    let g = DirectedMultigraph::from_one_based(&[(1, 2), (1, 2), (2, 3), (3, 3)]);
    let relabelled = DirectedMultigraph::from_one_based(&[(3, 2), (3, 2), (2, 1), (1, 1)]);
    println!("{g} ~ {relabelled}: {}", graphs_equivalent(&g, &relabelled));
    println!("{g} ~ {}: {}", g.reverse(), graphs_equivalent(&g, &g.reverse()));

    let two_triples = DirectedMultigraph::from_one_based(&[(1, 1), (1, 1), (1, 1), (2, 2), (2, 2), (2, 2)]);
    println!("{two_triples} has match type {}", classify_match_type(&two_triples));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
