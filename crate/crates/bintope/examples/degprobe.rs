use bintope::mspace::generate;
use bintope::subdivision::{degree, SubdivideOptions};
use std::time::Instant;

fn main() {
    for (m, k) in [(3usize, 4usize)] {
        let t0 = Instant::now();
        let system = generate(m, k).unwrap();
        let structure = system.analyze().unwrap();
        let opts = SubdivideOptions { pivoting: true, seed: 7, ..SubdivideOptions::default() };
        let report = degree(&structure, &opts).unwrap();
        let stats = report.subdivision.as_ref().unwrap().stats;
        println!(
            "({m},{k}): degree {} in {:?} (cells {}, float {}, exact {}, nodes {}, walks {})",
            report.degree,
            t0.elapsed(),
            report.subdivision.as_ref().unwrap().cells.len(),
            stats.float_lps,
            stats.exact_lps,
            stats.nodes_expanded,
            stats.pivot_walks
        );
    }
}
