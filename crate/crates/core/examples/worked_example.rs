//! Sample size for the five-category ovarian tumour model, from the
//! published R² values. Pass a config path to run a TOML config instead:
//!
//! ```sh
//! cargo run --release --example worked_example -- crates/core/examples/adnex.toml
//! ```

use mnlss::config::StudyConfig;
use mnlss::criteria::{criterion_one, criterion_three, criterion_two, final_sample_size, PairEstimate, PrecisionSpec};
use mnlss::report::analyse;
use mnlss::rsq::{cs_from_nagelkerke_assumption, max_rcs, OutcomeDistribution, DEFAULT_NAGELKERKE};

const R2: [(usize, usize, f64); 10] = [
    (2, 1, 0.116),
    (3, 1, 0.179),
    (4, 1, 0.497),
    (5, 1, 0.170),
    (3, 2, 0.185),
    (4, 2, 0.499),
    (5, 2, 0.374),
    (4, 3, 0.328),
    (5, 3, 0.129),
    (5, 4, 0.210),
];

fn main() -> mnlss::Result<()> {
    if let Some(path) = std::env::args().nth(1) {
        let analysis = analyse(&StudyConfig::load(path.as_ref())?)?;
        print!("{}", analysis.render_text());
        return Ok(());
    }

    let dist = OutcomeDistribution::from_counts(&[2557, 186, 176, 467, 120])?;
    let q = 17;
    let pairs: Vec<PairEstimate> = R2
        .iter()
        .map(|&(k, r, r2)| PairEstimate::new(k, r, r2, dist.pair_proportion(k, r)))
        .collect();
    let one = criterion_one(&pairs, q, 5)?;
    for p in &one.pairs {
        println!("n_{},{} = {:>6}  (m = {:.1}, p = {:.3})", p.k, p.r, p.cohort.n, p.events.raw, p.p_pair);
    }
    println!("criterion (i): {} from pair {{{},{}}}", one.n, one.binding.0, one.binding.1);

    let max = max_rcs(&dist)?;
    let r2_overall = cs_from_nagelkerke_assumption(&dist, DEFAULT_NAGELKERKE)?;
    let two = criterion_two(q, 5, r2_overall, max, 0.05)?;
    println!("criterion (ii): {} (max R² {max:.3}, R²_adj {r2_overall:.3})", two.size.n);

    let three = criterion_three(&dist, PrecisionSpec::default())?;
    println!("criterion (iii): {} (χ² = {:.4})", three.n, three.chi2);

    let total = final_sample_size(one.n, two.size.n, three.n, &dist);
    println!("minimum sample size {}; expected events {:?}", total.n_final, total.expected_events);
    Ok(())
}
