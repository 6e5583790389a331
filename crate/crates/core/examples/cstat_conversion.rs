//! Cox-Snell R² implied by a pairwise C-statistic, for a grid of C values.

use mnlss::cstat::{rsq_from_cstat, CStatSpec};
use mnlss::rsq::{max_rcs_pair, PairPrevalence};

fn main() -> mnlss::Result<()> {
    let phi = PairPrevalence::from_counts(176, 2557)?;
    println!("φ = {:.4}, max R²_CS = {:.4}", phi.value(), max_rcs_pair(phi));
    for c in [0.6, 0.7, 0.8, 0.85, 0.9, 0.92, 0.95] {
        let est = rsq_from_cstat(&CStatSpec::new(c, phi, 1).with_sim_size(200_000))?;
        println!(
            "C = {c:.2}  R²_CS = {:.4}  (σ = {:.3}, achieved C = {:.4})",
            est.r2_cs, est.sigma, est.achieved_c
        );
    }
    Ok(())
}
