//! The simulation scenario catalog with empirical outcome frequencies.

use mnlss::simstudy::{catalog, generate_dataset};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    for spec in catalog() {
        let d = generate_dataset(&spec, 100_000, &mut ChaCha8Rng::seed_from_u64(spec.id.into()));
        let freq: Vec<String> = d
            .category_counts()
            .iter()
            .map(|&c| format!("{:.3}", c as f64 / d.n() as f64))
            .collect();
        println!(
            "{:<40} intercepts ({:>5}, {:>5})  expected {:?}  simulated [{}]",
            spec.label,
            spec.beta[0][0],
            spec.beta[1][0],
            spec.expected_freqs,
            freq.join(", ")
        );
    }
}
