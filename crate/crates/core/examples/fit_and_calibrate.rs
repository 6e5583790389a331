//! Fit multinomial and distinct logistic models on a small development
//! sample, then measure their shrinkage on a large validation sample.

use mnlss::calibration::{binary_calibration_slope, multinomial_recalibration, pairwise_cstat, LinearPredictorSet};
use mnlss::glm::{fit_binary, fit_multinomial, heuristic_shrinkage};
use mnlss::simstudy::{generate_dataset, scenario};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> mnlss::Result<()> {
    let spec = scenario(3).expect("catalog scenario");
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let dev = generate_dataset(&spec, 400, &mut rng);
    let val = generate_dataset(&spec, 200_000, &mut rng);

    let mn = fit_multinomial(&dev)?;
    println!("multinomial: LR = {:.2}, {} iterations", mn.lr(), mn.iterations);
    println!("  S_VH_MN = {:.3}", heuristic_shrinkage(10, mn.lr())?.value);

    let lp: Vec<f64> = (0..val.n()).flat_map(|i| mn.slope_predictors(val.row(i))).collect();
    let rec = multinomial_recalibration(&LinearPredictorSet::new(lp, 3, val.labels().to_vec())?)?;
    println!("  S_MN_21 = {:.3}, S_MN_31 = {:.3}", rec.slopes[0], rec.slopes[1]);

    let risks: Vec<f64> = (0..val.n()).flat_map(|i| mn.probabilities(val.row(i))).collect();
    for k in 2..=3 {
        println!("  C_{k},1 = {:.3}", pairwise_cstat(&risks, val.labels(), k, 1)?);
    }

    for k in 2..=3 {
        let fit = fit_binary(&dev.pair_subset(k, 1))?;
        let sub = val.pair_subset(k, 1);
        let lp: Vec<f64> = (0..sub.n()).map(|i| fit.slope_predictor(sub.row(i))).collect();
        let events: Vec<bool> = sub.labels().iter().map(|&l| l == 2).collect();
        let cal = binary_calibration_slope(&lp, &events)?;
        println!(
            "distinct {{{k},1}}: S_VH = {:.3}, S_DL = {:.3}",
            heuristic_shrinkage(5, fit.lr())?.value,
            cal.slope
        );
    }
    Ok(())
}
