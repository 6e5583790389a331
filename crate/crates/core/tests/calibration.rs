use approx::assert_abs_diff_eq;
use mnlss::calibration::{
    binary_calibration_slope, concordance, multinomial_recalibration, pairwise_cstat, LinearPredictorSet,
};
use mnlss::glm::fit_multinomial;
use mnlss::simstudy::{generate_dataset, scenario};
use mnlss::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn binary_cohort(n: usize, seed: u64) -> (Vec<f64>, Vec<bool>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lp = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let z: f64 = rng.sample(StandardNormal);
        let eta = -0.5 + 1.2 * z;
        let u: f64 = rng.random();
        lp.push(1.2 * z);
        y.push(u < 1.0 / (1.0 + (-eta).exp()));
    }
    (lp, y)
}

#[test]
fn true_predictor_has_unit_slope() {
    let (lp, y) = binary_cohort(1_000_000, 1);
    let cal = binary_calibration_slope(&lp, &y).unwrap();
    assert_abs_diff_eq!(cal.slope, 1.0, epsilon = 0.01);
    assert_abs_diff_eq!(cal.intercept, -0.5, epsilon = 0.01);
}

#[test]
fn doubled_predictor_has_half_slope() {
    let (lp, y) = binary_cohort(1_000_000, 2);
    let doubled: Vec<f64> = lp.iter().map(|v| 2.0 * v).collect();
    let cal = binary_calibration_slope(&doubled, &y).unwrap();
    assert_abs_diff_eq!(cal.slope, 0.5, epsilon = 0.005);
}

#[test]
fn rescaling_contract() {
    let (lp, y) = binary_cohort(50_000, 3);
    let base = binary_calibration_slope(&lp, &y).unwrap().slope;
    for c in [0.25, 3.0, 10.0] {
        let scaled: Vec<f64> = lp.iter().map(|v| v * c).collect();
        let s = binary_calibration_slope(&scaled, &y).unwrap().slope;
        assert_abs_diff_eq!(s * c, base, epsilon = 1e-6);
    }
}

fn true_lp_set(id: u32, n: usize, seed: u64, scale: f64) -> LinearPredictorSet {
    let spec = scenario(id).unwrap();
    let d = generate_dataset(&spec, n, &mut ChaCha8Rng::seed_from_u64(seed));
    let mut lp = Vec::with_capacity(n * 2);
    for i in 0..n {
        for j in 0..2 {
            let b = &spec.beta[j];
            lp.push(scale * b[1..].iter().zip(d.row(i)).map(|(c, x)| c * x).sum::<f64>());
        }
    }
    LinearPredictorSet::new(lp, 3, d.labels().to_vec()).unwrap()
}

#[test]
fn recalibration_of_true_model() {
    let set = true_lp_set(3, 300_000, 4, 1.0);
    let rec = multinomial_recalibration(&set).unwrap();
    for s in &rec.slopes {
        assert_abs_diff_eq!(*s, 1.0, epsilon = 0.02);
    }
    let spec = scenario(3).unwrap();
    assert_abs_diff_eq!(rec.intercepts[0], spec.beta[0][0], epsilon = 0.02);
    assert_abs_diff_eq!(rec.intercepts[1], spec.beta[1][0], epsilon = 0.02);

    let over = multinomial_recalibration(&true_lp_set(3, 300_000, 4, 1.0 / 0.8)).unwrap();
    for (s0, s1) in rec.slopes.iter().zip(&over.slopes) {
        assert_abs_diff_eq!(s1 / 0.8, *s0, epsilon = 1e-6);
    }
}

#[test]
fn recalibration_of_overfitted_development_model() {
    let spec = scenario(1).unwrap();
    let dev = generate_dataset(&spec, 150, &mut ChaCha8Rng::seed_from_u64(5));
    let fit = fit_multinomial(&dev).unwrap();
    let v = generate_dataset(&spec, 100_000, &mut ChaCha8Rng::seed_from_u64(6));
    let lp: Vec<f64> = (0..v.n()).flat_map(|i| fit.slope_predictors(v.row(i))).collect();
    let rec = multinomial_recalibration(&LinearPredictorSet::new(lp, 3, v.labels().to_vec()).unwrap()).unwrap();
    assert!(rec.slopes.iter().all(|&s| s > 0.3 && s < 1.0), "{:?}", rec.slopes);
}

#[test]
fn missing_category_is_rejected() {
    let set = LinearPredictorSet::new(vec![0.1, 0.2, 0.3, 0.1], 3, vec![1, 2]).unwrap();
    assert!(matches!(multinomial_recalibration(&set), Err(Error::DegenerateCategory { index: 3 })));
    assert!(matches!(
        binary_calibration_slope(&[1.0, 1.0, 1.0], &[true, false, true]),
        Err(Error::DegeneratePredictor)
    ));
}

#[test]
fn concordance_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let scores: Vec<f64> = (0..300).map(|_| (rng.random::<f64>() * 20.0).round() / 20.0).collect();
    let pos: Vec<bool> = (0..300).map(|_| rng.random::<f64>() < 0.3).collect();
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..300 {
        for j in 0..300 {
            if pos[i] && !pos[j] {
                den += 1.0;
                num += if scores[i] > scores[j] {
                    1.0
                } else if scores[i] == scores[j] {
                    0.5
                } else {
                    0.0
                };
            }
        }
    }
    assert_abs_diff_eq!(concordance(&scores, &pos).unwrap(), num / den, epsilon = 1e-12);
}

#[test]
fn pairwise_cstat_uses_conditional_risk() {
    // three categories; pair {3,1} compares P3/(P1+P3)
    let risks = [0.6, 0.3, 0.1, 0.2, 0.2, 0.6, 0.5, 0.1, 0.4, 0.7, 0.2, 0.1];
    let y = [1, 3, 3, 2];
    assert_abs_diff_eq!(pairwise_cstat(&risks, &y, 3, 1).unwrap(), 1.0, epsilon = 1e-15);
    assert!(matches!(pairwise_cstat(&risks, &[1, 1, 1, 2], 3, 1), Err(Error::UndefinedConcordance(3))));
}
