use approx::assert_abs_diff_eq;
use mnlss::glm::{fit_binary, fit_intercept_only, fit_multinomial, multinomial_loglik, multinomial_score, Dataset};
use mnlss::simstudy::{generate_dataset, scenario};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn data(id: u32, n: usize, seed: u64) -> Dataset {
    generate_dataset(&scenario(id).unwrap(), n, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[test]
fn score_vanishes_at_the_mle() {
    let d = data(3, 3_000, 1);
    let fit = fit_multinomial(&d).unwrap();
    let (lnl, score) = multinomial_score(&d, &fit.coefficients);
    assert_abs_diff_eq!(lnl, fit.lnl, epsilon = 1e-9);
    assert!(score.iter().all(|g| g.abs() < 1e-8), "{score:?}");
    assert!(fit.score_norm < 1e-8);
}

#[test]
fn score_matches_finite_differences() {
    let d = data(5, 1_500, 2);
    let theta: Vec<Vec<f64>> = vec![vec![0.1, 0.2, -0.3, 0.0, 0.4, -0.1], vec![-1.0, 0.3, 0.1, -0.2, 0.0, 0.5]];
    let (_, grad) = multinomial_score(&d, &theta);
    let h = 1e-5;
    for j in 0..2 {
        for a in 0..6 {
            let mut up = theta.clone();
            let mut dn = theta.clone();
            up[j][a] += h;
            dn[j][a] -= h;
            let fd = (multinomial_loglik(&d, &up) - multinomial_loglik(&d, &dn)) / (2.0 * h);
            assert_abs_diff_eq!(fd, grad[j * 6 + a], epsilon = 1e-5 * (1.0 + fd.abs()));
        }
    }
}

#[test]
fn two_category_multinomial_is_binary() {
    let d = data(1, 5_000, 3).pair_subset(2, 1);
    let mn = fit_multinomial(&d).unwrap();
    let bin = fit_binary(&d).unwrap();
    for (a, b) in mn.coefficients[0].iter().zip(&bin.coefficients) {
        assert_abs_diff_eq!(a, b, epsilon = 1e-8);
    }
    assert_abs_diff_eq!(mn.lnl, bin.lnl, epsilon = 1e-8);
    assert_abs_diff_eq!(mn.lr(), bin.lr(), epsilon = 1e-7);
}

#[test]
fn begg_gray_agreement() {
    let d = data(4, 100_000, 4);
    let mn = fit_multinomial(&d).unwrap();
    for k in 2..=3 {
        let dl = fit_binary(&d.pair_subset(k, 1)).unwrap();
        for (a, b) in mn.coefficients[k - 2].iter().zip(&dl.coefficients) {
            assert!((a - b).abs() <= 0.05, "k={k}: {a} vs {b}");
        }
    }
}

#[test]
fn recovers_generating_coefficients() {
    let spec = scenario(9).unwrap();
    let d = generate_dataset(&spec, 500_000, &mut ChaCha8Rng::seed_from_u64(5));
    let fit = fit_multinomial(&d).unwrap();
    for j in 0..2 {
        for (est, truth) in fit.coefficients[j].iter().zip(&spec.beta[j]) {
            assert!((est - truth).abs() < 0.02, "{est} vs {truth}");
        }
    }
}

#[test]
fn null_fit_matches_counts() {
    let d = data(2, 20_000, 6);
    let null = fit_intercept_only(&d).unwrap();
    let c = d.category_counts();
    assert_abs_diff_eq!(null.intercepts[0], (c[1] as f64 / c[0] as f64).ln(), epsilon = 1e-12);
    let fit = fit_multinomial(&d).unwrap();
    assert_abs_diff_eq!(fit.lnl_null, null.lnl, epsilon = 1e-6);
    assert!(fit.lr() > 0.0);
}
