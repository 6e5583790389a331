use mnlss::glm::Dataset;
use mnlss::simstudy::{
    self, evaluate_dataset, generate_dataset, run_study, scenario, summarize, DevSize, Estimand, RunConfig,
    ValidationCohort, REPLICATE_HEADER, SUMMARY_HEADER,
};
use mnlss::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn frequencies(id: u32) -> Vec<f64> {
    let d = generate_dataset(&scenario(id).unwrap(), 100_000, &mut ChaCha8Rng::seed_from_u64(id as u64));
    d.category_counts().iter().map(|&c| c as f64 / d.n() as f64).collect()
}

#[test]
fn scenario_one_is_balanced() {
    for f in frequencies(1) {
        assert!((f - 0.33).abs() <= 0.01, "{f}");
    }
}

#[test]
fn scenario_six_has_two_rare_categories() {
    let f = frequencies(6);
    for (got, want) in f.iter().zip([0.88, 0.06, 0.06]) {
        assert!((got - want).abs() <= 0.005, "{f:?}");
    }
}

#[test]
fn catalog_matches_table() {
    let c = simstudy::catalog();
    assert_eq!(c.len(), 12);
    assert_eq!(c[0].beta[0][1], 0.5);
    assert_eq!(c[6].beta[0][1], 1.0);
    assert_eq!(c[5].beta[0][0], -2.9);
    assert_eq!(c[11].beta[1][0], -3.5);
}

fn small_config(workers: usize) -> RunConfig {
    let mut rc = RunConfig::new(scenario(3).unwrap(), 99);
    rc.n_values = vec![DevSize::Fixed(250), DevSize::NMn];
    rc.reps = 6;
    rc.calc_cohort = 20_000;
    rc.validation_n = 20_000;
    rc.workers = workers;
    rc
}

fn csv_bytes(rc: &RunConfig) -> (Vec<u8>, Vec<u8>) {
    let s = run_study(rc).unwrap();
    let (mut a, mut b) = (Vec::new(), Vec::new());
    simstudy::write_replicates(&s, &mut a).unwrap();
    simstudy::write_summary(&s, &mut b).unwrap();
    (a, b)
}

#[test]
fn identical_output_across_worker_counts() {
    let one = csv_bytes(&small_config(1));
    assert_eq!(one, csv_bytes(&small_config(1)));
    assert_eq!(one, csv_bytes(&small_config(4)));
    let mut other = small_config(1);
    other.seed = 100;
    assert_ne!(one.0, csv_bytes(&other).0);
}

#[test]
fn csv_layout() {
    let (reps, summary) = csv_bytes(&small_config(0));
    let reps = String::from_utf8(reps).unwrap();
    let summary = String::from_utf8(summary).unwrap();
    assert_eq!(reps.lines().next().unwrap(), REPLICATE_HEADER.join(","));
    assert_eq!(summary.lines().next().unwrap(), SUMMARY_HEADER.join(","));
    assert_eq!(reps.lines().count(), 1 + 2 * 6);
    assert_eq!(summary.lines().count(), 1 + 2 * 7);
    // full precision: every value parses back to the stored f64
    let mut rdr = csv::Reader::from_reader(reps.as_bytes());
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let v: f64 = rec[3].parse().unwrap();
        assert_eq!(v.to_string(), &rec[3]);
    }
}

#[test]
fn single_replicate_passes_through() {
    let mut rc = small_config(1);
    rc.n_values = vec![DevSize::Fixed(400)];
    rc.reps = 1;
    let s = run_study(&rc).unwrap();
    let cell = &s.cells[0];
    let r = &cell.replicates[0];
    assert!(r.converged);
    let sum = cell.summary.as_ref().unwrap();
    for e in Estimand::ALL {
        let v = sum.get(e);
        assert_eq!(v.p50, r.get(e));
        assert_eq!(v.mean, r.get(e));
        assert_eq!(v.p2_5, v.p97_5);
    }
}

#[test]
fn missing_category_is_flagged_and_excluded() {
    let spec = scenario(6).unwrap();
    let validation = ValidationCohort::generate(&spec, 10_000, &mut ChaCha8Rng::seed_from_u64(1));
    let dev = Dataset::new(vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.5, 0.4, 0.3, 0.2, 0.1], 5, vec![1, 2]).unwrap();
    let r = evaluate_dataset(0, &dev, &validation);
    assert!(!r.converged);
    assert!(r.s_mn_21.is_nan());
    assert!(r.failure.is_some());
    assert!(matches!(summarize(&[r]), Err(Error::EmptySummary { excluded: 1 })));
}

#[test]
fn tiny_samples_are_counted_not_dropped() {
    let mut rc = RunConfig::new(scenario(6).unwrap(), 5);
    rc.n_values = vec![DevSize::Fixed(30)];
    rc.reps = 20;
    rc.validation_n = 10_000;
    let s = run_study(&rc).unwrap();
    let cell = &s.cells[0];
    assert_eq!(cell.replicates.len(), 20);
    assert!(cell.n_excluded() > 0);
    if let Some(sum) = &cell.summary {
        assert_eq!(sum.n_converged + sum.n_excluded, 20);
    }
}

#[test]
fn multinomial_and_distinct_slopes_converge_with_n() {
    let mut rc = RunConfig::new(scenario(2).unwrap(), 7);
    rc.n_values = vec![DevSize::Fixed(250), DevSize::Fixed(1000)];
    rc.reps = 30;
    rc.validation_n = 50_000;
    let s = run_study(&rc).unwrap();
    let gap = |cell: &simstudy::CellResult| {
        let kept: Vec<_> = cell.replicates.iter().filter(|r| r.converged).collect();
        kept.iter()
            .map(|r| (r.s_mn_21 - r.s_dl_21).abs() + (r.s_mn_31 - r.s_dl_31).abs())
            .sum::<f64>()
            / kept.len() as f64
    };
    assert!(gap(&s.cells[1]) < gap(&s.cells[0]));
}

#[test]
fn config_validation() {
    let mut rc = small_config(1);
    rc.reps = 0;
    assert!(run_study(&rc).is_err());
    let mut rc = small_config(1);
    rc.validation_n = 500;
    assert!(run_study(&rc).is_err());
    assert!("N_DL".parse::<DevSize>().unwrap() == DevSize::NDl);
    assert!("0".parse::<DevSize>().is_err());
    assert!("abc".parse::<DevSize>().is_err());
}

#[test]
fn write_errors_carry_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, b"x").unwrap();
    let mut rc = small_config(1);
    rc.n_values = vec![DevSize::Fixed(200)];
    rc.reps = 1;
    let s = run_study(&rc).unwrap();
    let err = simstudy::write_study(&s, &blocker.join("out")).unwrap_err();
    assert!(matches!(err, Error::Io { .. }));
    assert!(err.to_string().contains("file"));

    simstudy::write_study(&s, &dir.path().join("ok")).unwrap();
    assert!(dir.path().join("ok/replicates.csv").exists());
    assert!(dir.path().join("ok/summary.csv").exists());
}
