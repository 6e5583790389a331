use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::glm::Dataset;

pub const PREDICTORS: usize = 5;

/// A three-category generating model with five standard-normal predictors.
///
/// `beta[j]` holds `(β_{0,j+2}, β_{1,j+2}, …, β_{5,j+2})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    #[serde(default)]
    pub id: u32,
    pub label: String,
    pub beta: [[f64; PREDICTORS + 1]; 2],
    /// Approximate outcome proportions; documentation only.
    #[serde(default)]
    pub expected_freqs: [f64; 3],
}

impl ScenarioSpec {
    pub fn validate(&self) -> crate::Result<()> {
        if self.beta.iter().flatten().any(|b| !b.is_finite()) {
            return Err(crate::Error::Validation(format!(
                "scenario {}: non-finite coefficient",
                self.label
            )));
        }
        Ok(())
    }

    /// `(P(Y=1), P(Y=2), P(Y=3))` for one predictor row.
    pub fn probabilities(&self, x: &[f64]) -> [f64; 3] {
        let eta = |b: &[f64; PREDICTORS + 1]| {
            b[0] + b[1..].iter().zip(x).map(|(c, v)| c * v).sum::<f64>()
        };
        let e2 = eta(&self.beta[0]).exp();
        let e3 = eta(&self.beta[1]).exp();
        let denom = 1.0 + e2 + e3;
        [1.0 / denom, e2 / denom, e3 / denom]
    }
}

const SMALL: [[f64; 5]; 2] = [
    [0.5, -0.25, -0.125, 0.25, 0.375],
    [0.375, -0.5, -0.25, -0.375, 0.125],
];

struct Row {
    label: &'static str,
    b02: f64,
    b03: f64,
    freqs: [f64; 3],
}

const ROWS: [Row; 6] = [
    Row { label: "all same", b02: 0.0, b03: 0.0, freqs: [0.33, 0.33, 0.33] },
    Row { label: "one lower", b02: 0.0, b03: -0.75, freqs: [0.40, 0.40, 0.19] },
    Row { label: "all different", b02: -0.35, b03: -0.85, freqs: [0.45, 0.33, 0.21] },
    Row { label: "one rare category", b02: -0.4, b03: -1.7, freqs: [0.52, 0.36, 0.11] },
    Row { label: "one very rare category", b02: -0.53, b03: -2.4, freqs: [0.58, 0.36, 0.06] },
    Row { label: "two very rare categories", b02: -2.9, b03: -2.9, freqs: [0.88, 0.06, 0.06] },
];

const LARGE_INTERCEPTS: [(f64, f64); 6] = [
    (0.0, -1.0),
    (0.0, -1.0),
    (-0.4, -1.0),
    (-0.5, -2.0),
    (-0.65, -2.85),
    (-3.5, -3.5),
];

const LARGE_FREQS: [[f64; 3]; 6] = [
    [0.33, 0.33, 0.34],
    [0.40, 0.40, 0.19],
    [0.45, 0.33, 0.21],
    [0.52, 0.36, 0.11],
    [0.58, 0.36, 0.06],
    [0.88, 0.06, 0.06],
];

fn build(id: u32, label: &str, intercepts: (f64, f64), scale: f64, freqs: [f64; 3]) -> ScenarioSpec {
    let mut beta = [[0.0; PREDICTORS + 1]; 2];
    beta[0][0] = intercepts.0;
    beta[1][0] = intercepts.1;
    for j in 0..2 {
        for q in 0..PREDICTORS {
            beta[j][q + 1] = scale * SMALL[j][q];
        }
    }
    ScenarioSpec {
        id,
        label: format!("scenario {id} ({label})"),
        beta,
        expected_freqs: freqs,
    }
}

/// The twelve generating models: 1–6 with the base covariate effects,
/// 7–12 with every effect doubled and intercepts re-tuned to keep the
/// outcome proportions.
pub fn catalog() -> Vec<ScenarioSpec> {
    let small = ROWS
        .iter()
        .enumerate()
        .map(|(i, r)| build(i as u32 + 1, r.label, (r.b02, r.b03), 1.0, r.freqs));
    let large = ROWS
        .iter()
        .enumerate()
        .map(|(i, r)| build(i as u32 + 7, r.label, LARGE_INTERCEPTS[i], 2.0, LARGE_FREQS[i]));
    small.chain(large).collect()
}

pub fn scenario(id: u32) -> Option<ScenarioSpec> {
    catalog().into_iter().find(|s| s.id == id)
}

/// `n` subjects with `X_q ~ N(0, 1)` and outcome drawn from the scenario's
/// multinomial probabilities.
pub fn generate_dataset<R: Rng + ?Sized>(spec: &ScenarioSpec, n: usize, rng: &mut R) -> Dataset {
    let mut x = Vec::with_capacity(n * PREDICTORS);
    let mut y = Vec::with_capacity(n);
    let mut row = [0.0; PREDICTORS];
    for _ in 0..n {
        for v in row.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
        let p = spec.probabilities(&row);
        let u: f64 = rng.random();
        let label = if u < p[0] {
            1
        } else if u < p[0] + p[1] {
            2
        } else {
            3
        };
        x.extend_from_slice(&row);
        y.push(label);
    }
    Dataset::new(x, PREDICTORS, y).expect("generated dataset is well formed")
}
