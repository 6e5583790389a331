//! Sample size when nothing is known about model performance: every R² is
//! set to 15% of its maximum.

use mnlss::config::StudyConfig;
use mnlss::report::analyse;

const CONFIG: &str = r#"
k_categories = 4
q_parameters = 12
category_proportions = [0.55, 0.25, 0.12, 0.08]

[overall]
nagelkerke_fallback = true

[pairs."2,1"]
nagelkerke_fallback = true
[pairs."3,1"]
nagelkerke_fallback = true
[pairs."4,1"]
nagelkerke_fallback = true
[pairs."3,2"]
nagelkerke_fallback = true
[pairs."4,2"]
nagelkerke_fallback = true
[pairs."4,3"]
nagelkerke_fallback = true
"#;

fn main() -> mnlss::Result<()> {
    let analysis = analyse(&StudyConfig::from_toml(CONFIG)?)?;
    print!("{}", analysis.render_text());
    Ok(())
}
