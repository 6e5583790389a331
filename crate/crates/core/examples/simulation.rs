//! A reduced shrinkage study for one scenario, written to CSV.
//!
//! ```sh
//! cargo run --release --example simulation -- 4 target/sim
//! ```

use std::path::PathBuf;

use mnlss::simstudy::{run_study, scenario, write_study, DevSize, Estimand, RunConfig};

fn main() -> mnlss::Result<()> {
    let mut args = std::env::args().skip(1);
    let id: u32 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);
    let out: Option<PathBuf> = args.next().map(PathBuf::from);

    let mut rc = RunConfig::new(scenario(id).expect("scenario id 1 to 12"), 2024);
    rc.n_values = vec![DevSize::Fixed(250), DevSize::NMn, DevSize::NDl];
    rc.reps = 50;
    rc.calc_cohort = 200_000;
    rc.validation_n = 100_000;
    let study = run_study(&rc)?;

    println!("{}", study.scenario.label);
    for cell in &study.cells {
        let Some(s) = &cell.summary else {
            println!("{:>5} ({}): every replicate excluded", cell.n, cell.size);
            continue;
        };
        println!(
            "{:>5} ({:>4}): median S_MN_21 {:.3}, S_MN_31 {:.3}, S_DL_31 {:.3}, S_VH_DL_31 {:.3}; {} excluded",
            cell.n,
            cell.size,
            s.median(Estimand::SMn21),
            s.median(Estimand::SMn31),
            s.median(Estimand::SDl31),
            s.median(Estimand::SVhDl31),
            s.n_excluded
        );
    }
    if let Some(dir) = out {
        write_study(&study, &dir)?;
        println!("wrote {}", dir.display());
    }
    Ok(())
}
