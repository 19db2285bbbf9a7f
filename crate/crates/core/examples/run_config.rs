//! Run the shipped default configuration and write its report and CSV
//! tables to a temporary directory.

use restriction_lab::runner::{parse_config, run, write_outputs, DEFAULT_CONFIG};

pub fn run_example() -> restriction_lab::Result<()> {
    let cfg = parse_config(DEFAULT_CONFIG)?;
    let report = run(&cfg, None)?;
    for r in &report.reports {
        println!("{:<5} {:<36} {:.6e}", if r.pass { "pass" } else { "FAIL" }, r.check_id, r.estimate);
    }
    let prefix = std::env::temp_dir().join("restriction-lab-example").join("default");
    let written = write_outputs(&report, &prefix)?;
    println!("{} of {} passed; {} files under {}", report.summary.passed, report.summary.total, written.len(), prefix.display());
    Ok(())
}

#[allow(dead_code)]
fn main() -> restriction_lab::Result<()> {
    run_example()
}
