//! Generate a synthetic city, run every stage and read the outputs back.
//!
//! `cargo run --example synthetic_pipeline -- [DIR] [ZONES]`

use std::path::PathBuf;

use mobility_flow::io::{formats, load_scenario, run_pipeline, synth_scenario, SynthSpec};

fn main() -> mobility_flow::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("mobflow-synthetic"));
    let zones = args.next().and_then(|z| z.parse().ok()).unwrap_or(12);

    let config = synth_scenario(&SynthSpec::new(zones, 42), &dir)?;
    println!("scenario {}", config.display());
    let cfg = load_scenario(&config)?;
    let run = run_pipeline(&cfg)?;

    let report = &run.report;
    for t in &report.stages {
        println!("{:<10} {:.3} s", t.stage.name(), t.seconds);
    }
    println!(
        "{} zones, {} trips, {} routed, gwpc cache hit: {:?}",
        report.counts.zones, report.counts.trips, report.counts.routed_trips, report.gwpc_cache_hit
    );
    for c in &report.checks {
        println!("check {:<20} {} ({:.1e})", c.name, if c.passed { "pass" } else { "FAIL" }, c.residual);
    }

    let loads = formats::read_loads_csv(&cfg.output_path().join("loads.csv"))?;
    let mut busiest: Vec<_> = loads.loads.iter().collect();
    busiest.sort_by(|a, b| b.1.total_cmp(a.1));
    println!("busiest segments:");
    for (id, flow) in busiest.iter().take(5) {
        println!("  {id:>5} {flow:>10.1} per day");
    }
    Ok(())
}
