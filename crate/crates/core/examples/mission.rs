//! Short cloud-avoidance mission against the nadir baseline.
//!
//! `cargo run --release --example mission -- [cycles] [seed]`
use dyntarget::config::MissionConfig;
use dyntarget::mission::{simulate, MissionMetrics};

fn main() {
    let mut args = std::env::args().skip(1);
    let n_cycles = args.next().map_or(50, |s| s.parse().expect("cycle count"));
    let seed = args.next().map_or(1, |s| s.parse().expect("seed"));
    let cfg = MissionConfig {
        n_cycles,
        seed,
        ..MissionConfig::default()
    };
    let records = simulate(&cfg).unwrap();
    print!("{}", MissionMetrics::from_records(&records).summary());
    println!("\nexample config:\n{}", cfg.to_toml_string());
}
