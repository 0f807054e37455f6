//! Writes the synthetic 12-bus feeder, a one-year base load, the default
//! parameter file and a sample configuration into a directory
//! (default `data/`).

use std::path::PathBuf;

use pevgrid::fixtures;
use pevgrid_cli::{ingest, params};

const CONFIG: &str = r#"# Sample run on the synthetic 12-bus feeder.
feeder = "feeder.csv"
base_load = "base_load.csv"
params = "params.toml"
out = "../out"
seed = 2020
iterations = 100
horizon_days = 365
resolution_h = 0.25
monitored_buses = [3, 5, 11]

# Exactly one of: scenario = <1..10 or list>, [mixed], [custom].
scenario = [1, 3, 5]

# [mixed]
# pl = [50, 100, 200, 300]
# area = "suburban"

# [custom]
# label = "depot"
# class = "ride_service"
# count = 200
# charge_kw = 120.0
# battery_kwh = 60.0
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "data".into()));
    std::fs::create_dir_all(&dir)?;
    ingest::write_feeder(&dir.join("feeder.csv"), &fixtures::twelve_bus_feeder())?;
    ingest::write_base_load(&dir.join("base_load.csv"), &fixtures::synthetic_base_load(365, 0.25), true)?;
    std::fs::write(dir.join("params.toml"), params::render_default_file())?;
    std::fs::write(dir.join("config.toml"), CONFIG)?;
    println!("wrote {}", dir.display());
    Ok(())
}
