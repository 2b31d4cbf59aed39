// Driving the batch commands from a configuration string.

use sptmbqc::cli::{execute, Command, Overrides, RunConfig};

const CONFIG: &str = "
model = aklt
n = 4
plan.site.2 = z 0.5 adaptive
seed = 3
rounds = 5000
sweep.theta = 0:0.3:2
";

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let overrides = Overrides { out: Some(dir.path().to_path_buf()), ..Overrides::default() };
    let config = RunConfig::parse("example.cfg", CONFIG, &overrides)?;
    println!("config hash {}", config.hash());
    for command in [Command::BuildState, Command::Run, Command::Sweep, Command::TeleportDemo] {
        let outcome = execute(command, &config)?;
        println!("[{}] passed: {}\n{}", command.name(), outcome.passed, outcome.summary);
    }
    print!("{}", std::fs::read_to_string(dir.path().join("sweep.csv"))?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
