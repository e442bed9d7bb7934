//! Running a scenario from JSON text and writing both output formats.

use qsl_lab::scenario::{parse_scenario_str, run, ResultTable};

const SCENARIO: &str = r#"{
  "name": "random-qutrit",
  "task": "compare",
  "states": {
    "rho1": {"random": {"dim": 3, "rank": 2, "seed": 9}},
    "rho2": {"evolved": {"from": "rho1"}}
  },
  "generator": {"hamiltonian": {"random": {"dim": 3, "seed": 10}}},
  "time": 0.5
}"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = parse_scenario_str(SCENARIO)?;
    let table = run(&scenario)?;
    print!("{}", table.to_csv()?);
    let json = table.to_json();
    assert_eq!(ResultTable::from_json(&json)?, table);
    println!(
        "json round trip ok, digest {}",
        table.metadata.scenario_digest
    );
    Ok(())
}
