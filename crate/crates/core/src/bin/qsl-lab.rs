use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qsl_lab::scenario::{emit, parse_scenario, run, Format, Scenario, ScenarioError, Task};

#[derive(Parser)]
#[command(
    name = "qsl-lab",
    version,
    about = "Quantum speed limit bounds for mixed states"
)]
struct Cli {
    /// Scenario file (JSON)
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,
    /// Output file; stdout when omitted
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value = "csv")]
    format: Format,
    /// Overrides the scenario seed
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the scenario shot count
    #[arg(long, global = true)]
    shots: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// All bounds for one initial/final pair
    Bound,
    /// One row per bound with validity against the actual time
    Compare,
    /// Randomized validity sweep (default: 500 qubit instances)
    Sweep,
    /// Evolution table or damping curve
    Evolve,
    /// Simulated interferometric estimate of the bound
    Interfere,
    /// Reproduction suite against the bundled expected values
    Reproduce,
}

impl Command {
    fn task(self) -> Task {
        match self {
            Command::Bound => Task::Bound,
            Command::Compare => Task::Compare,
            Command::Sweep => Task::Sweep,
            Command::Evolve => Task::Evolve,
            Command::Interfere => Task::Interfere,
            Command::Reproduce => Task::Reproduce,
        }
    }
}

fn default_scenario(task: Task) -> Result<Scenario, ScenarioError> {
    match task {
        Task::Sweep | Task::Reproduce => Ok(Scenario {
            name: task.name().to_owned(),
            task,
            units: Default::default(),
            states: Default::default(),
            generator: None,
            time: None,
            options: Default::default(),
        }),
        _ => Err(ScenarioError::Validation {
            path: "--scenario".into(),
            line: None,
            message: format!("`{}` needs a scenario file", task.name()),
        }),
    }
}

fn execute(cli: &Cli) -> Result<bool, ScenarioError> {
    let task = cli.command.task();
    let mut scenario = match &cli.scenario {
        Some(path) => parse_scenario(path)?,
        None => default_scenario(task)?,
    };
    if scenario.task != task {
        return Err(ScenarioError::Validation {
            path: "task".into(),
            line: None,
            message: format!(
                "scenario task is `{}` but the `{}` command was given",
                scenario.task.name(),
                task.name()
            ),
        });
    }
    if cli.seed.is_some() {
        scenario.options.seed = cli.seed;
        scenario.options.seeds = None;
    }
    if cli.shots.is_some() {
        scenario.options.shots = cli.shots;
    }
    let table = run(&scenario)?;
    emit(&table, cli.format, cli.out.as_deref())?;
    if task == Task::Reproduce {
        let passes = table.bools("pass").unwrap_or_default();
        for (row, ok) in table.rows.iter().zip(&passes) {
            if !ok {
                eprintln!(
                    "reproduction check failed: {}",
                    row[0].as_str().unwrap_or("?")
                );
            }
        }
        return Ok(passes.iter().all(|&p| p));
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
