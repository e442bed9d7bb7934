//! Declarative scenario files and the task runner behind the CLI.
//!
//! A scenario is a JSON object:
//!
//! ```json
//! {
//!   "name": "case1",
//!   "task": "bound",
//!   "units": {"hbar": 1.0, "omega": 1.0},
//!   "states": {
//!     "rho1": {"bloch": [0.0, 0.0, 1.0]},
//!     "rho2": {"evolved": {"from": "rho1"}}
//!   },
//!   "generator": {"hamiltonian": {"bloch": {"axis": [1.0, 0.0, 0.0]}}},
//!   "time": 1.5707963267948966
//! }
//! ```
//!
//! Matrices are row-major arrays of `[re, im]` pairs. The full schema is in
//! `scenarios/SCHEMA.md`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dynamics::{Generator, LindbladModel, SqueezedVacuum};
use crate::error::QslError;
use crate::operator::{
    bloch_to_state, random_state, BlochVector, CMatrix, Observable, QuantumState, C64,
};

mod table;
mod tasks;

pub use table::{emit, Cell, Column, ColumnType, Format, Metadata, ResultTable};
pub use tasks::{
    markovian_curve, mixing_example, reproduce, run, sweep_instance, sweep_report, sweep_threads,
    CurveOptions, Fixture, Fixtures, MixingExample, SweepInstance,
};

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid scenario at `{path}`{}: {message}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    Validation {
        path: String,
        line: Option<usize>,
        message: String,
    },
    #[error("{context}: {source}")]
    Run {
        context: String,
        #[source]
        source: QslError,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl ScenarioError {
    pub(crate) fn from_json(e: serde_json::Error) -> Self {
        ScenarioError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }

    pub(crate) fn run(context: impl Into<String>) -> impl FnOnce(QslError) -> ScenarioError {
        let context = context.into();
        move |source| ScenarioError::Run { context, source }
    }
}

pub type MatrixSpec = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Bound,
    Compare,
    Sweep,
    Evolve,
    Interfere,
    Reproduce,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Bound => "bound",
            Task::Compare => "compare",
            Task::Sweep => "sweep",
            Task::Evolve => "evolve",
            Task::Interfere => "interfere",
            Task::Reproduce => "reproduce",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Units {
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(default = "one")]
    pub omega: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for Units {
    fn default() -> Self {
        Units {
            hbar: 1.0,
            omega: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    Matrix(MatrixSpec),
    Bloch([f64; 3]),
    Random {
        dim: usize,
        rank: Option<usize>,
        seed: u64,
    },
    /// The state `from` propagated by the scenario generator for `time`
    /// (defaults to the scenario's scalar time).
    Evolved {
        from: String,
        time: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum HamiltonianSpec {
    Matrix(MatrixSpec),
    Bloch {
        axis: [f64; 3],
        omega: Option<f64>,
        #[serde(default)]
        alpha_phase: f64,
    },
    Random {
        dim: usize,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LindbladSpec {
    pub hamiltonian: Option<HamiltonianSpec>,
    #[serde(default)]
    pub jumps: Vec<MatrixSpec>,
    pub coeffs: Option<MatrixSpec>,
    /// `[1/T₁, 1/T₂, 1/T₃]` of the squeezed-vacuum qubit.
    pub rates: Option<[f64; 3]>,
    pub w_eq: Option<f64>,
    pub rabi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorSpec {
    Hamiltonian(HamiltonianSpec),
    Lindblad(LindbladSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TimeSpec {
    Scalar(f64),
    List(Vec<f64>),
    Grid {
        start: f64,
        stop: f64,
        points: usize,
    },
}

impl TimeSpec {
    pub fn values(&self) -> Vec<f64> {
        match self {
            TimeSpec::Scalar(t) => vec![*t],
            TimeSpec::List(v) => v.clone(),
            TimeSpec::Grid {
                start,
                stop,
                points,
            } => {
                let n = (*points).max(2);
                (0..n)
                    .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
                    .collect()
            }
        }
    }

    pub fn scalar(&self) -> Option<f64> {
        match self {
            TimeSpec::Scalar(t) => Some(*t),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGroup {
    pub dim: usize,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    pub initial: Option<String>,
    #[serde(rename = "final")]
    pub final_state: Option<String>,
    pub alpha_grid: Option<Vec<f64>>,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    pub seeds: Option<Vec<u64>>,
    pub sweep: Option<Vec<SweepGroup>>,
    /// Frobenius tolerance for first-passage times.
    pub tolerance: Option<f64>,
    /// Slack allowed in validity and ordering checks.
    pub slack: Option<f64>,
    pub t_max: Option<f64>,
    /// Runs the damping curve of the pure-dephasing qubit with this `λ₁`.
    pub lambda1: Option<f64>,
    pub segments: Option<usize>,
    /// Output columns, in order.
    pub columns: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub task: Task,
    #[serde(default)]
    pub units: Units,
    #[serde(default)]
    pub states: BTreeMap<String, StateSpec>,
    pub generator: Option<GeneratorSpec>,
    pub time: Option<TimeSpec>,
    #[serde(default)]
    pub options: Options,
}

/// States and generator built from a validated scenario.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub states: BTreeMap<String, QuantumState>,
    pub generator: Option<Generator>,
    pub squeezed: Option<SqueezedVacuum>,
    /// Propagation time of each `evolved` state.
    pub evolved_times: BTreeMap<String, f64>,
}

impl Resolved {
    pub fn state(&self, name: &str) -> &QuantumState {
        &self.states[name]
    }

    pub fn hamiltonian(&self) -> Option<&Observable> {
        match &self.generator {
            Some(Generator::Unitary(h)) => Some(h),
            _ => None,
        }
    }
}

pub fn parse_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    parse_scenario_str(&std::fs::read_to_string(path)?)
}

pub fn parse_scenario_str(text: &str) -> Result<Scenario, ScenarioError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let scenario: Scenario = match serde_path_to_error::deserialize(&mut de) {
        Ok(s) => s,
        Err(e) => {
            let path = e.path().to_string();
            let inner = e.into_inner();
            if inner.is_data() {
                return Err(ScenarioError::Validation {
                    path,
                    line: Some(inner.line()),
                    message: inner.to_string(),
                });
            }
            return Err(ScenarioError::from_json(inner));
        }
    };
    de.end().map_err(ScenarioError::from_json)?;
    scenario.resolve().map_err(|e| anchor(e, text))?;
    Ok(scenario)
}

/// Fills in the line of the innermost key on `path` by scanning the source.
fn anchor(err: ScenarioError, text: &str) -> ScenarioError {
    match err {
        ScenarioError::Validation {
            path,
            line: None,
            message,
        } => {
            let mut cursor = 0;
            let mut found = None;
            for key in path.split('.').filter(|k| k.parse::<usize>().is_err()) {
                let needle = format!("\"{key}\"");
                if let Some(off) = text[cursor..].find(&needle) {
                    cursor += off;
                    found = Some(cursor);
                }
            }
            let line = found.map(|pos| text[..pos].matches('\n').count() + 1);
            ScenarioError::Validation {
                path,
                line,
                message,
            }
        }
        other => other,
    }
}

fn invalid(path: impl Into<String>, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Validation {
        path: path.into(),
        line: None,
        message: message.into(),
    }
}

fn matrix_from_spec(spec: &MatrixSpec, path: &str) -> Result<CMatrix, ScenarioError> {
    let n = spec.len();
    if n == 0 || spec.iter().any(|row| row.len() != n) {
        return Err(invalid(
            path,
            format!("matrix must be square and non-empty ({n} rows)"),
        ));
    }
    if spec.iter().flatten().flatten().any(|x| !x.is_finite()) {
        return Err(invalid(path, "matrix entries must be finite"));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| {
        C64::new(spec[i][j][0], spec[i][j][1])
    }))
}

pub fn matrix_to_spec(m: &CMatrix) -> MatrixSpec {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

fn hamiltonian_from_spec(
    spec: &HamiltonianSpec,
    units: Units,
    path: &str,
) -> Result<Observable, ScenarioError> {
    let wrap = |e: QslError| invalid(path, e.to_string());
    match spec {
        HamiltonianSpec::Matrix(m) => Observable::with_units(
            matrix_from_spec(m, &format!("{path}.matrix"))?,
            units.hbar,
            units.omega,
        )
        .map_err(wrap),
        HamiltonianSpec::Bloch {
            axis,
            omega,
            alpha_phase,
        } => Observable::bloch(
            *axis,
            omega.unwrap_or(units.omega),
            *alpha_phase,
            units.hbar,
        )
        .map_err(|e| invalid(format!("{path}.bloch.axis"), e.to_string())),
        HamiltonianSpec::Random { dim, seed } => {
            if *dim == 0 {
                return Err(invalid(
                    format!("{path}.random.dim"),
                    "dim must be positive",
                ));
            }
            let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(*seed);
            let h = crate::operator::random_hamiltonian_with(*dim, &mut rng);
            Observable::with_units(h.matrix().clone(), units.hbar, units.omega).map_err(wrap)
        }
    }
}

impl Scenario {
    /// SHA-256 over the canonical serialization, first 8 bytes in hex.
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_string(self).expect("scenario serializes");
        Sha256::digest(canonical.as_bytes())
            .iter()
            .take(8)
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn initial_name(&self) -> &str {
        self.options.initial.as_deref().unwrap_or("rho1")
    }

    pub fn final_name(&self) -> &str {
        self.options.final_state.as_deref().unwrap_or("rho2")
    }

    fn require_state(&self, name: &str, key: &str) -> Result<(), ScenarioError> {
        if self.states.contains_key(name) {
            Ok(())
        } else {
            Err(invalid(
                format!("options.{key}"),
                format!("state `{name}` is not defined under `states`"),
            ))
        }
    }

    /// Validates the scenario and builds its states and generator.
    pub fn resolve(&self) -> Result<Resolved, ScenarioError> {
        let units = self.units;
        if !(units.hbar > 0.0 && units.hbar.is_finite()) {
            return Err(invalid("units.hbar", "hbar must be positive"));
        }
        if !units.omega.is_finite() {
            return Err(invalid("units.omega", "omega must be finite"));
        }
        let (generator, squeezed) = match &self.generator {
            None => (None, None),
            Some(GeneratorSpec::Hamiltonian(h)) => (
                Some(Generator::Unitary(hamiltonian_from_spec(
                    h,
                    units,
                    "generator.hamiltonian",
                )?)),
                None,
            ),
            Some(GeneratorSpec::Lindblad(l)) => {
                let (model, squeezed) = self.lindblad_from_spec(l)?;
                (Some(Generator::Lindblad(model)), squeezed)
            }
        };
        self.validate_time()?;
        self.validate_options()?;

        let mut states = BTreeMap::new();
        let mut evolved_times = BTreeMap::new();
        for (name, spec) in &self.states {
            let path = format!("states.{name}");
            let state = match spec {
                StateSpec::Matrix(m) => {
                    QuantumState::new(matrix_from_spec(m, &format!("{path}.matrix"))?)
                        .map_err(|e| invalid(format!("{path}.matrix"), e.to_string()))?
                }
                StateSpec::Bloch(r) => BlochVector::new(*r)
                    .and_then(|b| bloch_to_state(&b))
                    .map_err(|e| invalid(format!("{path}.bloch"), e.to_string()))?,
                StateSpec::Random { dim, rank, seed } => {
                    let rank = rank.unwrap_or(*dim);
                    if *dim == 0 || rank == 0 || rank > *dim {
                        return Err(invalid(
                            format!("{path}.random"),
                            format!("need 1 <= rank <= dim (dim {dim}, rank {rank})"),
                        ));
                    }
                    random_state(*dim, rank, *seed)
                        .map_err(|e| invalid(format!("{path}.random"), e.to_string()))?
                }
                StateSpec::Evolved { .. } => continue,
            };
            states.insert(name.clone(), state);
        }
        for (name, spec) in &self.states {
            let StateSpec::Evolved { from, time } = spec else {
                continue;
            };
            let path = format!("states.{name}.evolved");
            let source = states.get(from).cloned().ok_or_else(|| {
                invalid(
                    format!("{path}.from"),
                    format!("`{from}` must name a state that is not itself evolved"),
                )
            })?;
            let t = time
                .or_else(|| self.time.as_ref().and_then(TimeSpec::scalar))
                .ok_or_else(|| {
                    invalid(
                        format!("{path}.time"),
                        "no time given and the scenario time is not a scalar",
                    )
                })?;
            if !(t >= 0.0 && t.is_finite()) {
                return Err(invalid(
                    format!("{path}.time"),
                    "time must be finite and non-negative",
                ));
            }
            let g = generator
                .as_ref()
                .ok_or_else(|| invalid("generator", "evolved states need a generator"))?;
            if g.dim() != source.dim() {
                return Err(invalid(
                    format!("{path}.from"),
                    format!(
                        "state dimension {} differs from generator dimension {}",
                        source.dim(),
                        g.dim()
                    ),
                ));
            }
            let state = g
                .evolve(&source, t)
                .map_err(|e| invalid(path.clone(), e.to_string()))?;
            states.insert(name.clone(), state);
            evolved_times.insert(name.clone(), t);
        }
        if let Some(g) = &generator {
            for (name, s) in &states {
                if s.dim() != g.dim() {
                    return Err(invalid(
                        format!("states.{name}"),
                        format!(
                            "state dimension {} differs from generator dimension {}",
                            s.dim(),
                            g.dim()
                        ),
                    ));
                }
            }
        }
        self.validate_task(generator.as_ref())?;
        Ok(Resolved {
            states,
            generator,
            squeezed,
            evolved_times,
        })
    }

    fn lindblad_from_spec(
        &self,
        l: &LindbladSpec,
    ) -> Result<(LindbladModel, Option<SqueezedVacuum>), ScenarioError> {
        let path = "generator.lindblad";
        match (&l.rates, &l.coeffs) {
            (Some(_), Some(_)) => Err(invalid(path, "give either `rates` or `coeffs`, not both")),
            (None, None) => Err(invalid(path, "one of `rates` or `coeffs` is required")),
            (Some(rates), None) => {
                if l.hamiltonian.is_some() || !l.jumps.is_empty() {
                    return Err(invalid(path, "`rates` fixes the model; `hamiltonian` and `jumps` are not allowed with it"));
                }
                let mut sv =
                    SqueezedVacuum::new(rates[0], rates[1], rates[2], l.w_eq.unwrap_or(0.0))
                        .map_err(|e| invalid(format!("{path}.rates"), e.to_string()))?
                        .with_rabi(l.rabi.unwrap_or(0.0));
                sv.hbar = self.units.hbar;
                let model = sv.model().map_err(|e| invalid(path, e.to_string()))?;
                Ok((model, Some(sv)))
            }
            (None, Some(coeffs)) => {
                if l.w_eq.is_some() || l.rabi.is_some() {
                    return Err(invalid(path, "`w_eq` and `rabi` only apply with `rates`"));
                }
                let jumps = l
                    .jumps
                    .iter()
                    .enumerate()
                    .map(|(i, j)| matrix_from_spec(j, &format!("{path}.jumps.{i}")))
                    .collect::<Result<Vec<_>, _>>()?;
                let dim = jumps.first().map(|j| j.nrows());
                let h = match &l.hamiltonian {
                    Some(h) => {
                        hamiltonian_from_spec(h, self.units, &format!("{path}.hamiltonian"))?
                    }
                    None => Observable::with_units(
                        CMatrix::zeros(dim.unwrap_or(1), dim.unwrap_or(1)),
                        self.units.hbar,
                        self.units.omega,
                    )
                    .map_err(|e| invalid(path, e.to_string()))?,
                };
                let c = matrix_from_spec(coeffs, &format!("{path}.coeffs"))?;
                let model =
                    LindbladModel::new(h, jumps, c).map_err(|e| invalid(path, e.to_string()))?;
                Ok((model, None))
            }
        }
    }

    fn validate_time(&self) -> Result<(), ScenarioError> {
        let Some(time) = &self.time else {
            return Ok(());
        };
        if let TimeSpec::Grid {
            start,
            stop,
            points,
        } = time
        {
            if *points < 2 {
                return Err(invalid("time.points", "a grid needs at least 2 points"));
            }
            if !(stop > start) {
                return Err(invalid("time.stop", "stop must exceed start"));
            }
        }
        let values = time.values();
        if values.is_empty() {
            return Err(invalid("time", "time list is empty"));
        }
        if values.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(invalid("time", "times must be finite and non-negative"));
        }
        Ok(())
    }

    fn validate_options(&self) -> Result<(), ScenarioError> {
        let o = &self.options;
        if o.shots == Some(0) {
            return Err(invalid("options.shots", "shots must be positive"));
        }
        if let Some(grid) = &o.alpha_grid {
            if grid.is_empty() || grid.iter().any(|a| !(*a > 0.0) || !a.is_finite()) {
                return Err(invalid(
                    "options.alpha_grid",
                    "alpha values must be positive and finite",
                ));
            }
        }
        for (key, v) in [("tolerance", o.tolerance), ("t_max", o.t_max)] {
            if let Some(v) = v {
                if !(v > 0.0) || !v.is_finite() {
                    return Err(invalid(
                        format!("options.{key}"),
                        "must be positive and finite",
                    ));
                }
            }
        }
        if let Some(s) = o.slack {
            if !(s >= 0.0) {
                return Err(invalid("options.slack", "slack must be non-negative"));
            }
        }
        if o.segments == Some(0) {
            return Err(invalid("options.segments", "segments must be positive"));
        }
        if let Some(groups) = &o.sweep {
            for (i, g) in groups.iter().enumerate() {
                if g.dim < 2 {
                    return Err(invalid(
                        format!("options.sweep.{i}.dim"),
                        "sweep dimension must be at least 2",
                    ));
                }
            }
        }
        if let Some(l) = o.lambda1 {
            if !(l <= 0.0) || !l.is_finite() {
                return Err(invalid(
                    "options.lambda1",
                    "lambda1 must be finite and <= 0",
                ));
            }
        }
        Ok(())
    }

    fn validate_task(&self, generator: Option<&Generator>) -> Result<(), ScenarioError> {
        let unitary = matches!(generator, Some(Generator::Unitary(_)));
        match self.task {
            Task::Bound | Task::Compare => {
                if !unitary {
                    return Err(invalid(
                        "generator",
                        format!("task `{}` needs a hamiltonian generator", self.task.name()),
                    ));
                }
                self.require_state(self.initial_name(), "initial")?;
                self.require_state(self.final_name(), "final")?;
            }
            Task::Interfere => {
                if !unitary {
                    return Err(invalid(
                        "generator",
                        "task `interfere` needs a hamiltonian generator",
                    ));
                }
                self.require_state(self.initial_name(), "initial")?;
                if self.time.as_ref().and_then(TimeSpec::scalar).is_none() {
                    return Err(invalid("time", "task `interfere` needs a scalar time"));
                }
            }
            Task::Evolve => {
                if self.options.lambda1.is_some() {
                    if self.time.is_none() {
                        return Err(invalid("time", "the damping curve needs a time grid"));
                    }
                    return Ok(());
                }
                if generator.is_none() {
                    return Err(invalid("generator", "task `evolve` needs a generator"));
                }
                self.require_state(self.initial_name(), "initial")?;
                if self.time.is_none() {
                    return Err(invalid("time", "task `evolve` needs a time grid"));
                }
            }
            Task::Sweep | Task::Reproduce => {}
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
  "name": "minimal",
  "task": "bound",
  "states": {
    "rho1": {"bloch": [0.0, 0.0, 1.0]},
    "rho2": {"bloch": [0.0, 1.0, 0.0]}
  },
  "generator": {"hamiltonian": {"bloch": {"axis": [1.0, 0.0, 0.0]}}}
}"#;

    #[test]
    fn parses_minimal_bound_scenario() {
        let s = parse_scenario_str(MINIMAL).unwrap();
        assert_eq!(s.task, Task::Bound);
        assert_eq!(s.units, Units::default());
        assert_eq!(s.resolve().unwrap().states.len(), 2);
    }

    #[test]
    fn bloch_norm_error_names_key_and_line() {
        let text = MINIMAL.replace("[0.0, 1.0, 0.0]", "[0.0, 1.2, 0.0]");
        match parse_scenario_str(&text) {
            Err(ScenarioError::Validation { path, line, .. }) => {
                assert_eq!(path, "states.rho2.bloch");
                assert_eq!(line, Some(6));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected_with_path() {
        let text = MINIMAL.replace("\"axis\"", "\"axes\"");
        match parse_scenario_str(&text) {
            Err(ScenarioError::Validation { path, line, .. }) => {
                assert!(path.starts_with("generator.hamiltonian.bloch"), "{path}");
                assert_eq!(line, Some(8));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_position() {
        assert!(matches!(
            parse_scenario_str("{\n  \"name\": }"),
            Err(ScenarioError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn missing_references_fail() {
        let text = MINIMAL.replace(
            "\"rho2\": {\"bloch\": [0.0, 1.0, 0.0]}",
            "\"rho2\": {\"evolved\": {\"from\": \"nope\", \"time\": 1.0}}",
        );
        match parse_scenario_str(&text) {
            Err(ScenarioError::Validation { path, .. }) => {
                assert_eq!(path, "states.rho2.evolved.from")
            }
            other => panic!("{other:?}"),
        }
        let text = MINIMAL.replace(
            "\"task\": \"bound\"",
            "\"task\": \"bound\", \"options\": {\"final\": \"rho3\"}",
        );
        assert!(
            matches!(parse_scenario_str(&text), Err(ScenarioError::Validation { path, .. }) if path == "options.final")
        );
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let text = MINIMAL.replace(
            "{\"bloch\": [0.0, 1.0, 0.0]}",
            "{\"random\": {\"dim\": 3, \"seed\": 1}}",
        );
        assert!(
            matches!(parse_scenario_str(&text), Err(ScenarioError::Validation { path, .. }) if path == "states.rho2")
        );
    }

    #[test]
    fn digest_ignores_formatting() {
        let a = parse_scenario_str(MINIMAL).unwrap();
        let b = parse_scenario_str(&MINIMAL.replace('\n', " ")).unwrap();
        assert_eq!(a.digest(), b.digest());
        let mut c = a.clone();
        c.options.seed = Some(1);
        assert_ne!(a.digest(), c.digest());
    }

    #[test]
    fn time_grid_values() {
        let g = TimeSpec::Grid {
            start: 0.1,
            stop: 5.0,
            points: 50,
        };
        let v = g.values();
        assert_eq!(v.len(), 50);
        assert_eq!(v[0], 0.1);
        assert_eq!(v[49], 5.0);
    }

    #[test]
    fn matrix_round_trip() {
        let m = CMatrix::from_fn(2, 2, |i, j| C64::new(i as f64, j as f64));
        assert_eq!(matrix_from_spec(&matrix_to_spec(&m), "m").unwrap(), m);
        assert!(matrix_from_spec(&vec![vec![[1.0, 0.0]], vec![]], "m").is_err());
    }
}
