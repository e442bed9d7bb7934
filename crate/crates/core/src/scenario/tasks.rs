//! Task dispatch, sweeps, the damping curve and the reproduction suite.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Deserialize;

use super::table::{Cell, ColumnType, ResultTable};
use super::{invalid, parse_scenario_str, Resolved, Scenario, ScenarioError, SweepGroup, Task};
use crate::bounds::{
    bound_report, campo_bound, campo_lindblad_bound, default_alpha_grid, markovian_bound,
    mixing_inequality_check, purification_bound, tl_bound, BoundReport,
};
use crate::coherence::{affinity, wy_coherence};
use crate::dynamics::{
    evolve_lindblad, evolve_unitary, first_passage_time, markovian_denominator_closed_form,
    qubit_evolution_closed_form, Generator, SqueezedVacuum,
};
use crate::interferometry::{estimate_tl_from_protocol, MeasurementMode};
use crate::operator::{
    bloch_to_state, random_hamiltonian_with, random_state_with, state_to_bloch, BlochVector,
    Observable, QuantumState,
};
use crate::quadrature::SimpsonOptions;

const DEFAULT_PASSAGE_TOL: f64 = 1e-9;
const SWEEP_PASSAGE_TOL: f64 = 1e-11;
const DEFAULT_SLACK: f64 = 1e-8;

/// Thread count from `QSL_LAB_THREADS`; 0 or unset means one per core.
pub fn sweep_threads() -> usize {
    std::env::var("QSL_LAB_THREADS")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(0)
}

fn in_pool<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    match rayon::ThreadPoolBuilder::new()
        .num_threads(sweep_threads())
        .build()
    {
        Ok(pool) => pool.install(f),
        Err(e) => {
            log::warn!("could not build thread pool ({e}); using the global pool");
            f()
        }
    }
}

/// Expected values with tolerances, loaded from the fixtures file.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct Fixtures {
    pub schema_version: u32,
    pub values: Vec<Fixture>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fixture {
    pub key: String,
    pub value: f64,
    pub tolerance: f64,
    /// Printed values that cannot be recomputed here; listed, never asserted.
    #[serde(default)]
    pub excluded: bool,
    #[serde(default)]
    pub note: String,
}

impl Fixtures {
    pub fn bundled() -> Self {
        serde_json::from_str(include_str!("../../fixtures/expected_values.json"))
            .expect("bundled fixtures parse")
    }

    pub fn get(&self, key: &str) -> &Fixture {
        self.values
            .iter()
            .find(|f| f.key == key)
            .unwrap_or_else(|| panic!("fixture `{key}` missing"))
    }
}

/// One random `(ρ₁, H, t)` triple of a validity sweep.
#[derive(Debug, Clone)]
pub struct SweepInstance {
    pub index: usize,
    pub dim: usize,
    pub rho1: QuantumState,
    pub h: Observable,
    pub t: f64,
    pub rho2: QuantumState,
}

/// Instance `index` of the `dim`-dimensional sweep with base `seed`; each
/// instance draws from its own ChaCha stream.
pub fn sweep_instance(dim: usize, seed: u64, index: usize) -> crate::Result<SweepInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((dim as u64) << 48));
    rng.set_stream(index as u64);
    let rank = rng.random_range(1..=dim);
    let rho1 = random_state_with(dim, rank, &mut rng)?;
    let h = random_hamiltonian_with(dim, &mut rng);
    let t = rng.random_range(0.1..2.0);
    let rho2 = evolve_unitary(&rho1, &h, t)?;
    Ok(SweepInstance {
        index,
        dim,
        rho1,
        h,
        t,
        rho2,
    })
}

/// Bound report for a sweep instance, with the first-passage time as the actual time.
pub fn sweep_report(inst: &SweepInstance, tol: f64) -> crate::Result<BoundReport> {
    let actual = first_passage_time(
        &inst.rho1,
        &Generator::Unitary(inst.h.clone()),
        &inst.rho2,
        tol,
        inst.t * (1.0 + 1e-13),
    )?;
    bound_report(
        &inst.rho1,
        &inst.h,
        &inst.rho2,
        &default_alpha_grid(),
        Some(actual),
    )
}

/// Knobs for [`markovian_curve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveOptions {
    pub quadrature: SimpsonOptions,
    /// Grid segments of the purification-length diagnostic.
    pub segments: usize,
}

impl Default for CurveOptions {
    fn default() -> Self {
        CurveOptions {
            quadrature: SimpsonOptions::default(),
            segments: 200,
        }
    }
}

/// The open-system bound and its comparisons for the pure-dephasing qubit
/// starting at `r = (1, 0, 0)`, one row per `τ`.
///
/// Metadata key `crossover_tau` holds the first grid node from which the
/// bound stays above the relative-purity bound (`none` if it never does).
pub fn markovian_curve(
    lambda1: f64,
    taus: &[f64],
    opts: CurveOptions,
) -> Result<ResultTable, ScenarioError> {
    let params =
        SqueezedVacuum::simple_case(lambda1).map_err(ScenarioError::run("damping model"))?;
    let model = params
        .model()
        .map_err(ScenarioError::run("damping model"))?;
    let rho0 = bloch_to_state(&BlochVector([1.0, 0.0, 0.0]))
        .map_err(ScenarioError::run("initial state"))?;
    let rows = in_pool(|| {
        taus.par_iter()
            .map(|&tau| -> Result<Vec<Cell>, ScenarioError> {
                let ctx = || format!("damping curve at tau = {tau}");
                if tau == 0.0 {
                    return Ok(vec![
                        0.0.into(),
                        0.0.into(),
                        0.0.into(),
                        0.0.into(),
                        f64::NAN.into(),
                        f64::NAN.into(),
                        true.into(),
                        false.into(),
                    ]);
                }
                let mb = markovian_bound(&rho0, &model, tau, opts.quadrature)
                    .map_err(ScenarioError::run(ctx()))?;
                let campo = campo_lindblad_bound(&rho0, &model, tau, opts.quadrature)
                    .map_err(ScenarioError::run(ctx()))?;
                let purification = purification_bound(&rho0, &model, tau, opts.segments)
                    .map_err(ScenarioError::run(ctx()))?;
                Ok(vec![
                    tau.into(),
                    mb.value.into(),
                    campo.into(),
                    purification.into(),
                    mb.mean_speed.into(),
                    markovian_denominator_closed_form(lambda1, tau).into(),
                    (mb.value <= tau).into(),
                    (mb.value > campo).into(),
                ])
            })
            .collect::<Result<Vec<_>, _>>()
    })?;
    let mut table = ResultTable::new(&[
        ("tau", ColumnType::Real),
        ("markovian", ColumnType::Real),
        ("campo_style", ColumnType::Real),
        ("purification", ColumnType::Real),
        ("mean_speed", ColumnType::Real),
        ("closed_form_denominator", ColumnType::Real),
        ("valid", ColumnType::Bool),
        ("above_campo", ColumnType::Bool),
    ]);
    for row in rows {
        table.push(row);
    }
    let above = table.bools("above_campo").expect("column exists");
    let crossover = (0..above.len())
        .find(|&i| above[i..].iter().all(|&b| b))
        .map(|i| taus[i]);
    table
        .metadata
        .extra
        .insert("lambda1".into(), format!("{lambda1:?}"));
    table.metadata.extra.insert(
        "crossover_tau".into(),
        crossover
            .map(|t| format!("{t:?}"))
            .unwrap_or_else(|| "none".into()),
    );
    Ok(table)
}

/// Two pure qubit states and a mixing weight for the mixing inequality.
///
/// `n̂ = ẑ`, `r̂₁·n̂ = 1/√2` and `r̂₂·n̂ = √3/2` with the two vectors on
/// opposite azimuths, so `r̂₁·r̂₂ = cos 75°`, the closest admissible value
/// to orthogonality under the other two constraints.
#[derive(Debug, Clone)]
pub struct MixingExample {
    pub rho1: QuantumState,
    pub sigma1: QuantumState,
    pub h: Observable,
    pub p: f64,
}

pub fn mixing_example() -> MixingExample {
    let (s45, s30) = (std::f64::consts::FRAC_PI_4.sin(), 0.5);
    let r1 = BlochVector([s45, 0.0, s45]);
    let r2 = BlochVector([-s30, 0.0, 3f64.sqrt() / 2.0]);
    MixingExample {
        rho1: bloch_to_state(&r1).expect("unit vector"),
        sigma1: bloch_to_state(&r2).expect("unit vector"),
        h: Observable::bloch([0.0, 0.0, 1.0], 1.0, 0.0, 1.0).expect("unit axis"),
        p: 1.0 / 3.0,
    }
}

/// Applies the scenario's task and returns its table.
pub fn run(scenario: &Scenario) -> Result<ResultTable, ScenarioError> {
    let resolved = scenario.resolve()?;
    let table = match scenario.task {
        Task::Bound => run_bound(scenario, &resolved)?,
        Task::Compare => run_compare(scenario, &resolved)?,
        Task::Sweep => run_sweep(scenario)?,
        Task::Evolve => run_evolve(scenario, &resolved)?,
        Task::Interfere => run_interfere(scenario, &resolved)?,
        Task::Reproduce => reproduce(scenario.options.seed.unwrap_or(42))?,
    };
    let mut table = table.finish(&scenario.name, &scenario.digest(), scenario.options.seed);
    if let Some(cols) = &scenario.options.columns {
        let mut names: Vec<&str> = cols.iter().map(String::as_str).collect();
        if !names.contains(&"scenario_digest") {
            names.push("scenario_digest");
        }
        table = table
            .select(&names)
            .ok_or_else(|| invalid("options.columns", format!("unknown column in {cols:?}")))?;
    }
    Ok(table)
}

/// First-passage time between the initial and final states.
fn actual_time(
    scenario: &Scenario,
    resolved: &Resolved,
    h: &Observable,
) -> Result<f64, ScenarioError> {
    let (a, b) = (scenario.initial_name(), scenario.final_name());
    let horizon = resolved
        .evolved_times
        .get(b)
        .copied()
        .or(scenario.options.t_max)
        .or_else(|| scenario.time.as_ref().and_then(|t| t.scalar()))
        .unwrap_or(100.0);
    if horizon == 0.0 {
        return Ok(0.0);
    }
    let tol = scenario.options.tolerance.unwrap_or(DEFAULT_PASSAGE_TOL);
    first_passage_time(
        resolved.state(a),
        &Generator::Unitary(h.clone()),
        resolved.state(b),
        tol,
        horizon * (1.0 + 1e-12),
    )
    .map_err(ScenarioError::run(format!(
        "first passage from `{a}` to `{b}`"
    )))
}

fn unitary_report(scenario: &Scenario, resolved: &Resolved) -> Result<BoundReport, ScenarioError> {
    let h = resolved.hamiltonian().expect("validated");
    let actual = actual_time(scenario, resolved, h)?;
    let grid = scenario
        .options
        .alpha_grid
        .clone()
        .unwrap_or_else(default_alpha_grid);
    bound_report(
        resolved.state(scenario.initial_name()),
        h,
        resolved.state(scenario.final_name()),
        &grid,
        Some(actual),
    )
    .map_err(ScenarioError::run("bound report"))
}

fn run_bound(scenario: &Scenario, resolved: &Resolved) -> Result<ResultTable, ScenarioError> {
    let r = unitary_report(scenario, resolved)?;
    let slack = scenario.options.slack.unwrap_or(DEFAULT_SLACK);
    let mut t = ResultTable::new(&[
        ("tl", ColumnType::Real),
        ("tl_alpha2", ColumnType::Real),
        ("alpha_star", ColumnType::Real),
        ("tl_alpha_max", ColumnType::Real),
        ("mt_fidelity", ColumnType::Real),
        ("qfi", ColumnType::Real),
        ("campo", ColumnType::Real),
        ("actual_time", ColumnType::Real),
        ("valid", ColumnType::Bool),
        ("ordered", ColumnType::Bool),
        ("inputs_digest", ColumnType::Text),
    ]);
    t.push(vec![
        r.tl.into(),
        r.tl_alpha2.into(),
        r.tl_alpha_max.0.into(),
        r.tl_alpha_max.1.into(),
        r.mt_fidelity.into(),
        r.qfi.into(),
        r.campo.into(),
        r.actual_time.unwrap_or(f64::NAN).into(),
        r.valid(slack).unwrap_or(false).into(),
        r.ordered(slack).into(),
        r.inputs_digest.clone().into(),
    ]);
    Ok(t)
}

fn run_compare(scenario: &Scenario, resolved: &Resolved) -> Result<ResultTable, ScenarioError> {
    let r = unitary_report(scenario, resolved)?;
    let slack = scenario.options.slack.unwrap_or(DEFAULT_SLACK);
    let actual = r.actual_time.unwrap_or(f64::NAN);
    let mut t = ResultTable::new(&[
        ("bound", ColumnType::Text),
        ("value", ColumnType::Real),
        ("actual_time", ColumnType::Real),
        ("ratio_to_actual", ColumnType::Real),
        ("within_actual", ColumnType::Bool),
        ("at_most_tl", ColumnType::Bool),
    ]);
    for (name, value) in r.bounds() {
        t.push(vec![
            name.into(),
            value.into(),
            actual.into(),
            (value / actual).into(),
            (value <= actual + slack).into(),
            (value <= r.tl + slack).into(),
        ]);
    }
    Ok(t)
}

fn run_sweep(scenario: &Scenario) -> Result<ResultTable, ScenarioError> {
    let seed = scenario.options.seed.unwrap_or(42);
    let slack = scenario.options.slack.unwrap_or(DEFAULT_SLACK);
    let tol = scenario.options.tolerance.unwrap_or(SWEEP_PASSAGE_TOL);
    let groups = scenario
        .options
        .sweep
        .clone()
        .unwrap_or_else(|| vec![SweepGroup { dim: 2, count: 500 }]);
    let jobs: Vec<(usize, usize)> = groups
        .iter()
        .flat_map(|g| (0..g.count).map(move |i| (g.dim, i)))
        .collect();
    let rows = in_pool(|| {
        jobs.par_iter()
            .map(|&(dim, i)| -> Result<Vec<Cell>, ScenarioError> {
                let ctx = format!("sweep instance {i} (dim {dim})");
                let inst = sweep_instance(dim, seed, i).map_err(ScenarioError::run(ctx.clone()))?;
                let r = sweep_report(&inst, tol).map_err(ScenarioError::run(ctx.clone()))?;
                let c = campo_bound(&inst.rho1, &inst.h, &inst.rho2)
                    .map_err(ScenarioError::run(ctx))?;
                Ok(vec![
                    i.into(),
                    dim.into(),
                    inst.t.into(),
                    r.actual_time.unwrap_or(f64::NAN).into(),
                    r.tl.into(),
                    r.tl_alpha2.into(),
                    r.tl_alpha_max.1.into(),
                    r.mt_fidelity.into(),
                    r.qfi.into(),
                    r.campo.into(),
                    c.sqrt_n_over_d.into(),
                    r.valid(slack).unwrap_or(false).into(),
                    r.ordered(slack).into(),
                    (c.sqrt_n_over_d >= c.value).into(),
                ])
            })
            .collect::<Result<Vec<_>, _>>()
    })?;
    let mut t = ResultTable::new(&[
        ("instance", ColumnType::Int),
        ("dim", ColumnType::Int),
        ("t", ColumnType::Real),
        ("actual_time", ColumnType::Real),
        ("tl", ColumnType::Real),
        ("tl_alpha2", ColumnType::Real),
        ("tl_alpha_max", ColumnType::Real),
        ("mt_fidelity", ColumnType::Real),
        ("qfi", ColumnType::Real),
        ("campo", ColumnType::Real),
        ("sqrt_n_over_d", ColumnType::Real),
        ("valid", ColumnType::Bool),
        ("ordered", ColumnType::Bool),
        ("campo_dominance", ColumnType::Bool),
    ]);
    for row in rows {
        t.push(row);
    }
    Ok(t)
}

fn run_evolve(scenario: &Scenario, resolved: &Resolved) -> Result<ResultTable, ScenarioError> {
    let taus = scenario.time.as_ref().expect("validated").values();
    if let Some(lambda1) = scenario.options.lambda1 {
        let opts = CurveOptions {
            segments: scenario.options.segments.unwrap_or(200),
            ..Default::default()
        };
        return markovian_curve(lambda1, &taus, opts);
    }
    let rho0 = resolved.state(scenario.initial_name());
    let slack = scenario.options.slack.unwrap_or(DEFAULT_SLACK);
    match resolved.generator.as_ref().expect("validated") {
        Generator::Unitary(h) => {
            let mut t = ResultTable::new(&[
                ("t", ColumnType::Real),
                ("purity", ColumnType::Real),
                ("affinity", ColumnType::Real),
                ("tl", ColumnType::Real),
                ("valid", ColumnType::Bool),
            ]);
            for &tau in &taus {
                let ctx = || format!("unitary evolution at t = {tau}");
                let rho_t = evolve_unitary(rho0, h, tau).map_err(ScenarioError::run(ctx()))?;
                let tl = tl_bound(rho0, h, &rho_t).map_err(ScenarioError::run(ctx()))?;
                let a = affinity(rho0, &rho_t).map_err(ScenarioError::run(ctx()))?;
                t.push(vec![
                    tau.into(),
                    rho_t.purity().into(),
                    a.into(),
                    tl.into(),
                    (tl <= tau + slack).into(),
                ]);
            }
            Ok(t)
        }
        Generator::Lindblad(model) => {
            let opts = SimpsonOptions::default();
            let segments = scenario.options.segments.unwrap_or(200);
            let mut t = ResultTable::new(&[
                ("tau", ColumnType::Real),
                ("purity", ColumnType::Real),
                ("affinity", ColumnType::Real),
                ("markovian", ColumnType::Real),
                ("campo_style", ColumnType::Real),
                ("purification", ColumnType::Real),
                ("valid", ColumnType::Bool),
            ]);
            let rows = in_pool(|| {
                taus.par_iter()
                    .map(|&tau| -> Result<Vec<Cell>, ScenarioError> {
                        let ctx = || format!("Lindblad evolution at tau = {tau}");
                        let rho_t =
                            evolve_lindblad(rho0, model, tau).map_err(ScenarioError::run(ctx()))?;
                        let a = affinity(rho0, &rho_t).map_err(ScenarioError::run(ctx()))?;
                        if tau == 0.0 {
                            return Ok(vec![
                                0.0.into(),
                                rho_t.purity().into(),
                                a.into(),
                                0.0.into(),
                                0.0.into(),
                                0.0.into(),
                                true.into(),
                            ]);
                        }
                        let mb = markovian_bound(rho0, model, tau, opts)
                            .map_err(ScenarioError::run(ctx()))?;
                        let campo = campo_lindblad_bound(rho0, model, tau, opts)
                            .map_err(ScenarioError::run(ctx()))?;
                        let pb = purification_bound(rho0, model, tau, segments)
                            .map_err(ScenarioError::run(ctx()))?;
                        Ok(vec![
                            tau.into(),
                            rho_t.purity().into(),
                            a.into(),
                            mb.value.into(),
                            campo.into(),
                            pb.into(),
                            (mb.value <= tau + slack).into(),
                        ])
                    })
                    .collect::<Result<Vec<_>, _>>()
            })?;
            for row in rows {
                t.push(row);
            }
            Ok(t)
        }
    }
}

fn run_interfere(scenario: &Scenario, resolved: &Resolved) -> Result<ResultTable, ScenarioError> {
    let h = resolved.hamiltonian().expect("validated");
    let rho1 = resolved.state(scenario.initial_name());
    let t = scenario
        .time
        .as_ref()
        .and_then(|t| t.scalar())
        .expect("validated");
    let seeds = scenario
        .options
        .seeds
        .clone()
        .unwrap_or_else(|| vec![scenario.options.seed.unwrap_or(0)]);
    let mode = scenario
        .options
        .shots
        .map(MeasurementMode::Shots)
        .unwrap_or(MeasurementMode::Exact);
    let shots = scenario.options.shots.unwrap_or(0);
    let rho2 = evolve_unitary(rho1, h, t).map_err(ScenarioError::run("interference target"))?;
    let exact_tl = tl_bound(rho1, h, &rho2).map_err(ScenarioError::run("library bound"))?;
    let exact_q = wy_coherence(rho1, h).map_err(ScenarioError::run("library coherence"))?;
    let exact_a = affinity(rho1, &rho2).map_err(ScenarioError::run("library affinity"))?;
    let estimates = in_pool(|| {
        seeds
            .par_iter()
            .map(|&seed| {
                estimate_tl_from_protocol(rho1, h, t, mode, seed)
                    .map_err(ScenarioError::run(format!("protocol with seed {seed}")))
            })
            .collect::<Result<Vec<_>, _>>()
    })?;
    let mut table = ResultTable::new(&[
        ("seed", ColumnType::Int),
        ("shots", ColumnType::Int),
        ("quantity", ColumnType::Text),
        ("value", ColumnType::Real),
        ("std_error", ColumnType::Real),
        ("exact", ColumnType::Real),
    ]);
    for (seed, est) in seeds.iter().zip(&estimates) {
        for (name, value, err, exact) in [
            ("tl", est.tl, est.error_bar, exact_tl),
            ("q", est.q, est.q_std_error, exact_q),
            ("affinity", est.affinity, est.affinity_std_error, exact_a),
        ] {
            table.push(vec![
                (*seed).into(),
                shots.into(),
                name.into(),
                value.into(),
                err.into(),
                exact.into(),
            ]);
        }
    }
    Ok(table)
}

/// Bundled scenario files, by name.
pub(crate) fn bundled_scenario(name: &str) -> Scenario {
    let text = match name {
        "case1" => include_str!("../../scenarios/case1.scenario.json"),
        "case2" => include_str!("../../scenarios/case2.scenario.json"),
        "case3" => include_str!("../../scenarios/case3.scenario.json"),
        other => panic!("no bundled scenario `{other}`"),
    };
    parse_scenario_str(text).unwrap_or_else(|e| panic!("bundled scenario `{name}`: {e}"))
}

#[derive(Clone, Copy)]
enum Relation {
    Approx,
    AtMost,
    AtLeast,
}

struct Check {
    table: ResultTable,
}

impl Check {
    fn new() -> Self {
        Check {
            table: ResultTable::new(&[
                ("check", ColumnType::Text),
                ("value", ColumnType::Real),
                ("expected", ColumnType::Real),
                ("tolerance", ColumnType::Real),
                ("relation", ColumnType::Text),
                ("pass", ColumnType::Bool),
            ]),
        }
    }

    fn add(&mut self, name: &str, value: f64, expected: f64, tolerance: f64, rel: Relation) {
        let (label, pass) = match rel {
            Relation::Approx => ("approx", (value - expected).abs() <= tolerance),
            Relation::AtMost => ("at_most", value <= expected + tolerance),
            Relation::AtLeast => ("at_least", value >= expected - tolerance),
        };
        self.table.push(vec![
            name.into(),
            value.into(),
            expected.into(),
            tolerance.into(),
            label.into(),
            pass.into(),
        ]);
    }
}

fn case_tl(name: &str) -> Result<(f64, BoundReport), ScenarioError> {
    let s = bundled_scenario(name);
    let r = s.resolve()?;
    let report = unitary_report(&s, &r)?;
    Ok((report.tl, report))
}

/// Runs every reproducible published number and qualitative claim and
/// compares against the bundled fixtures. Rows with `pass = false` make the
/// CLI exit with status 2.
pub fn reproduce(seed: u64) -> Result<ResultTable, ScenarioError> {
    let fx = Fixtures::bundled();
    let mut c = Check::new();
    let approx = |c: &mut Check, name: &str, value: f64, key: &str| {
        let f = fx.get(key);
        c.add(name, value, f.value, f.tolerance, Relation::Approx);
    };

    let (tl1, _) = case_tl("case1")?;
    approx(&mut c, "case1_tl", tl1, "case1_tl");
    let (tl2, _) = case_tl("case2")?;
    approx(&mut c, "case2_tl", tl2, "case2_tl");
    let (tl3, r3) = case_tl("case3")?;
    approx(&mut c, "case3_tl", tl3, "case3_tl");
    c.add(
        "case3_tl_minus_mt_fidelity",
        r3.tl - r3.mt_fidelity,
        0.0,
        0.0,
        Relation::AtLeast,
    );
    c.add(
        "case3_tl_minus_qfi",
        r3.tl - r3.qfi,
        0.0,
        0.0,
        Relation::AtLeast,
    );
    c.add(
        "case3_bounds_within_actual",
        r3.bounds().iter().map(|(_, b)| *b).fold(f64::MIN, f64::max)
            - r3.actual_time.unwrap_or(f64::NAN),
        0.0,
        DEFAULT_SLACK,
        Relation::AtMost,
    );

    // closed-form Bloch rotation against matrix propagation on the Case III inputs
    let s3 = bundled_scenario("case3");
    let res3 = s3.resolve()?;
    let h3 = res3.hamiltonian().expect("case3 is unitary");
    let r0 = state_to_bloch(res3.state("rho1")).map_err(ScenarioError::run("case3 bloch"))?;
    let hm = h3.matrix();
    let axis = [
        hm[(0, 1)].re,
        -hm[(0, 1)].im,
        0.5 * (hm[(0, 0)].re - hm[(1, 1)].re),
    ];
    let mut worst: f64 = 0.0;
    for k in 1..=100 {
        let a = 0.0628 * k as f64;
        let closed = qubit_evolution_closed_form(&r0, axis, a, 1.0)
            .map_err(ScenarioError::run("closed form"))?;
        let m = state_to_bloch(
            &evolve_unitary(res3.state("rho1"), h3, a)
                .map_err(ScenarioError::run("matrix evolution"))?,
        )
        .map_err(ScenarioError::run("bloch"))?;
        worst = worst.max(
            (0..3)
                .map(|i| (closed.0[i] - m.0[i]).abs())
                .fold(0.0, f64::max),
        );
    }
    c.add(
        "case3_closed_form_vs_matrix",
        worst,
        0.0,
        1e-10,
        Relation::AtMost,
    );

    // mixing inequality along a ∈ (0, 2π]
    let mx = mixing_example();
    let mut min_slack = f64::INFINITY;
    let steps = (2.0 * std::f64::consts::PI / 0.01).floor() as usize;
    for k in 1..=steps + 1 {
        let a = (k as f64 * 0.01).min(2.0 * std::f64::consts::PI);
        let chk = mixing_inequality_check(&mx.rho1, &mx.sigma1, mx.p, &mx.h, a)
            .map_err(ScenarioError::run("mixing check"))?;
        min_slack = min_slack.min(chk.slack());
    }
    c.add(
        "mixing_min_slack",
        min_slack,
        0.0,
        crate::tol::INEQUALITY,
        Relation::AtLeast,
    );
    let (ur, us, ug) = (
        fx.get("mixing_u_rho").value,
        fx.get("mixing_u_sigma").value,
        fx.get("mixing_u_gamma").value,
    );
    c.add(
        "mixing_printed_triple_slack",
        (1.0f64 / 3.0).sqrt() * ur + (2.0f64 / 3.0).sqrt() * us - ug,
        0.0,
        0.0,
        Relation::AtLeast,
    );

    // damping curve
    let lambda1 = fx.get("markovian_lambda1").value;
    let taus: Vec<f64> = (1..=50).map(|k| 0.1 * k as f64).collect();
    let curve = markovian_curve(lambda1, &taus, CurveOptions::default())?;
    let bounds = curve.reals("markovian").expect("column");
    let excess = bounds
        .iter()
        .zip(&taus)
        .map(|(b, t)| b - t)
        .fold(f64::MIN, f64::max);
    c.add(
        "markovian_max_excess_over_tau",
        excess,
        0.0,
        0.0,
        Relation::AtMost,
    );
    let campo = curve.reals("campo_style").expect("column");
    let i3 = taus
        .iter()
        .position(|t| (t - 3.0).abs() < 1e-9)
        .expect("grid contains 3");
    c.add(
        "markovian_minus_campo_at_tau_3",
        bounds[i3] - campo[i3],
        0.0,
        0.0,
        Relation::AtLeast,
    );
    let purification = curve.reals("purification").expect("column");
    let p_excess = purification
        .iter()
        .zip(&taus)
        .map(|(b, t)| b - t)
        .fold(f64::MIN, f64::max);
    c.add(
        "purification_max_excess_over_tau",
        p_excess,
        0.0,
        1e-12,
        Relation::AtMost,
    );

    // interferometry on the Case III inputs
    let rho1 = res3.state("rho1");
    let t3 = s3
        .time
        .as_ref()
        .and_then(|t| t.scalar())
        .expect("case3 time");
    let exact = estimate_tl_from_protocol(rho1, h3, t3, MeasurementMode::Exact, seed)
        .map_err(ScenarioError::run("exact protocol"))?;
    c.add("protocol_exact_tl", exact.tl, tl3, 1e-6, Relation::Approx);
    let shots = fx.get("protocol_shots").value as u64;
    let est = estimate_tl_from_protocol(rho1, h3, t3, MeasurementMode::Shots(shots), seed)
        .map_err(ScenarioError::run("shot protocol"))?;
    let target = fx.get("case3_tl").value;
    c.add(
        "protocol_shots_tl_error_bars_from_case3",
        (est.tl - target).abs() / est.error_bar,
        0.0,
        4.0,
        Relation::AtMost,
    );

    let mut table = c.table;
    let excluded: Vec<&str> = fx
        .values
        .iter()
        .filter(|f| f.excluded)
        .map(|f| f.key.as_str())
        .collect();
    table
        .metadata
        .extra
        .insert("excluded_fixtures".into(), excluded.join(","));
    table.metadata.extra.insert(
        "crossover_tau".into(),
        curve.metadata.extra["crossover_tau"].clone(),
    );
    Ok(table)
}
