//! Scenario execution, single runs and seed ensembles.

use csa_core::experiment::run_mode;
use csa_core::field::synthesize_field;
use csa_core::kinematics::linear_trajectory;
use csa_core::model::generate_model_trace;
use csa_core::{ChannelTrace, Mode};
use rayon::prelude::*;

use crate::config::Scenario;
use crate::error::{Result, SimError};

pub const THREADS_ENV: &str = "CSA_SIM_THREADS";

/// All traces of one field/noise seed pair, in the scenario's mode order.
#[derive(Debug, Clone, PartialEq)]
pub struct Run {
    pub field_seed: u64,
    pub noise_seed: u64,
    pub traces: Vec<ChannelTrace>,
}

fn stamp(scenario: &Scenario, mut trace: ChannelTrace) -> ChannelTrace {
    trace.meta.scenario = scenario.name.clone();
    trace.meta.speed = scenario.speed;
    trace
}

/// Runs every configured mode on the scenario's field. Every mode uses the
/// same noise seed, so the noise sequences line up sample by sample.
pub fn simulate(scenario: &Scenario) -> Result<Run> {
    let field = synthesize_field(scenario.field)?;
    let traj = linear_trajectory(scenario.total_distance, scenario.step)?;
    let traces = scenario
        .modes
        .iter()
        .map(|&mode| {
            run_mode(
                &field,
                &traj,
                &scenario.mount,
                mode,
                scenario.residual_sigma,
                scenario.noise_seed,
            )
            .map(|t| stamp(scenario, t))
            .map_err(SimError::from)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Run {
        field_seed: scenario.field.seed,
        noise_seed: scenario.noise_seed,
        traces,
    })
}

/// Statistical-model trace for the scenario's model section.
pub fn model_trace(scenario: &Scenario) -> Result<ChannelTrace> {
    let t = generate_model_trace(&scenario.model, scenario.total_distance, scenario.step)?;
    Ok(stamp(scenario, t))
}

/// Scenario for ensemble member `i`: field, noise and model seeds shifted by `i`.
pub fn ensemble_member(scenario: &Scenario, i: u32) -> Scenario {
    let mut s = scenario.clone();
    s.field.seed = scenario.field.seed.wrapping_add(i as u64);
    s.noise_seed = scenario.noise_seed.wrapping_add(i as u64);
    s.model.seed = scenario.model.seed.wrapping_add(i as u64);
    s
}

/// Worker count from `CSA_SIM_THREADS`; `None` lets rayon decide.
pub fn thread_limit() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(SimError::Config(format!(
                "{THREADS_ENV} must be a positive integer, got {v:?}"
            ))),
        },
    }
}

/// Maps `job` over ensemble members `0..count` concurrently. Results come
/// back in member order regardless of scheduling.
pub fn for_ensemble<T, F>(scenario: &Scenario, count: u32, job: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&Scenario) -> Result<T> + Sync,
{
    if count <= 1 {
        return (0..count)
            .map(|i| job(&ensemble_member(scenario, i)))
            .collect();
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_limit()? {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| SimError::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| {
        (0..count)
            .into_par_iter()
            .map(|i| job(&ensemble_member(scenario, i)))
            .collect()
    })
}

pub fn simulate_ensemble(scenario: &Scenario, count: u32) -> Result<Vec<Run>> {
    for_ensemble(scenario, count, simulate)
}

pub fn model_ensemble(scenario: &Scenario, count: u32) -> Result<Vec<ChannelTrace>> {
    for_ensemble(scenario, count, model_trace)
}

/// Output file name, e.g. `office_csa.csv` or `office_csa_seed7.csv`.
pub fn trace_file_name(scenario: &str, mode: Mode, seed: Option<u64>) -> String {
    match seed {
        Some(s) => format!("{scenario}_{mode}_seed{s}.csv"),
        None => format!("{scenario}_{mode}.csv"),
    }
}
