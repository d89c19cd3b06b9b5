//! Monte Carlo estimates of per-user MG pairs.
//!
//! Trial `t` draws its realization from a ChaCha8 generator seeded with the
//! master seed and switched to stream `t`. Per-trial results are collected
//! in trial order and folded serially, so an estimate depends only on its
//! inputs and never on the worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::netmodel::{hex_color_partition, Topology, TopologyKind};
use crate::scheduler::{schedule, schedule_hex, Role, Scheme};
use crate::traffic::{sample_activity, ActivityRealization, ScenarioParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub su_mean: f64,
    pub sum_mean: f64,
    pub se_mean: f64,
    pub su_stderr: f64,
    pub sum_stderr: f64,
    pub se_stderr: f64,
    pub trials: usize,
    pub k: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Su,
    Sum,
    Se,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub axis: Axis,
    pub mean: f64,
    pub target: f64,
    pub stderr: f64,
    pub k_sigma: f64,
    pub bias_allowance: f64,
    pub deviation: f64,
    pub pass: bool,
}

/// Allowance for the `O(1/K)` edge effects of a finite network.
pub fn bias_allowance(k: usize) -> f64 {
    10.0 / k as f64
}

/// Generator for one trial.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Realization drawn by trial `trial`; used to replay a logged trial.
pub fn trial_realization(params: &ScenarioParams, topo: &Topology, seed: u64, trial: u64) -> ActivityRealization {
    sample_activity(params, topo, &mut trial_rng(seed, trial))
}

fn check_inputs(params: &ScenarioParams, scheme: Scheme, trials: usize, workers: usize) -> Result<()> {
    params.validate()?;
    if params.coop != scheme.coop() {
        return Err(Error::Unsupported(format!(
            "scheme {} does not match {:?} cooperation",
            scheme.name(),
            params.coop
        )));
    }
    if trials < 2 {
        return Err(param("trials", format!("must be at least 2, got {trials}")));
    }
    if workers == 0 {
        return Err(param("workers", "must be at least 1"));
    }
    Ok(())
}

/// Runs `f` for every trial on a pool of `workers` threads and returns the
/// results in trial order.
fn run_trials<T, F>(trials: usize, workers: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Unsupported(format!("cannot start worker pool: {e}")))?;
    pool.install(|| (0..trials as u64).into_par_iter().map(&f).collect())
}

fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Per-user means of the scheme's MG tally over `trials` sampled networks.
pub fn estimate(
    params: &ScenarioParams,
    scheme: Scheme,
    topo: &Topology,
    trials: usize,
    seed: u64,
    workers: usize,
) -> Result<MCEstimate> {
    check_inputs(params, scheme, trials, workers)?;
    let k = topo.user_count();
    let kf = k as f64;
    let pairs = run_trials(trials, workers, |t| {
        let r = trial_realization(params, topo, seed, t);
        let tally = schedule(params, scheme, topo, &r)?.tally();
        Ok((tally.urllc_total / kf, tally.sum_total / kf))
    })?;
    let su: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let sum: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let se: Vec<f64> = pairs.iter().map(|p| p.1 - p.0).collect();
    let (su_mean, su_stderr) = mean_stderr(&su);
    let (sum_mean, sum_stderr) = mean_stderr(&sum);
    let (_, se_stderr) = mean_stderr(&se);
    Ok(MCEstimate {
        su_mean,
        sum_mean,
        se_mean: sum_mean - su_mean,
        su_stderr,
        sum_stderr,
        se_stderr,
        trials,
        k,
        seed,
    })
}

/// Mean and standard error of the fraction of off-colour cells that carry
/// eMBB traffic, averaged over the three phases of a torus scheme.
pub fn estimate_offcolor_embb(
    params: &ScenarioParams,
    scheme: Scheme,
    topo: &Topology,
    trials: usize,
    seed: u64,
    workers: usize,
) -> Result<(f64, f64)> {
    check_inputs(params, scheme, trials, workers)?;
    if !matches!(topo.kind(), TopologyKind::HexTorus { .. }) {
        return Err(Error::Unsupported("off-colour fractions need a hexagonal torus".into()));
    }
    let partition = hex_color_partition(topo)?;
    let sizes = partition.class_sizes();
    let fractions = run_trials(trials, workers, |t| {
        let r = trial_realization(params, topo, seed, t);
        let sched = schedule_hex(params, scheme, &r, topo, &partition);
        let mut acc = 0.0;
        for (phase, roles) in sched.phases.iter().enumerate() {
            let off = roles
                .iter()
                .enumerate()
                .filter(|&(u, &role)| partition.class(u) != phase && role == Role::Embb)
                .count();
            acc += off as f64 / (topo.user_count() - sizes[phase]) as f64;
        }
        Ok(acc / sched.phases.len() as f64)
    })?;
    Ok(mean_stderr(&fractions))
}

/// Passes when `|mean - target| <= k_sigma * stderr + 10 / K`.
pub fn compare(est: &MCEstimate, target: f64, axis: Axis, k_sigma: f64) -> Comparison {
    let (mean, stderr) = match axis {
        Axis::Su => (est.su_mean, est.su_stderr),
        Axis::Sum => (est.sum_mean, est.sum_stderr),
        Axis::Se => (est.se_mean, est.se_stderr),
    };
    compare_values(mean, stderr, est.k, target, axis, k_sigma)
}

pub fn compare_values(mean: f64, stderr: f64, k: usize, target: f64, axis: Axis, k_sigma: f64) -> Comparison {
    let bias = bias_allowance(k);
    let deviation = (mean - target).abs();
    Comparison {
        axis,
        mean,
        target,
        stderr,
        k_sigma,
        bias_allowance: bias,
        deviation,
        pass: deviation <= k_sigma * stderr + bias,
    }
}
