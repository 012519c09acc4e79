use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::complexity::{complexity_counts, OpCounts};
use super::receiver::{Receiver, StepInfo, TrialOracle};
use super::spec::{BranchDetection, DataMode, ExperimentSpec, SweepAxis};
use crate::error::{Error, Result};
use crate::linear::{decide, exact_moments, wiener_solution};
use crate::uwb::{
    build_signatures, generate_batch, generate_channel, generate_spreading_codes, load_channel, ClusterProfile,
};

/// Per-symbol averages of structural choices, over trials.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Traces {
    /// Selected branch, one-based.
    pub branch: Option<Vec<f64>>,
    /// Branches evaluated per symbol.
    pub branches_evaluated: Option<Vec<f64>>,
    /// Selected rank or block length.
    pub order: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgorithmResult {
    pub label: String,
    /// Mean `|e(i)|²` per symbol over trials, training then data phase.
    pub mse_curve: Vec<f64>,
    /// Fraction of trials whose hard decision on symbol `i` was wrong.
    pub ber_curve: Vec<f64>,
    pub data_errors: u64,
    pub data_bits: u64,
    /// Mean squared error over the last `window` training symbols.
    pub final_mse: f64,
    /// Standard error of `final_mse` across trials.
    pub final_mse_stderr: f64,
    /// Per-trial `final_mse` values, in trial order.
    pub final_mse_trials: Vec<f64>,
    pub traces: Traces,
    pub complexity: Option<OpCounts>,
}

impl AlgorithmResult {
    /// Data-phase bit error rate, `errors / bits`.
    pub fn data_ber(&self) -> Option<f64> {
        (self.data_bits > 0).then(|| self.data_errors as f64 / self.data_bits as f64)
    }

    /// Mean of the branches-evaluated trace over all symbols.
    pub fn mean_branches_evaluated(&self) -> Option<f64> {
        self.traces
            .branches_evaluated
            .as_ref()
            .map(|t| t.iter().sum::<f64>() / t.len() as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointResult {
    pub sweep_value: Option<f64>,
    /// Trial-averaged exact Wiener MMSE.
    pub mean_mmse: f64,
    pub algorithms: Vec<AlgorithmResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub name: String,
    pub spec_hash: String,
    pub seed: u64,
    pub num_trials: usize,
    pub num_training_symbols: usize,
    pub num_data_symbols: usize,
    pub provenance: String,
    pub sweep_axis: Option<SweepAxis>,
    pub points: Vec<PointResult>,
}

pub fn provenance() -> String {
    format!(
        "saabf {} (rev {})",
        env!("CARGO_PKG_VERSION"),
        option_env!("SAABF_GIT_REV").unwrap_or("unknown")
    )
}

/// Independent generator of trial `trial` at sweep point `point`.
pub fn trial_rng(seed: u64, point: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((point as u64) << 32) | trial as u64);
    rng
}

struct AlgoTrial {
    sq_errors: Vec<f64>,
    wrong: Vec<bool>,
    branch: Vec<f64>,
    evaluated: Vec<f64>,
    order: Vec<f64>,
}

struct TrialOutput {
    mmse: f64,
    algos: Vec<AlgoTrial>,
}

fn record(t: &mut AlgoTrial, info: &StepInfo) {
    if let Some(b) = info.branch {
        t.branch.push(b as f64 + 1.0);
    }
    if let Some(c) = info.branches_evaluated {
        t.evaluated.push(c as f64);
    }
    if let Some(o) = info.order {
        t.order.push(o as f64);
    }
}

fn run_trial(spec: &ExperimentSpec, point: usize, value: Option<f64>, trial: usize) -> Result<TrialOutput> {
    let cfg = spec.system_at(value)?;
    let dims = cfg.dims()?;
    let mut rng = trial_rng(spec.seed, point, trial);
    let codes = generate_spreading_codes(&dims, &mut rng);
    let channel = if spec.cir_files.is_empty() {
        generate_channel(&cfg, &ClusterProfile::default(), &mut rng)?
    } else {
        load_channel(&cfg, &spec.cir_files)?
    };
    let sigs = build_signatures(&cfg, &codes, &channel)?;
    let (w, mmse) = wiener_solution(&exact_moments(&sigs))?;
    let oracle = TrialOracle { w, mmse };
    let n_train = spec.num_training_symbols;
    let n_total = n_train + spec.num_data_symbols;
    let batch = generate_batch(&sigs, n_total, &mut rng)?;

    let mut algos = Vec::with_capacity(spec.algorithms.len());
    for a in &spec.algorithms {
        let mut rx = Receiver::build(a, dims.m, spec.offset_policy, &oracle)?;
        let mut t = AlgoTrial {
            sq_errors: Vec::with_capacity(n_total),
            wrong: Vec::with_capacity(n_total),
            branch: Vec::new(),
            evaluated: Vec::new(),
            order: Vec::new(),
        };
        for (i, (r, b)) in batch.samples.iter().enumerate() {
            let b = Complex64::new(*b, 0.0);
            let knows_reference = i < n_train || spec.data_mode == DataMode::Training;
            let y = if knows_reference && spec.branch_detection == BranchDetection::Reference {
                rx.reference_output(r, b)?
            } else {
                rx.output(r)?
            };
            let decision = decide(y);
            t.wrong.push(decision as f64 != b.re);
            if i < n_train {
                let info = rx.step(r, b)?;
                t.sq_errors.push(info.e.norm_sqr());
                record(&mut t, &info);
            } else {
                t.sq_errors.push((b - y).norm_sqr());
                let reference = match spec.data_mode {
                    DataMode::DecisionDirected => Some(Complex64::new(decision as f64, 0.0)),
                    DataMode::Training => Some(b),
                    DataMode::Frozen => None,
                };
                if let Some(d) = reference {
                    let info = rx.step(r, d)?;
                    record(&mut t, &info);
                }
            }
        }
        algos.push(t);
    }
    Ok(TrialOutput { mmse, algos })
}

fn mean_traces(outputs: &[TrialOutput], k: usize, pick: fn(&AlgoTrial) -> &Vec<f64>) -> Option<Vec<f64>> {
    let len = pick(&outputs[0].algos[k]).len();
    if len == 0 {
        return None;
    }
    let mut acc = vec![0.0; len];
    for o in outputs {
        for (a, v) in acc.iter_mut().zip(pick(&o.algos[k])) {
            *a += v;
        }
    }
    let n = outputs.len() as f64;
    Some(acc.into_iter().map(|a| a / n).collect())
}

fn aggregate(spec: &ExperimentSpec, value: Option<f64>, outputs: Vec<TrialOutput>) -> Result<PointResult> {
    let n = outputs.len() as f64;
    let n_total = spec.num_training_symbols + spec.num_data_symbols;
    let window = spec.num_training_symbols - spec.window..spec.num_training_symbols;
    let m = spec.system_at(value)?.dims()?.m;
    let mut algorithms = Vec::new();
    for (k, a) in spec.algorithms.iter().enumerate() {
        let mut mse_curve = vec![0.0; n_total];
        let mut ber_curve = vec![0.0; n_total];
        let mut data_errors = 0u64;
        let mut final_mse_trials = Vec::with_capacity(outputs.len());
        for o in &outputs {
            let t = &o.algos[k];
            for i in 0..n_total {
                mse_curve[i] += t.sq_errors[i];
                if t.wrong[i] {
                    ber_curve[i] += 1.0;
                    if i >= spec.num_training_symbols {
                        data_errors += 1;
                    }
                }
            }
            final_mse_trials.push(t.sq_errors[window.clone()].iter().sum::<f64>() / spec.window as f64);
        }
        mse_curve.iter_mut().for_each(|x| *x /= n);
        ber_curve.iter_mut().for_each(|x| *x /= n);
        let final_mse = final_mse_trials.iter().sum::<f64>() / n;
        let final_mse_stderr = if outputs.len() > 1 {
            let var = final_mse_trials.iter().map(|x| (x - final_mse).powi(2)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        } else {
            0.0
        };
        let complexity = match a.complexity_args(m) {
            Some((tag, m, d, q, c, scale)) => {
                let ops = complexity_counts(tag, m, d, q, c)?;
                Some(OpCounts {
                    adds: ops.adds * scale,
                    mults: ops.mults * scale,
                })
            }
            None => None,
        };
        algorithms.push(AlgorithmResult {
            label: a.label.clone(),
            mse_curve,
            ber_curve,
            data_errors,
            data_bits: (spec.num_data_symbols * outputs.len()) as u64,
            final_mse,
            final_mse_stderr,
            final_mse_trials,
            traces: Traces {
                branch: mean_traces(&outputs, k, |t| &t.branch),
                branches_evaluated: mean_traces(&outputs, k, |t| &t.evaluated),
                order: mean_traces(&outputs, k, |t| &t.order),
            },
            complexity,
        });
    }
    let mean_mmse = outputs.iter().map(|o| o.mmse).sum::<f64>() / n;
    Ok(PointResult {
        sweep_value: value,
        mean_mmse,
        algorithms,
    })
}

/// Runs every trial of every sweep point. Trials execute on the current
/// rayon pool; results are combined in trial order, so the output does not
/// depend on scheduling.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    spec.validate()?;
    let mut points = Vec::new();
    for (p, value) in spec.points().into_iter().enumerate() {
        let outputs = (0..spec.num_trials)
            .into_par_iter()
            .map(|trial| {
                run_trial(spec, p, value, trial).map_err(|e| Error::Trial {
                    trial: trial as u64,
                    seed: spec.seed,
                    source: Box::new(e),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        points.push(aggregate(spec, value, outputs)?);
    }
    Ok(ExperimentResult {
        name: spec.name.clone(),
        spec_hash: spec.source_hash.clone(),
        seed: spec.seed,
        num_trials: spec.num_trials,
        num_training_symbols: spec.num_training_symbols,
        num_data_symbols: spec.num_data_symbols,
        provenance: provenance(),
        sweep_axis: spec.sweep.as_ref().map(|s| s.axis),
        points,
    })
}

/// [`run_experiment`] on a dedicated pool of `threads` workers.
pub fn run_experiment_with_threads(spec: &ExperimentSpec, threads: usize) -> Result<ExperimentResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::config(format!("cannot start {threads} worker threads: {e}")))?;
    pool.install(|| run_experiment(spec))
}
