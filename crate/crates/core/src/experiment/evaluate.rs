use std::path::Path;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::learning::{EpisodeSource, Policy};
use crate::stl::{Outer, Signal};

use super::{policy_fn, ExperimentConfig, ExperimentError, Prepared};

/// Histogram bin width.
pub const BIN_WIDTH: f64 = 0.05;

#[derive(Clone, Debug, PartialEq)]
pub struct RolloutRecord {
    pub index: usize,
    /// Robustness of the full specification at time 0.
    pub robustness: f64,
    pub satisfied: bool,
    /// Whether the tau-state trace meets the satisfying set as the outer
    /// operator requires (some scored window for `F`, every one for `G`).
    pub trace_in_a: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

#[derive(Clone, Debug)]
pub struct EvaluationReport {
    pub rollouts: usize,
    /// Fraction of rollouts with positive robustness; `None` without rollouts.
    pub p_hat: Option<f64>,
    pub mean: Option<f64>,
    /// Sample standard deviation.
    pub std: Option<f64>,
    /// Fraction of rollouts whose trace meets the satisfying set.
    pub abstract_eps: Option<f64>,
    pub histogram: Vec<HistogramBin>,
    pub records: Vec<RolloutRecord>,
    pub signals: Vec<Signal<f64>>,
    /// Rollouts where the sign of the robustness contradicts the Boolean verdict.
    pub soundness_violations: usize,
    pub elapsed: Duration,
}

impl EvaluationReport {
    pub fn satisfied_count(&self) -> usize {
        self.records.iter().filter(|r| r.satisfied).count()
    }
}

/// Histogram over `[lo, hi]` with `BIN_WIDTH` bins; values outside land
/// in the end bins.
pub fn histogram(values: &[f64], lo: f64, hi: f64) -> Vec<HistogramBin> {
    let n = (((hi - lo) / BIN_WIDTH).round() as usize).max(1);
    let mut bins: Vec<HistogramBin> = (0..n)
        .map(|i| HistogramBin {
            lo: lo + i as f64 * BIN_WIDTH,
            hi: if i + 1 == n { hi } else { lo + (i + 1) as f64 * BIN_WIDTH },
            count: 0,
        })
        .collect();
    for &v in values {
        let i = ((v - lo) / BIN_WIDTH).floor();
        let i = if i.is_nan() || i < 0.0 { 0 } else { (i as usize).min(n - 1) };
        bins[i].count += 1;
    }
    bins
}

/// `n` greedy rollouts of `policy`; rollout `i` draws from stream `i` of
/// a generator seeded with `seed`.
pub fn evaluate_policy(
    prep: &Prepared,
    cfg: &ExperimentConfig,
    policy: &Policy,
    n: usize,
    seed: u64,
) -> Result<EvaluationReport, ExperimentError> {
    let start = Instant::now();
    let in_a = prep.classes.mask();
    let top = prep.setup.spec.top_level()?;
    let w = prep.setup.window;
    let results: Vec<Result<(RolloutRecord, Signal<f64>), ExperimentError>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let mut src = prep.source(cfg, rng)?;
            let last = src.last_reward_step().min(src.horizon());
            let pick = policy_fn(policy);
            let (raw, ep) = src.simulate_raw(&mut |s, k| pick(s, k))?;
            let scored = ep.states.get(w - 1..=last).unwrap_or(&[]);
            let trace_in_a = match top.outer {
                Outer::Finally => scored.iter().any(|&s| in_a[s]),
                Outer::Globally => !scored.is_empty() && scored.iter().all(|&s| in_a[s]),
            };
            let rec = RolloutRecord {
                index: i,
                robustness: ep.robustness.ok_or_else(|| {
                    ExperimentError::Config("episode shorter than the specification".into())
                })?,
                satisfied: ep.satisfied.unwrap_or(false),
                trace_in_a,
            };
            Ok((rec, raw.signal))
        })
        .collect();
    let mut records = Vec::with_capacity(n);
    let mut signals = Vec::with_capacity(n);
    for r in results {
        let (rec, sig) = r?;
        records.push(rec);
        signals.push(sig);
    }

    let rob: Vec<f64> = records.iter().map(|r| r.robustness).collect();
    let frac = |c: usize| (n > 0).then(|| c as f64 / n as f64);
    let mean = (n > 0).then(|| rob.iter().sum::<f64>() / n as f64);
    let std = mean.map(|m| {
        if n < 2 {
            0.0
        } else {
            (rob.iter().map(|r| (r - m) * (r - m)).sum::<f64>() / (n - 1) as f64).sqrt()
        }
    });
    let soundness_violations = records
        .iter()
        .filter(|r| (r.robustness > 0.0 && !r.satisfied) || (r.robustness < 0.0 && r.satisfied))
        .count();
    Ok(EvaluationReport {
        rollouts: n,
        p_hat: frac(rob.iter().filter(|&&r| r > 0.0).count()),
        mean,
        std,
        abstract_eps: frac(records.iter().filter(|r| r.trace_in_a).count()),
        histogram: histogram(&rob, cfg.learning.r_min, cfg.learning.r_max),
        records,
        signals,
        soundness_violations,
        elapsed: start.elapsed(),
    })
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "undefined".to_string(), |v| v.to_string())
}

pub(super) fn write_report(dir: &Path, r: &EvaluationReport) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_path(dir.join("evaluation.csv"))?;
    w.write_record(["rollout", "robustness", "satisfied", "trace_in_a"])?;
    for rec in &r.records {
        w.write_record([
            rec.index.to_string(),
            rec.robustness.to_string(),
            rec.satisfied.to_string(),
            rec.trace_in_a.to_string(),
        ])?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(dir.join("histogram.csv"))?;
    w.write_record(["bin_lo", "bin_hi", "count"])?;
    for b in &r.histogram {
        w.write_record([format!("{:.4}", b.lo), format!("{:.4}", b.hi), b.count.to_string()])?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(dir.join("signals.csv"))?;
    w.write_record(["rollout", "t", "x", "y"])?;
    for (i, s) in r.signals.iter().enumerate() {
        for (t, p) in s.samples().enumerate() {
            w.write_record([i.to_string(), t.to_string(), p[0].to_string(), p[1].to_string()])?;
        }
    }
    w.flush()?;

    let summary = format!(
        "rollouts = {}\np_hat = {}\nmean_robustness = {}\nstd_robustness = {}\nabstract_eps = {}\nsoundness_violations = {}\n",
        r.rollouts,
        opt(r.p_hat),
        opt(r.mean),
        opt(r.std),
        opt(r.abstract_eps),
        r.soundness_violations
    );
    std::fs::write(dir.join("evaluation_summary.txt"), summary)?;
    Ok(())
}
