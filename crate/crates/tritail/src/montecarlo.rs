//! Reproducible trial ensembles, the exact small-instance oracle, and
//! empirical tail estimation.
//!
//! Trials are embarrassingly parallel: trial t draws every random bit from
//! streams derived from `(master_seed, t)`, results land in pre-assigned
//! slots, and aggregation happens after all trials complete, so outputs
//! are identical at any thread count.

use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{expected_x, variance_x};
use crate::graph::sample_gnp;
use crate::monitor::{evaluate_trace, LemmaReport};
use crate::process::{make_schedule, run_process, NoObserver, ProcessTrace, Schedule};
use crate::rng::derive_seed;
use crate::triangles::{count_triangles, RoundStats, StatsOptions};
use crate::{Error, Result};

/// Which sampler(s) an experiment exercises.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Direct,
    Iterated,
    Both,
}

/// The sampler behind one concrete ensemble.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TrialMode {
    /// One-shot G(n,p) sampling.
    Direct,
    /// The iterated percolation process from K_n.
    Iterated,
}

impl TrialMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            TrialMode::Direct => "direct",
            TrialMode::Iterated => "iterated",
        }
    }
}

impl std::str::FromStr for TrialMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "direct" => Ok(TrialMode::Direct),
            "iterated" => Ok(TrialMode::Iterated),
            other => Err(format!("`{other}` is not direct | iterated")),
        }
    }
}

/// Experiment parameters.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub p: f64,
    /// Deviation scales for tail estimation; nonnegative, strictly
    /// increasing.
    pub lambda_grid: Vec<f64>,
    pub trials: usize,
    pub master_seed: u64,
    /// Ceiling on the per-round retention probability handed to
    /// [`make_schedule`].
    pub eps_max: f64,
    pub mode: Mode,
    pub threads: usize,
    /// Largest n for which round statistics quantify max Y over all pairs
    /// exactly.
    pub exact_stats_limit: usize,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::invalid("n", "vertex count must be at least 1"));
        }
        if !(0.0 < self.p && self.p < 1.0) {
            return Err(Error::invalid("p", format!("{} outside (0,1)", self.p)));
        }
        if self.trials == 0 {
            return Err(Error::invalid("trials", "at least one trial required"));
        }
        if !(0.0 < self.eps_max && self.eps_max < 1.0) {
            return Err(Error::invalid(
                "eps_max",
                format!("{} outside (0,1)", self.eps_max),
            ));
        }
        if self.threads == 0 {
            return Err(Error::invalid("threads", "at least one thread required"));
        }
        for w in self.lambda_grid.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::invalid(
                    "lambda_grid",
                    format!("not strictly increasing at {} >= {}", w[0], w[1]),
                ));
            }
        }
        if self.lambda_grid.first().is_some_and(|&l| l < 0.0) {
            return Err(Error::invalid("lambda_grid", "values must be >= 0"));
        }
        Ok(())
    }

    /// The percolation schedule this config implies.
    pub fn schedule(&self) -> Result<Schedule> {
        make_schedule(self.n, self.p, self.eps_max)
    }
}

/// Outcomes of `trials` independent trials.
#[derive(Clone, Debug)]
pub struct Ensemble {
    pub config: ExperimentConfig,
    pub mode: TrialMode,
    /// Final triangle count per trial, indexed by trial.
    pub final_x: Vec<u64>,
    /// Per-round statistics per trial (iterated mode only).
    pub round_stats: Option<Vec<Vec<RoundStats>>>,
    /// Schedule used by the iterated process.
    pub schedule: Option<Schedule>,
    /// Per-trial stream seeds, `derive_seed(master_seed, t, 0)`.
    pub seeds: Vec<u64>,
    pub elapsed: Duration,
    pub started_unix_ms: u64,
}

impl Ensemble {
    pub fn trials(&self) -> usize {
        self.final_x.len()
    }

    /// Sample mean of the final triangle counts (exact integer sum).
    pub fn mean_x(&self) -> f64 {
        let sum: u128 = self.final_x.iter().map(|&x| x as u128).sum();
        sum as f64 / self.trials() as f64
    }

    /// Sample variance (denominator `trials - 1`).
    pub fn var_x(&self) -> f64 {
        let mean = self.mean_x();
        let ss: f64 = self.final_x.iter().map(|&x| (x as f64 - mean).powi(2)).sum();
        ss / (self.trials() as f64 - 1.0)
    }

    /// Evaluates the per-round thresholds on every stored trace at
    /// deviation scale `lambda`. Iterated-mode ensembles only.
    pub fn lemma_reports(&self, lambda: f64) -> Result<Vec<LemmaReport>> {
        let (stats, schedule) = match (&self.round_stats, &self.schedule) {
            (Some(s), Some(sch)) => (s, sch),
            _ => {
                return Err(Error::invalid(
                    "self",
                    "per-round statistics are only recorded in iterated mode",
                ))
            }
        };
        stats
            .iter()
            .map(|rounds| {
                let trace = ProcessTrace {
                    n: self.config.n,
                    schedule: *schedule,
                    final_x: rounds.last().map_or(0, |r| r.x),
                    per_round: rounds.clone(),
                };
                evaluate_trace(&trace, lambda)
            })
            .collect()
    }
}

/// Runs `cfg.trials` independent trials under `mode`.
///
/// Trial t is a pure function of `(cfg, master_seed, t)`: direct mode
/// samples G(n,p) from stream `derive_seed(master_seed, t, 0)` and counts
/// triangles; iterated mode runs the full percolation process (whose
/// rounds derive sub-streams from the same trial seed) and records every
/// round's statistics.
pub fn run_ensemble(cfg: &ExperimentConfig, mode: TrialMode) -> Result<Ensemble> {
    cfg.validate()?;
    let schedule = match mode {
        TrialMode::Iterated => Some(cfg.schedule()?),
        TrialMode::Direct => None,
    };
    let opts = StatsOptions {
        exact_max_y_limit: cfg.exact_stats_limit,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::ResourceLimit(format!("thread pool: {e}")))?;

    let started_unix_ms = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_millis() as u64);
    let start = Instant::now();

    struct TrialOut {
        seed: u64,
        x: u64,
        rounds: Option<Vec<RoundStats>>,
    }

    let outs: Result<Vec<TrialOut>> = pool.install(|| {
        (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let seed = derive_seed(cfg.master_seed, t as u64, 0);
                match mode {
                    TrialMode::Direct => {
                        let g = sample_gnp(cfg.n, cfg.p, seed)?;
                        Ok(TrialOut {
                            seed,
                            x: count_triangles(&g),
                            rounds: None,
                        })
                    }
                    TrialMode::Iterated => {
                        let sch = schedule.as_ref().expect("schedule built for iterated mode");
                        let trace = run_process(cfg.n, sch, seed, &opts, &mut NoObserver)?;
                        Ok(TrialOut {
                            seed,
                            x: trace.final_x,
                            rounds: Some(trace.per_round),
                        })
                    }
                }
            })
            .collect()
    });
    let outs = outs?;

    let mut ensemble = Ensemble {
        config: cfg.clone(),
        mode,
        final_x: Vec::with_capacity(outs.len()),
        round_stats: matches!(mode, TrialMode::Iterated).then(|| Vec::with_capacity(outs.len())),
        schedule,
        seeds: Vec::with_capacity(outs.len()),
        elapsed: start.elapsed(),
        started_unix_ms,
    };
    for out in outs {
        ensemble.final_x.push(out.x);
        ensemble.seeds.push(out.seed);
        if let (Some(stats), Some(rounds)) = (ensemble.round_stats.as_mut(), out.rounds) {
            stats.push(rounds);
        }
    }
    Ok(ensemble)
}

// ---------------------------------------------------------------------------
// Exact small-instance oracle
// ---------------------------------------------------------------------------

/// Largest edge-slot count the exhaustive oracle accepts (2^28 graphs).
pub const ENUMERATION_EDGE_LIMIT: u32 = 28;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SupportPoint {
    pub x: u64,
    pub probability: f64,
}

/// Exact distribution of the triangle count of G(n,p), from exhaustive
/// enumeration of all 2^{C(n,2)} graphs.
#[derive(Clone, Debug, Serialize)]
pub struct ExactDistribution {
    pub n: usize,
    pub p: f64,
    /// Achievable triangle counts with their exact probabilities,
    /// ascending in x.
    pub support: Vec<SupportPoint>,
}

impl ExactDistribution {
    pub fn mean(&self) -> f64 {
        self.support.iter().map(|s| s.x as f64 * s.probability).sum()
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.support
            .iter()
            .map(|s| (s.x as f64 - mean).powi(2) * s.probability)
            .sum()
    }

    pub fn total_probability(&self) -> f64 {
        self.support.iter().map(|s| s.probability).sum()
    }

    /// P(X = x).
    pub fn probability_of(&self, x: u64) -> f64 {
        self.support
            .iter()
            .find(|s| s.x == x)
            .map_or(0.0, |s| s.probability)
    }

    /// Exact two-sided tail P(|X - center| >= lambda * scale).
    pub fn tail_probability(&self, center: f64, scale: f64, lambda: f64) -> f64 {
        self.support
            .iter()
            .filter(|s| (s.x as f64 - center).abs() >= lambda * scale)
            .map(|s| s.probability)
            .sum()
    }
}

/// Counts of graphs on the edge slots of K_n by (triangle count, edge
/// count). The table is p-independent; a distribution for any p follows by
/// weighting with p^k (1-p)^{E-k}.
fn enumerate_counts(n: usize) -> Vec<Vec<u64>> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
        .collect();
    let e = pairs.len();
    let x_max = n * n.saturating_sub(1) * n.saturating_sub(2) / 6;
    let mut counts = vec![vec![0u64; e + 1]; x_max + 1];

    // Walk all edge subsets in binary-reflected Gray order, maintaining
    // per-vertex adjacency bitmasks and the triangle count incrementally:
    // toggling edge (u,v) changes X by the current co-degree |N(u)&N(v)|.
    let mut adj = vec![0u32; n];
    let mut present = vec![false; e];
    let (mut x, mut k) = (0usize, 0usize);
    counts[0][0] += 1;
    for j in 1u64..(1u64 << e) {
        let b = j.trailing_zeros() as usize;
        let (u, v) = pairs[b];
        if present[b] {
            adj[u] &= !(1 << v);
            adj[v] &= !(1 << u);
            x -= (adj[u] & adj[v]).count_ones() as usize;
            k -= 1;
        } else {
            x += (adj[u] & adj[v]).count_ones() as usize;
            adj[u] |= 1 << v;
            adj[v] |= 1 << u;
            k += 1;
        }
        present[b] = !present[b];
        counts[x][k] += 1;
    }
    counts
}

/// Exhaustively enumerates all graphs on n vertices and aggregates the
/// exact triangle-count distribution under edge probability `p`.
///
/// Refuses instances with more than [`ENUMERATION_EDGE_LIMIT`] edge slots
/// (n > 8).
pub fn enumerate_exact(n: usize, p: f64) -> Result<ExactDistribution> {
    if n == 0 {
        return Err(Error::invalid("n", "vertex count must be at least 1"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid("p", format!("probability {p} outside [0,1]")));
    }
    let edge_slots = n as u64 * (n as u64 - 1) / 2;
    if edge_slots > ENUMERATION_EDGE_LIMIT as u64 {
        return Err(Error::EnumerationTooLarge {
            n,
            edge_slots,
            limit: ENUMERATION_EDGE_LIMIT,
        });
    }
    let e = edge_slots as usize;
    let counts = enumerate_counts(n);

    // p^k (1-p)^{E-k} tables.
    let mut pk = vec![1.0f64; e + 1];
    let mut qk = vec![1.0f64; e + 1];
    for k in 1..=e {
        pk[k] = pk[k - 1] * p;
        qk[k] = qk[k - 1] * (1.0 - p);
    }

    let support = counts
        .iter()
        .enumerate()
        .filter(|(_, row)| row.iter().any(|&c| c > 0))
        .map(|(x, row)| SupportPoint {
            x: x as u64,
            probability: row
                .iter()
                .enumerate()
                .map(|(k, &c)| c as f64 * pk[k] * qk[e - k])
                .sum(),
        })
        .collect();
    Ok(ExactDistribution { n, p, support })
}

// ---------------------------------------------------------------------------
// Tail estimation
// ---------------------------------------------------------------------------

/// Empirical estimate of P(|X - E X| >= lambda sqrt(Var X)).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TailEstimate {
    pub lambda: f64,
    /// E X, exact.
    pub center: f64,
    /// sqrt(Var X), exact.
    pub scale: f64,
    /// Fraction of trials at or beyond the deviation.
    pub fraction: f64,
    /// Wilson 95% interval.
    pub ci_lo: f64,
    pub ci_hi: f64,
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = phat + z2 / (2.0 * n);
    let half = z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt();
    (
        ((center - half) / denom).max(0.0),
        ((center + half) / denom).min(1.0),
    )
}

/// Normal quantile for two-sided 95% coverage.
const WILSON_Z95: f64 = 1.959_963_984_540_054;

/// Counts the trials deviating from the exact mean by at least
/// `lambda` exact standard deviations.
///
/// Centering uses the analytic E X and Var X rather than sample moments,
/// so the reported fraction carries no estimator noise.
pub fn empirical_tail(ens: &Ensemble, lambda: f64) -> Result<TailEstimate> {
    if ens.final_x.is_empty() {
        return Err(Error::invalid("ens", "empty ensemble"));
    }
    if !(lambda >= 0.0) {
        return Err(Error::invalid("lambda", format!("{lambda} must be >= 0")));
    }
    let center = expected_x(ens.config.n as u64, ens.config.p);
    let scale = variance_x(ens.config.n as u64, ens.config.p).sqrt();
    if scale == 0.0 {
        return Err(Error::invalid(
            "ens",
            "Var X = 0 at these parameters; the deviation event is degenerate",
        ));
    }
    let hits = ens
        .final_x
        .iter()
        .filter(|&&x| (x as f64 - center).abs() >= lambda * scale)
        .count() as u64;
    let trials = ens.trials() as u64;
    let (ci_lo, ci_hi) = wilson_interval(hits, trials, WILSON_Z95);
    Ok(TailEstimate {
        lambda,
        center,
        scale,
        fraction: hits as f64 / trials as f64,
        ci_lo,
        ci_hi,
    })
}

// ---------------------------------------------------------------------------
// Distribution comparison
// ---------------------------------------------------------------------------

/// Reference distribution for [`compare_distributions`].
pub enum DistRef<'a> {
    Sample(&'a Ensemble),
    Exact(&'a ExactDistribution),
}

impl DistRef<'_> {
    fn params(&self) -> (usize, f64) {
        match self {
            DistRef::Sample(e) => (e.config.n, e.config.p),
            DistRef::Exact(d) => (d.n, d.p),
        }
    }

    /// Probability mass on integer support, ascending.
    fn pmf(&self) -> Vec<(u64, f64)> {
        match self {
            DistRef::Sample(e) => {
                let mut sorted = e.final_x.clone();
                sorted.sort_unstable();
                let total = sorted.len() as f64;
                let mut out: Vec<(u64, f64)> = Vec::new();
                for x in sorted {
                    match out.last_mut() {
                        Some((last, w)) if *last == x => *w += 1.0 / total,
                        _ => out.push((x, 1.0 / total)),
                    }
                }
                out
            }
            DistRef::Exact(d) => d.support.iter().map(|s| (s.x, s.probability)).collect(),
        }
    }
}

/// Differences between two distributions of the triangle count.
#[derive(Clone, Debug, Serialize)]
pub struct ComparisonReport {
    /// Total-variation distance on shared integer bins.
    pub tv_distance: f64,
    /// Width of those bins (1 unless the shared support exceeds 1024
    /// values).
    pub bin_width: u64,
    /// Absolute differences of mean and 2nd..4th central moments.
    pub moment_diffs: [f64; 4],
    /// Maximum CDF gap on the unbinned integer support (the two-sample
    /// Kolmogorov-Smirnov statistic when both sides are samples).
    pub max_cdf_gap: f64,
}

fn central_moments(pmf: &[(u64, f64)]) -> [f64; 4] {
    let mean: f64 = pmf.iter().map(|&(x, w)| x as f64 * w).sum();
    let mut m = [mean, 0.0, 0.0, 0.0];
    for &(x, w) in pmf {
        let d = x as f64 - mean;
        m[1] += d * d * w;
        m[2] += d * d * d * w;
        m[3] += d * d * d * d * w;
    }
    m
}

/// Compares two distributions over the same (n, p).
pub fn compare_distributions(a: &Ensemble, b: &DistRef) -> Result<ComparisonReport> {
    let (bn, bp) = b.params();
    if a.config.n != bn || a.config.p != bp {
        return Err(Error::invalid(
            "b",
            format!(
                "mismatched parameters: ({}, {}) vs ({bn}, {bp})",
                a.config.n, a.config.p
            ),
        ));
    }
    let a_ref = DistRef::Sample(a);
    let pa = a_ref.pmf();
    let pb = b.pmf();

    let lo = pa.first().map(|&(x, _)| x).into_iter().chain(pb.first().map(|&(x, _)| x)).min().unwrap_or(0);
    let hi = pa.last().map(|&(x, _)| x).into_iter().chain(pb.last().map(|&(x, _)| x)).max().unwrap_or(0);
    let span = hi - lo + 1;
    let bin_width = span.div_ceil(1024).max(1);
    let bins = span.div_ceil(bin_width) as usize;
    let mut mass_a = vec![0.0f64; bins];
    let mut mass_b = vec![0.0f64; bins];
    for &(x, w) in &pa {
        mass_a[((x - lo) / bin_width) as usize] += w;
    }
    for &(x, w) in &pb {
        mass_b[((x - lo) / bin_width) as usize] += w;
    }
    let tv_distance = 0.5
        * mass_a
            .iter()
            .zip(&mass_b)
            .map(|(x, y)| (x - y).abs())
            .sum::<f64>();

    let ma = central_moments(&pa);
    let mb = central_moments(&pb);
    let moment_diffs = [
        (ma[0] - mb[0]).abs(),
        (ma[1] - mb[1]).abs(),
        (ma[2] - mb[2]).abs(),
        (ma[3] - mb[3]).abs(),
    ];

    // Walk the merged support accumulating both CDFs.
    let (mut i, mut j) = (0usize, 0usize);
    let (mut fa, mut fb) = (0.0f64, 0.0f64);
    let mut max_cdf_gap = 0.0f64;
    while i < pa.len() || j < pb.len() {
        let xa = pa.get(i).map(|&(x, _)| x);
        let xb = pb.get(j).map(|&(x, _)| x);
        let x = match (xa, xb) {
            (Some(x), Some(y)) => x.min(y),
            (Some(x), None) => x,
            (None, Some(y)) => y,
            (None, None) => break,
        };
        while i < pa.len() && pa[i].0 == x {
            fa += pa[i].1;
            i += 1;
        }
        while j < pb.len() && pb[j].0 == x {
            fb += pb[j].1;
            j += 1;
        }
        max_cdf_gap = max_cdf_gap.max((fa - fb).abs());
    }

    Ok(ComparisonReport {
        tv_distance,
        bin_width,
        moment_diffs,
        max_cdf_gap,
    })
}

/// Two-sample Kolmogorov-Smirnov critical gap at the 99% level:
/// c(0.01) sqrt((n_a + n_b)/(n_a n_b)) with c(alpha) = sqrt(ln(2/alpha)/2).
pub fn ks_two_sample_critical_99(n_a: usize, n_b: usize) -> f64 {
    let c = ((2.0f64 / 0.01).ln() / 2.0).sqrt();
    c * ((n_a + n_b) as f64 / (n_a as f64 * n_b as f64)).sqrt()
}
