//! The iterated percolation process.
//!
//! Starting from G_0 = K_n, each round keeps every surviving edge
//! independently with probability `eps`; after I rounds with `eps^I = p`
//! the result G_I is distributed exactly as G(n,p). The trace records the
//! per-round statistics the concentration argument monitors.

use crate::graph::{percolate, Graph};
use crate::rng::derive_seed;
use crate::triangles::{round_stats_with, RoundStats, StatsOptions};
use crate::{Error, Result};

/// Largest C(n,2) for which the process will materialize K_n
/// (roughly 1 GiB of adjacency); beyond it `run_process` refuses.
const MAX_COMPLETE_EDGES: u64 = 1 << 27;

/// Percolation parameters realizing `eps^rounds = target_p`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct Schedule {
    /// Per-round edge retention probability.
    pub eps: f64,
    /// Number of percolation rounds I, at least 1.
    pub rounds: u32,
    /// The product eps^rounds.
    pub target_p: f64,
    /// True when the requested eps ceiling could not be honored and the
    /// schedule fell back to a single round with eps = p.
    pub relaxed: bool,
}

impl Schedule {
    /// Validates that `eps^rounds` reproduces `target_p` to 1e-12 relative
    /// tolerance.
    pub fn new(eps: f64, rounds: u32, target_p: f64) -> Result<Schedule> {
        if rounds < 1 {
            return Err(Error::invalid("rounds", "at least one round required"));
        }
        if !(0.0 < eps && eps <= 1.0) {
            return Err(Error::invalid("eps", format!("{eps} outside (0,1]")));
        }
        let realized = eps.powi(rounds as i32);
        if (realized - target_p).abs() > 1e-12 * target_p.abs() {
            return Err(Error::invalid(
                "target_p",
                format!("eps^rounds = {realized} does not match target_p = {target_p}"),
            ));
        }
        Ok(Schedule {
            eps,
            rounds,
            target_p,
            relaxed: false,
        })
    }
}

/// Chooses the percolation schedule for `p`: the largest round count I
/// with I <= ln n and eps = p^{1/I} <= eps_max, solving eps exactly so
/// that eps^I = p.
///
/// When even I = 1 cannot satisfy the ceiling (p > eps_max), the schedule
/// degenerates to one round with eps = p and is flagged `relaxed`.
pub fn make_schedule(n: usize, p: f64, eps_max: f64) -> Result<Schedule> {
    if n == 0 {
        return Err(Error::invalid("n", "vertex count must be at least 1"));
    }
    if !(0.0 < p && p < 1.0) {
        return Err(Error::invalid("p", format!("{p} outside (0,1)")));
    }
    if !(0.0 < eps_max && eps_max < 1.0) {
        return Err(Error::invalid("eps_max", format!("{eps_max} outside (0,1)")));
    }
    let ln_cap = (n as f64).ln().floor() as i64;
    // ln(1/p) / ln(1/eps_max); the 1e-9 nudge keeps exact ratios like
    // ln(10^-3)/ln(10^-1) from flooring down through float dust.
    let feasible = (p.ln() / eps_max.ln() + 1e-9).floor() as i64;
    let rounds = ln_cap.min(feasible).max(1) as u32;
    let eps = p.powf(1.0 / rounds as f64);
    let relaxed = eps > eps_max * (1.0 + 1e-12);
    Ok(Schedule {
        eps,
        rounds,
        target_p: p,
        relaxed,
    })
}

/// Record of one full process run.
#[derive(Clone, Debug, serde::Serialize)]
pub struct ProcessTrace {
    pub n: usize,
    pub schedule: Schedule,
    /// Statistics of G_0 .. G_I, indexed by round.
    pub per_round: Vec<RoundStats>,
    /// Triangle count of G_I.
    pub final_x: u64,
}

/// Callback receiving each intermediate graph of the process.
pub trait ProcessObserver {
    fn on_round(&mut self, round: u32, graph: &Graph, stats: &RoundStats);
}

/// Ignores every round.
pub struct NoObserver;

impl ProcessObserver for NoObserver {
    fn on_round(&mut self, _: u32, _: &Graph, _: &RoundStats) {}
}

impl<F: FnMut(u32, &Graph, &RoundStats)> ProcessObserver for F {
    fn on_round(&mut self, round: u32, graph: &Graph, stats: &RoundStats) {
        self(round, graph, stats)
    }
}

/// Runs the iterated process: G_0 = K_n, then `schedule.rounds`
/// percolation rounds at retention `schedule.eps`.
///
/// Round r draws from the stream `derive_seed(seed, r, 1)`, so traces are
/// bit-reproducible given `(n, schedule, seed)` and rounds can be
/// re-derived independently. The observer sees every G_i together with its
/// statistics; the returned trace keeps the statistics only.
pub fn run_process<O: ProcessObserver>(
    n: usize,
    schedule: &Schedule,
    seed: u64,
    opts: &StatsOptions,
    observer: &mut O,
) -> Result<ProcessTrace> {
    if n == 0 {
        return Err(Error::invalid("n", "vertex count must be at least 1"));
    }
    let complete_edges = n as u64 * (n as u64 - 1) / 2;
    if complete_edges > MAX_COMPLETE_EDGES {
        return Err(Error::ResourceLimit(format!(
            "K_{n} has {complete_edges} edges; the process starts from the \
             complete graph and refuses above {MAX_COMPLETE_EDGES}"
        )));
    }

    let mut per_round = Vec::with_capacity(schedule.rounds as usize + 1);
    let mut graph = Graph::complete(n)?;
    let stats = round_stats_with(&graph, opts, 0);
    observer.on_round(0, &graph, &stats);
    per_round.push(stats);

    for round in 1..=schedule.rounds {
        graph = percolate(&graph, schedule.eps, derive_seed(seed, round as u64, 1))?;
        let stats = round_stats_with(&graph, opts, round);
        observer.on_round(round, &graph, &stats);
        per_round.push(stats);
    }

    let final_x = per_round.last().expect("at least round 0").x;
    Ok(ProcessTrace {
        n,
        schedule: *schedule,
        per_round,
        final_x,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_exact_power() {
        let s = make_schedule(1_000_000, 1e-3, 0.1).unwrap();
        assert_eq!(s.rounds, 3);
        assert!((s.eps - 0.1).abs() < 1e-12);
        assert!(!s.relaxed);

        let s = make_schedule(10_000, 0.04, 0.2).unwrap();
        assert_eq!(s.rounds, 2);
        assert!((s.eps - 0.2).abs() < 1e-12);
        assert!(!s.relaxed);
    }

    #[test]
    fn schedule_relaxes_when_infeasible() {
        // ln(4)/ln(1000) < 1: no integer round count fits under eps_max.
        let s = make_schedule(100, 0.25, 0.001).unwrap();
        assert_eq!(s.rounds, 1);
        assert_eq!(s.eps, 0.25);
        assert!(s.relaxed);
    }

    #[test]
    fn schedule_rejects_degenerate_p() {
        assert!(make_schedule(100, 0.0, 0.1).is_err());
        assert!(make_schedule(100, 1.0, 0.1).is_err());
    }

    #[test]
    fn schedule_power_identity_holds() {
        for (n, p, eps_max) in [
            (100usize, 0.3f64, 0.5f64),
            (1000, 0.01, 0.2),
            (50, 0.07, 0.3),
            (10_000, 1e-4, 0.15),
        ] {
            let s = make_schedule(n, p, eps_max).unwrap();
            let realized = s.eps.powi(s.rounds as i32);
            assert!(
                (realized - p).abs() <= 1e-12 * p,
                "eps^I = {realized} vs p = {p}"
            );
            assert!(s.rounds >= 1);
            assert!(s.rounds as f64 <= (n as f64).ln().max(1.0));
        }
    }

    #[test]
    fn trace_shape_and_monotone_edges() {
        let s = make_schedule(40, 0.09, 0.5).unwrap();
        let trace = run_process(40, &s, 11, &StatsOptions::default(), &mut NoObserver).unwrap();
        assert_eq!(trace.per_round.len(), s.rounds as usize + 1);
        for (i, r) in trace.per_round.iter().enumerate() {
            assert_eq!(r.round as usize, i);
        }
        for w in trace.per_round.windows(2) {
            assert!(w[1].edges <= w[0].edges);
        }
        assert_eq!(trace.per_round[0].x, 40 * 39 * 38 / 6);
        assert_eq!(trace.final_x, trace.per_round.last().unwrap().x);
    }

    #[test]
    fn trace_reproducible() {
        let s = make_schedule(30, 0.2, 0.6).unwrap();
        let opts = StatsOptions::default();
        let a = run_process(30, &s, 5, &opts, &mut NoObserver).unwrap();
        let b = run_process(30, &s, 5, &opts, &mut NoObserver).unwrap();
        assert_eq!(a.per_round, b.per_round);
    }

    #[test]
    fn eps_one_schedule_is_constant() {
        let s = Schedule::new(1.0, 3, 1.0).unwrap();
        let trace = run_process(12, &s, 3, &StatsOptions::default(), &mut NoObserver).unwrap();
        for r in &trace.per_round {
            assert_eq!(r.x, trace.per_round[0].x);
            assert_eq!(r.edges, 66);
        }
    }

    #[test]
    fn observer_sees_every_round() {
        let s = make_schedule(20, 0.25, 0.6).unwrap();
        let mut seen = Vec::new();
        let mut obs = |round: u32, g: &Graph, st: &RoundStats| {
            seen.push((round, g.m(), st.edges));
        };
        run_process(20, &s, 1, &StatsOptions::default(), &mut obs).unwrap();
        assert_eq!(seen.len(), s.rounds as usize + 1);
        assert!(seen.iter().all(|&(_, gm, sm)| gm == sm));
    }

    #[test]
    fn refuses_oversized_complete_start() {
        let s = Schedule::new(0.5, 1, 0.5).unwrap();
        let err = run_process(100_000, &s, 0, &StatsOptions::default(), &mut NoObserver);
        assert!(matches!(err, Err(Error::ResourceLimit(_))));
    }
}
