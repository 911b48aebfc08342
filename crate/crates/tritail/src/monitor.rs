//! Per-round threshold verdicts for process traces.
//!
//! Each round of a trace is checked against the three per-round
//! thresholds: the X window, the all-pairs Y cap, and the sum-Z^2 budget.
//! Boundaries are inclusive (the windows are closed intervals), and
//! integer statistics are compared through the slack rule in
//! [`crate::bounds`].

use serde::Serialize;

use crate::bounds::{lemma_thresholds, stat_ge, stat_le, LemmaParams, Thresholds};
use crate::process::ProcessTrace;
use crate::triangles::RoundStats;
use crate::{Error, Result};

/// Outcome of the three checks on one round.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RoundVerdict {
    pub round: u32,
    pub x_ok: bool,
    pub y_ok: bool,
    pub z2_ok: bool,
    /// Signed relative slack of each check: positive means inside the
    /// threshold. The X margin is the distance to the nearer window edge
    /// relative to the window radius; Y and Z2 margins are relative
    /// headroom under their caps.
    pub x_margin: f64,
    pub y_margin: f64,
    pub z2_margin: f64,
    /// False when the round's max Y was approximated rather than taken
    /// over all pairs, in which case `y_ok` is a necessary check only.
    pub y_exact: bool,
}

impl RoundVerdict {
    pub fn all_ok(&self) -> bool {
        self.x_ok && self.y_ok && self.z2_ok
    }
}

/// Verdicts for one full trace.
#[derive(Clone, Debug, Serialize)]
pub struct LemmaReport {
    pub verdicts: Vec<RoundVerdict>,
    pub all_rounds_ok: bool,
    pub first_failure: Option<u32>,
}

/// Checks one round's statistics against its thresholds.
pub fn evaluate_round(stats: &RoundStats, thr: &Thresholds) -> Result<RoundVerdict> {
    if stats.round != thr.round {
        return Err(Error::invalid(
            "thr",
            format!(
                "round mismatch: stats are round {}, thresholds round {}",
                stats.round, thr.round
            ),
        ));
    }
    let x = stats.x as f64;
    let x_ok = stat_ge(stats.x as u128, thr.x_lo) && stat_le(stats.x as u128, thr.x_hi);
    let y_ok = stat_le(stats.max_y as u128, thr.y_max);
    let z2_ok = stat_le(stats.sum_z2, thr.z2_max);

    let radius = (thr.x_hi - thr.x_lo) / 2.0;
    let x_margin = (x - thr.x_lo).min(thr.x_hi - x) / radius.max(1.0);
    let y_margin = (thr.y_max - stats.max_y as f64) / thr.y_max.abs().max(1.0);
    let z2_margin = (thr.z2_max - stats.sum_z2 as f64) / thr.z2_max.abs().max(1.0);

    Ok(RoundVerdict {
        round: stats.round,
        x_ok,
        y_ok,
        z2_ok,
        x_margin,
        y_margin,
        z2_margin,
        y_exact: stats.max_y_exact,
    })
}

/// Evaluates every round of a trace at deviation scale `lambda`.
pub fn evaluate_trace(trace: &ProcessTrace, lambda: f64) -> Result<LemmaReport> {
    let params = LemmaParams {
        n: trace.n as u64,
        eps: trace.schedule.eps,
        p: trace.schedule.target_p,
        lambda,
    };
    let verdicts = trace
        .per_round
        .iter()
        .map(|stats| evaluate_round(stats, &lemma_thresholds(&params, stats.round)))
        .collect::<Result<Vec<_>>>()?;
    let first_failure = verdicts.iter().find(|v| !v.all_ok()).map(|v| v.round);
    Ok(LemmaReport {
        all_rounds_ok: first_failure.is_none(),
        first_failure,
        verdicts,
    })
}
