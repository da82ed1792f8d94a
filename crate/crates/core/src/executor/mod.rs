//! Cycle timing: slew model, phase scheduling against the lead-time
//! deadline, and the end-to-end cycle runner.

mod cycle;

pub use cycle::{run_baseline, run_cycle, CycleConfig, CycleMode, CycleRecord, CycleStatus, GroundTruthScene};

use serde::{Deserialize, Serialize};

use crate::geometry::LookaheadGeometry;
use crate::targeting::PointingCommand;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpacecraftAgility {
    pub max_rate_deg_s: f64,
    pub max_accel_deg_s2: f64,
    pub settle_time_s: f64,
}

impl Default for SpacecraftAgility {
    fn default() -> Self {
        Self {
            max_rate_deg_s: 1.0,
            max_accel_deg_s2: 1.0,
            settle_time_s: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhaseBudget {
    pub acquire_s: f64,
    pub transfer_s: f64,
    pub analyze_s: f64,
    pub decide_s: f64,
    pub nadir_acquire_s: f64,
    pub nadir_analyze_s: f64,
    pub downlink_s: f64,
}

impl Default for PhaseBudget {
    fn default() -> Self {
        Self {
            acquire_s: 2.0,
            transfer_s: 5.0,
            analyze_s: 5.0,
            decide_s: 0.5,
            nadir_acquire_s: 2.0,
            nadir_analyze_s: 5.0,
            downlink_s: 3.0,
        }
    }
}

impl PhaseBudget {
    pub fn fields(&self) -> [(&'static str, f64); 7] {
        [
            ("acquire_s", self.acquire_s),
            ("transfer_s", self.transfer_s),
            ("analyze_s", self.analyze_s),
            ("decide_s", self.decide_s),
            ("nadir_acquire_s", self.nadir_acquire_s),
            ("nadir_analyze_s", self.nadir_analyze_s),
            ("downlink_s", self.downlink_s),
        ]
    }
}

/// Rest-to-rest bang-bang slew of `delta_deg`, without settling:
/// `delta/w + w/a` when the rate limit is reached (`delta >= w^2/a`),
/// `2 sqrt(delta/a)` otherwise.
pub fn slew_motion_time(delta_deg: f64, agility: &SpacecraftAgility) -> f64 {
    let delta = delta_deg.abs();
    if delta == 0.0 {
        return 0.0;
    }
    let w = agility.max_rate_deg_s;
    let a = agility.max_accel_deg_s2;
    if delta >= w * w / a {
        delta / w + w / a
    } else {
        2.0 * (delta / a).sqrt()
    }
}

/// Slew duration including the post-slew settle time.
pub fn slew_time(delta_deg: f64, agility: &SpacecraftAgility) -> f64 {
    slew_motion_time(delta_deg, agility) + agility.settle_time_s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseKind {
    Acquire,
    Transfer,
    Analyze,
    Decide,
    /// Combined along + across maneuver (serial plans).
    Slew,
    SlewAlong,
    SlewAcross,
    Settle,
    NadirAcquire,
    NadirAnalyze,
    Downlink,
}

impl PhaseKind {
    /// Phases that must finish before the deadline.
    pub fn is_pre_nadir(self) -> bool {
        !matches!(
            self,
            PhaseKind::NadirAcquire | PhaseKind::NadirAnalyze | PhaseKind::Downlink
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Phase {
    pub phase: PhaseKind,
    pub start_s: f64,
    pub end_s: f64,
}

/// Phase timeline of one cycle, times relative to the start of lookahead
/// acquisition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleSchedule {
    pub phases: Vec<Phase>,
    pub critical_path_s: f64,
    pub deadline_s: f64,
    pub feasible: bool,
    pub overlap_used: bool,
}

impl CycleSchedule {
    pub fn phase(&self, kind: PhaseKind) -> Option<&Phase> {
        self.phases.iter().find(|p| p.phase == kind)
    }

    /// Latest end time over pre-nadir phases, recomputed from the phase list.
    pub fn pre_nadir_end(&self) -> f64 {
        self.phases
            .iter()
            .filter(|p| p.phase.is_pre_nadir())
            .map(|p| p.end_s)
            .fold(0.0, f64::max)
    }

    pub fn slack_s(&self) -> f64 {
        self.deadline_s - self.critical_path_s
    }

    /// Precedence edges `(before, after)` that every plan must respect.
    pub fn precedence_edges(&self) -> Vec<(PhaseKind, PhaseKind)> {
        use PhaseKind::*;
        let mut edges = vec![(Acquire, Transfer), (Transfer, Analyze), (Analyze, Decide)];
        if self.overlap_used {
            edges.extend([
                (Acquire, SlewAlong),
                (Decide, SlewAcross),
                (SlewAlong, Settle),
                (SlewAcross, Settle),
            ]);
        } else {
            edges.extend([(Decide, Slew), (Slew, Settle)]);
        }
        edges.extend([
            (Settle, NadirAcquire),
            (NadirAcquire, NadirAnalyze),
            (NadirAnalyze, Downlink),
        ]);
        edges
    }

    pub fn respects_precedence(&self) -> bool {
        self.precedence_edges()
            .iter()
            .all(|&(before, after)| match (self.phase(before), self.phase(after)) {
                (Some(b), Some(a)) => a.start_s >= b.end_s,
                _ => false,
            })
    }
}

/// Lays out one cycle.
///
/// Serial: acquire, transfer, analyze, decide, then a single maneuver of
/// `sqrt(along^2 + across^2)` degrees and settle. Overlap: the along-track
/// return starts right after acquisition; the across-track component starts
/// after the decision; settle follows whichever finishes last. Nadir
/// acquisition starts when the target reaches nadir (or when settled, if
/// later), followed by nadir analysis and downlink.
///
/// The deadline is `lead_time - margin_s`; the cycle is feasible when all
/// pre-nadir work ends by then.
pub fn plan_cycle(
    geom: &LookaheadGeometry,
    budgets: &PhaseBudget,
    agility: &SpacecraftAgility,
    command: &PointingCommand,
    overlap: bool,
    margin_s: f64,
) -> CycleSchedule {
    assert!(margin_s >= 0.0, "margin_s must be >= 0");
    let mut phases = Vec::with_capacity(11);
    let mut push = |phase, start_s: f64, duration: f64| {
        phases.push(Phase {
            phase,
            start_s,
            end_s: start_s + duration,
        });
        start_s + duration
    };

    let acquired = push(PhaseKind::Acquire, 0.0, budgets.acquire_s);
    let along = command.along_track_slew_deg;
    let across = command.across_track_deg;
    let settle_start = if overlap {
        let along_done = push(PhaseKind::SlewAlong, acquired, slew_motion_time(along, agility));
        let t = push(PhaseKind::Transfer, acquired, budgets.transfer_s);
        let t = push(PhaseKind::Analyze, t, budgets.analyze_s);
        let decided = push(PhaseKind::Decide, t, budgets.decide_s);
        let across_done = push(PhaseKind::SlewAcross, decided, slew_motion_time(across, agility));
        along_done.max(across_done)
    } else {
        let t = push(PhaseKind::Transfer, acquired, budgets.transfer_s);
        let t = push(PhaseKind::Analyze, t, budgets.analyze_s);
        let decided = push(PhaseKind::Decide, t, budgets.decide_s);
        push(PhaseKind::Slew, decided, slew_motion_time(along.hypot(across), agility))
    };
    let settled = push(PhaseKind::Settle, settle_start, agility.settle_time_s);
    let t = push(
        PhaseKind::NadirAcquire,
        geom.lead_time_s.max(settled),
        budgets.nadir_acquire_s,
    );
    let t = push(PhaseKind::NadirAnalyze, t, budgets.nadir_analyze_s);
    push(PhaseKind::Downlink, t, budgets.downlink_s);

    let deadline_s = geom.lead_time_s - margin_s;
    CycleSchedule {
        phases,
        critical_path_s: settled,
        deadline_s,
        feasible: settled <= deadline_s,
        overlap_used: overlap,
    }
}
