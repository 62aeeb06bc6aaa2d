//! The machine-readable run report.
//!
//! Reports are deterministic for a fixed config (no timestamps, no map
//! iteration order) and every criterion-applicability flag is recomputed
//! from the recorded hypothesis verdicts before emission.

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::statistics::{Consistency, DistributionalStats, LiYorkeStats};
use crate::symbolic::{PumpedSchedule, RevisitSchedule};
use crate::transition::Symbol;
use crate::verifier::{
    CoupledExpansionVerdict, DecayProfile, EquicontinuityBound, ExpansionVerdict, SpotCheck,
};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChaosReport {
    pub schema_version: u32,
    pub config: RunConfig,
    /// Induced-subsequence expression, when the run was transported through
    /// an induced system.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub induced: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transition: Option<TransitionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub construction: Option<ConstructionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub statistics: Option<StatisticsReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub applicability: Option<ApplicabilityReport>,
}

impl ChaosReport {
    pub fn new(config: RunConfig) -> Self {
        Self {
            schema_version: REPORT_SCHEMA_VERSION,
            config,
            induced: None,
            transition: None,
            verification: None,
            construction: None,
            statistics: None,
            applicability: None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransitionReport {
    pub valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub irreducible: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub branching_row: Option<Symbol>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecaySummary {
    /// Periodic word of the stream the profile was computed for.
    pub stream_period: Vec<Symbol>,
    pub max_depth: usize,
    pub index_horizon: u64,
    pub final_max_diameter: f64,
    pub per_depth_max: Vec<f64>,
    pub nonincreasing: bool,
    pub uniform_pass: bool,
    pub threshold: f64,
}

impl DecaySummary {
    pub fn from_profile(profile: &DecayProfile, period: Vec<Symbol>, threshold: f64) -> Self {
        Self {
            stream_period: period,
            max_depth: profile.max_depth,
            index_horizon: profile.index_horizon,
            final_max_diameter: profile.final_max(),
            per_depth_max: profile.per_depth_max.clone(),
            nonincreasing: profile.per_depth_nonincreasing(1e-12),
            uniform_pass: profile.uniform_pass(threshold, 1e-12),
            threshold,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerificationReport {
    pub delta_separation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coupled_expansion: Option<CoupledExpansionVerdict>,
    /// Set when the separation precondition itself failed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub separation_violation: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expansion_all: Option<ExpansionVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expansion_loop: Option<ExpansionVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expansion_loop_error: Option<String>,
    pub equicontinuity: EquicontinuityBound,
    pub cylinder_spot: SpotCheck,
    pub decay: Vec<DecaySummary>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConstructionReport {
    pub construction: String,
    pub witnesses: Vec<WitnessReport>,
    /// Construction-level hypothesis failures (empty cylinders, premise
    /// violations), recorded rather than raised.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub errors: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WitnessReport {
    pub selector: f64,
    /// Stream prefix, truncated to `prefix_cap` symbols.
    pub prefix: Vec<Symbol>,
    pub prefix_cap: usize,
    pub schedule: ScheduleReport,
    pub point: f64,
    pub enclosure: [f64; 2],
    pub width: f64,
    pub depth: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScheduleReport {
    Revisit(RevisitSchedule),
    Pumped(PumpedScheduleReport),
}

/// JSON-safe rendering of a pumped schedule: the doubling bookkeeping
/// outgrows 64-bit integers within a handful of levels, so counts are
/// carried as decimal strings.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PumpedScheduleReport {
    pub word_len: u64,
    pub lead_symbol: Symbol,
    pub selector_param: f64,
    pub levels: Vec<PumpedLevelReport>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PumpedLevelReport {
    pub level: u32,
    pub selector_bit: u8,
    pub pump_count: String,
    pub anchor_end: String,
    pub block_end: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub segment_len: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub segment_end: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub return_len: Option<u64>,
}

impl From<&PumpedSchedule> for PumpedScheduleReport {
    fn from(s: &PumpedSchedule) -> Self {
        Self {
            word_len: s.word_len,
            lead_symbol: s.lead_symbol,
            selector_param: s.selector_param,
            levels: s
                .levels
                .iter()
                .map(|lv| PumpedLevelReport {
                    level: lv.level,
                    selector_bit: lv.selector_bit,
                    pump_count: lv.pump_count.to_string(),
                    anchor_end: lv.anchor_end.to_string(),
                    block_end: lv.block_end.to_string(),
                    segment_len: lv.segment_len.map(|v| v.to_string()),
                    segment_end: lv.segment_end.map(|v| v.to_string()),
                    return_len: lv.return_len,
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LiYorkeSummary {
    pub delta: f64,
    pub proximity_tol: f64,
    pub max_distance: f64,
    pub argmax: u64,
    pub min_checkpoint_distance: f64,
    pub argmin_checkpoint: u64,
    pub liminf_surrogate: f64,
    pub limsup_surrogate: f64,
    pub tail_window: (u64, u64),
    pub scrambled_evidence: bool,
    pub max_inflation: f64,
}

impl From<&LiYorkeStats> for LiYorkeSummary {
    fn from(s: &LiYorkeStats) -> Self {
        Self {
            delta: s.delta,
            proximity_tol: s.proximity_tol,
            max_distance: s.max_distance,
            argmax: s.argmax,
            min_checkpoint_distance: s.min_checkpoint_distance,
            argmin_checkpoint: s.argmin_checkpoint,
            liminf_surrogate: s.liminf_surrogate,
            limsup_surrogate: s.limsup_surrogate,
            tail_window: s.tail_window,
            scrambled_evidence: s.scrambled_evidence,
            max_inflation: s.max_inflation,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairReport {
    pub selectors: (f64, f64),
    pub horizon: u64,
    pub liyorke: LiYorkeSummary,
    pub distributional: DistributionalStats,
    pub cross_check: Consistency,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StatisticsReport {
    pub pairs: Vec<PairReport>,
}

/// Recorded hypothesis verdicts, one bit each.
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct HypothesisFlags {
    pub transition_matrix_valid: bool,
    pub irreducible: bool,
    pub branching_row: bool,
    pub separation: bool,
    pub coupled_expansion: bool,
    pub cylinders_nonempty: bool,
    /// Measured uniform decay of the anchor-stream cylinders.
    pub anchor_decay: bool,
    /// Measured uniform decay of the return-stream cylinders.
    pub return_decay: bool,
    pub expansion_all: bool,
    pub expansion_loop: bool,
    pub equicontinuous: bool,
}

/// Which chaos criteria have all hypotheses machine-checked on the horizon.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriteriaFlags {
    /// Nested nonempty cylinders plus anchor decay.
    pub liyorke_nested_cylinders: bool,
    /// Coupled expansion strengthens the nonemptiness assumption.
    pub liyorke_coupled_expansion: bool,
    /// Criterion transported through an induced system; only checked when
    /// one was requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub liyorke_induced: Option<bool>,
    /// Coupled expansion, equi-continuity, measured uniform decay.
    pub distributional_uniform_decay: bool,
    /// Expansion constant on every set replaces the decay hypothesis.
    pub distributional_expansion_all: bool,
    /// Expansion constant on one self-loop set replaces the decay hypothesis.
    pub distributional_expansion_loop: bool,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ApplicabilityReport {
    pub hypotheses: HypothesisFlags,
    pub criteria: CriteriaFlags,
}

impl ApplicabilityReport {
    /// Builds the criteria flags as pure conjunctions of hypothesis bits.
    pub fn from_hypotheses(h: HypothesisFlags, induced_checked: Option<bool>) -> Self {
        let common = h.transition_matrix_valid && h.irreducible && h.branching_row && h.separation;
        let criteria = CriteriaFlags {
            liyorke_nested_cylinders: common && h.cylinders_nonempty && h.anchor_decay,
            liyorke_coupled_expansion: common && h.coupled_expansion && h.anchor_decay,
            liyorke_induced: induced_checked,
            distributional_uniform_decay: common
                && h.coupled_expansion
                && h.equicontinuous
                && h.return_decay,
            distributional_expansion_all: common
                && h.coupled_expansion
                && h.equicontinuous
                && h.expansion_all,
            distributional_expansion_loop: common
                && h.coupled_expansion
                && h.equicontinuous
                && h.expansion_loop,
        };
        Self {
            hypotheses: h,
            criteria,
        }
    }

    /// The emission invariant: flags must equal the conjunction of their
    /// recorded hypotheses.
    pub fn self_check(&self) -> bool {
        let recomputed =
            Self::from_hypotheses(self.hypotheses, self.criteria.liyorke_induced).criteria;
        recomputed == self.criteria
    }

    pub fn criterion(&self, name: &str) -> Option<bool> {
        match name {
            "liyorke_nested_cylinders" => Some(self.criteria.liyorke_nested_cylinders),
            "liyorke_coupled_expansion" => Some(self.criteria.liyorke_coupled_expansion),
            "distributional_uniform_decay" => Some(self.criteria.distributional_uniform_decay),
            "distributional_expansion_all" => Some(self.criteria.distributional_expansion_all),
            "distributional_expansion_loop" => Some(self.criteria.distributional_expansion_loop),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn applicability_is_a_conjunction() {
        let mut h = HypothesisFlags {
            transition_matrix_valid: true,
            irreducible: true,
            branching_row: true,
            separation: true,
            coupled_expansion: true,
            cylinders_nonempty: true,
            anchor_decay: true,
            return_decay: true,
            expansion_all: false,
            expansion_loop: true,
            equicontinuous: true,
        };
        let a = ApplicabilityReport::from_hypotheses(h, None);
        assert!(a.criteria.liyorke_nested_cylinders);
        assert!(a.criteria.distributional_expansion_loop);
        assert!(!a.criteria.distributional_expansion_all);
        assert!(a.self_check());

        h.irreducible = false;
        let a = ApplicabilityReport::from_hypotheses(h, None);
        assert!(!a.criteria.liyorke_nested_cylinders);
        assert!(!a.criteria.distributional_expansion_loop);
        assert!(a.self_check());
    }
}
