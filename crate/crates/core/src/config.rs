//! Run configuration: the TOML-facing schema and its validation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interval::{Interval, IntervalUnion};
use crate::system::{MapFamily, MapKind, ParamSpec, SystemError};
use crate::transition::Symbol;
use crate::verifier::{SetFamily, VerifierError};

#[derive(Debug, Error, Clone, PartialEq)]
#[error("config error at `{location}`: {message}")]
pub struct ConfigError {
    pub location: String,
    pub message: String,
}

fn bad(location: &str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        location: location.into(),
        message: message.into(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemConfig,
    pub sets: SetsConfig,
    pub matrix: MatrixConfig,
    #[serde(default)]
    pub horizons: HorizonsConfig,
    #[serde(default)]
    pub tolerances: TolerancesConfig,
    #[serde(default)]
    pub checkpoints: CheckpointsConfig,
    #[serde(default)]
    pub construct: ConstructConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub family: MapKind,
    pub params: ParamSpec,
    #[serde(default)]
    pub intercept: f64,
    #[serde(default = "default_overflow_radius")]
    pub overflow_radius: f64,
    #[serde(default = "default_bounded_radius")]
    pub bounded_radius: f64,
}

fn default_overflow_radius() -> f64 {
    1e6
}

fn default_bounded_radius() -> f64 {
    10.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetsConfig {
    /// Per-symbol base sets: `v[i]` is a list of `[lo, hi]` parts.
    pub v: Vec<Vec<[f64; 2]>>,
    /// Optional periodic per-index refinements: `per_index[n % P][i]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_index: Option<Vec<Vec<Vec<[f64; 2]>>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixConfig {
    pub entries: Vec<Vec<u8>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HorizonsConfig {
    /// Index horizon for per-index hypothesis checks and statistics.
    pub index_horizon: u64,
    /// Witness extraction depth.
    pub cylinder_depth: usize,
    /// Levels for the block-schedule constructions.
    pub schedule_levels: u32,
    /// Depth and index ranges for the decay profile.
    pub decay_depth: usize,
    pub decay_horizon: u64,
    /// Random-prefix nonemptiness probe.
    pub spot_depth: usize,
    pub spot_samples: u32,
    /// Extra backward-sweep depth protecting tracked orbit enclosures.
    pub guard_depth: usize,
}

impl Default for HorizonsConfig {
    fn default() -> Self {
        Self {
            index_horizon: 1000,
            cylinder_depth: 30,
            schedule_levels: 3,
            decay_depth: 20,
            decay_horizon: 100,
            spot_depth: 12,
            spot_samples: 50,
            guard_depth: 60,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TolerancesConfig {
    /// Bisection endpoint tolerance.
    pub tau: f64,
    /// Allowed inclusion slack deficit in the covering check.
    pub inclusion_slack: f64,
    /// Proximity threshold for Li-Yorke closeness evidence.
    pub proximity: f64,
    /// Margin above 1 required of the expansion constant.
    pub expansion_margin: f64,
    /// Density tolerance for distributional evidence.
    pub density: f64,
    /// Threshold the deepest decay row must stay below.
    pub decay_threshold: f64,
}

impl Default for TolerancesConfig {
    fn default() -> Self {
        Self {
            tau: 1e-12,
            inclusion_slack: 1e-9,
            proximity: 1e-6,
            expansion_margin: 1e-9,
            density: 0.2,
            decay_threshold: 1e-2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckpointMode {
    /// Evaluate densities at the constructed schedule boundaries.
    Schedule,
    /// Evaluate on a logarithmic grid of prefix lengths.
    All,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CheckpointsConfig {
    pub mode: CheckpointMode,
}

impl Default for CheckpointsConfig {
    fn default() -> Self {
        Self {
            mode: CheckpointMode::Schedule,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstructionKind {
    Liyorke,
    Distributional,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConstructConfig {
    pub construction: ConstructionKind,
    /// Sturmian selector slopes, one witness per entry.
    pub selectors: Vec<f64>,
    /// Periodic anchor stream replayed at the revisit checkpoints.
    pub anchor_period: Vec<Symbol>,
    /// Anchor symbol required at each segment boundary.
    pub revisit_symbol: Symbol,
    /// Segment lengths `m_k = slope * k + offset`.
    pub segment_slope: u64,
    pub segment_offset: u64,
    /// Periodic return stream driving the pumped construction.
    pub return_period: Vec<Symbol>,
}

impl Default for ConstructConfig {
    fn default() -> Self {
        Self {
            construction: ConstructionKind::Distributional,
            selectors: vec![std::f64::consts::SQRT_2 - 1.0, 0.618_033_988_749_894_9],
            anchor_period: vec![1],
            revisit_symbol: 1,
            segment_slope: 1,
            segment_offset: 0,
            return_period: vec![1],
        }
    }
}

/// Criteria the verify stage may be asked to certify.
pub const CRITERION_NAMES: &[&str] = &[
    "liyorke_nested_cylinders",
    "liyorke_coupled_expansion",
    "distributional_uniform_decay",
    "distributional_expansion_all",
    "distributional_expansion_loop",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    /// Criteria whose hypotheses must pass for a zero exit status.
    pub targets: Vec<String>,
    pub strict_separation: bool,
    /// Symbol for the single-set expansion scope; defaults to the first
    /// symbol with a self-loop.
    pub expansion_symbol: Option<Symbol>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            targets: vec![
                "liyorke_nested_cylinders".into(),
                "distributional_expansion_loop".into(),
            ],
            strict_separation: false,
            expansion_symbol: None,
        }
    }
}

impl RunConfig {
    /// Structural validation; everything that makes a config malformed
    /// rather than a failed hypothesis.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let t = &self.tolerances;
        for (name, v) in [
            ("tolerances.tau", t.tau),
            ("tolerances.inclusion_slack", t.inclusion_slack),
            ("tolerances.proximity", t.proximity),
            ("tolerances.expansion_margin", t.expansion_margin),
            ("tolerances.decay_threshold", t.decay_threshold),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(bad(name, "must be positive and finite"));
            }
        }
        if !(t.density > 0.0 && t.density < 1.0) {
            return Err(bad("tolerances.density", "must lie in (0, 1)"));
        }
        if self.sets.v.is_empty() {
            return Err(bad("sets.v", "at least one symbol set is required"));
        }
        let check_parts = |loc: String, parts: &[[f64; 2]]| -> Result<(), ConfigError> {
            if parts.is_empty() {
                return Err(bad(&loc, "set must have at least one interval"));
            }
            for (p, part) in parts.iter().enumerate() {
                if !(part[0].is_finite() && part[1].is_finite() && part[0] <= part[1]) {
                    return Err(bad(
                        &format!("{loc}[{p}]"),
                        format!("empty or malformed interval [{}, {}]", part[0], part[1]),
                    ));
                }
            }
            Ok(())
        };
        for (i, parts) in self.sets.v.iter().enumerate() {
            check_parts(format!("sets.v[{i}]"), parts)?;
        }
        if let Some(table) = &self.sets.per_index {
            for (slot, row) in table.iter().enumerate() {
                if row.len() != self.sets.v.len() {
                    return Err(bad(
                        &format!("sets.per_index[{slot}]"),
                        "one entry per symbol is required",
                    ));
                }
                for (i, parts) in row.iter().enumerate() {
                    check_parts(format!("sets.per_index[{slot}][{i}]"), parts)?;
                }
            }
        }
        if self.matrix.entries.len() != self.sets.v.len() {
            return Err(bad(
                "matrix.entries",
                "matrix size must match the number of symbol sets",
            ));
        }
        for (i, &s) in self.construct.selectors.iter().enumerate() {
            if !(s > 0.0 && s < 1.0) {
                return Err(bad(
                    &format!("construct.selectors[{i}]"),
                    "selector slopes must lie strictly inside (0, 1)",
                ));
            }
        }
        if self.construct.anchor_period.is_empty() || self.construct.return_period.is_empty() {
            return Err(bad("construct", "periodic words must be nonempty"));
        }
        if self.construct.segment_slope == 0 {
            return Err(bad("construct.segment_slope", "must be at least 1"));
        }
        if self.horizons.schedule_levels == 0 {
            return Err(bad("horizons.schedule_levels", "must be at least 1"));
        }
        for target in &self.verify.targets {
            if !CRITERION_NAMES.contains(&target.as_str()) {
                return Err(bad(
                    "verify.targets",
                    format!(
                        "unknown criterion `{target}`; expected one of {CRITERION_NAMES:?}"
                    ),
                ));
            }
        }
        Ok(())
    }

    pub fn to_map_family(&self) -> Result<MapFamily, SystemError> {
        MapFamily::with_options(
            self.system.family,
            self.system.params.clone(),
            self.system.intercept,
            self.system.overflow_radius,
        )
    }

    pub fn to_sets(&self) -> Result<SetFamily, VerifierError> {
        let unions = |rows: &[Vec<[f64; 2]>]| -> Vec<IntervalUnion> {
            rows.iter()
                .map(|parts| {
                    IntervalUnion::from_parts(
                        parts
                            .iter()
                            .filter_map(|p| Interval::new(p[0], p[1]))
                            .collect(),
                    )
                })
                .collect()
        };
        let family = SetFamily::new(unions(&self.sets.v))?;
        match &self.sets.per_index {
            Some(table) => family.with_per_index(table.iter().map(|row| unions(row)).collect()),
            None => Ok(family),
        }
    }

    /// Segment lengths for the revisit construction, one per level.
    pub fn segment_lengths(&self) -> Vec<u64> {
        (1..=self.horizons.schedule_levels as u64)
            .map(|k| self.construct.segment_slope * k + self.construct.segment_offset)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn reference_config() -> RunConfig {
        RunConfig {
            system: SystemConfig {
                family: MapKind::Logistic,
                params: ParamSpec::Uniform {
                    lo: 4.5,
                    hi: 5.0,
                    seed: 20240501,
                },
                intercept: 0.0,
                overflow_radius: default_overflow_radius(),
                bounded_radius: default_bounded_radius(),
            },
            sets: SetsConfig {
                v: vec![vec![[0.0, 1.0 / 3.0]], vec![[0.6, 1.0]]],
                per_index: None,
            },
            matrix: MatrixConfig {
                entries: vec![vec![1, 1], vec![1, 1]],
            },
            horizons: HorizonsConfig::default(),
            tolerances: TolerancesConfig::default(),
            checkpoints: CheckpointsConfig::default(),
            construct: ConstructConfig::default(),
            verify: VerifyConfig::default(),
        }
    }

    #[test]
    fn reference_config_validates() {
        reference_config().validate().unwrap();
    }

    #[test]
    fn empty_interval_is_a_config_error() {
        let mut cfg = reference_config();
        cfg.sets.v[0] = vec![[0.4, 0.2]];
        let err = cfg.validate().unwrap_err();
        assert!(err.location.contains("sets.v[0]"));
    }

    #[test]
    fn unknown_target_rejected() {
        let mut cfg = reference_config();
        cfg.verify.targets = vec!["theorem_of_everything".into()];
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn segment_lengths_follow_rule() {
        let mut cfg = reference_config();
        cfg.horizons.schedule_levels = 4;
        cfg.construct.segment_slope = 3;
        cfg.construct.segment_offset = 1;
        assert_eq!(cfg.segment_lengths(), vec![4, 7, 10, 13]);
    }
}
