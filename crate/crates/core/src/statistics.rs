//! Orbit-pair chaos statistics: proximality/separation extremes and
//! distributional densities along checkpoint sequences.
//!
//! Counting is exact: densities are integer counts divided by the prefix
//! length. Asymptotic claims are never asserted; finite-horizon surrogates
//! (tail-window extremes) are reported together with the window they came
//! from. When traces carry enclosure widths, distance comparisons are
//! inflated by the widths at both positions so verdicts hold for the true
//! witness orbits, not just the computed midpoints.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::symbolic::{SymbolStream, SymbolicError};
use crate::system::{compose_forward, System, SystemError};
use crate::verifier::{tracked_enclosures, SetFamily, VerifierError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("orbit traces have different horizons ({0} vs {1})")]
    HorizonMismatch(usize, usize),
    #[error("checkpoint set is empty")]
    EmptyCheckpointSet,
    #[error("checkpoints must be strictly increasing and within the horizon")]
    BadCheckpoints,
    #[error("epsilon grid must be nonempty with positive entries")]
    BadEpsilonGrid,
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Verifier(#[from] VerifierError),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
}

/// A forward orbit `x_n = f_0^n(x_0)` for `n <= horizon`, or a tracked
/// witness orbit with per-index enclosure widths.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrbitTrace {
    pub initial: f64,
    pub values: Vec<f64>,
    /// Enclosure widths for tracked orbits; `None` for forward iteration.
    pub widths: Option<Vec<f64>>,
    pub bounded: bool,
    pub bounding_radius: f64,
}

impl OrbitTrace {
    pub fn horizon(&self) -> usize {
        self.values.len() - 1
    }

    pub fn max_width(&self) -> f64 {
        self.widths
            .as_ref()
            .map_or(0.0, |w| w.iter().copied().fold(0.0, f64::max))
    }
}

/// Forward-iterated orbit with overflow guarding. The boundedness flag uses
/// `bounded_radius`, which is tighter than the overflow guard.
pub fn orbit<S: System + ?Sized>(
    sys: &S,
    x0: f64,
    horizon: u64,
    bounded_radius: f64,
) -> Result<OrbitTrace, StatsError> {
    let mut values = Vec::with_capacity(horizon as usize + 1);
    values.push(x0);
    let mut cur = x0;
    for n in 0..horizon {
        cur = sys.eval(n, cur)?;
        let bound = sys.overflow_radius();
        if !cur.is_finite() || cur.abs() > bound {
            return Err(StatsError::System(SystemError::OverflowGuard {
                index: n + 1,
                value: cur,
                bound,
            }));
        }
        values.push(cur);
    }
    let bounded = values.iter().all(|v| v.abs() <= bounded_radius);
    Ok(OrbitTrace {
        initial: x0,
        values,
        widths: None,
        bounded,
        bounding_radius: bounded_radius,
    })
}

/// Witness orbit reconstructed from per-index cylinder enclosures in one
/// backward sweep. Stable at horizons where forward iteration of an
/// expanding map has long lost the itinerary.
pub fn witness_orbit<S: System + ?Sized>(
    sys: &S,
    sets: &SetFamily,
    stream: &SymbolStream,
    horizon: u64,
    guard_depth: usize,
    tol: f64,
    bounded_radius: f64,
) -> Result<OrbitTrace, StatsError> {
    let track = tracked_enclosures(sys, sets, stream, horizon, guard_depth, tol)?;
    let values: Vec<f64> = track.iter().map(|&(mid, _)| mid).collect();
    let widths: Vec<f64> = track.iter().map(|&(_, w)| w).collect();
    let bounded = values.iter().all(|v| v.abs() <= bounded_radius);
    Ok(OrbitTrace {
        initial: values[0],
        values,
        widths: Some(widths),
        bounded,
        bounding_radius: bounded_radius,
    })
}

fn distances(tx: &OrbitTrace, ty: &OrbitTrace) -> Result<(Vec<f64>, Vec<f64>), StatsError> {
    if tx.values.len() != ty.values.len() {
        return Err(StatsError::HorizonMismatch(
            tx.values.len() - 1,
            ty.values.len() - 1,
        ));
    }
    let d: Vec<f64> = tx
        .values
        .iter()
        .zip(&ty.values)
        .map(|(a, b)| (a - b).abs())
        .collect();
    let infl: Vec<f64> = (0..d.len())
        .map(|j| {
            let wx = tx.widths.as_ref().map_or(0.0, |w| w[j]);
            let wy = ty.widths.as_ref().map_or(0.0, |w| w[j]);
            wx + wy
        })
        .collect();
    Ok((d, infl))
}

/// Li-Yorke pair statistics at a finite horizon.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LiYorkeStats {
    pub delta: f64,
    pub proximity_tol: f64,
    /// Raw distance trace, index-aligned with the orbits.
    pub distances: Vec<f64>,
    pub max_distance: f64,
    pub argmax: u64,
    /// Minimum distance over the proximality checkpoints (inflated upward
    /// by enclosure widths, so it upper-bounds the true distance there).
    pub min_checkpoint_distance: f64,
    pub argmin_checkpoint: u64,
    /// Tail-window surrogates for the asymptotic extremes, with the window.
    pub liminf_surrogate: f64,
    pub limsup_surrogate: f64,
    pub tail_window: (u64, u64),
    /// Evidence verdict at this horizon: separation beyond `delta - tol`
    /// and proximality below `proximity_tol` at some checkpoint. Not an
    /// asymptotic claim.
    pub scrambled_evidence: bool,
    pub max_inflation: f64,
}

/// Evaluates the scrambled-pair evidence for two traces: the distance must
/// dip to `proximity_tol` at some checkpoint (default: the tail quarter of
/// the trace) and exceed `delta - proximity_tol` somewhere.
pub fn liyorke_statistics(
    tx: &OrbitTrace,
    ty: &OrbitTrace,
    delta: f64,
    checkpoints: Option<&[u64]>,
    proximity_tol: f64,
) -> Result<LiYorkeStats, StatsError> {
    let (d, infl) = distances(tx, ty)?;
    let len = d.len();
    let tail_start = (3 * len / 4).min(len - 1);

    let default_cp: Vec<u64> = (tail_start as u64..len as u64).collect();
    let cps: &[u64] = match checkpoints {
        Some(c) if !c.is_empty() => c,
        Some(_) => return Err(StatsError::EmptyCheckpointSet),
        None => &default_cp,
    };
    if cps.iter().any(|&c| c as usize >= len) {
        return Err(StatsError::BadCheckpoints);
    }

    let (mut max_distance, mut argmax) = (f64::NEG_INFINITY, 0u64);
    for (j, &v) in d.iter().enumerate() {
        // deflate by the inflation so separation claims survive witness error
        let eff = v - infl[j];
        if eff > max_distance {
            max_distance = eff;
            argmax = j as u64;
        }
    }
    max_distance = d[argmax as usize]; // report the raw value at the argmax

    let (mut min_cp, mut argmin_cp) = (f64::INFINITY, 0u64);
    for &c in cps {
        let eff = d[c as usize] + infl[c as usize];
        if eff < min_cp {
            min_cp = eff;
            argmin_cp = c;
        }
    }

    let tail = &d[tail_start..];
    let liminf = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let limsup = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let scrambled = min_cp <= proximity_tol
        && (max_distance - infl[argmax as usize]) >= delta - proximity_tol;
    let max_inflation = infl.iter().copied().fold(0.0, f64::max);

    Ok(LiYorkeStats {
        delta,
        proximity_tol,
        distances: d,
        max_distance,
        argmax,
        min_checkpoint_distance: min_cp,
        argmin_checkpoint: argmin_cp,
        liminf_surrogate: liminf,
        limsup_surrogate: limsup,
        tail_window: (tail_start as u64, (len - 1) as u64),
        scrambled_evidence: scrambled,
        max_inflation,
    })
}

/// Density of one epsilon threshold at one checkpoint count.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DensityPoint {
    /// Prefix length `n` along the checkpoint sequence.
    pub count_n: u64,
    pub epsilon: f64,
    /// Exact count of positions with distance below the threshold.
    pub count: u64,
    pub density: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EpsilonSummary {
    pub epsilon: f64,
    /// Densities at the requested closeness evaluation counts.
    pub at_evals: Vec<DensityPoint>,
    /// Maximum density over every prefix length: the upper-density surrogate.
    pub best_density: f64,
    /// Passes when the best evaluated closeness density reaches `1 - tol`.
    pub upper_ok: bool,
}

/// Distributional statistics for a pair along a checkpoint sequence.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DistributionalStats {
    pub delta: f64,
    pub density_tol: f64,
    pub per_epsilon: Vec<EpsilonSummary>,
    /// Delta-closeness densities at the separation evaluation counts.
    pub delta_at_evals: Vec<DensityPoint>,
    /// Minimum delta-density over the requested separation counts.
    pub min_delta_density: f64,
    /// Minimum delta-density over the tail half of the sequence: the
    /// lower-density surrogate.
    pub tail_min_delta_density: f64,
    pub evidence: bool,
}

/// Options for [`distributional_statistics`].
pub struct DistributionalOptions<'a> {
    /// Checkpoint sequence `P` as orbit indices; `None` means all indices.
    pub sequence: Option<&'a [u64]>,
    /// Prefix lengths along `P` at which closeness densities are recorded.
    pub closeness_evals: &'a [u64],
    /// Prefix lengths along `P` at which delta-densities are recorded.
    pub separation_evals: &'a [u64],
    pub epsilon_grid: &'a [f64],
    pub delta: f64,
    pub density_tol: f64,
}

/// Computes both density families: for each epsilon the closeness density
/// along the sequence, and the delta-closeness density whose liminf the
/// distributional criterion drives to zero. Closeness counting inflates the
/// measured distance upward and separation counting deflates it, so both
/// counts are conservative for the true orbits.
pub fn distributional_statistics(
    tx: &OrbitTrace,
    ty: &OrbitTrace,
    opts: &DistributionalOptions,
) -> Result<DistributionalStats, StatsError> {
    let (d, infl) = distances(tx, ty)?;
    let len = d.len() as u64;
    let all: Vec<u64>;
    let seq: &[u64] = match opts.sequence {
        Some(p) if p.is_empty() => return Err(StatsError::EmptyCheckpointSet),
        Some(p) => {
            if p.windows(2).any(|w| w[0] >= w[1]) || p.iter().any(|&i| i >= len) {
                return Err(StatsError::BadCheckpoints);
            }
            p
        }
        None => {
            all = (0..len).collect();
            &all
        }
    };
    if opts.epsilon_grid.is_empty() || opts.epsilon_grid.iter().any(|&e| !(e > 0.0)) {
        return Err(StatsError::BadEpsilonGrid);
    }
    let valid_eval = |evals: &[u64]| evals.iter().all(|&n| n >= 1 && n <= seq.len() as u64);
    if !valid_eval(opts.closeness_evals) || !valid_eval(opts.separation_evals) {
        return Err(StatsError::BadCheckpoints);
    }

    let mut per_epsilon = Vec::with_capacity(opts.epsilon_grid.len());
    for &eps in opts.epsilon_grid {
        let mut count = 0u64;
        let mut best = 0.0f64;
        let mut at_evals = Vec::new();
        let mut evals: Vec<u64> = opts.closeness_evals.to_vec();
        evals.sort_unstable();
        let mut next_eval = evals.iter().peekable();
        for (i, &p) in seq.iter().enumerate() {
            let j = p as usize;
            if d[j] + infl[j] < eps {
                count += 1;
            }
            let n = (i + 1) as u64;
            best = best.max(count as f64 / n as f64);
            while next_eval.peek() == Some(&&n) {
                at_evals.push(DensityPoint {
                    count_n: n,
                    epsilon: eps,
                    count,
                    density: count as f64 / n as f64,
                });
                next_eval.next();
            }
        }
        let upper_ok = at_evals
            .iter()
            .map(|p| p.density)
            .fold(0.0, f64::max)
            >= 1.0 - opts.density_tol;
        per_epsilon.push(EpsilonSummary {
            epsilon: eps,
            at_evals,
            best_density: best,
            upper_ok,
        });
    }

    // delta-density trace with deflated distances
    let mut delta_at_evals = Vec::new();
    let mut evals: Vec<u64> = opts.separation_evals.to_vec();
    evals.sort_unstable();
    let mut next_eval = evals.iter().peekable();
    let mut count = 0u64;
    let tail_start = seq.len() / 2;
    let mut tail_min = f64::INFINITY;
    for (i, &p) in seq.iter().enumerate() {
        let j = p as usize;
        if d[j] - infl[j] < opts.delta {
            count += 1;
        }
        let n = (i + 1) as u64;
        if i >= tail_start {
            tail_min = tail_min.min(count as f64 / n as f64);
        }
        while next_eval.peek() == Some(&&n) {
            delta_at_evals.push(DensityPoint {
                count_n: n,
                epsilon: opts.delta,
                count,
                density: count as f64 / n as f64,
            });
            next_eval.next();
        }
    }
    let min_delta_density = delta_at_evals
        .iter()
        .map(|p| p.density)
        .fold(f64::INFINITY, f64::min);

    let lower_ok = min_delta_density <= opts.density_tol;
    let evidence = lower_ok && per_epsilon.iter().any(|e| e.upper_ok);

    Ok(DistributionalStats {
        delta: opts.delta,
        density_tol: opts.density_tol,
        per_epsilon,
        delta_at_evals,
        min_delta_density,
        tail_min_delta_density: tail_min,
        evidence,
    })
}

/// Default geometric epsilon grid from `delta / 10^3` to `delta`.
pub fn default_epsilon_grid(delta: f64, points: usize) -> Vec<f64> {
    let lo = delta / 1e3;
    let ratio = (delta / lo).powf(1.0 / (points.saturating_sub(1).max(1)) as f64);
    (0..points).map(|i| lo * ratio.powi(i as i32)).collect()
}

/// Outcome of the internal cross-check between the two statistics suites.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Consistency {
    Consistent,
    Inconsistent,
    Inconclusive,
}

/// Sanity check: on the same witness pair, Li-Yorke evidence and
/// distributional evidence should agree. Short horizons are inconclusive,
/// not inconsistent.
pub fn cross_check_equivalence(
    liyorke_evidence: bool,
    distributional_evidence: bool,
    horizon: u64,
    min_horizon: u64,
) -> Consistency {
    if horizon < min_horizon {
        return Consistency::Inconclusive;
    }
    if liyorke_evidence == distributional_evidence {
        Consistency::Consistent
    } else {
        Consistency::Inconsistent
    }
}

/// Orbit identity linking a system to its induced system: the induced orbit
/// at step `n` equals `f_0^{k_n}(x_0)` on the base system.
pub fn induced_orbit_matches<S: System + ?Sized, T: System + ?Sized>(
    base: &S,
    induced: &T,
    cuts: &[u64],
    x0: f64,
    tol: f64,
) -> Result<bool, StatsError> {
    let mut x = x0;
    for (n, &k) in cuts.iter().enumerate() {
        x = induced.eval(n as u64, x)?;
        let direct = compose_forward(base, 0, k, x0)?;
        if (x - direct).abs() > tol {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{MapFamily, MapKind, ParamSpec};

    fn logistic45() -> MapFamily {
        MapFamily::new(MapKind::Logistic, ParamSpec::Constant { value: 4.5 }).unwrap()
    }

    fn trace(values: Vec<f64>) -> OrbitTrace {
        OrbitTrace {
            initial: values[0],
            values,
            widths: None,
            bounded: true,
            bounding_radius: 10.0,
        }
    }

    #[test]
    fn orbit_fixed_point_and_divergence() {
        let f = logistic45();
        let t = orbit(&f, 0.0, 50, 10.0).unwrap();
        assert!(t.values.iter().all(|&v| v == 0.0));
        assert!(t.bounded);

        let err = orbit(&f, 2.0, 50, 10.0).unwrap_err();
        assert!(matches!(
            err,
            StatsError::System(SystemError::OverflowGuard { .. })
        ));
    }

    #[test]
    fn identical_traces_are_not_scrambled() {
        let t = trace(vec![0.1; 64]);
        let s = liyorke_statistics(&t, &t, 0.25, None, 1e-6).unwrap();
        assert_eq!(s.max_distance, 0.0);
        assert!(!s.scrambled_evidence);
    }

    #[test]
    fn horizon_mismatch_detected() {
        let a = trace(vec![0.0; 4]);
        let b = trace(vec![0.0; 5]);
        assert!(matches!(
            liyorke_statistics(&a, &b, 0.1, None, 1e-6),
            Err(StatsError::HorizonMismatch(3, 4))
        ));
    }

    #[test]
    fn statistics_are_symmetric() {
        let a = trace((0..100).map(|i| (i as f64 * 0.37).sin().abs()).collect());
        let b = trace((0..100).map(|i| (i as f64 * 0.21).cos().abs()).collect());
        let sab = liyorke_statistics(&a, &b, 0.3, None, 1e-6).unwrap();
        let sba = liyorke_statistics(&b, &a, 0.3, None, 1e-6).unwrap();
        assert_eq!(sab.max_distance, sba.max_distance);
        assert_eq!(sab.min_checkpoint_distance, sba.min_checkpoint_distance);

        let opts = DistributionalOptions {
            sequence: None,
            closeness_evals: &[50, 100],
            separation_evals: &[50, 100],
            epsilon_grid: &[0.01, 0.1, 0.3],
            delta: 0.3,
            density_tol: 0.2,
        };
        let dab = distributional_statistics(&a, &b, &opts).unwrap();
        let dba = distributional_statistics(&b, &a, &opts).unwrap();
        for (x, y) in dab.per_epsilon.iter().zip(&dba.per_epsilon) {
            assert_eq!(x.best_density, y.best_density);
        }
    }

    #[test]
    fn densities_bounded_and_monotone_in_epsilon() {
        let a = trace((0..200).map(|i| (i as f64 * 0.13).sin() * 0.5 + 0.5).collect());
        let b = trace((0..200).map(|i| (i as f64 * 0.19).sin() * 0.5 + 0.5).collect());
        let grid = [0.001, 0.01, 0.05, 0.2, 0.5];
        let opts = DistributionalOptions {
            sequence: None,
            closeness_evals: &[1, 10, 100, 200],
            separation_evals: &[1, 10, 100, 200],
            epsilon_grid: &grid,
            delta: 0.25,
            density_tol: 0.2,
        };
        let s = distributional_statistics(&a, &b, &opts).unwrap();
        for e in &s.per_epsilon {
            for p in &e.at_evals {
                assert!(p.density >= 0.0 && p.density <= 1.0);
                assert_eq!(p.density, p.count as f64 / p.count_n as f64);
            }
        }
        // index-wise monotone in epsilon at each evaluation count
        for w in s.per_epsilon.windows(2) {
            for (lo, hi) in w[0].at_evals.iter().zip(&w[1].at_evals) {
                assert!(lo.count <= hi.count);
            }
        }
    }

    #[test]
    fn identical_traces_full_density() {
        let t = trace(vec![0.4; 128]);
        let opts = DistributionalOptions {
            sequence: None,
            closeness_evals: &[64, 128],
            separation_evals: &[64, 128],
            epsilon_grid: &[0.01, 0.1],
            delta: 0.2,
            density_tol: 0.2,
        };
        let s = distributional_statistics(&t, &t, &opts).unwrap();
        for e in &s.per_epsilon {
            assert!(e.upper_ok);
            assert_eq!(e.best_density, 1.0);
        }
        // delta-density is identically 1, so there is no separation evidence
        assert_eq!(s.min_delta_density, 1.0);
        assert!(!s.evidence);
    }

    #[test]
    fn cross_check_policy() {
        assert_eq!(
            cross_check_equivalence(true, true, 1000, 100),
            Consistency::Consistent
        );
        assert_eq!(
            cross_check_equivalence(false, false, 1000, 100),
            Consistency::Consistent
        );
        assert_eq!(
            cross_check_equivalence(true, false, 1000, 100),
            Consistency::Inconsistent
        );
        assert_eq!(
            cross_check_equivalence(true, false, 10, 100),
            Consistency::Inconclusive
        );
    }

    #[test]
    fn induced_orbit_identity() {
        // r <= 4 keeps [0,1] invariant so long compositions stay bounded
        let mk = || MapFamily::new(MapKind::Logistic, ParamSpec::Constant { value: 3.8 }).unwrap();
        let cuts = vec![2, 5, 9, 14];
        let induced = crate::system::induced_system(mk(), cuts.clone()).unwrap();
        assert!(induced_orbit_matches(&mk(), &induced, &cuts, 0.2, 1e-12).unwrap());
    }
}
