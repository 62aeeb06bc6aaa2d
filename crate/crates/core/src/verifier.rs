//! Hypothesis checking and cylinder-set computation.
//!
//! The checks certify, on a finite index horizon, the ingredients the chaos
//! criteria need: image covering with separation (coupled expansion),
//! expansion constants, a uniform Lipschitz modulus as the practical
//! equi-continuity surrogate, and nonemptiness/decay of nested cylinder
//! enclosures. Expansion and Lipschitz bounds are computed from the declared
//! parameter range when one exists, which extends them to every index;
//! otherwise they are flagged as horizon-limited.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interval::{Interval, IntervalUnion};
use crate::symbolic::{SymbolStream, SymbolicError};
use crate::system::{System, SystemError};
use crate::transition::{Symbol, SymbolWord, TransitionError, TransitionMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifierError {
    #[error("set family must cover at least two symbols")]
    TooFewSymbols,
    #[error("set for symbol {0} is empty")]
    EmptySet(Symbol),
    #[error("per-index sets must have one entry per symbol")]
    RaggedPerIndex,
    #[error("per-index set for symbol {symbol} at slot {slot} is not contained in its base set")]
    NotRefinement { symbol: Symbol, slot: u64 },
    #[error("sets {i} and {j} violate the separation condition at index {n}")]
    SeparationViolated { i: Symbol, j: Symbol, n: u64 },
    #[error("matrix size {matrix} does not match the set family size {sets}")]
    SymbolCountMismatch { matrix: usize, sets: usize },
    #[error("expansion scope symbol {0} has no self-loop in the matrix")]
    LoopMissing(Symbol),
    #[error("cylinder is empty at depth {0}")]
    EmptyCylinder(usize),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error(transparent)]
    Transition(#[from] TransitionError),
}

/// Per-symbol base sets `V_i` with optional per-index refinements `V_{i,n}`,
/// periodic in `n`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SetFamily {
    base: Vec<IntervalUnion>,
    per_index: Option<Vec<Vec<IntervalUnion>>>,
}

impl SetFamily {
    pub fn new(base: Vec<IntervalUnion>) -> Result<Self, VerifierError> {
        if base.len() < 2 {
            return Err(VerifierError::TooFewSymbols);
        }
        for (i, set) in base.iter().enumerate() {
            if set.is_empty() {
                return Err(VerifierError::EmptySet(i as Symbol + 1));
            }
        }
        Ok(Self {
            base,
            per_index: None,
        })
    }

    /// Installs periodic per-index refinements: `table[n % P][i]` is
    /// `V_{i+1, n}`. Every entry must be a nonempty subset of its base set.
    pub fn with_per_index(mut self, table: Vec<Vec<IntervalUnion>>) -> Result<Self, VerifierError> {
        for (slot, row) in table.iter().enumerate() {
            if row.len() != self.base.len() {
                return Err(VerifierError::RaggedPerIndex);
            }
            for (i, set) in row.iter().enumerate() {
                if set.is_empty() {
                    return Err(VerifierError::EmptySet(i as Symbol + 1));
                }
                if set.inclusion_slack(&self.base[i]) < 0.0 {
                    return Err(VerifierError::NotRefinement {
                        symbol: i as Symbol + 1,
                        slot: slot as u64,
                    });
                }
            }
        }
        self.per_index = (!table.is_empty()).then_some(table);
        Ok(self)
    }

    pub fn symbol_count(&self) -> usize {
        self.base.len()
    }

    /// Period of the per-index refinement (1 when the sets are constant).
    pub fn period(&self) -> u64 {
        self.per_index.as_ref().map_or(1, |t| t.len() as u64)
    }

    pub fn base_set(&self, symbol: Symbol) -> &IntervalUnion {
        &self.base[symbol as usize - 1]
    }

    /// `V_{symbol, n}`.
    pub fn set_at(&self, symbol: Symbol, n: u64) -> &IntervalUnion {
        match &self.per_index {
            Some(table) => &table[(n % table.len() as u64) as usize][symbol as usize - 1],
            None => &self.base[symbol as usize - 1],
        }
    }

    /// Minimum pairwise distance of the base sets; the scrambling threshold.
    pub fn delta_separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.base.len() {
            for j in i + 1..self.base.len() {
                best = best.min(self.base[i].distance(&self.base[j]));
            }
        }
        best
    }

    fn check_separation(&self, strict: bool) -> Result<(), VerifierError> {
        for slot in 0..self.period() {
            for i in 1..=self.base.len() as Symbol {
                for j in i + 1..=self.base.len() as Symbol {
                    let a = self.set_at(i, slot);
                    let b = self.set_at(j, slot);
                    let bad = if strict {
                        a.distance(b) <= 0.0
                    } else {
                        a.interiors_overlap(b)
                    };
                    if bad {
                        return Err(VerifierError::SeparationViolated { i, j, n: slot });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Outcome of the coupled-expansion check.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoupledExpansionVerdict {
    pub pass: bool,
    pub strict: bool,
    pub horizon: u64,
    /// Minimum inclusion slack over all symbols and indices.
    pub min_slack: f64,
    /// Symbol/index attaining the minimum slack.
    pub worst: Option<(Symbol, u64)>,
    /// Failing (symbol, index) pairs, capped at 32 entries.
    pub failing: Vec<(Symbol, u64)>,
}

/// Checks that `f_n(V_{i,n})` covers the union of the successor sets at
/// `n + 1` for every `i` and every `n < horizon`, with inclusion slack at
/// least `-slack_tol`, after validating the separation condition selected by
/// `strict`.
pub fn check_coupled_expansion<S: System + ?Sized>(
    sys: &S,
    sets: &SetFamily,
    matrix: &TransitionMatrix,
    horizon: u64,
    strict: bool,
    slack_tol: f64,
) -> Result<CoupledExpansionVerdict, VerifierError> {
    if matrix.size() != sets.symbol_count() {
        return Err(VerifierError::SymbolCountMismatch {
            matrix: matrix.size(),
            sets: sets.symbol_count(),
        });
    }
    sets.check_separation(strict)?;

    let mut min_slack = f64::INFINITY;
    let mut worst = None;
    let mut failing = Vec::new();
    for n in 0..horizon {
        for i in 1..=sets.symbol_count() as Symbol {
            let source = sets.set_at(i, n);
            let image_parts = source
                .parts()
                .iter()
                .map(|p| sys.image_of(n, *p))
                .collect::<Result<Vec<_>, _>>()?;
            let image = IntervalUnion::from_parts(image_parts);
            let mut required = Vec::new();
            for j in matrix.successors(i) {
                required.extend_from_slice(sets.set_at(j, n + 1).parts());
            }
            let required = IntervalUnion::from_parts(required);
            let slack = required.inclusion_slack(&image);
            if slack < min_slack {
                min_slack = slack;
                worst = Some((i, n));
            }
            if slack < -slack_tol && failing.len() < 32 {
                failing.push((i, n));
            }
        }
    }
    Ok(CoupledExpansionVerdict {
        pass: failing.is_empty(),
        strict,
        horizon,
        min_slack,
        worst,
        failing,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpansionScope {
    AllSymbols,
    /// Expansion required only inside the set of one symbol, which must
    /// carry a self-loop in the matrix.
    Single(Symbol),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExpansionVerdict {
    pub pass: bool,
    pub lambda: f64,
    pub scope: ExpansionScope,
    /// True when the bound came from the declared parameter range and is
    /// therefore valid for every index, not just the checked horizon.
    pub analytic: bool,
    pub horizon: u64,
}

/// Infimum of `min |f'|` over the scoped sets; passes when it exceeds
/// `1 + margin`.
pub fn check_expansion<S: System + ?Sized>(
    sys: &S,
    sets: &SetFamily,
    matrix: &TransitionMatrix,
    horizon: u64,
    scope: ExpansionScope,
    margin: f64,
) -> Result<ExpansionVerdict, VerifierError> {
    let symbols: Vec<Symbol> = match scope {
        ExpansionScope::AllSymbols => (1..=sets.symbol_count() as Symbol).collect(),
        ExpansionScope::Single(j0) => {
            matrix.check_symbol(j0)?;
            if !matrix.entry(j0, j0) {
                return Err(VerifierError::LoopMissing(j0));
            }
            vec![j0]
        }
    };

    let scoped_parts = |slot: u64| -> Vec<Interval> {
        symbols
            .iter()
            .flat_map(|&i| sets.set_at(i, slot).parts().iter().copied())
            .collect()
    };

    // Analytic route first: bounds from the declared parameter range.
    let mut lambda = f64::INFINITY;
    let mut analytic = true;
    'outer: for slot in 0..sets.period() {
        for part in scoped_parts(slot) {
            match sys.deriv_abs_bounds_all(part) {
                Some((lo, _)) => lambda = lambda.min(lo),
                None => {
                    analytic = false;
                    break 'outer;
                }
            }
        }
    }
    if !analytic {
        lambda = f64::INFINITY;
        for n in 0..horizon {
            for part in scoped_parts(n % sets.period()) {
                let (lo, _) = sys.deriv_abs_bounds(n, part)?;
                lambda = lambda.min(lo);
            }
        }
    }
    Ok(ExpansionVerdict {
        pass: lambda > 1.0 + margin,
        lambda,
        scope,
        analytic,
        horizon,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EquicontinuityBound {
    /// Uniform Lipschitz modulus over the union of the sets.
    pub bound: f64,
    pub analytic: bool,
    pub horizon: u64,
}

/// Supremum of `max |f'|` over the union of all sets: a finite value
/// certifies a uniform Lipschitz modulus, the practical equi-continuity
/// surrogate on the checked horizon (or on every index when analytic).
pub fn equicontinuity_bound<S: System + ?Sized>(
    sys: &S,
    sets: &SetFamily,
    horizon: u64,
) -> Result<EquicontinuityBound, VerifierError> {
    let all_parts = |slot: u64| -> Vec<Interval> {
        (1..=sets.symbol_count() as Symbol)
            .flat_map(|i| sets.set_at(i, slot).parts().iter().copied())
            .collect()
    };
    let mut bound: f64 = 0.0;
    let mut analytic = true;
    'outer: for slot in 0..sets.period() {
        for part in all_parts(slot) {
            match sys.deriv_abs_bounds_all(part) {
                Some((_, hi)) => bound = bound.max(hi),
                None => {
                    analytic = false;
                    break 'outer;
                }
            }
        }
    }
    if !analytic {
        bound = 0.0;
        for n in 0..horizon {
            for part in all_parts(n % sets.period()) {
                let (_, hi) = sys.deriv_abs_bounds(n, part)?;
                bound = bound.max(hi);
            }
        }
    }
    Ok(EquicontinuityBound {
        bound,
        analytic,
        horizon,
    })
}

/// Computed enclosure of a nested cylinder set.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CylinderEnclosure {
    pub prefix: SymbolWord,
    pub base_index: u64,
    /// Depth `m`: the prefix has `m + 1` symbols.
    pub depth: usize,
    pub enclosure: IntervalUnion,
    /// Whether the prefix is allowable for the configured matrix; the
    /// cylinder is defined either way.
    pub allowable: bool,
}

impl CylinderEnclosure {
    pub fn diameter(&self) -> f64 {
        self.enclosure.diameter()
    }

    pub fn is_empty(&self) -> bool {
        self.enclosure.is_empty()
    }
}

/// One backward induction step: the part of `V_{symbol, idx}` mapped into
/// `next` by `f_idx`. The target is padded by `tol` so bisection noise on
/// near-degenerate enclosures cannot produce spurious empty sets; the
/// padding only ever enlarges the enclosure.
fn backward_step<S: System + ?Sized>(
    sys: &S,
    sets: &SetFamily,
    idx: u64,
    symbol: Symbol,
    next: &IntervalUnion,
    tol: f64,
) -> Result<IntervalUnion, VerifierError> {
    let padded = IntervalUnion::from_parts(
        next.parts()
            .iter()
            .filter_map(|p| Interval::new(p.lo() - tol, p.hi() + tol))
            .collect(),
    );
    let mut parts = Vec::new();
    for dom in sets.set_at(symbol, idx).parts() {
        let pre = sys.preimage_in(idx, &padded, *dom, tol)?;
        parts.extend_from_slice(pre.parts());
    }
    Ok(IntervalUnion::from_parts(parts))
}

/// Enclosure of the cylinder following `prefix` from base index `base`,
/// computed by backward induction. An empty result is data, not an error.
pub fn cylinder<S: System + ?Sized>(
    sys: &S,
    sets: &SetFamily,
    matrix: Option<&TransitionMatrix>,
    prefix: &SymbolWord,
    base: u64,
    tol: f64,
) -> Result<CylinderEnclosure, VerifierError> {
    let symbols = prefix.symbols();
    for &s in symbols {
        if s == 0 || s as usize > sets.symbol_count() {
            return Err(VerifierError::Transition(TransitionError::SymbolOutOfRange(
                s,
                sets.symbol_count(),
            )));
        }
    }
    let depth = symbols.len() - 1;
    let mut cur = sets.set_at(symbols[depth], base + depth as u64).clone();
    for k in (0..depth).rev() {
        cur = backward_step(sys, sets, base + k as u64, symbols[k], &cur, tol)?;
        if cur.is_empty() {
            break;
        }
    }
    Ok(CylinderEnclosure {
        prefix: prefix.clone(),
        base_index: base,
        depth,
        enclosure: cur,
        allowable: matrix.map_or(true, |m| m.is_allowable(prefix)),
    })
}

/// Diameter table `d(V^{m,n})` for the prefixes of a periodic stream, with
/// `m <= max_depth` and `n <= index_horizon`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecayProfile {
    pub max_depth: usize,
    pub index_horizon: u64,
    /// `diameters[m][n]`.
    pub diameters: Vec<Vec<f64>>,
    /// Maximum over `n` at each depth.
    pub per_depth_max: Vec<f64>,
}

impl DecayProfile {
    pub fn per_depth_nonincreasing(&self, tol: f64) -> bool {
        self.per_depth_max.windows(2).all(|w| w[1] <= w[0] + tol)
    }

    pub fn final_max(&self) -> f64 {
        *self.per_depth_max.last().expect("at least depth 0")
    }

    /// Smallest depth whose worst-case diameter drops below `eps`.
    pub fn stabilization_depth(&self, eps: f64) -> Option<usize> {
        self.per_depth_max.iter().position(|&d| d < eps)
    }

    /// Uniform-convergence check on the covered grid: the deepest row is
    /// below `threshold` everywhere and the per-depth maxima do not grow.
    pub fn uniform_pass(&self, threshold: f64, tol: f64) -> bool {
        self.final_max() <= threshold && self.per_depth_nonincreasing(tol)
    }
}

/// Computes the decay profile of a periodic stream's cylinders.
pub fn cylinder_decay_profile<S: System + ?Sized>(
    sys: &S,
    sets: &SetFamily,
    stream: &SymbolStream,
    max_depth: usize,
    index_horizon: u64,
    tol: f64,
) -> Result<DecayProfile, VerifierError> {
    if stream.period().is_none() {
        return Err(VerifierError::Symbolic(SymbolicError::HypothesesNotMet(
            "decay profiles are defined for periodic streams".into(),
        )));
    }
    let symbols = stream.prefix(max_depth + 1)?;
    let mut diameters = Vec::with_capacity(max_depth + 1);
    for m in 0..=max_depth {
        let word = SymbolWord::new(symbols[..=m].to_vec()).expect("nonempty");
        let mut row = Vec::with_capacity(index_horizon as usize + 1);
        for n in 0..=index_horizon {
            let enc = cylinder(sys, sets, None, &word, n, tol)?;
            row.push(enc.diameter());
        }
        diameters.push(row);
    }
    let per_depth_max = diameters
        .iter()
        .map(|row| row.iter().copied().fold(0.0f64, f64::max))
        .collect();
    Ok(DecayProfile {
        max_depth,
        index_horizon,
        diameters,
        per_depth_max,
    })
}

/// Worst-case cylinder diameter at `depth` over every rotation of a
/// periodic stream and every base index up to `index_horizon`: the measured
/// stabilization data the distributional closeness counts rely on.
pub fn shifted_stabilization_profile<S: System + ?Sized>(
    sys: &S,
    sets: &SetFamily,
    stream: &SymbolStream,
    max_depth: usize,
    index_horizon: u64,
    tol: f64,
) -> Result<Vec<f64>, VerifierError> {
    let period = stream
        .period()
        .ok_or_else(|| {
            VerifierError::Symbolic(SymbolicError::HypothesesNotMet(
                "stabilization profiles are defined for periodic streams".into(),
            ))
        })?
        .len();
    let mut worst = vec![0.0f64; max_depth + 1];
    for shift in 0..period {
        let profile = cylinder_decay_profile(
            sys,
            sets,
            &stream.shifted(shift),
            max_depth,
            index_horizon,
            tol,
        )?;
        for (m, v) in profile.per_depth_max.iter().enumerate() {
            worst[m] = worst[m].max(*v);
        }
    }
    Ok(worst)
}

/// A witness point extracted from a deep cylinder.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Witness {
    /// Midpoint of the largest enclosure part.
    pub point: f64,
    pub enclosure: CylinderEnclosure,
}

impl Witness {
    pub fn width(&self) -> f64 {
        self.enclosure.diameter()
    }
}

/// Extracts the depth-`depth` witness for a stream. When the cylinder is
/// empty the error reports the first depth at which it became so.
pub fn witness_point<S: System + ?Sized>(
    sys: &S,
    sets: &SetFamily,
    matrix: Option<&TransitionMatrix>,
    stream: &SymbolStream,
    depth: usize,
    tol: f64,
) -> Result<Witness, VerifierError> {
    let symbols = stream.prefix(depth + 1)?;
    let at_depth = |d: usize| -> Result<CylinderEnclosure, VerifierError> {
        let word = SymbolWord::new(symbols[..=d].to_vec()).expect("nonempty");
        cylinder(sys, sets, matrix, &word, 0, tol)
    };
    let enclosure = at_depth(depth)?;
    if enclosure.is_empty() {
        // Nesting makes emptiness monotone in depth; bisect for the first one.
        let (mut lo, mut hi) = (0usize, depth);
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if at_depth(mid)?.is_empty() {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        return Err(VerifierError::EmptyCylinder(hi));
    }
    let point = enclosure
        .enclosure
        .largest_part()
        .expect("nonempty enclosure")
        .midpoint();
    Ok(Witness { point, enclosure })
}

/// Per-index enclosures of a witness orbit: one backward sweep from
/// `horizon + guard_depth` recording the enclosure at every index up to
/// `horizon`. Index `j`'s enclosure contains the true orbit point
/// `f_0^j(x)` of any point shadowing the stream, with width controlled by
/// the guarded tail, so midpoints give a numerically stable orbit trace
/// where forward iteration would lose the itinerary.
pub fn tracked_enclosures<S: System + ?Sized>(
    sys: &S,
    sets: &SetFamily,
    stream: &SymbolStream,
    horizon: u64,
    guard_depth: usize,
    tol: f64,
) -> Result<Vec<(f64, f64)>, VerifierError> {
    let total = horizon as usize + guard_depth + 1;
    let symbols = stream.prefix(total)?;
    let mut cur = sets.set_at(symbols[total - 1], total as u64 - 1).clone();
    let mut out = vec![(0.0, 0.0); horizon as usize + 1];
    if total - 1 <= horizon as usize {
        // degenerate guard: the last recorded index gets the raw set
        let part = cur.largest_part().expect("nonempty");
        out[total - 1] = (part.midpoint(), cur.diameter());
    }
    for k in (0..total - 1).rev() {
        cur = backward_step(sys, sets, k as u64, symbols[k], &cur, tol)?;
        if cur.is_empty() {
            return Err(VerifierError::EmptyCylinder(total - 1 - k));
        }
        if k <= horizon as usize {
            let part = cur.largest_part().expect("nonempty");
            out[k] = (part.midpoint(), cur.diameter());
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpotCheck {
    pub samples: u32,
    pub depth: usize,
    pub pass: bool,
    /// Sample indices whose cylinder came back empty, capped at 8.
    pub failures: Vec<u32>,
}

/// Seeded random-walk prefixes checked for cylinder nonemptiness: the
/// finite-horizon probe of the nested-cylinder assumption.
pub fn cylinder_spot_check<S: System + ?Sized>(
    sys: &S,
    sets: &SetFamily,
    matrix: &TransitionMatrix,
    depth: usize,
    samples: u32,
    seed: u64,
    tol: f64,
) -> Result<SpotCheck, VerifierError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = matrix.size() as Symbol;
    let mut failures = Vec::new();
    for sample in 0..samples {
        let mut word = Vec::with_capacity(depth + 1);
        let mut cur = rng.random_range(1..=n);
        word.push(cur);
        for _ in 0..depth {
            let succ: Vec<Symbol> = matrix.successors(cur).collect();
            cur = succ[rng.random_range(0..succ.len())];
            word.push(cur);
        }
        let word = SymbolWord::new(word).expect("nonempty");
        let enc = cylinder(sys, sets, Some(matrix), &word, 0, tol)?;
        if enc.is_empty() && failures.len() < 8 {
            failures.push(sample);
        }
    }
    Ok(SpotCheck {
        samples,
        depth,
        pass: failures.is_empty(),
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{MapFamily, MapKind, ParamSpec};

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    fn reference_sets() -> SetFamily {
        SetFamily::new(vec![
            IntervalUnion::single(iv(0.0, 1.0 / 3.0)),
            IntervalUnion::single(iv(0.6, 1.0)),
        ])
        .unwrap()
    }

    fn full2() -> TransitionMatrix {
        TransitionMatrix::new(&[vec![1, 1], vec![1, 1]]).unwrap()
    }

    fn logistic(spec: ParamSpec) -> MapFamily {
        MapFamily::new(MapKind::Logistic, spec).unwrap()
    }

    #[test]
    fn delta_separation_reference_value() {
        let sets = reference_sets();
        assert!((sets.delta_separation() - 4.0 / 15.0).abs() < 1e-12);
        let touching = SetFamily::new(vec![
            IntervalUnion::single(iv(0.0, 1.0)),
            IntervalUnion::single(iv(1.0, 2.0)),
        ])
        .unwrap();
        assert_eq!(touching.delta_separation(), 0.0);
        let three = SetFamily::new(vec![
            IntervalUnion::single(iv(0.0, 0.1)),
            IntervalUnion::single(iv(0.3, 0.4)),
            IntervalUnion::single(iv(0.45, 0.5)),
        ])
        .unwrap();
        assert!((three.delta_separation() - 0.05).abs() < 1e-12);
    }

    #[test]
    fn coupled_expansion_reference_system() {
        let sys = logistic(ParamSpec::Uniform {
            lo: 4.5,
            hi: 5.0,
            seed: 11,
        });
        let v = check_coupled_expansion(&sys, &reference_sets(), &full2(), 200, false, 1e-9)
            .unwrap();
        assert!(v.pass);
        assert!(v.min_slack >= -1e-9);
    }

    #[test]
    fn coupled_expansion_fails_for_small_parameter() {
        let sys = logistic(ParamSpec::Constant { value: 3.0 });
        let v = check_coupled_expansion(&sys, &reference_sets(), &full2(), 10, false, 1e-9)
            .unwrap();
        assert!(!v.pass);
        // f(V1) = [0, 2/3] cannot cover V2 = [0.6, 1].
        assert!(v.min_slack < -0.3);
    }

    #[test]
    fn overlapping_interiors_rejected() {
        let sets = SetFamily::new(vec![
            IntervalUnion::single(iv(0.0, 0.5)),
            IntervalUnion::single(iv(0.4, 1.0)),
        ])
        .unwrap();
        let sys = logistic(ParamSpec::Constant { value: 4.5 });
        let err =
            check_coupled_expansion(&sys, &sets, &full2(), 5, false, 1e-9).unwrap_err();
        assert_eq!(
            err,
            VerifierError::SeparationViolated { i: 1, j: 2, n: 0 }
        );
        // Touching sets pass the boundary-only variant but fail strictly.
        let touching = SetFamily::new(vec![
            IntervalUnion::single(iv(0.0, 0.5)),
            IntervalUnion::single(iv(0.5, 1.0)),
        ])
        .unwrap();
        assert!(check_coupled_expansion(&sys, &touching, &full2(), 2, false, 1e-9).is_ok());
        assert!(matches!(
            check_coupled_expansion(&sys, &touching, &full2(), 2, true, 1e-9),
            Err(VerifierError::SeparationViolated { .. })
        ));
    }

    #[test]
    fn expansion_scopes() {
        let sys = logistic(ParamSpec::Uniform {
            lo: 4.5,
            hi: 5.0,
            seed: 3,
        });
        let sets = reference_sets();
        let single =
            check_expansion(&sys, &sets, &full2(), 100, ExpansionScope::Single(1), 1e-9).unwrap();
        assert!(single.pass && single.analytic);
        assert!((single.lambda - 1.5).abs() < 1e-12);

        // On V2 the derivative dips to r/5 < 1, so the all-symbols scope fails.
        let all =
            check_expansion(&sys, &sets, &full2(), 100, ExpansionScope::AllSymbols, 1e-9).unwrap();
        assert!(!all.pass);
        assert!(all.lambda < 1.0);

        let affine = MapFamily::new(MapKind::Affine, ParamSpec::Constant { value: 2.0 }).unwrap();
        let v = check_expansion(&affine, &sets, &full2(), 10, ExpansionScope::AllSymbols, 1e-9)
            .unwrap();
        assert!((v.lambda - 2.0).abs() < 1e-12 && v.pass);

        let swap = TransitionMatrix::new(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert!(matches!(
            check_expansion(&sys, &sets, &swap, 10, ExpansionScope::Single(1), 1e-9),
            Err(VerifierError::LoopMissing(1))
        ));
    }

    #[test]
    fn equicontinuity_reference_bound() {
        let sys = logistic(ParamSpec::Uniform {
            lo: 4.5,
            hi: 5.0,
            seed: 5,
        });
        let b = equicontinuity_bound(&sys, &reference_sets(), 100).unwrap();
        assert!(b.analytic);
        assert!((b.bound - 5.0).abs() < 1e-12);

        let fixed = logistic(ParamSpec::Constant { value: 4.5 });
        let b = equicontinuity_bound(&fixed, &reference_sets(), 100).unwrap();
        assert!((b.bound - 4.5).abs() < 1e-12);
    }

    #[test]
    fn cylinder_depth_zero_is_the_set() {
        let sys = logistic(ParamSpec::Constant { value: 4.5 });
        let sets = reference_sets();
        let word = SymbolWord::new(vec![1]).unwrap();
        let enc = cylinder(&sys, &sets, Some(&full2()), &word, 3, 1e-12).unwrap();
        assert_eq!(enc.enclosure, sets.base_set(1).clone());
    }

    #[test]
    fn cylinder_oracle_value() {
        let sys = logistic(ParamSpec::Constant { value: 4.5 });
        let sets = reference_sets();
        let word = SymbolWord::new(vec![1, 1]).unwrap();
        let enc = cylinder(&sys, &sets, Some(&full2()), &word, 0, 1e-12).unwrap();
        let expected_hi = 0.5 * (1.0 - (19f64 / 27.0).sqrt());
        assert_eq!(enc.enclosure.parts().len(), 1);
        let part = enc.enclosure.parts()[0];
        assert!(part.lo().abs() < 1e-12);
        assert!((part.hi() - expected_hi).abs() < 1e-9);
    }

    #[test]
    fn cylinders_nest() {
        let sys = logistic(ParamSpec::Uniform {
            lo: 4.5,
            hi: 5.0,
            seed: 123,
        });
        let sets = reference_sets();
        let symbols = [1u8, 1, 2, 1, 2, 2, 1, 1, 2, 1];
        for m in 1..symbols.len() {
            let shallow = cylinder(
                &sys,
                &sets,
                None,
                &SymbolWord::new(symbols[..m].to_vec()).unwrap(),
                0,
                1e-12,
            )
            .unwrap();
            let deep = cylinder(
                &sys,
                &sets,
                None,
                &SymbolWord::new(symbols[..=m].to_vec()).unwrap(),
                0,
                1e-12,
            )
            .unwrap();
            assert!(
                deep.enclosure.inclusion_slack(&shallow.enclosure) >= -1e-9,
                "depth {m}"
            );
            assert!(deep.diameter() <= shallow.diameter() + 1e-9);
        }
    }

    #[test]
    fn decay_profile_reference_bound() {
        let sys = logistic(ParamSpec::Uniform {
            lo: 4.5,
            hi: 5.0,
            seed: 2,
        });
        let sets = reference_sets();
        let stream = SymbolStream::periodic(&SymbolWord::new(vec![1]).unwrap());
        let profile = cylinder_decay_profile(&sys, &sets, &stream, 12, 20, 1e-12).unwrap();
        for m in 0..=12usize {
            let bound = (2.0f64 / 3.0).powi(m as i32) / 3.0 + 1e-9;
            assert!(
                profile.per_depth_max[m] <= bound,
                "depth {m}: {} > {bound}",
                profile.per_depth_max[m]
            );
        }
        assert!(profile.per_depth_nonincreasing(1e-12));
        assert!(profile.stabilization_depth(0.01).unwrap() <= 9);
    }

    #[test]
    fn contraction_does_not_decay() {
        let affine = MapFamily::new(MapKind::Affine, ParamSpec::Constant { value: 0.5 }).unwrap();
        let sets = SetFamily::new(vec![
            IntervalUnion::single(iv(0.0, 0.2)),
            IntervalUnion::single(iv(0.5, 0.6)),
        ])
        .unwrap();
        // f(x) = x/2 maps [0, 0.2] into itself, so every cylinder along the
        // all-ones stream is the full set: no decay.
        let stream = SymbolStream::periodic(&SymbolWord::new(vec![1]).unwrap());
        let profile = cylinder_decay_profile(&affine, &sets, &stream, 6, 4, 1e-12).unwrap();
        assert!(profile.final_max() >= 0.2 - 1e-9);
        assert!(!profile.uniform_pass(0.01, 1e-12));
    }

    #[test]
    fn witness_contains_fixed_point() {
        let sys = logistic(ParamSpec::Uniform {
            lo: 4.5,
            hi: 5.0,
            seed: 77,
        });
        let sets = reference_sets();
        let stream = SymbolStream::periodic(&SymbolWord::new(vec![1]).unwrap());
        let w = witness_point(&sys, &sets, Some(&full2()), &stream, 25, 1e-12).unwrap();
        assert!(w.enclosure.enclosure.contains(0.0));
        assert!(w.width() <= (2.0f64 / 3.0).powi(25) / 3.0 + 1e-9);
        assert!(w.enclosure.allowable);
    }

    #[test]
    fn empty_cylinder_reports_first_depth() {
        // Disconnected dynamics: the slope-half map fixes [0, 0.2], so no
        // point of V1 ever reaches V2 and the (1,2) cylinder is empty.
        let affine = MapFamily::new(MapKind::Affine, ParamSpec::Constant { value: 0.5 }).unwrap();
        let sets = SetFamily::new(vec![
            IntervalUnion::single(iv(0.0, 0.2)),
            IntervalUnion::single(iv(0.5, 0.6)),
        ])
        .unwrap();
        let stream = SymbolStream::periodic(&SymbolWord::new(vec![1, 2]).unwrap());
        let err = witness_point(&affine, &sets, None, &stream, 6, 1e-12).unwrap_err();
        assert_eq!(err, VerifierError::EmptyCylinder(1));
    }

    #[test]
    fn spot_check_passes_on_reference_system() {
        let sys = logistic(ParamSpec::Uniform {
            lo: 4.5,
            hi: 5.0,
            seed: 4,
        });
        let check =
            cylinder_spot_check(&sys, &reference_sets(), &full2(), 12, 40, 99, 1e-12).unwrap();
        assert!(check.pass);
    }

    #[test]
    fn tracked_enclosures_follow_the_stream() {
        let sys = logistic(ParamSpec::Uniform {
            lo: 4.5,
            hi: 5.0,
            seed: 8,
        });
        let sets = reference_sets();
        let stream = SymbolStream::periodic(&SymbolWord::new(vec![1, 2]).unwrap());
        let track = tracked_enclosures(&sys, &sets, &stream, 50, 40, 1e-12).unwrap();
        for (j, (mid, width)) in track.iter().enumerate() {
            let sym = stream.symbol(j).unwrap();
            assert!(sets.set_at(sym, j as u64).contains(*mid), "index {j}");
            assert!(*width <= (2.0f64 / 3.0).powi(20) + 1e-9);
        }
    }
}
