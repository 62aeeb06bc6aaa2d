//! Pipeline orchestration: verify -> construct -> simulate -> report.
//!
//! Exit-code contract: 0 pass, 1 hypothesis failure, 2 config error,
//! 3 numeric failure. Hypothesis failures are recorded in the report and
//! never surface as process errors; malformed inputs and numeric breakdowns
//! do.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use thiserror::Error;

use ndchaos::config::{CheckpointMode, ConstructionKind};
use ndchaos::report::{
    ApplicabilityReport, ChaosReport, ConstructionReport, DecaySummary, HypothesisFlags,
    PairReport, ScheduleReport, StatisticsReport, TransitionReport, VerificationReport,
    WitnessReport,
};
use ndchaos::statistics::{
    cross_check_equivalence, default_epsilon_grid, distributional_statistics, liyorke_statistics,
    witness_orbit, DistributionalOptions, StatsError,
};
use ndchaos::symbolic::{
    build_pumped_stream, build_revisit_stream, selector_difference_indices, sturmian_word,
    PumpedSchedule, RevisitSchedule, SymbolicError,
};
use ndchaos::system::{induced_system, InducedSystem, ParamSpec, System};
use ndchaos::verifier::{
    check_coupled_expansion, check_expansion, cylinder_decay_profile, cylinder_spot_check,
    equicontinuity_bound, witness_point, DecayProfile, ExpansionScope, VerifierError,
};
use ndchaos::{
    MapFamily, RunConfig, Symbol, SymbolStream, SymbolWord, TransitionError,
    TransitionMatrix,
};

/// Seed for the deterministic random-prefix nonemptiness probe.
const SPOT_CHECK_SEED: u64 = 0x5eed;
/// Minimum horizon below which the statistics cross-check is inconclusive.
const CROSS_CHECK_MIN_HORIZON: u64 = 100;
/// Report prefix truncation.
const PREFIX_CAP: usize = 512;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) => 2,
            PipelineError::Numeric(_) | PipelineError::Io(_) => 3,
        }
    }
}

fn config_err(e: impl std::fmt::Display) -> PipelineError {
    PipelineError::Config(e.to_string())
}

fn numeric_err(e: impl std::fmt::Display) -> PipelineError {
    PipelineError::Numeric(e.to_string())
}

/// Command-line overrides applied on top of the config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub horizon: Option<u64>,
    pub depth: Option<usize>,
    pub levels: Option<u32>,
    pub seed: Option<u64>,
    pub strict_separation: bool,
    pub induced: Option<String>,
    pub construction: Option<ConstructionKind>,
    pub force: bool,
}

/// Pipeline stages in dependency order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Verify,
    Construct,
    Stats,
}

/// Everything a run produces: the report plus the raw tables the CSV
/// artifacts are written from.
pub struct PipelineOutput {
    pub report: ChaosReport,
    /// All requested verify targets passed and construction succeeded.
    pub hypotheses_ok: bool,
    pub decay_tables: Vec<(Vec<Symbol>, DecayProfile)>,
    /// `(i, j, distance trace)` per witness pair.
    pub pair_distances: Vec<(usize, usize, Vec<f64>)>,
}

pub fn load_config(path: &Path) -> Result<RunConfig, PipelineError> {
    let text = fs::read_to_string(path)
        .map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
    let cfg: RunConfig = toml::from_str(&text).map_err(config_err)?;
    cfg.validate().map_err(config_err)?;
    Ok(cfg)
}

pub fn apply_overrides(cfg: &mut RunConfig, o: &Overrides) {
    if let Some(h) = o.horizon {
        cfg.horizons.index_horizon = h;
    }
    if let Some(d) = o.depth {
        cfg.horizons.cylinder_depth = d;
    }
    if let Some(l) = o.levels {
        cfg.horizons.schedule_levels = l;
    }
    if let Some(s) = o.seed {
        if let ParamSpec::Uniform { seed, .. } = &mut cfg.system.params {
            *seed = s;
        }
    }
    if o.strict_separation {
        cfg.verify.strict_separation = true;
    }
    if let Some(c) = o.construction {
        cfg.construct.construction = c;
    }
}

/// Parses an affine subsequence expression `a*n + b` written as `"2n"`,
/// `"n+3"`, `"2n+1"`; the resulting `k_n = a n + b` must be increasing with
/// `k_1 >= 1`.
pub fn parse_induced_expr(expr: &str) -> Result<(u64, u64), PipelineError> {
    let s: String = expr.chars().filter(|c| !c.is_whitespace()).collect();
    let err = || {
        PipelineError::Config(format!(
            "could not parse induced subsequence `{expr}`; expected an affine expression like `2n` or `2n+1`"
        ))
    };
    let n_pos = s.find('n').ok_or_else(err)?;
    let a: u64 = if n_pos == 0 {
        1
    } else {
        s[..n_pos].parse().map_err(|_| err())?
    };
    let rest = &s[n_pos + 1..];
    let b: u64 = if rest.is_empty() {
        0
    } else if let Some(tail) = rest.strip_prefix('+') {
        tail.parse().map_err(|_| err())?
    } else {
        return Err(err());
    };
    if a == 0 {
        return Err(PipelineError::Config(
            "induced subsequence must be increasing (coefficient of n is zero)".into(),
        ));
    }
    Ok((a, b))
}

enum Dynamics {
    Base(MapFamily),
    Induced(InducedSystem),
}

impl Dynamics {
    fn system(&self) -> &dyn System {
        match self {
            Dynamics::Base(f) => f,
            Dynamics::Induced(i) => i,
        }
    }
}

struct BuiltWitness {
    selector: f64,
    stream: SymbolStream,
    schedule: ScheduleKind,
    /// Finite extent of the emitted stream, when there is one.
    extent: Option<u64>,
}

enum ScheduleKind {
    Revisit(RevisitSchedule),
    Pumped(PumpedSchedule),
}

fn periodic_stream(word: &[Symbol]) -> SymbolStream {
    SymbolStream::periodic(&SymbolWord::new(word.to_vec()).expect("validated nonempty"))
}

/// Clamps the statistics horizon and guard depth to what a finite stream
/// can supply.
fn clamp_horizon(extent: Option<u64>, horizon: u64, guard: usize) -> (u64, usize) {
    match extent {
        None => (horizon, guard),
        Some(total) => {
            let total = total.saturating_sub(1); // last usable index
            if total > guard as u64 {
                (horizon.min(total - guard as u64), guard)
            } else {
                let g = (total / 2) as usize;
                (total - g as u64, g)
            }
        }
    }
}

fn log_eval_grid(max_count: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut v = 2u64;
    while v < max_count {
        out.push(v);
        v *= 2;
    }
    out.push(max_count);
    out
}

/// Runs the pipeline through the requested stage.
pub fn run_pipeline(
    mut cfg: RunConfig,
    overrides: &Overrides,
    stage: Stage,
) -> Result<PipelineOutput, PipelineError> {
    apply_overrides(&mut cfg, overrides);
    cfg.validate().map_err(config_err)?;
    for word in [&cfg.construct.anchor_period, &cfg.construct.return_period] {
        for &s in word {
            if s == 0 || s as usize > cfg.sets.v.len() {
                return Err(PipelineError::Config(format!(
                    "construct: symbol {s} outside 1..={}",
                    cfg.sets.v.len()
                )));
            }
        }
    }

    let mut report = ChaosReport::new(cfg.clone());
    report.induced = overrides.induced.clone();
    let out = |report: ChaosReport, ok: bool| PipelineOutput {
        report,
        hypotheses_ok: ok,
        decay_tables: Vec::new(),
        pair_distances: Vec::new(),
    };

    // --- transition stage ---
    let matrix = match TransitionMatrix::new(&cfg.matrix.entries) {
        Ok(m) => m,
        Err(e @ (TransitionError::ZeroRow(_) | TransitionError::ZeroColumn(_))) => {
            report.transition = Some(TransitionReport {
                valid: false,
                error: Some(e.to_string()),
                size: cfg.matrix.entries.len(),
                irreducible: None,
                branching_row: None,
            });
            report.applicability = Some(ApplicabilityReport::from_hypotheses(
                HypothesisFlags::default(),
                None,
            ));
            return Ok(out(report, false));
        }
        Err(e) => return Err(config_err(format!("matrix: {e}"))),
    };
    let irreducible = matrix.is_irreducible();
    let branching = matrix.branching_row();
    report.transition = Some(TransitionReport {
        valid: true,
        error: None,
        size: matrix.size(),
        irreducible: Some(irreducible),
        branching_row: branching,
    });

    let base = cfg
        .to_map_family()
        .map_err(|e| config_err(format!("system: {e}")))?;
    let dynamics = match &overrides.induced {
        None => Dynamics::Base(base),
        Some(expr) => {
            let (a, b) = parse_induced_expr(expr)?;
            let need = cfg.horizons.index_horizon
                + cfg.horizons.guard_depth as u64
                + cfg.horizons.decay_horizon
                + cfg.horizons.decay_depth as u64
                + cfg.horizons.cylinder_depth as u64
                + cfg.horizons.spot_depth as u64
                + 16;
            let cuts: Vec<u64> = (1..=need).map(|n| a * n + b).collect();
            Dynamics::Induced(induced_system(base, cuts).map_err(config_err)?)
        }
    };
    let sys = dynamics.system();
    let sets = cfg
        .to_sets()
        .map_err(|e| config_err(format!("sets: {e}")))?;

    // --- verify stage ---
    let horizon = cfg.horizons.index_horizon;
    let tau = cfg.tolerances.tau;
    let mut flags = HypothesisFlags {
        transition_matrix_valid: true,
        irreducible,
        branching_row: branching.is_some(),
        ..Default::default()
    };

    let (coupled, separation_violation) = match check_coupled_expansion(
        sys,
        &sets,
        &matrix,
        horizon,
        cfg.verify.strict_separation,
        cfg.tolerances.inclusion_slack,
    ) {
        Ok(v) => {
            flags.separation = true;
            flags.coupled_expansion = v.pass;
            (Some(v), None)
        }
        Err(e @ VerifierError::SeparationViolated { .. }) => (None, Some(e.to_string())),
        Err(VerifierError::System(e)) => return Err(numeric_err(e)),
        Err(e) => return Err(numeric_err(e)),
    };

    let delta_separation = sets.delta_separation();

    let expansion_all = check_expansion(
        sys,
        &sets,
        &matrix,
        horizon,
        ExpansionScope::AllSymbols,
        cfg.tolerances.expansion_margin,
    )
    .map_err(numeric_err)?;
    flags.expansion_all = expansion_all.pass;

    let loop_symbol = cfg.verify.expansion_symbol.or_else(|| {
        (1..=matrix.size() as Symbol).find(|&j| matrix.entry(j, j))
    });
    let (expansion_loop, expansion_loop_error) = match loop_symbol {
        Some(j0) => match check_expansion(
            sys,
            &sets,
            &matrix,
            horizon,
            ExpansionScope::Single(j0),
            cfg.tolerances.expansion_margin,
        ) {
            Ok(v) => {
                flags.expansion_loop = v.pass;
                (Some(v), None)
            }
            Err(e @ VerifierError::LoopMissing(_)) => (None, Some(e.to_string())),
            Err(e) => return Err(numeric_err(e)),
        },
        None => (None, Some("no symbol carries a self-loop".to_string())),
    };

    let equicontinuity = equicontinuity_bound(sys, &sets, horizon).map_err(numeric_err)?;
    flags.equicontinuous = equicontinuity.bound.is_finite();

    let spot = cylinder_spot_check(
        sys,
        &sets,
        &matrix,
        cfg.horizons.spot_depth,
        cfg.horizons.spot_samples,
        SPOT_CHECK_SEED,
        tau,
    )
    .map_err(numeric_err)?;
    flags.cylinders_nonempty = spot.pass;

    let mut decay_tables: Vec<(Vec<Symbol>, DecayProfile)> = Vec::new();
    let mut decay_summaries = Vec::new();
    let decay_pass = |word: &[Symbol],
                          tables: &mut Vec<(Vec<Symbol>, DecayProfile)>,
                          summaries: &mut Vec<DecaySummary>|
     -> Result<bool, PipelineError> {
        if let Some((_, profile)) = tables.iter().find(|(w, _)| w == word) {
            return Ok(profile.uniform_pass(cfg.tolerances.decay_threshold, 1e-12));
        }
        let stream = periodic_stream(word);
        let profile = cylinder_decay_profile(
            sys,
            &sets,
            &stream,
            cfg.horizons.decay_depth,
            cfg.horizons.decay_horizon,
            tau,
        )
        .map_err(numeric_err)?;
        let pass = profile.uniform_pass(cfg.tolerances.decay_threshold, 1e-12);
        summaries.push(DecaySummary::from_profile(
            &profile,
            word.to_vec(),
            cfg.tolerances.decay_threshold,
        ));
        tables.push((word.to_vec(), profile));
        Ok(pass)
    };
    flags.anchor_decay = decay_pass(
        &cfg.construct.anchor_period.clone(),
        &mut decay_tables,
        &mut decay_summaries,
    )?;
    flags.return_decay = decay_pass(
        &cfg.construct.return_period.clone(),
        &mut decay_tables,
        &mut decay_summaries,
    )?;

    report.verification = Some(VerificationReport {
        delta_separation,
        coupled_expansion: coupled,
        separation_violation,
        expansion_all: Some(expansion_all),
        expansion_loop,
        expansion_loop_error,
        equicontinuity,
        cylinder_spot: spot,
        decay: decay_summaries,
    });

    let mut applicability = ApplicabilityReport::from_hypotheses(flags, None);
    if overrides.induced.is_some() {
        let induced_ok = applicability.criteria.liyorke_nested_cylinders;
        applicability = ApplicabilityReport::from_hypotheses(flags, Some(induced_ok));
    }
    debug_assert!(applicability.self_check());
    report.applicability = Some(applicability);

    let mut hypotheses_ok = cfg
        .verify
        .targets
        .iter()
        .all(|t| applicability.criterion(t) == Some(true));

    if stage == Stage::Verify {
        let mut output = out(report, hypotheses_ok);
        output.decay_tables = decay_tables;
        return Ok(output);
    }
    if !hypotheses_ok && !overrides.force {
        let mut output = out(report, false);
        output.decay_tables = decay_tables;
        return Ok(output);
    }

    // --- construct stage ---
    let levels = cfg.horizons.schedule_levels;
    let mut built: Vec<BuiltWitness> = Vec::new();
    let mut construct_errors: Vec<String> = Vec::new();
    for &selector in &cfg.construct.selectors {
        let result: Result<BuiltWitness, SymbolicError> = match cfg.construct.construction {
            ConstructionKind::Liyorke => {
                let anchor = periodic_stream(&cfg.construct.anchor_period);
                let segments = cfg.segment_lengths();
                sturmian_word(selector, levels as usize).and_then(|bits| {
                    build_revisit_stream(
                        &matrix,
                        &anchor,
                        cfg.construct.revisit_symbol,
                        &segments,
                        &bits,
                    )
                    .map(|(stream, schedule)| BuiltWitness {
                        selector,
                        stream,
                        extent: Some(schedule.total_len),
                        schedule: ScheduleKind::Revisit(schedule),
                    })
                })
            }
            ConstructionKind::Distributional => {
                let returns = periodic_stream(&cfg.construct.return_period);
                build_pumped_stream(&matrix, selector, &returns, levels).map(
                    |(stream, schedule)| BuiltWitness {
                        selector,
                        stream,
                        extent: None,
                        schedule: ScheduleKind::Pumped(schedule),
                    },
                )
            }
        };
        match result {
            Ok(w) => built.push(w),
            Err(e @ (SymbolicError::HypothesesNotMet(_) | SymbolicError::Transition(_))) => {
                construct_errors.push(e.to_string());
            }
            Err(e) => return Err(numeric_err(e)),
        }
    }

    let mut witnesses = Vec::new();
    for w in &built {
        let depth = match w.extent {
            Some(total) => cfg.horizons.cylinder_depth.min(total as usize - 1),
            None => cfg.horizons.cylinder_depth,
        };
        match witness_point(sys, &sets, Some(&matrix), &w.stream, depth, tau) {
            Ok(witness) => {
                let cap = match w.extent {
                    Some(total) => PREFIX_CAP.min(total as usize),
                    None => PREFIX_CAP,
                };
                let hull = witness
                    .enclosure
                    .enclosure
                    .hull()
                    .expect("nonempty witness enclosure");
                witnesses.push(WitnessReport {
                    selector: w.selector,
                    prefix: w.stream.prefix(cap).map_err(numeric_err)?,
                    prefix_cap: cap,
                    schedule: match &w.schedule {
                        ScheduleKind::Revisit(s) => ScheduleReport::Revisit(s.clone()),
                        ScheduleKind::Pumped(s) => ScheduleReport::Pumped(s.into()),
                    },
                    point: witness.point,
                    enclosure: [hull.lo(), hull.hi()],
                    width: witness.width(),
                    depth,
                });
            }
            Err(e @ VerifierError::EmptyCylinder(_)) => {
                construct_errors.push(format!("selector {}: {e}", w.selector));
            }
            Err(e) => return Err(numeric_err(e)),
        }
    }
    if !construct_errors.is_empty() {
        hypotheses_ok = false;
    }
    report.construction = Some(ConstructionReport {
        construction: match cfg.construct.construction {
            ConstructionKind::Liyorke => "liyorke".into(),
            ConstructionKind::Distributional => "distributional".into(),
        },
        witnesses,
        errors: construct_errors,
    });

    if stage == Stage::Construct {
        let mut output = out(report, hypotheses_ok);
        output.decay_tables = decay_tables;
        return Ok(output);
    }

    // --- statistics stage ---
    let mut pairs = Vec::new();
    let mut pair_distances = Vec::new();
    let use_schedule = cfg.checkpoints.mode == CheckpointMode::Schedule;
    for i in 0..built.len() {
        for j in i + 1..built.len() {
            let (wi, wj) = (&built[i], &built[j]);
            let extent = match (wi.extent, wj.extent) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (Some(a), None) | (None, Some(a)) => Some(a),
                (None, None) => None,
            };
            let (h, guard) =
                clamp_horizon(extent, cfg.horizons.index_horizon, cfg.horizons.guard_depth);
            if h == 0 {
                return Err(PipelineError::Numeric(
                    "constructed streams are too short for the statistics horizon".into(),
                ));
            }
            let tx = witness_orbit(
                sys,
                &sets,
                &wi.stream,
                h,
                guard,
                tau,
                cfg.system.bounded_radius,
            )
            .map_err(stats_to_pipeline)?;
            let ty = witness_orbit(
                sys,
                &sets,
                &wj.stream,
                h,
                guard,
                tau,
                cfg.system.bounded_radius,
            )
            .map_err(stats_to_pipeline)?;

            // schedule-informed checkpoints
            let mut prox: Vec<u64> = Vec::new();
            let mut close_evals: Vec<u64> = Vec::new();
            let mut sep_evals: Vec<u64> = Vec::new();
            if use_schedule {
                match (&wi.schedule, &wj.schedule) {
                    (ScheduleKind::Pumped(si), ScheduleKind::Pumped(sj)) => {
                        // proximity deepens at the replay-segment starts
                        prox = si
                            .levels
                            .iter()
                            .filter(|lv| lv.level < levels)
                            .filter_map(|lv| u64::try_from(lv.block_end).ok())
                            .filter(|&e| e <= h)
                            .collect();
                        close_evals = si
                            .closeness_checkpoints()
                            .into_iter()
                            .filter_map(|(_, k)| u64::try_from(k).ok())
                            .filter(|&k| k >= 1 && k <= h + 1)
                            .collect();
                        let diffs = selector_difference_indices(
                            si.selector_param,
                            sj.selector_param,
                            levels as usize,
                        )
                        .map_err(numeric_err)?;
                        sep_evals = diffs
                            .iter()
                            .filter_map(|&t| si.separation_checkpoint(t))
                            .filter_map(|(_, n)| u64::try_from(n).ok())
                            .filter(|&n| n >= 1 && n <= h + 1)
                            .collect();
                    }
                    (ScheduleKind::Revisit(si), _) => {
                        prox = si
                            .checkpoints
                            .iter()
                            .copied()
                            .filter(|&c| c <= h)
                            .collect();
                    }
                    _ => {}
                }
            }
            let grid = log_eval_grid(h + 1);
            if close_evals.is_empty() {
                close_evals = grid.clone();
            }
            if sep_evals.is_empty() {
                sep_evals = grid.clone();
            }
            let prox_opt = (!prox.is_empty()).then_some(prox.as_slice());

            let delta = sets.delta_separation();
            let ly = liyorke_statistics(&tx, &ty, delta, prox_opt, cfg.tolerances.proximity)
                .map_err(stats_to_pipeline)?;
            let eps_grid = default_epsilon_grid(delta, 16);
            let dist = distributional_statistics(
                &tx,
                &ty,
                &DistributionalOptions {
                    sequence: None,
                    closeness_evals: &close_evals,
                    separation_evals: &sep_evals,
                    epsilon_grid: &eps_grid,
                    delta,
                    density_tol: cfg.tolerances.density,
                },
            )
            .map_err(stats_to_pipeline)?;
            let cross = cross_check_equivalence(
                ly.scrambled_evidence,
                dist.evidence,
                h,
                CROSS_CHECK_MIN_HORIZON,
            );
            pair_distances.push((i, j, ly.distances.clone()));
            pairs.push(PairReport {
                selectors: (wi.selector, wj.selector),
                horizon: h,
                liyorke: (&ly).into(),
                distributional: dist,
                cross_check: cross,
            });
        }
    }
    report.statistics = Some(StatisticsReport { pairs });

    let mut output = out(report, hypotheses_ok);
    output.decay_tables = decay_tables;
    output.pair_distances = pair_distances;
    Ok(output)
}

fn stats_to_pipeline(e: StatsError) -> PipelineError {
    numeric_err(e)
}

/// Writes `report.json` plus the CSV artifacts; returns the written paths.
pub fn write_outputs(output: &PipelineOutput, dir: &Path) -> Result<Vec<PathBuf>, PipelineError> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();

    let report_path = dir.join("report.json");
    let json = serde_json::to_string_pretty(&output.report)
        .map_err(|e| PipelineError::Numeric(format!("report serialization: {e}")))?;
    fs::write(&report_path, json + "\n")?;
    written.push(report_path);

    for (idx, (word, profile)) in output.decay_tables.iter().enumerate() {
        let name = format!(
            "decay_{}_{}.csv",
            idx,
            word.iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join("")
        );
        let path = dir.join(name);
        let mut f = fs::File::create(&path)?;
        writeln!(f, "m,n,diameter")?;
        for (m, row) in profile.diameters.iter().enumerate() {
            for (n, d) in row.iter().enumerate() {
                writeln!(f, "{m},{n},{d:e}")?;
            }
        }
        written.push(path);
    }

    for (i, j, distances) in &output.pair_distances {
        let path = dir.join(format!("pair_{i}_{j}_distance.csv"));
        let mut f = fs::File::create(&path)?;
        writeln!(f, "index,distance")?;
        for (n, d) in distances.iter().enumerate() {
            writeln!(f, "{n},{d:e}")?;
        }
        written.push(path);
    }

    if let Some(stats) = &output.report.statistics {
        for (pair_idx, pair) in stats.pairs.iter().enumerate() {
            let path = dir.join(format!("pair_{pair_idx}_density.csv"));
            let mut f = fs::File::create(&path)?;
            writeln!(f, "checkpoint,epsilon,density")?;
            for eps in &pair.distributional.per_epsilon {
                for p in &eps.at_evals {
                    writeln!(f, "{},{:e},{}", p.count_n, p.epsilon, p.density)?;
                }
            }
            for p in &pair.distributional.delta_at_evals {
                writeln!(f, "{},{:e},{}", p.count_n, p.epsilon, p.density)?;
            }
            written.push(path);
        }
    }

    Ok(written)
}

/// One-line human summary per criterion, for the `report` subcommand.
pub fn summary_lines(report: &ChaosReport) -> Vec<String> {
    let mut lines = Vec::new();
    if let Some(app) = &report.applicability {
        let c = &app.criteria;
        let fmt = |name: &str, ok: bool| format!("{}  {name}", if ok { "PASS" } else { "FAIL" });
        lines.push(fmt("liyorke_nested_cylinders", c.liyorke_nested_cylinders));
        lines.push(fmt("liyorke_coupled_expansion", c.liyorke_coupled_expansion));
        if let Some(ok) = c.liyorke_induced {
            lines.push(fmt("liyorke_induced", ok));
        }
        lines.push(fmt(
            "distributional_uniform_decay",
            c.distributional_uniform_decay,
        ));
        lines.push(fmt(
            "distributional_expansion_all",
            c.distributional_expansion_all,
        ));
        lines.push(fmt(
            "distributional_expansion_loop",
            c.distributional_expansion_loop,
        ));
    }
    if let Some(stats) = &report.statistics {
        for pair in &stats.pairs {
            lines.push(format!(
                "pair ({:.6}, {:.6}): max distance {:.6}, checkpoint min {:.3e}, distributional evidence {}, cross-check {:?}",
                pair.selectors.0,
                pair.selectors.1,
                pair.liyorke.max_distance,
                pair.liyorke.min_checkpoint_distance,
                pair.distributional.evidence,
                pair.cross_check,
            ));
        }
    }
    lines
}
