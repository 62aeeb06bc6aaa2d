//! Block construction for distributional-chaos witness itineraries.
//!
//! Each level emits a long replay of the periodic return stream, a return
//! word back to the lead symbol, a bridge word, and then a pumped run of one
//! of the two branch words, selected per level by a Sturmian bit. Block
//! lengths carry doubling factors so the closeness / separation densities
//! along the level boundaries converge to 1 and 0; the bookkeeping is exact
//! in integers and the builder refuses to return a schedule that violates
//! its own identities.
//!
//! Level bookkeeping, with `E(n)` the prefix length through level `n`'s
//! pumped run and `A(n)` the prefix length through its bridge word:
//!
//! * `p_n = 2^n * A(n)` copies are pumped, so `E(n) = p_n*l + p_n/2^n`
//!   exactly;
//! * the level-`n` replay has `m_n - 1` symbols where `m_n = 2^n * E(n-1)`,
//!   and `k_n = E(n-1) + m_n = m_n + m_n/2^n` marks the prefix through the
//!   first return-word symbol.

use serde::{Deserialize, Serialize};

use super::stream::{StreamSource, SymbolStream};
use super::sturmian::sturmian_bit;
use super::SymbolicError;
use crate::transition::{Symbol, SymbolWord, TransitionMatrix};

/// Exact bookkeeping for one level of a pumped stream.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PumpedLevel {
    /// 1-based level index.
    pub level: u32,
    /// Selector bit consumed by this level (bit `level - 1`).
    pub selector_bit: u8,
    /// Number of pumped branch-word copies, `p_n`.
    pub pump_count: u128,
    /// Prefix length through this level's bridge word, `p_n / 2^n`.
    pub anchor_end: u128,
    /// Prefix length through this level's pumped run, `e_n`.
    pub block_end: u128,
    /// Replay length `m_n` (levels >= 2).
    pub segment_len: Option<u128>,
    /// Prefix length through the first return-word symbol, `k_n` (levels >= 2).
    pub segment_end: Option<u128>,
    /// Return-word length (levels >= 2).
    pub return_len: Option<u64>,
}

/// Schedule emitted alongside a pumped stream.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PumpedSchedule {
    /// Common length of the two branch words.
    pub word_len: u64,
    /// First symbol of the periodic return stream.
    pub lead_symbol: Symbol,
    /// Slope of the Sturmian selector.
    pub selector_param: f64,
    pub levels: Vec<PumpedLevel>,
}

impl PumpedSchedule {
    /// Re-checks the exact integer identities from the stored numbers.
    pub fn verify(&self) -> Result<(), SymbolicError> {
        let l = self.word_len as u128;
        let mut prev_end: Option<u128> = None;
        for lv in &self.levels {
            let n = lv.level;
            let two_n = 1u128
                .checked_shl(n)
                .ok_or(SymbolicError::ScheduleOverflow(n))?;
            let fail = |detail: String| SymbolicError::ScheduleInconsistent { level: n, detail };
            if lv.pump_count % two_n != 0 {
                return Err(fail(format!("pump count {} not divisible by 2^{n}", lv.pump_count)));
            }
            if lv.anchor_end != lv.pump_count / two_n {
                return Err(fail("anchor end disagrees with pump count".into()));
            }
            if lv.block_end != lv.pump_count * l + lv.pump_count / two_n {
                return Err(fail("block end violates the pumped-length identity".into()));
            }
            if n >= 2 {
                let m = lv.segment_len.ok_or_else(|| fail("missing segment length".into()))?;
                let k = lv.segment_end.ok_or_else(|| fail("missing segment end".into()))?;
                if m % two_n != 0 {
                    return Err(fail(format!("segment length {m} not divisible by 2^{n}")));
                }
                if k != m + m / two_n {
                    return Err(fail("segment end violates the doubling identity".into()));
                }
                if let Some(prev) = prev_end {
                    if m != prev * two_n {
                        return Err(fail("segment length disagrees with previous block end".into()));
                    }
                }
            }
            prev_end = Some(lv.block_end);
        }
        Ok(())
    }

    /// Closeness checkpoints `k_n`, defined from level 2 on.
    pub fn closeness_checkpoints(&self) -> Vec<(u32, u128)> {
        self.levels
            .iter()
            .filter_map(|lv| lv.segment_end.map(|k| (lv.level, k)))
            .collect()
    }

    /// Separation checkpoint for a selector-difference index `t` (0-based):
    /// the prefix length through the pumped run of level `t + 1`.
    pub fn separation_checkpoint(&self, diff_index: usize) -> Option<(u32, u128)> {
        self.levels
            .get(diff_index)
            .map(|lv| (lv.level, lv.block_end))
    }

    /// Number of positions inside a level's pumped run whose full
    /// branch-word window stays inside the run: `p*l - l + 1`.
    pub fn separated_position_count(&self, level: u32) -> Option<u128> {
        let l = self.word_len as u128;
        self.levels
            .iter()
            .find(|lv| lv.level == level)
            .map(|lv| lv.pump_count * l - l + 1)
    }
}

struct LevelPlan {
    bit: u8,
    /// `m_n` for levels >= 2; 0 for level 1.
    segment_len: u128,
    ret: Option<SymbolWord>,
    anchor_end: u128,
    pump_count: u128,
    block_end: u128,
    segment_end: Option<u128>,
}

struct Assembly {
    gamma: Vec<Symbol>,
    bridge: SymbolWord,
    words: [SymbolWord; 2],
    lead: Symbol,
    selector: f64,
    matrix: TransitionMatrix,
}

impl Assembly {
    fn plan_level(&self, level: u32, prev_end: u128) -> Result<LevelPlan, SymbolicError> {
        let overflow = || SymbolicError::ScheduleOverflow(level);
        let two_n = 1u128.checked_shl(level).ok_or_else(overflow)?;
        let l = self.words[0].len() as u128;
        let bit = sturmian_bit(self.selector, (level - 1) as usize)?;
        if level == 1 {
            let anchor_end = 1 + self.bridge.len() as u128;
            let pump_count = 2 * anchor_end;
            let block_end = anchor_end + pump_count * l;
            return Ok(LevelPlan {
                bit,
                segment_len: 0,
                ret: None,
                anchor_end,
                pump_count,
                block_end,
                segment_end: None,
            });
        }
        let m = prev_end.checked_mul(two_n).ok_or_else(overflow)?;
        let segment_end = prev_end.checked_add(m).ok_or_else(overflow)?;
        let p = self.gamma.len() as u128;
        let boundary = self.gamma[((m - 1) % p) as usize];
        let ret = if boundary == self.lead {
            SymbolWord::new(vec![self.lead]).expect("nonempty")
        } else {
            self.matrix.find_allowable_word(boundary, self.lead, 0)?
        };
        let anchor_end = prev_end
            .checked_add(m - 1)
            .and_then(|v| v.checked_add(ret.len() as u128))
            .and_then(|v| v.checked_add(self.bridge.len() as u128))
            .ok_or_else(overflow)?;
        let pump_count = anchor_end.checked_mul(two_n).ok_or_else(overflow)?;
        let block_end = pump_count
            .checked_mul(l)
            .and_then(|v| v.checked_add(anchor_end))
            .ok_or_else(overflow)?;
        Ok(LevelPlan {
            bit,
            segment_len: m,
            ret: Some(ret),
            anchor_end,
            pump_count,
            block_end,
            segment_end: Some(segment_end),
        })
    }
}

enum Stage {
    LevelStart,
    Segment { pos: u128 },
    Return { pos: usize },
    Bridge { pos: usize },
    Pump { copies_left: u128, pos: usize },
    Dead,
}

struct PumpedSource {
    assembly: Assembly,
    level: u32,
    prev_end: u128,
    plan: Option<LevelPlan>,
    stage: Stage,
}

impl StreamSource for PumpedSource {
    fn refill(&mut self, buf: &mut Vec<Symbol>, target: usize) -> bool {
        while buf.len() < target {
            match &mut self.stage {
                Stage::LevelStart => {
                    match self.assembly.plan_level(self.level, self.prev_end) {
                        Ok(plan) => {
                            if self.level == 1 {
                                buf.push(self.assembly.lead);
                                self.stage = Stage::Bridge { pos: 0 };
                            } else {
                                self.stage = Stage::Segment { pos: 0 };
                            }
                            self.plan = Some(plan);
                        }
                        Err(_) => {
                            self.stage = Stage::Dead;
                            return false;
                        }
                    }
                }
                Stage::Segment { pos } => {
                    let plan = self.plan.as_ref().expect("plan set");
                    if *pos + 1 < plan.segment_len {
                        let p = self.assembly.gamma.len() as u128;
                        buf.push(self.assembly.gamma[(*pos % p) as usize]);
                        *pos += 1;
                    } else {
                        self.stage = Stage::Return { pos: 0 };
                    }
                }
                Stage::Return { pos } => {
                    let plan = self.plan.as_ref().expect("plan set");
                    let word = plan.ret.as_ref().expect("return word for level >= 2");
                    if *pos < word.len() {
                        buf.push(word.symbols()[*pos]);
                        *pos += 1;
                    } else {
                        self.stage = Stage::Bridge { pos: 0 };
                    }
                }
                Stage::Bridge { pos } => {
                    let bridge = &self.assembly.bridge;
                    if *pos < bridge.len() {
                        buf.push(bridge.symbols()[*pos]);
                        *pos += 1;
                    } else {
                        let plan = self.plan.as_ref().expect("plan set");
                        self.stage = Stage::Pump {
                            copies_left: plan.pump_count,
                            pos: 0,
                        };
                    }
                }
                Stage::Pump { copies_left, pos } => {
                    if *copies_left == 0 {
                        let plan = self.plan.take().expect("plan set");
                        self.prev_end = plan.block_end;
                        self.level += 1;
                        self.stage = Stage::LevelStart;
                        continue;
                    }
                    let plan = self.plan.as_ref().expect("plan set");
                    let word = self.assembly.words[plan.bit as usize].symbols();
                    buf.push(word[*pos]);
                    *pos += 1;
                    if *pos == word.len() {
                        *pos = 0;
                        *copies_left -= 1;
                    }
                }
                Stage::Dead => return false,
            }
        }
        true
    }
}

/// Builds the pumped stream for a periodic return stream and a Sturmian
/// selector slope. The stream itself extends lazily past `depth_levels`;
/// the returned schedule covers exactly `depth_levels` levels and has been
/// verified against the exact identities.
pub fn build_pumped_stream(
    matrix: &TransitionMatrix,
    selector_param: f64,
    returns: &SymbolStream,
    depth_levels: u32,
) -> Result<(SymbolStream, PumpedSchedule), SymbolicError> {
    if !matrix.is_irreducible() || matrix.branching_row().is_none() {
        return Err(SymbolicError::HypothesesNotMet(
            "matrix must be irreducible with a branching row".into(),
        ));
    }
    if depth_levels == 0 {
        return Err(SymbolicError::HypothesesNotMet(
            "at least one schedule level is required".into(),
        ));
    }
    let gamma = returns.period().ok_or_else(|| {
        SymbolicError::HypothesesNotMet("return stream must be periodic".into())
    })?;
    // Allowability of the infinite periodic word, including the wrap.
    let mut wrapped = gamma.clone();
    wrapped.push(gamma[0]);
    matrix.check_allowable(&SymbolWord::new(wrapped).expect("nonempty"))?;
    sturmian_bit(selector_param, 0)?;

    let lead = gamma[0];
    let pred = matrix
        .predecessors(lead)
        .next()
        .expect("column sums are positive");
    let succ = matrix
        .successors(lead)
        .next()
        .expect("row sums are positive");
    let bridge = matrix.find_allowable_word(succ, pred, 0)?;
    let (w1, w2) = matrix.branch_word_pair(lead, pred)?;

    let assembly = Assembly {
        gamma: gamma.clone(),
        bridge: bridge.clone(),
        words: [w1.clone(), w2.clone()],
        lead,
        selector: selector_param,
        matrix: matrix.clone(),
    };

    let mut levels = Vec::with_capacity(depth_levels as usize);
    let mut prev_end = 0u128;
    for level in 1..=depth_levels {
        let plan = assembly.plan_level(level, prev_end)?;
        levels.push(PumpedLevel {
            level,
            selector_bit: plan.bit,
            pump_count: plan.pump_count,
            anchor_end: plan.anchor_end,
            block_end: plan.block_end,
            segment_len: (level >= 2).then_some(plan.segment_len),
            segment_end: plan.segment_end,
            return_len: plan.ret.as_ref().map(|w| w.len() as u64),
        });
        prev_end = plan.block_end;
    }

    let schedule = PumpedSchedule {
        word_len: w1.len() as u64,
        lead_symbol: lead,
        selector_param,
        levels,
    };
    schedule.verify()?;

    let source = PumpedSource {
        assembly,
        level: 1,
        prev_end: 0,
        plan: None,
        stage: Stage::LevelStart,
    };
    Ok((SymbolStream::from_source(Box::new(source)), schedule))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQRT2M1: f64 = std::f64::consts::SQRT_2 - 1.0;
    const GOLDEN: f64 = 0.618_033_988_749_894_9;

    fn full2() -> TransitionMatrix {
        TransitionMatrix::new(&[vec![1, 1], vec![1, 1]]).unwrap()
    }

    fn ones() -> SymbolStream {
        SymbolStream::periodic(&SymbolWord::new(vec![1]).unwrap())
    }

    #[test]
    fn frozen_schedule_on_full_2x2() {
        let (_, sched) = build_pumped_stream(&full2(), SQRT2M1, &ones(), 4).unwrap();
        assert_eq!(sched.word_len, 3);
        let lv = &sched.levels;
        assert_eq!((lv[0].pump_count, lv[0].block_end), (4, 14));
        assert_eq!(
            (lv[1].segment_len, lv[1].segment_end, lv[1].pump_count, lv[1].block_end),
            (Some(56), Some(70), 284, 923)
        );
        assert_eq!(
            (lv[2].segment_len, lv[2].segment_end, lv[2].pump_count, lv[2].block_end),
            (Some(7384), Some(8307), 66_464, 207_700)
        );
        assert_eq!(
            (lv[3].segment_len, lv[3].segment_end, lv[3].pump_count, lv[3].block_end),
            (Some(3_323_200), Some(3_530_900), 56_494_416, 173_014_149)
        );
        sched.verify().unwrap();
    }

    #[test]
    fn stream_matches_schedule_boundaries() {
        let (stream, sched) = build_pumped_stream(&full2(), GOLDEN, &ones(), 3).unwrap();
        // GOLDEN's first bits are 1,0,1: level 1 pumps (1,2,1), level 2
        // pumps (1,1,1), level 3 pumps (1,2,1).
        let e1 = sched.levels[0].block_end as usize;
        let prefix = stream.prefix(e1 + 8).unwrap();
        assert_eq!(&prefix[..2], &[1, 1]);
        assert_eq!(&prefix[2..14], &[1, 2, 1, 1, 2, 1, 1, 2, 1, 1, 2, 1]);
        // After the pumped run the level-2 replay of the return stream begins.
        assert!(prefix[e1..].iter().all(|&s| s == 1));

        // Pumped run of level 2 is all ones (bit 0), level 3 has twos again.
        let a2 = sched.levels[1].anchor_end as usize;
        let e2 = sched.levels[1].block_end as usize;
        let deep = stream.prefix(e2 + 40).unwrap();
        assert!(deep[a2..e2].iter().all(|&s| s == 1));
        let a3 = sched.levels[2].anchor_end as usize;
        let probe = stream.prefix(a3 + 6).unwrap();
        assert_eq!(&probe[a3..a3 + 6], &[1, 2, 1, 1, 2, 1]);
    }

    #[test]
    fn prefix_stays_allowable() {
        let (stream, _) = build_pumped_stream(&full2(), SQRT2M1, &ones(), 3).unwrap();
        stream.check_allowable_prefix(&full2(), 5_000).unwrap();
    }

    #[test]
    fn three_symbol_case_with_nontrivial_bridge() {
        // successors(1) start at 2, predecessors(1) start at 3, and the
        // bridge (2,3) has length 2, so p_1 = 2 * |(lead, bridge)| = 6.
        let m = TransitionMatrix::new(&[vec![0, 1, 1], vec![0, 0, 1], vec![1, 0, 0]]).unwrap();
        let gamma = SymbolStream::periodic(&SymbolWord::new(vec![1, 2, 3]).unwrap());
        let (stream, sched) = build_pumped_stream(&m, SQRT2M1, &gamma, 2).unwrap();
        assert_eq!(sched.levels[0].pump_count, 6);
        sched.verify().unwrap();
        stream.check_allowable_prefix(&m, 2_000).unwrap();
        // Return words route back to the lead symbol, so the replay at level
        // 2 starts right after the pumped run with the return stream prefix.
        let e1 = sched.levels[0].block_end as usize;
        let tail = stream.prefix(e1 + 4).unwrap()[e1..].to_vec();
        assert_eq!(tail, vec![1, 2, 3, 1]);
    }

    #[test]
    fn rejects_non_periodic_returns() {
        let finite = SymbolStream::from_word(&SymbolWord::new(vec![1, 1]).unwrap());
        let err = build_pumped_stream(&full2(), SQRT2M1, &finite, 2).unwrap_err();
        assert!(matches!(err, SymbolicError::HypothesesNotMet(_)));
    }

    #[test]
    fn overflow_reports_level() {
        let err = build_pumped_stream(&full2(), SQRT2M1, &ones(), 40).unwrap_err();
        assert!(matches!(err, SymbolicError::ScheduleOverflow(_)));
    }
}
