//! Block construction for Li-Yorke witness itineraries.
//!
//! The stream is a concatenation of blocks. Block `k` replays the first
//! `m_k` symbols of the anchor stream, routes back to the base symbol
//! through a return word and a bridge word, then appends the selectable
//! branch words `B_1 ... B_k`. Because the anchor symbol at `m_k` equals the
//! first symbol of the return word, the replayed segment together with that
//! symbol reproduces `m_k + 1` anchor symbols starting at each block start,
//! which is what makes the block starts the proximity checkpoints.

use serde::{Deserialize, Serialize};

use super::stream::SymbolStream;
use super::SymbolicError;
use crate::transition::{Symbol, SymbolWord, TransitionMatrix};

/// Exact block bookkeeping for a revisit stream.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RevisitSchedule {
    /// Length of the bridge word (successor of base -> predecessor of base).
    pub bridge_len: u64,
    /// Common length of the two branch words.
    pub branch_len: u64,
    /// Length of the return word (revisit symbol -> base symbol).
    pub return_len: u64,
    /// Segment lengths `m_k`, one per block.
    pub segments: Vec<u64>,
    /// Start offset of block `k` in the assembled stream; the proximity
    /// checkpoints.
    pub checkpoints: Vec<u64>,
    /// Total assembled length.
    pub total_len: u64,
    pub base_symbol: Symbol,
    pub revisit_symbol: Symbol,
    /// Selector bits actually consumed, one per block.
    pub selector: Vec<u8>,
}

impl RevisitSchedule {
    /// Closed-form checkpoint for block `k` (1-based):
    /// `(k-1)(l_bridge + l_return) + l_branch * k(k-1)/2 + sum_{t<k} m_t`.
    pub fn formula_checkpoint(&self, k: usize) -> u64 {
        let km1 = (k as u64) - 1;
        let seg: u64 = self.segments[..k - 1].iter().sum();
        km1 * (self.bridge_len + self.return_len) + self.branch_len * km1 * (km1 + 1) / 2 + seg
    }
}

/// Builds the revisit stream for the given anchor, revisit symbol, segment
/// lengths and selector bits. One block is emitted per segment entry; the
/// selector must supply at least that many bits.
pub fn build_revisit_stream(
    matrix: &TransitionMatrix,
    anchor: &SymbolStream,
    revisit_symbol: Symbol,
    segments: &[u64],
    selector: &[u8],
) -> Result<(SymbolStream, RevisitSchedule), SymbolicError> {
    if !matrix.is_irreducible() || matrix.branching_row().is_none() {
        return Err(SymbolicError::HypothesesNotMet(
            "matrix must be irreducible with a branching row".into(),
        ));
    }
    matrix.check_symbol(revisit_symbol)?;
    if segments.is_empty() {
        return Err(SymbolicError::HypothesesNotMet(
            "at least one segment length is required".into(),
        ));
    }
    if segments.windows(2).any(|w| w[0] >= w[1]) || segments[0] == 0 {
        return Err(SymbolicError::HypothesesNotMet(
            "segment lengths must be strictly increasing and positive".into(),
        ));
    }
    if selector.len() < segments.len() {
        return Err(SymbolicError::SelectorExhausted {
            needed: segments.len(),
            available: selector.len(),
        });
    }
    let selector = &selector[..segments.len()];
    if selector.iter().any(|&b| b > 1) {
        return Err(SymbolicError::HypothesesNotMet(
            "selector entries must be bits".into(),
        ));
    }

    let max_seg = *segments.last().expect("nonempty") as usize;
    let anchor_prefix = anchor.prefix(max_seg + 1)?;
    anchor.check_allowable_prefix(matrix, max_seg + 1)?;
    let base = anchor_prefix[0];
    for &m in segments {
        if anchor_prefix[m as usize] != revisit_symbol {
            return Err(SymbolicError::HypothesesNotMet(format!(
                "anchor symbol at index {m} is {}, expected the revisit symbol {revisit_symbol}",
                anchor_prefix[m as usize]
            )));
        }
    }

    // Base symbol neighbours: smallest predecessor and successor.
    let pred = matrix
        .predecessors(base)
        .next()
        .expect("column sums are positive");
    let succ = matrix
        .successors(base)
        .next()
        .expect("row sums are positive");

    let bridge = matrix.find_allowable_word(succ, pred, 0)?;
    let (branch_a, branch_b) = matrix.branch_word_pair(base, pred)?;
    let return_word = if revisit_symbol == base {
        SymbolWord::new(vec![base]).expect("nonempty")
    } else {
        matrix.find_allowable_word(revisit_symbol, base, 0)?
    };

    let mut buf: Vec<Symbol> = Vec::new();
    let mut checkpoints = Vec::with_capacity(segments.len());
    for (k, &m) in segments.iter().enumerate() {
        checkpoints.push(buf.len() as u64);
        buf.extend_from_slice(&anchor_prefix[..m as usize]);
        buf.extend_from_slice(return_word.symbols());
        buf.extend_from_slice(bridge.symbols());
        for &bit in &selector[..=k] {
            let w = if bit == 0 { &branch_a } else { &branch_b };
            buf.extend_from_slice(w.symbols());
        }
    }

    let schedule = RevisitSchedule {
        bridge_len: bridge.len() as u64,
        branch_len: branch_a.len() as u64,
        return_len: return_word.len() as u64,
        segments: segments.to_vec(),
        checkpoints,
        total_len: buf.len() as u64,
        base_symbol: base,
        revisit_symbol,
        selector: selector.to_vec(),
    };

    for (k, &cp) in schedule.checkpoints.iter().enumerate() {
        if schedule.formula_checkpoint(k + 1) != cp {
            return Err(SymbolicError::ScheduleInconsistent {
                level: (k + 1) as u32,
                detail: format!(
                    "measured block start {cp} disagrees with the closed-form checkpoint {}",
                    schedule.formula_checkpoint(k + 1)
                ),
            });
        }
    }

    let assembled = SymbolWord::new(buf).expect("nonempty assembly");
    matrix.check_allowable(&assembled)?;
    Ok((SymbolStream::from_word(&assembled), schedule))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full2() -> TransitionMatrix {
        TransitionMatrix::new(&[vec![1, 1], vec![1, 1]]).unwrap()
    }

    fn ones() -> SymbolStream {
        SymbolStream::periodic(&SymbolWord::new(vec![1]).unwrap())
    }

    #[test]
    fn assembles_blocks_with_growing_branch_runs() {
        let m = full2();
        let (stream, sched) =
            build_revisit_stream(&m, &ones(), 1, &[1, 2], &[1, 0]).unwrap();
        // Derived words: return (1), bridge (1), branch pair (1,1,1)/(1,2,1).
        assert_eq!(sched.return_len, 1);
        assert_eq!(sched.bridge_len, 1);
        assert_eq!(sched.branch_len, 3);
        // Block 1: segment(1) return(1) bridge(1) B1=(1,2,1);
        // block 2: segment(1,1) return bridge B1 B2=(1,1,1).
        let expected = vec![1, 1, 1, 1, 2, 1, 1, 1, 1, 1, 1, 2, 1, 1, 1, 1];
        assert_eq!(stream.prefix(expected.len()).unwrap(), expected);
        assert_eq!(sched.checkpoints, vec![0, 6]);
        assert_eq!(sched.total_len, 16);
    }

    #[test]
    fn checkpoint_formula_matches_block_starts() {
        let m = full2();
        let segs: Vec<u64> = (1..=7).collect();
        let bits = vec![1, 0, 1, 1, 0, 0, 1];
        let (_, sched) = build_revisit_stream(&m, &ones(), 1, &segs, &bits).unwrap();
        for k in 1..=segs.len() {
            assert_eq!(sched.formula_checkpoint(k), sched.checkpoints[k - 1]);
        }
        // l1 = l3 = 1, l2 = 3, m_k = k gives n_k = 2(k^2 - 1).
        for k in 1..=segs.len() as u64 {
            assert_eq!(sched.checkpoints[k as usize - 1], 2 * (k * k - 1));
        }
    }

    #[test]
    fn checkpoints_replay_anchor_prefix() {
        // Non-trivial anchor on three symbols: beta = (1,2,3)^inf, revisit
        // symbol 2 at indices m_k = 3k + 1.
        let m = TransitionMatrix::new(&[vec![1, 1, 1], vec![1, 1, 1], vec![1, 1, 1]]).unwrap();
        let anchor = SymbolStream::periodic(&SymbolWord::new(vec![1, 2, 3]).unwrap());
        let segs = vec![4, 7, 10];
        let (stream, sched) = build_revisit_stream(&m, &anchor, 2, &segs, &[0, 1, 0]).unwrap();
        for (k, &m_k) in segs.iter().enumerate() {
            let n_k = sched.checkpoints[k] as usize;
            let replay = stream.prefix(n_k + m_k as usize + 1).unwrap()[n_k..].to_vec();
            let expect = anchor.prefix(m_k as usize + 1).unwrap();
            assert_eq!(replay, expect, "block {}", k + 1);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let m = full2();
        let err = build_revisit_stream(&m, &ones(), 1, &[1, 2, 3], &[1, 0]).unwrap_err();
        assert_eq!(
            err,
            SymbolicError::SelectorExhausted {
                needed: 3,
                available: 2
            }
        );

        let err = build_revisit_stream(&m, &ones(), 2, &[1, 2], &[1, 0]).unwrap_err();
        assert!(matches!(err, SymbolicError::HypothesesNotMet(_)));

        let swap = TransitionMatrix::new(&[vec![0, 1], vec![1, 0]]).unwrap();
        let anchor = SymbolStream::periodic(&SymbolWord::new(vec![1, 2]).unwrap());
        let err = build_revisit_stream(&swap, &anchor, 1, &[2], &[0]).unwrap_err();
        assert!(matches!(err, SymbolicError::HypothesesNotMet(_)));
    }

    #[test]
    fn distinct_selectors_distinct_streams() {
        let m = full2();
        let (s1, _) = build_revisit_stream(&m, &ones(), 1, &[1, 2], &[1, 0]).unwrap();
        let (s2, _) = build_revisit_stream(&m, &ones(), 1, &[1, 2], &[0, 0]).unwrap();
        assert_ne!(s1.prefix(16).unwrap(), s2.prefix(16).unwrap());
    }
}
