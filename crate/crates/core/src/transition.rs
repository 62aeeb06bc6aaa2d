//! Transition matrices, allowable words, and the word-existence
//! combinatorics backing the symbolic constructions.
//!
//! A transition matrix is an `N x N` 0/1 matrix (`N >= 2`) with no zero row
//! and no zero column. Symbols are 1-based, matching the usual convention
//! for subshifts of finite type.

use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Symbol of a subshift; always in `1..=N`.
pub type Symbol = u8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransitionError {
    #[error("transition matrix must be at least 2x2")]
    SizeTooSmall,
    #[error("row {0} has a different length than the matrix size")]
    RaggedRow(usize),
    #[error("entry ({row},{col}) is {value}, expected 0 or 1")]
    NonBinaryEntry { row: usize, col: usize, value: u8 },
    #[error("row {0} sums to zero")]
    ZeroRow(usize),
    #[error("column {0} sums to zero")]
    ZeroColumn(usize),
    #[error("matrix must be irreducible with a branching row")]
    HypothesesNotMet,
    #[error("word is not allowable: forbidden transition at position {0}")]
    NotAllowable(usize),
    #[error("symbol {0} out of range 1..={1}")]
    SymbolOutOfRange(Symbol, usize),
    #[error("empty symbol word")]
    EmptyWord,
    #[error("no allowable word of length > {min_len} from {from} to {to} within the search bound")]
    SearchExhausted {
        from: Symbol,
        to: Symbol,
        min_len: usize,
    },
}

/// A nonempty finite word of symbols. A word of length 1 is treated as
/// allowable for every matrix.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymbolWord(Vec<Symbol>);

impl SymbolWord {
    pub fn new(symbols: Vec<Symbol>) -> Result<Self, TransitionError> {
        if symbols.is_empty() {
            return Err(TransitionError::EmptyWord);
        }
        Ok(Self(symbols))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn first(&self) -> Symbol {
        self.0[0]
    }

    pub fn last(&self) -> Symbol {
        *self.0.last().expect("nonempty word")
    }
}

impl fmt::Debug for SymbolWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, ")")
    }
}

/// Validated transition matrix with cached irreducibility.
#[derive(Clone, Serialize, Deserialize)]
pub struct TransitionMatrix {
    size: usize,
    bits: Vec<bool>,
    #[serde(skip)]
    irreducible: OnceLock<bool>,
}

impl fmt::Debug for TransitionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TransitionMatrix({}x{})", self.size, self.size)
    }
}

impl TransitionMatrix {
    /// Validates the three axioms in order: binary entries, no zero row,
    /// no zero column. Errors carry 1-based row/column indices.
    pub fn new(entries: &[Vec<u8>]) -> Result<Self, TransitionError> {
        let n = entries.len();
        if n < 2 {
            return Err(TransitionError::SizeTooSmall);
        }
        let mut bits = vec![false; n * n];
        for (i, row) in entries.iter().enumerate() {
            if row.len() != n {
                return Err(TransitionError::RaggedRow(i + 1));
            }
            for (j, &v) in row.iter().enumerate() {
                match v {
                    0 => {}
                    1 => bits[i * n + j] = true,
                    other => {
                        return Err(TransitionError::NonBinaryEntry {
                            row: i + 1,
                            col: j + 1,
                            value: other,
                        })
                    }
                }
            }
        }
        for i in 0..n {
            if !bits[i * n..(i + 1) * n].iter().any(|&b| b) {
                return Err(TransitionError::ZeroRow(i + 1));
            }
        }
        for j in 0..n {
            if !(0..n).any(|i| bits[i * n + j]) {
                return Err(TransitionError::ZeroColumn(j + 1));
            }
        }
        Ok(Self {
            size: n,
            bits,
            irreducible: OnceLock::new(),
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Entry `a_{ij}` with 1-based symbols.
    pub fn entry(&self, i: Symbol, j: Symbol) -> bool {
        self.bits[(i as usize - 1) * self.size + (j as usize - 1)]
    }

    pub fn check_symbol(&self, s: Symbol) -> Result<(), TransitionError> {
        if s >= 1 && (s as usize) <= self.size {
            Ok(())
        } else {
            Err(TransitionError::SymbolOutOfRange(s, self.size))
        }
    }

    pub fn successors(&self, i: Symbol) -> impl Iterator<Item = Symbol> + '_ {
        (1..=self.size as Symbol).filter(move |&j| self.entry(i, j))
    }

    pub fn predecessors(&self, j: Symbol) -> impl Iterator<Item = Symbol> + '_ {
        (1..=self.size as Symbol).filter(move |&i| self.entry(i, j))
    }

    /// True iff the directed graph `i -> j` when `a_{ij} = 1` is strongly
    /// connected. Equivalent to the matrix-power criterion: for every pair
    /// there is some `k` with `(A^k)_{ij} > 0`.
    pub fn is_irreducible(&self) -> bool {
        *self
            .irreducible
            .get_or_init(|| self.reaches_all(false) && self.reaches_all(true))
    }

    fn reaches_all(&self, reversed: bool) -> bool {
        let n = self.size;
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for w in 0..n {
                let edge = if reversed {
                    self.bits[w * n + v]
                } else {
                    self.bits[v * n + w]
                };
                if edge && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|b| b)
    }

    /// Smallest row index (1-based) whose row sum is at least 2.
    pub fn branching_row(&self) -> Option<Symbol> {
        (0..self.size).find_map(|i| {
            let sum = self.bits[i * self.size..(i + 1) * self.size]
                .iter()
                .filter(|&&b| b)
                .count();
            (sum >= 2).then_some(i as Symbol + 1)
        })
    }

    fn require_hypotheses(&self) -> Result<(), TransitionError> {
        if self.is_irreducible() && self.branching_row().is_some() {
            Ok(())
        } else {
            Err(TransitionError::HypothesesNotMet)
        }
    }

    pub fn is_allowable(&self, word: &SymbolWord) -> bool {
        self.check_allowable(word).is_ok()
    }

    /// Validates symbol ranges and consecutive transitions; the error carries
    /// the 0-based position of the first violation.
    pub fn check_allowable(&self, word: &SymbolWord) -> Result<(), TransitionError> {
        let s = word.symbols();
        for &sym in s {
            self.check_symbol(sym)?;
        }
        for (pos, pair) in s.windows(2).enumerate() {
            if !self.entry(pair[0], pair[1]) {
                return Err(TransitionError::NotAllowable(pos));
            }
        }
        Ok(())
    }

    /// Number of allowable words from `from` to `to` with exactly `edges`
    /// transitions, as an exact big integer.
    pub fn path_count(&self, from: Symbol, to: Symbol, edges: usize) -> BigUint {
        let counts = self.path_count_table(to, edges);
        counts[edges][from as usize - 1].clone()
    }

    /// `table[r][s]` = number of words from symbol `s+1` to `to` with exactly
    /// `r` transitions.
    fn path_count_table(&self, to: Symbol, edges: usize) -> Vec<Vec<BigUint>> {
        let n = self.size;
        let mut table = Vec::with_capacity(edges + 1);
        let mut base = vec![BigUint::zero(); n];
        base[to as usize - 1] = BigUint::one();
        table.push(base);
        for r in 1..=edges {
            let prev = &table[r - 1];
            let mut next = vec![BigUint::zero(); n];
            for s in 0..n {
                let mut acc = BigUint::zero();
                for t in 0..n {
                    if self.bits[s * n + t] {
                        acc += &prev[t];
                    }
                }
                next[s] = acc;
            }
            table.push(next);
        }
        table
    }

    /// Lexicographically smallest allowable word from `from` to `to` with
    /// exactly `len` symbols, if one exists.
    fn lex_smallest(&self, from: Symbol, to: Symbol, len: usize) -> Option<SymbolWord> {
        if len == 1 {
            return (from == to).then(|| SymbolWord::new(vec![from]).expect("nonempty"));
        }
        let table = self.path_count_table(to, len - 1);
        if table[len - 1][from as usize - 1].is_zero() {
            return None;
        }
        let mut word = vec![from];
        let mut cur = from;
        for pos in 1..len {
            let remaining = len - 1 - pos;
            let next = (1..=self.size as Symbol)
                .find(|&s| self.entry(cur, s) && !table[remaining][s as usize - 1].is_zero())
                .expect("positive path count guarantees a successor");
            word.push(next);
            cur = next;
        }
        Some(SymbolWord::new(word).expect("nonempty"))
    }

    /// Lexicographic successor of `word` among allowable words with the same
    /// length and endpoints.
    fn lex_successor(&self, word: &SymbolWord) -> Option<SymbolWord> {
        let s = word.symbols();
        let len = s.len();
        if len <= 2 {
            return None;
        }
        let to = word.last();
        let table = self.path_count_table(to, len - 1);
        for pos in (1..len - 1).rev() {
            let prev = s[pos - 1];
            for cand in (s[pos] + 1)..=(self.size as Symbol) {
                let remaining = len - 1 - pos;
                if self.entry(prev, cand) && !table[remaining][cand as usize - 1].is_zero() {
                    let mut out = s[..pos].to_vec();
                    out.push(cand);
                    let mut cur = cand;
                    for p in pos + 1..len {
                        let rem = len - 1 - p;
                        let next = (1..=self.size as Symbol)
                            .find(|&c| self.entry(cur, c) && !table[rem][c as usize - 1].is_zero())
                            .expect("positive count");
                        out.push(next);
                        cur = next;
                    }
                    return Some(SymbolWord::new(out).expect("nonempty"));
                }
            }
        }
        None
    }

    /// Shortest allowable word `(from, ..., to)` with length strictly greater
    /// than `min_len`; ties broken lexicographically.
    ///
    /// Requires an irreducible matrix with a branching row, which guarantees
    /// existence for every endpoint pair and every bound.
    pub fn find_allowable_word(
        &self,
        from: Symbol,
        to: Symbol,
        min_len: usize,
    ) -> Result<SymbolWord, TransitionError> {
        self.check_symbol(from)?;
        self.check_symbol(to)?;
        self.require_hypotheses()?;
        let n = self.size;
        // Achievable lengths are eventually periodic with period <= N and the
        // word-doubling constant 2N(N^2-2N+2) dominates any transient, so the
        // scan below cannot miss an existing word.
        let span = 2 * n * (n * n - 2 * n + 2) + n + 2;
        for len in (min_len + 1)..=(min_len + span) {
            if let Some(word) = self.lex_smallest(from, to, len) {
                return Ok(word);
            }
        }
        Err(TransitionError::SearchExhausted { from, to, min_len })
    }

    /// A different allowable word with the same length and endpoints as
    /// `word`, if one exists: the lexicographically smallest such word.
    /// Existence is guaranteed once `|word| > 2N(N^2-2N+2)`.
    pub fn alternative_word(
        &self,
        word: &SymbolWord,
    ) -> Result<Option<SymbolWord>, TransitionError> {
        self.check_allowable(word)?;
        let len = word.len();
        if len == 1 {
            return Ok(None);
        }
        let smallest = self
            .lex_smallest(word.first(), word.last(), len)
            .expect("word itself witnesses existence");
        if &smallest != word {
            return Ok(Some(smallest));
        }
        Ok(self.lex_successor(word))
    }

    /// Shortest length admitting two distinct allowable words from `from` to
    /// `to`, together with the lexicographically first two such words.
    pub fn branch_word_pair(
        &self,
        from: Symbol,
        to: Symbol,
    ) -> Result<(SymbolWord, SymbolWord), TransitionError> {
        self.check_symbol(from)?;
        self.check_symbol(to)?;
        self.require_hypotheses()?;
        let n = self.size;
        let cap = 2 * n * (n * n - 2 * n + 2) + n + 2;
        let two = BigUint::from(2u8);
        for len in 2..=cap {
            if self.path_count(from, to, len - 1) >= two {
                let first = self.lex_smallest(from, to, len).expect("count >= 2");
                let second = self.lex_successor(&first).expect("count >= 2");
                return Ok((first, second));
            }
        }
        Err(TransitionError::SearchExhausted {
            from,
            to,
            min_len: cap,
        })
    }
}

impl PartialEq for TransitionMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.size == other.size && self.bits == other.bits
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn full2() -> TransitionMatrix {
        TransitionMatrix::new(&[vec![1, 1], vec![1, 1]]).unwrap()
    }

    fn word(s: &[Symbol]) -> SymbolWord {
        SymbolWord::new(s.to_vec()).unwrap()
    }

    /// Brute-force irreducibility oracle: boolean matrix powers up to `N`.
    fn irreducible_oracle(entries: &[Vec<u8>]) -> bool {
        let n = entries.len();
        let a: Vec<Vec<bool>> = entries
            .iter()
            .map(|r| r.iter().map(|&v| v == 1).collect())
            .collect();
        let mut reach = vec![vec![false; n]; n];
        let mut power = a.clone();
        for _ in 1..=n {
            for i in 0..n {
                for j in 0..n {
                    reach[i][j] |= power[i][j];
                }
            }
            let mut next = vec![vec![false; n]; n];
            for i in 0..n {
                for k in 0..n {
                    if power[i][k] {
                        for j in 0..n {
                            next[i][j] |= a[k][j];
                        }
                    }
                }
            }
            power = next;
        }
        reach.iter().all(|row| row.iter().all(|&b| b))
    }

    #[test]
    fn validation_follows_axiom_order() {
        assert!(TransitionMatrix::new(&[vec![1, 1], vec![1, 1]]).is_ok());
        assert!(TransitionMatrix::new(&[vec![1, 0], vec![0, 1]]).is_ok());
        assert_eq!(
            TransitionMatrix::new(&[vec![0, 0], vec![1, 1]]).unwrap_err(),
            TransitionError::ZeroRow(1)
        );
        assert_eq!(
            TransitionMatrix::new(&[vec![1, 0], vec![1, 0]]).unwrap_err(),
            TransitionError::ZeroColumn(2)
        );
        assert_eq!(
            TransitionMatrix::new(&[vec![1, 2], vec![1, 1]]).unwrap_err(),
            TransitionError::NonBinaryEntry {
                row: 1,
                col: 2,
                value: 2
            }
        );
        assert_eq!(
            TransitionMatrix::new(&[vec![1]]).unwrap_err(),
            TransitionError::SizeTooSmall
        );
    }

    #[test]
    fn irreducibility_matches_power_criterion() {
        let cases: [(&[Vec<u8>], bool); 3] = [
            (&[vec![1, 1], vec![1, 1]], true),
            (&[vec![1, 0], vec![0, 1]], false),
            (&[vec![0, 1], vec![1, 0]], true),
        ];
        for (entries, expected) in cases {
            let m = TransitionMatrix::new(entries).unwrap();
            assert_eq!(m.is_irreducible(), expected);
            assert_eq!(irreducible_oracle(entries), expected);
        }
    }

    #[test]
    fn irreducibility_agrees_with_oracle_exhaustively_2x2() {
        // All 16 two-by-two 0/1 matrices that pass validation.
        for mask in 0u8..16 {
            let entries = vec![
                vec![mask & 1, (mask >> 1) & 1],
                vec![(mask >> 2) & 1, (mask >> 3) & 1],
            ];
            if let Ok(m) = TransitionMatrix::new(&entries) {
                assert_eq!(m.is_irreducible(), irreducible_oracle(&entries));
            }
        }
    }

    #[test]
    fn branching_row_picks_smallest() {
        assert_eq!(full2().branching_row(), Some(1));
        let swap = TransitionMatrix::new(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(swap.branching_row(), None);
        let m = TransitionMatrix::new(&[vec![1, 1, 0], vec![0, 0, 1], vec![1, 0, 0]]).unwrap();
        assert_eq!(m.branching_row(), Some(1));
    }

    #[test]
    fn find_word_shortest_lexicographic() {
        let m = full2();
        let w = m.find_allowable_word(1, 2, 3).unwrap();
        assert_eq!(w.symbols(), &[1, 1, 1, 2]);
        let single = m.find_allowable_word(1, 1, 0).unwrap();
        assert_eq!(single.symbols(), &[1]);
    }

    #[test]
    fn find_word_requires_hypotheses() {
        let swap = TransitionMatrix::new(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(
            swap.find_allowable_word(1, 1, 2).unwrap_err(),
            TransitionError::HypothesesNotMet
        );
    }

    #[test]
    fn find_word_respects_length_parity() {
        // Branching at row 1, but all 1->1 words have odd length.
        let m = TransitionMatrix::new(&[vec![0, 1, 1], vec![1, 0, 0], vec![1, 0, 0]]).unwrap();
        assert!(m.is_irreducible());
        let w = m.find_allowable_word(1, 1, 3).unwrap();
        assert_eq!(w.len(), 5);
        m.check_allowable(&w).unwrap();
    }

    #[test]
    fn alternative_word_lex_rule() {
        let m = full2();
        let all_ones = word(&[1; 9]);
        let alt = m.alternative_word(&all_ones).unwrap().unwrap();
        assert_eq!(alt.symbols(), &[1, 1, 1, 1, 1, 1, 1, 2, 1]);
        // Path-count oracle confirms existence: (A^8)_{11} = 2^7 >= 2.
        assert_eq!(m.path_count(1, 1, 8), BigUint::from(128u32));

        assert_eq!(m.alternative_word(&word(&[1, 2])).unwrap(), None);
        assert_eq!(
            m.alternative_word(&word(&[2, 1, 1])).unwrap().unwrap(),
            word(&[2, 2, 1])
        );

        let id = TransitionMatrix::new(&[vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(
            id.check_allowable(&word(&[1, 2])).unwrap_err(),
            TransitionError::NotAllowable(0)
        );
    }

    #[test]
    fn branch_pair_shortest_distinct() {
        let m = full2();
        let (w1, w2) = m.branch_word_pair(1, 1).unwrap();
        assert_eq!(w1.symbols(), &[1, 1, 1]);
        assert_eq!(w2.symbols(), &[1, 2, 1]);
    }
}
