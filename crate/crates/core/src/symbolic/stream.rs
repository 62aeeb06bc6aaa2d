//! Lazily materialized symbol sequences with memoized prefixes.
//!
//! A stream is conceptually an element of a one-sided shift space. Prefixes
//! are generated on demand and cached, so shifted clones share one buffer
//! and concurrent readers observe consistent prefixes. Streams built from a
//! finite word are exhaustible and report how far they are defined.

use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::SymbolicError;
use crate::transition::{Symbol, SymbolWord, TransitionMatrix};

pub(crate) trait StreamSource: Send {
    /// Extends `buf` to at least `target` symbols, or returns `false` when
    /// the source is exhausted before reaching it.
    fn refill(&mut self, buf: &mut Vec<Symbol>, target: usize) -> bool;
}

struct PeriodicSource {
    word: Vec<Symbol>,
}

impl StreamSource for PeriodicSource {
    fn refill(&mut self, buf: &mut Vec<Symbol>, target: usize) -> bool {
        while buf.len() < target {
            let s = self.word[buf.len() % self.word.len()];
            buf.push(s);
        }
        true
    }
}

struct State {
    buf: Vec<Symbol>,
    source: Option<Box<dyn StreamSource>>,
}

struct Inner {
    state: Mutex<State>,
    period: Option<Vec<Symbol>>,
}

/// A one-sided symbol sequence; cheap to clone and shift.
#[derive(Clone)]
pub struct SymbolStream {
    inner: Arc<Inner>,
    offset: usize,
}

impl SymbolStream {
    /// Infinite periodic repetition of `word`.
    pub fn periodic(word: &SymbolWord) -> Self {
        let symbols = word.symbols().to_vec();
        Self {
            inner: Arc::new(Inner {
                state: Mutex::new(State {
                    buf: Vec::new(),
                    source: Some(Box::new(PeriodicSource {
                        word: symbols.clone(),
                    })),
                }),
                period: Some(symbols),
            }),
            offset: 0,
        }
    }

    /// Stream defined only on the given finite prefix; reads past the end
    /// report `PrefixUnavailable`.
    pub fn from_word(word: &SymbolWord) -> Self {
        Self::from_buffer(word.symbols().to_vec())
    }

    pub(crate) fn from_buffer(buf: Vec<Symbol>) -> Self {
        Self {
            inner: Arc::new(Inner {
                state: Mutex::new(State { buf, source: None }),
                period: None,
            }),
            offset: 0,
        }
    }

    pub(crate) fn from_source(source: Box<dyn StreamSource>) -> Self {
        Self {
            inner: Arc::new(Inner {
                state: Mutex::new(State {
                    buf: Vec::new(),
                    source: Some(source),
                }),
                period: None,
            }),
            offset: 0,
        }
    }

    /// The repeating word, adjusted for the shift offset, when the stream is
    /// known periodic.
    pub fn period(&self) -> Option<Vec<Symbol>> {
        self.inner.period.as_ref().map(|w| {
            let k = self.offset % w.len();
            let mut rotated = w[k..].to_vec();
            rotated.extend_from_slice(&w[..k]);
            rotated
        })
    }

    fn ensure(&self, upto: usize) -> Result<(), SymbolicError> {
        let mut state = self.inner.state.lock().expect("stream lock");
        if state.buf.len() >= upto {
            return Ok(());
        }
        let state = &mut *state;
        let ok = match state.source.as_mut() {
            Some(src) => src.refill(&mut state.buf, upto) && state.buf.len() >= upto,
            None => false,
        };
        if ok {
            Ok(())
        } else {
            let available = state.buf.len().saturating_sub(self.offset);
            Err(SymbolicError::PrefixUnavailable {
                requested: upto - self.offset,
                available,
            })
        }
    }

    /// Symbol at index `n >= 0`.
    pub fn symbol(&self, n: usize) -> Result<Symbol, SymbolicError> {
        self.ensure(self.offset + n + 1)?;
        let state = self.inner.state.lock().expect("stream lock");
        Ok(state.buf[self.offset + n])
    }

    /// First `len` symbols. Prefixes are consistent: `prefix(n)` is always a
    /// prefix of `prefix(m)` for `n <= m`.
    pub fn prefix(&self, len: usize) -> Result<Vec<Symbol>, SymbolicError> {
        self.ensure(self.offset + len)?;
        let state = self.inner.state.lock().expect("stream lock");
        Ok(state.buf[self.offset..self.offset + len].to_vec())
    }

    /// Stream whose index-`n` symbol is this stream's index-`n + k` symbol.
    pub fn shifted(&self, k: usize) -> Self {
        Self {
            inner: Arc::clone(&self.inner),
            offset: self.offset + k,
        }
    }

    /// Checks that the first `len` symbols form an allowable word.
    pub fn check_allowable_prefix(
        &self,
        matrix: &TransitionMatrix,
        len: usize,
    ) -> Result<(), SymbolicError> {
        let prefix = self.prefix(len.max(1))?;
        let word = SymbolWord::new(prefix).expect("nonempty prefix");
        matrix.check_allowable(&word)?;
        Ok(())
    }
}

impl std::fmt::Debug for SymbolStream {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let head = self.prefix(8).unwrap_or_else(|_| {
            let state = self.inner.state.lock().expect("stream lock");
            state.buf.get(self.offset..).unwrap_or(&[]).to_vec()
        });
        write!(f, "SymbolStream{head:?}…")
    }
}

/// Truncated shift-space distance: `sum_{i < truncation} [a_i != b_i] / 2^i`,
/// an exact rational lower bound on the full metric, accurate to within
/// `2^(1-truncation)`.
pub fn rho_distance(
    a: &SymbolStream,
    b: &SymbolStream,
    truncation: usize,
) -> Result<BigRational, SymbolicError> {
    if truncation == 0 {
        return Err(SymbolicError::ZeroTruncation);
    }
    let pa = a.prefix(truncation)?;
    let pb = b.prefix(truncation)?;
    // sum of 2^(T-1-i) over differing indices, divided by 2^(T-1)
    let mut numer = BigInt::zero();
    for i in 0..truncation {
        if pa[i] != pb[i] {
            numer += BigInt::from(1u8) << (truncation - 1 - i);
        }
    }
    Ok(BigRational::new(numer, BigInt::from(1u8) << (truncation - 1)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(s: &[Symbol]) -> SymbolWord {
        SymbolWord::new(s.to_vec()).unwrap()
    }

    #[test]
    fn shift_relabels_indices() {
        let s = SymbolStream::periodic(&word(&[1, 2]));
        assert_eq!(s.prefix(4).unwrap(), vec![1, 2, 1, 2]);
        let t = s.shifted(1);
        assert_eq!(t.prefix(4).unwrap(), vec![2, 1, 2, 1]);
        assert_eq!(t.period().unwrap(), vec![2, 1]);
        let u = s.shifted(0);
        assert_eq!(u.prefix(3).unwrap(), s.prefix(3).unwrap());
    }

    #[test]
    fn finite_stream_reports_extent() {
        let s = SymbolStream::from_word(&word(&[1, 1, 2]));
        assert_eq!(s.prefix(3).unwrap(), vec![1, 1, 2]);
        let err = s.prefix(4).unwrap_err();
        assert_eq!(
            err,
            SymbolicError::PrefixUnavailable {
                requested: 4,
                available: 3
            }
        );
    }

    #[test]
    fn rho_distance_examples() {
        let a = SymbolStream::periodic(&word(&[1]));
        assert!(rho_distance(&a, &a, 10).unwrap().is_zero());

        let b = SymbolStream::periodic(&word(&[2]));
        // differs everywhere: sum_{i<T} 2^-i = 2 - 2^(1-T)
        let d = rho_distance(&a, &b, 20).unwrap();
        let expected = BigRational::new(BigInt::from((1u64 << 20) - 1), BigInt::from(1u64 << 19));
        assert_eq!(d, expected);

        // differs only at index 3
        let c = SymbolStream::from_word(&word(&[1, 1, 1, 2, 1, 1]));
        let d = rho_distance(&a, &c, 6).unwrap();
        assert_eq!(d, BigRational::new(BigInt::from(1), BigInt::from(8)));
    }
}
