//! Characteristic Sturmian words as a constructive selector family.
//!
//! For an irrational slope `t` in (0,1) the bit at index `i >= 0` is
//! `floor((i+2)t) - floor((i+1)t)`, the standard characteristic word of
//! slope `t`. Distinct slopes yield bit sequences that agree at infinitely
//! many indices and disagree at infinitely many indices, which is exactly
//! the property the scrambled-family constructions need from their
//! selectors: disagreements up to `n` grow like `|floor(nt) - floor(nt')|`
//! and agreements like `n(1 - |t - t'|)`.

use super::SymbolicError;

fn check_param(t: f64) -> Result<(), SymbolicError> {
    if t.is_finite() && t > 0.0 && t < 1.0 {
        Ok(())
    } else {
        Err(SymbolicError::ParameterOutOfRange(t))
    }
}

/// Bit `i` (0-based) of the characteristic word of slope `t`.
pub fn sturmian_bit(t: f64, i: usize) -> Result<u8, SymbolicError> {
    check_param(t)?;
    let n = (i + 1) as f64;
    Ok((((n + 1.0) * t).floor() - (n * t).floor()) as u8)
}

/// First `len` bits of the characteristic word of slope `t`.
pub fn sturmian_word(t: f64, len: usize) -> Result<Vec<u8>, SymbolicError> {
    check_param(t)?;
    Ok((0..len)
        .map(|i| {
            let n = (i + 1) as f64;
            (((n + 1.0) * t).floor() - (n * t).floor()) as u8
        })
        .collect())
}

/// Indices `< max_index` at which the two selector words differ.
pub fn selector_difference_indices(
    t1: f64,
    t2: f64,
    max_index: usize,
) -> Result<Vec<usize>, SymbolicError> {
    let a = sturmian_word(t1, max_index)?;
    let b = sturmian_word(t2, max_index)?;
    Ok((0..max_index).filter(|&i| a[i] != b[i]).collect())
}
