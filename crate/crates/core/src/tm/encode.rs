use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::machine::Symbol;
use super::TmError;

/// Reads `2∘reverse(w)` as a ternary numeral: the tape cells become digits,
/// least significant first, under a leading sentinel 2.
pub fn encode_input(w: &str) -> Result<BigInt, TmError> {
    let mut v = BigInt::from(2);
    for c in w.chars().rev() {
        v = v * 3 + Symbol::from_bit(c)?.digit();
    }
    Ok(v)
}

/// Inverse of [`encode_input`] on final tapes: the ternary digits of `x`
/// least significant first, without the sentinel and trailing blanks.
pub fn decode_output(x: &BigInt) -> Result<String, TmError> {
    if *x < BigInt::from(2) {
        return Err(TmError::MalformedTape(format!("{x} has no sentinel digit")));
    }
    let mut digits = Vec::new();
    let mut v = x.clone();
    while !v.is_zero() {
        digits.push((&v % 3u32).to_u32().expect("digit below 3"));
        v /= 3u32;
    }
    if digits.pop() != Some(2) {
        return Err(TmError::MalformedTape(format!("{x} does not start with the sentinel digit 2")));
    }
    while digits.last() == Some(&2) {
        digits.pop();
    }
    if digits.contains(&2) {
        return Err(TmError::MalformedTape(format!("{x} has a blank inside the output")));
    }
    Ok(digits.iter().map(|d| char::from_digit(*d, 3).expect("binary digit")).collect())
}
