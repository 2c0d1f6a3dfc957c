//! Shift register and linear feedback taps.
//!
//! Register bit 0 receives the feedback bit; on every clock each bit moves one
//! position up and bit `degree - 1` falls off. Tap `k` of the polynomial reads
//! register bit `k - 1`, so the `x^degree` term is always the outgoing bit.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::puf::Challenge;

/// Largest degree `lfsr_period` will walk exhaustively.
pub const MAX_PERIOD_DEGREE: usize = 24;

/// Exponents of a feedback polynomial, without the constant term.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct TapSet {
    degree: usize,
    taps: Vec<usize>,
}

impl TapSet {
    /// Taps are sorted in descending order; the largest is the degree.
    pub fn new(taps: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut taps: Vec<usize> = taps.into_iter().collect();
        taps.sort_unstable_by(|a, b| b.cmp(a));
        taps.dedup();
        let degree = *taps
            .first()
            .ok_or_else(|| Error::Parameter("tap set is empty".into()))?;
        if taps.contains(&0) {
            return Err(Error::Parameter("tap positions start at 1".into()));
        }
        Ok(Self { degree, taps })
    }

    /// `x^128 + x^126 + x^101 + x^99 + 1`.
    pub fn default_128() -> Self {
        Self::new([128, 126, 101, 99]).expect("static tap set")
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn taps(&self) -> &[usize] {
        &self.taps
    }
}

impl Default for TapSet {
    fn default() -> Self {
        Self::default_128()
    }
}

impl TryFrom<Vec<usize>> for TapSet {
    type Error = Error;

    fn try_from(taps: Vec<usize>) -> Result<Self> {
        Self::new(taps)
    }
}

impl From<TapSet> for Vec<usize> {
    fn from(taps: TapSet) -> Self {
        taps.taps
    }
}

impl fmt::Display for TapSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self.taps.iter().map(|t| format!("x^{t}")).collect();
        write!(f, "{} + 1", terms.join(" + "))
    }
}

/// Contents of the shift register plus the number of clocks applied so far.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegisterState {
    degree: usize,
    words: Vec<u64>,
    step_count: u64,
}

impl RegisterState {
    /// Seeds a register from little-endian words (bit `i` of the register is
    /// bit `i % 64` of word `i / 64`). Bits beyond `degree` must be clear.
    pub fn from_words(degree: usize, words: Vec<u64>) -> Result<Self> {
        if degree == 0 {
            return Err(Error::Parameter(
                "register degree must be at least 1".into(),
            ));
        }
        if words.len() != degree.div_ceil(64) {
            return Err(Error::Dimension {
                expected: degree.div_ceil(64),
                actual: words.len(),
            });
        }
        let state = Self {
            degree,
            words,
            step_count: 0,
        };
        let mut masked = state.clone();
        masked.mask_top();
        if state.words != masked.words {
            return Err(Error::Parameter(format!(
                "seed has bits set above degree {degree}"
            )));
        }
        if state.is_zero() {
            return Err(Error::Parameter("register seed must be nonzero".into()));
        }
        Ok(state)
    }

    pub fn from_u64(degree: usize, value: u64) -> Result<Self> {
        let mut words = vec![0; degree.div_ceil(64)];
        if let Some(w) = words.first_mut() {
            *w = value;
        }
        Self::from_words(degree, words)
    }

    /// Seed with only bit 0 set.
    pub fn unit(degree: usize) -> Result<Self> {
        Self::from_u64(degree, 1)
    }

    /// Parses a hexadecimal register value (optional `0x` prefix), most
    /// significant digit first; register bit `i` is bit `i` of the integer.
    pub fn from_hex(degree: usize, text: &str) -> Result<Self> {
        let digits = text
            .trim()
            .trim_start_matches("0x")
            .trim_start_matches("0X");
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_hexdigit()) {
            return Err(Error::Parameter(format!(
                "invalid hex register seed {text:?}"
            )));
        }
        let mut words = vec![0u64; degree.div_ceil(64)];
        for (pos, c) in digits.chars().rev().enumerate() {
            let nibble = c.to_digit(16).expect("checked hex digit") as u64;
            if nibble == 0 {
                continue;
            }
            let bit = pos * 4;
            if bit >= degree || (nibble >> (degree - bit).min(4)) != 0 {
                return Err(Error::Parameter(format!(
                    "seed {text:?} does not fit in {degree} bits"
                )));
            }
            words[bit / 64] |= nibble << (bit % 64);
        }
        Self::from_words(degree, words)
    }

    pub fn to_hex(&self) -> String {
        let mut out = String::new();
        for w in self.words.iter().rev() {
            out.push_str(&format!("{w:016x}"));
        }
        let trimmed = out.trim_start_matches('0');
        format!("0x{}", if trimmed.is_empty() { "0" } else { trimmed })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn bit(&self, i: usize) -> bool {
        assert!(i < self.degree, "register bit {i} out of range");
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn bits(&self) -> Vec<u8> {
        (0..self.degree).map(|i| u8::from(self.bit(i))).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// The parallel register contents as a PUF challenge.
    pub fn challenge(&self) -> Challenge {
        Challenge::from_words(self.words.clone(), self.degree)
    }

    /// Clocks the register once with `input` entering at bit 0.
    pub fn shift_in(&mut self, input: bool) {
        let mut carry = u64::from(input);
        for w in self.words.iter_mut() {
            let out = *w >> 63;
            *w = (*w << 1) | carry;
            carry = out;
        }
        self.mask_top();
        self.step_count += 1;
    }

    fn mask_top(&mut self) {
        let rem = self.degree % 64;
        if rem != 0 {
            if let Some(top) = self.words.last_mut() {
                *top &= (1u64 << rem) - 1;
            }
        }
    }
}

/// XOR of the register bits selected by the taps.
pub fn lfsr_feedback(state: &RegisterState, taps: &TapSet) -> Result<bool> {
    if taps.degree() != state.degree() {
        return Err(Error::Dimension {
            expected: taps.degree(),
            actual: state.degree(),
        });
    }
    Ok(feedback_unchecked(state, taps))
}

pub(crate) fn feedback_unchecked(state: &RegisterState, taps: &TapSet) -> bool {
    taps.taps()
        .iter()
        .fold(false, |acc, &t| acc ^ state.bit(t - 1))
}

/// Period of the pure LFSR started from `seed`, found by stepping until the
/// seed state comes around again.
pub fn lfsr_period(taps: &TapSet, seed: &RegisterState) -> Result<u64> {
    let degree = taps.degree();
    if degree > MAX_PERIOD_DEGREE {
        return Err(Error::Unsupported(format!(
            "exhaustive period search limited to degree {MAX_PERIOD_DEGREE}, got {degree}"
        )));
    }
    if seed.degree() != degree {
        return Err(Error::Dimension {
            expected: degree,
            actual: seed.degree(),
        });
    }
    if seed.is_zero() {
        return Err(Error::Parameter("seed must be nonzero".into()));
    }
    let mask = (1u64 << degree) - 1;
    let tap_mask = taps.taps().iter().fold(0u64, |m, &t| m | 1 << (t - 1));
    let start = seed.words()[0];
    let mut state = start;
    // taps include the degree term, so the map is a bijection and the orbit
    // of the seed is a pure cycle
    for step in 1..=(1u64 << degree) {
        let fb = u64::from((state & tap_mask).count_ones() & 1 == 1);
        state = ((state << 1) | fb) & mask;
        if state == start {
            return Ok(step);
        }
    }
    unreachable!("bijective LFSR must revisit its seed within 2^degree steps")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tapset_validation() {
        assert!(TapSet::new([]).is_err());
        assert!(TapSet::new([4, 0]).is_err());
        let t = TapSet::new([99, 128, 101, 126, 126]).unwrap();
        assert_eq!(t.degree(), 128);
        assert_eq!(t.taps(), &[128, 126, 101, 99]);
        assert_eq!(t.to_string(), "x^128 + x^126 + x^101 + x^99 + 1");
    }

    #[test]
    fn tapset_json() {
        let t = TapSet::default_128();
        let text = serde_json::to_string(&t).unwrap();
        assert_eq!(text, "[128,126,101,99]");
        assert_eq!(serde_json::from_str::<TapSet>(&text).unwrap(), t);
        assert!(serde_json::from_str::<TapSet>("[]").is_err());
    }

    #[test]
    fn seed_rejects_zero_and_overflow() {
        assert!(RegisterState::from_u64(8, 0).is_err());
        assert!(RegisterState::from_u64(4, 0x10).is_err());
        assert!(RegisterState::from_hex(128, "0x0").is_err());
        assert!(RegisterState::from_hex(4, "1f").is_err());
        assert!(RegisterState::from_hex(5, "1f").is_ok());
        assert!(RegisterState::from_hex(8, "zz").is_err());
    }

    #[test]
    fn hex_roundtrip() {
        let s = RegisterState::from_hex(128, "0x8000000000000000000000000000f00d").unwrap();
        assert!(s.bit(127));
        assert!(s.bit(0));
        assert!(!s.bit(1));
        assert_eq!(s.to_hex(), "0x8000000000000000000000000000f00d");
        assert_eq!(RegisterState::unit(128).unwrap().to_hex(), "0x1");
    }

    #[test]
    fn shift_moves_bits_up() {
        let mut s = RegisterState::from_u64(70, 1 << 63).unwrap();
        s.shift_in(true);
        assert!(s.bit(0));
        assert!(s.bit(64));
        assert!(!s.bit(63));
        assert_eq!(s.step_count(), 1);
        // bit 69 falls off the end
        let mut top = RegisterState::from_hex(70, "0x200000000000000000").unwrap();
        assert!(top.bit(69));
        top.shift_in(false);
        assert!(top.is_zero());
    }

    #[test]
    fn feedback_reads_tap_positions() {
        let taps = TapSet::default_128();
        let mut words = vec![0u64; 2];
        words[1] = 1 << 63; // position 128 only
        let s = RegisterState::from_words(128, words).unwrap();
        assert!(lfsr_feedback(&s, &taps).unwrap());

        let s = RegisterState::from_hex(128, "0x2").unwrap(); // position 2, not a tap
        assert!(!lfsr_feedback(&s, &taps).unwrap());

        // positions 99 and 101 cancel
        let mut words = vec![0u64; 2];
        words[1] = (1 << (98 - 64)) | (1 << (100 - 64));
        let s = RegisterState::from_words(128, words).unwrap();
        assert!(!lfsr_feedback(&s, &taps).unwrap());
    }

    #[test]
    fn feedback_checks_degree() {
        let s = RegisterState::unit(8).unwrap();
        assert!(lfsr_feedback(&s, &TapSet::new([4, 3]).unwrap()).is_err());
    }

    #[test]
    fn periods_of_small_polynomials() {
        let p43 = TapSet::new([4, 3]).unwrap();
        for seed in 1..16 {
            let s = RegisterState::from_u64(4, seed).unwrap();
            assert_eq!(lfsr_period(&p43, &s).unwrap(), 15);
        }
        let p76 = TapSet::new([7, 6]).unwrap();
        assert_eq!(
            lfsr_period(&p76, &RegisterState::from_u64(7, 0x55).unwrap()).unwrap(),
            127
        );
        let p42 = TapSet::new([4, 2]).unwrap();
        assert!(lfsr_period(&p42, &RegisterState::unit(4).unwrap()).unwrap() < 15);
    }

    #[test]
    fn period_refuses_large_degree() {
        let taps = TapSet::default_128();
        let seed = RegisterState::unit(128).unwrap();
        assert!(matches!(
            lfsr_period(&taps, &seed),
            Err(Error::Unsupported(_))
        ));
    }
}
