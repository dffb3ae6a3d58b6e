// SPDX-License-Identifier: Apache-2.0
//! Delay-insensitive data codes.
//!
//! A dual-rail (1-of-2) signal carries one bit on two wires. Exactly one
//! wire high is a valid codeword, both low is the spacer that separates
//! successive data in a return-to-zero protocol, and both high is illegal.
//! The 1-of-4 code carries two bits on four wires, one of them high.

use std::fmt;

use thiserror::Error;

/// Decoded state of a dual-rail pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RailState {
    Valid(bool),
    Spacer,
    Illegal,
}

impl RailState {
    pub fn is_valid(self) -> bool {
        matches!(self, RailState::Valid(_))
    }

    pub fn value(self) -> Option<bool> {
        match self {
            RailState::Valid(b) => Some(b),
            _ => None,
        }
    }
}

impl fmt::Display for RailState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RailState::Valid(true) => f.write_str("valid-1"),
            RailState::Valid(false) => f.write_str("valid-0"),
            RailState::Spacer => f.write_str("spacer"),
            RailState::Illegal => f.write_str("illegal"),
        }
    }
}

/// Wire levels of one dual-rail signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct RailPair {
    pub rail1: bool,
    pub rail0: bool,
}

impl RailPair {
    pub const SPACER: RailPair = RailPair {
        rail1: false,
        rail0: false,
    };

    pub fn new(rail1: bool, rail0: bool) -> Self {
        Self { rail1, rail0 }
    }

    pub fn state(self) -> RailState {
        decode_dual_rail(self)
    }
}

/// Returns the unique valid codeword for `bit`.
pub fn encode_dual_rail(bit: bool) -> RailPair {
    RailPair {
        rail1: bit,
        rail0: !bit,
    }
}

pub fn decode_dual_rail(p: RailPair) -> RailState {
    match (p.rail1, p.rail0) {
        (true, false) => RailState::Valid(true),
        (false, true) => RailState::Valid(false),
        (false, false) => RailState::Spacer,
        (true, true) => RailState::Illegal,
    }
}

/// Four wires `F0..F3` of a 1-of-4 signal; `F[2p+q]` is high for data `(p, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct OneOfFour {
    pub f: [bool; 4],
}

/// Decoded state of a 1-of-4 word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OneOfFourState {
    /// The two data bits `(p, q)`.
    Valid(bool, bool),
    Spacer,
    Illegal,
}

pub fn encode_one_of_four(p: bool, q: bool) -> OneOfFour {
    let mut f = [false; 4];
    f[(usize::from(p) << 1) | usize::from(q)] = true;
    OneOfFour { f }
}

pub fn decode_one_of_four(w: OneOfFour) -> OneOfFourState {
    let high: Vec<usize> = (0..4).filter(|&i| w.f[i]).collect();
    match high.as_slice() {
        [] => OneOfFourState::Spacer,
        [i] => OneOfFourState::Valid(i & 2 != 0, i & 1 != 0),
        _ => OneOfFourState::Illegal,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error("codeword set is empty")]
    Empty,
    #[error("codeword {index} has length {found}, expected {expected}")]
    LengthMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("invalid character {0:?} in codeword (expected 0 or 1)")]
    BadDigit(char),
}

/// Properties of a set of codewords.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodewordSetReport {
    /// No word's set of high bits is contained in another word's.
    pub unordered: bool,
    /// The set is exactly the `n` one-hot words of length `n`.
    pub complete_one_hot: bool,
}

/// Parses a word such as `"0100"` into wire levels, leftmost character first.
pub fn parse_word(s: &str) -> Result<Vec<bool>, CodeError> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(CodeError::BadDigit(other)),
        })
        .collect()
}

pub fn check_codeword_set(words: &[Vec<bool>]) -> Result<CodewordSetReport, CodeError> {
    let first = words.first().ok_or(CodeError::Empty)?;
    let n = first.len();
    if let Some((index, w)) = words.iter().enumerate().find(|(_, w)| w.len() != n) {
        return Err(CodeError::LengthMismatch {
            index,
            expected: n,
            found: w.len(),
        });
    }

    let mut distinct: Vec<&Vec<bool>> = words.iter().collect();
    distinct.sort();
    distinct.dedup();

    let covers = |big: &[bool], small: &[bool]| big.iter().zip(small).all(|(&b, &s)| b || !s);
    let unordered = distinct.iter().enumerate().all(|(i, a)| {
        distinct
            .iter()
            .enumerate()
            .all(|(j, b)| i == j || !covers(b, a))
    });

    let one_hot = |w: &[bool]| w.iter().filter(|&&b| b).count() == 1;
    let complete_one_hot = distinct.len() == n && distinct.iter().all(|w| one_hot(w));

    Ok(CodewordSetReport {
        unordered,
        complete_one_hot,
    })
}
