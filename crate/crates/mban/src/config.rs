//! Bit-packed network configurations.
//!
//! A configuration assigns a binary state to each of the `n` automata.
//! States are packed into a single `u128`, bit `v` holding the state of
//! automaton `v`, so the whole toolkit supports networks of up to
//! [`MAX_NODES`] automata with word-parallel updates.

use std::fmt;
use std::str::FromStr;

use crate::error::{MbanError, Result};

/// Hard size limit of the toolkit: one state bit per automaton in a `u128`.
pub const MAX_NODES: usize = 128;

/// The global state of a network: one bit per automaton.
///
/// The text form is a string of `'0'`/`'1'` characters where character
/// index 0 is automaton 0 (leftmost). Read as an integer, automaton 0 is
/// the least significant bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    n: usize,
    bits: u128,
}

impl Configuration {
    /// All-zeros configuration on `n` automata.
    pub fn zeros(n: usize) -> Result<Self> {
        check_size(n)?;
        Ok(Self { n, bits: 0 })
    }

    /// All-ones configuration on `n` automata.
    pub fn ones(n: usize) -> Result<Self> {
        check_size(n)?;
        Ok(Self { n, bits: mask(n) })
    }

    /// Uniform configuration `b^n`.
    pub fn uniform(n: usize, state: bool) -> Result<Self> {
        if state {
            Self::ones(n)
        } else {
            Self::zeros(n)
        }
    }

    /// Builds from a raw bit word; bits at positions `>= n` must be clear.
    pub fn from_bits(n: usize, bits: u128) -> Result<Self> {
        check_size(n)?;
        if bits & !mask(n) != 0 {
            return Err(MbanError::Parameter(format!(
                "configuration word has bits set beyond position {}",
                n - 1
            )));
        }
        Ok(Self { n, bits })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> u128 {
        self.bits
    }

    /// State of automaton `v`.
    pub fn get(&self, v: usize) -> bool {
        debug_assert!(v < self.n);
        (self.bits >> v) & 1 == 1
    }

    pub fn set(&mut self, v: usize, state: bool) {
        debug_assert!(v < self.n);
        if state {
            self.bits |= 1 << v;
        } else {
            self.bits &= !(1 << v);
        }
    }

    pub fn ones_count(&self) -> u32 {
        self.bits.count_ones()
    }

    pub fn zeros_count(&self) -> u32 {
        self.n as u32 - self.ones_count()
    }

    /// Majority state, `None` on an exact split (possible only for even `n`).
    pub fn majority(&self) -> Option<bool> {
        let twice = 2 * self.ones_count() as usize;
        if twice > self.n {
            Some(true)
        } else if twice < self.n {
            Some(false)
        } else {
            None
        }
    }

    /// Bitwise complement of every automaton state.
    pub fn complement(&self) -> Self {
        Self {
            n: self.n,
            bits: !self.bits & mask(self.n),
        }
    }

    /// Text form: `'0'`/`'1'` per automaton, automaton 0 leftmost.
    pub fn to_text(&self) -> String {
        (0..self.n)
            .map(|v| if self.get(v) { '1' } else { '0' })
            .collect()
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let n = text.len();
        check_size(n)?;
        let mut bits = 0u128;
        for (v, ch) in text.chars().enumerate() {
            match ch {
                '1' => bits |= 1 << v,
                '0' => {}
                other => {
                    return Err(MbanError::Parse {
                        location: format!("character {v}"),
                        message: format!("expected '0' or '1', found {other:?}"),
                    })
                }
            }
        }
        Ok(Self { n, bits })
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for Configuration {
    type Err = MbanError;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_text(s)
    }
}

/// Bit mask with the low `n` bits set.
pub(crate) fn mask(n: usize) -> u128 {
    if n == MAX_NODES {
        u128::MAX
    } else {
        (1u128 << n) - 1
    }
}

pub(crate) fn check_size(n: usize) -> Result<()> {
    if n == 0 {
        return Err(MbanError::Parameter("size must be at least 1".into()));
    }
    if n > MAX_NODES {
        return Err(MbanError::TooLarge {
            what: "configuration",
            n,
            max: MAX_NODES,
            detail: "states are packed into a single 128-bit word".into(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let c = Configuration::from_text("110").unwrap();
        assert_eq!(c.n(), 3);
        assert_eq!(c.bits(), 0b011);
        assert_eq!(c.to_text(), "110");
        assert!(c.get(0) && c.get(1) && !c.get(2));
    }

    #[test]
    fn counts_sum_to_n() {
        let c = Configuration::from_text("10110").unwrap();
        assert_eq!(c.ones_count(), 3);
        assert_eq!(c.zeros_count(), 2);
        assert_eq!(c.ones_count() + c.zeros_count(), 5);
    }

    #[test]
    fn majority_rules() {
        assert_eq!(
            Configuration::from_text("110").unwrap().majority(),
            Some(true)
        );
        assert_eq!(
            Configuration::from_text("100").unwrap().majority(),
            Some(false)
        );
        assert_eq!(Configuration::from_text("10").unwrap().majority(), None);
    }

    #[test]
    fn rejects_bad_characters() {
        let err = Configuration::from_text("10x").unwrap_err();
        assert!(matches!(err, MbanError::Parse { .. }));
    }

    #[test]
    fn rejects_overwide_words() {
        assert!(Configuration::from_bits(3, 0b1000).is_err());
        assert!(Configuration::from_bits(3, 0b111).is_ok());
    }

    #[test]
    fn size_limits() {
        assert!(Configuration::zeros(0).is_err());
        assert!(Configuration::zeros(MAX_NODES).is_ok());
        assert!(Configuration::zeros(MAX_NODES + 1).is_err());
        assert_eq!(Configuration::ones(MAX_NODES).unwrap().ones_count(), 128);
    }

    #[test]
    fn complement_flips_every_state() {
        let c = Configuration::from_text("10110").unwrap();
        assert_eq!(c.complement().to_text(), "01001");
        assert_eq!(c.complement().complement(), c);
    }
}
