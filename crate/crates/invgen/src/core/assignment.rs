use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest supported dimension; points are packed into a single machine word.
pub const MAX_DIM: usize = 64;

/// A point of the Boolean cube, stored as 0/1 bits.
///
/// Variable `i` (1-based) lives in bit `i - 1`. When a function reads the
/// point in the ±1 convention, bit `b` stands for `2b - 1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    n: u8,
    bits: u64,
}

impl Assignment {
    pub fn new(n: usize, bits: u64) -> Result<Self> {
        if n > MAX_DIM {
            return Err(Error::Capacity(format!("dimension {n} exceeds {MAX_DIM}")));
        }
        if n < 64 && bits >> n != 0 {
            return Err(Error::invalid(format!("bits {bits:#x} do not fit in dimension {n}")));
        }
        Ok(Assignment { n: n as u8, bits })
    }

    /// Builds a point without checking; `bits` is masked to the dimension.
    pub(crate) fn from_raw(n: usize, bits: u64) -> Self {
        debug_assert!(n <= MAX_DIM);
        Assignment { n: n as u8, bits: bits & mask(n) }
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Assignment::new(n, 0)
    }

    pub fn from_bools(bits: &[bool]) -> Result<Self> {
        let word = bits.iter().enumerate().fold(0u64, |w, (i, &b)| w | ((b as u64) << i));
        Assignment::new(bits.len(), word)
    }

    pub fn dim(&self) -> usize {
        self.n as usize
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// Value of the 0-based coordinate `i`.
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.dim());
        (self.bits >> i) & 1 == 1
    }

    /// Coordinate `i` in the ±1 convention.
    pub fn sign(&self, i: usize) -> i64 {
        if self.get(i) {
            1
        } else {
            -1
        }
    }

    pub fn with(&self, i: usize, value: bool) -> Self {
        let bits = if value { self.bits | (1 << i) } else { self.bits & !(1 << i) };
        Assignment { n: self.n, bits }
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.dim()).map(|i| self.get(i)).collect()
    }
}

pub(crate) fn mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim() {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Assignment({self})")
    }
}

impl FromStr for Assignment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.len() > MAX_DIM {
            return Err(Error::Capacity(format!("point of length {} exceeds {MAX_DIM}", s.len())));
        }
        let mut bits = 0u64;
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => bits |= 1 << i,
                other => return Err(Error::invalid(format!("unexpected character {other:?} in point"))),
            }
        }
        Assignment::new(s.len(), bits)
    }
}

impl serde::Serialize for Assignment {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Assignment {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
