//! Spin configurations.
//!
//! A chain of `k` spins is identified with a product of `k` generators:
//! an up spin is `A0`, a down spin is `A1`, read left to right.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn flip(self) -> Spin {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }

    /// Index of the generator this spin stands for (`0` for `A0`).
    pub fn generator_index(self) -> u8 {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Spin::Up => '^',
            Spin::Down => 'v',
        }
    }

    pub fn from_symbol(c: char) -> Option<Spin> {
        match c {
            '^' | 'u' | 'U' | '0' => Some(Spin::Up),
            'v' | 'd' | 'D' | '1' => Some(Spin::Down),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct SpinWord {
    spins: Vec<Spin>,
}

impl SpinWord {
    pub fn new(spins: Vec<Spin>) -> Self {
        Self { spins }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.spins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }

    pub fn spins(&self) -> &[Spin] {
        &self.spins
    }

    /// Spin at a 1-based position counted from the left.
    pub fn at(&self, position: usize) -> Option<Spin> {
        position
            .checked_sub(1)
            .and_then(|i| self.spins.get(i).copied())
    }

    pub fn push(&mut self, spin: Spin) {
        self.spins.push(spin);
    }

    /// All `2^k` words of length `k`, in lexicographic order with `Up < Down`.
    pub fn all(k: usize) -> impl Iterator<Item = SpinWord> {
        assert!(k < 64, "cannot enumerate words of length {k}");
        (0u64..1u64 << k).map(move |bits| {
            let spins = (0..k)
                .map(|i| {
                    if bits >> (k - 1 - i) & 1 == 0 {
                        Spin::Up
                    } else {
                        Spin::Down
                    }
                })
                .collect();
            SpinWord { spins }
        })
    }
}

impl From<Vec<Spin>> for SpinWord {
    fn from(spins: Vec<Spin>) -> Self {
        Self { spins }
    }
}

impl fmt::Display for SpinWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.spins {
            write!(f, "{}", s.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for SpinWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| {
                Spin::from_symbol(c)
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown spin symbol {c:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(SpinWord::new)
    }
}

/// Exchanges every up spin with a down spin.
pub fn spin_flip(w: &SpinWord) -> SpinWord {
    SpinWord::new(w.spins.iter().map(|s| s.flip()).collect())
}
