use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A contiguous, inclusive range of basis indices `lo..=hi`.
///
/// Any `lo > hi` is the empty window; all empty windows compare equal.
#[derive(Debug, Clone, Copy)]
pub struct IndexWindow {
    lo: i64,
    hi: i64,
}

impl IndexWindow {
    pub const EMPTY: IndexWindow = IndexWindow { lo: 0, hi: -1 };

    pub fn new(lo: i64, hi: i64) -> Self {
        if lo > hi {
            Self::EMPTY
        } else {
            IndexWindow { lo, hi }
        }
    }

    pub fn single(i: i64) -> Self {
        IndexWindow { lo: i, hi: i }
    }

    /// The Hardy window `0..=n`.
    pub fn hardy(n: i64) -> Self {
        Self::new(0, n)
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn len(&self) -> usize {
        if self.is_empty() {
            0
        } else {
            (self.hi - self.lo + 1) as usize
        }
    }

    pub fn contains(&self, i: i64) -> bool {
        self.lo <= i && i <= self.hi
    }

    /// Every index of `other` lies in `self`.
    pub fn covers(&self, other: &IndexWindow) -> bool {
        other.is_empty() || (self.lo <= other.lo && other.hi <= self.hi)
    }

    pub fn intersect(&self, other: &IndexWindow) -> IndexWindow {
        if self.is_empty() || other.is_empty() {
            return Self::EMPTY;
        }
        Self::new(self.lo.max(other.lo), self.hi.min(other.hi))
    }

    /// Smallest window containing both.
    pub fn hull(&self, other: &IndexWindow) -> IndexWindow {
        match (self.is_empty(), other.is_empty()) {
            (true, _) => *other,
            (_, true) => *self,
            _ => Self::new(self.lo.min(other.lo), self.hi.max(other.hi)),
        }
    }

    /// Smallest window containing every index yielded by `it`.
    pub fn enclosing(it: impl IntoIterator<Item = i64>) -> IndexWindow {
        it.into_iter()
            .fold(Self::EMPTY, |w, i| w.hull(&Self::single(i)))
    }

    pub fn shift(&self, by: i64) -> IndexWindow {
        if self.is_empty() {
            Self::EMPTY
        } else {
            Self::new(self.lo + by, self.hi + by)
        }
    }

    /// Offset of `i` from `lo`, if inside.
    pub fn position(&self, i: i64) -> Option<usize> {
        self.contains(i).then(|| (i - self.lo) as usize)
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> + Clone {
        self.lo..=self.hi
    }

    pub fn is_hardy(&self) -> bool {
        self.is_empty() || self.lo >= 0
    }
}

impl PartialEq for IndexWindow {
    fn eq(&self, other: &Self) -> bool {
        (self.is_empty() && other.is_empty()) || (self.lo == other.lo && self.hi == other.hi)
    }
}

impl Eq for IndexWindow {}

impl fmt::Display for IndexWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            write!(f, "[empty]")
        } else {
            write!(f, "[{}, {}]", self.lo, self.hi)
        }
    }
}

/// Parses `lo:hi`.
impl FromStr for IndexWindow {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (lo, hi) = s
            .split_once(':')
            .ok_or_else(|| Error::parse(0, format!("expected lo:hi, got `{s}`")))?;
        let parse = |t: &str, col: usize| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| Error::parse(col, format!("not an integer: `{t}`")))
        };
        let lo = parse(lo, 0)?;
        let hi = parse(hi, s.find(':').unwrap_or(0) + 1)?;
        if lo > hi {
            return Err(Error::parse(0, format!("window {s} has lo > hi")));
        }
        Ok(IndexWindow::new(lo, hi))
    }
}
