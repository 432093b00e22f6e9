//! Two-dimensional multi-indices in graded lexicographic order.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

/// Multi-index `α = (a1, a2) ∈ ℕ²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    pub a1: u32,
    pub a2: u32,
}

impl MultiIndex {
    pub const ZERO: MultiIndex = MultiIndex { a1: 0, a2: 0 };

    pub const fn new(a1: u32, a2: u32) -> Self {
        Self { a1, a2 }
    }

    /// `|α| = a1 + a2`.
    pub const fn order(self) -> u32 {
        self.a1 + self.a2
    }

    /// `α! = a1! · a2!`.
    pub fn factorial(self) -> f64 {
        factorial(self.a1) * factorial(self.a2)
    }

    /// Position in the graded ordering `(0,0), (1,0), (0,1), (2,0), (1,1), (0,2), …`.
    pub const fn index(self) -> usize {
        let m = self.order() as usize;
        m * (m + 1) / 2 + self.a2 as usize
    }

    pub fn from_index(idx: usize) -> Self {
        let mut m = 0usize;
        while (m + 1) * (m + 2) / 2 <= idx {
            m += 1;
        }
        let a2 = (idx - m * (m + 1) / 2) as u32;
        Self::new(m as u32 - a2, a2)
    }

    /// `x^α` for a point.
    pub fn monomial(self, x: [f64; 2]) -> f64 {
        powi(x[0], self.a1) * powi(x[1], self.a2)
    }

    /// Gradient of `x^α`.
    pub fn monomial_gradient(self, x: [f64; 2]) -> [f64; 2] {
        let d1 = if self.a1 == 0 {
            0.0
        } else {
            self.a1 as f64 * powi(x[0], self.a1 - 1) * powi(x[1], self.a2)
        };
        let d2 = if self.a2 == 0 {
            0.0
        } else {
            self.a2 as f64 * powi(x[0], self.a1) * powi(x[1], self.a2 - 1)
        };
        [d1, d2]
    }

    /// All multi-indices with `|α| ≤ max_order`, in graded order.
    pub fn up_to(max_order: u32) -> Vec<MultiIndex> {
        (0..count_up_to(max_order)).map(Self::from_index).collect()
    }
}

/// Number of multi-indices with `|α| ≤ max_order`.
pub const fn count_up_to(max_order: u32) -> usize {
    let n = max_order as usize;
    (n + 1) * (n + 2) / 2
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.index().cmp(&other.index())
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a1, self.a2)
    }
}

pub(crate) fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

pub(crate) fn binomial(n: u32, k: u32) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

pub(crate) fn powi(x: f64, e: u32) -> f64 {
    (0..e).fold(1.0, |acc, _| acc * x)
}
