use crate::error::{Error, Result};

/// Two-set partition of a qubit index set, canonically oriented:
/// `|A| <= |B|`, and on an even split A holds the smallest index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bipartition {
    subset_a: Vec<usize>,
    subset_b: Vec<usize>,
}

impl Bipartition {
    /// Splits `universe` into `subset_a` and its complement.
    pub fn split(universe: &[usize], subset_a: &[usize]) -> Result<Self> {
        let mut uni = universe.to_vec();
        uni.sort_unstable();
        uni.dedup();
        if uni.len() != universe.len() {
            return Err(Error::InvalidInput("duplicate qubit in universe".into()));
        }
        if uni.len() < 2 {
            return Err(Error::InvalidInput("bipartition needs at least 2 qubits".into()));
        }
        let mut a = subset_a.to_vec();
        a.sort_unstable();
        a.dedup();
        if a.len() != subset_a.len() {
            return Err(Error::InvalidInput("duplicate qubit in subset".into()));
        }
        if a.is_empty() || a.len() == uni.len() {
            return Err(Error::InvalidInput("both sides must be nonempty".into()));
        }
        if !a.iter().all(|q| uni.binary_search(q).is_ok()) {
            return Err(Error::InvalidInput("subset not contained in universe".into()));
        }
        let b: Vec<usize> = uni.iter().copied().filter(|q| a.binary_search(q).is_err()).collect();
        let (subset_a, subset_b) = if a.len() > b.len() || (a.len() == b.len() && b[0] == uni[0]) {
            (b, a)
        } else {
            (a, b)
        };
        Ok(Self { subset_a, subset_b })
    }

    /// First floor(n/2) qubits of 0..n versus the rest.
    pub fn half_split(n: usize) -> Result<Self> {
        let universe: Vec<usize> = (0..n).collect();
        let a: Vec<usize> = (0..n / 2).collect();
        Self::split(&universe, &a)
    }

    pub fn a(&self) -> &[usize] {
        &self.subset_a
    }

    pub fn b(&self) -> &[usize] {
        &self.subset_b
    }

    pub fn n(&self) -> usize {
        self.subset_a.len() + self.subset_b.len()
    }

    /// All qubit indices, sorted.
    pub fn universe(&self) -> Vec<usize> {
        let mut u: Vec<usize> = self.subset_a.iter().chain(&self.subset_b).copied().collect();
        u.sort_unstable();
        u
    }

    /// True when the universe is exactly 0..n.
    pub fn covers_range(&self, n: usize) -> bool {
        self.n() == n && self.universe().iter().enumerate().all(|(i, &q)| i == q)
    }
}
