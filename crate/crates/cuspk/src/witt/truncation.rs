use crate::error::{Error, Result};

/// A finite truncation set: positive integers closed under taking divisors.
/// Indexes the components of big Witt vectors. The empty set is legal and
/// carries the zero ring.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct TruncationSet {
    members: Vec<u64>,
}

impl TruncationSet {
    pub fn new(mut members: Vec<u64>) -> Result<Self> {
        members.sort_unstable();
        members.dedup();
        if members.first() == Some(&0) {
            return Err(Error::invalid("truncation set members must be positive"));
        }
        let set = TruncationSet { members };
        for &m in &set.members {
            for d in 1..=m {
                if m % d == 0 && !set.contains(d) {
                    return Err(Error::invalid(format!(
                        "not divisor-closed: {m} is a member but its divisor {d} is not"
                    )));
                }
            }
        }
        Ok(set)
    }

    pub fn empty() -> Self {
        TruncationSet { members: Vec::new() }
    }

    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, m: u64) -> bool {
        self.members.binary_search(&m).is_ok()
    }

    pub fn index_of(&self, m: u64) -> Option<usize> {
        self.members.binary_search(&m).ok()
    }

    /// S/n = { m : n*m in S }, divisor-closed by construction.
    pub fn divide(&self, n: u64) -> TruncationSet {
        assert!(n >= 1);
        TruncationSet {
            members: self
                .members
                .iter()
                .filter(|&&m| m % n == 0)
                .map(|&m| m / n)
                .collect(),
        }
    }

    /// Key string used for cache file names and in-memory table lookups.
    pub fn key(&self) -> String {
        self.members
            .iter()
            .map(|m| m.to_string())
            .collect::<Vec<_>>()
            .join("-")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_divisor_closed() {
        assert!(TruncationSet::new(vec![1, 4]).is_err());
        assert!(TruncationSet::new(vec![2]).is_err());
        assert!(TruncationSet::new(vec![0, 1]).is_err());
        assert!(TruncationSet::new(vec![1, 2, 3, 4, 6]).is_ok());
    }

    #[test]
    fn divide_examples() {
        let s = TruncationSet::new(vec![1, 2, 3, 4, 6]).unwrap();
        assert_eq!(s.divide(2).members(), &[1, 2, 3]);
        assert_eq!(s.divide(1), s);
        assert!(s.divide(5).is_empty());
    }

    #[test]
    fn empty_set_is_legal() {
        let e = TruncationSet::empty();
        assert!(e.is_empty());
        assert_eq!(e.divide(3), e);
    }
}
