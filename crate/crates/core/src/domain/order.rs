//! Strict linear orders as ranked permutations.

use super::subset::SubsetMask;
use super::DomainError;
use std::fmt;

/// A strict linear order on the alternatives, stored best-to-worst.
///
/// `rank` is the lexicographic (Lehmer) rank of the best-to-worst
/// permutation among all `n!` permutations; it doubles as the canonical
/// column position of the order in assembled systems.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PreferenceOrder {
    ranking: Vec<u8>,
    rank: u64,
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

impl PreferenceOrder {
    /// Build from a best-to-worst listing of all alternative indices.
    pub fn from_ranking(ranking: Vec<u8>) -> Result<Self, DomainError> {
        let n = ranking.len();
        if n == 0 || n > 8 {
            return Err(DomainError::BadOrder(format!(
                "ranking length {n} out of range"
            )));
        }
        let mut seen = [false; 8];
        for &a in &ranking {
            if a as usize >= n || seen[a as usize] {
                return Err(DomainError::BadOrder(format!(
                    "ranking {ranking:?} is not a permutation of 0..{n}"
                )));
            }
            seen[a as usize] = true;
        }
        let rank = lehmer_rank(&ranking);
        Ok(PreferenceOrder { ranking, rank })
    }

    /// Build the order of lexicographic rank `rank` over `n` alternatives.
    pub fn from_rank(n: usize, rank: u64) -> Result<Self, DomainError> {
        if n == 0 || n > 8 || rank >= factorial(n) {
            return Err(DomainError::BadOrder(format!(
                "rank {rank} out of range for n={n}"
            )));
        }
        Ok(PreferenceOrder {
            ranking: lehmer_unrank(n, rank),
            rank,
        })
    }

    pub fn n(&self) -> usize {
        self.ranking.len()
    }

    pub fn rank(&self) -> u64 {
        self.rank
    }

    /// Alternatives best-to-worst.
    pub fn ranking(&self) -> &[u8] {
        &self.ranking
    }

    /// The worst-ranked alternative.
    pub fn worst(&self) -> u8 {
        *self.ranking.last().unwrap()
    }

    /// The unique maximal element of `set`, or an error on the empty set.
    pub fn best_in(&self, set: SubsetMask) -> Result<u8, DomainError> {
        self.ranking
            .iter()
            .copied()
            .find(|&a| set.contains(a))
            .ok_or(DomainError::EmptyConsiderationSet)
    }

    /// True when `a` beats `b`.
    pub fn prefers(&self, a: u8, b: u8) -> bool {
        for &x in &self.ranking {
            if x == a {
                return true;
            }
            if x == b {
                return false;
            }
        }
        false
    }
}

fn lehmer_rank(ranking: &[u8]) -> u64 {
    let n = ranking.len();
    let mut rank = 0u64;
    for i in 0..n {
        let smaller_later = ranking[i + 1..].iter().filter(|&&x| x < ranking[i]).count();
        rank += smaller_later as u64 * factorial(n - 1 - i);
    }
    rank
}

fn lehmer_unrank(n: usize, mut rank: u64) -> Vec<u8> {
    let mut pool: Vec<u8> = (0..n as u8).collect();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let f = factorial(n - 1 - i);
        let idx = (rank / f) as usize;
        rank %= f;
        out.push(pool.remove(idx));
    }
    out
}

impl fmt::Debug for PreferenceOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.ranking.iter().map(|a| a.to_string()).collect();
        write!(f, "[{}]#{}", s.join(">"), self.rank)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_unrank_roundtrip_exhaustive() {
        // All permutations round-trip for n <= 6.
        for n in 1..=6usize {
            for r in 0..factorial(n) {
                let p = PreferenceOrder::from_rank(n, r).unwrap();
                assert_eq!(p.rank(), r);
                let q = PreferenceOrder::from_ranking(p.ranking().to_vec()).unwrap();
                assert_eq!(q.rank(), r);
            }
        }
    }

    #[test]
    fn rank_order_is_lexicographic() {
        let mut prev: Option<Vec<u8>> = None;
        for r in 0..factorial(4) {
            let p = PreferenceOrder::from_rank(4, r).unwrap();
            if let Some(prev) = prev {
                assert!(prev < p.ranking().to_vec());
            }
            prev = Some(p.ranking().to_vec());
        }
    }

    #[test]
    fn best_in_restriction() {
        // order c>b>a restricted to {a,b} picks b
        let p = PreferenceOrder::from_ranking(vec![2, 1, 0]).unwrap();
        assert_eq!(p.best_in(SubsetMask::from_members(&[0, 1])).unwrap(), 1);
    }

    #[test]
    fn best_in_empty_errors() {
        let p = PreferenceOrder::from_rank(3, 0).unwrap();
        assert!(matches!(
            p.best_in(SubsetMask::new(0)),
            Err(DomainError::EmptyConsiderationSet)
        ));
    }

    #[test]
    fn rejects_non_permutations() {
        assert!(PreferenceOrder::from_ranking(vec![0, 0, 1]).is_err());
        assert!(PreferenceOrder::from_ranking(vec![0, 3]).is_err());
    }
}
