//! Bitmask subsets of the grand choice set.

use std::fmt;

/// A subset of the alternatives, one bit per alternative index.
///
/// Menus, consideration sets, and the grand set are all `SubsetMask`s over
/// the same universe. A mask used as a menu or consideration set must be
/// nonempty.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SubsetMask(u32);

impl SubsetMask {
    pub fn new(bits: u32) -> Self {
        SubsetMask(bits)
    }

    /// Singleton set containing only alternative `alt`.
    pub fn singleton(alt: u8) -> Self {
        SubsetMask(1 << alt)
    }

    /// The grand set over `n` alternatives.
    pub fn full(n: usize) -> Self {
        SubsetMask((1u32 << n) - 1)
    }

    pub fn from_members(members: &[u8]) -> Self {
        SubsetMask(members.iter().fold(0u32, |m, &a| m | (1 << a)))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, alt: u8) -> bool {
        self.0 & (1 << alt) != 0
    }

    pub fn is_subset_of(self, other: SubsetMask) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: SubsetMask) -> SubsetMask {
        SubsetMask(self.0 | other.0)
    }

    pub fn intersect(self, other: SubsetMask) -> SubsetMask {
        SubsetMask(self.0 & other.0)
    }

    pub fn minus(self, other: SubsetMask) -> SubsetMask {
        SubsetMask(self.0 & !other.0)
    }

    pub fn with(self, alt: u8) -> SubsetMask {
        SubsetMask(self.0 | (1 << alt))
    }

    /// Member alternative indices, ascending.
    pub fn members(self) -> impl Iterator<Item = u8> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let a = bits.trailing_zeros() as u8;
                bits &= bits - 1;
                Some(a)
            }
        })
    }

    /// Nonempty subsets of `self`, in increasing mask value.
    pub fn nonempty_subsets(self) -> impl Iterator<Item = SubsetMask> {
        let selector = self.0;
        let count = 1u32 << selector.count_ones();
        (1..count).map(move |sub| SubsetMask(expand_bits(sub, selector)))
    }

    /// All subsets of `self` including the empty set, in increasing mask
    /// value.
    pub fn subsets(self) -> impl Iterator<Item = SubsetMask> {
        let selector = self.0;
        let count = 1u32 << selector.count_ones();
        (0..count).map(move |sub| SubsetMask(expand_bits(sub, selector)))
    }

    /// Rank of `sub` among the nonempty subsets of `self` enumerated in
    /// increasing mask value. Requires `sub` to be a nonempty subset.
    pub fn subset_rank(self, sub: SubsetMask) -> usize {
        debug_assert!(!sub.is_empty() && sub.is_subset_of(self));
        compress_bits(sub.0, self.0) as usize - 1
    }

    /// Inverse of [`subset_rank`].
    pub fn subset_at(self, rank: usize) -> SubsetMask {
        SubsetMask(expand_bits(rank as u32 + 1, self.0))
    }
}

/// Gather the bits of `mask` at the positions selected by `selector` into a
/// compact low-order value (software PEXT).
fn compress_bits(mask: u32, selector: u32) -> u32 {
    let mut out = 0u32;
    let mut bit = 0u32;
    let mut sel = selector;
    while sel != 0 {
        let low = sel & sel.wrapping_neg();
        if mask & low != 0 {
            out |= 1 << bit;
        }
        bit += 1;
        sel &= sel - 1;
    }
    out
}

/// Scatter the low-order bits of `value` onto the positions selected by
/// `selector` (software PDEP).
fn expand_bits(value: u32, selector: u32) -> u32 {
    let mut out = 0u32;
    let mut bit = 0u32;
    let mut sel = selector;
    while sel != 0 {
        let low = sel & sel.wrapping_neg();
        if value & (1 << bit) != 0 {
            out |= low;
        }
        bit += 1;
        sel &= sel - 1;
    }
    out
}

impl fmt::Debug for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, a) in self.members().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn members_ascending() {
        let m = SubsetMask::from_members(&[3, 0, 2]);
        assert_eq!(m.members().collect::<Vec<_>>(), vec![0, 2, 3]);
        assert_eq!(m.len(), 3);
    }

    #[test]
    fn nonempty_subsets_increasing() {
        let m = SubsetMask::new(0b101);
        let subs: Vec<u32> = m.nonempty_subsets().map(|s| s.bits()).collect();
        assert_eq!(subs, vec![0b001, 0b100, 0b101]);
    }

    #[test]
    fn subset_rank_roundtrip() {
        let menu = SubsetMask::new(0b1101);
        for (k, sub) in menu.nonempty_subsets().enumerate() {
            assert_eq!(menu.subset_rank(sub), k);
            assert_eq!(menu.subset_at(k), sub);
        }
    }

    #[test]
    fn rank_preserves_mask_order() {
        let menu = SubsetMask::new(0b10110);
        let subs: Vec<SubsetMask> = menu.nonempty_subsets().collect();
        for w in subs.windows(2) {
            assert!(w[0].bits() < w[1].bits());
            assert!(menu.subset_rank(w[0]) < menu.subset_rank(w[1]));
        }
    }
}
