//! Finite ground sets and subsets of them packed into a single `u64`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// A subset of a ground set of at most 64 points; bit `i` stands for point `i`.
///
/// The ordering is the canonical one used everywhere in the crate: by
/// cardinality first, then by numeric mask value. Sorting a family of masks
/// therefore yields its canonical order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct SubsetMask(u64);

impl SubsetMask {
    pub const CAPACITY: usize = 64;
    pub const EMPTY: SubsetMask = SubsetMask(0);

    #[inline]
    pub const fn from_bits(bits: u64) -> Self {
        SubsetMask(bits)
    }

    #[inline]
    pub const fn bits(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn singleton(index: usize) -> Self {
        debug_assert!(index < Self::CAPACITY);
        SubsetMask(1u64 << index)
    }

    /// The mask with the first `n` points set.
    #[inline]
    pub fn full(n: usize) -> Self {
        if n >= Self::CAPACITY {
            SubsetMask(u64::MAX)
        } else {
            SubsetMask((1u64 << n) - 1)
        }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        indices
            .into_iter()
            .fold(Self::EMPTY, |acc, i| acc.union(Self::singleton(i)))
    }

    #[inline]
    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub const fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub const fn union(self, other: Self) -> Self {
        SubsetMask(self.0 | other.0)
    }

    #[inline]
    pub const fn intersection(self, other: Self) -> Self {
        SubsetMask(self.0 & other.0)
    }

    #[inline]
    pub const fn difference(self, other: Self) -> Self {
        SubsetMask(self.0 & !other.0)
    }

    #[inline]
    pub const fn meets(self, other: Self) -> bool {
        self.0 & other.0 != 0
    }

    #[inline]
    pub const fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub const fn is_proper_subset_of(self, other: Self) -> bool {
        self.is_subset_of(other) && self.0 != other.0
    }

    #[inline]
    pub const fn contains(self, index: usize) -> bool {
        index < Self::CAPACITY && self.0 >> index & 1 == 1
    }

    /// Indices of the points in the subset, ascending.
    pub fn indices(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i)
            }
        })
    }
}

impl Ord for SubsetMask {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for SubsetMask {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Index notation, `{0,2}`; label-aware rendering lives on [`GroundSet`].
impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (n, i) in self.indices().enumerate() {
            if n > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("}")
    }
}

/// Sorts masks into canonical order and removes duplicates.
pub fn canonicalize(masks: &mut Vec<SubsetMask>) {
    masks.sort_unstable();
    masks.dedup();
}

/// An ordered list of distinct labels; label `i` is bit `i` of every mask.
#[derive(Clone, PartialEq, Eq)]
pub struct GroundSet {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl GroundSet {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::Malformed("ground set must have at least one element".into()));
        }
        if names.len() > SubsetMask::CAPACITY {
            return Err(Error::GroundTooLarge(names.len()));
        }
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::Malformed(format!("element {i} has an empty label")));
            }
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::Malformed(format!("duplicate element label {name:?}")));
            }
        }
        Ok(GroundSet { names, index })
    }

    /// Ground set labelled `x0, x1, …`.
    pub fn anonymous(size: usize) -> Result<Self> {
        Self::new((0..size).map(|i| format!("x{i}")))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn full(&self) -> SubsetMask {
        SubsetMask::full(self.len())
    }

    pub fn check(&self, mask: SubsetMask) -> Result<()> {
        if mask.is_subset_of(self.full()) {
            Ok(())
        } else {
            Err(Error::Malformed(format!(
                "{mask} uses points outside a ground set of {} elements",
                self.len()
            )))
        }
    }

    /// Builds a mask from labels. Unknown or repeated labels are rejected.
    pub fn mask_of<I, S>(&self, labels: I) -> Result<SubsetMask>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut mask = SubsetMask::EMPTY;
        for label in labels {
            let label = label.as_ref();
            let i = self
                .index_of(label)
                .ok_or_else(|| Error::Malformed(format!("unknown element label {label:?}")))?;
            if mask.contains(i) {
                return Err(Error::Malformed(format!("label {label:?} repeated within a set")));
            }
            mask = mask.union(SubsetMask::singleton(i));
        }
        Ok(mask)
    }

    /// Parses a canonical key (`"a,b"`, `""` for the empty set).
    pub fn parse_key(&self, key: &str) -> Result<SubsetMask> {
        if key.is_empty() {
            return Ok(SubsetMask::EMPTY);
        }
        self.mask_of(key.split(',').map(str::trim))
    }

    pub fn labels(&self, mask: SubsetMask) -> Vec<&str> {
        mask.indices().map(|i| self.name(i)).collect()
    }

    /// Labels in ground order joined by commas; the empty set is `""`.
    pub fn key(&self, mask: SubsetMask) -> String {
        self.labels(mask).join(",")
    }

    /// Human-readable form, `{a,b}` or `∅`.
    pub fn show(&self, mask: SubsetMask) -> String {
        if mask.is_empty() {
            "∅".to_string()
        } else {
            format!("{{{}}}", self.key(mask))
        }
    }
}

impl fmt::Debug for GroundSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.names).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order_is_popcount_then_value() {
        let mut v = vec![
            SubsetMask::from_bits(0b100),
            SubsetMask::from_bits(0b011),
            SubsetMask::from_bits(0b001),
            SubsetMask::EMPTY,
            SubsetMask::from_bits(0b010),
            SubsetMask::from_bits(0b001),
        ];
        canonicalize(&mut v);
        let bits: Vec<u64> = v.iter().map(|m| m.bits()).collect();
        assert_eq!(bits, vec![0, 0b001, 0b010, 0b100, 0b011]);
    }

    #[test]
    fn full_mask_at_capacity() {
        assert_eq!(SubsetMask::full(64).bits(), u64::MAX);
        assert_eq!(SubsetMask::full(3).bits(), 0b111);
        assert_eq!(SubsetMask::full(0), SubsetMask::EMPTY);
    }

    #[test]
    fn ground_set_rejects_bad_labels() {
        assert!(GroundSet::new(["a", "a"]).is_err());
        assert!(GroundSet::new([""]).is_err());
        assert!(GroundSet::new(Vec::<String>::new()).is_err());
        assert_eq!(GroundSet::anonymous(65).unwrap_err(), Error::GroundTooLarge(65));
        assert!(GroundSet::anonymous(64).is_ok());
    }

    #[test]
    fn keys_round_trip() {
        let g = GroundSet::new(["a", "b", "c"]).unwrap();
        let m = g.mask_of(["c", "a"]).unwrap();
        assert_eq!(g.key(m), "a,c");
        assert_eq!(g.parse_key("a,c").unwrap(), m);
        assert_eq!(g.parse_key("").unwrap(), SubsetMask::EMPTY);
        assert_eq!(g.show(SubsetMask::EMPTY), "∅");
        assert!(g.mask_of(["z"]).is_err());
        assert!(g.mask_of(["a", "a"]).is_err());
        assert!(g.check(SubsetMask::from_bits(0b1000)).is_err());
    }
}
