//! Fixed-universe vertex sets backed by 64-bit words.

use std::fmt;

pub(crate) const WORD: usize = 64;

#[inline]
pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(WORD)
}

/// A subset of `0..universe`, with its cardinality cached.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    universe: usize,
    words: Vec<u64>,
    len: usize,
}

impl VertexSet {
    pub fn new(universe: usize) -> Self {
        VertexSet {
            universe,
            words: vec![0; words_for(universe)],
            len: 0,
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut words = vec![u64::MAX; words_for(universe)];
        if let Some(last) = words.last_mut() {
            let rem = universe % WORD;
            if rem != 0 {
                *last = (1u64 << rem) - 1;
            }
        }
        VertexSet {
            universe,
            words,
            len: universe,
        }
    }

    pub fn singleton(universe: usize, v: usize) -> Self {
        let mut s = VertexSet::new(universe);
        s.insert(v);
        s
    }

    pub fn from_vertices<I: IntoIterator<Item = usize>>(universe: usize, vertices: I) -> Self {
        let mut s = VertexSet::new(universe);
        for v in vertices {
            s.insert(v);
        }
        s
    }

    /// Build from raw words; bits past `universe` are cleared.
    pub(crate) fn from_words(universe: usize, mut words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), words_for(universe));
        let rem = universe % WORD;
        if rem != 0 {
            if let Some(last) = words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
        let len = words.iter().map(|w| w.count_ones() as usize).sum();
        VertexSet {
            universe,
            words,
            len,
        }
    }

    #[inline]
    pub fn universe(&self) -> usize {
        self.universe
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        v < self.universe && self.words[v / WORD] >> (v % WORD) & 1 == 1
    }

    /// Returns true if `v` was newly inserted.
    pub fn insert(&mut self, v: usize) -> bool {
        assert!(v < self.universe, "vertex {v} outside universe {}", self.universe);
        let w = &mut self.words[v / WORD];
        let bit = 1u64 << (v % WORD);
        if *w & bit == 0 {
            *w |= bit;
            self.len += 1;
            true
        } else {
            false
        }
    }

    pub fn remove(&mut self, v: usize) -> bool {
        if v >= self.universe {
            return false;
        }
        let w = &mut self.words[v / WORD];
        let bit = 1u64 << (v % WORD);
        if *w & bit != 0 {
            *w &= !bit;
            self.len -= 1;
            true
        } else {
            false
        }
    }

    pub fn iter(&self) -> Iter<'_> {
        Iter {
            words: &self.words,
            index: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    /// The `k` smallest members.
    pub fn take_first(&self, k: usize) -> VertexSet {
        VertexSet::from_vertices(self.universe, self.iter().take(k))
    }

    /// Indices of words that hold at least one member.
    pub fn occupied_words(&self) -> Vec<usize> {
        self.words
            .iter()
            .enumerate()
            .filter_map(|(i, &w)| (w != 0).then_some(i))
            .collect()
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> VertexSet {
        VertexSet::from_words(self.universe, self.words.iter().map(|w| !w).collect())
    }

    pub fn intersection_len(&self, other: &VertexSet) -> usize {
        debug_assert_eq!(self.universe, other.universe);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
        self.recount();
    }

    pub fn difference_with(&mut self, other: &VertexSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
        self.recount();
    }

    fn zip_with(&self, other: &VertexSet, f: impl Fn(u64, u64) -> u64) -> VertexSet {
        assert_eq!(self.universe, other.universe, "universe mismatch");
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(&a, &b)| f(a, b))
            .collect();
        VertexSet::from_words(self.universe, words)
    }

    fn recount(&mut self) {
        self.len = self.words.iter().map(|w| w.count_ones() as usize).sum();
    }
}

/// Serialized as the sorted list of member ids.
impl serde::Serialize for VertexSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

pub struct Iter<'a> {
    words: &'a [u64],
    index: usize,
    current: u64,
}

impl Iterator for Iter<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.index * WORD + bit);
            }
            self.index += 1;
            if self.index >= self.words.len() {
                return None;
            }
            self.current = self.words[self.index];
        }
    }
}

impl<'a> IntoIterator for &'a VertexSet {
    type Item = usize;
    type IntoIter = Iter<'a>;

    fn into_iter(self) -> Iter<'a> {
        self.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn full_set_masks_tail() {
        let s = VertexSet::full(70);
        assert_eq!(s.len(), 70);
        assert_eq!(s.complement().len(), 0);
        assert_eq!(s.iter().last(), Some(69));
    }

    #[test]
    fn insert_remove_counts() {
        let mut s = VertexSet::new(130);
        assert!(s.insert(129));
        assert!(!s.insert(129));
        assert!(s.insert(0));
        assert_eq!(s.to_vec(), vec![0, 129]);
        assert!(s.remove(0));
        assert!(!s.remove(0));
        assert_eq!(s.len(), 1);
        assert_eq!(s.occupied_words(), vec![2]);
    }

    proptest! {
        #[test]
        fn set_algebra_matches_btreeset(
            a in proptest::collection::btree_set(0usize..200, 0..60),
            b in proptest::collection::btree_set(0usize..200, 0..60),
        ) {
            let sa = VertexSet::from_vertices(200, a.iter().copied());
            let sb = VertexSet::from_vertices(200, b.iter().copied());
            let inter: Vec<_> = a.intersection(&b).copied().collect();
            let uni: Vec<_> = a.union(&b).copied().collect();
            let diff: Vec<_> = a.difference(&b).copied().collect();
            prop_assert_eq!(sa.intersection(&sb).to_vec(), inter.clone());
            prop_assert_eq!(sa.intersection_len(&sb), inter.len());
            prop_assert_eq!(sa.union(&sb).to_vec(), uni);
            prop_assert_eq!(sa.difference(&sb).to_vec(), diff);
            prop_assert_eq!(sa.complement().len(), 200 - a.len());
            prop_assert_eq!(sa.is_subset(&sb), a.is_subset(&b));
        }
    }
}
