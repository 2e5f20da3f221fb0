use std::cmp::Ordering;
use std::fmt;

use smallvec::SmallVec;

/// A symmetric multi-index `J = (j_1 <= ... <= j_k)` with entries in `1..=n`.
///
/// Entries are always kept nondecreasing; [`MultiIndex::with`] is the only way
/// to grow an index, and it re-sorts. Ordering is by length first, then
/// lexicographic, which is the jet-coordinate order used everywhere else.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MultiIndex(SmallVec<[u8; 8]>);

impl MultiIndex {
    pub fn empty() -> Self {
        MultiIndex(SmallVec::new())
    }

    /// Builds a canonical index from entries in any order.
    pub fn new(entries: impl IntoIterator<Item = u8>) -> Self {
        let mut v: SmallVec<[u8; 8]> = entries.into_iter().collect();
        v.sort_unstable();
        MultiIndex(v)
    }

    /// `J ∪ {i}` (append-and-sort).
    pub fn with(&self, i: u8) -> Self {
        let mut v = self.0.clone();
        let pos = v.partition_point(|&e| e <= i);
        v.insert(pos, i);
        MultiIndex(v)
    }

    /// `J ∪ K`.
    pub fn union(&self, other: &MultiIndex) -> Self {
        MultiIndex::new(self.0.iter().chain(other.0.iter()).copied())
    }

    /// Removes one occurrence of `i`, if present.
    pub fn without(&self, i: u8) -> Option<Self> {
        let pos = self.0.iter().position(|&e| e == i)?;
        let mut v = self.0.clone();
        v.remove(pos);
        Some(MultiIndex(v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[u8] {
        &self.0
    }

    /// Distinct values of the index, ascending.
    pub fn distinct(&self) -> impl Iterator<Item = u8> + '_ {
        self.0.iter().enumerate().filter(|(k, &e)| *k == 0 || self.0[k - 1] != e).map(|(_, &e)| e)
    }

    /// Multiplicity of `value` in the index.
    pub fn multiplicity(&self, value: u8) -> usize {
        self.0.iter().filter(|&&e| e == value).count()
    }

    /// `N(J)`: the number of distinct rearrangements of `J`,
    /// `k! / prod_v mult(v)!`.
    pub fn count(&self) -> u64 {
        let k = self.0.len() as u64;
        let mut num: u64 = 1;
        // multinomial built incrementally to keep intermediates small
        let mut placed: u64 = 0;
        for v in self.distinct() {
            let mult = self.multiplicity(v) as u64;
            for t in 1..=mult {
                placed += 1;
                num = num * placed / t;
            }
        }
        debug_assert_eq!(placed, k);
        num
    }

    /// All canonical indices of length `k` over `1..=n`, ascending.
    pub fn all_of_len(n: u8, k: usize) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut cur: SmallVec<[u8; 8]> = SmallVec::new();
        fn rec(n: u8, k: usize, start: u8, cur: &mut SmallVec<[u8; 8]>, out: &mut Vec<MultiIndex>) {
            if cur.len() == k {
                out.push(MultiIndex(cur.clone()));
                return;
            }
            for v in start..=n {
                cur.push(v);
                rec(n, k, v, cur, out);
                cur.pop();
            }
        }
        rec(n, k, 1, &mut cur, &mut out);
        out
    }

    /// All canonical indices with `lo <= len <= hi`.
    pub fn all_between(n: u8, lo: usize, hi: usize) -> Vec<MultiIndex> {
        (lo..=hi).flat_map(|k| Self::all_of_len(n, k)).collect()
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.as_slice().cmp(other.0.as_slice()))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

/// Total count of multinomial weight, exposed as a free function for callers
/// that only hold a slice.
pub fn multiindex_count(j: &MultiIndex) -> u64 {
    j.count()
}
