use std::fmt;

use fixedbitset::FixedBitSet;

use super::GraphError;

/// Membership bitset over arc indices `0..m`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArcSet(FixedBitSet);

impl ArcSet {
    pub fn empty(m: usize) -> Self {
        ArcSet(FixedBitSet::with_capacity(m))
    }

    pub fn full(m: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(m);
        bits.insert_range(..);
        ArcSet(bits)
    }

    pub fn from_indices(m: usize, idx: impl IntoIterator<Item = usize>) -> Result<Self, GraphError> {
        let mut bits = FixedBitSet::with_capacity(m);
        for i in idx {
            if i >= m {
                return Err(GraphError::ArcOutOfRange { arc: i, m });
            }
            bits.insert(i);
        }
        Ok(ArcSet(bits))
    }

    /// Set whose members are `universe[k]` for every bit `k` of `mask`.
    pub fn from_mask(m: usize, universe: &[usize], mask: u64) -> Self {
        let mut bits = FixedBitSet::with_capacity(m);
        for (k, &a) in universe.iter().enumerate() {
            if mask >> k & 1 == 1 {
                bits.insert(a);
            }
        }
        ArcSet(bits)
    }

    /// Capacity (the instance arc count).
    pub fn universe(&self) -> usize {
        self.0.len()
    }

    /// Panics when `i` is out of range.
    pub fn insert(&mut self, i: usize) {
        self.0.insert(i);
    }

    pub fn remove(&mut self, i: usize) {
        self.0.set(i, false);
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.contains(i)
    }

    pub fn count(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.ones()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn union_with(&mut self, other: &ArcSet) {
        self.0.union_with(&other.0);
    }

    pub fn is_subset(&self, other: &ArcSet) -> bool {
        self.0.is_subset(&other.0)
    }
}

impl fmt::Debug for ArcSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|i| format!("a{}", i + 1))).finish()
    }
}

/// Integer vector over a sorted ground set of vertices (S, T or V).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntVecOnSet {
    ground: Vec<usize>,
    values: Vec<i64>,
}

impl IntVecOnSet {
    /// `ground` must be sorted and of the same length as `values`.
    pub fn new(ground: Vec<usize>, values: Vec<i64>) -> Self {
        assert_eq!(ground.len(), values.len(), "ground/values length mismatch");
        debug_assert!(ground.windows(2).all(|w| w[0] < w[1]), "ground set must be sorted");
        IntVecOnSet { ground, values }
    }

    pub fn zeros(ground: &[usize]) -> Self {
        IntVecOnSet { ground: ground.to_vec(), values: vec![0; ground.len()] }
    }

    /// χ_Y over `ground`. Members of `subset` outside the ground set are ignored.
    pub fn characteristic(ground: &[usize], subset: &[usize]) -> Self {
        let values = ground.iter().map(|v| i64::from(subset.contains(v))).collect();
        IntVecOnSet { ground: ground.to_vec(), values }
    }

    /// χ_X where X is given as a bitmask over ground positions.
    pub fn from_mask(ground: &[usize], mask: u64) -> Self {
        let values = (0..ground.len()).map(|k| (mask >> k & 1) as i64).collect();
        IntVecOnSet { ground: ground.to_vec(), values }
    }

    pub fn ground(&self) -> &[usize] {
        &self.ground
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.ground.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ground.is_empty()
    }

    fn pos(&self, v: usize) -> Option<usize> {
        self.ground.binary_search(&v).ok()
    }

    /// Value at vertex `v`; panics when `v` is outside the ground set.
    pub fn get(&self, v: usize) -> i64 {
        self.values[self.pos(v).expect("vertex outside ground set")]
    }

    pub fn try_get(&self, v: usize) -> Option<i64> {
        self.pos(v).map(|k| self.values[k])
    }

    pub fn set(&mut self, v: usize, x: i64) {
        let k = self.pos(v).expect("vertex outside ground set");
        self.values[k] = x;
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.ground.iter().copied().zip(self.values.iter().copied())
    }

    /// supp⁺: vertices with a positive entry.
    pub fn supp_pos(&self) -> Vec<usize> {
        self.iter().filter(|&(_, x)| x > 0).map(|(v, _)| v).collect()
    }

    /// supp⁻: vertices with a negative entry.
    pub fn supp_neg(&self) -> Vec<usize> {
        self.iter().filter(|&(_, x)| x < 0).map(|(v, _)| v).collect()
    }

    /// supp⁺ as a bitmask over ground positions.
    pub fn supp_pos_mask(&self) -> u64 {
        self.values.iter().enumerate().filter(|(_, &x)| x > 0).fold(0, |m, (k, _)| m | 1 << k)
    }

    pub fn negated(&self) -> Self {
        IntVecOnSet { ground: self.ground.clone(), values: self.values.iter().map(|x| -x).collect() }
    }

    /// Restriction to `sub`, which must be a subset of the ground set.
    pub fn restrict(&self, sub: &[usize]) -> Self {
        let values = sub.iter().map(|&v| self.get(v)).collect();
        IntVecOnSet { ground: sub.to_vec(), values }
    }

    pub fn dot(&self, other: &IntVecOnSet) -> Result<i64, GraphError> {
        if self.ground != other.ground {
            return Err(GraphError::GroundMismatch);
        }
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum())
    }
}

impl fmt::Debug for IntVecOnSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.iter()).finish()
    }
}
