//! Finitely supported coordinate vectors over a countable basis, finite index
//! sets spanning coordinate slices, and flags of nested slices.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::scalar::Scalar;

/// A basis index `k`, identifying the basis vector `e_k`.
pub type Index = u64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VectorSpaceError {
    #[error("index {0} appears twice")]
    DuplicateIndex(Index),
    #[error("flag index {0} is already in the flag's base")]
    FlagOverlap(Index),
    #[error("flag index {0} is added twice")]
    DuplicateFlagIndex(Index),
}

/// A finite, sorted, duplicate-free set of basis indices.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexSet(BTreeSet<Index>);

impl IndexSet {
    pub fn empty() -> Self {
        IndexSet(BTreeSet::new())
    }

    /// Builds a set, silently merging duplicates.
    pub fn from_indices<I: IntoIterator<Item = Index>>(indices: I) -> Self {
        IndexSet(indices.into_iter().collect())
    }

    /// Builds a set, rejecting duplicates.
    pub fn try_from_list(indices: &[Index]) -> Result<Self, VectorSpaceError> {
        let mut set = BTreeSet::new();
        for &k in indices {
            if !set.insert(k) {
                return Err(VectorSpaceError::DuplicateIndex(k));
            }
        }
        Ok(IndexSet(set))
    }

    /// `{0, 1, …, n-1}`.
    pub fn range(n: Index) -> Self {
        IndexSet((0..n).collect())
    }

    pub fn contains(&self, k: Index) -> bool {
        self.0.contains(&k)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Index> + '_ {
        self.0.iter().copied()
    }

    pub fn union(&self, other: &IndexSet) -> IndexSet {
        IndexSet(self.0.union(&other.0).copied().collect())
    }

    pub fn intersection(&self, other: &IndexSet) -> IndexSet {
        IndexSet(self.0.intersection(&other.0).copied().collect())
    }

    pub fn difference(&self, other: &IndexSet) -> IndexSet {
        IndexSet(self.0.difference(&other.0).copied().collect())
    }

    pub fn with(&self, k: Index) -> IndexSet {
        let mut s = self.0.clone();
        s.insert(k);
        IndexSet(s)
    }

    pub fn is_subset(&self, other: &IndexSet) -> bool {
        self.0.is_subset(&other.0)
    }

    /// First element of `self` missing from `other`, if any.
    pub fn first_outside(&self, other: &IndexSet) -> Option<Index> {
        self.0.iter().copied().find(|k| !other.contains(*k))
    }

    pub fn to_vec(&self) -> Vec<Index> {
        self.0.iter().copied().collect()
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

impl FromIterator<Index> for IndexSet {
    fn from_iter<T: IntoIterator<Item = Index>>(iter: T) -> Self {
        IndexSet::from_indices(iter)
    }
}

impl Serialize for IndexSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.0.iter())
    }
}

impl<'de> Deserialize<'de> for IndexSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v = Vec::<Index>::deserialize(deserializer)?;
        IndexSet::try_from_list(&v).map_err(serde::de::Error::custom)
    }
}

/// A finitely supported vector `x = Σ x_k e_k` with exact coordinates.
///
/// Zero coordinates are never stored, so the key set is exactly the support.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct FinVector {
    coords: BTreeMap<Index, Scalar>,
}

impl FinVector {
    pub fn zero() -> Self {
        FinVector::default()
    }

    /// The basis vector `e_k`.
    pub fn basis(k: Index) -> Self {
        Self::scaled_basis(k, Scalar::one())
    }

    /// `a·e_k`.
    pub fn scaled_basis(k: Index, a: Scalar) -> Self {
        Self::from_coords([(k, a)])
    }

    /// Builds a vector from `(index, value)` pairs; zeros are dropped and
    /// repeated indices are summed.
    pub fn from_coords<I: IntoIterator<Item = (Index, Scalar)>>(pairs: I) -> Self {
        let mut coords: BTreeMap<Index, Scalar> = BTreeMap::new();
        for (k, v) in pairs {
            let slot = coords.entry(k).or_insert_with(Scalar::zero);
            *slot = &*slot + &v;
        }
        coords.retain(|_, v| !v.is_zero());
        FinVector { coords }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    /// The coordinate `x_k` (zero off the support).
    pub fn coord(&self, k: Index) -> Scalar {
        self.coords.get(&k).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn get(&self, k: Index) -> Option<&Scalar> {
        self.coords.get(&k)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Index, &Scalar)> + '_ {
        self.coords.iter().map(|(k, v)| (*k, v))
    }

    pub fn support_len(&self) -> usize {
        self.coords.len()
    }

    /// `supp(x)`: the indices of nonzero coordinates.
    pub fn support(&self) -> IndexSet {
        self.coords.keys().copied().collect()
    }

    pub fn is_supported_in(&self, slice: &IndexSet) -> bool {
        self.coords.keys().all(|k| slice.contains(*k))
    }

    /// `a·u + b·w`.
    pub fn combine(a: &Scalar, u: &FinVector, b: &Scalar, w: &FinVector) -> FinVector {
        let mut coords = BTreeMap::new();
        for (k, x) in &u.coords {
            coords.insert(*k, a * x);
        }
        for (k, x) in &w.coords {
            let term = b * x;
            match coords.get_mut(k) {
                Some(slot) => *slot = &*slot + &term,
                None => {
                    coords.insert(*k, term);
                }
            }
        }
        coords.retain(|_, v| !v.is_zero());
        FinVector { coords }
    }

    /// Projection onto `V_J` along the basis: keeps coordinates indexed in `J`.
    pub fn restrict(&self, slice: &IndexSet) -> FinVector {
        FinVector {
            coords: self.coords.iter().filter(|(k, _)| slice.contains(**k)).map(|(k, v)| (*k, v.clone())).collect(),
        }
    }

    pub fn scale(&self, a: &Scalar) -> FinVector {
        if a.is_zero() {
            return FinVector::zero();
        }
        FinVector { coords: self.coords.iter().map(|(k, v)| (*k, a * v)).collect() }
    }

    pub fn add(&self, other: &FinVector) -> FinVector {
        Self::combine(&Scalar::one(), self, &Scalar::one(), other)
    }

    pub fn sub(&self, other: &FinVector) -> FinVector {
        Self::combine(&Scalar::one(), self, &-Scalar::one(), other)
    }
}

impl fmt::Debug for FinVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.coords.iter()).finish()
    }
}

impl Serialize for FinVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_map(self.coords.iter().map(|(k, v)| (k.to_string(), v)))
    }
}

impl<'de> Deserialize<'de> for FinVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = BTreeMap::<String, Scalar>::deserialize(deserializer)?;
        let mut pairs = Vec::with_capacity(raw.len());
        for (k, v) in raw {
            let idx = k.parse::<Index>().map_err(|_| serde::de::Error::custom(format!("bad basis index `{k}`")))?;
            pairs.push((idx, v));
        }
        Ok(FinVector::from_coords(pairs))
    }
}

/// A flag `F₀ ⊂ F₁ ⊂ …` where `F₀` is spanned by `base` and `F_n` adds the
/// first `n` entries of `added`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Flag {
    base: IndexSet,
    added: Vec<Index>,
}

#[derive(Deserialize)]
struct RawFlag {
    base: IndexSet,
    added: Vec<Index>,
}

impl Flag {
    pub fn new(base: IndexSet, added: Vec<Index>) -> Result<Self, VectorSpaceError> {
        let mut seen = BTreeSet::new();
        for &k in &added {
            if base.contains(k) {
                return Err(VectorSpaceError::FlagOverlap(k));
            }
            if !seen.insert(k) {
                return Err(VectorSpaceError::DuplicateFlagIndex(k));
            }
        }
        Ok(Flag { base, added })
    }

    /// The flag `{0} ⊂ {0,1} ⊂ … ⊂ {0,…,n}`.
    pub fn standard(n: Index) -> Self {
        Flag { base: IndexSet::range(1), added: (1..=n).collect() }
    }

    pub fn base(&self) -> &IndexSet {
        &self.base
    }

    pub fn added(&self) -> &[Index] {
        &self.added
    }

    /// Number of added indices.
    pub fn depth(&self) -> usize {
        self.added.len()
    }

    /// The index set spanning `F_n`. `n` is clamped to the flag depth.
    pub fn slice(&self, n: usize) -> IndexSet {
        let n = n.min(self.added.len());
        self.base.union(&self.added[..n].iter().copied().collect())
    }

    /// The index set spanning the largest member of the flag.
    pub fn domain(&self) -> IndexSet {
        self.slice(self.added.len())
    }

    /// The smallest `n` with `slice ⊆ F_n`, if any.
    pub fn level_of(&self, slice: &IndexSet) -> Option<usize> {
        (0..=self.depth()).find(|&n| slice.is_subset(&self.slice(n)))
    }

    /// The same chain viewed from `F_n`: base `F_n`, remaining indices added.
    pub fn rebased(&self, n: usize) -> Flag {
        let n = n.min(self.added.len());
        Flag { base: self.slice(n), added: self.added[n..].to_vec() }
    }

    /// The first `n` steps of the chain.
    pub fn truncated(&self, n: usize) -> Flag {
        Flag { base: self.base.clone(), added: self.added[..n.min(self.added.len())].to_vec() }
    }

    /// Appends one index.
    pub fn extended(&self, k: Index) -> Result<Flag, VectorSpaceError> {
        let mut added = self.added.clone();
        added.push(k);
        Flag::new(self.base.clone(), added)
    }
}

impl<'de> Deserialize<'de> for Flag {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawFlag::deserialize(deserializer)?;
        Flag::new(raw.base, raw.added).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::new(n, d)
    }

    #[test]
    fn support_examples() {
        assert!(FinVector::zero().support().is_empty());
        assert_eq!(FinVector::basis(3).support().to_vec(), vec![3]);
        let v = FinVector::from_coords([(0, q(2, 1)), (5, q(-1, 1))]);
        assert_eq!(v.support().to_vec(), vec![0, 5]);
    }

    #[test]
    fn combine_examples() {
        let one = Scalar::one();
        let e0 = FinVector::basis(0);
        assert_eq!(FinVector::combine(&one, &e0, &one, &e0), FinVector::scaled_basis(0, q(2, 1)));
        let cancel = FinVector::combine(&one, &e0, &-one.clone(), &e0);
        assert!(cancel.is_zero());
        assert!(cancel.support().is_empty());
        let u = FinVector::from_coords([(1, one.clone()), (2, one.clone())]);
        let w = FinVector::basis(2);
        assert_eq!(
            FinVector::combine(&q(2, 1), &u, &q(3, 1), &w),
            FinVector::from_coords([(1, q(2, 1)), (2, q(5, 1))])
        );
    }

    #[test]
    fn restrict_examples() {
        let v = FinVector::from_coords([(0, Scalar::one()), (1, Scalar::one())]);
        assert_eq!(v.restrict(&IndexSet::from_indices([0])), FinVector::basis(0));
        assert_eq!(v.restrict(&v.support()), v);
        assert!(v.restrict(&IndexSet::from_indices([7])).is_zero());
    }

    #[test]
    fn json_shape() {
        let v = FinVector::from_coords([(0, q(2, 1)), (5, q(-1, 1))]);
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"{"0":"2/1","5":"-1/1"}"#);
        let back: FinVector = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
        let dropped: FinVector = serde_json::from_str(r#"{"3":"0/7"}"#).unwrap();
        assert!(dropped.is_zero());
        assert!(serde_json::from_str::<FinVector>(r#"{"x":"1/1"}"#).is_err());
    }

    #[test]
    fn flag_validation() {
        let base = IndexSet::from_indices([0]);
        assert_eq!(Flag::new(base.clone(), vec![0]), Err(VectorSpaceError::FlagOverlap(0)));
        assert_eq!(Flag::new(base.clone(), vec![1, 1]), Err(VectorSpaceError::DuplicateFlagIndex(1)));
        let f = Flag::new(base, vec![4, 2]).unwrap();
        assert_eq!(f.slice(1).to_vec(), vec![0, 4]);
        assert_eq!(f.domain().to_vec(), vec![0, 2, 4]);
        assert_eq!(f.level_of(&IndexSet::from_indices([2])), Some(2));
        assert_eq!(f.rebased(1).base().to_vec(), vec![0, 4]);
        assert_eq!(f.rebased(1).added(), &[2]);
        assert!(serde_json::from_str::<Flag>(r#"{"base":[0],"added":[0]}"#).is_err());
        assert!(serde_json::from_str::<IndexSet>("[1,1]").is_err());
    }

    fn arb_vector() -> impl Strategy<Value = FinVector> {
        proptest::collection::vec((0u64..8, -20i64..20, 1i64..9), 0..6)
            .prop_map(|v| FinVector::from_coords(v.into_iter().map(|(k, n, d)| (k, Scalar::new(n, d)))))
    }

    proptest! {
        #[test]
        fn combine_support_within_union(v in arb_vector(), w in arb_vector(), a in -5i64..5, b in -5i64..5) {
            let c = FinVector::combine(&Scalar::from(a), &v, &Scalar::from(b), &w);
            prop_assert!(c.support().is_subset(&v.support().union(&w.support())));
        }

        #[test]
        fn restrict_idempotent(v in arb_vector(), idx in proptest::collection::vec(0u64..8, 0..5)) {
            let j = IndexSet::from_indices(idx);
            let once = v.restrict(&j);
            prop_assert_eq!(once.restrict(&j), once);
        }

        #[test]
        fn self_cancellation(v in arb_vector()) {
            let c = FinVector::combine(&Scalar::one(), &v, &-Scalar::one(), &v);
            prop_assert!(c.support().is_empty());
        }
    }
}
