//! Exact axis-aligned box geometry over rational coordinates.
//!
//! Every norm in this crate is a weighted supremum norm on each finite
//! coordinate slice, so its balls restricted to a slice are boxes. Unions of
//! such boxes are the finite-open sets we reason about, and containment of a
//! box in a union of boxes is decided exactly by recursive subdivision.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;
use crate::vectorspace::{FinVector, Index, IndexSet};

/// A closed interval `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: Scalar,
    pub hi: Scalar,
}

impl Interval {
    /// Panics if `lo > hi`.
    pub fn new(lo: Scalar, hi: Scalar) -> Self {
        assert!(lo <= hi, "interval lower bound above upper bound");
        Interval { lo, hi }
    }

    /// `[c - h, c + h]` for `h ≥ 0`.
    pub fn centered(c: &Scalar, half_width: &Scalar) -> Self {
        Interval::new(c - half_width, c + half_width)
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        &self.lo <= x && x <= &self.hi
    }
}

/// A product of closed intervals over a finite index set. Coordinates off the
/// index set are pinned to zero (the box lives in `V_J`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Box {
    sides: BTreeMap<Index, Interval>,
}

impl Box {
    pub fn new(sides: BTreeMap<Index, Interval>) -> Self {
        Box { sides }
    }

    pub fn slice(&self) -> IndexSet {
        self.sides.keys().copied().collect()
    }

    pub fn side(&self, k: Index) -> Option<&Interval> {
        self.sides.get(&k)
    }

    pub fn sides(&self) -> impl Iterator<Item = (Index, &Interval)> + '_ {
        self.sides.iter().map(|(k, v)| (*k, v))
    }

    pub fn dim(&self) -> usize {
        self.sides.len()
    }

    pub fn contains(&self, p: &FinVector) -> bool {
        p.iter().all(|(k, _)| self.sides.contains_key(&k)) && self.sides.iter().all(|(k, iv)| iv.contains(&p.coord(*k)))
    }

    /// All `2^dim` corners, in binary-counting order over the sorted indices.
    pub fn vertices(&self) -> Vec<FinVector> {
        let sides: Vec<(Index, &Interval)> = self.sides().collect();
        let n = sides.len();
        assert!(n < 32, "vertex enumeration over {n} dimensions");
        (0u64..(1u64 << n))
            .map(|mask| {
                FinVector::from_coords(sides.iter().enumerate().map(|(bit, (k, iv))| {
                    let v = if mask >> bit & 1 == 1 { &iv.hi } else { &iv.lo };
                    (*k, v.clone())
                }))
            })
            .collect()
    }

    pub fn as_cell(&self) -> Cell {
        Cell { sides: self.sides.iter().map(|(k, iv)| (*k, Span::closed(iv.lo.clone(), iv.hi.clone()))).collect() }
    }
}

/// One end of a [`Span`]; `closed` says whether the value itself is included.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Endpoint {
    pub value: Scalar,
    pub closed: bool,
}

/// An interval whose ends may independently be open or closed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Span {
    pub lo: Endpoint,
    pub hi: Endpoint,
}

impl Span {
    pub fn closed(lo: Scalar, hi: Scalar) -> Self {
        Span { lo: Endpoint { value: lo, closed: true }, hi: Endpoint { value: hi, closed: true } }
    }

    pub fn open(lo: Scalar, hi: Scalar) -> Self {
        Span { lo: Endpoint { value: lo, closed: false }, hi: Endpoint { value: hi, closed: false } }
    }

    pub fn with_closure(lo: Scalar, hi: Scalar, closed: bool) -> Self {
        if closed {
            Span::closed(lo, hi)
        } else {
            Span::open(lo, hi)
        }
    }

    pub fn is_empty(&self) -> bool {
        match self.lo.value.cmp(&self.hi.value) {
            std::cmp::Ordering::Less => false,
            std::cmp::Ordering::Equal => !(self.lo.closed && self.hi.closed),
            std::cmp::Ordering::Greater => true,
        }
    }

    pub fn contains_value(&self, x: &Scalar) -> bool {
        let above = if self.lo.closed { &self.lo.value <= x } else { &self.lo.value < x };
        let below = if self.hi.closed { x <= &self.hi.value } else { x < &self.hi.value };
        above && below
    }

    /// Whether `other ⊆ self`; `other` must be nonempty.
    fn covers(&self, other: &Span) -> bool {
        let lo_ok = match self.lo.value.cmp(&other.lo.value) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Equal => self.lo.closed || !other.lo.closed,
            std::cmp::Ordering::Greater => false,
        };
        let hi_ok = match self.hi.value.cmp(&other.hi.value) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Equal => self.hi.closed || !other.hi.closed,
            std::cmp::Ordering::Less => false,
        };
        lo_ok && hi_ok
    }

    fn intersects(&self, other: &Span) -> bool {
        let lo = match self.lo.value.cmp(&other.lo.value) {
            std::cmp::Ordering::Greater => self.lo.clone(),
            std::cmp::Ordering::Less => other.lo.clone(),
            std::cmp::Ordering::Equal => {
                Endpoint { value: self.lo.value.clone(), closed: self.lo.closed && other.lo.closed }
            }
        };
        let hi = match self.hi.value.cmp(&other.hi.value) {
            std::cmp::Ordering::Less => self.hi.clone(),
            std::cmp::Ordering::Greater => other.hi.clone(),
            std::cmp::Ordering::Equal => {
                Endpoint { value: self.hi.value.clone(), closed: self.hi.closed && other.hi.closed }
            }
        };
        !Span { lo, hi }.is_empty()
    }

    /// A point of a nonempty span, preferring closed endpoints.
    fn representative(&self) -> Scalar {
        if self.lo.closed {
            self.lo.value.clone()
        } else if self.hi.closed {
            self.hi.value.clone()
        } else {
            self.lo.value.midpoint(&self.hi.value)
        }
    }

    /// Splits `self` at a cutting endpoint of `piece`, if one lies inside.
    /// Both halves are nonempty whenever a split is returned.
    fn split_against(&self, piece: &Span) -> Option<(Span, Span)> {
        // Part of `self` lies below `piece.lo`.
        let below = match self.lo.value.cmp(&piece.lo.value) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Equal => self.lo.closed && !piece.lo.closed,
            std::cmp::Ordering::Greater => false,
        };
        if below && piece.lo.value <= self.hi.value {
            let v = piece.lo.value.clone();
            // piece.lo closed: (.., v) | [v, ..); open: (.., v] | (v, ..)
            let left = Span { lo: self.lo.clone(), hi: Endpoint { value: v.clone(), closed: !piece.lo.closed } };
            let right = Span { lo: Endpoint { value: v, closed: piece.lo.closed }, hi: self.hi.clone() };
            if !left.is_empty() && !right.is_empty() {
                return Some((left, right));
            }
        }
        let above = match self.hi.value.cmp(&piece.hi.value) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Equal => self.hi.closed && !piece.hi.closed,
            std::cmp::Ordering::Less => false,
        };
        if above && piece.hi.value >= self.lo.value {
            let v = piece.hi.value.clone();
            let left = Span { lo: self.lo.clone(), hi: Endpoint { value: v.clone(), closed: piece.hi.closed } };
            let right = Span { lo: Endpoint { value: v, closed: !piece.hi.closed }, hi: self.hi.clone() };
            if !left.is_empty() && !right.is_empty() {
                return Some((left, right));
            }
        }
        None
    }
}

/// A product of [`Span`]s over a finite index set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    sides: BTreeMap<Index, Span>,
}

impl Cell {
    pub fn new(sides: BTreeMap<Index, Span>) -> Self {
        Cell { sides }
    }

    pub fn slice(&self) -> IndexSet {
        self.sides.keys().copied().collect()
    }

    pub fn side(&self, k: Index) -> Option<&Span> {
        self.sides.get(&k)
    }

    pub fn is_empty(&self) -> bool {
        self.sides.values().any(Span::is_empty)
    }

    pub fn contains(&self, p: &FinVector) -> bool {
        p.iter().all(|(k, _)| self.sides.contains_key(&k))
            && self.sides.iter().all(|(k, s)| s.contains_value(&p.coord(*k)))
    }

    fn covers(&self, other: &Cell) -> bool {
        other.sides.iter().all(|(k, s)| match self.sides.get(k) {
            Some(mine) => mine.covers(s),
            None => false,
        })
    }

    fn intersects(&self, other: &Cell) -> bool {
        other.sides.iter().all(|(k, s)| match self.sides.get(k) {
            Some(mine) => mine.intersects(s),
            None => false,
        })
    }

    fn representative(&self) -> FinVector {
        FinVector::from_coords(self.sides.iter().map(|(k, s)| (*k, s.representative())))
    }

    fn split_against(&self, piece: &Cell) -> Option<(Cell, Cell)> {
        for (k, s) in &self.sides {
            let p = piece.sides.get(k)?;
            if let Some((a, b)) = s.split_against(p) {
                let mut left = self.sides.clone();
                left.insert(*k, a);
                let mut right = self.sides.clone();
                right.insert(*k, b);
                return Some((Cell { sides: left }, Cell { sides: right }));
            }
        }
        None
    }
}

/// Finds a point of `region` outside every cell in `pieces`, or `None` when
/// `region` is covered by their union. All cells must share `region`'s index
/// set.
pub fn find_uncovered(region: &Cell, pieces: &[Cell]) -> Option<FinVector> {
    let relevant: Vec<&Cell> = pieces.iter().collect();
    uncovered_in(region, &relevant)
}

fn uncovered_in(region: &Cell, pieces: &[&Cell]) -> Option<FinVector> {
    if region.is_empty() {
        return None;
    }
    let relevant: Vec<&Cell> = pieces.iter().copied().filter(|p| p.intersects(region)).collect();
    if relevant.is_empty() {
        return Some(region.representative());
    }
    if relevant.iter().any(|p| p.covers(region)) {
        return None;
    }
    for p in &relevant {
        if let Some((a, b)) = region.split_against(p) {
            return uncovered_in(&a, &relevant).or_else(|| uncovered_in(&b, &relevant));
        }
    }
    // An intersecting piece that does not cover the region always cuts it.
    unreachable!("no split found for a partially covered region")
}

/// Whether `region ⊆ ∪ pieces`.
pub fn is_covered(region: &Cell, pieces: &[Cell]) -> bool {
    find_uncovered(region, pieces).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::new(n, d)
    }

    fn cell(sides: &[(Index, Span)]) -> Cell {
        Cell::new(sides.iter().cloned().collect())
    }

    #[test]
    fn two_halves_cover_closed_square() {
        // [0,2]² covered by [0,1]×[0,2] and (1/2, 2]×[0,2]
        let region = cell(&[(0, Span::closed(q(0, 1), q(2, 1))), (1, Span::closed(q(0, 1), q(2, 1)))]);
        let a = cell(&[(0, Span::closed(q(0, 1), q(1, 1))), (1, Span::closed(q(0, 1), q(2, 1)))]);
        let mut b_side = Span::closed(q(1, 2), q(2, 1));
        b_side.lo.closed = false;
        let b = cell(&[(0, b_side), (1, Span::closed(q(0, 1), q(2, 1)))]);
        assert!(is_covered(&region, &[a.clone(), b]));
        assert!(!is_covered(&region, &[a]));
    }

    #[test]
    fn open_pieces_miss_the_seam() {
        // [0,2] covered by (−1,1) and (1,3) misses exactly the point 1
        let region = cell(&[(0, Span::closed(q(0, 1), q(2, 1)))]);
        let a = cell(&[(0, Span::open(q(-1, 1), q(1, 1)))]);
        let b = cell(&[(0, Span::open(q(1, 1), q(3, 1)))]);
        let hole = find_uncovered(&region, &[a, b]).expect("seam is uncovered");
        assert_eq!(hole.coord(0), q(1, 1));
    }

    #[test]
    fn witness_lies_in_region_and_outside_pieces() {
        let region = cell(&[(0, Span::open(q(-3, 1), q(3, 1))), (2, Span::closed(q(0, 1), q(1, 1)))]);
        let pieces = vec![
            cell(&[(0, Span::open(q(-4, 1), q(0, 1))), (2, Span::open(q(-1, 1), q(2, 1)))]),
            cell(&[(0, Span::closed(q(0, 1), q(2, 1))), (2, Span::closed(q(0, 1), q(1, 2)))]),
        ];
        let w = find_uncovered(&region, &pieces).unwrap();
        assert!(region.contains(&w));
        assert!(pieces.iter().all(|p| !p.contains(&w)));
    }

    #[test]
    fn empty_region_is_vacuously_covered() {
        let region = cell(&[(0, Span::open(q(1, 1), q(1, 1)))]);
        assert!(is_covered(&region, &[]));
    }

    #[test]
    fn box_vertices() {
        let b = Box::new(
            [(0, Interval::new(q(-1, 1), q(1, 1))), (3, Interval::new(q(0, 1), q(1, 2)))].into_iter().collect(),
        );
        let vs = b.vertices();
        assert_eq!(vs.len(), 4);
        assert!(vs.iter().all(|v| b.contains(v)));
        assert!(!b.contains(&FinVector::basis(1)));
    }
}
