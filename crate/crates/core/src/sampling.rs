//! Seeded generators for sample vectors, tables, norms and ordinals.
//!
//! Everything draws from a [`ChaCha8Rng`], so a seed fixes the output on
//! every platform.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domination::{FuncTable, WeightSchema};
use crate::norms::{NormError, NormExpr};
use crate::ordinals::CnfOrdinal;
use crate::scalar::Scalar;
use crate::topology::{BallCover, TopologyError};
use crate::vectorspace::{FinVector, Index, IndexSet};

pub const DEFAULT_DENOMINATOR_BOUND: u64 = 64;

/// Largest absolute value of a sampled coordinate.
pub const MAGNITUDE: i64 = 4;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A rational `p/q` with `1 ≤ q ≤ bound` and `|p/q| ≤ MAGNITUDE`.
pub fn scalar(rng: &mut impl Rng, bound: u64) -> Scalar {
    let q = rng.random_range(1..=bound.max(1)) as i64;
    let p = rng.random_range(-MAGNITUDE * q..=MAGNITUDE * q);
    Scalar::new(p, q)
}

fn nonzero_scalar(rng: &mut impl Rng, bound: u64) -> Scalar {
    loop {
        let s = scalar(rng, bound);
        if !s.is_zero() {
            return s;
        }
    }
}

/// A nonzero vector supported on a random nonempty subset of `slice`.
pub fn vector(rng: &mut impl Rng, slice: &IndexSet, bound: u64) -> FinVector {
    let indices = slice.to_vec();
    if indices.is_empty() {
        return FinVector::zero();
    }
    let size = rng.random_range(1..=indices.len());
    let mut chosen: Vec<Index> = sample(rng, indices.len(), size).into_iter().map(|i| indices[i]).collect();
    chosen.sort_unstable();
    FinVector::from_coords(chosen.into_iter().map(|k| (k, nonzero_scalar(rng, bound))))
}

pub fn vectors(seed: u64, slice: &IndexSet, count: usize, bound: u64) -> Vec<FinVector> {
    let mut r = rng(seed);
    (0..count).map(|_| vector(&mut r, slice, bound)).collect()
}

/// A point strictly inside a uniformly chosen ball of level `≤ depth`,
/// supported in that ball's level slice.
pub fn point_in_cover(
    rng: &mut impl Rng,
    cover: &BallCover,
    depth: usize,
    bound: u64,
) -> Result<Option<FinVector>, TopologyError> {
    let balls: Vec<(usize, _)> = cover.balls_up_to(depth).collect();
    if balls.is_empty() {
        return Ok(None);
    }
    let (level, ball) = balls[rng.random_range(0..balls.len())];
    let slice = cover.flag().slice(level);
    let weights = ball.norm.slice_weights(&slice)?;
    let q = rng.random_range(1..=bound.max(2)) as i64;
    let offset = FinVector::from_coords(weights.iter().map(|(k, w)| {
        // |s| < 1, so the offset stays strictly inside the box.
        let s = Scalar::new(rng.random_range(1 - q..q), q);
        (*k, &(&s * &ball.radius) / w)
    }));
    Ok(Some(ball.center.add(&offset)))
}

pub fn points_in_cover(
    seed: u64,
    cover: &BallCover,
    depth: usize,
    count: usize,
    bound: u64,
) -> Result<Vec<FinVector>, TopologyError> {
    let mut r = rng(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        match point_in_cover(&mut r, cover, depth, bound)? {
            Some(p) => out.push(p),
            None => break,
        }
    }
    Ok(out)
}

/// Entries uniform in `0..=max`. Panics on a zero dimension.
pub fn table(rng: &mut impl Rng, rows: usize, cols: usize, max: u64) -> FuncTable {
    FuncTable::new((0..rows).map(|_| (0..cols).map(|_| rng.random_range(0..=max)).collect()).collect())
        .expect("positive dimensions")
}

/// Diagonal norm with weights `p/q` (`1 ≤ p ≤ max_weight`, `q ≤ bound`) on
/// `0..dim` and default 1.
pub fn diagonal(rng: &mut impl Rng, dim: u64, max_weight: i64, bound: u64) -> Result<NormExpr, NormError> {
    NormExpr::weighted((0..dim).map(|k| {
        let q = rng.random_range(1..=bound.max(1)) as i64;
        (k, Scalar::new(rng.random_range(1..=max_weight * q), q))
    }))
}

pub fn schema(rng: &mut impl Rng, indices: usize, coords: usize, max: u64) -> WeightSchema {
    let cells: Vec<(usize, usize, u64)> = (0..indices)
        .flat_map(|i| (0..coords).map(move |k| (i, k)))
        .map(|(i, k)| (i, k, rng.random_range(0..=max)))
        .filter(|t| t.2 != 0)
        .collect();
    WeightSchema::new(indices, coords, cells).expect("cells in range")
}

/// An ordinal with at most `max_terms` terms, exponents `≤ max_exp` and
/// coefficients `≤ max_coeff`.
pub fn ordinal(rng: &mut impl Rng, max_exp: u64, max_terms: usize, max_coeff: u64) -> CnfOrdinal {
    let count = rng.random_range(0..=max_terms.min(max_exp as usize + 1));
    let mut exps: Vec<u64> = sample(rng, max_exp as usize + 1, count).into_iter().map(|e| e as u64).collect();
    exps.sort_unstable_by(|a, b| b.cmp(a));
    CnfOrdinal::new(exps.into_iter().map(|e| (e, rng.random_range(1..=max_coeff.max(1)))).collect())
        .expect("distinct sorted exponents")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{slice_membership, BallSpec};
    use crate::vectorspace::Flag;

    #[test]
    fn seeded_output_is_reproducible() {
        let s = IndexSet::range(5);
        assert_eq!(vectors(7, &s, 20, 64), vectors(7, &s, 20, 64));
        assert_ne!(vectors(7, &s, 20, 64), vectors(8, &s, 20, 64));
    }

    #[test]
    fn vectors_respect_bounds() {
        let s = IndexSet::from_indices([2, 5, 9]);
        for v in vectors(1, &s, 200, 8) {
            assert!(!v.is_zero());
            assert!(v.is_supported_in(&s));
            for (_, x) in v.iter() {
                assert!(x.abs() <= Scalar::from(MAGNITUDE));
                assert!(x.denom() <= 8.into());
            }
        }
    }

    #[test]
    fn cover_points_are_members() {
        let weights = NormExpr::weighted([(0, Scalar::from(3)), (2, Scalar::new(1, 2))]).unwrap();
        let mut levels = std::collections::BTreeMap::new();
        levels.insert(0, vec![BallSpec::new(FinVector::basis(0), Scalar::one(), weights.clone(), true).unwrap()]);
        levels.insert(2, vec![BallSpec::new(FinVector::basis(2), Scalar::new(1, 3), weights, true).unwrap()]);
        let cover = BallCover::new(Flag::standard(2), levels).unwrap();
        for p in points_in_cover(3, &cover, 2, 100, 16).unwrap() {
            assert!(slice_membership(&cover, &p, 2).unwrap());
        }
    }

    #[test]
    fn ordinals_are_valid() {
        let mut r = rng(0);
        for _ in 0..100 {
            let a = ordinal(&mut r, 3, 3, 20);
            assert!(a.terms().len() <= 3);
            assert!(a.degree() <= 3);
        }
    }
}
