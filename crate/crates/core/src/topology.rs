//! Open sets as finite unions of norm balls on the slices of a flag, norm
//! extension with certified margins, the opening-norm builder, and the
//! disjoint-balls counterexample.
//!
//! All balls here are boxes on every finite slice, so containment questions
//! reduce to exact box subdivision (see [`crate::geometry`]).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domination::{equivalence_constant, DominationError};
use crate::geometry::{self, Cell, Span};
use crate::norms::{ball_box, NormError, NormExpr, NormKind};
use crate::par;
use crate::scalar::Scalar;
use crate::vectorspace::{FinVector, Flag, Index, IndexSet, VectorSpaceError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TopologyError {
    #[error("radius must be positive, got {0}")]
    NonPositiveRadius(Scalar),
    #[error("level {level} exceeds the flag depth {depth}")]
    LevelOutOfRange { level: usize, depth: usize },
    #[error("ball center at level {level} has index {index} outside F_{level}")]
    CenterOutsideLevel { level: usize, index: Index },
    #[error("point has index {index} outside F_{level}")]
    SupportOutsideSlice { level: usize, index: Index },
    #[error("new index {0} already lies in the slice")]
    IndexInSlice(Index),
    #[error("closed unit ball not covered; uncovered point {witness:?}")]
    UnitBallNotCovered { witness: FinVector },
    #[error("unit ball touches the complement of the cover; refine the cover")]
    ZeroSeparation,
    #[error("stage {stage}: {source}")]
    Stage { stage: usize, source: std::boxed::Box<TopologyError> },
    #[error("disjointness needs two different indices, got {0} twice")]
    InvalidPair(Index),
    #[error("no ball centered at e_{0}")]
    MissingBall(Index),
    #[error("sample {sample} is not in the cover")]
    SampleNotInO { sample: usize },
    #[error("sample {sample} has index {index} outside F_{depth}")]
    SampleOutsideSlice { sample: usize, index: Index, depth: usize },
    #[error("cover has no balls up to level {0} and no samples")]
    NoInteriorBall(usize),
    #[error("internal check failed: {0}")]
    CertificateFailed(String),
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error(transparent)]
    Domination(#[from] DominationError),
    #[error(transparent)]
    Flag(#[from] VectorSpaceError),
}

impl TopologyError {
    /// Whether the error is a failed mathematical precondition rather than
    /// malformed input.
    pub fn is_precondition(&self) -> bool {
        match self {
            TopologyError::UnitBallNotCovered { .. }
            | TopologyError::ZeroSeparation
            | TopologyError::SampleNotInO { .. }
            | TopologyError::SampleOutsideSlice { .. }
            | TopologyError::SupportOutsideSlice { .. }
            | TopologyError::NoInteriorBall(_)
            | TopologyError::MissingBall(_)
            | TopologyError::CertificateFailed(_)
            | TopologyError::Norm(NormError::DomainViolation { .. }) => true,
            TopologyError::Stage { source, .. } => source.is_precondition(),
            TopologyError::Domination(e) => e.is_precondition(),
            _ => false,
        }
    }

    /// The uncovered point carried by a (possibly stage-wrapped) coverage failure.
    pub fn witness(&self) -> Option<&FinVector> {
        match self {
            TopologyError::UnitBallNotCovered { witness } => Some(witness),
            TopologyError::Stage { source, .. } => source.witness(),
            _ => None,
        }
    }
}

/// `{x : N(x − center) < radius}`, or `≤` when `open` is false.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallSpec {
    pub center: FinVector,
    pub radius: Scalar,
    pub norm: NormExpr,
    pub open: bool,
}

impl BallSpec {
    pub fn new(center: FinVector, radius: Scalar, norm: NormExpr, open: bool) -> Result<Self, TopologyError> {
        if !radius.is_positive() {
            return Err(TopologyError::NonPositiveRadius(radius));
        }
        Ok(BallSpec { center, radius, norm, open })
    }

    pub fn contains(&self, p: &FinVector) -> Result<bool, TopologyError> {
        let d = self.norm.eval(&p.sub(&self.center))?;
        Ok(if self.open { d < self.radius } else { d <= self.radius })
    }

    /// The ball intersected with `V_slice`, as a cell on `slice`, or `None`
    /// when the intersection is empty.
    pub fn section(&self, slice: &IndexSet) -> Result<Option<Cell>, TopologyError> {
        let weights = self.norm.slice_weights(&slice.union(&self.center.support()))?;
        let offset = self
            .center
            .iter()
            .filter(|(k, _)| !slice.contains(*k))
            .map(|(k, c)| &weights[&k] * &c.abs())
            .fold(Scalar::zero(), Scalar::max);
        let reaches = if self.open { offset < self.radius } else { offset <= self.radius };
        if !reaches {
            return Ok(None);
        }
        Ok(Some(Cell::new(
            slice
                .iter()
                .map(|k| {
                    let c = self.center.coord(k);
                    let h = &self.radius / &weights[&k];
                    (k, Span::with_closure(&c - &h, &c + &h, !self.open))
                })
                .collect(),
        )))
    }

    fn translated(&self, shift: &FinVector) -> BallSpec {
        BallSpec { center: self.center.sub(shift), ..self.clone() }
    }
}

/// An open set given level by level: the balls at level `n` have centers in
/// `F_n` of `flag`, and `O ∩ F_n` is taken to contain every ball of level `≤ n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawCover")]
pub struct BallCover {
    flag: Flag,
    levels: BTreeMap<usize, Vec<BallSpec>>,
}

#[derive(Deserialize)]
struct RawCover {
    flag: Flag,
    #[serde(default)]
    levels: BTreeMap<usize, Vec<BallSpec>>,
}

impl TryFrom<RawCover> for BallCover {
    type Error = TopologyError;
    fn try_from(raw: RawCover) -> Result<Self, Self::Error> {
        BallCover::new(raw.flag, raw.levels)
    }
}

impl BallCover {
    pub fn new(flag: Flag, levels: BTreeMap<usize, Vec<BallSpec>>) -> Result<Self, TopologyError> {
        for (&level, balls) in &levels {
            if level > flag.depth() {
                return Err(TopologyError::LevelOutOfRange { level, depth: flag.depth() });
            }
            let slice = flag.slice(level);
            for b in balls {
                if !b.radius.is_positive() {
                    return Err(TopologyError::NonPositiveRadius(b.radius.clone()));
                }
                if let Some((index, _)) = b.center.iter().find(|(k, _)| !slice.contains(*k)) {
                    return Err(TopologyError::CenterOutsideLevel { level, index });
                }
            }
        }
        let levels = levels.into_iter().filter(|(_, b)| !b.is_empty()).collect();
        Ok(BallCover { flag, levels })
    }

    pub fn empty(flag: Flag) -> Self {
        BallCover { flag, levels: BTreeMap::new() }
    }

    pub fn flag(&self) -> &Flag {
        &self.flag
    }

    pub fn levels(&self) -> &BTreeMap<usize, Vec<BallSpec>> {
        &self.levels
    }

    pub fn balls_up_to(&self, level: usize) -> impl Iterator<Item = (usize, &BallSpec)> + '_ {
        self.levels.range(..=level).flat_map(|(l, bs)| bs.iter().map(move |b| (*l, b)))
    }

    pub fn ball_count(&self) -> usize {
        self.levels.values().map(Vec::len).sum()
    }

    /// Sections on `slice` of every ball of level `≤ level`.
    pub fn pieces(&self, slice: &IndexSet, level: usize) -> Result<Vec<Cell>, TopologyError> {
        let mut out = Vec::new();
        for (_, b) in self.balls_up_to(level) {
            if let Some(c) = b.section(slice)? {
                out.push(c);
            }
        }
        Ok(out)
    }

    /// The cover of `O − shift`, re-leveled on the flag rebased at `F_n`.
    fn translated(&self, shift: &FinVector, n: usize) -> BallCover {
        let mut levels: BTreeMap<usize, Vec<BallSpec>> = BTreeMap::new();
        for (l, b) in self.balls_up_to(self.flag.depth()) {
            levels.entry(l.saturating_sub(n)).or_default().push(b.translated(shift));
        }
        BallCover { flag: self.flag.rebased(n), levels }
    }
}

/// Whether `p ∈ F_n` lies in a ball of level `≤ n`.
pub fn slice_membership(cover: &BallCover, p: &FinVector, n: usize) -> Result<bool, TopologyError> {
    let depth = cover.flag.depth();
    if n > depth {
        return Err(TopologyError::LevelOutOfRange { level: n, depth });
    }
    let slice = cover.flag.slice(n);
    if let Some((index, _)) = p.iter().find(|(k, _)| !slice.contains(*k)) {
        return Err(TopologyError::SupportOutsideSlice { level: n, index });
    }
    for (_, b) in cover.balls_up_to(n) {
        if b.contains(p)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Exact data behind the ε of one extension step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpsilonCert {
    pub epsilon: Scalar,
    /// Largest `d` such that every point within auxiliary distance `< d` of
    /// the base unit ball is covered; `ε = d/2`.
    pub separation: Scalar,
    pub slice: IndexSet,
    pub index: Index,
    /// Weights of the auxiliary norm `max(N(y), |λ|)` on `slice ∪ {index}`.
    pub aux_weights: BTreeMap<Index, Scalar>,
    /// Number of candidate distances from piece faces.
    pub candidates: usize,
    /// The next candidate above `d` and an uncovered point within that
    /// distance, when there is one.
    pub blocking_distance: Option<Scalar>,
    pub blocking_point: Option<FinVector>,
}

fn open_span(half: &Scalar) -> Span {
    Span::open(-half, half.clone())
}

fn closed_unit_cell(weights: &BTreeMap<Index, Scalar>, j: Index, lambda: &Scalar) -> Cell {
    let mut sides: BTreeMap<Index, Span> = weights
        .iter()
        .map(|(k, w)| {
            let h = w.recip();
            (*k, Span::closed(-&h, h))
        })
        .collect();
    sides.insert(j, Span::closed(-lambda, lambda.clone()));
    Cell::new(sides)
}

fn expansion(weights: &BTreeMap<Index, Scalar>, j: Index, rho: &Scalar) -> Cell {
    let one_plus = Scalar::one() + rho.clone();
    let mut sides: BTreeMap<Index, Span> = weights.iter().map(|(k, w)| (*k, open_span(&(&one_plus / w)))).collect();
    sides.insert(j, open_span(rho));
    Cell::new(sides)
}

/// Positive auxiliary distances at which a face of the expanding region meets
/// a face of some piece, sorted and deduplicated.
fn face_candidates(weights: &BTreeMap<Index, Scalar>, j: Index, pieces: &[Cell]) -> Vec<Scalar> {
    let mut out = Vec::new();
    for p in pieces {
        for (k, w) in weights.iter().map(|(k, w)| (*k, w.clone())).chain([(j, Scalar::one())]) {
            let Some(s) = p.side(k) else { continue };
            let b = if k == j { Scalar::zero() } else { w.recip() };
            out.push(&w * &(&s.hi.value - &b));
            out.push(&w * &(&(-&s.lo.value) - &b));
        }
    }
    out.retain(Scalar::is_positive);
    out.sort();
    out.dedup();
    out
}

fn flatten_extension(base: &NormExpr, slice: &IndexSet, j: Index, epsilon: Scalar) -> Result<NormExpr, TopologyError> {
    if let NormKind::Extension { base: inner, flag, epsilons } = base.kind() {
        if flag.domain() == *slice {
            let mut eps = epsilons.clone();
            eps.push(epsilon);
            return Ok(NormExpr::extension((**inner).clone(), flag.extended(j)?, eps)?);
        }
    }
    Ok(NormExpr::extension(base.clone(), Flag::new(slice.clone(), vec![j])?, vec![epsilon])?)
}

/// Extends `base` from `V_slice` to `V_{slice ∪ {j}}` so that the closed unit
/// ball of the result lies in the balls of level `≤ level`.
pub fn extend_norm_step(
    base: &NormExpr,
    slice: &IndexSet,
    j: Index,
    cover: &BallCover,
    level: usize,
) -> Result<(EpsilonCert, NormExpr), TopologyError> {
    if slice.contains(j) {
        return Err(TopologyError::IndexInSlice(j));
    }
    let weights = base.slice_weights(slice)?;
    let wide = slice.with(j);
    let pieces = cover.pieces(&wide, level)?;

    let unit = closed_unit_cell(&weights, j, &Scalar::zero());
    if let Some(witness) = first_uncovered(&unit, &pieces) {
        return Err(TopologyError::UnitBallNotCovered { witness });
    }

    let candidates = face_candidates(&weights, j, &pieces);
    let covered = |rho: &Scalar| geometry::is_covered(&expansion(&weights, j, rho), &pieces);
    // Coverage is monotone in ρ: find the last covered candidate.
    let (mut lo, mut hi) = (0usize, candidates.len());
    while lo < hi {
        let mid = (lo + hi) / 2;
        if covered(&candidates[mid]) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    if lo == 0 {
        return Err(TopologyError::ZeroSeparation);
    }
    let separation = candidates[lo - 1].clone();
    let (blocking_distance, blocking_point) = match candidates.get(lo) {
        Some(next) => (Some(next.clone()), geometry::find_uncovered(&expansion(&weights, j, next), &pieces)),
        None => (None, None),
    };
    let epsilon = &separation / &Scalar::from(2);

    let extended = flatten_extension(base, slice, j, epsilon.clone())?;
    if let Some(p) = geometry::find_uncovered(&closed_unit_cell(&weights, j, &epsilon), &pieces) {
        return Err(TopologyError::CertificateFailed(format!("extended unit ball misses {p:?}")));
    }
    let mut aux_weights = weights;
    aux_weights.insert(j, Scalar::one());
    Ok((
        EpsilonCert {
            epsilon,
            separation,
            slice: slice.clone(),
            index: j,
            aux_weights,
            candidates: candidates.len(),
            blocking_distance,
            blocking_point,
        },
        extended,
    ))
}

/// An uncovered vertex if there is one, else any uncovered point.
fn first_uncovered(region: &Cell, pieces: &[Cell]) -> Option<FinVector> {
    let sides: Vec<(Index, &Span)> = region.slice().iter().map(|k| (k, region.side(k).unwrap())).collect();
    if sides.len() <= 16 {
        let vertex = (0u32..1 << sides.len()).find_map(|mask| {
            let v =
                FinVector::from_coords(sides.iter().enumerate().map(|(bit, (k, s))| {
                    (*k, if mask >> bit & 1 == 1 { s.hi.value.clone() } else { s.lo.value.clone() })
                }));
            (!pieces.iter().any(|p| p.contains(&v))).then_some(v)
        });
        if vertex.is_some() {
            return vertex;
        }
    }
    geometry::find_uncovered(region, pieces)
}

/// One [`extend_norm_step`] per stage along the cover's flag.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlagExtension {
    pub norm: NormExpr,
    pub stages: Vec<EpsilonCert>,
}

/// Extends `base` from `F₀` through `F_depth`, stage `m` adding the flag's
/// `m`-th index against the balls of level `≤ m + 1`.
pub fn extend_norm_flag(base: &NormExpr, cover: &BallCover, depth: usize) -> Result<FlagExtension, TopologyError> {
    let flag = cover.flag();
    if depth > flag.depth() {
        return Err(TopologyError::LevelOutOfRange { level: depth, depth: flag.depth() });
    }
    let mut norm = base.clone();
    let mut stages = Vec::with_capacity(depth);
    for m in 0..depth {
        let (cert, next) = extend_norm_step(&norm, &flag.slice(m), flag.added()[m], cover, m + 1)
            .map_err(|e| TopologyError::Stage { stage: m, source: std::boxed::Box::new(e) })?;
        norm = next;
        stages.push(cert);
    }
    Ok(FlagExtension { norm, stages })
}

/// Checks that the closed unit ball of `norm` on `F_level` lies in the balls
/// of level `≤ level`; returns an uncovered point otherwise.
pub fn verify_unit_ball(norm: &NormExpr, cover: &BallCover, level: usize) -> Result<Option<FinVector>, TopologyError> {
    let slice = cover.flag().slice(level);
    let region = ball_box(norm, &slice, &Scalar::one(), &FinVector::zero())?.as_cell();
    Ok(first_uncovered(&region, &cover.pieces(&slice, level)?))
}

/// The radius of every counterexample ball.
pub fn counterexample_radius() -> Scalar {
    Scalar::new(1, 3)
}

/// Level `k` holds the open ball of radius 1/3 at `e_k` for the norm
/// `max(N', N_k)`, `N'` the supremum norm. The flag is `{0} ⊂ {0,1} ⊂ …`.
pub fn counterexample_balls(norms: &[NormExpr]) -> Result<BallCover, TopologyError> {
    let depth = norms.len().saturating_sub(1);
    let flag = Flag::standard(depth as Index);
    let levels = norms
        .iter()
        .enumerate()
        .map(|(k, n)| {
            let norm = NormExpr::max_of(vec![NormExpr::sup_norm(), n.clone()])?;
            let ball = BallSpec::new(FinVector::basis(k as Index), counterexample_radius(), norm, true)?;
            Ok((k, vec![ball]))
        })
        .collect::<Result<BTreeMap<_, _>, TopologyError>>()?;
    BallCover::new(flag, levels)
}

fn ball_at(cover: &BallCover, k: Index) -> Result<&BallSpec, TopologyError> {
    let e = FinVector::basis(k);
    cover.levels().values().flatten().find(|b| b.center == e).ok_or(TopologyError::MissingBall(k))
}

/// `N'(e_k − e_l) = 1 > r_k + r_l` together with `N' ≤ N_k` and `N' ≤ N_l`,
/// which forces the two balls apart.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisjointnessCert {
    pub k: Index,
    pub l: Index,
    pub separation: Scalar,
    pub radius_k: Scalar,
    pub radius_l: Scalar,
    pub bound: Scalar,
    pub sup_below_k: bool,
    pub sup_below_l: bool,
}

impl DisjointnessCert {
    pub fn holds(&self) -> bool {
        self.separation > self.bound && self.sup_below_k && self.sup_below_l
    }
}

pub fn disjointness_certificate(cover: &BallCover, k: Index, l: Index) -> Result<DisjointnessCert, TopologyError> {
    if k == l {
        return Err(TopologyError::InvalidPair(k));
    }
    let (bk, bl) = (ball_at(cover, k)?, ball_at(cover, l)?);
    let separation = NormExpr::sup_norm().eval(&bk.center.sub(&bl.center))?;
    Ok(DisjointnessCert {
        k,
        l,
        separation,
        bound: &bk.radius + &bl.radius,
        radius_k: bk.radius.clone(),
        radius_l: bl.radius.clone(),
        sup_below_k: bk.norm.dominates_sup_norm(),
        sup_below_l: bl.norm.dominates_sup_norm(),
    })
}

/// Result of testing whether a candidate ball around `e_k` stays in `B_k`
/// along sampled directions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Absorption {
    /// Every sampled segment stays in `B_k`, so `N_k ≤ constant · N` on the
    /// sampled directions.
    Dominated { k: Index, constant: Scalar, directions: usize },
    /// `point` lies in the candidate ball but in no ball of the cover.
    Witness {
        k: Index,
        direction: FinVector,
        point: FinVector,
        /// `N(point − e_k)`, below the candidate radius.
        candidate_distance: Scalar,
        /// `N_k` at the end of the segment, at least the radius of `B_k`.
        overshoot: Scalar,
    },
}

impl Absorption {
    pub fn is_dominated(&self) -> bool {
        matches!(self, Absorption::Dominated { .. })
    }
}

/// Tests the open candidate ball `{x : N(x − e_k) < r}` against `B_k` along
/// each nonzero sample direction `u`: the segment `e_k + t·u` leaves `B_k` at
/// `t* = ρ_k / N_k(u)` and leaves the candidate ball at `T = r / N(u)`.
pub fn absorption_domination(
    candidate: &NormExpr,
    k: Index,
    r: &Scalar,
    cover: &BallCover,
    samples: &[FinVector],
) -> Result<Absorption, TopologyError> {
    if !r.is_positive() {
        return Err(TopologyError::NonPositiveRadius(r.clone()));
    }
    let bk = ball_at(cover, k)?;
    let directions: Vec<&FinVector> = samples.iter().filter(|u| !u.is_zero()).collect();
    let outcomes = par::try_map(&directions, |u| -> Result<Option<Absorption>, TopologyError> {
        let t_candidate = r / &candidate.eval(u)?;
        let t_ball = &bk.radius / &bk.norm.eval(u)?;
        if t_candidate <= t_ball {
            return Ok(None);
        }
        let point = bk.center.add(&u.scale(&t_ball));
        for (_, b) in cover.balls_up_to(cover.flag().depth()) {
            if b.contains(&point)? {
                return Err(TopologyError::CertificateFailed(format!("boundary point {point:?} lies in the cover")));
            }
        }
        Ok(Some(Absorption::Witness {
            k,
            direction: (*u).clone(),
            candidate_distance: candidate.eval(&point.sub(&bk.center))?,
            overshoot: bk.norm.eval(&u.scale(&t_candidate))?,
            point,
        }))
    })?;
    Ok(outcomes.into_iter().flatten().next().unwrap_or(Absorption::Dominated {
        k,
        constant: &bk.radius / r,
        directions: directions.len(),
    }))
}

/// One member `N_x` of the opening family: the extension chain of a ball
/// around `center` whose closed unit ball, moved to `center`, lies in the cover.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpeningMember {
    pub level: usize,
    pub center: FinVector,
    pub radius: Scalar,
    pub g: Scalar,
    pub norm: NormExpr,
}

/// A closed `N`-ball of radius `rho` around `point` inside the cover.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleBall {
    pub point: FinVector,
    pub rho: Scalar,
    /// Index of the member realizing `rho`.
    pub member: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpeningCert {
    pub depth: usize,
    pub members: Vec<OpeningMember>,
    pub balls: Vec<SampleBall>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Opening {
    pub norm: NormExpr,
    pub cert: OpeningCert,
}

/// Checks that the closed `norm`-ball of radius `rho` at `p` lies in the
/// balls of level `≤ depth`, on `F_depth`.
pub fn verify_sample_ball(
    norm: &NormExpr,
    cover: &BallCover,
    depth: usize,
    p: &FinVector,
    rho: &Scalar,
) -> Result<Option<FinVector>, TopologyError> {
    let slice = cover.flag().slice(depth);
    let region = ball_box(norm, &slice, rho, p)?.as_cell();
    Ok(geometry::find_uncovered(&region, &cover.pieces(&slice, depth)?))
}

/// Builds a norm on `F_depth` for which every sample of `O` has a closed ball
/// inside the cover.
///
/// Each ball of level `n ≤ depth` with radius `r` contributes a center at its
/// own center with radius `r/2`; each sample `p` contributes a center at `p`
/// with half the slack `r − N(p − c)` of a ball containing it. The member norm
/// is the extension from `F_n` of `(2/r)·N_ball` against the translated cover.
pub fn build_opening_norm(cover: &BallCover, depth: usize, samples: &[FinVector]) -> Result<Opening, TopologyError> {
    let flag = cover.flag();
    if depth > flag.depth() {
        return Err(TopologyError::LevelOutOfRange { level: depth, depth: flag.depth() });
    }
    let top = flag.slice(depth);
    let two = Scalar::from(2);

    let mut seeds: Vec<(usize, FinVector, Scalar, NormExpr)> = Vec::new();
    for (level, b) in cover.balls_up_to(depth) {
        seeds.push((level, b.center.clone(), &b.radius / &two, b.norm.clone()));
    }
    for (i, p) in samples.iter().enumerate() {
        if let Some((index, _)) = p.iter().find(|(k, _)| !top.contains(*k)) {
            return Err(TopologyError::SampleOutsideSlice { sample: i, index, depth });
        }
        let own_level = (0..=depth).find(|&n| p.is_supported_in(&flag.slice(n))).unwrap_or(depth);
        let mut home = None;
        for (level, b) in cover.balls_up_to(depth) {
            let d = b.norm.eval(&p.sub(&b.center))?;
            // Boundary points of closed balls have no slack in that ball.
            if d < b.radius {
                home = Some((level, b, &b.radius - &d));
                break;
            }
        }
        let (level, b, slack) = home.ok_or(TopologyError::SampleNotInO { sample: i })?;
        seeds.push((level.max(own_level), p.clone(), &slack / &two, b.norm.clone()));
    }
    let mut seen = Vec::new();
    seeds.retain(|s| {
        if seen.contains(s) {
            false
        } else {
            seen.push(s.clone());
            true
        }
    });
    if seeds.is_empty() {
        return Err(TopologyError::NoInteriorBall(depth));
    }

    let sup = NormExpr::sup_norm();
    let members = par::try_map(&seeds, |(level, center, radius, norm)| -> Result<OpeningMember, TopologyError> {
        let shifted = cover.translated(center, *level);
        let start = NormExpr::scale(radius.recip(), norm.clone())?;
        let chain = extend_norm_flag(&start, &shifted, depth - level)?;
        let g = equivalence_constant(&chain.norm, &sup, &top)?.value;
        Ok(OpeningMember { level: *level, center: center.clone(), radius: radius.clone(), g, norm: chain.norm })
    })?;
    let norm = NormExpr::sup_family(members.iter().map(|m| (m.norm.clone(), m.g.clone())).collect())?;

    let balls = par::try_map(samples, |p| -> Result<SampleBall, TopologyError> {
        let mut best: Option<(Scalar, usize)> = None;
        for (i, m) in members.iter().enumerate() {
            let slack = Scalar::one() - m.norm.eval(&p.sub(&m.center))?;
            if slack.is_positive() {
                let rho = &slack / &m.g;
                if best.as_ref().is_none_or(|(b, _)| rho > *b) {
                    best = Some((rho, i));
                }
            }
        }
        let (rho, member) =
            best.ok_or_else(|| TopologyError::CertificateFailed(format!("no member strictly contains {p:?}")))?;
        if let Some(q) = verify_sample_ball(&norm, cover, depth, p, &rho)? {
            return Err(TopologyError::CertificateFailed(format!("ball around {p:?} misses {q:?}")));
        }
        Ok(SampleBall { point: p.clone(), rho, member })
    })?;
    Ok(Opening { norm, cert: OpeningCert { depth, members, balls } })
}
