//! A closed algebra of exactly evaluable norms on finitely supported vectors.
//!
//! Every expression is a weighted supremum norm on each finite coordinate
//! slice: [`NormExpr::slice_weights`] computes those weights, which is what
//! makes balls boxes and equivalence constants closed-form.

use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::geometry::{Box, Interval};
use crate::scalar::Scalar;
use crate::vectorspace::{FinVector, Flag, Index, IndexSet, VectorSpaceError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NormError {
    #[error("weight for index {index:?} must be positive, got {value}")]
    NonPositiveWeight { index: Option<Index>, value: Scalar },
    #[error("scale factor must be positive, got {0}")]
    NonPositiveScale(Scalar),
    #[error("max of an empty list of norms")]
    EmptyMax,
    #[error("sup over an empty family of norms")]
    EmptyFamily,
    #[error("family constant g_{member} must be positive, got {value}")]
    NonPositiveConstant { member: usize, value: Scalar },
    #[error("extension has {got} epsilons for {expected} added indices")]
    EpsilonCount { expected: usize, got: usize },
    #[error("epsilon for added index {index} must be positive, got {value}")]
    NonPositiveEpsilon { index: Index, value: Scalar },
    #[error("radius must be positive, got {0}")]
    NonPositiveRadius(Scalar),
    #[error("index {index} lies outside the extension's domain; extend the chain first")]
    DomainViolation { index: Index },
    #[error("ball center has index {index} outside the requested slice")]
    CenterOutsideSlice { index: Index },
    #[error(transparent)]
    Flag(#[from] VectorSpaceError),
}

/// A total, strictly positive weight function `k ↦ w(k)` on ω.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightFunction {
    explicit: BTreeMap<Index, Scalar>,
    default: Scalar,
}

impl WeightFunction {
    pub fn new(explicit: BTreeMap<Index, Scalar>, default: Scalar) -> Result<Self, NormError> {
        if !default.is_positive() {
            return Err(NormError::NonPositiveWeight { index: None, value: default });
        }
        if let Some((k, v)) = explicit.iter().find(|(_, v)| !v.is_positive()) {
            return Err(NormError::NonPositiveWeight { index: Some(*k), value: v.clone() });
        }
        Ok(WeightFunction { explicit, default })
    }

    /// All weights equal to `w`.
    pub fn uniform(w: Scalar) -> Result<Self, NormError> {
        Self::new(BTreeMap::new(), w)
    }

    /// All weights 1: the supremum norm.
    pub fn ones() -> Self {
        WeightFunction { explicit: BTreeMap::new(), default: Scalar::one() }
    }

    pub fn weight(&self, k: Index) -> &Scalar {
        self.explicit.get(&k).unwrap_or(&self.default)
    }

    pub fn explicit(&self) -> &BTreeMap<Index, Scalar> {
        &self.explicit
    }

    pub fn default_weight(&self) -> &Scalar {
        &self.default
    }

    /// Smallest weight over all of ω.
    pub fn min_weight(&self) -> Scalar {
        self.explicit.values().cloned().fold(self.default.clone(), Scalar::min)
    }

    fn combine(&self, other: &WeightFunction, f: impl Fn(&Scalar, &Scalar) -> Scalar) -> WeightFunction {
        let keys: IndexSet = self.explicit.keys().chain(other.explicit.keys()).copied().collect();
        WeightFunction {
            explicit: keys.iter().map(|k| (k, f(self.weight(k), other.weight(k)))).collect(),
            default: f(&self.default, &other.default),
        }
    }

    fn scaled(&self, c: &Scalar) -> WeightFunction {
        WeightFunction {
            explicit: self.explicit.iter().map(|(k, v)| (*k, v * c)).collect(),
            default: &self.default * c,
        }
    }
}

/// One member `N_i` of a [`NormKind::SupFamily`] together with its constant `g_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FamilyMember {
    pub norm: NormExpr,
    pub g: Scalar,
}

/// The shapes a [`NormExpr`] can take.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum NormKind {
    /// `x ↦ max_k w(k)·|x_k|`.
    Diagonal(WeightFunction),
    /// `x ↦ c·N(x)`.
    Scale { c: Scalar, inner: std::boxed::Box<NormExpr> },
    /// `x ↦ max_i N_i(x)`.
    Max(Vec<NormExpr>),
    /// `x ↦ max(N(restrict(x, F₀)), max_m |x_{j_m}| / ε_m)` over the flag's
    /// added indices `j_m`. Defined only on the flag's top slice.
    Extension { base: std::boxed::Box<NormExpr>, flag: Flag, epsilons: Vec<Scalar> },
    /// `x ↦ max_i N_i(x) / g_i` over a finite family.
    SupFamily(Vec<FamilyMember>),
}

/// A validated norm expression. Construct through the associated functions;
/// every constructor enforces positivity of its parameters.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NormExpr(NormKind);

impl NormExpr {
    pub fn diagonal(weights: WeightFunction) -> Self {
        NormExpr(NormKind::Diagonal(weights))
    }

    /// The supremum norm `x ↦ max_k |x_k|`.
    pub fn sup_norm() -> Self {
        Self::diagonal(WeightFunction::ones())
    }

    /// Diagonal norm with the given explicit weights and default 1.
    pub fn weighted(weights: impl IntoIterator<Item = (Index, Scalar)>) -> Result<Self, NormError> {
        Ok(Self::diagonal(WeightFunction::new(weights.into_iter().collect(), Scalar::one())?))
    }

    pub fn scale(c: Scalar, inner: NormExpr) -> Result<Self, NormError> {
        if !c.is_positive() {
            return Err(NormError::NonPositiveScale(c));
        }
        Ok(NormExpr(NormKind::Scale { c, inner: std::boxed::Box::new(inner) }))
    }

    pub fn max_of(members: Vec<NormExpr>) -> Result<Self, NormError> {
        if members.is_empty() {
            return Err(NormError::EmptyMax);
        }
        Ok(NormExpr(NormKind::Max(members)))
    }

    pub fn extension(base: NormExpr, flag: Flag, epsilons: Vec<Scalar>) -> Result<Self, NormError> {
        if epsilons.len() != flag.depth() {
            return Err(NormError::EpsilonCount { expected: flag.depth(), got: epsilons.len() });
        }
        if let Some((k, e)) = flag.added().iter().zip(&epsilons).find(|(_, e)| !e.is_positive()) {
            return Err(NormError::NonPositiveEpsilon { index: *k, value: e.clone() });
        }
        Ok(NormExpr(NormKind::Extension { base: std::boxed::Box::new(base), flag, epsilons }))
    }

    pub fn sup_family(members: Vec<(NormExpr, Scalar)>) -> Result<Self, NormError> {
        if members.is_empty() {
            return Err(NormError::EmptyFamily);
        }
        if let Some((i, (_, g))) = members.iter().enumerate().find(|(_, (_, g))| !g.is_positive()) {
            return Err(NormError::NonPositiveConstant { member: i, value: g.clone() });
        }
        Ok(NormExpr(NormKind::SupFamily(members.into_iter().map(|(norm, g)| FamilyMember { norm, g }).collect())))
    }

    pub fn kind(&self) -> &NormKind {
        &self.0
    }

    /// The indices on which the norm is defined, or `None` for all of ω.
    pub fn domain(&self) -> Option<IndexSet> {
        match &self.0 {
            NormKind::Diagonal(_) => None,
            NormKind::Scale { inner, .. } => inner.domain(),
            NormKind::Max(ms) => intersect_domains(ms.iter().map(NormExpr::domain)),
            NormKind::SupFamily(ms) => intersect_domains(ms.iter().map(|m| m.norm.domain())),
            NormKind::Extension { flag, .. } => Some(flag.domain()),
        }
    }

    pub fn is_defined_on(&self, slice: &IndexSet) -> bool {
        self.domain().is_none_or(|d| slice.is_subset(&d))
    }

    fn check_domain(&self, slice: &IndexSet) -> Result<(), NormError> {
        match self.domain() {
            Some(d) => match slice.first_outside(&d) {
                Some(index) => Err(NormError::DomainViolation { index }),
                None => Ok(()),
            },
            None => Ok(()),
        }
    }

    /// Indices carrying a non-default weight somewhere in the expression,
    /// plus every index of an extension's domain.
    pub fn explicit_indices(&self) -> IndexSet {
        match &self.0 {
            NormKind::Diagonal(w) => w.explicit.keys().copied().collect(),
            NormKind::Scale { inner, .. } => inner.explicit_indices(),
            NormKind::Max(ms) => ms.iter().fold(IndexSet::empty(), |acc, m| acc.union(&m.explicit_indices())),
            NormKind::SupFamily(ms) => {
                ms.iter().fold(IndexSet::empty(), |acc, m| acc.union(&m.norm.explicit_indices()))
            }
            NormKind::Extension { base, flag, .. } => base.explicit_indices().union(&flag.domain()),
        }
    }

    /// Exact value of the norm at `v`.
    pub fn eval(&self, v: &FinVector) -> Result<Scalar, NormError> {
        match &self.0 {
            NormKind::Diagonal(w) => {
                Ok(v.iter().map(|(k, x)| w.weight(k) * &x.abs()).fold(Scalar::zero(), Scalar::max))
            }
            NormKind::Scale { c, inner } => Ok(c * &inner.eval(v)?),
            NormKind::Max(ms) => ms.iter().try_fold(Scalar::zero(), |acc, m| Ok(acc.max(m.eval(v)?))),
            NormKind::SupFamily(ms) => {
                ms.iter().try_fold(Scalar::zero(), |acc, m| Ok(acc.max(&m.norm.eval(v)? / &m.g)))
            }
            NormKind::Extension { base, flag, epsilons } => {
                let domain = flag.domain();
                if let Some((index, _)) = v.iter().find(|(k, _)| !domain.contains(*k)) {
                    return Err(NormError::DomainViolation { index });
                }
                let mut value = base.eval(&v.restrict(flag.base()))?;
                for (k, eps) in flag.added().iter().zip(epsilons) {
                    if let Some(x) = v.get(*k) {
                        value = value.max(&x.abs() / eps);
                    }
                }
                Ok(value)
            }
        }
    }

    /// The weights `w_k` (k ∈ `slice`) with `N(x) = max_k w_k·|x_k|` for all
    /// `x ∈ V_slice`.
    pub fn slice_weights(&self, slice: &IndexSet) -> Result<BTreeMap<Index, Scalar>, NormError> {
        self.check_domain(slice)?;
        self.weights_unchecked(slice)
    }

    fn weights_unchecked(&self, slice: &IndexSet) -> Result<BTreeMap<Index, Scalar>, NormError> {
        match &self.0 {
            NormKind::Diagonal(w) => Ok(slice.iter().map(|k| (k, w.weight(k).clone())).collect()),
            NormKind::Scale { c, inner } => {
                Ok(inner.weights_unchecked(slice)?.into_iter().map(|(k, w)| (k, c * &w)).collect())
            }
            NormKind::Max(ms) => {
                let parts = ms.iter().map(|m| m.weights_unchecked(slice)).collect::<Result<Vec<_>, _>>()?;
                Ok(pointwise_max(slice, parts))
            }
            NormKind::SupFamily(ms) => {
                let parts = ms
                    .iter()
                    .map(|m| {
                        Ok(m.norm
                            .weights_unchecked(slice)?
                            .into_iter()
                            .map(|(k, w)| (k, &w / &m.g))
                            .collect::<BTreeMap<_, _>>())
                    })
                    .collect::<Result<Vec<_>, NormError>>()?;
                Ok(pointwise_max(slice, parts))
            }
            NormKind::Extension { base, flag, epsilons } => {
                let mut out = base.weights_unchecked(&slice.intersection(flag.base()))?;
                for (k, eps) in flag.added().iter().zip(epsilons) {
                    if slice.contains(*k) {
                        out.insert(*k, eps.recip());
                    }
                }
                Ok(out)
            }
        }
    }

    /// Weights on all of ω, when the expression contains no extension.
    pub fn global_weights(&self) -> Option<WeightFunction> {
        match &self.0 {
            NormKind::Diagonal(w) => Some(w.clone()),
            NormKind::Scale { c, inner } => Some(inner.global_weights()?.scaled(c)),
            NormKind::Max(ms) => {
                let mut it = ms.iter().map(NormExpr::global_weights);
                let first = it.next()??;
                it.try_fold(first, |acc, w| Some(acc.combine(&w?, |a, b| a.clone().max(b.clone()))))
            }
            NormKind::SupFamily(ms) => {
                let mut it = ms.iter().map(|m| Some(m.norm.global_weights()?.scaled(&m.g.recip())));
                let first = it.next()??;
                it.try_fold(first, |acc, w| Some(acc.combine(&w?, |a, b| a.clone().max(b.clone()))))
            }
            NormKind::Extension { .. } => None,
        }
    }

    /// Whether `N' ≤ N` on all of V, where `N'` is the supremum norm. Always
    /// false for expressions containing an extension (not defined on V).
    pub fn dominates_sup_norm(&self) -> bool {
        self.global_weights().is_some_and(|w| w.min_weight() >= Scalar::one())
    }
}

fn intersect_domains(domains: impl Iterator<Item = Option<IndexSet>>) -> Option<IndexSet> {
    domains.fold(None, |acc, d| match (acc, d) {
        (None, d) => d,
        (a, None) => a,
        (Some(a), Some(d)) => Some(a.intersection(&d)),
    })
}

fn pointwise_max(slice: &IndexSet, parts: Vec<BTreeMap<Index, Scalar>>) -> BTreeMap<Index, Scalar> {
    slice
        .iter()
        .map(|k| {
            let w = parts.iter().filter_map(|p| p.get(&k)).cloned().fold(Scalar::zero(), Scalar::max);
            (k, w)
        })
        .collect()
}

/// `N(v)`; see [`NormExpr::eval`].
pub fn eval_norm(norm: &NormExpr, v: &FinVector) -> Result<Scalar, NormError> {
    norm.eval(v)
}

/// The first failed norm axiom found by [`check_norm_axioms`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum AxiomViolation {
    NonzeroAtZero { value: Scalar },
    Positivity { sample: FinVector },
    Homogeneity { sample: FinVector, factor: Scalar, lhs: Scalar, rhs: Scalar },
    Triangle { u: FinVector, v: FinVector, lhs: Scalar, rhs: Scalar },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    /// Number of exact comparisons performed.
    pub checks: usize,
    pub violation: Option<AxiomViolation>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Factors used for the homogeneity check.
pub fn homogeneity_factors() -> Vec<Scalar> {
    [(-3, 1), (-1, 1), (-1, 2), (0, 1), (2, 3), (5, 2)].into_iter().map(|(n, d)| Scalar::new(n, d)).collect()
}

/// Checks positivity, absolute homogeneity and the triangle inequality on
/// `samples`, exactly. Stops at the first violation.
pub fn check_norm_axioms(norm: &NormExpr, samples: &[FinVector]) -> Result<AxiomReport, NormError> {
    let mut checks = 1;
    let at_zero = norm.eval(&FinVector::zero())?;
    if !at_zero.is_zero() {
        return Ok(AxiomReport { checks, violation: Some(AxiomViolation::NonzeroAtZero { value: at_zero }) });
    }
    let values = samples.iter().map(|v| norm.eval(v)).collect::<Result<Vec<_>, _>>()?;
    for (v, nv) in samples.iter().zip(&values) {
        checks += 1;
        if !v.is_zero() && !nv.is_positive() {
            return Ok(AxiomReport { checks, violation: Some(AxiomViolation::Positivity { sample: v.clone() }) });
        }
        for a in homogeneity_factors() {
            checks += 1;
            let lhs = norm.eval(&v.scale(&a))?;
            let rhs = &a.abs() * nv;
            if lhs != rhs {
                return Ok(AxiomReport {
                    checks,
                    violation: Some(AxiomViolation::Homogeneity { sample: v.clone(), factor: a, lhs, rhs }),
                });
            }
        }
    }
    for (i, u) in samples.iter().enumerate() {
        for (j, v) in samples.iter().enumerate().skip(i) {
            checks += 1;
            let lhs = norm.eval(&u.add(v))?;
            let rhs = &values[i] + &values[j];
            if lhs > rhs {
                return Ok(AxiomReport {
                    checks,
                    violation: Some(AxiomViolation::Triangle { u: u.clone(), v: v.clone(), lhs, rhs }),
                });
            }
        }
    }
    Ok(AxiomReport { checks, violation: None })
}

/// The closed ball `{x ∈ V_J : N(x − center) ≤ r}` as a box.
pub fn ball_box(norm: &NormExpr, slice: &IndexSet, r: &Scalar, center: &FinVector) -> Result<Box, NormError> {
    if !r.is_positive() {
        return Err(NormError::NonPositiveRadius(r.clone()));
    }
    if let Some((index, _)) = center.iter().find(|(k, _)| !slice.contains(*k)) {
        return Err(NormError::CenterOutsideSlice { index });
    }
    let weights = norm.slice_weights(slice)?;
    Ok(Box::new(weights.into_iter().map(|(k, w)| (k, Interval::centered(&center.coord(k), &(r / &w)))).collect()))
}

// ---- JSON wire format -------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum WireNorm {
    Diagonal { weights: BTreeMap<String, Scalar>, default: Scalar },
    Scale { c: Scalar, inner: std::boxed::Box<NormExpr> },
    Max { members: Vec<NormExpr> },
    Extension { base: std::boxed::Box<NormExpr>, flag: Flag, epsilons: Vec<Scalar> },
    Supfamily { members: Vec<WireMember> },
}

#[derive(Serialize, Deserialize)]
struct WireMember {
    norm: NormExpr,
    g: Scalar,
}

impl Serialize for NormExpr {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let wire = match &self.0 {
            NormKind::Diagonal(w) => WireNorm::Diagonal {
                weights: w.explicit.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
                default: w.default.clone(),
            },
            NormKind::Scale { c, inner } => WireNorm::Scale { c: c.clone(), inner: inner.clone() },
            NormKind::Max(ms) => WireNorm::Max { members: ms.clone() },
            NormKind::Extension { base, flag, epsilons } => {
                WireNorm::Extension { base: base.clone(), flag: flag.clone(), epsilons: epsilons.clone() }
            }
            NormKind::SupFamily(ms) => WireNorm::Supfamily {
                members: ms.iter().map(|m| WireMember { norm: m.norm.clone(), g: m.g.clone() }).collect(),
            },
        };
        wire.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for NormExpr {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let wire = WireNorm::deserialize(deserializer)?;
        let built = match wire {
            WireNorm::Diagonal { weights, default } => {
                let weights = weights
                    .into_iter()
                    .map(|(k, v)| {
                        k.parse::<Index>()
                            .map(|k| (k, v))
                            .map_err(|_| D::Error::custom(format!("bad weight index {k:?}")))
                    })
                    .collect::<Result<BTreeMap<_, _>, _>>()?;
                WeightFunction::new(weights, default).map(NormExpr::diagonal)
            }
            WireNorm::Scale { c, inner } => NormExpr::scale(c, *inner),
            WireNorm::Max { members } => NormExpr::max_of(members),
            WireNorm::Extension { base, flag, epsilons } => NormExpr::extension(*base, flag, epsilons),
            WireNorm::Supfamily { members } => {
                NormExpr::sup_family(members.into_iter().map(|m| (m.norm, m.g)).collect())
            }
        };
        built.map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::new(n, d)
    }

    fn e(k: Index) -> FinVector {
        FinVector::basis(k)
    }

    fn diag(ws: &[(Index, i64)]) -> NormExpr {
        NormExpr::weighted(ws.iter().map(|(k, w)| (*k, Scalar::from(*w)))).unwrap()
    }

    #[test]
    fn sup_norm_on_basis_vectors() {
        let n = NormExpr::sup_norm();
        for k in [0, 3, 1000] {
            assert_eq!(n.eval(&e(k)).unwrap(), Scalar::one());
        }
        assert_eq!(n.eval(&FinVector::zero()).unwrap(), Scalar::zero());
    }

    #[test]
    fn schema_style_weights() {
        // w(k) = f(i,k) + 1 with f(i,·) = (0, 4, 9)
        let n = diag(&[(0, 1), (1, 5), (2, 10)]);
        assert_eq!(n.eval(&e(1)).unwrap(), q(5, 1));
        assert_eq!(n.eval(&e(2)).unwrap(), q(10, 1));
        let v = FinVector::from_coords([(0, q(3, 1)), (2, q(-1, 4))]);
        assert_eq!(n.eval(&v).unwrap(), q(3, 1));
    }

    #[test]
    fn constructors_reject_degenerate_parameters() {
        assert!(matches!(
            NormExpr::weighted([(0, Scalar::zero())]),
            Err(NormError::NonPositiveWeight { index: Some(0), .. })
        ));
        assert!(WeightFunction::uniform(q(-1, 2)).is_err());
        assert_eq!(NormExpr::max_of(vec![]), Err(NormError::EmptyMax));
        assert_eq!(NormExpr::sup_family(vec![]), Err(NormError::EmptyFamily));
        assert!(NormExpr::scale(Scalar::zero(), NormExpr::sup_norm()).is_err());
        let flag = Flag::new(IndexSet::from_indices([0]), vec![1]).unwrap();
        assert!(matches!(
            NormExpr::extension(NormExpr::sup_norm(), flag.clone(), vec![]),
            Err(NormError::EpsilonCount { expected: 1, got: 0 })
        ));
        assert!(NormExpr::extension(NormExpr::sup_norm(), flag, vec![Scalar::zero()]).is_err());
        let bad = r#"{"type":"diagonal","weights":{"0":"0/1"},"default":"1/1"}"#;
        assert!(serde_json::from_str::<NormExpr>(bad).is_err());
    }

    #[test]
    fn extension_evaluation_and_domain() {
        let flag = Flag::new(IndexSet::from_indices([0]), vec![1]).unwrap();
        let n = NormExpr::extension(NormExpr::sup_norm(), flag, vec![q(1, 2)]).unwrap();
        let v = FinVector::from_coords([(0, q(1, 3)), (1, q(1, 4))]);
        assert_eq!(n.eval(&v).unwrap(), q(1, 2));
        assert_eq!(n.eval(&e(0)).unwrap(), Scalar::one());
        assert_eq!(n.eval(&e(2)), Err(NormError::DomainViolation { index: 2 }));
        assert_eq!(
            n.slice_weights(&IndexSet::from_indices([0, 1])).unwrap(),
            [(0, q(1, 1)), (1, q(2, 1))].into_iter().collect()
        );
    }

    #[test]
    fn axioms_pass_on_examples() {
        let samples = vec![e(0), e(1), e(0).add(&e(1))];
        assert!(check_norm_axioms(&NormExpr::sup_norm(), &samples).unwrap().passed());
        let m = NormExpr::max_of(vec![diag(&[(0, 2)]), diag(&[(1, 3), (2, 7)])]).unwrap();
        let many: Vec<FinVector> = (0..4)
            .flat_map(|a| {
                (0..4).map(move |b| FinVector::from_coords([(0, q(a - 2, 1)), (1, q(b - 1, 3)), (2, q(a * b, 5))]))
            })
            .collect();
        let report = check_norm_axioms(&m, &many).unwrap();
        assert!(report.passed());
        assert!(report.checks > many.len() * many.len() / 2);
    }

    #[test]
    fn ball_box_examples() {
        let j0 = IndexSet::from_indices([0]);
        let b = ball_box(&NormExpr::sup_norm(), &j0, &Scalar::one(), &FinVector::zero()).unwrap();
        assert_eq!(b.side(0), Some(&Interval::new(q(-1, 1), q(1, 1))));
        let b = ball_box(&diag(&[(0, 2)]), &j0, &Scalar::one(), &FinVector::zero()).unwrap();
        assert_eq!(b.side(0), Some(&Interval::new(q(-1, 2), q(1, 2))));
        let flag = Flag::new(j0, vec![1]).unwrap();
        let ext = NormExpr::extension(NormExpr::sup_norm(), flag, vec![q(1, 2)]).unwrap();
        let b = ball_box(&ext, &IndexSet::from_indices([0, 1]), &Scalar::one(), &FinVector::zero()).unwrap();
        assert_eq!(b.side(0), Some(&Interval::new(q(-1, 1), q(1, 1))));
        assert_eq!(b.side(1), Some(&Interval::new(q(-1, 2), q(1, 2))));
        assert!(matches!(
            ball_box(&ext, &IndexSet::from_indices([0, 5]), &Scalar::one(), &FinVector::zero()),
            Err(NormError::DomainViolation { index: 5 })
        ));
    }

    #[test]
    fn json_tree() {
        let flag = Flag::new(IndexSet::from_indices([0]), vec![1]).unwrap();
        let n = NormExpr::sup_family(vec![
            (NormExpr::scale(q(5, 1), diag(&[(0, 2)])).unwrap(), q(1, 1)),
            (NormExpr::extension(NormExpr::sup_norm(), flag, vec![q(1, 2)]).unwrap(), q(3, 1)),
        ])
        .unwrap();
        let s = serde_json::to_string(&n).unwrap();
        assert!(s.starts_with(r#"{"type":"supfamily","members":[{"norm":{"type":"scale","c":"5/1","inner":{"type":"diagonal","weights":{"0":"2/1"},"default":"1/1"}},"g":"1/1"}"#));
        assert!(s.contains(r#"{"type":"extension","base":"#));
        assert!(s.contains(r#""flag":{"base":[0],"added":[1]},"epsilons":["1/2"]"#));
        let back: NormExpr = serde_json::from_str(&s).unwrap();
        assert_eq!(back, n);
    }

    fn arb_weights() -> impl Strategy<Value = NormExpr> {
        proptest::collection::btree_map(0u64..6, (1i64..20, 1i64..6), 0..5)
            .prop_map(|m| NormExpr::weighted(m.into_iter().map(|(k, (n, d))| (k, Scalar::new(n, d)))).unwrap())
    }

    fn arb_norm() -> impl Strategy<Value = NormExpr> {
        arb_weights().prop_recursive(3, 12, 3, |inner| {
            prop_oneof![
                (1i64..9, 1i64..5, inner.clone()).prop_map(|(n, d, i)| NormExpr::scale(Scalar::new(n, d), i).unwrap()),
                proptest::collection::vec(inner.clone(), 1..3).prop_map(|ms| NormExpr::max_of(ms).unwrap()),
                proptest::collection::vec((inner, 1i64..6), 1..3).prop_map(|ms| {
                    NormExpr::sup_family(ms.into_iter().map(|(m, g)| (m, Scalar::from(g))).collect()).unwrap()
                }),
            ]
        })
    }

    fn arb_vector() -> impl Strategy<Value = FinVector> {
        proptest::collection::vec((0u64..6, -30i64..30, 1i64..8), 0..5)
            .prop_map(|v| FinVector::from_coords(v.into_iter().map(|(k, n, d)| (k, Scalar::new(n, d)))))
    }

    proptest! {
        #[test]
        fn slice_weights_agree_with_eval(n in arb_norm(), v in arb_vector()) {
            let w = n.slice_weights(&v.support()).unwrap();
            let by_weights = v.iter().map(|(k, x)| &w[&k] * &x.abs()).fold(Scalar::zero(), Scalar::max);
            prop_assert_eq!(n.eval(&v).unwrap(), by_weights);
        }

        #[test]
        fn scale_and_max_laws(n in arb_norm(), m in arb_norm(), c in 1i64..10, v in arb_vector()) {
            let c = Scalar::from(c);
            let scaled = NormExpr::scale(c.clone(), n.clone()).unwrap();
            prop_assert_eq!(scaled.eval(&v).unwrap(), &c * &n.eval(&v).unwrap());
            let mx = NormExpr::max_of(vec![n.clone(), m.clone()]).unwrap();
            prop_assert_eq!(mx.eval(&v).unwrap(), n.eval(&v).unwrap().max(m.eval(&v).unwrap()));
        }

        #[test]
        fn sup_family_dominates_members(members in proptest::collection::vec((arb_norm(), 1i64..7), 1..4), v in arb_vector()) {
            let fam = NormExpr::sup_family(members.iter().map(|(m, g)| (m.clone(), Scalar::from(*g))).collect()).unwrap();
            let total = fam.eval(&v).unwrap();
            for (m, g) in &members {
                prop_assert!(m.eval(&v).unwrap() <= &Scalar::from(*g) * &total);
            }
        }

        #[test]
        fn global_weights_agree_with_slices(n in arb_norm(), k in 0u64..8) {
            let gw = n.global_weights().unwrap();
            let sw = n.slice_weights(&IndexSet::from_indices([k])).unwrap();
            prop_assert_eq!(gw.weight(k), &sw[&k]);
        }

        #[test]
        fn ball_box_matches_membership(n in arb_norm(), p in arb_vector(), c in arb_vector(), r in 1i64..8) {
            let slice = p.support().union(&c.support());
            let r = Scalar::from(r);
            let b = ball_box(&n, &slice, &r, &c).unwrap();
            let inside = n.eval(&p.sub(&c)).unwrap() <= r;
            prop_assert_eq!(b.contains(&p), inside);
        }

        #[test]
        fn axioms_hold_for_generated_norms(n in arb_norm(), samples in proptest::collection::vec(arb_vector(), 1..5)) {
            prop_assert!(check_norm_axioms(&n, &samples).unwrap().passed());
        }
    }
}
