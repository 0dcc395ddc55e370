//! Separable domination of integer tables, the max/product certificate
//! conversions, equivalence constants on finite slices, and dominating norms
//! for finite families.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::norms::{NormError, NormExpr};
use crate::par;
use crate::scalar::Scalar;
use crate::vectorspace::{FinVector, Index, IndexSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DominationError {
    #[error("table has {rows}x{cols} declared but entries are {got_rows}x{got_cols}")]
    TableShape { rows: usize, cols: usize, got_rows: usize, got_cols: usize },
    #[error("table dimensions must be positive")]
    EmptyTable,
    #[error("certificate has {g} row bounds and {h} column bounds for a {rows}x{cols} table")]
    DimensionMismatch { rows: usize, cols: usize, g: usize, h: usize },
    #[error("expected a {expected} certificate")]
    WrongForm { expected: CertForm },
    #[error("entry {index} of {which} is negative: {value}")]
    NegativeEntry { which: &'static str, index: usize, value: Scalar },
    #[error("equivalence constant needs a nonempty slice")]
    EmptySlice,
    #[error("no slices enumerated")]
    NoSlices,
    #[error("family is empty")]
    EmptyFamily,
    #[error("{got} constants given for {expected} members")]
    ConstantCount { expected: usize, got: usize },
    #[error("constant g_{member} must be positive, got {value}")]
    NonPositiveConstant { member: usize, value: Scalar },
    #[error("sample {sample} has support outside every enumerated slice")]
    SliceCoverage { sample: usize },
    #[error("schema entry ({i}, {k}) outside the declared {indices}x{coords} range")]
    SchemaRange { i: usize, k: usize, indices: usize, coords: usize },
    #[error("schema entry ({i}, {k}) given twice")]
    SchemaDuplicate { i: usize, k: usize },
    #[error("closed form {closed} disagrees with vertex maximum {brute}")]
    OracleDisagreement { closed: Scalar, brute: Scalar },
    #[error("certificate fails for member {member} at {vector:?}")]
    CertificateFailed { member: usize, vector: FinVector },
    #[error(transparent)]
    Norm(#[from] NormError),
}

impl DominationError {
    /// Whether the error is a failed mathematical precondition rather than
    /// malformed input.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            DominationError::DimensionMismatch { .. }
                | DominationError::SliceCoverage { .. }
                | DominationError::OracleDisagreement { .. }
                | DominationError::CertificateFailed { .. }
                | DominationError::Norm(NormError::DomainViolation { .. })
        )
    }
}

/// A dense table `f : rows × cols → ω`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawTable")]
pub struct FuncTable {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<u64>>,
}

#[derive(Deserialize)]
struct RawTable {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<u64>>,
}

impl TryFrom<RawTable> for FuncTable {
    type Error = DominationError;
    fn try_from(raw: RawTable) -> Result<Self, Self::Error> {
        let table = FuncTable::new(raw.entries)?;
        if (table.rows, table.cols) != (raw.rows, raw.cols) {
            return Err(DominationError::TableShape {
                rows: raw.rows,
                cols: raw.cols,
                got_rows: table.rows,
                got_cols: table.cols,
            });
        }
        Ok(table)
    }
}

impl FuncTable {
    /// Builds a table from rows of equal, positive length.
    pub fn new(entries: Vec<Vec<u64>>) -> Result<Self, DominationError> {
        let rows = entries.len();
        let cols = entries.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 {
            return Err(DominationError::EmptyTable);
        }
        if let Some(bad) = entries.iter().find(|r| r.len() != cols) {
            return Err(DominationError::TableShape { rows, cols, got_rows: rows, got_cols: bad.len() });
        }
        Ok(FuncTable { rows, cols, entries })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> u64) -> Result<Self, DominationError> {
        Self::new((0..rows).map(|x| (0..cols).map(|y| f(x, y)).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, x: usize, y: usize) -> u64 {
        self.entries[x][y]
    }

    pub fn entries(&self) -> &[Vec<u64>] {
        &self.entries
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CertForm {
    Max,
    Product,
}

impl std::fmt::Display for CertForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CertForm::Max => "max",
            CertForm::Product => "product",
        })
    }
}

/// Row and column bounds witnessing `f(x,y) ≤ max(G(x), H(y))` or
/// `f(x,y) ≤ G(x)·H(y)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SepDomCert {
    pub form: CertForm,
    #[serde(rename = "G")]
    pub g: Vec<u64>,
    #[serde(rename = "H")]
    pub h: Vec<u64>,
}

impl SepDomCert {
    /// The right-hand side of the certificate's inequality at `(x, y)`.
    pub fn bound(&self, x: usize, y: usize) -> u128 {
        let (a, b) = (self.g[x] as u128, self.h[y] as u128);
        match self.form {
            CertForm::Max => a.max(b),
            CertForm::Product => a * b,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SepDomCheck {
    pub holds: bool,
    /// First violating `(x, y)` in row-major order.
    pub counterexample: Option<(usize, usize)>,
    pub checked: usize,
}

/// Checks the certificate against every entry of `f`.
pub fn check_sepdom(f: &FuncTable, cert: &SepDomCert) -> Result<SepDomCheck, DominationError> {
    if cert.g.len() != f.rows || cert.h.len() != f.cols {
        return Err(DominationError::DimensionMismatch {
            rows: f.rows,
            cols: f.cols,
            g: cert.g.len(),
            h: cert.h.len(),
        });
    }
    let counterexample =
        par::find_first(f.rows, |x| (0..f.cols).find(|&y| f.get(x, y) as u128 > cert.bound(x, y)).map(|y| (x, y)));
    Ok(SepDomCheck { holds: counterexample.is_none(), counterexample, checked: f.rows * f.cols })
}

/// `g(n) = max f(k,l)` over `k, l ≤ n`, after zero-padding to a square.
/// Returns `G = H = g` truncated to the table's dimensions.
pub fn solve_sepdom_table(f: &FuncTable) -> SepDomCert {
    let n = f.rows.max(f.cols);
    let at = |x: usize, y: usize| if x < f.rows && y < f.cols { f.get(x, y) } else { 0 };
    let mut g = Vec::with_capacity(n);
    let mut running = 0;
    for m in 0..n {
        for k in 0..=m {
            running = running.max(at(m, k)).max(at(k, m));
        }
        g.push(running);
    }
    SepDomCert { form: CertForm::Max, g: g[..f.rows].to_vec(), h: g[..f.cols].to_vec() }
}

/// `(G + 1, H + 1)` in product form.
pub fn max_to_product(cert: &SepDomCert) -> Result<SepDomCert, DominationError> {
    if cert.form != CertForm::Max {
        return Err(DominationError::WrongForm { expected: CertForm::Max });
    }
    let inc = |v: &[u64]| v.iter().map(|a| a.saturating_add(1)).collect();
    Ok(SepDomCert { form: CertForm::Product, g: inc(&cert.g), h: inc(&cert.h) })
}

/// `(⌈g²⌉, ⌈h²⌉)` in max form. Saturates at `u64::MAX`, which keeps the
/// bound valid for every `u64` table.
pub fn product_to_max(g: &[Scalar], h: &[Scalar]) -> Result<SepDomCert, DominationError> {
    let square = |which: &'static str, v: &[Scalar]| {
        v.iter()
            .enumerate()
            .map(|(index, a)| {
                if a.is_negative() {
                    Err(DominationError::NegativeEntry { which, index, value: a.clone() })
                } else {
                    Ok((a * a).ceil_u64_saturating())
                }
            })
            .collect::<Result<Vec<_>, _>>()
    };
    Ok(SepDomCert { form: CertForm::Max, g: square("g", g)?, h: square("h", h)? })
}

/// [`product_to_max`] applied to an integer product certificate.
pub fn product_cert_to_max(cert: &SepDomCert) -> Result<SepDomCert, DominationError> {
    if cert.form != CertForm::Product {
        return Err(DominationError::WrongForm { expected: CertForm::Product });
    }
    let lift = |v: &[u64]| v.iter().map(|&a| Scalar::from(a)).collect::<Vec<_>>();
    product_to_max(&lift(&cert.g), &lift(&cert.h))
}

/// The least `c` with `Na ≤ c·Nb` on `V_J`, with a vertex of the `Nb` unit
/// box attaining it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceConstant {
    pub value: Scalar,
    pub witness: FinVector,
}

/// Largest slice on which the closed form is re-derived by vertex enumeration.
pub const VERTEX_ORACLE_LIMIT: usize = 12;

pub fn equivalence_constant(
    na: &NormExpr,
    nb: &NormExpr,
    slice: &IndexSet,
) -> Result<EquivalenceConstant, DominationError> {
    if slice.is_empty() {
        return Err(DominationError::EmptySlice);
    }
    let wa = na.slice_weights(slice)?;
    let wb = nb.slice_weights(slice)?;
    let value = slice.iter().map(|k| &wa[&k] / &wb[&k]).fold(Scalar::zero(), Scalar::max);
    // Every coordinate at its upper box face: Nb = 1 and Na attains the ratio.
    let witness = FinVector::from_coords(slice.iter().map(|k| (k, wb[&k].recip())));
    if slice.len() <= VERTEX_ORACLE_LIMIT {
        let brute = unit_box_vertices(&wb)
            .iter()
            .map(|v| na.eval(v))
            .try_fold(Scalar::zero(), |acc, x| x.map(|x| acc.max(x)))?;
        if brute != value {
            return Err(DominationError::OracleDisagreement { closed: value, brute });
        }
    }
    Ok(EquivalenceConstant { value, witness })
}

fn unit_box_vertices(weights: &BTreeMap<Index, Scalar>) -> Vec<FinVector> {
    let half: Vec<(Index, Scalar)> = weights.iter().map(|(k, w)| (*k, w.recip())).collect();
    (0u64..1 << half.len())
        .map(|mask| {
            FinVector::from_coords(
                half.iter().enumerate().map(|(bit, (k, h))| (*k, if mask >> bit & 1 == 1 { -h } else { h.clone() })),
            )
        })
        .collect()
}

/// A dominating norm with per-member constants, checked on `checked_on`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomCert {
    pub dominating: NormExpr,
    pub constants: BTreeMap<usize, Scalar>,
    #[serde(default)]
    pub checked_on: Vec<FinVector>,
}

impl DomCert {
    /// First `(member, vector)` with `N_i(v) > g_i·N(v)` on `checked_on`.
    pub fn verify(&self, members: &[NormExpr]) -> Result<Option<(usize, FinVector)>, DominationError> {
        if members.len() != self.constants.len() {
            return Err(DominationError::ConstantCount { expected: members.len(), got: self.constants.len() });
        }
        let failures = par::try_map(&self.checked_on, |v| -> Result<Option<usize>, DominationError> {
            let total = self.dominating.eval(v)?;
            for (i, m) in members.iter().enumerate() {
                let g = self
                    .constants
                    .get(&i)
                    .ok_or(DominationError::ConstantCount { expected: members.len(), got: self.constants.len() })?;
                if m.eval(v)? > g * &total {
                    return Ok(Some(i));
                }
            }
            Ok(None)
        })?;
        Ok(failures.into_iter().zip(&self.checked_on).find_map(|(f, v)| f.map(|i| (i, v.clone()))))
    }
}

/// `N = sup_i N_i / g_i`, checked on `samples` plus every basis vector of an
/// explicitly weighted index.
pub fn dominate_family(
    members: &[NormExpr],
    g: Option<&[Scalar]>,
    samples: &[FinVector],
) -> Result<DomCert, DominationError> {
    if members.is_empty() {
        return Err(DominationError::EmptyFamily);
    }
    let constants: Vec<Scalar> = match g {
        Some(g) if g.len() != members.len() => {
            return Err(DominationError::ConstantCount { expected: members.len(), got: g.len() })
        }
        Some(g) => g.to_vec(),
        None => vec![Scalar::one(); members.len()],
    };
    if let Some((member, value)) = constants.iter().enumerate().find(|(_, c)| !c.is_positive()) {
        return Err(DominationError::NonPositiveConstant { member, value: value.clone() });
    }
    let dominating = NormExpr::sup_family(members.iter().cloned().zip(constants.iter().cloned()).collect())?;
    let mut range = members.iter().fold(IndexSet::empty(), |acc, m| acc.union(&m.explicit_indices()));
    if let Some(domain) = dominating.domain() {
        range = range.intersection(&domain);
    }
    let mut checked_on = samples.to_vec();
    checked_on.extend(range.iter().map(FinVector::basis));
    let cert = DomCert { dominating, constants: constants.into_iter().enumerate().collect(), checked_on };
    match cert.verify(members)? {
        Some((member, vector)) => Err(DominationError::CertificateFailed { member, vector }),
        None => Ok(cert),
    }
}

/// A finite table `f : indices × coords → ω`, zero where not listed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSchema", into = "RawSchema")]
pub struct WeightSchema {
    indices: usize,
    coords: usize,
    entries: BTreeMap<(usize, usize), u64>,
}

#[derive(Serialize, Deserialize)]
struct RawSchema {
    indices: usize,
    coords: usize,
    entries: Vec<(usize, usize, u64)>,
}

impl TryFrom<RawSchema> for WeightSchema {
    type Error = DominationError;
    fn try_from(raw: RawSchema) -> Result<Self, Self::Error> {
        WeightSchema::new(raw.indices, raw.coords, raw.entries)
    }
}

impl From<WeightSchema> for RawSchema {
    fn from(s: WeightSchema) -> Self {
        RawSchema {
            indices: s.indices,
            coords: s.coords,
            entries: s.entries.into_iter().map(|((i, k), v)| (i, k, v)).collect(),
        }
    }
}

impl WeightSchema {
    pub fn new(
        indices: usize,
        coords: usize,
        entries: impl IntoIterator<Item = (usize, usize, u64)>,
    ) -> Result<Self, DominationError> {
        let mut map = BTreeMap::new();
        for (i, k, v) in entries {
            if i >= indices || k >= coords {
                return Err(DominationError::SchemaRange { i, k, indices, coords });
            }
            if map.insert((i, k), v).is_some() {
                return Err(DominationError::SchemaDuplicate { i, k });
            }
        }
        Ok(WeightSchema { indices, coords, entries: map })
    }

    pub fn from_fn(indices: usize, coords: usize, f: impl Fn(usize, usize) -> u64) -> Self {
        let entries = (0..indices)
            .flat_map(|i| (0..coords).map(move |k| (i, k)))
            .map(|(i, k)| ((i, k), f(i, k)))
            .filter(|(_, v)| *v != 0)
            .collect();
        WeightSchema { indices, coords, entries }
    }

    pub fn indices(&self) -> usize {
        self.indices
    }

    pub fn coords(&self) -> usize {
        self.coords
    }

    pub fn get(&self, i: usize, k: usize) -> u64 {
        self.entries.get(&(i, k)).copied().unwrap_or(0)
    }
}

/// `N_i(x) = max_k (f(i,k)+1)·|x_k|`, with weight 1 beyond the schema's
/// coordinate range.
pub fn schema_norms(schema: &WeightSchema) -> Vec<NormExpr> {
    (0..schema.indices)
        .map(|i| {
            let weights = (0..schema.coords).map(|k| (k as Index, Scalar::from(schema.get(i, k)) + Scalar::one()));
            NormExpr::weighted(weights).expect("f + 1 is positive")
        })
        .collect()
}

/// Everything [`dominate_schema`] computes along the way.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaDomination {
    pub cert: DomCert,
    /// `c(i, J)`, rows indexed by schema index, columns by enumerated slice.
    pub c: Vec<Vec<Scalar>>,
    /// `⌈c(i, J)⌉`.
    pub table: FuncTable,
    pub max_cert: SepDomCert,
    pub product_cert: SepDomCert,
    pub table_check: SepDomCheck,
    /// `f(i)` from the product certificate.
    pub f: Vec<u64>,
    /// `g(J)` from the product certificate.
    pub g: Vec<u64>,
    /// Samples on which `N_i(x) ≤ f(i)·g(J)·N'(x)` and `N(x) ≤ N'(x)` were
    /// checked, `J` the first enumerated slice containing the support.
    pub reference_checks: usize,
}

pub fn dominate_schema(
    schema: &WeightSchema,
    reference: &NormExpr,
    slices: &[IndexSet],
    samples: &[FinVector],
) -> Result<SchemaDomination, DominationError> {
    if slices.is_empty() {
        return Err(DominationError::NoSlices);
    }
    if slices.iter().any(IndexSet::is_empty) {
        return Err(DominationError::EmptySlice);
    }
    let slice_of = samples
        .iter()
        .enumerate()
        .map(|(n, v)| {
            slices.iter().position(|j| v.is_supported_in(j)).ok_or(DominationError::SliceCoverage { sample: n })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let norms = schema_norms(schema);
    let cells: Vec<(usize, usize)> = (0..norms.len()).flat_map(|i| (0..slices.len()).map(move |j| (i, j))).collect();
    let flat = par::try_map(&cells, |&(i, j)| equivalence_constant(&norms[i], reference, &slices[j]).map(|e| e.value))?;
    let c: Vec<Vec<Scalar>> = flat.chunks(slices.len()).map(<[Scalar]>::to_vec).collect();
    let table = FuncTable::new(c.iter().map(|row| row.iter().map(|x| x.ceil_u64_saturating()).collect()).collect())?;
    let max_cert = solve_sepdom_table(&table);
    let product_cert = max_to_product(&max_cert)?;
    let table_check = check_sepdom(&table, &product_cert)?;
    if let Some((i, _)) = table_check.counterexample {
        return Err(DominationError::CertificateFailed { member: i, vector: FinVector::zero() });
    }
    let f = product_cert.g.clone();
    let g = product_cert.h.clone();
    let g_max = *g.iter().max().expect("slices nonempty");
    let constants: Vec<Scalar> = f.iter().map(|&fi| Scalar::from(fi) * Scalar::from(g_max)).collect();
    let cert = dominate_family(&norms, Some(&constants), samples)?;

    let positions: Vec<usize> = (0..samples.len()).collect();
    let bad = par::try_map(&positions, |&n| -> Result<Option<usize>, DominationError> {
        let v = &samples[n];
        let r = reference.eval(v)?;
        let gj = Scalar::from(g[slice_of[n]]);
        for (i, m) in norms.iter().enumerate() {
            if m.eval(v)? > &(&Scalar::from(f[i]) * &gj) * &r {
                return Ok(Some(i));
            }
        }
        if cert.dominating.eval(v)? > r {
            return Ok(Some(norms.len()));
        }
        Ok(None)
    })?;
    if let Some((n, member)) = bad.iter().enumerate().find_map(|(n, b)| b.map(|m| (n, m))) {
        return Err(DominationError::CertificateFailed { member, vector: samples[n].clone() });
    }
    Ok(SchemaDomination { cert, c, table, max_cert, product_cert, table_check, f, g, reference_checks: samples.len() })
}
