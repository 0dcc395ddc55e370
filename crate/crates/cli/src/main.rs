//! `normdom` command-line front end.
//!
//! Every subcommand reads one JSON document (`--input`, or stdin when
//! omitted) and writes one JSON document (`--output`, or stdout). Exit codes:
//! 0 on success, 1 when a checked mathematical precondition fails (the output
//! is then a diagnostic document), 2 on malformed input or I/O failure.

#![allow(clippy::result_large_err)]

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use normdom::domination::{
    check_sepdom, dominate_family, dominate_schema, equivalence_constant, max_to_product, product_cert_to_max,
    product_to_max, schema_norms, solve_sepdom_table, CertForm, DominationError, FuncTable, SepDomCert, WeightSchema,
};
use normdom::norms::{check_norm_axioms, NormError};
use normdom::ordinals::{
    big_f, cnf_code, demo_countable_domination, enumerate_up_to, f_alpha, ord_cmp, CnfOrdinal, OrdinalError,
};
use normdom::sampling;
use normdom::topology::{
    absorption_domination, build_opening_norm, counterexample_balls, disjointness_certificate, extend_norm_flag,
    extend_norm_step, Absorption, BallCover, TopologyError,
};
use normdom::{FinVector, Index, IndexSet, NormExpr, Scalar};

/// Slice dimension used when a norm command needs samples but names no slice.
const DEFAULT_DIM: usize = 4;
const DEFAULT_MAX_COEFF: u64 = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Command {
    SepdomSolve,
    SepdomCheck,
    SepdomConvert,
    NormEval,
    NormAxioms,
    EquivConstant,
    Dominate,
    SchemaBuild,
    SchemaDominate,
    ExtendStep,
    ExtendFlag,
    Counterexample,
    DisjointCert,
    Absorb,
    BuildOpening,
    OrdCmp,
    OrdInject,
    #[value(name = "ord-F")]
    OrdF,
    OrdDemo,
}

impl Command {
    fn name(self) -> String {
        self.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
    }
}

#[derive(Debug, Parser)]
#[command(name = "normdom", version, about = "Exact norm domination, flag extension and ordinal certificates")]
struct Cli {
    command: Command,
    /// JSON input file; stdin when omitted.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output file, replaced atomically; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Flag depth (extension and opening commands) or sampling dimension.
    #[arg(long)]
    depth: Option<usize>,
    /// Number of seeded sample vectors.
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..=1_000_000))]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest denominator of a sampled coordinate.
    #[arg(long, default_value_t = sampling::DEFAULT_DENOMINATOR_BOUND, value_parser = clap::value_parser!(u64).range(1..=1_000_000))]
    denominator_bound: u64,
    /// Append a human-readable digest after the JSON.
    #[arg(long)]
    summary: bool,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Malformed(String),
    #[error("{message}")]
    Precondition { message: String, diagnostic: Value },
}

impl CliError {
    fn precondition(message: impl Into<String>, details: Value) -> Self {
        CliError::Precondition { message: message.into(), diagnostic: details }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Malformed(format!("invalid JSON: {e}"))
    }
}

impl From<NormError> for CliError {
    fn from(e: NormError) -> Self {
        match e {
            NormError::DomainViolation { index } => CliError::precondition(e.to_string(), json!({ "index": index })),
            e => CliError::Malformed(e.to_string()),
        }
    }
}

impl From<DominationError> for CliError {
    fn from(e: DominationError) -> Self {
        if !e.is_precondition() {
            return CliError::Malformed(e.to_string());
        }
        let details = match &e {
            DominationError::CertificateFailed { member, vector } => json!({ "member": member, "vector": vector }),
            DominationError::SliceCoverage { sample } => json!({ "sample": sample }),
            _ => json!({}),
        };
        CliError::precondition(e.to_string(), details)
    }
}

impl From<TopologyError> for CliError {
    fn from(e: TopologyError) -> Self {
        if !e.is_precondition() {
            return CliError::Malformed(e.to_string());
        }
        let details = match e.witness() {
            Some(w) => json!({ "witness": w }),
            None => json!({}),
        };
        CliError::precondition(e.to_string(), details)
    }
}

impl From<OrdinalError> for CliError {
    fn from(e: OrdinalError) -> Self {
        if e.is_precondition() {
            CliError::precondition(e.to_string(), json!({}))
        } else {
            CliError::Malformed(e.to_string())
        }
    }
}

/// Result document plus its digest.
struct Report {
    body: Value,
    summary: String,
}

fn report(body: impl Serialize, summary: String) -> Result<Report, CliError> {
    Ok(Report { body: serde_json::to_value(body)?, summary })
}

struct Options {
    depth: Option<usize>,
    samples: usize,
    seed: u64,
    bound: u64,
}

impl Options {
    fn vectors(&self, slice: &IndexSet) -> Vec<FinVector> {
        sampling::vectors(self.seed, slice, self.samples, self.bound)
    }

    fn default_slice(&self, norms: &[&NormExpr]) -> IndexSet {
        let domains: Vec<IndexSet> = norms.iter().filter_map(|n| n.domain()).collect();
        match domains.split_first() {
            Some((first, rest)) => rest.iter().fold(first.clone(), |acc, d| acc.intersection(d)),
            None => IndexSet::range(self.depth.unwrap_or(DEFAULT_DIM) as Index),
        }
    }
}

/// Parses one JSON document. A digest written by `--summary` (separated by a
/// blank line) may follow it, so summarized output can be fed back in.
fn parse<T: DeserializeOwned>(input: &str) -> Result<T, CliError> {
    let mut stream = serde_json::Deserializer::from_str(input).into_iter::<T>();
    let value = stream.next().ok_or_else(|| CliError::Malformed("empty input".into()))??;
    let rest = &input[stream.byte_offset()..];
    if !rest.trim().is_empty() && !rest.starts_with("\n\n") {
        return Err(CliError::Malformed("trailing characters after the JSON document".into()));
    }
    Ok(value)
}

// ---- input documents --------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CheckInput {
    table: FuncTable,
    cert: SepDomCert,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConvertInput {
    table: Option<FuncTable>,
    cert: Option<SepDomCert>,
    /// Rational product certificate, converted to an integer max certificate.
    g: Option<Vec<Scalar>>,
    h: Option<Vec<Scalar>>,
}

#[derive(Serialize)]
struct CertOutput {
    #[serde(skip_serializing_if = "Option::is_none")]
    table: Option<FuncTable>,
    cert: SepDomCert,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NormInput {
    norm: NormExpr,
    vectors: Option<Vec<FinVector>>,
    slice: Option<IndexSet>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EquivInput {
    a: NormExpr,
    b: NormExpr,
    slice: IndexSet,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DominateInput {
    members: Vec<NormExpr>,
    g: Option<Vec<Scalar>>,
    slice: Option<IndexSet>,
    vectors: Option<Vec<FinVector>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemaDominateInput {
    schema: WeightSchema,
    reference: Option<NormExpr>,
    slices: Vec<IndexSet>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StepInput {
    base: NormExpr,
    slice: IndexSet,
    index: Index,
    cover: BallCover,
    /// Highest ball level admitted; defaults to the full cover.
    level: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FlagInput {
    base: NormExpr,
    cover: BallCover,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CounterexampleInput {
    schema: Option<WeightSchema>,
    norms: Option<Vec<NormExpr>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DisjointInput {
    cover: BallCover,
    pairs: Option<Vec<(Index, Index)>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AbsorbInput {
    candidate: NormExpr,
    k: Index,
    radius: Scalar,
    cover: BallCover,
    directions: Option<Vec<FinVector>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OpeningInput {
    cover: BallCover,
    samples: Option<Vec<FinVector>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PairInput {
    a: CnfOrdinal,
    b: CnfOrdinal,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InjectInput {
    alpha: CnfOrdinal,
    betas: Option<Vec<CnfOrdinal>>,
    max_coeff: Option<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BigFInput {
    alpha: CnfOrdinal,
    beta: CnfOrdinal,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DemoInput {
    ordinals: Vec<CnfOrdinal>,
}

// ---- subcommands ------------------------------------------------------------

fn sepdom_solve(input: &str) -> Result<Report, CliError> {
    let table: FuncTable = parse(input)?;
    let cert = solve_sepdom_table(&table);
    let summary = format!(
        "max certificate for a {}x{} table; g(n) = {}",
        table.rows(),
        table.cols(),
        cert.g.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")
    );
    report(CertOutput { table: Some(table), cert }, summary)
}

fn sepdom_check(input: &str) -> Result<Report, CliError> {
    let CheckInput { table, cert } = parse(input)?;
    let check = check_sepdom(&table, &cert)?;
    if let Some((x, y)) = check.counterexample {
        let msg = format!("f({x},{y}) = {} exceeds the {} bound {}", table.get(x, y), cert.form, cert.bound(x, y));
        return Err(CliError::precondition(msg, serde_json::to_value(&check)?));
    }
    let summary = format!("{} certificate holds on all {} entries", cert.form, check.checked);
    report(check, summary)
}

fn sepdom_convert(input: &str) -> Result<Report, CliError> {
    let doc: ConvertInput = parse(input)?;
    let cert = match (doc.cert, doc.g, doc.h) {
        (Some(c), None, None) => match c.form {
            CertForm::Max => max_to_product(&c)?,
            CertForm::Product => product_cert_to_max(&c)?,
        },
        (None, Some(g), Some(h)) => product_to_max(&g, &h)?,
        _ => return Err(CliError::Malformed("expected either \"cert\" or both \"g\" and \"h\"".into())),
    };
    if let Some(table) = &doc.table {
        let check = check_sepdom(table, &cert)?;
        if !check.holds {
            return Err(CliError::precondition(
                "converted certificate fails on the table",
                serde_json::to_value(&check)?,
            ));
        }
    }
    let summary = format!("converted to a {} certificate of length {}", cert.form, cert.g.len());
    report(CertOutput { table: doc.table, cert }, summary)
}

fn norm_eval(input: &str, opts: &Options) -> Result<Report, CliError> {
    let doc: NormInput = parse(input)?;
    let slice = doc.slice.unwrap_or_else(|| opts.default_slice(&[&doc.norm]));
    let vectors = doc.vectors.unwrap_or_else(|| opts.vectors(&slice));
    let values = vectors.iter().map(|v| doc.norm.eval(v)).collect::<Result<Vec<_>, _>>()?;
    let summary = format!("evaluated {} vectors", values.len());
    report(json!({ "vectors": vectors, "values": values }), summary)
}

fn norm_axioms(input: &str, opts: &Options) -> Result<Report, CliError> {
    let doc: NormInput = parse(input)?;
    let slice = doc.slice.unwrap_or_else(|| opts.default_slice(&[&doc.norm]));
    let vectors = doc.vectors.unwrap_or_else(|| opts.vectors(&slice));
    let rep = check_norm_axioms(&doc.norm, &vectors)?;
    if !rep.passed() {
        return Err(CliError::precondition("norm axiom violated", serde_json::to_value(&rep)?));
    }
    let summary = format!("{} axiom checks passed", rep.checks);
    report(rep, summary)
}

fn equiv_constant(input: &str) -> Result<Report, CliError> {
    let EquivInput { a, b, slice } = parse(input)?;
    let c = equivalence_constant(&a, &b, &slice)?;
    let summary = format!("a ≤ {} · b on a slice of size {}", c.value, slice.len());
    report(c, summary)
}

fn dominate(input: &str, opts: &Options) -> Result<Report, CliError> {
    let doc: DominateInput = parse(input)?;
    let refs: Vec<&NormExpr> = doc.members.iter().collect();
    let slice = doc.slice.unwrap_or_else(|| opts.default_slice(&refs));
    let samples = doc.vectors.unwrap_or_else(|| opts.vectors(&slice));
    let cert = dominate_family(&doc.members, doc.g.as_deref(), &samples)?;
    let summary = format!("dominated {} norms, checked on {} vectors", doc.members.len(), cert.checked_on.len());
    report(cert, summary)
}

fn schema_build(input: &str) -> Result<Report, CliError> {
    let schema: WeightSchema = parse(input)?;
    let norms = schema_norms(&schema);
    let summary = format!("{} norms over {} coordinates", norms.len(), schema.coords());
    report(json!({ "norms": norms }), summary)
}

fn schema_dominate(input: &str, opts: &Options) -> Result<Report, CliError> {
    let doc: SchemaDominateInput = parse(input)?;
    let reference = doc.reference.unwrap_or_else(NormExpr::sup_norm);
    // Spread the sample budget over the slices, at least one vector each.
    let per_slice = opts.samples.div_ceil(doc.slices.len().max(1));
    let samples: Vec<FinVector> = doc
        .slices
        .iter()
        .enumerate()
        .flat_map(|(n, j)| sampling::vectors(opts.seed.wrapping_add(n as u64), j, per_slice, opts.bound))
        .collect();
    let out = dominate_schema(&doc.schema, &reference, &doc.slices, &samples)?;
    let summary = format!(
        "{} norms over {} slices; table certificate checked on {} entries; {} reference checks",
        out.f.len(),
        out.g.len(),
        out.table_check.checked,
        out.reference_checks
    );
    report(out, summary)
}

fn extend_step(input: &str) -> Result<Report, CliError> {
    let doc: StepInput = parse(input)?;
    let level = doc.level.unwrap_or(doc.cover.flag().depth());
    let (cert, norm) = extend_norm_step(&doc.base, &doc.slice, doc.index, &doc.cover, level)?;
    let summary = format!("epsilon = {} for index {} (separation {})", cert.epsilon, cert.index, cert.separation);
    report(json!({ "cert": cert, "norm": norm }), summary)
}

fn extend_flag(input: &str, opts: &Options) -> Result<Report, CliError> {
    let doc: FlagInput = parse(input)?;
    let depth = opts.depth.unwrap_or(doc.cover.flag().depth());
    let ext = extend_norm_flag(&doc.base, &doc.cover, depth)?;
    let eps: Vec<String> = ext.stages.iter().map(|s| s.epsilon.to_string()).collect();
    let summary = format!("{} stages; epsilons {}", ext.stages.len(), eps.join(", "));
    report(ext, summary)
}

fn counterexample(input: &str) -> Result<Report, CliError> {
    let doc: CounterexampleInput = parse(input)?;
    let norms = match (doc.schema, doc.norms) {
        (Some(s), None) => schema_norms(&s),
        (None, Some(n)) => n,
        _ => return Err(CliError::Malformed("expected exactly one of \"schema\" or \"norms\"".into())),
    };
    let cover = counterexample_balls(&norms)?;
    let summary = format!("{} balls of radius {}", cover.ball_count(), normdom::topology::counterexample_radius());
    report(cover, summary)
}

fn disjoint_cert(input: &str) -> Result<Report, CliError> {
    let doc: DisjointInput = parse(input)?;
    let n = doc.cover.ball_count() as Index;
    let pairs = doc.pairs.unwrap_or_else(|| (0..n).flat_map(|k| (k + 1..n).map(move |l| (k, l))).collect());
    let certs =
        pairs.iter().map(|&(k, l)| disjointness_certificate(&doc.cover, k, l)).collect::<Result<Vec<_>, _>>()?;
    if let Some(bad) = certs.iter().find(|c| !c.holds()) {
        return Err(CliError::precondition(
            format!("balls {} and {} may meet", bad.k, bad.l),
            serde_json::to_value(bad)?,
        ));
    }
    let summary = format!("{} pairs certified disjoint", certs.len());
    report(certs, summary)
}

fn absorb(input: &str, opts: &Options) -> Result<Report, CliError> {
    let doc: AbsorbInput = parse(input)?;
    let directions = doc.directions.unwrap_or_else(|| {
        let domain = doc.cover.flag().domain();
        let mut dirs: Vec<FinVector> = domain.iter().map(FinVector::basis).collect();
        dirs.extend(opts.vectors(&domain));
        dirs
    });
    let out = absorption_domination(&doc.candidate, doc.k, &doc.radius, &doc.cover, &directions)?;
    let summary = match &out {
        Absorption::Dominated { constant, .. } => format!("ball {} absorbed; constant {constant}", doc.k),
        Absorption::Witness { overshoot, .. } => format!("ball {} escapes the cover; overshoot {overshoot}", doc.k),
    };
    report(out, summary)
}

fn build_opening(input: &str, opts: &Options) -> Result<Report, CliError> {
    let doc: OpeningInput = parse(input)?;
    let depth = opts.depth.unwrap_or(doc.cover.flag().depth());
    let samples = match doc.samples {
        Some(s) => s,
        None => sampling::points_in_cover(opts.seed, &doc.cover, depth, opts.samples, opts.bound)?,
    };
    let opening = build_opening_norm(&doc.cover, depth, &samples)?;
    let summary = format!(
        "{} family members, {} certified sample balls at depth {depth}",
        opening.cert.members.len(),
        opening.cert.balls.len()
    );
    report(opening, summary)
}

fn ord_cmp_cmd(input: &str) -> Result<Report, CliError> {
    let PairInput { a, b } = parse(input)?;
    let ordering = match ord_cmp(&a, &b) {
        std::cmp::Ordering::Less => "less",
        std::cmp::Ordering::Equal => "equal",
        std::cmp::Ordering::Greater => "greater",
    };
    let summary = format!("{a} is {ordering} than {b}").replace("is equal than", "equals");
    report(json!({ "a": a.to_string(), "b": b.to_string(), "ordering": ordering }), summary)
}

fn ord_inject(input: &str) -> Result<Report, CliError> {
    let doc: InjectInput = parse(input)?;
    let betas = doc.betas.unwrap_or_else(|| enumerate_up_to(&doc.alpha, doc.max_coeff.unwrap_or(DEFAULT_MAX_COEFF)));
    let mut seen = BTreeMap::new();
    let mut codes = Vec::with_capacity(betas.len());
    for beta in &betas {
        let code = f_alpha(&doc.alpha, beta)?;
        if let Some(prev) = seen.insert(code.clone(), beta) {
            if prev != beta {
                let msg = format!("{prev} and {beta} share code {code}");
                return Err(CliError::precondition(msg, json!({ "code": code.to_string() })));
            }
        }
        codes.push(json!({ "beta": beta, "display": beta.to_string(), "code": code.to_string() }));
    }
    let summary = format!("{} ordinals ≤ {} mapped injectively", codes.len(), doc.alpha);
    report(json!({ "alpha": doc.alpha, "codes": codes }), summary)
}

fn ord_big_f(input: &str) -> Result<Report, CliError> {
    let BigFInput { alpha, beta } = parse(input)?;
    let value = big_f(&alpha, &beta);
    let summary = format!("F({alpha}, {beta}) = {value}");
    report(
        json!({ "alpha": alpha, "beta": beta, "value": value.to_string(), "beta_code": cnf_code(&beta).to_string() }),
        summary,
    )
}

fn ord_demo(input: &str) -> Result<Report, CliError> {
    let DemoInput { ordinals } = parse(input)?;
    let demo = demo_countable_domination(&ordinals)?;
    let summary = format!("{} ordinals; certificate checked on {} entries", ordinals.len(), demo.check.checked);
    report(demo, summary)
}

fn dispatch(cmd: Command, input: &str, opts: &Options) -> Result<Report, CliError> {
    match cmd {
        Command::SepdomSolve => sepdom_solve(input),
        Command::SepdomCheck => sepdom_check(input),
        Command::SepdomConvert => sepdom_convert(input),
        Command::NormEval => norm_eval(input, opts),
        Command::NormAxioms => norm_axioms(input, opts),
        Command::EquivConstant => equiv_constant(input),
        Command::Dominate => dominate(input, opts),
        Command::SchemaBuild => schema_build(input),
        Command::SchemaDominate => schema_dominate(input, opts),
        Command::ExtendStep => extend_step(input),
        Command::ExtendFlag => extend_flag(input, opts),
        Command::Counterexample => counterexample(input),
        Command::DisjointCert => disjoint_cert(input),
        Command::Absorb => absorb(input, opts),
        Command::BuildOpening => build_opening(input, opts),
        Command::OrdCmp => ord_cmp_cmd(input),
        Command::OrdInject => ord_inject(input),
        Command::OrdF => ord_big_f(input),
        Command::OrdDemo => ord_demo(input),
    }
}

// ---- I/O --------------------------------------------------------------------

fn read_input(path: Option<&Path>) -> Result<String, CliError> {
    let mut buf = String::new();
    match path {
        Some(p) => {
            buf = std::fs::read_to_string(p)
                .map_err(|e| CliError::Malformed(format!("cannot read {}: {e}", p.display())))?;
        }
        None => {
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| CliError::Malformed(format!("cannot read stdin: {e}")))?;
        }
    }
    Ok(buf)
}

fn render(body: &Value, summary: Option<&str>) -> String {
    let mut text = serde_json::to_string_pretty(body).expect("JSON values always serialize");
    text.push('\n');
    if let Some(s) = summary {
        let _ = writeln!(text, "\n{s}");
    }
    text
}

/// Writes through a temporary file in the destination directory, then renames.
fn write_output(path: Option<&Path>, text: &str) -> std::io::Result<()> {
    let Some(path) = path else {
        let mut out = std::io::stdout().lock();
        out.write_all(text.as_bytes())?;
        return out.flush();
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn run(cli: Cli) -> u8 {
    let opts =
        Options { depth: cli.depth, samples: cli.samples as usize, seed: cli.seed, bound: cli.denominator_bound };
    let result = read_input(cli.input.as_deref()).and_then(|input| dispatch(cli.command, &input, &opts));
    let (text, code) = match result {
        Ok(rep) => (render(&rep.body, cli.summary.then_some(rep.summary.as_str())), 0),
        Err(CliError::Precondition { message, diagnostic }) => {
            eprintln!("normdom {}: precondition failed: {message}", cli.command.name());
            let body = json!({
                "status": "precondition_failed",
                "command": cli.command.name(),
                "error": message,
                "details": diagnostic,
            });
            (render(&body, cli.summary.then_some(message.as_str())), 1)
        }
        Err(CliError::Malformed(message)) => {
            eprintln!("normdom {}: {message}", cli.command.name());
            return 2;
        }
    };
    match write_output(cli.output.as_deref(), &text) {
        Ok(()) => code,
        Err(e) => {
            eprintln!("normdom: cannot write output: {e}");
            2
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    ExitCode::from(run(cli))
}
