//! JSON schemas and CSV rendering for every command.
//!
//! All documents carry the version tag `homsense/v1`. Rationals serialize
//! as strings `"p/q"` (or `"p"` when the denominator is 1); polynomials as
//! coefficient arrays in ascending degree. Serialization is canonical:
//! identical inputs produce byte-identical documents.

use anyhow::{anyhow, bail, Context, Result};
use homsense_core::certify::{
    Evidence, MultiplicityEvidence, Prop5Branch, RankGate, Route, SignMode, TauHSample,
    UniquenessCertificate, Verdict,
};
use homsense_core::exactalg::{format_rational, parse_rational, PolyQ, Rational, RationalMatrix};
use homsense_core::permcodim::{CodimAccount, CoordinateProjection, SignedPermutation};
use homsense_core::sensing::Violation;
use homsense_core::structure::{EigenDescriptor, InvariantFactorData};
use serde::{Deserialize, Serialize};

pub const SCHEMA: &str = "homsense/v1";

fn check_schema(tag: &Option<String>) -> Result<()> {
    if let Some(tag) = tag {
        if tag != SCHEMA {
            bail!("unsupported schema tag `{tag}`, expected `{SCHEMA}`");
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// input documents

#[derive(Deserialize)]
#[serde(untagged)]
enum EntryValue {
    Int(i64),
    Text(String),
}

#[derive(Deserialize)]
pub struct MatrixDoc {
    #[serde(default)]
    schema: Option<String>,
    rows: usize,
    cols: usize,
    entries: Vec<Vec<EntryValue>>,
}

#[derive(Deserialize)]
pub struct PairDoc {
    #[serde(default)]
    schema: Option<String>,
    pub t1: MatrixDoc,
    pub t2: MatrixDoc,
}

#[derive(Deserialize)]
pub struct SignedPermDoc {
    pub perm: Vec<usize>,
    #[serde(default)]
    pub signs: Option<Vec<i8>>,
}

#[derive(Deserialize)]
pub struct ProjectionDoc {
    pub m: usize,
    pub kept: Vec<usize>,
}

#[derive(Deserialize)]
pub struct PermClassDoc {
    #[serde(default)]
    schema: Option<String>,
    pub pi1: SignedPermDoc,
    pub pi2: SignedPermDoc,
    pub rho1: ProjectionDoc,
    pub rho2: ProjectionDoc,
}

#[derive(Deserialize)]
pub struct BoundDoc {
    #[serde(default)]
    schema: Option<String>,
    pub pi: SignedPermDoc,
    pub rho1: ProjectionDoc,
    pub rho2: ProjectionDoc,
}

/// Parse a matrix document; errors name the offending cell.
pub fn matrix_from_doc(doc: &MatrixDoc) -> Result<RationalMatrix> {
    check_schema(&doc.schema)?;
    if doc.entries.len() != doc.rows {
        bail!("matrix has {} rows of entries, header says {}", doc.entries.len(), doc.rows);
    }
    let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(doc.rows);
    for (r, row) in doc.entries.iter().enumerate() {
        if row.len() != doc.cols {
            bail!("row {r} has {} entries, expected {}", row.len(), doc.cols);
        }
        let mut out = Vec::with_capacity(doc.cols);
        for (c, entry) in row.iter().enumerate() {
            let value = match entry {
                EntryValue::Int(v) => Ok(Rational::from_integer((*v).into())),
                EntryValue::Text(s) => parse_rational(s),
            };
            out.push(value.map_err(|e| anyhow!("entry ({r},{c}): {e}"))?);
        }
        rows.push(out);
    }
    RationalMatrix::from_rows(rows).map_err(|e| anyhow!("{e}"))
}

pub fn parse_matrix_json(text: &str) -> Result<RationalMatrix> {
    let doc: MatrixDoc = serde_json::from_str(text).context("malformed matrix JSON")?;
    matrix_from_doc(&doc)
}

pub fn parse_pair_json(text: &str) -> Result<(RationalMatrix, RationalMatrix)> {
    let doc: PairDoc = serde_json::from_str(text).context("malformed pair JSON")?;
    check_schema(&doc.schema)?;
    Ok((
        matrix_from_doc(&doc.t1).context("t1")?,
        matrix_from_doc(&doc.t2).context("t2")?,
    ))
}

pub fn signed_perm_from_doc(doc: &SignedPermDoc) -> Result<SignedPermutation> {
    let signs = doc.signs.clone().unwrap_or_else(|| vec![1; doc.perm.len()]);
    SignedPermutation::new(doc.perm.clone(), signs).map_err(|e| anyhow!("{e}"))
}

pub fn projection_from_doc(doc: &ProjectionDoc) -> Result<CoordinateProjection> {
    CoordinateProjection::new(doc.m, doc.kept.clone()).map_err(|e| anyhow!("{e}"))
}

pub fn parse_perm_class_json(
    text: &str,
) -> Result<(SignedPermutation, SignedPermutation, CoordinateProjection, CoordinateProjection)> {
    let doc: PermClassDoc = serde_json::from_str(text).context("malformed permutation-class JSON")?;
    check_schema(&doc.schema)?;
    Ok((
        signed_perm_from_doc(&doc.pi1).context("pi1")?,
        signed_perm_from_doc(&doc.pi2).context("pi2")?,
        projection_from_doc(&doc.rho1).context("rho1")?,
        projection_from_doc(&doc.rho2).context("rho2")?,
    ))
}

pub fn parse_bound_json(
    text: &str,
) -> Result<(SignedPermutation, CoordinateProjection, CoordinateProjection)> {
    let doc: BoundDoc = serde_json::from_str(text).context("malformed bound JSON")?;
    check_schema(&doc.schema)?;
    Ok((
        signed_perm_from_doc(&doc.pi).context("pi")?,
        projection_from_doc(&doc.rho1).context("rho1")?,
        projection_from_doc(&doc.rho2).context("rho2")?,
    ))
}

// ---------------------------------------------------------------------------
// output documents

fn rational_string(r: &Rational) -> String {
    format_rational(r)
}

fn vector_strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(rational_string).collect()
}

fn poly_coeff_strings(p: &PolyQ) -> Vec<String> {
    p.coeffs().iter().map(rational_string).collect()
}

#[derive(Serialize)]
pub struct MatrixOut {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<String>>,
}

pub fn matrix_out(m: &RationalMatrix) -> MatrixOut {
    MatrixOut {
        rows: m.rows(),
        cols: m.cols(),
        entries: (0..m.rows())
            .map(|r| (0..m.cols()).map(|c| rational_string(m.at(r, c))).collect())
            .collect(),
    }
}

/// Canonical matrix document (used for round-trip checks).
pub fn matrix_to_json(m: &RationalMatrix) -> String {
    #[derive(Serialize)]
    struct Tagged {
        schema: &'static str,
        #[serde(flatten)]
        matrix: MatrixOut,
    }
    serde_json::to_string_pretty(&Tagged {
        schema: SCHEMA,
        matrix: matrix_out(m),
    })
    .expect("matrix documents serialize")
}

#[derive(Serialize)]
#[serde(untagged)]
pub enum DescriptorOut {
    Rational {
        eigenvalue: String,
        multiplicity: usize,
    },
    Orbit {
        orbit_tag: String,
        orbit_tag_coeffs: Vec<String>,
        degree: usize,
        multiplicity: usize,
    },
}

fn descriptor_out(d: &EigenDescriptor, mult: usize) -> DescriptorOut {
    match d {
        EigenDescriptor::Rational(v) => DescriptorOut::Rational {
            eigenvalue: rational_string(v),
            multiplicity: mult,
        },
        EigenDescriptor::OrbitTag(p) => DescriptorOut::Orbit {
            orbit_tag: format!("{p}"),
            orbit_tag_coeffs: poly_coeff_strings(p),
            degree: p.degree().unwrap_or(0),
            multiplicity: mult,
        },
    }
}

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Certified => "certified",
        Verdict::Undecided => "undecided",
        Verdict::Refuted => "refuted",
    }
}

fn route_str(r: Route) -> &'static str {
    match r {
        Route::Prop5Eigen => "prop5_eigen",
        Route::Thm1TauH => "thm1_tauH",
        Route::Thm2Permutation => "thm2_permutation",
        Route::Cor3Signed => "cor3_signed",
        Route::Prop4GeneralPoint => "prop4_general_point",
    }
}

pub fn sign_mode_str(s: SignMode) -> &'static str {
    match s {
        SignMode::Plain => "plain",
        SignMode::PlusMinus => "plus_minus",
    }
}

#[derive(Serialize)]
struct RankGateOut {
    name: String,
    required: usize,
    actual: usize,
    passed: bool,
}

fn gate_out(g: &RankGate) -> RankGateOut {
    RankGateOut {
        name: g.name.clone(),
        required: g.required,
        actual: g.actual,
        passed: g.passed(),
    }
}

#[derive(Serialize)]
struct MultiplicityOut {
    table: Vec<DescriptorOut>,
    excluded: Vec<String>,
    max_excluded: usize,
    threshold: usize,
    holds: bool,
}

fn multiplicity_out(e: &MultiplicityEvidence) -> MultiplicityOut {
    MultiplicityOut {
        table: e.table.iter().map(|(d, m)| descriptor_out(d, *m)).collect(),
        excluded: vector_strings(&e.excluded),
        max_excluded: e.max_excluded,
        threshold: e.threshold,
        holds: e.holds(),
    }
}

#[derive(Serialize)]
struct TauHSampleOut {
    seed: u64,
    section_dim: usize,
    max_excluded: usize,
    threshold: usize,
    passed: bool,
    table: Vec<DescriptorOut>,
}

fn sample_out(s: &TauHSample) -> TauHSampleOut {
    TauHSampleOut {
        seed: s.seed,
        section_dim: s.section_dim,
        max_excluded: s.max_excluded,
        threshold: s.threshold,
        passed: s.passed,
        table: s.table.iter().map(|(d, m)| descriptor_out(d, *m)).collect(),
    }
}

#[derive(Serialize)]
struct CodimAccountOut {
    i_domino: Vec<usize>,
    i_fixed: Vec<usize>,
    i_cycles: Vec<usize>,
    i_incomplete: Vec<usize>,
    complete_cycle_sizes: Vec<usize>,
    codim_bound: usize,
}

fn account_out(a: &CodimAccount) -> CodimAccountOut {
    CodimAccountOut {
        i_domino: a.i_domino.clone(),
        i_fixed: a.i_fixed.clone(),
        i_cycles: a.i_cycles.clone(),
        i_incomplete: a.i_incomplete.clone(),
        complete_cycle_sizes: a.complete_cycle_sizes.clone(),
        codim_bound: a.codim_bound,
    }
}

#[derive(Serialize)]
#[serde(tag = "kind_detail")]
enum EvidenceOut {
    #[serde(rename = "prop5")]
    Prop5 {
        multiplicities: MultiplicityOut,
        branch: String,
        fixed_eigenspace_dim: Option<usize>,
        witness_rank: Option<usize>,
    },
    #[serde(rename = "thm1")]
    Thm1 {
        rank_gates: Vec<RankGateOut>,
        samples: Vec<TauHSampleOut>,
        agreement: bool,
        note: String,
    },
    #[serde(rename = "thm2")]
    Thm2 {
        account: CodimAccountOut,
        composite: Vec<usize>,
        dim_bound: usize,
        threshold: usize,
        rank_gates: Vec<RankGateOut>,
        excluded: Vec<String>,
    },
    #[serde(rename = "prop4")]
    Prop4 {
        rank_gates: Vec<RankGateOut>,
        scalar_multiples: bool,
        witness_point: Option<Vec<String>>,
        witness_basis: Option<MatrixOut>,
        witness_rank: Option<usize>,
    },
}

fn evidence_out(e: &Evidence) -> EvidenceOut {
    match e {
        Evidence::Prop5(p) => {
            let (branch, fixed, witness) = match &p.branch {
                Prop5Branch::JordanIndex {
                    fixed_eigenspace_dim,
                } => ("jordan_index".to_string(), Some(*fixed_eigenspace_dim), None),
                Prop5Branch::Transversality { witness_rank } => {
                    ("transversality".to_string(), None, *witness_rank)
                }
            };
            EvidenceOut::Prop5 {
                multiplicities: multiplicity_out(&p.multiplicities),
                branch,
                fixed_eigenspace_dim: fixed,
                witness_rank: witness,
            }
        }
        Evidence::Thm1(t) => EvidenceOut::Thm1 {
            rank_gates: t.rank_gates.iter().map(gate_out).collect(),
            samples: t.samples.iter().map(sample_out).collect(),
            agreement: t.agreement,
            note: t.note.to_string(),
        },
        Evidence::Thm2(t) => EvidenceOut::Thm2 {
            account: account_out(&t.account),
            composite: t.composite.clone(),
            dim_bound: t.dim_bound,
            threshold: t.threshold,
            rank_gates: t.rank_gates.iter().map(gate_out).collect(),
            excluded: vector_strings(&t.excluded),
        },
        Evidence::Prop4(p) => EvidenceOut::Prop4 {
            rank_gates: p.rank_gates.iter().map(gate_out).collect(),
            scalar_multiples: p.scalar_multiples,
            witness_point: p.witness_point.as_ref().map(|v| vector_strings(v)),
            witness_basis: p.witness_basis.as_ref().map(matrix_out),
            witness_rank: p.witness_rank,
        },
    }
}

#[derive(Serialize)]
struct CertificateOut {
    schema: &'static str,
    kind: &'static str,
    verdict: &'static str,
    route: &'static str,
    parameters: ParamsOut,
    evidence: EvidenceOut,
    counterexample: Option<(Vec<String>, Vec<String>)>,
}

#[derive(Serialize)]
struct ParamsOut {
    m: usize,
    n: usize,
    sign_mode: &'static str,
}

pub fn certificate_to_json(cert: &UniquenessCertificate) -> String {
    let out = CertificateOut {
        schema: SCHEMA,
        kind: "certificate",
        verdict: verdict_str(cert.verdict),
        route: route_str(cert.route),
        parameters: ParamsOut {
            m: cert.parameters.m,
            n: cert.parameters.n,
            sign_mode: sign_mode_str(cert.parameters.sign_mode),
        },
        evidence: evidence_out(&cert.evidence),
        counterexample: cert
            .counterexample
            .as_ref()
            .map(|(v1, v2)| (vector_strings(v1), vector_strings(v2))),
    };
    serde_json::to_string_pretty(&out).expect("certificates serialize")
}

#[derive(Serialize)]
struct StructureOut {
    schema: &'static str,
    kind: &'static str,
    matrix_dim: usize,
    charpoly: Vec<String>,
    charpoly_display: String,
    invariant_factors: Vec<Vec<String>>,
    invariant_factors_display: Vec<String>,
    minimal_polynomial: Vec<String>,
    multiplicities: Vec<DescriptorOut>,
}

pub fn structure_to_json(
    data: &InvariantFactorData,
    table: &[(EigenDescriptor, usize)],
) -> String {
    let out = StructureOut {
        schema: SCHEMA,
        kind: "structure_report",
        matrix_dim: data.matrix_dim,
        charpoly: poly_coeff_strings(&data.charpoly),
        charpoly_display: format!("{}", data.charpoly),
        invariant_factors: data.invariant_factors.iter().map(poly_coeff_strings).collect(),
        invariant_factors_display: data
            .invariant_factors
            .iter()
            .map(|f| format!("{f}"))
            .collect(),
        minimal_polynomial: poly_coeff_strings(&data.minimal_polynomial),
        multiplicities: table.iter().map(|(d, m)| descriptor_out(d, *m)).collect(),
    };
    serde_json::to_string_pretty(&out).expect("structure reports serialize")
}

/// Multiplicity table as CSV: `kind,descriptor,degree,multiplicity`.
pub fn multiplicities_to_csv(table: &[(EigenDescriptor, usize)]) -> String {
    let mut out = String::from("kind,descriptor,degree,multiplicity\n");
    for (d, mult) in table {
        match d {
            EigenDescriptor::Rational(v) => {
                out.push_str(&format!("rational,{},1,{mult}\n", rational_string(v)));
            }
            EigenDescriptor::OrbitTag(p) => {
                out.push_str(&format!(
                    "orbit,{},{},{mult}\n",
                    csv_quote(&format!("{p}")),
                    p.degree().unwrap_or(0)
                ));
            }
        }
    }
    out
}

#[derive(Serialize)]
struct WitnessOut {
    schema: &'static str,
    kind: &'static str,
    mode: String,
    m: usize,
    n: usize,
    basis: MatrixOut,
    certificate_rank: usize,
}

pub fn witness_to_json(mode: &str, basis: &RationalMatrix, rank: usize) -> String {
    let out = WitnessOut {
        schema: SCHEMA,
        kind: "witness",
        mode: mode.to_string(),
        m: basis.rows(),
        n: basis.cols(),
        basis: matrix_out(basis),
        certificate_rank: rank,
    };
    serde_json::to_string_pretty(&out).expect("witnesses serialize")
}

#[derive(Serialize)]
struct BoundOut {
    schema: &'static str,
    kind: &'static str,
    m: usize,
    rank_rho2: usize,
    account: CodimAccountOut,
    dim_bound: usize,
    guarantee: String,
}

pub fn bound_to_json(m: usize, rank_rho2: usize, account: &CodimAccount, dim_bound: usize) -> String {
    let out = BoundOut {
        schema: SCHEMA,
        kind: "codim_account",
        m,
        rank_rho2,
        account: account_out(account),
        dim_bound,
        guarantee: format!("dim_bound {} <= m - floor(rank_rho2/2) = {}", dim_bound, m - rank_rho2 / 2),
    };
    serde_json::to_string_pretty(&out).expect("accounts serialize")
}

#[derive(Serialize)]
struct ViolationOut {
    tau1: String,
    tau2: String,
    v1: Vec<String>,
    v2: Vec<String>,
}

#[derive(Serialize)]
struct TrialOut {
    seed: u64,
    pairs_checked: u64,
    violations: usize,
}

pub struct OracleRun {
    pub class: String,
    pub m: usize,
    pub n: usize,
    pub sign_mode: SignMode,
    pub trials: Vec<(u64, u64, Vec<Violation>)>,
}

pub fn oracle_to_json(run: &OracleRun) -> String {
    #[derive(Serialize)]
    struct OracleOut {
        schema: &'static str,
        kind: &'static str,
        class: String,
        m: usize,
        n: usize,
        sign_mode: &'static str,
        pairs_checked: u64,
        violation_count: usize,
        trials: Vec<TrialOut>,
        violations: Vec<ViolationOut>,
    }
    let mut violations = Vec::new();
    let mut trials = Vec::new();
    let mut pairs = 0u64;
    for (seed, checked, viols) in &run.trials {
        pairs += checked;
        trials.push(TrialOut {
            seed: *seed,
            pairs_checked: *checked,
            violations: viols.len(),
        });
        for v in viols {
            violations.push(ViolationOut {
                tau1: v.tau1.clone(),
                tau2: v.tau2.clone(),
                v1: vector_strings(&v.v1),
                v2: vector_strings(&v.v2),
            });
        }
    }
    let out = OracleOut {
        schema: SCHEMA,
        kind: "collision_report",
        class: run.class.clone(),
        m: run.m,
        n: run.n,
        sign_mode: sign_mode_str(run.sign_mode),
        pairs_checked: pairs,
        violation_count: violations.len(),
        trials,
        violations,
    };
    serde_json::to_string_pretty(&out).expect("collision reports serialize")
}

fn csv_quote(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Violations as CSV: one row per violation, vector entries joined with
/// `;`, then a summary row carrying the total pairs checked.
pub fn oracle_to_csv(run: &OracleRun) -> String {
    let mut out = String::from("tau1,tau2,v1,v2\n");
    let mut pairs = 0u64;
    for (_, checked, viols) in &run.trials {
        pairs += checked;
        for v in viols {
            out.push_str(&format!(
                "{},{},{},{}\n",
                csv_quote(&v.tau1),
                csv_quote(&v.tau2),
                vector_strings(&v.v1).join(";"),
                vector_strings(&v.v2).join(";"),
            ));
        }
    }
    out.push_str(&format!("summary,pairs_checked={pairs},,\n"));
    out
}
