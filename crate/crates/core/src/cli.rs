//! Machine-readable verification reports and the command runners behind
//! the CLI subcommands.
//!
//! Reports are emitted as a single JSON document with fixed field order
//! and floats rounded to 12 significant digits, so identical inputs
//! produce byte-identical output. Exit policy: 0 when all checks pass,
//! 1 when a check fails, 2 for usage or input errors.

use serde::{Serialize, Serializer};

use crate::diagrams::{tensors_equal, Assignment};
use crate::error::{Error, Result};
use crate::families::{check_method, ControlledFamily, Method};
use crate::gf::mub_family;
use crate::meanking::{
    build_scheme, check_collision_lemma, check_mk_equation, check_orthonormal, simulate,
    verify_support, MeanKingScheme,
};
use crate::numerics::c;
use crate::qkd::{
    build_bb84_lhs, build_e91_lhs, check_alpha_identity, check_bb84, check_e91, QkdProtocol,
};

/// JSON schema tag for the report format.
pub const SCHEMA: &str = "v1";

/// An f64 serialized after rounding to 12 significant digits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sig12(pub f64);

fn round_sig12(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    let exp = v.abs().log10().floor() as i32;
    let scale = 10f64.powi(11 - exp);
    (v * scale).round() / scale
}

impl Serialize for Sig12 {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_f64(round_sig12(self.0))
    }
}

/// One named check inside a report.
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub worst_violation: Sig12,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl CheckResult {
    fn new(name: impl Into<String>, passed: bool, worst: f64) -> Self {
        Self {
            name: name.into(),
            passed,
            worst_violation: Sig12(worst),
            witness: None,
        }
    }

    fn with_witness(mut self, witness: Option<Assignment>) -> Self {
        self.witness = witness.map(format_assignment);
        self
    }
}

fn format_assignment(a: Assignment) -> String {
    a.iter()
        .map(|(n, v)| format!("{n}={v}"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// One phase value embedded in a key-distribution report.
#[derive(Clone, Debug, Serialize)]
pub struct PhaseEntry {
    pub indices: Vec<usize>,
    pub re: Sig12,
    pub im: Sig12,
}

/// One row of an exact simulation table.
#[derive(Clone, Debug, Serialize)]
pub struct SimulationEntry {
    pub alice_outcome: usize,
    pub alice_guess: usize,
    pub probability: Sig12,
}

/// The top-level verification report.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: String,
    pub inputs: serde_json::Value,
    pub tolerance: Sig12,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psi: Option<Vec<PhaseEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simulation: Option<Vec<SimulationEntry>>,
    /// Only present when timings are requested; excluded by default so
    /// reports stay byte-stable across runs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
}

impl Report {
    fn new(command: &str, inputs: serde_json::Value, tol: f64, checks: Vec<CheckResult>) -> Self {
        let passed = checks.iter().all(|c| c.passed);
        Report {
            schema: SCHEMA,
            command: command.to_string(),
            inputs,
            tolerance: Sig12(tol),
            passed,
            checks,
            psi: None,
            simulation: None,
            wall_time_ms: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serialization cannot fail")
    }

    /// Human-readable summary, one line per check.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!(
                "[{mark}] {} (worst violation {:.3e})",
                c.name, c.worst_violation.0
            ));
            if let Some(w) = &c.witness {
                out.push_str(&format!(" at {w}"));
            }
            out.push('\n');
        }
        out.push_str(if self.passed {
            "result: passed\n"
        } else {
            "result: FAILED\n"
        });
        out
    }
}

/// Where a family comes from: a shipped construction or a file.
#[derive(Clone, Debug)]
pub enum FamilySource {
    Dim(usize),
    File(std::path::PathBuf),
}

impl FamilySource {
    fn load(&self) -> Result<(ControlledFamily, serde_json::Value)> {
        match self {
            FamilySource::Dim(n) => Ok((mub_family(*n)?, serde_json::json!({ "dim": n }))),
            FamilySource::File(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    Error::ParseFamily(format!("cannot read {}: {e}", path.display()))
                })?;
                let fam = parse_family_file(&text)?;
                Ok((
                    fam,
                    serde_json::json!({ "file": path.display().to_string() }),
                ))
            }
        }
    }
}

/// Parse the family file format: a header line `dim m count N` followed by
/// N*m lines, each one basis vector as m whitespace-separated "re im" pairs.
pub fn parse_family_file(text: &str) -> Result<ControlledFamily> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| Error::ParseFamily("empty family file".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let (m, n) = match fields.as_slice() {
        ["dim", m, "count", n] => {
            let m: usize = m
                .parse()
                .map_err(|_| Error::ParseFamily("bad dimension in header".into()))?;
            let n: usize = n
                .parse()
                .map_err(|_| Error::ParseFamily("bad count in header".into()))?;
            (m, n)
        }
        _ => {
            return Err(Error::ParseFamily(
                "header must read `dim m count N`".into(),
            ))
        }
    };
    if m == 0 || n == 0 {
        return Err(Error::ParseFamily("dimension and count must be positive".into()));
    }
    let mut vectors = Vec::with_capacity(n * m);
    for line in lines {
        let nums: Vec<f64> = line
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| Error::ParseFamily(format!("bad number `{t}`")))
            })
            .collect::<Result<_>>()?;
        if nums.len() != 2 * m {
            return Err(Error::ParseFamily(format!(
                "expected {} numbers per vector line, found {}",
                2 * m,
                nums.len()
            )));
        }
        let vector: Vec<_> = nums.chunks(2).map(|p| c(p[0], p[1])).collect();
        vectors.push(vector);
    }
    if vectors.len() != n * m {
        return Err(Error::ParseFamily(format!(
            "expected {} vector lines, found {}",
            n * m,
            vectors.len()
        )));
    }
    let mut bases = Vec::with_capacity(n);
    for basis_vectors in vectors.chunks(m) {
        let mut basis = crate::numerics::ComplexMatrix::zeros(m, m);
        for (col, v) in basis_vectors.iter().enumerate() {
            for (row, z) in v.iter().enumerate() {
                basis.set(row, col, *z);
            }
        }
        bases.push(basis);
    }
    ControlledFamily::new(m, bases)
}

/// Serialize a family in the file format accepted by [`parse_family_file`].
pub fn format_family_file(f: &ControlledFamily) -> String {
    let mut out = format!("dim {} count {}\n", f.dim(), f.count());
    for a in 0..f.count() {
        for i in 0..f.dim() {
            let line: Vec<String> = f
                .vector(a, i)
                .iter()
                .map(|z| format!("{:?} {:?}", z.re, z.im))
                .collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
    }
    out
}

/// Build the basis family for a dimension and verify unitarity plus
/// pairwise unbiasedness.
pub fn run_check_mub(n: usize, tol: f64) -> Result<Report> {
    let family = mub_family(n)?;
    let mut checks = Vec::new();
    for a in 0..family.count() {
        let dev = family.basis(a).unitarity_deviation()?;
        checks.push(CheckResult::new(format!("unitary basis {a}"), dev <= tol, dev));
    }
    for a in 0..family.count() {
        for b in a + 1..family.count() {
            let dev = crate::families::unbiased_deviation(family.basis(a), family.basis(b))?;
            checks.push(CheckResult::new(
                format!("unbiased pair ({a},{b})"),
                dev <= tol,
                dev,
            ));
        }
    }
    Ok(Report::new(
        "check-mub",
        serde_json::json!({ "dim": n }),
        tol,
        checks,
    ))
}

/// Run the selected complementarity characterizations and report their
/// verdict agreement.
pub fn run_check_complementary(
    source: &FamilySource,
    methods: &[Method],
    tol: f64,
) -> Result<Report> {
    let (family, mut inputs) = source.load()?;
    inputs["methods"] = serde_json::json!(methods.iter().map(|m| m.name()).collect::<Vec<_>>());
    let mut checks = Vec::new();
    let mut verdicts = Vec::new();
    for method in methods {
        let rep = check_method(&family, *method, tol)?;
        verdicts.push(rep.passed);
        checks.push(
            CheckResult::new(format!("method {}", method.name()), rep.passed, rep.worst_violation)
                .with_witness(rep.witness),
        );
    }
    if methods.len() > 1 {
        let agree = verdicts.iter().all(|v| *v == verdicts[0]);
        // agreement is reported for information; it holds identically
        checks.push(CheckResult::new(
            "verdict agreement",
            agree,
            if agree { 0.0 } else { 1.0 },
        ));
    }
    Ok(Report::new("check-complementary", inputs, tol, checks))
}

fn phase_entries(psi: &crate::diagrams::PhaseCell) -> Vec<PhaseEntry> {
    psi.assignments()
        .into_iter()
        .filter(|a| a[0] != a[1])
        .map(|a| {
            let v = psi.value(&a);
            PhaseEntry {
                indices: a,
                re: Sig12(v.re),
                im: Sig12(v.im),
            }
        })
        .collect()
}

/// Run the key-distribution checks for one or both protocols, the
/// equivalence test, and the alpha identity for the extracted phase.
pub fn run_check_qkd(
    protocols: &[QkdProtocol],
    source: &FamilySource,
    tol: f64,
) -> Result<Report> {
    let (family, mut inputs) = source.load()?;
    inputs["protocols"] =
        serde_json::json!(protocols.iter().map(|p| p.name()).collect::<Vec<_>>());
    let mut checks = Vec::new();
    let mut embedded_psi = None;
    for protocol in protocols {
        let rep = match protocol {
            QkdProtocol::Bb84 => check_bb84(&family, tol)?,
            QkdProtocol::E91 => check_e91(&family, tol)?,
        };
        let name = protocol.name();
        checks.push(CheckResult::new(
            format!("{name} same-value support"),
            rep.ps_ok,
            if rep.ps_ok { 0.0 } else { rep.worst_violation },
        ));
        checks.push(
            CheckResult::new(
                format!("{name} phase unit modulus"),
                rep.pd_proportional && rep.psi_unit_modulus,
                rep.worst_violation,
            )
            .with_witness(rep.witness.clone()),
        );
        if let Some(psi) = rep.psi {
            let alpha = check_alpha_identity(&family, &psi, tol)?;
            checks.push(
                CheckResult::new(
                    format!("{name} alpha identity"),
                    alpha.holds,
                    alpha.worst_violation,
                )
                .with_witness(alpha.witness),
            );
            if embedded_psi.is_none() {
                embedded_psi = Some(phase_entries(&psi));
            }
        }
    }
    if protocols.len() > 1 {
        let b = build_bb84_lhs(&family)?;
        let e = build_e91_lhs(&family)?;
        let eq = tensors_equal(&b, &e, 1e-12)?;
        checks.push(
            CheckResult::new("bb84 e91 equivalence", eq.equal, eq.worst_deviation)
                .with_witness(if eq.equal { None } else { eq.witness }),
        );
    }
    let mut report = Report::new("check-qkd", inputs, tol, checks);
    report.psi = embedded_psi;
    Ok(report)
}

/// What the mean-king command should do.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeanKingMode {
    Construct,
    Verify,
    Simulate,
}

impl std::str::FromStr for MeanKingMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "construct" => Ok(MeanKingMode::Construct),
            "verify" => Ok(MeanKingMode::Verify),
            "simulate" => Ok(MeanKingMode::Simulate),
            other => Err(Error::Invalid(format!("unknown mode `{other}`"))),
        }
    }
}

/// Parameters of the mean-king command.
#[derive(Clone, Debug)]
pub struct MeanKingArgs {
    pub n: usize,
    pub mode: MeanKingMode,
    pub basis: Option<usize>,
    pub outcome: Option<usize>,
    pub corrupt_lookup: bool,
}

fn scheme_construct_checks(scheme: &MeanKingScheme, tol: f64) -> Vec<CheckResult> {
    let n = scheme.n();
    let counts_ok = scheme.family().count() == n + 1 && scheme.mu_basis().len() == n * n;
    let (ortho_ok, gram_dev) = check_orthonormal(scheme, tol);
    vec![
        CheckResult::new(
            format!("scheme shape ({} bases, {} states)", n + 1, n * n),
            counts_ok,
            0.0,
        ),
        CheckResult::new("measurement basis orthonormal", ortho_ok, gram_dev),
    ]
}

/// Build, verify or simulate a Mean King scheme.
pub fn run_mean_king(args: &MeanKingArgs, tol: f64) -> Result<Report> {
    let mut scheme = build_scheme(args.n)?;
    if args.corrupt_lookup {
        scheme = scheme.with_corrupted_lookup();
    }
    let inputs = serde_json::json!({
        "dim": args.n,
        "mode": match args.mode {
            MeanKingMode::Construct => "construct",
            MeanKingMode::Verify => "verify",
            MeanKingMode::Simulate => "simulate",
        },
        "basis": args.basis,
        "outcome": args.outcome,
        "corrupt_lookup": args.corrupt_lookup,
    });
    let mut simulation = None;
    let mut checks = scheme_construct_checks(&scheme, tol);
    match args.mode {
        MeanKingMode::Construct => {}
        MeanKingMode::Verify => {
            let functions: Vec<Vec<usize>> = (0..args.n * args.n)
                .map(|i| {
                    (0..scheme.family().count())
                        .map(|b| scheme.lookup(i, b))
                        .collect()
                })
                .collect();
            let collision = check_collision_lemma(scheme.family(), &functions, tol)?;
            checks.push(CheckResult::new(
                "collision identity",
                collision.holds,
                collision.worst_deviation,
            ));
            let support = verify_support(&scheme, tol);
            checks.push(
                CheckResult::new("support condition", support.ok, support.worst_overlap_sq)
                    .with_witness(support.witness.map(|(i, b, k)| {
                        vec![
                            ("state".to_string(), i),
                            ("basis".to_string(), b),
                            ("outcome".to_string(), k),
                        ]
                    })),
            );
            let rep = check_mk_equation(&scheme, tol)?;
            checks.push(CheckResult::new(
                "scheme equation",
                rep.equation_ok,
                rep.worst_violation,
            ));
            checks.push(CheckResult::new(
                format!("success probability {:.12}", rep.success_probability),
                (rep.success_probability - 1.0).abs() <= tol,
                (rep.success_probability - 1.0).abs(),
            ));
        }
        MeanKingMode::Simulate => {
            let basis = args.basis.ok_or_else(|| {
                Error::Invalid("simulate mode requires --basis".into())
            })?;
            let outcome = args.outcome.ok_or_else(|| {
                Error::Invalid("simulate mode requires --outcome".into())
            })?;
            let rows = simulate(&scheme, basis, outcome)?;
            let total: f64 = rows.iter().map(|r| r.probability).sum();
            let wrong: f64 = rows
                .iter()
                .filter(|r| r.alice_guess != outcome)
                .map(|r| r.probability)
                .sum();
            checks.push(CheckResult::new(
                "distribution normalization",
                (total - 1.0).abs() <= tol,
                (total - 1.0).abs(),
            ));
            checks.push(CheckResult::new(
                "guess matches outcome",
                wrong <= tol,
                wrong,
            ));
            simulation = Some(
                rows.into_iter()
                    .map(|r| SimulationEntry {
                        alice_outcome: r.alice_outcome,
                        alice_guess: r.alice_guess,
                        probability: Sig12(r.probability),
                    })
                    .collect(),
            );
        }
    }
    let mut report = Report::new("mean-king", inputs, tol, checks);
    report.simulation = simulation;
    Ok(report)
}
