//! Instance and grid file ingestion (self-describing JSON with exact scalar
//! strings), parameter substitution, and report construction in both
//! machine-readable and human-readable form.

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::freealg::{FreePoly, Presentation};
use crate::geometry::{BpfMode, BpfVerdict};
use crate::gsca::{AnalysisReport, AnalyzeOptions};
use crate::ncgb::{Growth, GrowthEstimate, HilbertData};
use crate::scalars::{FieldSpec, Matrix, Scalar};
use crate::skewring::{NormalityCertificate, QuadricSystem, SearchOutcome};

pub const TOOL_NAME: &str = "skewclifford";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

// ---------------------------------------------------------------------------
// File formats
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum FieldValue {
    Name(String),
    Prime { prime: u64 },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
pub struct OptionsFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_degree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bpf_mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
}

/// The on-disk instance document. Scalar entries are strings to preserve
/// exactness and may be expressions in the named parameters.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct InstanceFile {
    pub field: FieldValue,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Map::is_empty")]
    pub parameters: Map<String, Value>,
    pub mu: Vec<Vec<String>>,
    pub matrices: Vec<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "options_empty")]
    pub options: OptionsFile,
}

fn options_empty(o: &OptionsFile) -> bool {
    o == &OptionsFile::default()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridAxis {
    pub name: String,
    pub values: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridFile {
    pub instance: InstanceFile,
    pub grid: Vec<GridAxis>,
}

/// Presentation input for the `hilbert` subcommand.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PresentationFile {
    pub field: FieldValue,
    pub generators: Vec<GeneratorSpec>,
    pub relations: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub name: String,
    #[serde(default = "default_degree")]
    pub degree: u32,
}

fn default_degree() -> u32 {
    1
}

pub fn parse_field(fv: &FieldValue) -> Result<FieldSpec> {
    match fv {
        FieldValue::Name(s) if s == "rationals" || s == "Q" => Ok(FieldSpec::Rationals),
        FieldValue::Name(s) => Err(Error::Parse(format!(
            "unknown field {s:?}; use \"rationals\" or {{\"prime\": p}}"
        ))),
        FieldValue::Prime { prime } => FieldSpec::prime_field(*prime),
    }
}

/// Evaluate a scalar expression: optional leading sign, then atoms joined
/// by '*' and '/'. An atom is a literal scalar or a parameter name.
pub fn eval_expr(expr: &str, params: &Map<String, Value>, field: FieldSpec) -> Result<Scalar> {
    let expr = expr.trim();
    let (negate, rest) = match expr.strip_prefix('-') {
        Some(r) => (true, r.trim()),
        None => (false, expr),
    };
    if rest.is_empty() {
        return Err(Error::Parse(format!("empty scalar expression {expr:?}")));
    }
    let mut acc = field.one();
    let mut op = '*';
    let mut token = String::new();
    let mut chars = rest.chars().chain(std::iter::once('*')).peekable();
    for ch in &mut chars {
        if ch == '*' || ch == '/' {
            let atom = token.trim();
            if atom.is_empty() {
                return Err(Error::Parse(format!("malformed expression {expr:?}")));
            }
            let v = match params.get(atom) {
                Some(Value::String(s)) => field.parse(s)?,
                Some(other) => field.parse(&other.to_string())?,
                None => {
                    if atom.chars().next().map(|c| c.is_ascii_alphabetic()) == Some(true) {
                        return Err(Error::Parse(format!("unknown parameter {atom:?}")));
                    }
                    field.parse(atom)?
                }
            };
            acc = match op {
                '*' => acc.mul(&v)?,
                _ => acc.div(&v)?,
            };
            op = ch;
            token.clear();
        } else {
            token.push(ch);
        }
    }
    if negate {
        acc = acc.neg();
    }
    Ok(acc)
}

/// An instance with all expressions evaluated but mu-validation not yet
/// applied, so `validate` can report violations instead of failing.
#[derive(Debug, Clone)]
pub struct RawInstance {
    pub field: FieldSpec,
    pub n: usize,
    pub mu_entries: Vec<Scalar>,
    pub matrices: Vec<Matrix>,
    pub options: AnalyzeOptions,
}

pub fn parse_bpf_mode(s: &str) -> Result<BpfMode> {
    if s == "exact" {
        return Ok(BpfMode::Exact);
    }
    if let Some(rest) = s.strip_prefix("scan:") {
        let (p, ext) = match rest.split_once(',') {
            Some((p, k)) => (p, k.parse::<u32>().map_err(|_| {
                Error::Parse(format!("bad scan extension in {s:?}"))
            })?),
            None => (rest, 1),
        };
        let p: u64 = p
            .parse()
            .map_err(|_| Error::Parse(format!("bad scan prime in {s:?}")))?;
        return Ok(BpfMode::FiniteFieldScan { p, ext });
    }
    Err(Error::Parse(format!(
        "bad bpf mode {s:?}; use exact or scan:p[,k]"
    )))
}

pub fn resolve_instance(file: &InstanceFile) -> Result<RawInstance> {
    let field = parse_field(&file.field)?;
    let n = file.n;
    if file.mu.len() != n || file.mu.iter().any(|r| r.len() != n) {
        return Err(Error::Parse(format!("mu must be an {n}x{n} array")));
    }
    let mut mu_entries = Vec::with_capacity(n * n);
    for row in &file.mu {
        for e in row {
            mu_entries.push(eval_expr(e, &file.parameters, field)?);
        }
    }
    let mut matrices = Vec::new();
    for (k, m) in file.matrices.iter().enumerate() {
        if m.len() != n || m.iter().any(|r| r.len() != n) {
            return Err(Error::Parse(format!(
                "matrix {} must be an {n}x{n} array",
                k + 1
            )));
        }
        let mut entries = Vec::with_capacity(n * n);
        for row in m {
            for e in row {
                entries.push(eval_expr(e, &file.parameters, field)?);
            }
        }
        matrices.push(Matrix::new(n, n, field, entries)?);
    }
    let mut options = AnalyzeOptions::default();
    if let Some(d) = file.options.max_degree {
        options.max_degree = d;
    }
    if let Some(b) = file.options.budget {
        options.budget = b;
    }
    if let Some(m) = &file.options.bpf_mode {
        options.bpf_mode = parse_bpf_mode(m)?;
    }
    Ok(RawInstance {
        field,
        n,
        mu_entries,
        matrices,
        options,
    })
}

pub fn load_instance_file(path: &str) -> Result<InstanceFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{path}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{path}: {e}")))
}

pub fn load_grid_file(path: &str) -> Result<GridFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{path}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{path}: {e}")))
}

pub fn load_presentation_file(path: &str) -> Result<(Presentation, FieldSpec)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{path}: {e}")))?;
    let file: PresentationFile =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{path}: {e}")))?;
    let field = parse_field(&file.field)?;
    let names: Vec<String> = file.generators.iter().map(|g| g.name.clone()).collect();
    let degrees: Vec<u32> = file.generators.iter().map(|g| g.degree).collect();
    let relations: Vec<FreePoly> = file
        .relations
        .iter()
        .map(|r| FreePoly::parse_text(r, &names, field))
        .collect::<Result<_>>()?;
    Ok((Presentation::new(field, names, degrees, relations)?, field))
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

fn z_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("z{i}")).collect()
}

pub fn quadrics_json(qsys: &QuadricSystem) -> Value {
    let items: Vec<Value> = qsys
        .quadrics_raw
        .iter()
        .zip(&qsys.quadrics_monic)
        .enumerate()
        .map(|(k, (raw, monic))| {
            json!({
                "index": k + 1,
                "raw": raw.to_text(),
                "monic": monic.to_text(),
            })
        })
        .collect();
    json!({ "quadrics": items })
}

pub fn quadrics_text(qsys: &QuadricSystem) -> String {
    let mut out = String::new();
    for (k, (raw, monic)) in qsys
        .quadrics_raw
        .iter()
        .zip(&qsys.quadrics_monic)
        .enumerate()
    {
        out.push_str(&format!(
            "q{} raw = {}\nq{} monic = {}\n",
            k + 1,
            raw.to_text(),
            k + 1,
            monic.to_text()
        ));
    }
    out
}

fn certificate_json(cert: &NormalityCertificate, n: usize) -> Value {
    let names = z_names(n);
    json!({
        "element": cert.element.to_text(&names),
        "ideal": cert.ideal.iter().map(|f| f.to_text(&names)).collect::<Vec<_>>(),
        "degree_checked": cert.degree_checked,
        "verdict": cert.verdict,
        "degenerate_zero": cert.degenerate_zero,
        "identities": cert.report_lines(&names),
    })
}

pub fn normalizing_json(outcome: &SearchOutcome, n: usize) -> Value {
    match outcome {
        SearchOutcome::Found {
            sequence,
            certificates,
        } => json!({
            "status": "true",
            "sequence": sequence.iter().map(|q| q.to_text()).collect::<Vec<_>>(),
            "certificates": certificates
                .iter()
                .map(|c| certificate_json(c, n))
                .collect::<Vec<_>>(),
        }),
        SearchOutcome::NotFoundExhaustive => json!({
            "status": "false",
            "reason": "exhaustive projective enumeration over the prime field found no normalizing sequence",
        }),
        SearchOutcome::Unknown => json!({
            "status": "unknown",
            "reason": "search budget or rational test set exhausted; no certified negative over the rationals",
        }),
    }
}

pub fn normalizing_text(outcome: &SearchOutcome, n: usize) -> String {
    match outcome {
        SearchOutcome::Found {
            sequence,
            certificates,
        } => {
            let mut out = String::from("normalizing: true\n");
            for (i, q) in sequence.iter().enumerate() {
                out.push_str(&format!("  r{} = {}\n", i + 1, q.to_text()));
            }
            let names = z_names(n);
            for cert in certificates {
                for line in cert.report_lines(&names) {
                    out.push_str(&format!("  {line}\n"));
                }
            }
            out
        }
        SearchOutcome::NotFoundExhaustive => {
            "normalizing: false (certified by exhaustive enumeration)\n".into()
        }
        SearchOutcome::Unknown => "normalizing: unknown (budget exhausted)\n".into(),
    }
}

pub fn bpf_json(v: &BpfVerdict) -> Value {
    json!({
        "base_point_free": v.base_point_free,
        "certified": v.certified,
        "witness": v.witness.as_ref().map(|w| w.to_string()),
        "mode": v.mode_note,
        "components": v.components.iter().map(|c| json!({
            "support": c.support,
            "consistent": c.consistent,
            "violated_triple": c.violated.map(|(i, j, k)| vec![i, j, k]),
            "empty": c.empty,
            "detail": c.detail,
        })).collect::<Vec<_>>(),
    })
}

pub fn bpf_text(v: &BpfVerdict) -> String {
    let mut out = format!(
        "base_point_free: {}{}\n",
        v.base_point_free,
        if v.certified { "" } else { " (heuristic)" }
    );
    if let Some(w) = &v.witness {
        out.push_str(&format!("witness: {w}\n"));
    }
    out.push_str(&format!("mode: {}\n", v.mode_note));
    for c in &v.components {
        out.push_str(&format!(
            "component support {:?}: {}\n",
            c.support,
            c.detail
        ));
    }
    out
}

pub fn hilbert_json(h: &HilbertData, growth: Option<&GrowthEstimate>) -> Value {
    json!({
        "dims": h.dims,
        "growth": growth.map(growth_json),
    })
}

pub fn growth_json(g: &GrowthEstimate) -> Value {
    let class = match &g.classification {
        Growth::Polynomial { delta } => json!({"kind": "polynomial", "delta": delta}),
        Growth::Exponential => json!({"kind": "exponential"}),
        Growth::Inconclusive => json!({"kind": "inconclusive"}),
    };
    json!({ "estimate": class, "evidence": g.evidence })
}

pub fn growth_text(g: &GrowthEstimate) -> String {
    let class = match &g.classification {
        Growth::Polynomial { delta } => format!("polynomial(delta = {delta})"),
        Growth::Exponential => "exponential".into(),
        Growth::Inconclusive => "inconclusive".into(),
    };
    format!("growth estimate: {class}\n")
}

pub fn analysis_json(r: &AnalysisReport, n: usize) -> Value {
    let bpf = r.bpf.as_ref().map(|res| match res {
        Ok(v) => bpf_json(v),
        Err(e) => json!({"error": e.to_string()}),
    });
    let elimination = r.elimination.as_ref().map(|res| match res {
        Ok(e) => {
            let xn: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
            json!({
                "y_definitions": e.y_definitions.iter().map(|f| f.to_text(&xn)).collect::<Vec<_>>(),
                "x_relations": e.x_relations.iter().map(|f| f.to_text(&xn)).collect::<Vec<_>>(),
            })
        }
        Err(e) => json!({"error": e.to_string()}),
    });
    json!({
        "mu_valid": r.mu_valid,
        "matrices_mu_symmetric": r.matrices_mu_symmetric,
        "quadrics": r.quadrics.as_ref().map(quadrics_json),
        "normalizing": r.normalizing.as_ref().map(|o| normalizing_json(o, n)),
        "bpf": bpf,
        "elimination": elimination,
        "hilbert": r.hilbert.as_ref().map(|h| hilbert_json(h, r.growth.as_ref())),
        "notes": r.notes,
    })
}

pub fn analysis_text(r: &AnalysisReport, n: usize) -> String {
    let mut out = String::new();
    out.push_str(&format!("mu valid: {}\n", r.mu_valid));
    out.push_str(&format!(
        "matrices mu-symmetric: {}\n",
        r.matrices_mu_symmetric
    ));
    if let Some(q) = &r.quadrics {
        out.push_str(&quadrics_text(q));
    }
    if let Some(o) = &r.normalizing {
        out.push_str(&normalizing_text(o, n));
    }
    match &r.bpf {
        Some(Ok(v)) => out.push_str(&bpf_text(v)),
        Some(Err(e)) => out.push_str(&format!("bpf: error: {e}\n")),
        None => {}
    }
    match &r.elimination {
        Some(Ok(e)) => {
            let xn: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
            for (k, d) in e.y_definitions.iter().enumerate() {
                out.push_str(&format!("y{} = {}\n", k + 1, d.to_text(&xn)));
            }
            for rel in &e.x_relations {
                out.push_str(&format!("x-relation: {}\n", rel.to_text(&xn)));
            }
        }
        Some(Err(e)) => out.push_str(&format!("elimination: {e}\n")),
        None => {}
    }
    if let Some(h) = &r.hilbert {
        out.push_str(&format!(
            "hilbert dims: {}\n",
            h.dims
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join(",")
        ));
    }
    if let Some(g) = &r.growth {
        out.push_str(&growth_text(g));
    }
    for note in &r.notes {
        out.push_str(&format!("note: {note}\n"));
    }
    out
}

/// Wrap a payload with tool metadata. Timing is attached by the caller and
/// excluded from determinism comparisons.
pub fn wrap_report(command: &str, payload: Value, timing_ms: Option<u128>) -> Value {
    let mut map = Map::new();
    map.insert("tool".into(), json!(TOOL_NAME));
    map.insert("version".into(), json!(TOOL_VERSION));
    map.insert("command".into(), json!(command));
    map.insert("report".into(), payload);
    if let Some(t) = timing_ms {
        map.insert("timing_ms".into(), json!(t));
    }
    Value::Object(map)
}
