use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use skewclifford::error::Error;
use skewclifford::gsca::{self, AnalyzeOptions};
use skewclifford::instance::{self, RawInstance};
use skewclifford::ncgb::{self, TermOrder};
use skewclifford::skewring::{self, QuadricSystem};

#[derive(Parser)]
#[command(name = instance::TOOL_NAME, version, about = "graded skew Clifford algebra toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputKind {
    Text,
    Json,
}

#[derive(Args)]
struct Common {
    /// Instance file (JSON).
    path: String,
    #[arg(long, value_enum, default_value = "text")]
    output: OutputKind,
}

#[derive(Args)]
struct AnalyzeFlags {
    /// Truncation degree for Hilbert data.
    #[arg(long)]
    max_degree: Option<usize>,
    /// Base-point-freeness mode: exact or scan:p[,k].
    #[arg(long)]
    bpf_mode: Option<String>,
    /// Step budget for the normalizing-sequence search.
    #[arg(long)]
    budget: Option<u64>,
    /// Generator precedence as a 1-based comma list, e.g. 2,1,3.
    #[arg(long)]
    precedence: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Check mu validity, mu-symmetry, and grading of the presentation.
    Validate(Common),
    /// Print the quadric system, raw and monic.
    Quadrics(Common),
    /// Search for a normalizing sequence spanning the quadric span.
    Normalize {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Decide base-point-freeness of the quadric system.
    Bpf {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        bpf_mode: Option<String>,
    },
    /// Hilbert data of the y-eliminated quotient (or of a presentation file).
    Hilbert {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        max_degree: Option<usize>,
        #[arg(long)]
        precedence: Option<String>,
        /// Treat the input as a presentation file instead of an instance.
        #[arg(long)]
        presentation: bool,
    },
    /// Run the full certification pipeline on one instance.
    Analyze {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flags: AnalyzeFlags,
    },
    /// Run the pipeline over a parameter grid and summarize.
    Search {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flags: AnalyzeFlags,
    },
}

fn parse_precedence(s: &str) -> Result<Vec<usize>, Error> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .ok()
                .and_then(|v| v.checked_sub(1))
                .ok_or_else(|| Error::Parse(format!("bad precedence entry {t:?}")))
        })
        .collect()
}

fn apply_flags(options: &mut AnalyzeOptions, flags: &AnalyzeFlags) -> Result<(), Error> {
    if let Some(d) = flags.max_degree {
        options.max_degree = d;
    }
    if let Some(b) = flags.budget {
        options.budget = b;
    }
    if let Some(m) = &flags.bpf_mode {
        options.bpf_mode = instance::parse_bpf_mode(m)?;
    }
    if let Some(p) = &flags.precedence {
        options.precedence = Some(parse_precedence(p)?);
    }
    Ok(())
}

fn emit(command: &str, payload: Value, text: String, output: OutputKind, started: Instant) {
    match output {
        OutputKind::Json => {
            let wrapped = instance::wrap_report(
                command,
                payload,
                Some(started.elapsed().as_millis()),
            );
            println!("{}", serde_json::to_string_pretty(&wrapped).unwrap());
        }
        OutputKind::Text => print!("{text}"),
    }
}

fn load_raw(path: &str) -> Result<RawInstance, Error> {
    let file = instance::load_instance_file(path)?;
    instance::resolve_instance(&file)
}

fn quadric_system(raw: &RawInstance) -> Result<QuadricSystem, Error> {
    let mu = gsca::validate_instance(raw.n, raw.field, &raw.mu_entries, &raw.matrices)
        .map_err(Error::Validation)?;
    QuadricSystem::new(mu, raw.matrices.clone())
}

fn cmd_validate(common: &Common) -> Result<u8, Error> {
    let started = Instant::now();
    let raw = load_raw(&common.path)?;
    let mut reasons: Vec<String> = Vec::new();
    let mu = match gsca::validate_instance(raw.n, raw.field, &raw.mu_entries, &raw.matrices) {
        Ok(mu) => Some(mu),
        Err(reason) => {
            reasons.push(reason);
            None
        }
    };
    // Grading of the presentation is informational: the y generators sit in
    // degree 2 by design, so generated_in_degree_one is false for every
    // instance and does not affect validity.
    let mut grading = None;
    if let Some(mu) = &mu {
        let g = gsca::build_gsca(mu, &raw.matrices)?;
        let report = gsca::validate_gsca_grading(&g);
        if !report.graded {
            reasons.extend(report.reasons.clone());
        }
        grading = Some(report);
    }
    let ok = reasons.is_empty();
    let payload = json!({
        "valid": ok,
        "mu_valid": mu.is_some(),
        "grading": grading.as_ref().map(|g| json!({
            "graded": g.graded,
            "quadratic": g.quadratic,
            "generated_in_degree_one": g.generated_in_degree_one,
        })),
        "reasons": reasons,
    });
    let mut text = format!("valid: {ok}\n");
    for r in &reasons {
        text.push_str(&format!("reason: {r}\n"));
    }
    emit("validate", payload, text, common.output, started);
    Ok(if ok { 0 } else { 1 })
}

fn cmd_quadrics(common: &Common) -> Result<u8, Error> {
    let started = Instant::now();
    let raw = load_raw(&common.path)?;
    let qsys = quadric_system(&raw)?;
    emit(
        "quadrics",
        instance::quadrics_json(&qsys),
        instance::quadrics_text(&qsys),
        common.output,
        started,
    );
    Ok(0)
}

fn cmd_normalize(common: &Common, budget: Option<u64>) -> Result<u8, Error> {
    let started = Instant::now();
    let raw = load_raw(&common.path)?;
    let qsys = quadric_system(&raw)?;
    let budget = budget.unwrap_or(raw.options.budget);
    let outcome = skewring::find_normalizing_sequence(&qsys.quadrics_monic, &qsys.mu, budget)?;
    emit(
        "normalize",
        instance::normalizing_json(&outcome, raw.n),
        instance::normalizing_text(&outcome, raw.n),
        common.output,
        started,
    );
    Ok(0)
}

fn cmd_bpf(common: &Common, mode: Option<&String>) -> Result<u8, Error> {
    let started = Instant::now();
    let raw = load_raw(&common.path)?;
    let qsys = quadric_system(&raw)?;
    let mode = match mode {
        Some(m) => instance::parse_bpf_mode(m)?,
        None => raw.options.bpf_mode,
    };
    let verdict = skewclifford::geometry::is_base_point_free(&qsys, mode)?;
    emit(
        "bpf",
        instance::bpf_json(&verdict),
        instance::bpf_text(&verdict),
        common.output,
        started,
    );
    Ok(0)
}

fn cmd_hilbert(
    common: &Common,
    max_degree: Option<usize>,
    precedence: Option<&String>,
    presentation: bool,
) -> Result<u8, Error> {
    let started = Instant::now();
    let (pres, _field, default_degree) = if presentation {
        let (p, f) = instance::load_presentation_file(&common.path)?;
        (p, f, 6)
    } else {
        let raw = load_raw(&common.path)?;
        let qsys = quadric_system(&raw)?;
        let g = gsca::build_gsca(&qsys.mu, &raw.matrices)?;
        let elim = gsca::eliminate_y(&g)?;
        (elim.presentation, raw.field, raw.options.max_degree)
    };
    let degree = max_degree.unwrap_or(default_degree);
    let order = match precedence {
        Some(p) => TermOrder::with_precedence(&parse_precedence(p)?)?,
        None => TermOrder::deglex(pres.gen_names.len()),
    };
    let h = ncgb::hilbert_function(&pres, degree, order)?;
    let growth = ncgb::growth_estimate(&h).ok();
    let mut text = format!(
        "hilbert dims: {}\n",
        h.dims
            .iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join(",")
    );
    if let Some(g) = &growth {
        text.push_str(&instance::growth_text(g));
    }
    emit(
        "hilbert",
        instance::hilbert_json(&h, growth.as_ref()),
        text,
        common.output,
        started,
    );
    Ok(0)
}

fn cmd_analyze(common: &Common, flags: &AnalyzeFlags) -> Result<u8, Error> {
    let started = Instant::now();
    let raw = load_raw(&common.path)?;
    let mut options = raw.options.clone();
    apply_flags(&mut options, flags)?;
    let mu = gsca::validate_instance(raw.n, raw.field, &raw.mu_entries, &raw.matrices)
        .map_err(Error::Validation)?;
    let report = gsca::analyze(&mu, &raw.matrices, &options)?;
    emit(
        "analyze",
        instance::analysis_json(&report, raw.n),
        instance::analysis_text(&report, raw.n),
        common.output,
        started,
    );
    Ok(0)
}

fn cmd_search(common: &Common, flags: &AnalyzeFlags) -> Result<u8, Error> {
    let started = Instant::now();
    let grid = instance::load_grid_file(&common.path)?;
    for axis in &grid.grid {
        if axis.values.is_empty() {
            return Err(Error::Parse(format!("grid axis {:?} has no values", axis.name)));
        }
    }
    // all assignments, last axis varying fastest
    let mut assignments: Vec<Vec<(String, String)>> = vec![Vec::new()];
    for axis in &grid.grid {
        let mut next = Vec::new();
        for partial in &assignments {
            for v in &axis.values {
                let mut a = partial.clone();
                a.push((axis.name.clone(), v.clone()));
                next.push(a);
            }
        }
        assignments = next;
    }
    let mut points = Vec::new();
    let mut summary: Map<String, Value> = Map::new();
    let mut text = String::new();
    for assignment in &assignments {
        let mut file = grid.instance.clone();
        for (name, value) in assignment {
            file.parameters
                .insert(name.clone(), Value::String(value.clone()));
        }
        let raw = instance::resolve_instance(&file)?;
        let mut options = raw.options.clone();
        apply_flags(&mut options, flags)?;
        let label = assignment
            .iter()
            .map(|(n, v)| format!("{n}={v}"))
            .collect::<Vec<_>>()
            .join(", ");
        let outcome = gsca::validate_instance(raw.n, raw.field, &raw.mu_entries, &raw.matrices)
            .map_err(Error::Validation)
            .and_then(|mu| gsca::analyze(&mu, &raw.matrices, &options));
        let (point_json, point_text, key) = match &outcome {
            Ok(report) => {
                let normalizing = match &report.normalizing {
                    Some(skewring::SearchOutcome::Found { .. }) => "normalizing=true",
                    Some(skewring::SearchOutcome::NotFoundExhaustive) => "normalizing=false",
                    Some(skewring::SearchOutcome::Unknown) => "normalizing=unknown",
                    None => "normalizing=skipped",
                };
                let bpf = match &report.bpf {
                    Some(Ok(v)) if v.base_point_free => "bpf=true",
                    Some(Ok(_)) => "bpf=false",
                    Some(Err(_)) => "bpf=error",
                    None => "bpf=skipped",
                };
                (
                    instance::analysis_json(report, raw.n),
                    instance::analysis_text(report, raw.n),
                    format!("{normalizing}, {bpf}"),
                )
            }
            Err(e) => (
                json!({"error": e.to_string()}),
                format!("error: {e}\n"),
                "invalid".to_string(),
            ),
        };
        let count = summary.get(&key).and_then(Value::as_u64).unwrap_or(0) + 1;
        summary.insert(key, json!(count));
        text.push_str(&format!("== {label} ==\n{point_text}"));
        points.push(json!({"parameters": label, "report": point_json}));
    }
    text.push_str("summary:\n");
    for (k, v) in &summary {
        text.push_str(&format!("  {k}: {v}\n"));
    }
    let payload = json!({
        "points": points,
        "summary": Value::Object(summary),
    });
    emit("search", payload, text, common.output, started);
    Ok(0)
}

fn run() -> Result<u8, Error> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Validate(c) => cmd_validate(c),
        Command::Quadrics(c) => cmd_quadrics(c),
        Command::Normalize { common, budget } => cmd_normalize(common, *budget),
        Command::Bpf { common, bpf_mode } => cmd_bpf(common, bpf_mode.as_ref()),
        Command::Hilbert {
            common,
            max_degree,
            precedence,
            presentation,
        } => cmd_hilbert(common, *max_degree, precedence.as_ref(), *presentation),
        Command::Analyze { common, flags } => cmd_analyze(common, flags),
        Command::Search { common, flags } => cmd_search(common, flags),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(e @ (Error::Parse(_) | Error::Io(_))) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
