use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use hallplane::collineations::verify_group_propositions;
use hallplane::configs::{
    exists_desargues, find_non_pappus_witness, pair_set, run_question, verify_desargues, Mode, PairSet, PointScope,
    Question, QuestionVerdict, SearchOptions,
};
use hallplane::constructions::{sweep_case, ConstructionTag};
use hallplane::{HallSystem, LineClass, PlaneKind, PlaneTables, PrimePowerField};

const CLAIMS: &str = include_str!("claims.json");

#[derive(Parser)]
#[command(name = "hallplane", version, about = "Hall planes, weak Pappus questions and their claims")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args, Clone)]
struct Opts {
    /// Characteristic of the basefield.
    #[arg(long, global = true, default_value_t = 3)]
    p: u32,
    /// Degree of the basefield over its prime field.
    #[arg(long, global = true, default_value_t = 1)]
    k: u32,
    /// Coefficient r of x^2 - rx - s, as a basefield element index.
    #[arg(long, global = true, requires = "s")]
    r: Option<u8>,
    /// Coefficient s of x^2 - rx - s, as a basefield element index.
    #[arg(long, global = true, requires = "r")]
    s: Option<u8>,
    /// Use the Desarguesian plane over F_{q^2} instead of the Hall plane.
    #[arg(long, global = true)]
    oracle: bool,
    /// Line pairs to search; defaults to canonical on Hall planes and all on the oracle.
    #[arg(long, global = true, value_enum)]
    pairs: Option<PairsArg>,
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Nondegenerate)]
    mode: ModeArg,
    #[arg(long, global = true, value_enum, default_value_t = ScopeArg::Affine)]
    scope: ScopeArg,
    /// Cap on instances examined per pair.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Evaluate every n-th unknown assignment in sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    stride: u64,
    /// Write the report (or the incidence data for `plane export`) here.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Claims manifest to check against, replacing the built-in one.
    #[arg(long, global = true)]
    claims: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Build the plane and print its counts, or export its incidence.
    Plane {
        #[arg(value_enum)]
        action: PlaneAction,
    },
    /// Axiom checks, or the collineation group propositions.
    Suite {
        #[arg(value_enum)]
        action: SuiteAction,
    },
    /// Answer a weak Pappus question on each selected line pair.
    Question {
        #[arg(value_enum)]
        which: QuestionArg,
    },
    /// Sweep an explicit construction over all parameters and unknowns.
    Sweep {
        /// A construction case name, or `all`.
        case: String,
    },
    /// Search for a configuration.
    Witness {
        #[arg(value_enum)]
        kind: WitnessKind,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PlaneAction {
    Build,
    Export,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteAction {
    Axioms,
    Groups,
}

#[derive(Clone, Copy, ValueEnum)]
enum WitnessKind {
    Desargues,
    NonPappus,
}

#[derive(Clone, Copy, ValueEnum)]
enum QuestionArg {
    #[value(name = "3p3")]
    ThreePlusThree,
    #[value(name = "3p2")]
    ThreePlusTwo,
    #[value(name = "3p1")]
    ThreePlusOne,
    #[value(name = "3p0")]
    ThreePlusZero,
    #[value(name = "2p0")]
    TwoPlusZero,
    Count,
}

impl QuestionArg {
    fn question(self) -> Question {
        match self {
            QuestionArg::ThreePlusThree => Question::ThreePlusThree,
            QuestionArg::ThreePlusTwo => Question::ThreePlusTwo,
            QuestionArg::ThreePlusOne => Question::ThreePlusOne,
            QuestionArg::ThreePlusZero => Question::ThreePlusZero,
            QuestionArg::TwoPlusZero => Question::TwoPlusZero,
            QuestionArg::Count => Question::Count,
        }
    }
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum PairsArg {
    Canonical,
    All,
    Infinity,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Nondegenerate,
    Relaxed,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScopeArg {
    Affine,
    Projective,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum FormatArg {
    Json,
    Text,
}

fn value_name<T: ValueEnum>(v: &T) -> String {
    v.to_possible_value().map(|p| p.get_name().to_string()).unwrap_or_default()
}

#[derive(Serialize)]
struct PlaneSpec {
    kind: &'static str,
    p: u32,
    k: u32,
    q: usize,
    order: usize,
    r: Option<u8>,
    s: Option<u8>,
}

#[derive(Serialize)]
struct RunReport {
    tool: &'static str,
    version: &'static str,
    plane: PlaneSpec,
    command: String,
    options: Value,
    result: Value,
    claims: Vec<ClaimResult>,
    seed: u64,
    wall_time_ms: u64,
}

#[derive(Deserialize)]
struct Manifest {
    claims: Vec<Claim>,
}

#[derive(Deserialize)]
struct Claim {
    id: String,
    statement: String,
    command: String,
    subject: String,
    plane: Option<String>,
    orders: Option<Vec<usize>>,
    pairs: Option<Vec<String>>,
    scope: Option<String>,
    mode: Option<String>,
    expect: bool,
}

#[derive(Serialize)]
struct ClaimResult {
    id: String,
    statement: String,
    expected: bool,
    observed: Option<bool>,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Value>,
}

/// What a command established, for matching against the claims manifest.
struct Observation {
    subject: String,
    value: bool,
    /// False when a budget cut the search short before it could decide.
    decisive: bool,
    witness: Option<Value>,
}

struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn build_plane(o: &Opts) -> Result<(PlaneTables, PlaneSpec), UsageError> {
    let field = PrimePowerField::new(o.p, o.k)?;
    let q = field.order();
    if o.oracle {
        let plane = PlaneTables::field_oracle(o.p, o.k)?;
        let spec = PlaneSpec { kind: "field", p: o.p, k: o.k, q, order: plane.order(), r: None, s: None };
        return Ok((plane, spec));
    }
    let h = match (o.r, o.s) {
        (Some(r), Some(s)) => HallSystem::with_quadratic(field, r, s)?,
        _ => HallSystem::new(field),
    };
    let (r, s) = (h.r(), h.s());
    let plane = PlaneTables::hall(h)?;
    let spec = PlaneSpec { kind: "hall", p: o.p, k: o.k, q, order: plane.order(), r: Some(r), s: Some(s) };
    Ok((plane, spec))
}

fn pairs_arg(o: &Opts, plane: &PlaneTables) -> PairsArg {
    o.pairs.unwrap_or(match plane.kind() {
        PlaneKind::Hall => PairsArg::Canonical,
        _ => PairsArg::All,
    })
}

fn run(cli: &Cli) -> Result<ExitCode, UsageError> {
    let start = Instant::now();
    let o = &cli.opts;
    if let Some(n) = o.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let (plane, spec) = build_plane(o)?;
    let pairs = pairs_arg(o, &plane);
    let search = SearchOptions {
        mode: match o.mode {
            ModeArg::Nondegenerate => Mode::Nondegenerate,
            ModeArg::Relaxed => Mode::Relaxed,
        },
        scope: match o.scope {
            ScopeArg::Affine => PointScope::Affine,
            ScopeArg::Projective => PointScope::Projective,
        },
        budget: o.budget,
        ..SearchOptions::default()
    };
    let pair_list = || {
        pair_set(
            &plane,
            match pairs {
                PairsArg::Canonical => PairSet::Canonical,
                PairsArg::All => PairSet::All,
                PairsArg::Infinity => PairSet::Infinity,
            },
        )
    };

    let (command, result, observations) = match &cli.command {
        Command::Plane { action: PlaneAction::Export } => {
            match &o.out {
                Some(path) => plane.export_incidence(BufWriter::new(File::create(path)?))?,
                None => plane.export_incidence(io::stdout().lock())?,
            }
            return Ok(ExitCode::SUCCESS);
        }
        Command::Plane { action: PlaneAction::Build } => ("plane build".to_string(), plane_counts(&plane), vec![]),
        Command::Suite { action: SuiteAction::Axioms } => {
            let (result, obs) = axiom_suite(&plane);
            ("suite axioms".to_string(), result, obs)
        }
        Command::Suite { action: SuiteAction::Groups } => {
            let report = verify_group_propositions(&plane)?;
            let ok = report.all_hold();
            let obs = Observation { subject: "groups".into(), value: ok, decisive: true, witness: None };
            ("suite groups".to_string(), serde_json::to_value(&report)?, vec![obs])
        }
        Command::Question { which } => {
            let question = which.question();
            let verdicts: Vec<QuestionVerdict> =
                pair_list()?.iter().map(|pair| run_question(&plane, pair, question, &search)).collect();
            let affirmed = verdicts.iter().all(|v| v.affirmed);
            let complete = verdicts.iter().all(|v| v.complete);
            let failing = verdicts.iter().find(|v| !v.affirmed);
            let obs = Observation {
                subject: question.name().to_string(),
                value: affirmed,
                decisive: complete || !affirmed,
                witness: failing.and_then(|v| v.witness.as_ref()).map(serde_json::to_value).transpose()?,
            };
            let result = json!({
                "pairs": verdicts.len(),
                "affirmed_pairs": verdicts.iter().filter(|v| v.affirmed).count(),
                "complete": complete,
                "affirmed": affirmed,
                "instances": verdicts.iter().map(|v| v.instances).sum::<u64>(),
                "failures": verdicts.iter().map(|v| v.failures).sum::<u64>(),
                "pappus_count": verdicts.iter().map(|v| v.pappus_count).sum::<Option<u64>>(),
                "verdicts": verdicts,
            });
            (format!("question {}", question.name()), result, vec![obs])
        }
        Command::Sweep { case } => {
            let tags: Vec<ConstructionTag> = if case == "all" {
                ConstructionTag::ALL.to_vec()
            } else {
                vec![ConstructionTag::parse(case).ok_or_else(|| {
                    let names: Vec<_> = ConstructionTag::ALL.iter().map(|t| t.name()).collect();
                    UsageError(format!("unknown case `{case}`; expected `all` or one of {}", names.join(", ")))
                })?]
            };
            let mut summaries = Vec::new();
            for tag in tags {
                summaries.push(sweep_case(&plane, tag, o.stride)?);
            }
            let ok = summaries.iter().all(|s| s.all_pappus());
            let witness = summaries
                .iter()
                .find(|s| !s.all_pappus())
                .map(|s| json!({"case": s.tag, "non_pappus": s.non_pappus.first(), "mismatch": s.first_mismatch}));
            let obs = Observation { subject: "construction".into(), value: ok, decisive: true, witness };
            (format!("sweep {case}"), json!({ "all_pappus": ok, "sweeps": summaries }), vec![obs])
        }
        Command::Witness { kind: WitnessKind::Desargues } => {
            let found = exists_desargues(&plane).ok();
            let verified = found.as_ref().map(|w| verify_desargues(&plane, w).is_ok()).unwrap_or(false);
            let obs = Observation { subject: "desargues".into(), value: verified, decisive: true, witness: None };
            ("witness desargues".to_string(), json!({ "found": verified, "witness": found }), vec![obs])
        }
        Command::Witness { kind: WitnessKind::NonPappus } => {
            let found = match find_non_pappus_witness(&plane, &pair_list()?) {
                Ok(s) => Some(s),
                Err(hallplane::Error::NotFound) => None,
                Err(e) => return Err(e.into()),
            };
            let obs = Observation { subject: "non-pappus".into(), value: found.is_some(), decisive: true, witness: None };
            ("witness non-pappus".to_string(), json!({ "found": found.is_some(), "witness": found }), vec![obs])
        }
    };

    let command_name = command.split_whitespace().next().unwrap_or_default().to_string();
    let claims = evaluate_claims(&command_name, &spec, pairs, o, observations)?;
    let failed = claims.iter().any(|c| c.status == "fail");
    let mut result = result;
    strip_timings(&mut result);
    let report = RunReport {
        tool: "hallplane",
        version: env!("CARGO_PKG_VERSION"),
        plane: spec,
        command,
        options: json!({
            "pairs": value_name(&pairs),
            "mode": value_name(&o.mode),
            "scope": value_name(&o.scope),
            "budget": o.budget,
            "stride": o.stride,
        }),
        result,
        claims,
        seed: 0,
        wall_time_ms: start.elapsed().as_millis() as u64,
    };
    let rendered = match o.format {
        FormatArg::Json => serde_json::to_string_pretty(&report)? + "\n",
        FormatArg::Text => render_text(&report),
    };
    match &o.out {
        Some(path) => std::fs::write(path, rendered)?,
        None => io::stdout().lock().write_all(rendered.as_bytes())?,
    }
    for c in report.claims.iter().filter(|c| c.status == "fail") {
        eprintln!("claim failed: {} ({})", c.id, c.statement);
        if let Some(w) = &c.witness {
            eprintln!("  witness: {w}");
        }
    }
    Ok(if failed { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn plane_counts(plane: &PlaneTables) -> Value {
    json!({
        "order": plane.order(),
        "points": plane.num_points(),
        "lines": plane.num_lines(),
        "affine_lines": plane.affine_lines().count(),
        "bf_lines": plane.count_class(LineClass::Bf),
        "nbf_lines": plane.count_class(LineClass::Nbf),
    })
}

fn axiom_suite(plane: &PlaneTables) -> (Value, Vec<Observation>) {
    let n = plane.order();
    let plane_axioms = plane.verify_axioms().err().map(|e| e.to_string());
    let mut result = json!({ "plane": plane_counts(plane), "plane_axioms_error": plane_axioms });
    let mut ok = plane_axioms.is_none() && plane.affine_lines().count() == n * n + n;
    let mut obs = Vec::new();
    if let Some(h) = plane.hall_system() {
        let q = h.q();
        let field_error = h.basefield().check_axioms().err();
        let right = h.right_distributivity_violation();
        let counts_ok = plane.count_class(LineClass::Bf) == q * q * q + q * q
            && plane.count_class(LineClass::Nbf) == q * q * q * q - q * q * q;
        let left = h.left_distributivity_violation();
        let assoc = h.associativity_violation();
        let comm = h.commutativity_violation();
        ok &= field_error.is_none() && right.is_none() && h.has_identity() && h.rows_are_bijective() && counts_ok;
        result["basefield_axioms_error"] = json!(field_error);
        result["right_distributivity_violation"] = json!(right);
        result["identity"] = json!(h.has_identity());
        result["rows_bijective"] = json!(h.rows_are_bijective());
        result["class_counts_match"] = json!(counts_ok);
        result["left_distributivity_counterexample"] = json!(left);
        result["associativity_counterexample"] = json!(assoc);
        result["commutativity_counterexample"] = json!(comm);
        obs.push(Observation {
            subject: "hall-counterexamples".into(),
            value: left.is_some() && assoc.is_some() && comm.is_some(),
            decisive: true,
            witness: None,
        });
    }
    result["all_hold"] = json!(ok);
    obs.push(Observation { subject: "axioms".into(), value: ok, decisive: true, witness: None });
    (result, obs)
}

fn evaluate_claims(
    command: &str,
    spec: &PlaneSpec,
    pairs: PairsArg,
    o: &Opts,
    observations: Vec<Observation>,
) -> Result<Vec<ClaimResult>, UsageError> {
    let manifest: Manifest = match &o.claims {
        Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
        None => serde_json::from_str(CLAIMS)?,
    };
    let mut out = Vec::new();
    for claim in manifest.claims {
        let applies = claim.command == command
            && claim.plane.as_deref().is_none_or(|p| p == spec.kind)
            && claim.orders.as_ref().is_none_or(|v| v.contains(&spec.order))
            && claim.pairs.as_ref().is_none_or(|v| v.contains(&value_name(&pairs)))
            && claim.scope.as_ref().is_none_or(|s| *s == value_name(&o.scope))
            && claim.mode.as_ref().is_none_or(|m| *m == value_name(&o.mode));
        if !applies {
            continue;
        }
        let Some(obs) = observations.iter().find(|ob| ob.subject == claim.subject) else { continue };
        let status = if !obs.decisive {
            "inconclusive"
        } else if obs.value == claim.expect {
            "pass"
        } else {
            "fail"
        };
        out.push(ClaimResult {
            id: claim.id,
            statement: claim.statement,
            expected: claim.expect,
            observed: obs.decisive.then_some(obs.value),
            status,
            witness: obs.witness.clone(),
        });
    }
    Ok(out)
}

/// Removes per-item timings so that reruns differ only in `wall_time_ms`.
fn strip_timings(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.remove("elapsed_ms");
            map.values_mut().for_each(strip_timings);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_timings),
        _ => {}
    }
}

fn render_text(r: &RunReport) -> String {
    let mut s = String::new();
    let p = &r.plane;
    let quadratic = match (p.r, p.s) {
        (Some(a), Some(b)) => format!(", r = {a}, s = {b}"),
        _ => String::new(),
    };
    s += &format!("{} {}: {} plane of order {} (p = {}, k = {}{quadratic})\n", r.tool, r.version, p.kind, p.order, p.p, p.k);
    s += &format!("command: {}  options: {}\n", r.command, r.options);
    let res = &r.result;
    if let Some(verdicts) = res.get("verdicts").and_then(Value::as_array) {
        s += &format!(
            "affirmed on {} of {} pairs (complete: {}), {} instances, {} failures\n",
            res["affirmed_pairs"], res["pairs"], res["complete"], res["instances"], res["failures"]
        );
        for v in verdicts.iter().filter(|v| v["affirmed"] == json!(false)).take(20) {
            s += &format!("  not affirmed: lines {} {} ({}), {} failures\n", v["l1"], v["l2"], v["case"], v["failures"]);
        }
    } else if let Some(sweeps) = res.get("sweeps").and_then(Value::as_array) {
        for w in sweeps {
            s += &format!(
                "{}: {} assignments, {} admissible, {} Pappus, {} mismatches, {} uncovered parameter choices\n",
                w["tag"],
                w["assignments"],
                w["admissible"],
                w["pappus"],
                w["mismatches"],
                w["uncovered"].as_array().map_or(0, Vec::len)
            );
        }
    } else if let Some(map) = res.as_object() {
        for (k, v) in map {
            s += &format!("{k}: {v}\n");
        }
    }
    for c in &r.claims {
        s += &format!("claim {}: {} (expected {}, observed {:?})\n", c.id, c.status.to_uppercase(), c.expected, c.observed);
    }
    s += &format!("wall time: {} ms\n", r.wall_time_ms);
    s
}
