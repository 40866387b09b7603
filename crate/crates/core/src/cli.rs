//! The `facloc` command line: solve, audit, campaign and family.
//!
//! Reports are JSON on stdout. Exit codes: 0 success, 2 invalid input, 3
//! mechanism and metric do not fit, 4 audit counterexample, 5 campaign bound
//! violated.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::{Read, Write};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::audit::{
    audit_agent_side, audit_mediator_side, audit_naive, replay, replay_naive, AuditReport, DeviationCandidateSet,
    HierarchyMechanism, DEFAULT_SAMPLES_PER_EDGE,
};
use crate::io::document::{digest, parse, serialize, Document};
use crate::io::families;
use crate::io::generate::{gen_hierarchy, gen_random, GeneratorParams};
use crate::mechanisms::{
    hierarchy_direct_median, iwmm, Diagnostics, HierarchyInstance, HierarchyNode, Instance, Mechanism, MechanismOutcome,
    OutcomeKind,
};
use crate::oracle::{cost_report, optimal_location, CostReport, Ratio};
use crate::rational::{self, Rational};
use crate::tree_metric::{PointRef, TreeMetric};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;
pub const EXIT_COUNTEREXAMPLE: i32 = 4;
pub const EXIT_BOUND: i32 = 5;

#[derive(Parser, Debug)]
#[command(name = "facloc", version, about = "Facility location mechanisms with strategic mediators on trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a mechanism on an instance and report its cost.
    Solve(SolveArgs),
    /// Search for profitable deviations.
    Audit(AuditArgs),
    /// Measure competitive ratios over seeded random instances.
    Campaign(CampaignArgs),
    /// Print a named instance as a canonical document.
    Family(FamilyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MechanismArg {
    Wmm,
    Tprm,
    Trm,
    Iwmm,
    Opt,
    GlobalMedian,
    DirectMedian,
}

impl MechanismArg {
    fn name(self) -> &'static str {
        match self {
            MechanismArg::Wmm => "wmm",
            MechanismArg::Tprm => "tprm",
            MechanismArg::Trm => "trm",
            MechanismArg::Iwmm => "iwmm",
            MechanismArg::Opt => "opt",
            MechanismArg::GlobalMedian => "global-median",
            MechanismArg::DirectMedian => "direct-median",
        }
    }

    fn single_level(self) -> Option<Mechanism> {
        match self {
            MechanismArg::Wmm => Some(Mechanism::Wmm),
            MechanismArg::Tprm => Some(Mechanism::Tprm),
            MechanismArg::Trm => Some(Mechanism::Trm),
            MechanismArg::GlobalMedian => Some(Mechanism::GlobalMedian),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SideArg {
    Agent,
    Mediator,
    Naive,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long, value_enum)]
    mechanism: MechanismArg,
    /// Instance document, or `-` for stdin.
    #[arg(long)]
    instance: String,
    /// Replace the global tie-break point.
    #[arg(long)]
    z: Option<String>,
    /// Include wall-clock time in the report.
    #[arg(long)]
    timing: bool,
}

#[derive(Args, Debug)]
struct AuditArgs {
    #[arg(long, value_enum)]
    side: SideArg,
    #[arg(long, value_enum)]
    mechanism: MechanismArg,
    #[arg(long)]
    instance: String,
    #[arg(long, default_value_t = DEFAULT_SAMPLES_PER_EDGE)]
    samples_per_edge: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    timing: bool,
}

#[derive(Args, Debug)]
struct CampaignArgs {
    #[arg(long, value_enum)]
    mechanism: MechanismArg,
    #[arg(long)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fail with exit code 5 if any ratio exceeds this bound.
    #[arg(long)]
    assert_bound: Option<String>,
    #[arg(long, default_value_t = 1)]
    vertices_min: usize,
    #[arg(long, default_value_t = 8)]
    vertices_max: usize,
    #[arg(long, default_value = "1/1")]
    length_min: String,
    #[arg(long, default_value = "4/1")]
    length_max: String,
    #[arg(long, default_value_t = 6)]
    length_steps: u32,
    #[arg(long, default_value_t = 1)]
    mediators_min: usize,
    #[arg(long, default_value_t = 4)]
    mediators_max: usize,
    #[arg(long, default_value_t = 1)]
    agents_min: usize,
    #[arg(long, default_value_t = 5)]
    agents_max: usize,
    #[arg(long, default_value_t = 25)]
    interior_percent: u8,
    #[arg(long, default_value_t = 4)]
    offset_steps: u32,
    /// Put every tie-break point at the first vertex.
    #[arg(long)]
    fixed_tie_breaks: bool,
    /// Only path graphs (implied by tprm).
    #[arg(long)]
    path_only: bool,
    /// Hierarchy depth for iwmm.
    #[arg(long, default_value_t = 3)]
    depth: usize,
    #[arg(long)]
    timing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FamilyName {
    Ex51,
    Ex61,
    Fig1,
    Sec6,
}

#[derive(Args, Debug)]
struct FamilyArgs {
    #[arg(long, value_enum)]
    name: FamilyName,
    #[arg(long, default_value = "0/1")]
    l: String,
    #[arg(long, default_value = "1/1")]
    h: String,
    #[arg(long, default_value_t = 1)]
    r: usize,
    #[arg(long, default_value_t = 3)]
    s: usize,
    #[arg(long, default_value_t = 1)]
    variant: u8,
}

/// A failed command: exit code and message for stderr.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match e {
            Error::NotAPath | Error::MechanismMismatch { .. } => EXIT_MISMATCH,
            Error::TieBreakViolation => EXIT_INTERNAL,
            _ => EXIT_INVALID,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

/// Output of a successful command with its exit code.
struct Success {
    code: i32,
    body: String,
}

/// Parses `args` (including the program name), runs the command and writes
/// the report to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(rendered.as_bytes()) } else { out.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    let started = Instant::now();
    let result = match &cli.command {
        Command::Solve(a) => solve(a, stdin, a.timing.then_some(started)),
        Command::Audit(a) => audit(a, stdin, a.timing.then_some(started)),
        Command::Campaign(a) => campaign(a, a.timing.then_some(started)),
        Command::Family(a) => family(a),
    };
    match result {
        Ok(success) => {
            let _ = out.write_all(success.body.as_bytes());
            success.code
        }
        Err(failure) => {
            let _ = writeln!(err, "error: {}", failure.message);
            failure.code
        }
    }
}

fn read_document(path: &str, stdin: &mut dyn Read) -> Result<Document> {
    let text = if path == "-" {
        let mut buf = String::new();
        stdin
            .read_to_string(&mut buf)
            .map_err(|e| Error::InvalidParams(format!("cannot read stdin: {e}")))?;
        buf
    } else {
        std::fs::read_to_string(path).map_err(|e| Error::InvalidParams(format!("cannot read `{path}`: {e}")))?
    };
    parse(&text)
}

fn rat(value: &Rational) -> Value {
    json!({ "exact": rational::format(value), "approx": rational::approx(value) })
}

fn ratio_value(ratio: &Ratio) -> Value {
    match ratio {
        Ratio::Finite(r) => rat(r),
        Ratio::Infinite => json!("infinite"),
    }
}

fn labels(metric: &TreeMetric, points: &[PointRef]) -> Value {
    Value::from(points.iter().map(|p| metric.label(p)).collect::<Vec<_>>())
}

fn outcome_value(metric: &TreeMetric, outcome: &MechanismOutcome) -> Value {
    match &outcome.kind {
        OutcomeKind::Deterministic(p) => json!({ "kind": "deterministic", "point": metric.label(p) }),
        OutcomeKind::Randomized(d) => {
            let mut exact = Map::new();
            let mut approx = Map::new();
            let mut entries: Vec<(String, &Rational)> = d.iter().map(|(p, q)| (metric.label(p), q)).collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            for (label, q) in entries {
                exact.insert(label.clone(), json!(rational::format(q)));
                approx.insert(label, json!(rational::approx(q)));
            }
            json!({ "kind": "randomized", "distribution": exact, "distribution_approx": approx })
        }
    }
}

fn diagnostics_value(metric: &TreeMetric, diagnostics: &Diagnostics) -> Value {
    match diagnostics {
        Diagnostics::Wmm { medians } => json!({ "medians": labels(metric, medians) }),
        Diagnostics::GlobalMedian { candidates_examined } => json!({ "candidates_examined": candidates_examined }),
        Diagnostics::Tprm(d) => json!({
            "medians": labels(metric, &d.medians),
            "u_list": labels(metric, &d.u_list),
            "probabilities": d.probabilities.iter().map(rational::format).collect::<Vec<_>>(),
        }),
        Diagnostics::Trm(d) => json!({
            "medians": labels(metric, &d.medians),
            "root": metric.label(&d.root),
            "vertices": d.vertices.iter().map(|v| json!({
                "point": metric.label(&v.point),
                "size": v.size,
                "treesize": v.treesize,
                "in_x": v.in_x,
                "c": rational::format(&v.c),
                "p": rational::format(&v.p),
            })).collect::<Vec<_>>(),
        }),
        Diagnostics::Iwmm { reports } => json!({
            "reports": reports.iter().map(|r| json!({
                "mediator": r.name,
                "point": metric.label(&r.point),
                "agents": r.agents,
            })).collect::<Vec<_>>(),
        }),
    }
}

fn cost_value(metric: &TreeMetric, report: &CostReport) -> Value {
    json!({
        "cost": rat(&report.cost),
        "optimal_location": metric.label(&report.optimal_location),
        "optimal_cost": rat(&report.optimal_cost),
        "ratio": ratio_value(&report.ratio),
    })
}

fn finish(mut report: Map<String, Value>, started: Option<Instant>) -> String {
    if let Some(t) = started {
        report.insert("elapsed_ms".into(), json!(t.elapsed().as_secs_f64() * 1000.0));
    }
    let mut text = serde_json::to_string_pretty(&Value::Object(report)).expect("reports serialize");
    text.push('\n');
    text
}

fn set_center_z(h: &mut HierarchyInstance, z: PointRef) {
    if let HierarchyNode::Mediator { z: center_z, .. } = &mut h.center {
        *center_z = z;
    }
}

fn mismatch(mechanism: MechanismArg, reason: &str) -> Failure {
    Error::MechanismMismatch {
        mechanism: mechanism.name().into(),
        reason: reason.into(),
    }
    .into()
}

fn solve(args: &SolveArgs, stdin: &mut dyn Read, started: Option<Instant>) -> std::result::Result<Success, Failure> {
    let mut doc = read_document(&args.instance, stdin)?;
    if let Some(z) = &args.z {
        let z = doc.metric().parse_point(z).map_err(|e| e.at("--z"))?;
        match &mut doc {
            Document::Instance(inst) => inst.z = z,
            Document::Hierarchy(h) => set_center_z(h, z),
        }
    }
    let metric = doc.metric().clone();
    let agents = match &doc {
        Document::Instance(inst) => inst.agents(),
        Document::Hierarchy(h) => h.agents(),
    };

    let outcome = match (args.mechanism, &doc) {
        (MechanismArg::Opt, _) => {
            let (p, _) = optimal_location(&metric, &agents)?;
            MechanismOutcome {
                kind: OutcomeKind::Deterministic(p),
                diagnostics: Diagnostics::GlobalMedian { candidates_examined: 0 },
            }
        }
        (MechanismArg::Iwmm, Document::Hierarchy(h)) => iwmm(h)?,
        (MechanismArg::Iwmm, Document::Instance(inst)) => iwmm(&HierarchyInstance::from_instance(inst))?,
        (MechanismArg::DirectMedian, Document::Hierarchy(h)) => MechanismOutcome {
            kind: OutcomeKind::Deterministic(hierarchy_direct_median(h, &BTreeMap::new())?),
            diagnostics: Diagnostics::GlobalMedian { candidates_examined: 0 },
        },
        (m, Document::Instance(inst)) => match m.single_level() {
            Some(mechanism) => mechanism.run(inst)?,
            None => return Err(mismatch(m, "needs a hierarchy document")),
        },
        (m, Document::Hierarchy(_)) => return Err(mismatch(m, "needs a single-level instance document")),
    };
    let report = cost_report(&metric, &agents, &outcome)?;

    let mut out = Map::new();
    out.insert("command".into(), json!("solve"));
    out.insert("mechanism".into(), json!(args.mechanism.name()));
    out.insert("instance_digest".into(), json!(digest(&doc)));
    out.insert("agents".into(), json!(agents.len()));
    out.insert("outcome".into(), outcome_value(&metric, &outcome));
    if args.mechanism != MechanismArg::Opt && args.mechanism != MechanismArg::DirectMedian {
        out.insert("diagnostics".into(), diagnostics_value(&metric, &outcome.diagnostics));
    }
    out.insert("cost".into(), cost_value(&metric, &report));
    Ok(Success {
        code: EXIT_OK,
        body: finish(out, started),
    })
}

fn audit_value(report: &AuditReport, replayed: Option<(Rational, Rational)>) -> Value {
    let counterexample = report.counterexample.as_ref().map(|c| {
        json!({
            "deviator": c.deviator,
            "truthful_cost": rat(&c.truthful_cost),
            "deviating_cost": rat(&c.deviating_cost),
            "description": c.description,
            "replay_matches": replayed.as_ref().map(|(t, d)| t == &c.truthful_cost && d == &c.deviating_cost),
        })
    });
    json!({
        "side": report.side.name(),
        "mechanism": report.mechanism,
        "deviations_tested": report.deviations_tested,
        "verdict": if report.is_clean() { "no-beneficial-deviation-found" } else { "counterexample" },
        "counterexample": counterexample,
    })
}

fn audit(args: &AuditArgs, stdin: &mut dyn Read, started: Option<Instant>) -> std::result::Result<Success, Failure> {
    let doc = read_document(&args.instance, stdin)?;
    let (report, candidates, replayed) = match args.side {
        SideArg::Naive => {
            let h = match &doc {
                Document::Hierarchy(h) => h.clone(),
                Document::Instance(inst) => HierarchyInstance::from_instance(inst),
            };
            let mechanism = match args.mechanism {
                MechanismArg::Iwmm => HierarchyMechanism::Iwmm,
                MechanismArg::DirectMedian => HierarchyMechanism::DirectMedian,
                m => return Err(mismatch(m, "naive audits take iwmm or direct-median")),
            };
            let candidates = DeviationCandidateSet::for_hierarchy(&h, args.samples_per_edge, args.seed)?;
            let report = audit_naive(&h, mechanism, &candidates)?;
            let replayed = match &report.counterexample {
                Some(c) => Some(replay_naive(&h, mechanism, &c.deviation)?),
                None => None,
            };
            (report, candidates, replayed)
        }
        side => {
            let Document::Instance(inst) = &doc else {
                return Err(mismatch(args.mechanism, "agent and mediator audits need a single-level instance"));
            };
            let Some(mechanism) = args.mechanism.single_level() else {
                return Err(mismatch(args.mechanism, "agent and mediator audits take wmm, tprm, trm or global-median"));
            };
            let candidates = DeviationCandidateSet::for_instance(inst, args.samples_per_edge, args.seed)?;
            let report = if side == SideArg::Agent {
                audit_agent_side(inst, mechanism, &candidates)?
            } else {
                audit_mediator_side(inst, mechanism, &candidates)?
            };
            let replayed = match &report.counterexample {
                Some(c) => Some(replay(inst, mechanism, &c.deviation)?),
                None => None,
            };
            (report, candidates, replayed)
        }
    };

    let mut out = Map::new();
    out.insert("command".into(), json!("audit"));
    out.insert("instance_digest".into(), json!(digest(&doc)));
    out.insert("seed".into(), json!(args.seed));
    out.insert("samples_per_edge".into(), json!(args.samples_per_edge));
    out.insert("candidates".into(), json!(candidates.len()));
    out.insert("report".into(), audit_value(&report, replayed));
    Ok(Success {
        code: if report.is_clean() { EXIT_OK } else { EXIT_COUNTEREXAMPLE },
        body: finish(out, started),
    })
}

fn campaign_params(args: &CampaignArgs, seed: u64) -> Result<GeneratorParams> {
    Ok(GeneratorParams {
        seed,
        vertices: (args.vertices_min, args.vertices_max),
        length_min: rational::parse(&args.length_min).map_err(|e| e.at("--length-min"))?,
        length_max: rational::parse(&args.length_max).map_err(|e| e.at("--length-max"))?,
        length_steps: args.length_steps,
        mediators: (args.mediators_min, args.mediators_max),
        agents_per_mediator: (args.agents_min, args.agents_max),
        path_only: args.path_only || args.mechanism == MechanismArg::Tprm,
        interior_percent: args.interior_percent,
        offset_steps: args.offset_steps,
        random_tie_breaks: !args.fixed_tie_breaks,
        depth: Some(args.depth),
    })
}

struct Trial {
    seed: u64,
    digest: String,
    report: CostReport,
}

fn run_trial(args: &CampaignArgs, seed: u64) -> Result<Trial> {
    let params = campaign_params(args, seed)?;
    let (doc, agents, outcome) = match args.mechanism {
        MechanismArg::Iwmm | MechanismArg::DirectMedian => {
            let h = gen_hierarchy(&params)?;
            let outcome = if args.mechanism == MechanismArg::Iwmm {
                iwmm(&h)?
            } else {
                MechanismOutcome {
                    kind: OutcomeKind::Deterministic(hierarchy_direct_median(&h, &BTreeMap::new())?),
                    diagnostics: Diagnostics::GlobalMedian { candidates_examined: 0 },
                }
            };
            let agents = h.agents();
            (Document::Hierarchy(h), agents, outcome)
        }
        MechanismArg::Opt => {
            let inst = gen_random(&params)?;
            let agents = inst.agents();
            let (p, _) = optimal_location(&inst.metric, &agents)?;
            let outcome = MechanismOutcome {
                kind: OutcomeKind::Deterministic(p),
                diagnostics: Diagnostics::GlobalMedian { candidates_examined: 0 },
            };
            (Document::Instance(inst), agents, outcome)
        }
        m => {
            let inst: Instance = gen_random(&params)?;
            let outcome = m.single_level().expect("single-level mechanism").run(&inst)?;
            let agents = inst.agents();
            (Document::Instance(inst), agents, outcome)
        }
    };
    let report = cost_report(doc.metric(), &agents, &outcome)?;
    Ok(Trial {
        seed,
        digest: digest(&doc),
        report,
    })
}

fn campaign(args: &CampaignArgs, started: Option<Instant>) -> std::result::Result<Success, Failure> {
    campaign_params(args, args.seed)?.validate()?;
    let bound = args
        .assert_bound
        .as_deref()
        .map(|b| rational::parse(b).map_err(|e| e.at("--assert-bound")))
        .transpose()?;
    let trials = (0..args.trials)
        .into_par_iter()
        .map(|i| run_trial(args, args.seed.wrapping_add(i as u64)))
        .collect::<Result<Vec<_>>>()?;

    let finite: Vec<&Rational> = trials
        .iter()
        .filter_map(|t| match &t.report.ratio {
            Ratio::Finite(r) => Some(r),
            Ratio::Infinite => None,
        })
        .collect();
    let infinite = trials.len() - finite.len();
    let max = if infinite > 0 {
        Some(json!("infinite"))
    } else {
        finite.iter().max().map(|r| rat(r))
    };
    let mean = if finite.is_empty() {
        None
    } else {
        let total: Rational = finite.iter().copied().sum();
        Some(rat(&(total / rational::int(finite.len() as i64))))
    };
    let violations: Vec<usize> = match &bound {
        Some(b) => trials
            .iter()
            .enumerate()
            .filter(|(_, t)| match &t.report.ratio {
                Ratio::Finite(r) => r > b,
                Ratio::Infinite => true,
            })
            .map(|(i, _)| i)
            .collect(),
        None => Vec::new(),
    };

    let mut out = Map::new();
    out.insert("command".into(), json!("campaign"));
    out.insert("mechanism".into(), json!(args.mechanism.name()));
    out.insert("seed".into(), json!(args.seed));
    out.insert("trials".into(), json!(args.trials));
    out.insert(
        "results".into(),
        Value::from(
            trials
                .iter()
                .enumerate()
                .map(|(i, t)| {
                    json!({
                        "trial": i,
                        "seed": t.seed,
                        "instance_digest": t.digest,
                        "cost": rat(&t.report.cost),
                        "optimal_cost": rat(&t.report.optimal_cost),
                        "ratio": ratio_value(&t.report.ratio),
                    })
                })
                .collect::<Vec<_>>(),
        ),
    );
    out.insert("max_ratio".into(), max.unwrap_or(Value::Null));
    out.insert("mean_ratio".into(), mean.unwrap_or(Value::Null));
    out.insert("infinite_ratios".into(), json!(infinite));
    if let Some(b) = &bound {
        out.insert("bound".into(), rat(b));
        out.insert("violations".into(), json!(violations));
    }
    Ok(Success {
        code: if violations.is_empty() { EXIT_OK } else { EXIT_BOUND },
        body: finish(out, started),
    })
}

fn family(args: &FamilyArgs) -> std::result::Result<Success, Failure> {
    let doc = match args.name {
        FamilyName::Ex51 => {
            let l = rational::parse(&args.l).map_err(|e| e.at("--l"))?;
            let h = rational::parse(&args.h).map_err(|e| e.at("--h"))?;
            Document::Instance(families::ex51(&l, &h, args.r, args.variant)?)
        }
        FamilyName::Ex61 => Document::Hierarchy(families::ex61(args.r, args.s, args.variant)?),
        FamilyName::Fig1 => Document::Instance(families::fig1_tree()),
        FamilyName::Sec6 => Document::Hierarchy(families::sec6_example()),
    };
    Ok(Success {
        code: EXIT_OK,
        body: serialize(&doc),
    })
}
