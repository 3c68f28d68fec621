//! `basispath`: flaw reports, basis path plans and plan verification from the
//! command line.
//!
//! Exit codes: 0 success, 1 input error, 2 blocking flaws, 3 verification
//! failure.

mod report;

use std::io::Write as _;
use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;

use basispath::batch::map_batch;
use basispath::ingest::{self, to_json_cfg, write_dot, Format};
use basispath::plan::{parse_plan, plan_paths, render_dot, render_text, TestPlan};
use basispath::verify::enumerate_paths;
use basispath::verify::gen::{random_suite, GenConfig};
use basispath::{
    close_graph, cyclomatic_complexity, decompose, detect_flaws, purify, run_pipeline,
    substitute_path, verify_basis, Cfg, Error, Path, PathSet, PipelineError,
};

const OK: u8 = 0;
const INPUT: u8 = 1;
const BLOCKED: u8 = 2;
const NOT_BASIS: u8 = 3;

#[derive(Parser)]
#[command(
    name = "basispath",
    version,
    about = "Basis path test planning for control-flow graphs"
)]
struct Cli {
    /// Input graph format; `auto` picks by extension (.json, .dot/.gv, .mini).
    #[arg(long, global = true, value_enum, default_value_t = InputFormat::Auto)]
    input_format: InputFormat,
    /// Output format. Defaults to text, or json for `lower` and `gen`.
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum InputFormat {
    Auto,
    Json,
    Dot,
    Mini,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Report design flaws.
    Flaws {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Compute a basis path plan.
    Paths {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Include the loop and block decomposition in the output.
        #[arg(long)]
        dump_decomposition: bool,
    },
    /// Check that a plan is a basis of the graph's path space.
    Verify { graph: PathBuf, plan: PathBuf },
    /// Replace one path of a plan by an independent candidate.
    Substitute {
        graph: PathBuf,
        plan: PathBuf,
        /// Index of the path to drop.
        #[arg(long)]
        reject: usize,
        /// Candidate paths, in plan format. Defaults to every begin-end walk.
        #[arg(long)]
        candidates: Option<PathBuf>,
        /// Most walks enumerated when no candidates file is given.
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
    },
    /// Lower a mini-language program to a graph document.
    Lower { file: PathBuf },
    /// Emit seeded random reducible graphs.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 60)]
        max_nodes: usize,
        #[arg(long, default_value_t = 120)]
        max_edges: usize,
    },
}

/// What one input produced: an exit code, its rendering and any diagnostics.
struct Outcome {
    code: u8,
    body: Body,
    diag: String,
}

enum Body {
    Text(String),
    Json(Value),
    None,
}

impl Outcome {
    fn ok(body: Body) -> Self {
        Outcome {
            code: OK,
            body,
            diag: String::new(),
        }
    }

    fn fail(code: u8, msg: impl Into<String>) -> Self {
        Outcome {
            code,
            body: Body::None,
            diag: msg.into(),
        }
    }

    fn with(mut self, code: u8, diag: impl Into<String>) -> Self {
        self.code = code;
        self.diag = diag.into();
        self
    }
}

fn input_format(f: InputFormat) -> Option<Format> {
    match f {
        InputFormat::Auto => None,
        InputFormat::Json => Some(Format::Json),
        InputFormat::Dot => Some(Format::Dot),
        InputFormat::Mini => Some(Format::Mini),
    }
}

fn load(path: &FsPath, fmt: InputFormat) -> Result<Cfg, Outcome> {
    ingest::load_file(path, input_format(fmt)).map_err(|e| match e {
        Error::Io { .. } => Outcome::fail(INPUT, e.to_string()),
        e => Outcome::fail(INPUT, format!("{}: {e}", path.display())),
    })
}

fn read(path: &FsPath) -> Result<String, Outcome> {
    std::fs::read_to_string(path)
        .map_err(|e| Outcome::fail(INPUT, format!("{}: {e}", path.display())))
}

fn flaws_body(
    name: &str,
    cfg: Option<&Cfg>,
    report: &basispath::FlawReport,
    out: OutputFormat,
) -> Body {
    match out {
        OutputFormat::Json => {
            let mut v = serde_json::json!(report);
            v["name"] = Value::from(name);
            Body::Json(v)
        }
        _ => Body::Text(report::flaws_text(name, cfg, report)),
    }
}

fn cmd_flaws(path: &FsPath, fmt: InputFormat, out: OutputFormat) -> Outcome {
    let cfg = match load(path, fmt) {
        Ok(g) => g,
        Err(o) => return o,
    };
    let report = detect_flaws(&cfg);
    let code = if report.blocking { BLOCKED } else { OK };
    Outcome {
        code,
        body: flaws_body(cfg.name(), Some(&cfg), &report, out),
        diag: String::new(),
    }
}

fn plan_body(cfg: &Cfg, plan: &TestPlan, paths: &PathSet, out: OutputFormat) -> Body {
    match out {
        OutputFormat::Json => Body::Json(serde_json::json!(plan)),
        OutputFormat::Dot => Body::Text(render_dot(cfg, paths)),
        OutputFormat::Text => {
            let mut s = render_text(cfg, plan, paths);
            if let Some(d) = &plan.decomposition {
                s.push_str("# decomposition\n");
                for line in serde_json::to_string_pretty(d)
                    .expect("serializable")
                    .lines()
                {
                    s.push_str("# ");
                    s.push_str(line);
                    s.push('\n');
                }
            }
            Body::Text(s)
        }
    }
}

fn blocked(cfg: &Cfg, report: &basispath::FlawReport, out: OutputFormat) -> Outcome {
    Outcome::ok(flaws_body(cfg.name(), Some(cfg), report, out))
        .with(BLOCKED, format!("{}: blocking design flaws", cfg.name()))
}

fn cmd_paths(path: &FsPath, fmt: InputFormat, out: OutputFormat, dump: bool) -> Outcome {
    let cfg = match load(path, fmt) {
        Ok(g) => g,
        Err(o) => return o,
    };
    match run_pipeline(&cfg) {
        Ok(mut a) => {
            if dump {
                a.plan.decomposition = Some(a.decomposition.to_json(&a.cfg));
            }
            Outcome::ok(plan_body(&a.cfg, &a.plan, &a.paths, out))
        }
        Err(PipelineError::Blocked(r)) => blocked(&cfg, &r, out),
        Err(PipelineError::Graph(e)) => Outcome::fail(INPUT, format!("{}: {e}", path.display())),
    }
}

/// The purified graph a plan refers to, with flaws resolved on the way.
fn purified(
    path: &FsPath,
    fmt: InputFormat,
    out: OutputFormat,
) -> Result<(Cfg, basispath::FlawReport), Outcome> {
    let cfg = load(path, fmt)?;
    let p = purify(&cfg).map_err(|e| Outcome::fail(INPUT, format!("{}: {e}", path.display())))?;
    if p.report.blocking {
        return Err(blocked(&cfg, &p.report, out));
    }
    let mut flaws = p.resolved;
    flaws.extend(p.report.flaws);
    Ok((
        p.cfg,
        basispath::FlawReport {
            flaws,
            blocking: false,
        },
    ))
}

fn load_plan(path: &FsPath, cfg: &Cfg) -> Result<PathSet, Outcome> {
    parse_plan(&read(path)?, cfg)
        .map_err(|e| Outcome::fail(INPUT, format!("{}: {e}", path.display())))
}

fn cmd_verify(graph: &FsPath, plan_file: &FsPath, fmt: InputFormat, out: OutputFormat) -> Outcome {
    let (cfg, _) = match purified(graph, fmt, out) {
        Ok(x) => x,
        Err(o) => return o,
    };
    let paths = match load_plan(plan_file, &cfg) {
        Ok(p) => p,
        Err(o) => return o,
    };
    let closed = match close_graph(&cfg) {
        Ok(c) => c,
        Err(e) => return Outcome::fail(INPUT, e.to_string()),
    };
    let decomposition = decompose(&cfg).ok();
    let cert = verify_basis(&paths, &closed, decomposition.as_ref());
    let body = match out {
        OutputFormat::Json => Body::Json(serde_json::json!(cert)),
        _ => Body::Text(report::certificate_text(&cfg, &cert)),
    };
    let o = Outcome::ok(body);
    if !cert.invalid.is_empty() {
        o.with(
            INPUT,
            format!("{}: {}", plan_file.display(), cert.invalid.join("; ")),
        )
    } else if !cert.is_basis {
        o.with(NOT_BASIS, format!("{}: not a basis", plan_file.display()))
    } else {
        o
    }
}

fn cmd_substitute(
    graph: &FsPath,
    plan_file: &FsPath,
    reject: usize,
    candidates: Option<&FsPath>,
    budget: usize,
    fmt: InputFormat,
    out: OutputFormat,
) -> Outcome {
    let (cfg, flaws) = match purified(graph, fmt, out) {
        Ok(x) => x,
        Err(o) => return o,
    };
    let paths = match load_plan(plan_file, &cfg) {
        Ok(p) => p,
        Err(o) => return o,
    };
    let closed = match close_graph(&cfg) {
        Ok(c) => c,
        Err(e) => return Outcome::fail(INPUT, e.to_string()),
    };
    let pool: Vec<Path> = match candidates {
        Some(f) => match load_plan(f, &cfg) {
            Ok(p) => p.paths,
            Err(o) => return o,
        },
        None => {
            let mut all = Vec::new();
            enumerate_paths(&closed, budget, |w| {
                all.push(Path::new(w.to_vec()));
                true
            });
            all
        }
    };
    let updated = match substitute_path(&paths, reject, &pool, &closed) {
        Ok(p) => p,
        Err(e @ Error::NoIndependentSubstitute { .. }) => {
            return Outcome::fail(NOT_BASIS, e.to_string())
        }
        Err(e) => return Outcome::fail(INPUT, e.to_string()),
    };
    let plan = TestPlan {
        name: cfg.name().to_string(),
        complexity: cyclomatic_complexity(&closed),
        paths: plan_paths(&cfg, &updated),
        verification: verify_basis(&updated, &closed, decompose(&cfg).ok().as_ref()),
        flaws,
        decomposition: None,
    };
    Outcome::ok(plan_body(&cfg, &plan, &updated, out))
}

fn cmd_lower(path: &FsPath, fmt: InputFormat, out: OutputFormat) -> Outcome {
    let fmt = match fmt {
        InputFormat::Auto => InputFormat::Mini,
        f => f,
    };
    match load(path, fmt) {
        Ok(cfg) if out == OutputFormat::Dot => Outcome::ok(Body::Text(write_dot(&cfg))),
        Ok(cfg) => Outcome::ok(Body::Text(to_json_cfg(&cfg))),
        Err(o) => o,
    }
}

fn cmd_gen(
    seed: u64,
    count: usize,
    limits: GenConfig,
    out: OutputFormat,
    dir: Option<&FsPath>,
) -> anyhow::Result<Outcome> {
    if limits.max_nodes < 2 || limits.max_edges < 1 {
        bail!("limits too small for a begin-end graph");
    }
    let mut graphs = random_suite(seed, count, &limits);
    for (i, g) in graphs.iter_mut().enumerate() {
        g.set_name(format!("gen-{}", seed.wrapping_add(i as u64)));
    }
    let render = |g: &Cfg| match out {
        OutputFormat::Dot => write_dot(g),
        _ => to_json_cfg(g),
    };
    if let (Some(dir), true) = (dir, count > 1) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let ext = if out == OutputFormat::Dot {
            "dot"
        } else {
            "json"
        };
        for (i, g) in graphs.iter().enumerate() {
            let file = dir.join(format!("gen-{}.{ext}", seed.wrapping_add(i as u64)));
            std::fs::write(&file, render(g))
                .with_context(|| format!("writing {}", file.display()))?;
        }
        return Ok(Outcome::ok(Body::None));
    }
    if count == 1 || out == OutputFormat::Dot {
        return Ok(Outcome::ok(Body::Text(graphs.iter().map(render).collect())));
    }
    let docs: Vec<Value> = graphs
        .iter()
        .map(|g| serde_json::from_str(&to_json_cfg(g)).expect("valid json"))
        .collect();
    Ok(Outcome::ok(Body::Json(Value::Array(docs))))
}

/// Joins per-input bodies; several JSON bodies become one array.
fn assemble(outcomes: &[Outcome]) -> String {
    let json: Vec<&Value> = outcomes
        .iter()
        .filter_map(|o| match &o.body {
            Body::Json(v) => Some(v),
            _ => None,
        })
        .collect();
    let mut s = String::new();
    if outcomes.len() > 1 && !json.is_empty() {
        s = serde_json::to_string_pretty(&json).expect("serializable");
        s.push('\n');
        return s;
    }
    for o in outcomes {
        match &o.body {
            Body::Text(t) => s.push_str(t),
            Body::Json(v) => {
                s.push_str(&serde_json::to_string_pretty(v).expect("serializable"));
                s.push('\n');
            }
            Body::None => {}
        }
    }
    s
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let fmt = cli.input_format;
    let outcomes = match &cli.command {
        Command::Flaws { files } => {
            let out = cli.format.unwrap_or(OutputFormat::Text);
            map_batch(files, |f| cmd_flaws(f, fmt, out))
        }
        Command::Paths {
            files,
            dump_decomposition,
        } => {
            let out = cli.format.unwrap_or(OutputFormat::Text);
            map_batch(files, |f| cmd_paths(f, fmt, out, *dump_decomposition))
        }
        Command::Verify { graph, plan } => {
            vec![cmd_verify(
                graph,
                plan,
                fmt,
                cli.format.unwrap_or(OutputFormat::Text),
            )]
        }
        Command::Substitute {
            graph,
            plan,
            reject,
            candidates,
            budget,
        } => vec![cmd_substitute(
            graph,
            plan,
            *reject,
            candidates.as_deref(),
            *budget,
            fmt,
            cli.format.unwrap_or(OutputFormat::Text),
        )],
        Command::Lower { file } => vec![cmd_lower(
            file,
            fmt,
            cli.format.unwrap_or(OutputFormat::Json),
        )],
        Command::Gen {
            seed,
            count,
            max_nodes,
            max_edges,
        } => {
            let limits = GenConfig {
                max_nodes: *max_nodes,
                max_edges: *max_edges,
            };
            let out = cli.format.unwrap_or(OutputFormat::Json);
            vec![cmd_gen(*seed, *count, limits, out, cli.out.as_deref())?]
        }
    };
    let text = assemble(&outcomes);
    let gen_dir = matches!(cli.command, Command::Gen { count, .. } if count > 1);
    match &cli.out {
        Some(path) if !gen_dir => {
            std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?
        }
        Some(_) => {}
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    let mut stderr = std::io::stderr().lock();
    for o in &outcomes {
        if !o.diag.is_empty() {
            writeln!(stderr, "error: {}", o.diag)?;
        }
    }
    Ok(outcomes.iter().map(|o| o.code).max().unwrap_or(OK))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // Usage errors share the input-error code; 2 means blocking flaws.
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { INPUT } else { OK });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(INPUT)
        }
    }
}
