use std::fmt;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use pancake_core::coloring::first_element_coloring;
use pancake_core::constructive::{compose, parity4_coloring, upper_bound_table, BlockScheme};
use pancake_core::domsets::{dom_set, is_efficient_dominating, partition_check, DomSetId};
use pancake_core::invariant::{find_invariant_coloring, RelabelGroup};
use pancake_core::perm::ENUMERATION_LIMIT;
use pancake_core::quotient::{build_quotient, lift, quotient_coloring_is_proper};
use pancake_core::solver::{
    exact_chi, find_k_coloring, find_k_coloring_portfolio, SearchBudget, SearchMode, SolveStatus,
};
use pancake_core::{verify_equitable, verify_perfect, Coloring, PancakeError, PancakeView};
use serde_json::{json, Value};

use crate::report::{Inputs, RunReport, Timer, SCHEMA_VERSION};
use crate::{
    BuiltinArgs, Cli, ColorArgs, Command, DomsetsArgs, Method, Mode, SearchArgs, VerifyArgs,
    EXIT_FAILED, EXIT_OK, EXIT_TIMEOUT, EXIT_USAGE,
};

#[derive(Debug)]
pub enum CliError {
    Input(PancakeError),
    Usage(String),
    Io(io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) | CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_FAILED,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(e) => write!(f, "{e}"),
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<PancakeError> for CliError {
    fn from(e: PancakeError) -> Self {
        CliError::Input(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

type CliResult<T> = Result<T, CliError>;

/// Outcome of one subcommand before it is wrapped in a [`RunReport`].
struct Done {
    inputs: Inputs,
    results: Value,
    exit: u8,
}

struct Ctx {
    json: bool,
    threads: usize,
    /// Set once raw output (coloring, DIMACS, members) went to stdout; the
    /// table summary then moves to stderr.
    stdout_taken: bool,
}

impl Ctx {
    /// Destination for raw output: the file if given, stdout in table
    /// mode, nothing in JSON mode.
    fn sink(&mut self, out: Option<&Path>) -> CliResult<Option<Box<dyn Write>>> {
        match out {
            Some(p) => Ok(Some(Box::new(BufWriter::new(File::create(p)?)))),
            None if self.json => Ok(None),
            None => {
                self.stdout_taken = true;
                Ok(Some(Box::new(BufWriter::new(io::stdout().lock()))))
            }
        }
    }

    fn inputs(&self, n: usize) -> Inputs {
        Inputs {
            n: Some(n),
            threads: self.threads,
            ..Inputs::default()
        }
    }
}

fn path_string(p: &Option<PathBuf>) -> Vec<String> {
    p.iter().map(|p| p.display().to_string()).collect()
}

pub fn run(cli: &Cli, argv: Vec<String>, threads: usize) -> CliResult<u8> {
    let mut ctx = Ctx {
        json: cli.json,
        threads,
        stdout_taken: false,
    };
    let mut timer = Timer::new();
    let (name, done) = match &cli.command {
        Command::Bounds { n } => ("bounds", bounds(&ctx, *n)?),
        Command::Color(a) => ("color", color(&mut ctx, &mut timer, a)?),
        Command::Verify(a) => ("verify", verify(&ctx, &mut timer, a)?),
        Command::Domsets(a) => ("domsets", domsets(&mut ctx, &mut timer, a)?),
        Command::Quotient { n, out } => ("quotient", quotient(&mut ctx, *n, out)?),
        Command::ExactChi {
            n,
            timeout,
            max_nodes,
        } => (
            "exact-chi",
            exact(&ctx, &mut timer, *n, *timeout, *max_nodes)?,
        ),
        Command::Search(a) => ("search", search(&ctx, &mut timer, a)?),
        Command::ExportDimacs { n, out } => ("export-dimacs", export(&mut ctx, *n, out)?),
    };
    let report = RunReport {
        command: argv,
        subcommand: name.to_string(),
        inputs: done.inputs,
        results: done.results,
        timing: timer.finish(),
        exit_code: done.exit as i32,
        version: env!("CARGO_PKG_VERSION").to_string(),
        schema_version: SCHEMA_VERSION.to_string(),
    };
    if ctx.json {
        let mut out = io::stdout().lock();
        serde_json::to_writer_pretty(&mut out, &report).map_err(io::Error::from)?;
        writeln!(out)?;
    } else if ctx.stdout_taken {
        print_table(&mut io::stderr().lock(), &report)?;
    } else {
        print_table(&mut io::stdout().lock(), &report)?;
    }
    Ok(done.exit)
}

fn print_table(w: &mut impl Write, report: &RunReport) -> io::Result<()> {
    let mut rows = Vec::new();
    flatten("", &report.results, &mut rows);
    for (k, v) in &report.timing {
        rows.push((format!("time.{k}"), format!("{v:.3}s")));
    }
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    writeln!(w, "pancake {}", report.subcommand)?;
    for (k, v) in rows {
        writeln!(w, "  {k:<width$}  {v}")?;
    }
    Ok(())
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, v, rows);
            }
        }
        Value::Array(items) if items.len() > 12 || items.iter().any(|i| i.is_object()) => {
            if items.len() <= 12 {
                for (i, item) in items.iter().enumerate() {
                    let line = match item {
                        Value::Object(map) => map
                            .iter()
                            .filter(|(_, v)| !v.is_null())
                            .map(|(k, v)| match v {
                                Value::String(s) => format!("{k}={s:?}"),
                                v => format!("{k}={v}"),
                            })
                            .collect::<Vec<_>>()
                            .join(" "),
                        v => v.to_string(),
                    };
                    rows.push((format!("{prefix}[{i}]"), line));
                }
            } else {
                rows.push((prefix.to_string(), format!("[{} items]", items.len())));
            }
        }
        Value::Null => {}
        Value::String(s) => rows.push((prefix.to_string(), s.clone())),
        other => rows.push((prefix.to_string(), other.to_string())),
    }
}

fn bounds(ctx: &Ctx, n: u64) -> CliResult<Done> {
    let report = upper_bound_table(n)?;
    Ok(Done {
        inputs: Inputs {
            n: Some(n as usize),
            threads: ctx.threads,
            ..Inputs::default()
        },
        results: json!(report),
        exit: EXIT_OK,
    })
}

fn read_coloring(path: &Path) -> CliResult<Coloring> {
    let file = File::open(path)
        .map_err(|e| CliError::Usage(format!("cannot open {}: {e}", path.display())))?;
    Ok(Coloring::read_from(
        BufReader::new(file),
        path.display().to_string(),
    )?)
}

fn build_coloring(n: usize, method: Method, args: &BuiltinArgs) -> CliResult<Coloring> {
    if method != Method::Compose && (!args.blocks.is_empty() || !args.base.is_empty()) {
        return Err(CliError::Usage(
            "--blocks and --base only apply to --method compose".into(),
        ));
    }
    Ok(match method {
        Method::Parity4 => parity4_coloring(n)?,
        Method::EquitableNm1 => lift(n)?,
        Method::FirstElement => {
            PancakeView::full(n)?;
            first_element_coloring(n)
        }
        Method::Compose => {
            if args.blocks.is_empty() {
                return Err(CliError::Usage("compose needs --blocks, e.g. 7,3".into()));
            }
            let total: usize = args.blocks.iter().sum();
            if total != n {
                return Err(CliError::Usage(format!(
                    "block sizes sum to {total}, expected n = {n}"
                )));
            }
            let bases = args
                .base
                .iter()
                .map(|p| read_coloring(p))
                .collect::<CliResult<Vec<_>>>()?;
            compose(&BlockScheme::with_supplied(&args.blocks, &bases)?)?
        }
    })
}

fn builtin_inputs(ctx: &Ctx, n: usize, method: Method, args: &BuiltinArgs) -> Inputs {
    Inputs {
        method: Some(method.name().to_string()),
        blocks: (!args.blocks.is_empty()).then(|| args.blocks.clone()),
        files: args.base.iter().map(|p| p.display().to_string()).collect(),
        ..ctx.inputs(n)
    }
}

fn check_enumerable(n: usize) -> CliResult<()> {
    if n > ENUMERATION_LIMIT {
        return Err(PancakeError::Capacity {
            n,
            limit: ENUMERATION_LIMIT,
            context: "coloring output",
        }
        .into());
    }
    Ok(())
}

fn color(ctx: &mut Ctx, timer: &mut Timer, a: &ColorArgs) -> CliResult<Done> {
    check_enumerable(a.n)?;
    let coloring = build_coloring(a.n, a.method, &a.builtin)?;
    let mut inputs = builtin_inputs(ctx, a.n, a.method, &a.builtin);
    inputs.files.extend(path_string(&a.out));
    timer.lap("build");
    let mut results = json!({
        "coloring": { "name": coloring.name(), "n": coloring.n(), "k": coloring.k() },
    });
    let mut exit = EXIT_OK;
    if a.verify {
        let report = verify_equitable(&PancakeView::full(a.n)?, &coloring)?;
        if !report.proper {
            exit = EXIT_FAILED;
        }
        results["verify"] = json!(report);
        timer.lap("verify");
    }
    if let Some(mut w) = ctx.sink(a.out.as_deref())? {
        coloring.write_to(&mut w)?;
        w.flush()?;
        results["written"] = json!(a
            .out
            .as_ref()
            .map_or("stdout".into(), |p| p.display().to_string()));
        timer.lap("write");
    }
    Ok(Done {
        inputs,
        results,
        exit,
    })
}

fn verify(ctx: &Ctx, timer: &mut Timer, a: &VerifyArgs) -> CliResult<Done> {
    let (coloring, inputs) = match (&a.file, a.builtin) {
        (Some(path), None) => {
            let c = read_coloring(path)?;
            if c.n() != a.n {
                return Err(CliError::Usage(format!(
                    "{} colors P_{}, expected P_{}",
                    path.display(),
                    c.n(),
                    a.n
                )));
            }
            let inputs = Inputs {
                files: vec![path.display().to_string()],
                ..ctx.inputs(a.n)
            };
            (c, inputs)
        }
        (None, Some(m)) => {
            check_enumerable(a.n)?;
            (
                build_coloring(a.n, m, &a.builtin_args)?,
                builtin_inputs(ctx, a.n, m, &a.builtin_args),
            )
        }
        _ => {
            return Err(CliError::Usage(
                "give a coloring file or --builtin <METHOD>".into(),
            ))
        }
    };
    timer.lap("load");
    let view = PancakeView::full(a.n)?;
    let report = if a.perfect {
        verify_perfect(&view, &coloring)?
    } else {
        verify_equitable(&view, &coloring)?
    };
    timer.lap("verify");
    Ok(Done {
        inputs,
        exit: if report.proper { EXIT_OK } else { EXIT_FAILED },
        results: json!({
            "coloring": { "name": coloring.name(), "n": coloring.n(), "k": coloring.k() },
            "verify": report,
        }),
    })
}

fn domsets(ctx: &mut Ctx, timer: &mut Timer, a: &DomsetsArgs) -> CliResult<Done> {
    let n = a.n;
    let mut inputs = ctx.inputs(n);
    inputs.files = path_string(&a.out);
    let mut results = json!({});
    let mut exit = EXIT_OK;
    let ids: Vec<DomSetId> = match (a.first, a.last) {
        (Some(i), Some(j)) => vec![DomSetId::first_last(i, j)],
        (Some(i), None) => vec![DomSetId::first(i)],
        _ if a.partition => Vec::new(),
        _ => (1..=n as u8).map(DomSetId::first).collect(),
    };
    let mut sets = Vec::new();
    for id in ids {
        let members = dom_set(n, id)?;
        let view = match id.j {
            Some(j) => PancakeView::copy(n, j)?,
            None => PancakeView::full(n)?,
        };
        let cert = is_efficient_dominating(&view, &members)?;
        if !cert.efficient() {
            exit = EXIT_FAILED;
        }
        if a.first.is_some() {
            if let Some(mut w) = ctx.sink(a.out.as_deref())? {
                for p in &members {
                    writeln!(w, "{p}")?;
                }
                w.flush()?;
            }
        }
        sets.push(json!({
            "i": id.i,
            "j": id.j,
            "size": members.len(),
            "independent": cert.independent,
            "unique_domination": cert.unique_domination,
            "witnesses": cert.witnesses,
        }));
    }
    if !sets.is_empty() {
        results["sets"] = json!(sets);
        timer.lap("domination");
    }
    if a.partition {
        let report = partition_check(n)?;
        if !report.ok() {
            exit = EXIT_FAILED;
        }
        results["partition"] = json!(report);
        timer.lap("partition");
    }
    Ok(Done {
        inputs,
        results,
        exit,
    })
}

fn quotient(ctx: &mut Ctx, n: u32, out: &Option<PathBuf>) -> CliResult<Done> {
    let q = build_quotient(n)?;
    let colors = q.coloring();
    let proper = quotient_coloring_is_proper(n)?;
    if let Some(mut w) = ctx.sink(out.as_deref())? {
        q.write_dimacs(&mut w)?;
        for (v, c) in q.vertices().iter().zip(&colors) {
            writeln!(w, "c ({},{}) -> {c}", v.i, v.j)?;
        }
        w.flush()?;
    }
    let mut inputs = ctx.inputs(n as usize);
    inputs.files = path_string(out);
    let coloring: Vec<Value> = q
        .vertices()
        .iter()
        .zip(&colors)
        .map(|(v, c)| json!({ "i": v.i, "j": v.j, "color": c }))
        .collect();
    Ok(Done {
        inputs,
        exit: if proper { EXIT_OK } else { EXIT_FAILED },
        results: json!({
            "vertices": q.vertices().len(),
            "edges": q.edge_count(),
            "colors": n - 1,
            "proper": proper,
            "coloring": coloring,
        }),
    })
}

fn exact(
    ctx: &Ctx,
    timer: &mut Timer,
    n: usize,
    timeout: f64,
    max_nodes: Option<u64>,
) -> CliResult<Done> {
    let budget = SearchBudget {
        max_seconds: timeout,
        max_nodes: max_nodes.unwrap_or(u64::MAX),
        seed: 0,
    };
    let (result, _) = exact_chi(&PancakeView::full(n)?, &budget)?;
    timer.lap("search");
    Ok(Done {
        inputs: Inputs {
            timeout: Some(timeout),
            ..ctx.inputs(n)
        },
        exit: if result.chi.is_some() {
            EXIT_OK
        } else {
            EXIT_TIMEOUT
        },
        results: json!({
            "chi": result.chi,
            "lower": result.lower,
            "upper": result.upper,
            "steps": result.steps,
            "elapsed": result.elapsed,
        }),
    })
}

fn search(ctx: &Ctx, timer: &mut Timer, a: &SearchArgs) -> CliResult<Done> {
    let view = PancakeView::full(a.n)?;
    let budget = SearchBudget {
        max_seconds: a.timeout,
        max_nodes: a.max_nodes.unwrap_or(u64::MAX),
        seed: a.seed,
    };
    let outcome = match a.mode {
        Mode::Complete => find_k_coloring(&view, a.k, &budget, SearchMode::Complete)?,
        Mode::Heuristic => {
            find_k_coloring_portfolio(&view, a.k, &budget, a.workers.unwrap_or(ctx.threads))?
        }
        Mode::Invariant => find_invariant_coloring(&RelabelGroup::frobenius21(a.n)?, a.k, &budget)?,
    };
    timer.lap("search");
    let mut results = json!({
        "mode": match a.mode {
            Mode::Complete => "complete",
            Mode::Heuristic => "heuristic",
            Mode::Invariant => "invariant",
        },
        "outcome": outcome,
    });
    if let Some(c) = &outcome.coloring {
        // Witnesses are verified inside the solver; report class sizes too.
        results["verify"] = json!(verify_equitable(&view, c)?);
        timer.lap("verify");
        if let Some(path) = &a.out {
            let mut w = BufWriter::new(File::create(path)?);
            c.write_to(&mut w)?;
            w.flush()?;
            results["written"] = json!(path.display().to_string());
            timer.lap("write");
        }
    }
    Ok(Done {
        inputs: Inputs {
            k: Some(a.k),
            seed: Some(a.seed),
            timeout: Some(a.timeout),
            files: path_string(&a.out),
            ..ctx.inputs(a.n)
        },
        exit: match outcome.status {
            SolveStatus::Timeout => EXIT_TIMEOUT,
            _ => EXIT_OK,
        },
        results,
    })
}

fn export(ctx: &mut Ctx, n: usize, out: &Option<PathBuf>) -> CliResult<Done> {
    let view = PancakeView::full(n)?;
    if ctx.json && out.is_none() {
        return Err(CliError::Usage("export-dimacs --json needs --out".into()));
    }
    if let Some(mut w) = ctx.sink(out.as_deref())? {
        view.write_dimacs(&mut w)?;
        w.flush()?;
    }
    let mut inputs = ctx.inputs(n);
    inputs.files = path_string(out);
    let edges = view.vertex_count() * (n as u64 - 1) / 2;
    Ok(Done {
        inputs,
        exit: EXIT_OK,
        results: json!({ "vertices": view.vertex_count(), "edges": edges }),
    })
}
