//! `wavecone-tool`: command-line front end.
//!
//! Every subcommand prints a short human summary, or with `--json` a single
//! JSON document carrying `"schema": 1` and the subcommand name. Exit codes:
//! 0 success, 2 negative mathematical verdict, 1 usage or input error,
//! 3 internal self-check failure.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use wavecone::appendix::reproduce_appendix;
use wavecone::dsl::{builtin, builtin_descriptors, parse_operator, parse_operators, parse_polynomial, to_dsl, BuiltinParams, OperatorSource};
use wavecone::nulllag::{murat_check, solve_null_lagrangians, NullLagrangianBasis};
use wavecone::operator::{cocanceling_check, constant_rank_check, wave_cone_span, OperatorSymbol, RankVerdict};
use wavecone::potential::{potentials_of_order, pseudoinverse_potential, symbol_isomorphism, verify_exactness, PotentialSymbol};
use wavecone::spectral::suite::{default_grid, operator_suite};
use wavecone::spectral::{dump_field, synthesize_a_free, TorusGrid};
use wavecone::{par, Error};

pub const SCHEMA: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NEGATIVE: i32 = 2;
pub const EXIT_SELF_CHECK: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "wavecone-tool", version, about = "Constant-rank operators, potentials and null Lagrangians")]
struct Cli {
    /// Emit one JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Random frequencies per probabilistic check.
    #[arg(long, global = true, default_value_t = 200)]
    samples: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct Shape {
    /// Number of variables.
    #[arg(long)]
    n: Option<usize>,
    /// Number of components (grad).
    #[arg(long)]
    m: Option<usize>,
    /// Derivative order (grad).
    #[arg(long)]
    k: Option<u32>,
    /// Row count (div).
    #[arg(long)]
    rows: Option<usize>,
}

impl Shape {
    fn params(&self) -> BuiltinParams {
        BuiltinParams { n: self.n, m: self.m, k: self.k, rows: self.rows }
    }
}

#[derive(Args, Debug, Clone)]
#[group(id = "source", required = true, multiple = false, args = ["builtin", "file"])]
struct OpArgs {
    /// Registry operator, see `list-builtins`.
    #[arg(long)]
    builtin: Option<String>,
    /// `.op` file; a second operator in the file is taken as the potential.
    #[arg(long)]
    file: Option<PathBuf>,
    /// `.op` file holding a potential for the operator.
    #[arg(long)]
    potential_file: Option<PathBuf>,
    #[command(flatten)]
    shape: Shape,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Constant-rank check: exact generic rank plus sampled lower bound.
    CheckRank(OpArgs),
    /// Span of the wave cone.
    Wavecone(OpArgs),
    /// Whether the intersection of all kernels is trivial.
    Cocancel(OpArgs),
    /// Pseudoinverse potential, checked for exactness.
    Potential(OpArgs),
    /// Sweeps potential orders 1..=κ for a generic solution.
    FindPotential {
        #[command(flatten)]
        op: OpArgs,
        #[arg(long)]
        order: u32,
        /// Dimension of U (defaults to dim V).
        #[arg(long)]
        dim_u: Option<usize>,
    },
    /// Quasiaffine polynomials of a given degree.
    Nulllag {
        #[command(flatten)]
        op: OpArgs,
        #[arg(long, conflicts_with = "all_degrees", required_unless_present = "all_degrees")]
        degree: Option<usize>,
        #[arg(long)]
        all_degrees: bool,
    },
    /// Murat's polarization test for a polynomial in v1, v2, ...
    Murat {
        #[command(flatten)]
        op: OpArgs,
        #[arg(long)]
        poly: String,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
    /// Looks for an invertible Q with B1 Q = B2 (file paths or builtin names).
    Iso {
        b1: String,
        b2: String,
        #[command(flatten)]
        shape: Shape,
    },
    /// Spectral experiment suite on the torus.
    Verify {
        #[command(flatten)]
        op: OpArgs,
        /// Points per axis (power of two).
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long, default_value_t = 10)]
        seeds: u64,
        /// Directory for a synthesized A-free field (`.bin` + `.json`).
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Checks the 3x7 example with two unrelated third-order potentials.
    Appendix,
    ListBuiltins,
}

/// Outcome of a subcommand: a JSON payload, text lines and the verdict.
struct Outcome {
    command: &'static str,
    payload: Value,
    text: Vec<String>,
    negative: bool,
}

impl Outcome {
    fn new(command: &'static str, payload: Value) -> Self {
        Outcome { command, payload, text: Vec::new(), negative: false }
    }

    fn line(mut self, s: impl Into<String>) -> Self {
        self.text.push(s.into());
        self
    }

    fn negative_if(mut self, neg: bool) -> Self {
        self.negative |= neg;
        self
    }
}

fn read_source(path: &Path) -> wavecone::Result<OperatorSource> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(OperatorSource::new(text, path.display().to_string()))
}

fn load(op: &OpArgs) -> wavecone::Result<(OperatorSymbol, Option<PotentialSymbol>)> {
    let (a, mut b) = match (&op.builtin, &op.file) {
        (Some(name), _) => builtin(name, &op.shape.params())?,
        (None, Some(path)) => {
            let mut ops = parse_operators(&read_source(path)?)?.into_iter();
            let a = ops.next().ok_or_else(|| Error::InvalidParameter("operator file is empty".into()))?;
            (a, ops.next().map(PotentialSymbol::user))
        }
        (None, None) => return Err(Error::InvalidParameter("one of --builtin or --file is required".into())),
    };
    if let Some(path) = &op.potential_file {
        b = Some(PotentialSymbol::user(parse_operator(&read_source(path)?)?));
    }
    Ok((a, b))
}

/// Attached or user potential, else the pseudoinverse construction.
fn load_with_potential(op: &OpArgs) -> wavecone::Result<(OperatorSymbol, PotentialSymbol)> {
    let (a, b) = load(op)?;
    let b = match b {
        Some(b) => b,
        None => pseudoinverse_potential(&a)?,
    };
    Ok((a, b))
}

fn load_symbol(spec: &str, shape: &Shape) -> wavecone::Result<OperatorSymbol> {
    let path = Path::new(spec);
    if path.exists() {
        parse_operator(&read_source(path)?)
    } else {
        Ok(builtin(spec, &shape.params())?.0)
    }
}

fn describe(a: &OperatorSymbol) -> String {
    format!("{} ({}x{}, order {}, n = {})", a.name(), a.dim_to(), a.dim_from(), a.order(), a.n())
}

fn check_rank(op: &OpArgs, samples: usize, seed: u64) -> wavecone::Result<Outcome> {
    let (a, _) = load(op)?;
    let r = constant_rank_check(&a, samples, seed)?;
    let mut out = Outcome::new("check-rank", json!({ "operator": a.name(), "report": r.to_json() }))
        .line(describe(&a))
        .line(format!("generic rank: {}", r.generic_rank))
        .line(format!("tail vanishes: {}", r.tail_vanishes))
        .line(format!("smallest sampled c_r: {}", r.min_sampled_cr_string()))
        .line(format!("verdict: {}", r.verdict.as_str()));
    if let Some(p) = r.drop_points.first() {
        out = out.line(format!("rank drops at {p:?}"));
    }
    Ok(out.negative_if(r.verdict != RankVerdict::VerifiedProbabilistic))
}

fn wavecone(op: &OpArgs, samples: usize, seed: u64) -> wavecone::Result<Outcome> {
    let (a, _) = load(op)?;
    let w = wave_cone_span(&a, samples, seed)?;
    Ok(Outcome::new("wavecone", json!({ "operator": a.name(), "report": w.to_json() }))
        .line(describe(&a))
        .line(format!("span of the wave cone: {} of {}", w.span_basis.len(), a.dim_from()))
        .line(format!("spans V: {}", w.spans_v))
        .negative_if(!w.spans_v))
}

fn cocancel(op: &OpArgs) -> wavecone::Result<Outcome> {
    let (a, _) = load(op)?;
    let c = cocanceling_check(&a)?;
    Ok(Outcome::new("cocancel", json!({ "operator": a.name(), "report": c.to_json() }))
        .line(describe(&a))
        .line(format!("dim of the common kernel: {}", c.basis.len()))
        .line(format!("cocanceling: {}", c.cocanceling))
        .negative_if(!c.cocanceling))
}

fn potential(op: &OpArgs, samples: usize, seed: u64) -> wavecone::Result<Outcome> {
    let (a, _) = load(op)?;
    let b = pseudoinverse_potential(&a)?;
    let ex = verify_exactness(&a, &b.symbol, samples, seed)?;
    let dsl = to_dsl(&b.symbol);
    Ok(Outcome::new(
        "potential",
        json!({
            "operator": a.name(),
            "provenance": b.provenance.as_str(),
            "potential": b.symbol.to_json(),
            "dsl": dsl,
            "exactness": ex.to_json(),
        }),
    )
    .line(describe(&a))
    .line(format!("potential {} of order {}, U = R^{}", b.symbol.name(), b.order(), b.dim_u()))
    .line(dsl.trim_end().to_string())
    .line(format!("exact: {}", ex.exact()))
    .negative_if(!ex.exact()))
}

fn find_potential(op: &OpArgs, order: u32, dim_u: Option<usize>, seed: u64) -> wavecone::Result<Outcome> {
    let (a, _) = load(op)?;
    if order == 0 {
        return Err(Error::InvalidParameter("--order must be at least 1".into()));
    }
    let mut searches = Vec::new();
    let mut text = vec![describe(&a)];
    let mut found = None;
    for k in 1..=order {
        let s = potentials_of_order(&a, k, seed, dim_u)?;
        text.push(format!(
            "order {k}: solutions {}, generic rank {}, worst probe rank {}, expected {} -> {}",
            s.solution_space_dim,
            s.max_generic_rank,
            s.min_probe_rank,
            s.expected_rank,
            if s.potential_exists { "potential" } else { "none" }
        ));
        if s.potential_exists && found.is_none() {
            found = Some(k);
        }
        searches.push(s.to_json());
    }
    let mut out = Outcome::new(
        "find-potential",
        json!({ "operator": a.name(), "searches": searches, "lowest_order": found }),
    );
    out.text = text;
    Ok(out.negative_if(found.is_none()))
}

fn nulllag_text(b: &NullLagrangianBasis) -> Vec<String> {
    let mut t = vec![format!("degree {}: c-space {}, F-space {}", b.degree, b.c_space_dim, b.f_space_dim)];
    t.extend(b.elements.iter().map(|e| format!("  F = {}", e.f.render("v"))));
    t.extend(b.warnings.iter().map(|w| format!("  warning: {w}")));
    t
}

fn nulllag(op: &OpArgs, degree: Option<usize>, all: bool) -> wavecone::Result<Outcome> {
    let (a, b) = load_with_potential(op)?;
    let header = format!("{} with potential {} ({})", describe(&a), b.symbol.name(), b.provenance.as_str());
    if let (Some(s), false) = (degree, all) {
        let basis = solve_null_lagrangians(&b, s)?;
        let mut out = Outcome::new("nulllag", json!({ "operator": a.name(), "basis": basis.to_json() })).line(header);
        out.text.extend(nulllag_text(&basis));
        return Ok(out);
    }
    let bound = b.symbol.n().min(b.dim_v());
    let mut bases = Vec::new();
    let mut text = vec![header];
    for s in 1..=bound {
        match solve_null_lagrangians(&b, s) {
            Ok(basis) => {
                text.extend(nulllag_text(&basis));
                bases.push(basis.to_json());
            }
            Err(Error::SizeCap(msg)) => {
                text.push(format!("degree {s}: skipped ({msg})"));
                bases.push(json!({ "degree": s, "skipped": msg }));
            }
            Err(e) => return Err(e),
        }
    }
    let mut out = Outcome::new("nulllag", json!({ "operator": a.name(), "bases": bases }));
    out.text = text;
    Ok(out)
}

fn murat(op: &OpArgs, poly: &str, trials: usize, seed: u64) -> wavecone::Result<Outcome> {
    let (a, _) = load(op)?;
    let f = parse_polynomial(poly, a.dim_from(), "v")?;
    let r = murat_check(&f, &a, trials, seed)?;
    let mut out = Outcome::new("murat", json!({ "operator": a.name(), "F": f.render("v"), "report": r.to_json() }))
        .line(describe(&a))
        .line(format!("F = {}", f.render("v")))
        .line(format!("evaluations: {} (discarded draws {})", r.evaluations, r.discarded))
        .line(format!("passed: {}", r.passed));
    if let Some(fail) = r.failures.first() {
        out = out.line(format!("first failure: order {} polarization is nonzero", fail.r));
    }
    Ok(out.negative_if(!r.passed))
}

fn iso(b1: &str, b2: &str, shape: &Shape, seed: u64) -> wavecone::Result<Outcome> {
    let s1 = load_symbol(b1, shape)?;
    let s2 = load_symbol(b2, shape)?;
    let q = symbol_isomorphism(&s1, &s2, seed)?;
    let q_json = q.as_ref().map(|q| {
        (0..q.rows()).map(|i| q.row(i).iter().map(wavecone::polyalg::format_rational).collect::<Vec<_>>()).collect::<Vec<_>>()
    });
    let mut out = Outcome::new("iso", json!({ "b1": s1.name(), "b2": s2.name(), "isomorphic": q.is_some(), "q": q_json }))
        .line(format!("{} -> {}", s1.name(), s2.name()));
    out = match &q {
        Some(q) => out.line("isomorphic: true").line(format!("Q =\n{q}")),
        None => out.line("isomorphic: false"),
    };
    Ok(out.negative_if(q.is_none()))
}

fn verify(op: &OpArgs, grid: Option<usize>, seeds: u64, dump: Option<&Path>, seed: u64) -> wavecone::Result<Outcome> {
    let (a, b) = load(op)?;
    let b = match b {
        Some(b) => Some(b),
        None => pseudoinverse_potential(&a).ok(),
    };
    let g = match grid {
        Some(size) => TorusGrid::cube(a.n(), size)?,
        None => default_grid(a.n())?,
    };
    let records = operator_suite(&a, b.as_ref(), &g, seeds)?;
    let failed = records.iter().filter(|r| !r.pass).count();
    let mut dumped = None;
    if let Some(dir) = dump {
        std::fs::create_dir_all(dir)?;
        let v = synthesize_a_free(&a, &g, seed, &vec![0.0; a.dim_from()])?;
        let stem = dir.join(format!("{}_a_free", a.name()));
        dump_field(&v, &stem)?;
        dumped = Some(stem.with_extension("bin").display().to_string());
    }
    let mut out = Outcome::new(
        "verify",
        json!({
            "operator": a.name(),
            "grid": g.sizes(),
            "records": serde_json::to_value(&records).expect("records serialize"),
            "failed": failed,
            "dump": dumped,
        }),
    )
    .line(format!("{} on grid {:?}", describe(&a), g.sizes()));
    for r in &records {
        out = out.line(format!(
            "{:<5} {:<32} {:<20} seed {:<3} metric {:.3e} (tol {:.0e})",
            if r.pass { "PASS" } else { "FAIL" },
            r.experiment,
            r.operator,
            r.seed,
            r.metric,
            r.tolerance
        ));
    }
    if let Some(d) = &dumped {
        out = out.line(format!("field written to {d}"));
    }
    Ok(out.negative_if(failed > 0))
}

fn appendix(samples: usize, seed: u64) -> wavecone::Result<Outcome> {
    let rep = reproduce_appendix(samples, seed)?;
    let mut out = Outcome::new("appendix", rep.to_json());
    for (claim, ok) in rep.verdicts() {
        out = out.line(format!("{} {claim}", if ok { "PASS" } else { "FAIL" }));
    }
    Ok(out.negative_if(!rep.all_hold()))
}

fn list_builtins() -> Outcome {
    let ds = builtin_descriptors();
    let list: Vec<Value> = ds
        .iter()
        .map(|d| {
            json!({
                "name": d.name,
                "params": d.params,
                "description": d.description,
                "constant_rank": d.constant_rank,
                "potential": d.potential,
            })
        })
        .collect();
    let mut out = Outcome::new("list-builtins", json!({ "builtins": list }));
    for d in &ds {
        out = out.line(format!("{:<20} {:<12} {}", d.name, d.params, d.description));
    }
    out
}

fn dispatch(cli: &Cli) -> wavecone::Result<Outcome> {
    let (samples, seed) = (cli.samples, cli.seed);
    match &cli.command {
        Command::CheckRank(op) => check_rank(op, samples, seed),
        Command::Wavecone(op) => wavecone(op, samples, seed),
        Command::Cocancel(op) => cocancel(op),
        Command::Potential(op) => potential(op, samples, seed),
        Command::FindPotential { op, order, dim_u } => find_potential(op, *order, *dim_u, seed),
        Command::Nulllag { op, degree, all_degrees } => nulllag(op, *degree, *all_degrees),
        Command::Murat { op, poly, trials } => murat(op, poly, *trials, seed),
        Command::Iso { b1, b2, shape } => iso(b1, b2, shape, seed),
        Command::Verify { op, grid, seeds, dump } => verify(op, *grid, *seeds, dump.as_deref(), seed),
        Command::Appendix => appendix(samples, seed),
        Command::ListBuiltins => Ok(list_builtins()),
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::SelfCheck(_) => EXIT_SELF_CHECK,
        _ => EXIT_USAGE,
    }
}

/// Runs the tool on `args` (including the program name).
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    if let Some(t) = std::env::var("WAVECONE_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        par::set_thread_limit(t);
    }
    match dispatch(&cli) {
        Ok(o) => {
            if cli.json {
                let mut doc = json!({ "schema": SCHEMA, "command": o.command });
                if let (Some(d), Value::Object(p)) = (doc.as_object_mut(), o.payload) {
                    d.extend(p);
                }
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("json"));
            } else {
                for l in &o.text {
                    let _ = writeln!(out, "{l}");
                }
            }
            if o.negative {
                EXIT_NEGATIVE
            } else {
                EXIT_OK
            }
        }
        Err(e) => {
            let code = exit_code(&e);
            if cli.json {
                let doc = json!({ "schema": SCHEMA, "error": e.to_string(), "exit_code": code });
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("json"));
            }
            let _ = writeln!(err, "error: {e}");
            code
        }
    }
}
