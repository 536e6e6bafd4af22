use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use hyperramsey::bounds::{
    builtin_rules, compute_table, derivation, extend_rules, seed_facts, ExtendOutcome, Limits,
    SeedFact,
};
use hyperramsey::direct::{
    build_direct_cnf, coloring_from_assignment, verify_certificate, Certificate, CliqueVerdict,
};
use hyperramsey::pasting::{
    build_pasting_cnf, closed_form_coloring, decode_coloring, verify_pasting_coloring, ClosedForm,
    PcvColoring, Verdict,
};
use hyperramsey::pcv::{enum_pp, enum_qq, enum_vk, FamilyKind};
use hyperramsey::sat::{
    export_assignment, export_dimacs, import_assignment, parse_dimacs, solve_complete,
    solve_local_search_parallel, solve_local_search_with, Cnf, CompleteOutcome, LocalOutcome,
    LocalSearchParams, NeighborRelation, Progress, SearchControl,
};

const WORKERS_ENV: &str = "HYPERRAMSEY_WORKERS";

#[derive(Parser)]
#[command(name = "hyperramsey", version, about = "Lower bounds for hypergraph Ramsey numbers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a vector family, one member per line.
    Enum(EnumArgs),
    /// Build a pasting CNF; export it or solve it.
    Paste(PasteArgs),
    /// Build the hyperedge CNF or search for a certificate.
    Direct(DirectArgs),
    /// Solve a DIMACS file.
    Solve(SolveArgs),
    /// Check a certificate, a vector coloring or an assignment.
    Verify(VerifyArgs),
    /// Compute lower-bound tables.
    Bounds(BoundsArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    #[value(name = "V")]
    V,
    #[value(name = "P")]
    P,
    #[value(name = "Q")]
    Q,
}

#[derive(Args)]
struct EnumArgs {
    #[arg(long, value_enum, ignore_case = true)]
    family: Family,
    /// Total for V, p for P, q for Q.
    #[arg(long)]
    s: u32,
    #[arg(long)]
    d: u32,
}

#[derive(Clone, Copy, ValueEnum)]
enum Solver {
    Complete,
    Local,
}

#[derive(Args, Clone)]
struct SearchArgs {
    /// Random seed; when omitted one is drawn and printed first.
    #[arg(long)]
    seed: Option<u64>,
    /// Flips per try.
    #[arg(long, default_value_t = 1_000_000)]
    cutoff: u64,
    /// Number of tries.
    #[arg(long, default_value_t = 100)]
    restarts: u64,
    /// Independent searches with seeds seed, seed+1, ...
    #[arg(long, env = WORKERS_ENV, default_value_t = 1)]
    workers: u64,
    /// Progress line to stderr every this many flips (0 = quiet).
    #[arg(long, default_value_t = 0)]
    progress: u64,
}

#[derive(Args)]
struct PasteArgs {
    #[arg(long)]
    k: u32,
    #[arg(long)]
    p: u32,
    #[arg(long)]
    q: u32,
    #[arg(long)]
    d: u32,
    /// Write DIMACS here instead of stdout.
    #[arg(long)]
    dimacs: Option<PathBuf>,
    #[arg(long, value_enum)]
    solve: Option<Solver>,
    /// Node budget for the complete solver.
    #[arg(long, default_value_t = 10_000_000)]
    budget: u64,
    /// Write the decoded coloring here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    search: SearchArgs,
}

#[derive(Args)]
struct DirectArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    k: u32,
    /// Write DIMACS here instead of stdout.
    #[arg(long)]
    dimacs: Option<PathBuf>,
    /// Run local search for a certificate.
    #[arg(long)]
    search: bool,
    /// Write the certificate here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Certificate on fewer vertices used as the start of the first try.
    #[arg(long)]
    warm: Option<PathBuf>,
    #[command(flatten)]
    search_args: SearchArgs,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    cnf: PathBuf,
    #[arg(long, value_enum, default_value_t = Solver::Complete)]
    solver: Solver,
    #[arg(long, default_value_t = 10_000_000)]
    budget: u64,
    #[command(flatten)]
    search: SearchArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClosedFormName {
    Chi1,
    Chi2,
    TwoDivide,
    LargeQ,
}

#[derive(Args)]
struct VerifyArgs {
    /// Certificate file.
    #[arg(long, conflicts_with_all = ["coloring", "closed_form", "cnf"])]
    cert: Option<PathBuf>,
    /// Vector coloring file; needs --p and --q.
    #[arg(long, conflicts_with_all = ["closed_form", "cnf"])]
    coloring: Option<PathBuf>,
    /// Built-in coloring; needs --p, --q and --d (and --k for the families).
    #[arg(long, value_enum, conflicts_with = "cnf")]
    closed_form: Option<ClosedFormName>,
    /// DIMACS file; needs --assignment.
    #[arg(long, requires = "assignment")]
    cnf: Option<PathBuf>,
    #[arg(long)]
    assignment: Option<PathBuf>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    p: Option<u32>,
    #[arg(long)]
    q: Option<u32>,
    #[arg(long)]
    d: Option<u32>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Text,
    Csv,
}

#[derive(Args)]
struct BoundsArgs {
    /// Single edge size; overrides --k-min/--k-max.
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    k_min: Option<u32>,
    #[arg(long)]
    k_max: Option<u32>,
    #[arg(long)]
    p_max: Option<u32>,
    #[arg(long)]
    q_max: Option<u32>,
    /// Certificate backing a seed fact (repeatable).
    #[arg(long)]
    cert: Vec<PathBuf>,
    /// Seed fact taken on trust, as k,p,q,value (repeatable).
    #[arg(long)]
    assume: Vec<String>,
    /// Print one cell and its derivation, as p,q.
    #[arg(long)]
    cell: Option<String>,
    #[arg(long, value_enum, default_value_t = TableFormat::Text)]
    format: TableFormat,
    /// Try to solve pasting bases for every k above the built-in range.
    #[arg(long)]
    extend: bool,
    /// Node budget per pasting base when extending.
    #[arg(long)]
    budget: Option<u64>,
    /// TOML file with defaults: k_min, k_max, p_max, q_max, certs, budget.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct BoundsConfig {
    k_min: Option<u32>,
    k_max: Option<u32>,
    p_max: Option<u32>,
    q_max: Option<u32>,
    #[serde(default)]
    certs: Vec<PathBuf>,
    budget: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(w) = std::env::var(WORKERS_ENV) {
        if let Ok(n) = w.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let result = match cli.command {
        Command::Enum(a) => cmd_enum(a),
        Command::Paste(a) => cmd_paste(a),
        Command::Direct(a) => cmd_direct(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Bounds(a) => cmd_bounds(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn emit(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn cmd_enum(a: EnumArgs) -> Result<bool> {
    let family = match a.family {
        Family::V => enum_vk(a.s, a.d),
        Family::P => enum_pp(a.s, a.d),
        Family::Q => enum_qq(a.s, a.d),
    };
    let mut out = String::new();
    for v in family.iter() {
        out.push_str(&format!("{v}\n"));
    }
    emit(&out)?;
    Ok(true)
}

/// Resolves the seed, printing it when it was generated.
fn resolve_seed(s: &SearchArgs) -> Result<u64> {
    match s.seed {
        Some(seed) => Ok(seed),
        None => {
            let seed = rand::random::<u64>();
            emit(&format!("seed {seed}\n"))?;
            Ok(seed)
        }
    }
}

fn report(p: Progress) {
    eprintln!(
        "seed {} try {} flips {} unsat {} best {}",
        p.seed, p.try_index, p.flips, p.unsat, p.best_unsat
    );
}

fn local_search(
    cnf: &Cnf,
    neighbors: &NeighborRelation,
    s: &SearchArgs,
    warm_start: Option<Vec<bool>>,
) -> Result<LocalOutcome> {
    let seed = resolve_seed(s)?;
    let params = LocalSearchParams {
        warm_start,
        ..LocalSearchParams::new(seed, s.cutoff, s.restarts)
    };
    let progress: Option<&(dyn Fn(Progress) + Sync)> = if s.progress > 0 {
        Some(&report)
    } else {
        None
    };
    if s.workers <= 1 {
        let control = SearchControl {
            stop: None,
            progress,
            progress_every: s.progress,
        };
        return Ok(solve_local_search_with(cnf, neighbors, &params, &control));
    }
    let seeds: Vec<u64> = (0..s.workers).map(|i| seed.wrapping_add(i)).collect();
    let (winner, outcome) =
        solve_local_search_parallel(cnf, neighbors, &params, &seeds, progress, s.progress);
    if let Some(w) = winner {
        eprintln!("solved by seed {w}");
    }
    Ok(outcome)
}

fn cmd_paste(a: PasteArgs) -> Result<bool> {
    let (inst, cnf) = build_pasting_cnf(a.k, a.p, a.q, a.d)?;
    let Some(solver) = a.solve else {
        let text = export_dimacs(&cnf);
        match &a.dimacs {
            Some(path) => {
                write(path, &text)?;
                emit(&format!(
                    "variables {} clauses {}\n",
                    cnf.variable_count(),
                    cnf.clause_count()
                ))?;
            }
            None => emit(&text)?,
        }
        return Ok(true);
    };
    if let Some(path) = &a.dimacs {
        write(path, &export_dimacs(&cnf))?;
    }
    let assignment = match solver {
        Solver::Complete => match solve_complete(&cnf, a.budget) {
            CompleteOutcome::Sat(asg) => asg,
            CompleteOutcome::Unsat => {
                emit("UNSAT\n")?;
                return Ok(false);
            }
            CompleteOutcome::BudgetExceeded { nodes } => {
                eprintln!("budget exhausted after {nodes} nodes");
                emit("UNKNOWN\n")?;
                return Ok(false);
            }
        },
        Solver::Local => {
            let neighbors = NeighborRelation::from_clauses(&cnf);
            match local_search(&cnf, &neighbors, &a.search, None)? {
                LocalOutcome::Sat { assignment, .. } => assignment,
                _ => {
                    emit("UNKNOWN\n")?;
                    return Ok(false);
                }
            }
        }
    };
    let chi = decode_coloring(&inst, &assignment)?;
    if !verify_pasting_coloring(&chi, a.p, a.q, a.d)?.is_valid() {
        bail!("decoded coloring fails verification");
    }
    let text = chi.to_text(a.d);
    match &a.out {
        Some(path) => {
            write(path, &text)?;
            emit("SAT\n")?;
        }
        None => emit(&format!("SAT\n{text}"))?,
    }
    Ok(true)
}

fn cmd_direct(a: DirectArgs) -> Result<bool> {
    let (cnf, neighbors) = build_direct_cnf(a.n, a.k)?;
    if !a.search {
        let text = export_dimacs(&cnf);
        match &a.dimacs {
            Some(path) => {
                write(path, &text)?;
                emit(&format!(
                    "variables {} clauses {}\n",
                    cnf.variable_count(),
                    cnf.clause_count()
                ))?;
            }
            None => emit(&text)?,
        }
        return Ok(true);
    }
    if let Some(path) = &a.dimacs {
        write(path, &export_dimacs(&cnf))?;
    }
    let warm = match &a.warm {
        Some(path) => {
            let cert = Certificate::parse(&read(path)?)
                .with_context(|| format!("in {}", path.display()))?;
            if cert.coloring.k() != a.k || cert.coloring.n() > a.n {
                bail!(
                    "warm-start certificate has n={}, k={}; need k={} and n <= {}",
                    cert.coloring.n(),
                    cert.coloring.k(),
                    a.k,
                    a.n
                );
            }
            // colex ranks of the smaller vertex set form a prefix
            Some(cert.coloring.bits())
        }
        None => None,
    };
    let outcome = local_search(&cnf, &neighbors, &a.search_args, warm)?;
    let LocalOutcome::Sat { assignment, tries, flips } = outcome else {
        emit("TIMEOUT\n")?;
        return Ok(false);
    };
    eprintln!("solved after {tries} tries, {flips} flips");
    let coloring = coloring_from_assignment(&assignment, a.n, a.k)?;
    let (p, q) = (a.k + 1, a.k + 1);
    if let CliqueVerdict::Invalid { clique, color } = verify_certificate(&coloring, p, q) {
        bail!("search result has a {color} clique {clique:?}");
    }
    let text = Certificate { coloring, p, q }.to_text();
    match &a.out {
        Some(path) => {
            write(path, &text)?;
            emit("SAT\n")?;
        }
        None => emit(&text)?,
    }
    Ok(true)
}

fn cmd_solve(a: SolveArgs) -> Result<bool> {
    let cnf = parse_dimacs(&read(&a.cnf)?).with_context(|| format!("in {}", a.cnf.display()))?;
    let assignment = match a.solver {
        Solver::Complete => match solve_complete(&cnf, a.budget) {
            CompleteOutcome::Sat(asg) => Some(asg),
            CompleteOutcome::Unsat => {
                emit("s UNSATISFIABLE\n")?;
                return Ok(false);
            }
            CompleteOutcome::BudgetExceeded { nodes } => {
                eprintln!("budget exhausted after {nodes} nodes");
                None
            }
        },
        Solver::Local => {
            let neighbors = NeighborRelation::from_clauses(&cnf);
            match local_search(&cnf, &neighbors, &a.search, None)? {
                LocalOutcome::Sat { assignment, .. } => Some(assignment),
                _ => None,
            }
        }
    };
    match assignment {
        Some(asg) => {
            emit(&format!("s SATISFIABLE\n{}", export_assignment(&asg)))?;
            Ok(true)
        }
        None => {
            emit("s UNKNOWN\n")?;
            Ok(false)
        }
    }
}

fn need(v: Option<u32>, flag: &str) -> Result<u32> {
    v.with_context(|| format!("--{flag} is required here"))
}

fn pasting_verdict(chi: &PcvColoring, p: u32, q: u32, d: u32) -> Result<bool> {
    match verify_pasting_coloring(chi, p, q, d)? {
        Verdict::Valid => {
            emit("VALID\n")?;
            Ok(true)
        }
        Verdict::Invalid { kind, uncovered } => {
            let wanted = match kind {
                FamilyKind::Pp => "blue",
                _ => "red",
            };
            emit(&format!("INVALID: {kind} member {uncovered} contains no {wanted} vector\n"))?;
            Ok(false)
        }
    }
}

fn cmd_verify(a: VerifyArgs) -> Result<bool> {
    if let Some(path) = &a.cert {
        let cert =
            Certificate::parse(&read(path)?).with_context(|| format!("in {}", path.display()))?;
        let p = a.p.unwrap_or(cert.p);
        let q = a.q.unwrap_or(cert.q);
        return match verify_certificate(&cert.coloring, p, q) {
            CliqueVerdict::Valid => {
                emit("VALID\n")?;
                Ok(true)
            }
            CliqueVerdict::Invalid { clique, color } => {
                let list: Vec<String> = clique.iter().map(u32::to_string).collect();
                emit(&format!("INVALID: {color} clique {{{}}}\n", list.join(",")))?;
                Ok(false)
            }
        };
    }
    if let Some(path) = &a.coloring {
        let (chi, d) =
            PcvColoring::parse(&read(path)?).with_context(|| format!("in {}", path.display()))?;
        return pasting_verdict(&chi, need(a.p, "p")?, need(a.q, "q")?, a.d.unwrap_or(d));
    }
    if let Some(name) = a.closed_form {
        let form = match name {
            ClosedFormName::Chi1 => ClosedForm::Chi1,
            ClosedFormName::Chi2 => ClosedForm::Chi2,
            ClosedFormName::TwoDivide => ClosedForm::TwoDivide(need(a.k, "k")?),
            ClosedFormName::LargeQ => ClosedForm::LargeQ {
                k: need(a.k, "k")?,
                d: need(a.d, "d")?,
            },
        };
        let chi = closed_form_coloring(form)?;
        return pasting_verdict(&chi, need(a.p, "p")?, need(a.q, "q")?, need(a.d, "d")?);
    }
    if let (Some(cnf_path), Some(asg_path)) = (&a.cnf, &a.assignment) {
        let cnf = parse_dimacs(&read(cnf_path)?)
            .with_context(|| format!("in {}", cnf_path.display()))?;
        let asg = import_assignment(&read(asg_path)?, cnf.variable_count())
            .with_context(|| format!("in {}", asg_path.display()))?;
        return match cnf.first_unsatisfied(&asg) {
            None => {
                emit("VALID\n")?;
                Ok(true)
            }
            Some(ci) => {
                emit(&format!("INVALID: clause {} is unsatisfied\n", ci + 1))?;
                Ok(false)
            }
        };
    }
    bail!("nothing to verify: pass --cert, --coloring, --closed-form or --cnf")
}

fn parse_numbers(text: &str, count: usize, flag: &str) -> Result<Vec<u64>> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != count {
        bail!("--{flag} expects {count} comma-separated numbers, got {text:?}");
    }
    parts
        .iter()
        .map(|s| s.parse::<u64>().with_context(|| format!("--{flag}: bad number {s:?}")))
        .collect()
}

fn cmd_bounds(a: BoundsArgs) -> Result<bool> {
    let config: BoundsConfig = match &a.config {
        Some(path) => {
            toml::from_str(&read(path)?).with_context(|| format!("in {}", path.display()))?
        }
        None => BoundsConfig::default(),
    };
    let cell = match &a.cell {
        Some(text) => {
            let v = parse_numbers(text, 2, "cell")?;
            Some((v[0] as u32, v[1] as u32))
        }
        None => None,
    };
    let (k_min, k_max) = match a.k {
        Some(k) => (k, k),
        None => (
            a.k_min.or(config.k_min).unwrap_or(4),
            a.k_max.or(config.k_max).unwrap_or(4),
        ),
    };
    // a cell depends only on cells inside the square spanned by its larger index
    let side = cell.map_or(10, |(p, q)| p.max(q));
    let limits = Limits {
        k_min,
        k_max,
        p_max: a.p_max.or(config.p_max).unwrap_or(side),
        q_max: a.q_max.or(config.q_max).unwrap_or(side),
    };
    if k_min > k_max || k_min < 2 {
        bail!("need 2 <= k_min <= k_max, got {k_min}..{k_max}");
    }

    let mut certificates = Vec::new();
    for path in config.certs.iter().chain(&a.cert) {
        let cert =
            Certificate::parse(&read(path)?).with_context(|| format!("in {}", path.display()))?;
        certificates.push(cert);
    }
    let mut facts = seed_facts(&limits, &certificates)?;
    for text in &a.assume {
        let v = parse_numbers(text, 4, "assume")?;
        facts.push(SeedFact::assumed(v[0] as u32, v[1] as u32, v[2] as u32, v[3]));
    }

    let mut rules = builtin_rules();
    if a.extend {
        let budget = a.budget.or(config.budget).unwrap_or(10_000_000);
        for k in k_min.max(26)..=k_max {
            match extend_rules(k, budget)? {
                ExtendOutcome::Installed(rule) => {
                    eprintln!("k = {k}: installed {}", rule.id);
                    rules.push(rule);
                }
                ExtendOutcome::Rejected { p, q, d, reason, .. } => {
                    eprintln!("k = {k}: base ({k}, {p}, {q}, {d}) rejected: {reason:?}");
                }
            }
        }
    }

    let table = compute_table(&facts, &rules, limits);
    if let Some((p, q)) = cell {
        let Some(fact) = table.fact(k_min, p, q) else {
            bail!("cell ({p},{q}) is outside the grid for k = {k_min}");
        };
        emit(&format!("{fact}\n{}", derivation(&fact)))?;
        return Ok(true);
    }
    match a.format {
        TableFormat::Csv => emit(&table.to_csv())?,
        TableFormat::Text => {
            let mut out = String::new();
            for k in k_min..=k_max {
                if k > k_min {
                    out.push('\n');
                }
                out.push_str(&table.to_text(k));
            }
            emit(&out)?;
        }
    }
    Ok(true)
}
