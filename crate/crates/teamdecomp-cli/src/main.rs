//! `teamdecomp`: generate team games, inspect their decompositions, and
//! solve or export the saddle-point LP.
//!
//! Machine output (JSON) goes to stdout, human summaries to stderr.
//! Exit codes: 2 for invalid input or flags, 3 when a feasible-set or
//! oracle cap is exceeded, 4 for solver failures, 1 for I/O errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use teamdecomp::feasible::DEFAULT_CAP;
use teamdecomp::generators::{generate, load_efg, save_efg, to_efg_string, Cnf, EfgError, Family, GameSpec};
use teamdecomp::game::{GameTree, Team};
use teamdecomp::lp::{export_lp, lp_size, ExportFormat};
use teamdecomp::pipeline::{prepare, solve_prepared, Options, PipelineError, RunReport, TeamModel};
use teamdecomp::game::build_team_view;
use teamdecomp::solver::{brute_force_value, Mode, OracleError, DEFAULT_ORACLE_CAP};

#[derive(Parser)]
#[command(name = "teamdecomp", version, about = "Team correlated equilibria through public-node tree decompositions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a benchmark game as EFG-JSON.
    Gen(GenArgs),
    /// Structural statistics of one team's decomposition.
    Stats {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "plus")]
        team: TeamArg,
    },
    /// Run the full pipeline and report the value, plans and gap.
    Solve {
        /// One or more games; several inputs produce one JSON line each.
        #[arg(long = "in", required = true, num_args = 1..)]
        input: Vec<PathBuf>,
        #[arg(long)]
        mode: Option<Mode>,
        /// Also write the report (of the last input) to this file.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Omit wall times so reports compare byte for byte.
        #[arg(long)]
        no_timing: bool,
        /// Skip Minus's plan and the equilibrium gap.
        #[arg(long)]
        value_only: bool,
        /// Solve this many input games in parallel.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Write the saddle-point LP in LP-text or fixed MPS format.
    Export {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        format: ExportFormat,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve the game by enumerating pure strategies (tiny games only).
    Oracle {
        #[arg(long = "in")]
        input: PathBuf,
        /// Largest number of pure strategies per team.
        #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
        cap: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TeamArg {
    Plus,
    Minus,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Kuhn,
    Leduc,
    #[value(alias = "liars-dice")]
    Liarsdice,
    Goofspiel,
    Sat,
    #[value(alias = "width-gap")]
    Widthgap,
}

#[derive(clap::Args)]
struct GenArgs {
    /// Benchmark name such as 21K3, 21L133, 31L'132, 21D3, 21G or 21GL.
    #[arg(long, conflicts_with = "family")]
    name: Option<String>,
    #[arg(long, value_enum, required_unless_present = "name")]
    family: Option<FamilyArg>,
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long)]
    ranks: Option<usize>,
    #[arg(long)]
    bets: Option<usize>,
    #[arg(long)]
    suits: Option<usize>,
    /// Leduc: Plus never bets or raises.
    #[arg(long)]
    no_raise: bool,
    #[arg(long)]
    faces: Option<usize>,
    /// Goofspiel: players see only the winner of each round.
    #[arg(long)]
    limited: bool,
    #[arg(long)]
    k: Option<usize>,
    /// SAT game formula, clauses separated by `;`, literals by `,`,
    /// e.g. `1,-2,3;-1,2,3`.
    #[arg(long)]
    cnf: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl ToString) -> Failure {
        Failure { code, message: message.to_string() }
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Failure {
        let code = match &e {
            PipelineError::Invalid(_) | PipelineError::View(_) | PipelineError::Payoff(_) | PipelineError::Decomposition(_) => 2,
            PipelineError::Feasible(_) => 3,
            PipelineError::Lp(_) | PipelineError::Solve(_) => 4,
        };
        Failure::new(code, e)
    }
}

impl From<EfgError> for Failure {
    fn from(e: EfgError) -> Failure {
        let code = if matches!(e, EfgError::Io { .. }) { 1 } else { 2 };
        Failure::new(code, e)
    }
}

fn cap() -> Result<usize, Failure> {
    match std::env::var("TEAMDECOMP_CAP") {
        Ok(v) => v.trim().parse().map_err(|_| Failure::new(2, format!("TEAMDECOMP_CAP must be a nonnegative integer, got `{v}`"))),
        Err(_) => Ok(DEFAULT_CAP),
    }
}

fn parse_cnf(text: &str) -> Result<Cnf, Failure> {
    let mut clauses = Vec::new();
    for clause in text.split(';').filter(|c| !c.trim().is_empty()) {
        let lits: Vec<i32> = clause
            .split(',')
            .map(|l| l.trim().parse::<i32>())
            .collect::<Result<_, _>>()
            .map_err(|e| Failure::new(2, format!("bad literal in `{clause}`: {e}")))?;
        let lits: [i32; 3] = lits.try_into().map_err(|_| Failure::new(2, format!("clause `{clause}` must have three literals")))?;
        clauses.push(lits);
    }
    let vars = clauses.iter().flatten().map(|l| l.unsigned_abs() as usize).max().unwrap_or(0);
    let cnf = Cnf { vars, clauses };
    cnf.check().map_err(|e| Failure::new(2, e))?;
    Ok(cnf)
}

fn gen_spec(a: &GenArgs) -> Result<GameSpec, Failure> {
    let mut spec = match (&a.name, a.family) {
        (Some(name), _) => GameSpec::from_name(name).ok_or_else(|| Failure::new(2, format!("unrecognized game name `{name}`")))?,
        (None, Some(f)) => {
            let family = match f {
                FamilyArg::Kuhn => Family::Kuhn,
                FamilyArg::Leduc => Family::Leduc,
                FamilyArg::Liarsdice => Family::LiarsDice,
                FamilyArg::Goofspiel => Family::Goofspiel,
                FamilyArg::Sat => Family::Sat,
                FamilyArg::Widthgap => Family::WidthGap,
            };
            GameSpec::new(family, a.m, a.n)
        }
        (None, None) => return Err(Failure::new(2, "either --name or --family is required")),
    };
    if let Some(r) = a.ranks {
        spec.ranks = r;
    }
    if let Some(b) = a.bets {
        spec.bets = b;
    }
    if let Some(s) = a.suits {
        spec.suits = s;
    }
    if let Some(f) = a.faces {
        spec.faces = f;
    }
    if let Some(k) = a.k {
        spec.k = k;
    }
    spec.no_raise |= a.no_raise;
    spec.limited |= a.limited;
    if let Some(c) = &a.cnf {
        spec.cnf = Some(parse_cnf(c)?);
    }
    Ok(spec)
}

fn cmd_gen(a: &GenArgs) -> Result<(), Failure> {
    let spec = gen_spec(a)?;
    let game = generate(&spec).map_err(|e| Failure::new(2, e))?;
    match &a.out {
        Some(path) => {
            save_efg(&game, path)?;
            eprintln!("wrote {} ({} nodes, {} terminals)", path.display(), game.len(), game.terminal_count());
        }
        None => emit(&to_efg_string(&game)),
    }
    Ok(())
}

fn load(path: &Path) -> Result<GameTree, Failure> {
    Ok(load_efg(path)?)
}

/// Writes to stdout, ignoring a closed pipe (e.g. output piped into `head`).
fn emit(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}").and_then(|_| out.flush());
}

fn print_json(v: &serde_json::Value) {
    emit(&serde_json::to_string_pretty(v).expect("JSON serializes"));
}

fn cmd_stats(input: &Path, team: TeamArg) -> Result<(), Failure> {
    let game = load(input)?;
    let report = teamdecomp::game::validate(&game);
    if !report.is_valid() {
        return Err(PipelineError::Invalid(report).into());
    }
    let team = match team {
        TeamArg::Plus => Team::Plus,
        TeamArg::Minus => Team::Minus,
    };
    let view = build_team_view(&game, team).map_err(PipelineError::from)?;
    let model = TeamModel::build(&game, view, cap()?)?;
    let s = model.stats(&game);
    eprintln!(
        "{team}: {} sequences, sum |X_C| = {}, ratio {:.1}, treewidth {}, reachable width {}",
        s.seq_count, s.sum_xc, s.ratio, s.treewidth, s.reachable_width
    );
    print_json(&json!({
        "schema": 1,
        "team": team,
        "seq_count": s.seq_count,
        "sum_xc": s.sum_xc,
        "ratio": s.ratio,
        "reachable_width": s.reachable_width,
        "treewidth": s.treewidth,
        "max_degree": s.max_degree,
        "decomposition": model.widths,
        "feasible_sets": model.reach,
    }));
    Ok(())
}

fn solve_one(input: &Path, options: &Options, timing: bool) -> Result<(RunReport, serde_json::Value), Failure> {
    let game = load(input)?;
    let p = prepare(&game, options.cap)?;
    let (s, nnz) = solve_prepared(&p, options)?;
    let mut timings = p.timings.clone();
    timings.push(("solve".to_string(), s.wall_ms));
    let report = RunReport {
        plus: p.plus.stats(&game),
        minus: p.minus.stats(&game),
        lp_nnz: nnz,
        mode: s.mode,
        value: s.value,
        gap: s.gap,
        plan_plus: s.plan_plus,
        plan_minus: s.plan_minus,
        iterations: s.iterations,
        timings,
    };
    let spec = json!({ "path": input.display().to_string(), "nodes": game.len(), "terminals": game.terminal_count() });
    let v = report.to_json(spec, timing);
    Ok((report, v))
}

fn cmd_solve(
    inputs: &[PathBuf],
    mode: Option<Mode>,
    report_path: Option<&Path>,
    no_timing: bool,
    value_only: bool,
    jobs: usize,
) -> Result<(), Failure> {
    let options = Options { mode, cap: cap()?, equilibrium: !value_only };
    let jobs = jobs.max(1);
    let mut results: Vec<Option<Result<(RunReport, serde_json::Value), Failure>>> = (0..inputs.len()).map(|_| None).collect();
    for (chunk_inputs, chunk_out) in inputs.chunks(jobs).zip(results.chunks_mut(jobs)) {
        std::thread::scope(|scope| {
            for (input, slot) in chunk_inputs.iter().zip(chunk_out.iter_mut()) {
                let options = &options;
                scope.spawn(move || *slot = Some(solve_one(input, options, !no_timing)));
            }
        });
    }
    let mut first_failure = None;
    let mut last = None;
    for (input, r) in inputs.iter().zip(results) {
        match r.expect("every job ran") {
            Ok((report, v)) => {
                let gap = report.gap.as_ref().map(|g| g.to_string()).unwrap_or_else(|| "-".into());
                eprintln!(
                    "{}: value {} ({:.4}), gap {gap}, {} mode, {} LP nonzeros",
                    input.display(),
                    report.value,
                    report.value.to_f64(),
                    report.mode.as_str(),
                    report.lp_nnz
                );
                if inputs.len() == 1 {
                    print_json(&v);
                } else {
                    emit(&serde_json::to_string(&v).expect("JSON serializes"));
                }
                last = Some(v);
            }
            Err(f) => {
                eprintln!("error: {}: {}", input.display(), f.message);
                first_failure.get_or_insert(f.code);
            }
        }
    }
    if let (Some(path), Some(v)) = (report_path, &last) {
        let text = serde_json::to_string_pretty(v).expect("JSON serializes");
        std::fs::write(path, text + "\n").map_err(|e| Failure::new(1, format!("{}: {e}", path.display())))?;
    }
    match first_failure {
        Some(code) => Err(Failure::new(code, "some games failed")),
        None => Ok(()),
    }
}

fn cmd_export(input: &Path, format: ExportFormat, out: &Path) -> Result<(), Failure> {
    let game = load(input)?;
    let p = prepare(&game, cap()?)?;
    let lp = p.saddle().map_err(PipelineError::from)?;
    let e = export_lp(&lp, format);
    let write = |path: &Path, text: &str| std::fs::write(path, text).map_err(|e| Failure::new(1, format!("{}: {e}", path.display())));
    write(out, &e.text)?;
    let mut written = json!({ "model": out.display().to_string(), "rows": lp.rows(), "cols": lp.cols(), "nnz": lp_size(&lp) });
    if let Some(names) = &e.names {
        let mut sidecar = out.as_os_str().to_owned();
        sidecar.push(".names.json");
        let sidecar = PathBuf::from(sidecar);
        write(&sidecar, names)?;
        written["names"] = json!(sidecar.display().to_string());
    }
    eprintln!("wrote {} ({} rows, {} columns)", out.display(), lp.rows(), lp.cols());
    print_json(&written);
    Ok(())
}

fn cmd_oracle(input: &Path, cap: usize) -> Result<(), Failure> {
    let game = load(input)?;
    let report = teamdecomp::game::validate(&game);
    if !report.is_valid() {
        return Err(PipelineError::Invalid(report).into());
    }
    let r = brute_force_value(&game, cap).map_err(|e| match e {
        OracleError::CapExceeded { .. } => Failure::new(3, e),
        OracleError::Solve(_) => Failure::new(4, e),
    })?;
    let value = teamdecomp::rational::format_q(&r.value);
    eprintln!("value {value} ({} and {} distinct pure strategies, {} best responses)", r.pure_counts[0], r.pure_counts[1], r.responses);
    print_json(&json!({
        "schema": 1,
        "value": value,
        "value_f64": teamdecomp::rational::q_to_f64(&r.value),
        "pure_strategies": { "plus": r.pure_counts[0], "minus": r.pure_counts[1] },
        "best_responses": r.responses,
    }));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Stats { input, team } => cmd_stats(input, *team),
        Command::Solve { input, mode, report, no_timing, value_only, jobs } => {
            cmd_solve(input, *mode, report.as_deref(), *no_timing, *value_only, *jobs)
        }
        Command::Export { input, format, out } => cmd_export(input, *format, out),
        Command::Oracle { input, cap } => cmd_oracle(input, *cap),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
