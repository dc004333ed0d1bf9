//! `zahl`: solve, tabulate, verify and play Zahlenschlacht from a terminal.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error, 3 a cell
//! exceeded the solver budget.

use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufWriter, Write};
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use zahlenschlacht::game::{GameConfig, Player};
use zahlenschlacht::registry::{compute_registry, registry};
use zahlenschlacht::session::{Mode, Session, SessionError, SessionStore, SessionView};
use zahlenschlacht::solver::{SolveError, Solver, SolverOptions, DEFAULT_BUDGET};
use zahlenschlacht::strategy_a::{opening_move, ConstructiveA, PlanMode};
use zahlenschlacht::strategy_b::{known_b_win, Bot, BotKind};
use zahlenschlacht::table::{winner_table, CellValue, WinnerTable};
use zahlenschlacht::verify::{verify_strategy, VerificationReport, VerifyError};
use zahlenschlacht_server::{serve, DEFAULT_PORT, PORT_ENV};

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(name = "zahl", version, about = "The crossing-out game Z(n, d)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one game from the initial position.
    Solve {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        d: u32,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Solve a rectangle of games and write the winner table.
    Table {
        #[arg(long, value_parser = parse_span)]
        n: Span,
        #[arg(long, value_parser = parse_span)]
        d: Span,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Write here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Check the known results or the strategies against the solver.
    Verify {
        #[arg(long, value_enum)]
        scope: Scope,
        #[arg(long, value_parser = parse_span)]
        n: Span,
        #[arg(long, value_parser = parse_span)]
        d: Span,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Play in the terminal, as A against the bot or two players at one keyboard.
    Play {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        d: u32,
        #[arg(long, value_enum, default_value_t = PlayMode::VsBot)]
        mode: PlayMode,
        /// Seed for the bot's random choices.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the HTTP API.
    Serve {
        #[arg(long, env = PORT_ENV, default_value_t = DEFAULT_PORT)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Append each session's events to `<id>.jsonl` here.
        #[arg(long)]
        log_dir: Option<PathBuf>,
    },
    /// Recompute the list of variants offered against the bot.
    Variants {
        /// Write the list here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Compare with the shipped list instead of printing it.
        #[arg(long)]
        check: bool,
    },
}

#[derive(clap::Args, Clone, Copy)]
struct SolverArgs {
    /// Refuse positions whose reachable residue vectors may exceed this.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Also merge positions related by multiplication with a unit.
    #[arg(long)]
    unit_symmetry: bool,
}

impl From<SolverArgs> for SolverOptions {
    fn from(a: SolverArgs) -> Self {
        SolverOptions {
            budget: a.budget,
            unit_symmetry: a.unit_symmetry,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Scope {
    Theorems,
    Strategies,
}

#[derive(Clone, Copy, ValueEnum)]
enum PlayMode {
    VsBot,
    HotSeat,
}

/// An inclusive range written `a..b`, `a..=b` or `a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Span {
    lo: u32,
    hi: u32,
}

impl Span {
    fn range(self) -> RangeInclusive<u32> {
        self.lo..=self.hi
    }
}

fn parse_span(s: &str) -> Result<Span, String> {
    let number = |t: &str| {
        t.trim()
            .parse::<u32>()
            .map_err(|e| format!("`{t}` is not a number: {e}"))
    };
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (number(a)?, number(b.strip_prefix('=').unwrap_or(b))?),
        None => {
            let x = number(s)?;
            (x, x)
        }
    };
    if lo > hi {
        return Err(format!("empty range {s}"));
    }
    Ok(Span { lo, hi })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("zahl: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Budget(SolveError),
    Io(io::Error),
    Other(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Budget(_) => EXIT_BUDGET,
            CliError::Io(_) | CliError::Other(_) => EXIT_FAILURE,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Other(m) => f.write_str(m),
            CliError::Budget(e) => e.fmt(f),
            CliError::Io(e) => e.fmt(f),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<SessionError> for CliError {
    fn from(e: SessionError) -> Self {
        match e {
            SessionError::InvalidConfig { .. } | SessionError::UnknownVariant { .. } => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Other(other.to_string()),
        }
    }
}

fn config(n: u32, d: u32) -> Result<GameConfig, CliError> {
    GameConfig::new(n, d).map_err(|e| CliError::Usage(e.to_string()))
}

fn run(command: Command) -> Result<ExitCode, CliError> {
    match command {
        Command::Solve { n, d, solver } => solve(config(n, d)?, solver.into()),
        Command::Table {
            n,
            d,
            format,
            out,
            solver,
        } => table(n, d, format, out, solver.into()),
        Command::Verify {
            scope: Scope::Theorems,
            n,
            d,
            solver,
        } => verify_theorems(n, d, solver.into()),
        Command::Verify {
            scope: Scope::Strategies,
            n,
            d,
            ..
        } => verify_strategies(n, d),
        Command::Play { n, d, mode, seed } => {
            let mode = match mode {
                PlayMode::VsBot => Mode::VsBot,
                PlayMode::HotSeat => Mode::HotSeat,
            };
            play(
                config(n, d)?,
                mode,
                seed,
                io::stdin().lock(),
                io::stdout().lock(),
            )
        }
        Command::Serve {
            port,
            host,
            log_dir,
        } => serve_api(&host, port, log_dir),
        Command::Variants { out, check } => variants(out, check),
    }
}

fn solve(config: GameConfig, options: SolverOptions) -> Result<ExitCode, CliError> {
    let mut solver = Solver::with_options(config, options);
    let value = solver.solve().map_err(CliError::Budget)?;
    println!("{}", value.winner);
    println!("states visited: {}", solver.states_visited());
    Ok(ExitCode::SUCCESS)
}

fn first_over_budget(table: &WinnerTable, options: SolverOptions) -> Option<CliError> {
    table.budget_exceeded().next().map(|cell| {
        let bound = match cell.value {
            CellValue::BudgetExceeded { bound } => bound,
            CellValue::Solved(_) => unreachable!(),
        };
        CliError::Budget(SolveError::BudgetExceeded {
            config: cell.config,
            bound,
            budget: options.budget,
        })
    })
}

fn table(
    n: Span,
    d: Span,
    format: Format,
    out: Option<PathBuf>,
    options: SolverOptions,
) -> Result<ExitCode, CliError> {
    let table = winner_table(n.range(), d.range(), options);
    let sink: Box<dyn Write> = match &out {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(io::stdout().lock()),
    };
    let mut sink = BufWriter::new(sink);
    match format {
        Format::Csv => table
            .write_csv(&mut sink)
            .map_err(|e| CliError::Other(e.to_string()))?,
        Format::Json => {
            table
                .write_json(&mut sink)
                .map_err(|e| CliError::Other(e.to_string()))?;
            writeln!(sink)?;
        }
    }
    sink.flush()?;
    match first_over_budget(&table, options) {
        Some(e) => Err(e),
        None => Ok(ExitCode::SUCCESS),
    }
}

fn verify_theorems(n: Span, d: Span, options: SolverOptions) -> Result<ExitCode, CliError> {
    let table = winner_table(n.range(), d.range(), options);
    println!(
        "{:<20} {:>6} {:>10} {:>10} {:>8}",
        "family", "cells", "confirmed", "conflicts", "budget"
    );
    for (tag, s) in table.summary() {
        println!(
            "{tag:<20} {:>6} {:>10} {:>10} {:>8}",
            s.cells, s.confirmed, s.conflicts, s.budget_exceeded
        );
    }
    let conflicts: Vec<_> = table.conflicts().collect();
    for (cell, families) in &conflicts {
        let tags: Vec<&str> = families.iter().map(|f| f.tag()).collect();
        println!(
            "conflict: {} solved as {:?}, contradicting {}",
            cell.config,
            cell.winner(),
            tags.join(", ")
        );
    }
    println!("{} cells, {} failures", table.cells.len(), conflicts.len());
    if !conflicts.is_empty() {
        return Ok(ExitCode::from(EXIT_FAILURE));
    }
    match first_over_budget(&table, options) {
        Some(e) => Err(e),
        None => Ok(ExitCode::SUCCESS),
    }
}

fn plan_label(mode: &PlanMode) -> &'static str {
    match mode {
        PlanMode::Pairing => "a:pairing",
        PlanMode::Xyz(_) => "a:three-residue",
        PlanMode::EndgameD2 => "a:endgame-d2",
        PlanMode::Delegated(_) => "a:delegated",
        PlanMode::SolverBacked => "a:solver-backed",
    }
}

fn bot_label(kind: BotKind) -> &'static str {
    match kind {
        BotKind::ParityPairer => "b:parity-pairer",
        BotKind::InverseSetReducer => "b:inverse-set-reducer",
        BotKind::SuperfluousMaximizer => "b:superfluous-maximizer",
    }
}

/// Checks every constructive plan in the ranges against all replies, and
/// every bot with a guarantee against all opponents.
fn verify_strategies(n: Span, d: Span) -> Result<ExitCode, CliError> {
    let cells: Vec<GameConfig> = n
        .range()
        .flat_map(|n| d.range().filter_map(move |d| GameConfig::new(n, d).ok()))
        .collect();
    let results: Vec<(
        GameConfig,
        &'static str,
        Result<VerificationReport, VerifyError>,
    )> = cells
        .par_iter()
        .filter_map(|&c| {
            if let Some(plan) = opening_move(c) {
                let label = plan_label(&plan.mode);
                let a = ConstructiveA::from_plan(c, plan);
                Some((c, label, verify_strategy(c, Player::A, a)))
            } else if known_b_win(&c) {
                let bot = Bot::for_config(&c, 0);
                let label = bot_label(bot.profile().kind);
                Some((c, label, verify_strategy(c, Player::B, bot)))
            } else {
                None
            }
        })
        .collect();

    let mut totals: std::collections::BTreeMap<&str, (u64, u64)> = Default::default();
    let mut failures = Vec::new();
    for (config, label, result) in &results {
        let entry = totals.entry(label).or_default();
        entry.0 += 1;
        match result {
            Ok(r) if r.success() => {}
            Ok(r) => {
                entry.1 += 1;
                failures.push(format!(
                    "{config} {label}: {} lost games, e.g. {:?}",
                    r.losses, r.first_loss_trace
                ));
            }
            Err(e) => {
                entry.1 += 1;
                failures.push(format!("{config} {label}: {e}"));
            }
        }
    }
    println!("{:<26} {:>6} {:>8}", "strategy", "cells", "failed");
    for (label, (cells, failed)) in &totals {
        println!("{label:<26} {cells:>6} {failed:>8}");
    }
    for f in &failures {
        println!("failure: {f}");
    }
    println!(
        "{} cells, {} with a strategy, {} failures",
        cells.len(),
        results.len(),
        failures.len()
    );
    Ok(if failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILURE)
    })
}

fn render(view: &SessionView, out: &mut impl Write) -> io::Result<()> {
    let cells: Vec<String> = view
        .numbers
        .iter()
        .map(|x| match (x.crossed_by, x.superfluous) {
            (Some(p), _) => format!("{p}:{}", x.number),
            (None, true) => format!("{}*", x.number),
            (None, false) => x.number.to_string(),
        })
        .collect();
    writeln!(out, "{}", cells.join(" "))
}

/// Prompt-driven game. Reads one number per line; `q` or end of input
/// abandons the game.
fn play(
    config: GameConfig,
    mode: Mode,
    seed: u64,
    input: impl BufRead,
    mut out: impl Write,
) -> Result<ExitCode, CliError> {
    let mut session = Session::create("terminal", config, mode, seed)?;
    writeln!(
        out,
        "{config}: A wins if the last two numbers sum to a multiple of {}. \
         `*` marks numbers that no longer matter.",
        config.d()
    )?;
    let mut lines = input.lines();
    loop {
        let view = session.view();
        render(&view, &mut out)?;
        let Some(to_move) = view.to_move else {
            let [x, y] = view.final_pair.expect("finished games have a final pair");
            let winner = view.winner.expect("finished games have a winner");
            writeln!(out, "{x} + {y} = {}, {winner} wins", x + y)?;
            return Ok(ExitCode::SUCCESS);
        };
        write!(out, "{to_move}> ")?;
        out.flush()?;
        let Some(line) = lines.next().transpose()? else {
            writeln!(out)?;
            return Ok(ExitCode::SUCCESS);
        };
        let line = line.trim();
        if line == "q" {
            return Ok(ExitCode::SUCCESS);
        }
        let Ok(number) = line.parse::<u32>() else {
            writeln!(out, "enter a live number or q")?;
            continue;
        };
        match session.submit_move(number, None) {
            Ok(events) => {
                for e in events.iter().skip(1) {
                    writeln!(out, "{} crosses out {}", e.actor, e.number)?;
                }
            }
            Err(SessionError::IllegalMove { number }) => {
                writeln!(out, "{number} is not live")?;
            }
            Err(e) => return Err(e.into()),
        }
    }
}

fn serve_api(host: &str, port: u16, log_dir: Option<PathBuf>) -> Result<ExitCode, CliError> {
    let store = match log_dir {
        Some(dir) => {
            std::fs::create_dir_all(&dir)?;
            SessionStore::with_log_dir(dir)
        }
        None => SessionStore::new(),
    };
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind((host, port)).await?;
        eprintln!("listening on http://{}", listener.local_addr()?);
        serve(listener, Arc::new(store)).await
    })?;
    Ok(ExitCode::SUCCESS)
}

fn variants(out: Option<PathBuf>, check: bool) -> Result<ExitCode, CliError> {
    let computed = compute_registry().map_err(CliError::Budget)?;
    if check {
        let same = &computed == registry();
        println!(
            "{} variants computed, {} shipped: {}",
            computed.count,
            registry().count,
            if same { "identical" } else { "different" }
        );
        return Ok(if same {
            ExitCode::SUCCESS
        } else {
            ExitCode::from(EXIT_FAILURE)
        });
    }
    let text = computed.to_file_json();
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}
