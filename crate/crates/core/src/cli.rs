//! The `qpcp` command-line front end.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::chain::{check_chain, CheckRecord, Status, EXACT_TOL, VALUE_TOL};
use crate::config::{Limits, Tolerances, DEFAULT_MAX_DIM, DEFAULT_MAX_ENUM};
use crate::game::{game_value, outcome_stats, sample_play, AcceptMode, CrespGame, CrespStrategy};
use crate::generate::{generate, GenKind, GenParams};
use crate::hamiltonian::Verdict;
use crate::io::{self, GameDoc, SlhDoc, StrategyDoc, VerifierDoc};
use crate::reductions::{cresp_to_pqpcp, pqpcp_to_slh, slh_to_game};
use crate::slh::SlhInstance;
use crate::{Error, Result};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_INVALID_INPUT: u8 = 2;
pub const EXIT_CAP: u8 = 3;

/// Probabilities may stray outside [0, 1] by this much.
const PROB_TOL: f64 = 1e-10;

#[derive(Debug, Parser)]
#[command(
    name = "qpcp",
    version,
    about = "Set Local Hamiltonian, CRESP game and Pointer QPCP toolkit"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Cap on enumerated assignments, strategies and alphabets.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_ENUM)]
    pub max_enum: u128,
    /// Cap on the dimension of any dense space.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_DIM)]
    pub max_dim: usize,
    /// Slack for threshold decisions.
    #[arg(long, global = true, default_value_t = Tolerances::DEFAULT.decision)]
    pub tolerance: f64,
    /// Output file (stdout if absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KindArg {
    SlhYes,
    SlhNo,
    SlhRandom,
}

impl From<KindArg> for GenKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::SlhYes => GenKind::SlhYes,
            KindArg::SlhNo => GenKind::SlhNo,
            KindArg::SlhRandom => GenKind::SlhRandom,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate an SLH instance.
    Gen {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
    },
    /// Minimum energy over all assignments (or a local search).
    SolveSlh {
        instance: PathBuf,
        /// Use local search with this many steps instead of enumeration.
        #[arg(long)]
        heuristic: Option<usize>,
        /// Also write the honest game strategy on the optimal state.
        #[arg(long)]
        honest_strategy: Option<PathBuf>,
    },
    /// Wrap an SLH instance as a CRESP game.
    BuildGame { instance: PathBuf },
    /// Acceptance probability of a strategy.
    Play {
        game: PathBuf,
        strategy: PathBuf,
        /// Simulate this many plays instead of the exact computation.
        #[arg(long)]
        sample: Option<u64>,
        /// Evaluate on the explicit encoded space.
        #[arg(long)]
        dense: bool,
    },
    /// Game value by enumerating every strategy.
    Value { game: PathBuf },
    /// Apply one reduction.
    Reduce {
        #[command(subcommand)]
        which: Reduction,
    },
    /// Run the full identity chain on an SLH instance.
    Check { instance: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum Reduction {
    PqpcpToSlh {
        verifier: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
    },
    SlhToGame {
        instance: PathBuf,
    },
    GameToPqpcp {
        game: PathBuf,
    },
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance_digest: Option<String>,
    pub tolerances: Value,
    pub results: Value,
    pub checks: Vec<CheckRecord>,
    pub wall_time_ms: f64,
}

struct Ctx {
    argv: Vec<String>,
    global: Global,
    limits: Limits,
    tol: Tolerances,
    start: Instant,
}

impl Ctx {
    fn report(&self, digest: Option<String>, results: Value, checks: Vec<CheckRecord>) -> RunReport {
        RunReport {
            command: self.argv.clone(),
            seed: self.global.seed,
            instance_digest: digest,
            tolerances: json!({
                "decision": self.tol.decision,
                "value_identity": VALUE_TOL,
                "exact_identity": EXACT_TOL,
                "probability_range": PROB_TOL,
            }),
            results,
            checks,
            wall_time_ms: self.start.elapsed().as_secs_f64() * 1e3,
        }
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.global.out {
            Some(p) => std::fs::write(p, text)?,
            None => print!("{text}"),
        }
        Ok(())
    }
}

fn read(path: &Path) -> Result<(String, String)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::input(path.display().to_string(), e))?;
    let digest = hex::encode(Sha256::digest(text.as_bytes()));
    Ok((text, digest))
}

fn load_slh(path: &Path, tol: &Tolerances) -> Result<(SlhInstance, String)> {
    let (text, digest) = read(path)?;
    let doc: SlhDoc = io::parse_json(&path.display().to_string(), &text)?;
    Ok((io::slh_from_doc(&doc, tol)?, digest))
}

fn load_game(path: &Path, tol: &Tolerances) -> Result<(CrespGame, String)> {
    let (text, digest) = read(path)?;
    let doc: GameDoc = io::parse_json(&path.display().to_string(), &text)?;
    Ok((io::game_from_doc(&doc, tol)?, digest))
}

fn in_unit(name: &str, p: f64) -> CheckRecord {
    let clamped = p.clamp(0.0, 1.0);
    CheckRecord::close(name, p, clamped, PROB_TOL)
}

fn all_pass(checks: &[CheckRecord]) -> u8 {
    if checks.iter().any(|c| c.status == Status::Fail) {
        EXIT_CHECK_FAILED
    } else {
        EXIT_OK
    }
}

/// Parses `argv` and runs the command, returning the process exit code.
pub fn main_with_args(argv: Vec<String>) -> u8 {
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID_INPUT } else { EXIT_OK };
        }
    };
    match run(cli, argv) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_cap() {
                EXIT_CAP
            } else {
                EXIT_INVALID_INPUT
            }
        }
    }
}

pub fn run(cli: Cli, argv: Vec<String>) -> Result<u8> {
    let tol = Tolerances {
        decision: cli.global.tolerance,
        ..Tolerances::DEFAULT
    };
    let ctx = Ctx {
        argv,
        limits: Limits {
            max_dim: cli.global.max_dim,
            max_enum: cli.global.max_enum,
        },
        global: cli.global,
        tol,
        start: Instant::now(),
    };
    match cli.command {
        Command::Gen { kind, n, m, l, k, a, b } => cmd_gen(
            &ctx,
            kind.into(),
            GenParams {
                n,
                m,
                l,
                k,
                a,
                b,
                seed: ctx.global.seed,
            },
        ),
        Command::SolveSlh {
            instance,
            heuristic,
            honest_strategy,
        } => cmd_solve(&ctx, &instance, heuristic, honest_strategy.as_deref()),
        Command::BuildGame { instance } => {
            let (slh, _) = load_slh(&instance, &ctx.tol)?;
            let game = slh_to_game(&slh)?;
            ctx.emit(&io::to_json(&io::game_to_doc(&game))?)?;
            Ok(EXIT_OK)
        }
        Command::Play {
            game,
            strategy,
            sample,
            dense,
        } => cmd_play(&ctx, &game, &strategy, sample, dense),
        Command::Value { game } => cmd_value(&ctx, &game),
        Command::Reduce { which } => cmd_reduce(&ctx, which),
        Command::Check { instance } => cmd_check(&ctx, &instance),
    }
}

fn cmd_gen(ctx: &Ctx, kind: GenKind, params: GenParams) -> Result<u8> {
    let g = generate(kind, &params, &ctx.limits)?;
    let text = io::to_json(&io::slh_to_doc(&g.instance))?;
    let digest = hex::encode(Sha256::digest(text.as_bytes()));

    let mut checks = Vec::new();
    let mut results = json!({ "kind": kind, "params": params, "label": g.label });
    if let Some(p) = &g.planted {
        let m = g.instance.m() as f64;
        results["planted"] = json!({ "assignment": p.assignment.0, "energy": p.energy });
        checks.push(CheckRecord::flag(
            "planted energy at most a*m",
            p.energy <= params.a * m + ctx.tol.decision,
            Some(ctx.tol.decision),
            format!("energy={}, a*m={}", p.energy, params.a * m),
        ));
    }
    match g.instance.solve_exact(&ctx.limits) {
        Ok(sol) => {
            let verdict = g.instance.verdict_for(sol.energy, &ctx.tol);
            results["certified"] = json!({ "energy": sol.energy, "verdict": verdict });
            if let Some(label) = g.label {
                checks.push(CheckRecord::flag(
                    "exact verdict matches label",
                    verdict == label,
                    Some(ctx.tol.decision),
                    format!("label={label}, exact={verdict}"),
                ));
            }
        }
        Err(e) if e.is_cap() => {
            checks.push(CheckRecord::skipped("exact verdict matches label", e.to_string()));
        }
        Err(e) => return Err(e),
    }
    ctx.emit(&text)?;
    let report = ctx.report(Some(digest), results, checks);
    eprint!("{}", io::to_json(&report)?);
    Ok(all_pass(&report.checks))
}

fn cmd_solve(ctx: &Ctx, path: &Path, heuristic: Option<usize>, honest: Option<&Path>) -> Result<u8> {
    let (slh, digest) = load_slh(path, &ctx.tol)?;
    let sol = match heuristic {
        Some(budget) => slh.solve_heuristic(budget, ctx.global.seed, &ctx.limits)?,
        None => slh.solve_exact(&ctx.limits)?,
    };
    let m = slh.m() as f64;
    let mut results = json!({
        "method": if heuristic.is_some() { "heuristic" } else { "exact" },
        "energy": sol.energy,
        "assignment": sol.assignment.0,
        "state": io::state_pairs(&sol.state),
    });
    if heuristic.is_none() {
        results["verdict"] = json!(slh.verdict_for(sol.energy, &ctx.tol));
    }
    let checks = vec![CheckRecord::close(
        "energy within [0, m]",
        sol.energy,
        sol.energy.clamp(0.0, m),
        VALUE_TOL,
    )];
    if let Some(p) = honest {
        let game = slh_to_game(&slh)?;
        let s = CrespStrategy::honest(&game, sol.assignment.clone(), sol.state.clone())?;
        std::fs::write(p, io::to_json(&io::strategy_to_doc(&s))?)?;
    }
    let report = ctx.report(Some(digest), results, checks);
    ctx.emit(&io::to_json(&report)?)?;
    Ok(all_pass(&report.checks))
}

fn cmd_play(ctx: &Ctx, game_path: &Path, strat_path: &Path, sample: Option<u64>, dense: bool) -> Result<u8> {
    let (game, digest) = load_game(game_path, &ctx.tol)?;
    let (text, _) = read(strat_path)?;
    let doc: StrategyDoc = io::parse_json(&strat_path.display().to_string(), &text)?;
    let strategy = io::strategy_from_doc(&doc, &game, &ctx.limits)?;
    let mode = if dense {
        AcceptMode::DenseOracle
    } else {
        AcceptMode::Structured
    };
    let stats = outcome_stats(&game, &strategy, mode, &ctx.limits)?;
    let mut checks = vec![in_unit("acceptance within [0, 1]", stats.value)];
    for (i, q) in stats.questions.iter().enumerate() {
        checks.push(in_unit(&format!("question {i} pass_T1 within [0, 1]"), q.pass_t1));
        checks.push(in_unit(&format!("question {i} accept within [0, 1]"), q.accept));
    }
    let mut results = json!({
        "mode": if dense { "exact-dense" } else { "exact" },
        "accept_probability": stats.value,
        "questions": stats.questions,
        "honest": strategy.is_honest(&game),
    });
    if let Some(plays) = sample {
        let s = sample_play(&game, &strategy, plays, ctx.global.seed)?;
        results["mode"] = json!("sample");
        results["sample"] = json!(s);
        let band = 4.0 * s.std_error + f64::EPSILON;
        let mut rec = CheckRecord::close("sample within 4 standard errors", s.frequency, stats.value, band);
        rec.detail = Some("tolerance is 4 binomial standard errors".into());
        checks.push(rec);
    }
    let report = ctx.report(Some(digest), results, checks);
    ctx.emit(&io::to_json(&report)?)?;
    Ok(all_pass(&report.checks))
}

fn cmd_value(ctx: &Ctx, path: &Path) -> Result<u8> {
    let (game, digest) = load_game(path, &ctx.tol)?;
    let (value, best) = game_value(&game, &ctx.limits)?;
    let (alpha, beta) = game.thresholds();
    let verdict = Verdict::from_high(value, alpha, beta, ctx.tol.decision);
    let results = json!({
        "value": value,
        "alpha": alpha,
        "beta": beta,
        "verdict": verdict,
        "strategies": game.strategy_count(),
        "best": io::strategy_to_doc(&best),
    });
    let report = ctx.report(Some(digest), results, vec![in_unit("value within [0, 1]", value)]);
    ctx.emit(&io::to_json(&report)?)?;
    Ok(all_pass(&report.checks))
}

fn cmd_reduce(ctx: &Ctx, which: Reduction) -> Result<u8> {
    let text = match which {
        Reduction::PqpcpToSlh { verifier, alpha, beta } => {
            let (text, _) = read(&verifier)?;
            let doc: VerifierDoc = io::parse_json(&verifier.display().to_string(), &text)?;
            let (v, _) = io::verifier_from_doc(&doc, &ctx.tol)?;
            io::to_json(&io::slh_to_doc(&pqpcp_to_slh(&v, alpha, beta)?))?
        }
        Reduction::SlhToGame { instance } => {
            let (slh, _) = load_slh(&instance, &ctx.tol)?;
            io::to_json(&io::game_to_doc(&slh_to_game(&slh)?))?
        }
        Reduction::GameToPqpcp { game } => {
            let (game, _) = load_game(&game, &ctx.tol)?;
            let (v, codec) = cresp_to_pqpcp(&game, &ctx.limits)?;
            io::to_json(&io::verifier_to_doc(&v, Some(&codec)))?
        }
    };
    ctx.emit(&text)?;
    Ok(EXIT_OK)
}

fn cmd_check(ctx: &Ctx, path: &Path) -> Result<u8> {
    let (slh, digest) = load_slh(path, &ctx.tol)?;
    let chain = check_chain(&slh, ctx.global.seed, &ctx.limits, &ctx.tol)?;
    let code = if chain.stopped.is_some() {
        EXIT_CAP
    } else if chain.passed() {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    };
    let mut results = json!({ "values": chain.values, "passed": chain.passed() });
    if let Some(s) = &chain.stopped {
        results["stopped"] = json!(s);
    }
    let report = ctx.report(Some(digest), results, chain.checks);
    ctx.emit(&io::to_json(&report)?)?;
    Ok(code)
}
