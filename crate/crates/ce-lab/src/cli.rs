//! Command-line front end and experiment runner: instance generation,
//! solver runs, verification, adversary experiments, and scaling sweeps
//! with machine-readable output.
//!
//! Identical configurations produce byte-identical output. Trials fan out
//! from the master seed via a splitmix64 hash of `(master_seed, index)`,
//! so results do not depend on execution order.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::json;

use crate::adversaries::{AsAdversary, FrontierReading, HtpReferee, PoliteWrapper};
use crate::equilibrium::{verify_ce, SparseDistribution};
use crate::error::{Error, Result};
use crate::games::{GameInstance, QueryTranscript};
use crate::hypercube::{gray_path, random_walk, Threshold, Vertex};
use crate::labeling::{random_sign_labeling, LabelingOracle, PathInstance, SignOracle};
use crate::rational::{parse_rational, Rational};
use crate::solvers::{
    exact_ce_small, greedy_sink_search, random_prober, regret_matching, tail_chaser_htp,
};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser, Debug)]
#[command(name = "ce-lab", version, about = "Query-cost experiments on correlated equilibria of n-player bi-strategy games")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a game, labeling, or path instance as JSON.
    Gen(GenArgs),
    /// Run a CE solver on a game file.
    Solve(SolveArgs),
    /// Verify a distribution against a game at a tolerance.
    Verify(VerifyArgs),
    /// Run search algorithms against the outward-orienting adversary.
    Adversary(AdversaryArgs),
    /// Play the hidden-path game.
    Htp(HtpArgs),
    /// Aggregate solver runs across player counts.
    Sweep(SweepArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum InstanceKind {
    /// Random utility table.
    Game,
    /// Random complete ±1 labeling.
    As,
    /// Hamiltonian-prefix path instance (gray code prefix + random walk).
    Path,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: InstanceKind,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Utility precision in bits (game kind).
    #[arg(long, default_value_t = 8)]
    pub t_bits: u32,
    /// Random-walk suffix length (path kind); default n·⌈2^{n/3}⌉.
    #[arg(long)]
    pub suffix: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverName {
    RegretMatching,
    ExactCe,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[arg(long, value_enum)]
    pub solver: SolverName,
    /// Game JSON file.
    #[arg(long)]
    pub game: PathBuf,
    /// Tolerance, as "p/q" or decimal.
    #[arg(long, default_value = "1/20")]
    pub eps: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub max_steps: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub game: PathBuf,
    /// Distribution JSON file.
    #[arg(long)]
    pub dist: PathBuf,
    #[arg(long, default_value = "0")]
    pub eps: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Args, Debug)]
pub struct AdversaryArgs {
    /// Player counts: "24", "16,20,24", or "4..10" / "4..10..2".
    #[arg(long, default_value = "16,20,24")]
    pub n: String,
    /// Query budget; accepts "4096" or "2^12".
    #[arg(long, default_value = "2^12")]
    pub budget: String,
    /// Closure threshold as a rational; default n/8 per player count.
    #[arg(long)]
    pub theta_closure: Option<String>,
    /// Politeness threshold as a rational; default n/4 per player count.
    #[arg(long)]
    pub theta_polite: Option<String>,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum HtpAlgo {
    RandomProber,
    TailChaser,
}

#[derive(Args, Debug)]
pub struct HtpArgs {
    #[arg(long, value_enum)]
    pub algo: HtpAlgo,
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    /// Path length L (edges).
    #[arg(long, default_value_t = 320)]
    pub len: usize,
    /// Positions revealed per step.
    #[arg(long, default_value_t = 4)]
    pub reveal_quota: usize,
    /// Referee steps per trial.
    #[arg(long, default_value_t = 32)]
    pub steps: usize,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    /// Judge queries against the frontier before this step's reveal.
    #[arg(long, default_value_t = false)]
    pub before_reveal: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long, value_enum, default_value_t = SolverName::RegretMatching)]
    pub solver: SolverName,
    /// Player counts: "10", "4,6,8,10", or "4..10..2".
    #[arg(long, default_value = "4,6,8,10")]
    pub n: String,
    #[arg(long, default_value = "1/20")]
    pub eps: String,
    /// Utility precision of the generated games.
    #[arg(long, default_value_t = 8)]
    pub t_bits: u32,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub max_steps: Option<usize>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// The §-style cost summary: queries plus output support size, recounted
/// from the transcript rather than trusted from the solver.
#[derive(Serialize, Clone, Copy, Debug, PartialEq, Eq)]
pub struct CostReport {
    pub queries: usize,
    pub support: usize,
    pub cost: usize,
}

pub fn cost_report(transcript: &QueryTranscript, support: usize) -> CostReport {
    let queries = transcript.query_count();
    CostReport { queries, support, cost: queries + support }
}

/// Seed for trial `index` under `master`: a splitmix64 hash, so trials are
/// reproducible independently of execution order or parallelism.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Parses "4096" or "2^12".
pub fn parse_count(s: &str) -> Result<usize> {
    if let Some(exp) = s.strip_prefix("2^") {
        let e: u32 = exp
            .parse()
            .map_err(|_| Error::InvalidInstance(format!("bad exponent in count {s:?}")))?;
        if e >= usize::BITS {
            return Err(Error::InvalidInstance(format!("count {s} too large")));
        }
        return Ok(1usize << e);
    }
    s.parse()
        .map_err(|_| Error::InvalidInstance(format!("bad count {s:?}")))
}

/// Parses "10", "4,6,8", "4..10" (inclusive), or "4..10..2" (with step).
pub fn parse_n_list(s: &str) -> Result<Vec<usize>> {
    if let Some((range, rest)) = split_range(s)? {
        let (lo, hi) = range;
        let step = rest.unwrap_or(1);
        if step == 0 || hi < lo {
            return Err(Error::InvalidInstance(format!("bad range {s:?}")));
        }
        return Ok((lo..=hi).step_by(step).collect());
    }
    s.split(',')
        .map(|part| {
            part.trim()
                .parse()
                .map_err(|_| Error::InvalidInstance(format!("bad player count {part:?}")))
        })
        .collect()
}

fn split_range(s: &str) -> Result<Option<((usize, usize), Option<usize>)>> {
    if !s.contains("..") {
        return Ok(None);
    }
    let parts: Vec<&str> = s.split("..").collect();
    let parse = |p: &str| {
        p.parse::<usize>()
            .map_err(|_| Error::InvalidInstance(format!("bad range component {p:?}")))
    };
    match parts.as_slice() {
        [lo, hi] => Ok(Some(((parse(lo)?, parse(hi)?), None))),
        [lo, hi, step] => Ok(Some(((parse(lo)?, parse(hi)?), Some(parse(step)?)))),
        _ => Err(Error::InvalidInstance(format!("bad range {s:?}"))),
    }
}

/// Default Hamiltonian-prefix suffix length, `n·⌈2^{n/3}⌉`.
pub fn default_suffix_len(n: usize) -> usize {
    n * (2f64.powf(n as f64 / 3.0).ceil() as usize)
}

/// Rendered output plus the process exit code.
pub struct RunOutput {
    pub text: String,
    pub exit_code: i32,
}

/// Executes a parsed command. Writing to `--out` (or stdout) is left to
/// the binary so the run itself stays deterministic and testable.
pub fn run(cli: &Cli) -> Result<RunOutput> {
    match &cli.command {
        Command::Gen(args) => run_gen(args),
        Command::Solve(args) => run_solve(args),
        Command::Verify(args) => run_verify(args),
        Command::Adversary(args) => run_adversary(args),
        Command::Htp(args) => run_htp(args),
        Command::Sweep(args) => run_sweep(args),
    }
}

/// Output destination of a command.
pub fn out_path(cli: &Cli) -> Option<&PathBuf> {
    match &cli.command {
        Command::Gen(a) => a.out.as_ref(),
        Command::Solve(a) => a.out.as_ref(),
        Command::Verify(a) => a.out.as_ref(),
        Command::Adversary(a) => a.out.as_ref(),
        Command::Htp(a) => a.out.as_ref(),
        Command::Sweep(a) => a.out.as_ref(),
    }
}

fn pretty<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

fn run_gen(args: &GenArgs) -> Result<RunOutput> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let text = match args.kind {
        InstanceKind::Game => {
            let game = GameInstance::random(args.n, args.t_bits, &mut rng)?;
            pretty(&game.to_json()?)?
        }
        InstanceKind::As => {
            let labeling = random_sign_labeling(args.n, &mut rng);
            pretty(&labeling.to_json("as", Some(args.seed)))?
        }
        InstanceKind::Path => {
            let prefix = gray_path(args.n)?;
            let steps = args.suffix.unwrap_or_else(|| default_suffix_len(args.n));
            let suffix = random_walk(prefix.end(), steps, &mut rng);
            let instance = PathInstance::new(prefix.join(&suffix)?);
            pretty(&instance.to_json(Some(args.seed)))?
        }
    };
    Ok(RunOutput { text, exit_code: 0 })
}

fn load_game(path: &PathBuf) -> Result<GameInstance> {
    GameInstance::from_json(&serde_json::from_str(&fs::read_to_string(path)?)?)
}

fn run_solve(args: &SolveArgs) -> Result<RunOutput> {
    let game = load_game(&args.game)?;
    let eps = parse_rational(&args.eps)?;
    let text = match args.solver {
        SolverName::RegretMatching => {
            let run = regret_matching(&game, &eps, args.seed, args.max_steps, false)?;
            let cost = cost_report(&run.transcript, run.distribution.support_size());
            pretty(&json!({
                "solver": "regret_matching",
                "run": run.to_json(),
                "cost_report": cost,
            }))?
        }
        SolverName::ExactCe => {
            let x = exact_ce_small(&game)?;
            let report = verify_ce(&x, &game, Rational::from_integer(0.into()))?;
            let transcript = QueryTranscript::counting_only(game.n());
            let cost = cost_report(&transcript, x.support_size());
            pretty(&json!({
                "solver": "exact_ce",
                "distribution": x.to_json(),
                "report": report,
                "cost_report": cost,
            }))?
        }
    };
    Ok(RunOutput { text, exit_code: 0 })
}

fn run_verify(args: &VerifyArgs) -> Result<RunOutput> {
    let game = load_game(&args.game)?;
    let dist =
        SparseDistribution::from_json(&serde_json::from_str(&fs::read_to_string(&args.dist)?)?)?;
    let eps = parse_rational(&args.eps)?;
    let report = verify_ce(&dist, &game, eps)?;
    let exit_code = i32::from(!report.pass);
    Ok(RunOutput { text: pretty(&report)?, exit_code })
}

/// One adversary trial, as reported.
#[derive(Serialize)]
struct AdversaryTrial {
    n: usize,
    trial: usize,
    seed: u64,
    requested: usize,
    issued: usize,
    politeness_violations: usize,
    /// 1-based index of the first queried vertex exceeding the in-degree
    /// threshold in the finalized labeling; None = the adversary held.
    win_at: Option<usize>,
    replay_ok: bool,
    /// Run ended early (budget or peel infeasibility) instead of by the
    /// searcher's own termination.
    aborted: bool,
}

fn run_adversary(args: &AdversaryArgs) -> Result<RunOutput> {
    let ns = parse_n_list(&args.n)?;
    let budget = parse_count(&args.budget)?;
    let mut rows = Vec::new();
    for &n in &ns {
        let theta_closure = match &args.theta_closure {
            Some(s) => parse_threshold(s)?,
            None => Threshold::new(n as i64, 8),
        };
        let theta_polite = match &args.theta_polite {
            Some(s) => parse_threshold(s)?,
            None => Threshold::new(n as i64, 4),
        };
        for trial in 0..args.trials {
            let seed = trial_seed(args.seed, (n * 1000 + trial) as u64);
            rows.push(adversary_trial(n, trial, seed, theta_closure, theta_polite, budget)?);
        }
    }
    let text = match args.format {
        OutputFormat::Json => pretty(&rows)?,
        OutputFormat::Csv => {
            let mut csv = String::from(
                "n,trial,seed,requested,issued,politeness_violations,win_at,replay_ok,aborted\n",
            );
            for r in &rows {
                let win = r.win_at.map(|w| w.to_string()).unwrap_or_default();
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{}\n",
                    r.n,
                    r.trial,
                    r.seed,
                    r.requested,
                    r.issued,
                    r.politeness_violations,
                    win,
                    r.replay_ok,
                    r.aborted
                ));
            }
            csv
        }
    };
    let any_win = rows.iter().any(|r| r.win_at.is_some());
    Ok(RunOutput { text, exit_code: i32::from(any_win) })
}

fn parse_threshold(s: &str) -> Result<Threshold> {
    let r = parse_rational(s)?;
    let numer = r.numer().to_i64();
    let denom = r.denom().to_i64();
    match (numer, denom) {
        (Some(n), Some(d)) if d != 0 => Ok(Threshold::new(n, d)),
        _ => Err(Error::InvalidInstance(format!("threshold {s:?} out of range"))),
    }
}

fn adversary_trial(
    n: usize,
    trial: usize,
    seed: u64,
    theta_closure: Threshold,
    theta_polite: Threshold,
    budget: usize,
) -> Result<AdversaryTrial> {
    use rand::Rng;
    let mut wrapper =
        PoliteWrapper::new(AsAdversary::new(n), theta_closure, theta_polite, budget)?;
    // the greedy searcher is deterministic; the seed varies its start
    let start = Vertex::new(ChaCha8Rng::seed_from_u64(seed).gen_range(0..(1u32 << n)), n)?;
    let search = greedy_sink_search(&mut wrapper, start, theta_polite, budget);
    let aborted = search.is_err();
    let stats = wrapper.stats().clone();
    let adversary = wrapper.into_inner();

    // finalize and audit: replay equality plus an in-degree scan over
    // everything the adversary ever answered
    let full = adversary.finalize();
    let mut replay = LabelingOracle::new(full.clone());
    let mut replay_ok = true;
    let mut win_at = None;
    for (idx, (q, recorded)) in adversary.answers().iter().enumerate() {
        if &replay.query_signs(*q)? != recorded {
            replay_ok = false;
        }
        let in_degree = full.in_degree(*q)?.count;
        if win_at.is_none() && Threshold::from_integer(in_degree as i64) > theta_polite {
            win_at = Some(idx + 1);
        }
    }
    Ok(AdversaryTrial {
        n,
        trial,
        seed,
        requested: stats.requested,
        issued: stats.issued,
        politeness_violations: stats.violations,
        win_at,
        replay_ok,
        aborted,
    })
}

#[derive(Serialize)]
struct HtpSummary {
    algo: String,
    n: usize,
    len: usize,
    reveal_quota: usize,
    steps: usize,
    trials: usize,
    wins: usize,
    win_frequency: f64,
    /// `T·L·2^{-(n-1)}`, the union-bound estimate for the random prober.
    union_bound: f64,
    monte_carlo_se: f64,
    /// Tail chaser only: observed steps-to-win per trial must all be here.
    expected_steps: Option<usize>,
    median_win_steps: Option<usize>,
}

fn run_htp(args: &HtpArgs) -> Result<RunOutput> {
    let reading = if args.before_reveal {
        FrontierReading::BeforeReveal
    } else {
        FrontierReading::AfterReveal
    };
    let mut wins = 0usize;
    let mut win_steps = Vec::new();
    for trial in 0..args.trials {
        let seed = trial_seed(args.seed, trial as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let start = Vertex::zero(args.n)?;
        let path = random_walk(start, args.len, &mut rng);
        let mut referee = HtpReferee::new(path, args.reveal_quota, reading);
        match args.algo {
            HtpAlgo::RandomProber => {
                if random_prober(&mut referee, args.steps, &mut rng)? {
                    wins += 1;
                }
            }
            HtpAlgo::TailChaser => {
                let run = tail_chaser_htp(&mut referee, args.steps.max(1))?;
                if run.succeeded {
                    wins += 1;
                    win_steps.push(run.steps);
                }
            }
        }
    }
    let trials = args.trials.max(1);
    let p = wins as f64 / trials as f64;
    let union_bound =
        args.steps as f64 * args.len as f64 * 2f64.powi(-(args.n as i32 - 1));
    let monte_carlo_se = (p * (1.0 - p) / trials as f64).sqrt();
    win_steps.sort_unstable();
    let summary = HtpSummary {
        algo: format!("{:?}", args.algo),
        n: args.n,
        len: args.len,
        reveal_quota: args.reveal_quota,
        steps: args.steps,
        trials: args.trials,
        wins,
        win_frequency: p,
        union_bound,
        monte_carlo_se,
        expected_steps: matches!(args.algo, HtpAlgo::TailChaser)
            .then(|| args.len.div_ceil(args.reveal_quota)),
        median_win_steps: win_steps.get(win_steps.len() / 2).copied(),
    };
    let text = match args.format {
        OutputFormat::Json => pretty(&summary)?,
        OutputFormat::Csv => {
            let mut csv = String::from(
                "algo,n,len,reveal_quota,steps,trials,wins,win_frequency,union_bound\n",
            );
            csv.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                summary.algo,
                summary.n,
                summary.len,
                summary.reveal_quota,
                summary.steps,
                summary.trials,
                summary.wins,
                summary.win_frequency,
                summary.union_bound
            ));
            csv
        }
    };
    Ok(RunOutput { text, exit_code: 0 })
}

#[derive(Serialize)]
struct SweepRow {
    n: usize,
    trials: usize,
    success_rate: f64,
    median_queries: usize,
    median_cost: usize,
    median_rounds: usize,
}

fn run_sweep(args: &SweepArgs) -> Result<RunOutput> {
    if args.solver != SolverName::RegretMatching {
        return Err(Error::InvalidInstance(
            "sweep currently drives regret matching only".into(),
        ));
    }
    let ns = parse_n_list(&args.n)?;
    let eps = parse_rational(&args.eps)?;
    let mut rows = Vec::new();
    for &n in &ns {
        let mut successes = 0usize;
        let mut queries = Vec::new();
        let mut costs = Vec::new();
        let mut rounds = Vec::new();
        for trial in 0..args.trials {
            let seed = trial_seed(args.seed, (n * 100_000 + trial) as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let game = GameInstance::random(n, args.t_bits, &mut rng)?;
            let run = regret_matching(&game, &eps, seed, args.max_steps, false)?;
            if run.succeeded {
                successes += 1;
            }
            queries.push(run.transcript.query_count());
            costs.push(run.transcript.cost());
            rounds.push(run.rounds);
        }
        queries.sort_unstable();
        costs.sort_unstable();
        rounds.sort_unstable();
        let mid = args.trials / 2;
        rows.push(SweepRow {
            n,
            trials: args.trials,
            success_rate: successes as f64 / args.trials.max(1) as f64,
            median_queries: queries.get(mid).copied().unwrap_or(0),
            median_cost: costs.get(mid).copied().unwrap_or(0),
            median_rounds: rounds.get(mid).copied().unwrap_or(0),
        });
    }
    let text = match args.format {
        OutputFormat::Json => pretty(&rows)?,
        OutputFormat::Csv => {
            let mut csv =
                String::from("n,trials,success_rate,median_queries,median_cost,median_rounds\n");
            for r in &rows {
                csv.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r.n, r.trials, r.success_rate, r.median_queries, r.median_cost, r.median_rounds
                ));
            }
            csv
        }
    };
    Ok(RunOutput { text, exit_code: 0 })
}
