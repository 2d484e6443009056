//! Command-line front end. The `blotto` binary is a thin wrapper around
//! [`main_from_args`].
//!
//! Exit statuses: 0 on success, 2 for bad input, 3 when a solver or a
//! verification check fails.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::{budget_sweep, compare, sweep_csv};
use crate::best_response::best_response;
use crate::commitment::optimal_commitment;
use crate::error::Error;
use crate::game::{total_utility, Allocation, GameInstance, InstanceFile, Player};
use crate::nash::solve_nash;
use crate::oracle::{oracle_best_response, oracle_commitment, GridSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

/// Range of `gen` values and budgets.
pub const GEN_RANGE: (f64, f64) = (0.1, 10.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    SolveBr,
    SolveCommitment,
    SolveNash,
    Compare,
    Sweep,
    Verify,
    Gen,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub instance_path: Option<PathBuf>,
    /// Standard output when absent.
    pub output_path: Option<PathBuf>,
    /// `(r_min, r_max, steps)`.
    pub sweep_range: (f64, f64, usize),
    pub seed: u64,
    pub grid: GridSpec,
    /// Battlefield count for `gen`.
    pub n: usize,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            instance_path: None,
            output_path: None,
            sweep_range: (0.25, 3.0, 50),
            seed: 0,
            grid: GridSpec::new(200, 2).expect("valid default grid"),
            n: 3,
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Solver(_) => EXIT_SOLVER,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Solver(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Invariant(_) => CliError::Solver(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

/// What a command produced: the payload for the output file and a short
/// human summary for stderr.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub body: String,
    pub summary: String,
    /// Verification breaches; nonempty makes `run` exit with status 3.
    pub failures: Vec<String>,
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn load(config: &RunConfig) -> Result<(InstanceFile, GameInstance), CliError> {
    let path = config
        .instance_path
        .as_ref()
        .ok_or_else(|| CliError::Input("--instance is required for this command".into()))?;
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    InstanceFile::parse(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
struct BestResponseReport {
    allocation: Allocation,
    support: Vec<usize>,
    water_level: f64,
    leader_utility: f64,
    follower_utility: f64,
}

#[derive(Serialize)]
struct Check {
    name: String,
    closed_form: f64,
    oracle: f64,
    tolerance: f64,
    pass: bool,
}

#[derive(Serialize)]
struct VerifyReport {
    grid: GridSpec,
    checks: Vec<Check>,
}

fn verify(game: &GameInstance, commit: Option<Allocation>, grid: &GridSpec) -> Result<Output, CliError> {
    let mut checks = Vec::new();
    let mut br_check = |name: &str, leader: &Allocation| -> Result<(), CliError> {
        let exact = best_response(game, leader)?;
        let exact_u = total_utility(game, Player::Follower, leader, &exact.allocation)?;
        let (_, oracle_u) = oracle_best_response(game, leader, grid)?;
        checks.push(Check {
            name: name.into(),
            closed_form: exact_u,
            oracle: oracle_u,
            tolerance: 1e-6,
            pass: oracle_u <= exact_u + 1e-6,
        });
        Ok(())
    };
    if let Some(a) = &commit {
        br_check("best response to commit_a", a)?;
    }
    let se = optimal_commitment(game)?;
    br_check("best response to the optimal commitment", &se.allocation)?;
    let oracle = oracle_commitment(game, grid)?;
    checks.push(Check {
        name: "optimal commitment".into(),
        closed_form: se.leader_utility,
        oracle: oracle.utility,
        tolerance: 1e-3,
        pass: se.leader_utility >= oracle.utility - 1e-3,
    });
    let ne = solve_nash(game)?;
    checks.push(Check {
        name: "commitment dominates Nash".into(),
        closed_form: se.leader_utility,
        oracle: ne.leader_utility,
        tolerance: 1e-9,
        pass: se.leader_utility >= ne.leader_utility - 1e-9,
    });

    let failures: Vec<String> = checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| format!("{}: closed form {} vs reference {}", c.name, c.closed_form, c.oracle))
        .collect();
    let summary = format!("verify: {}/{} checks passed", checks.len() - failures.len(), checks.len());
    Ok(Output { body: to_json(&VerifyReport { grid: *grid, checks }), summary, failures })
}

/// A random instance file, identical for identical `(seed, n)`.
pub fn generate_instance(seed: u64, n: usize) -> Result<InstanceFile, CliError> {
    if n == 0 {
        return Err(CliError::Input("--n must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = GEN_RANGE;
    let mut draw = || rng.gen_range(lo..=hi);
    let budget_a = draw();
    let budget_b = draw();
    let values_a = (0..n).map(|_| draw()).collect();
    let values_b = (0..n).map(|_| draw()).collect();
    Ok(InstanceFile { budget_a, budget_b, values_a, values_b, commit_a: None })
}

/// Run a command and return its output without touching the filesystem
/// for writing.
pub fn execute(config: &RunConfig) -> Result<Output, CliError> {
    let ok = |body: String, summary: String| Ok(Output { body, summary, failures: Vec::new() });
    match config.command {
        Command::Gen => {
            let file = generate_instance(config.seed, config.n)?;
            ok(to_json(&file), format!("generated n = {} instance from seed {}", config.n, config.seed))
        }
        Command::SolveBr => {
            let (file, game) = load(config)?;
            let commit = file
                .commit_a
                .ok_or_else(|| CliError::Input("solve-br needs a \"commit_a\" array in the instance file".into()))?;
            let leader = Allocation::new(commit, game.budget_a())?;
            let br = best_response(&game, &leader)?;
            let report = BestResponseReport {
                leader_utility: total_utility(&game, Player::Leader, &leader, &br.allocation)?,
                follower_utility: total_utility(&game, Player::Follower, &leader, &br.allocation)?,
                allocation: br.allocation,
                support: br.support,
                water_level: br.water_level,
            };
            let summary = format!("best response {:?}, support {:?}", report.allocation.amounts(), report.support);
            ok(to_json(&report), summary)
        }
        Command::SolveCommitment => {
            let (_, game) = load(config)?;
            let se = optimal_commitment(&game)?;
            let summary = format!(
                "commitment {:?} ({:?}), utilities {:.6} / {:.6}",
                se.allocation.amounts(),
                se.case_tag,
                se.leader_utility,
                se.follower_utility
            );
            ok(to_json(&se), summary)
        }
        Command::SolveNash => {
            let (_, game) = load(config)?;
            let ne = solve_nash(&game)?;
            let summary = format!(
                "Nash {:?} / {:?}, utilities {:.6} / {:.6}",
                ne.alloc_a.amounts(),
                ne.alloc_b.amounts(),
                ne.leader_utility,
                ne.follower_utility
            );
            ok(to_json(&ne), summary)
        }
        Command::Compare => {
            let (_, game) = load(config)?;
            let rep = compare(&game)?;
            let summary = format!(
                "leader {:.6} vs {:.6} (ratio {:.6}, cap {:.6})",
                rep.se.leader_utility, rep.ne.leader_utility, rep.leader_ratio, rep.cor1_upper
            );
            ok(to_json(&rep), summary)
        }
        Command::Sweep => {
            let (r_min, r_max, steps) = config.sweep_range;
            if !(r_min > 0.0) || !(r_max >= r_min) || steps < 2 {
                return Err(CliError::Input(format!(
                    "sweep needs 0 < r_min <= r_max and steps >= 2, got ({r_min}, {r_max}, {steps})"
                )));
            }
            let (_, game) = load(config)?;
            let rs: Vec<f64> =
                (0..steps).map(|i| r_min + (r_max - r_min) * i as f64 / (steps - 1) as f64).collect();
            let rows = budget_sweep(&game, &rs);
            let failed = rows.iter().filter(|r| r.diagnostic.is_some()).count();
            ok(sweep_csv(&rows), format!("sweep: {} rows, {failed} with solver failures", rows.len()))
        }
        Command::Verify => {
            let (file, game) = load(config)?;
            let commit = file.commit_a.map(|c| Allocation::new(c, game.budget_a())).transpose()?;
            verify(&game, commit, &config.grid)
        }
    }
}

/// Run a command, write its output and return the exit status.
pub fn run(config: &RunConfig) -> i32 {
    let out = match execute(config) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {}", e.message());
            return e.exit_code();
        }
    };
    let written = match &config.output_path {
        Some(path) => fs::write(path, &out.body).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout().write_all(out.body.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return EXIT_INPUT;
    }
    eprintln!("{}", out.summary);
    if out.failures.is_empty() {
        EXIT_OK
    } else {
        for f in &out.failures {
            eprintln!("FAILED {f}");
        }
        EXIT_SOLVER
    }
}

#[derive(Debug, Parser)]
#[command(name = "blotto", about = "Stackelberg and Nash solvers for Lottery Colonel Blotto games")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, clap::Args)]
pub struct Io {
    /// Instance JSON file.
    #[arg(long)]
    pub instance: PathBuf,
    /// Output file; standard output if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Follower best response to the instance's "commit_a".
    SolveBr(Io),
    /// Leader's optimal commitment.
    SolveCommitment(Io),
    /// Pure Nash equilibrium.
    SolveNash(Io),
    /// Commitment versus Nash report.
    Compare(Io),
    /// Both equilibria over a range of budget ratios x_a / x_b, as CSV.
    Sweep {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = 0.25)]
        r_min: f64,
        #[arg(long, default_value_t = 3.0)]
        r_max: f64,
        #[arg(long, default_value_t = 50)]
        steps: usize,
    },
    /// Cross-check the solvers against brute-force grid searches.
    Verify {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = 200)]
        resolution: u64,
        #[arg(long, default_value_t = 2)]
        refine: u32,
    },
    /// Random instance with values and budgets in [0.1, 10].
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

impl Cli {
    pub fn into_config(self) -> Result<RunConfig, CliError> {
        let io_config = |command, io: Io| RunConfig {
            instance_path: Some(io.instance),
            output_path: io.out,
            ..RunConfig::new(command)
        };
        Ok(match self.command {
            CliCommand::SolveBr(io) => io_config(Command::SolveBr, io),
            CliCommand::SolveCommitment(io) => io_config(Command::SolveCommitment, io),
            CliCommand::SolveNash(io) => io_config(Command::SolveNash, io),
            CliCommand::Compare(io) => io_config(Command::Compare, io),
            CliCommand::Sweep { io, r_min, r_max, steps } => {
                RunConfig { sweep_range: (r_min, r_max, steps), ..io_config(Command::Sweep, io) }
            }
            CliCommand::Verify { io, resolution, refine } => {
                RunConfig { grid: GridSpec::new(resolution, refine)?, ..io_config(Command::Verify, io) }
            }
            CliCommand::Gen { seed, n, out } => RunConfig { seed, n, output_path: out, ..RunConfig::new(Command::Gen) },
        })
    }
}

/// Parse `args` (program name first) and run.
pub fn main_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match cli.into_config() {
        Ok(config) => run(&config),
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}
