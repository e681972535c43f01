use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cheaptalk::generate::{random_game, Profile};
use cheaptalk::implementability::{check_implementable, Tolerances};
use cheaptalk::io::{parse_game, parse_policy, parse_tau, serialize_game, to_json};
use cheaptalk::mediator::{audit_equilibrium, build_tau, simulate, truthful, TauMatrix};
use cheaptalk::oracle::{
    brute_force_receiver, grid_oracle_common, grid_oracle_general, DEFAULT_RESOLUTION_COMMON,
    DEFAULT_RESOLUTION_GENERAL,
};
use cheaptalk::receiver_opt::solve_receiver;
use cheaptalk::sender1_opt::solve_sender1;
use cheaptalk::sender_opt::solve_common;
use cheaptalk::{Error, GameInstance};

#[derive(Parser)]
#[command(name = "cheaptalk", version, about = "Mediated cheap talk with two senders and a binary-action receiver")]
struct Cli {
    /// Payoff gap below which an agent counts as indifferent.
    #[arg(long, global = true, default_value_t = 0.0)]
    epsilon: f64,
    /// Slack for the order and obedience checks (defaults 1e-12 and 1e-9).
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Write the result here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check whether a policy is implementable.
    Check {
        #[arg(long)]
        game: String,
        #[arg(long)]
        policy: String,
    },
    /// Build the mediator matrix for an implementable policy.
    Tau {
        #[arg(long)]
        game: String,
        #[arg(long)]
        policy: String,
    },
    /// Audit a mediator matrix against every unilateral misreport.
    Audit {
        #[arg(long)]
        game: String,
        #[arg(long)]
        tau: String,
    },
    /// Best policy for senders with common interests.
    SolveSenders {
        #[arg(long)]
        game: String,
    },
    /// Best policy for sender 1.
    SolveSender1 {
        #[arg(long)]
        game: String,
    },
    /// Best policy for the receiver.
    SolveReceiver {
        #[arg(long)]
        game: String,
    },
    /// Brute-force reference solutions.
    Oracle {
        #[arg(long)]
        game: String,
        #[arg(long, value_enum)]
        mode: OracleMode,
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// Monte Carlo play of the mechanism under truthful reports.
    Simulate {
        #[arg(long)]
        game: String,
        /// Policy to mediate; ignored when --tau is given.
        #[arg(long, required_unless_present = "tau")]
        policy: Option<String>,
        #[arg(long)]
        tau: Option<String>,
        #[arg(long, default_value_t = 100_000)]
        rounds: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write a random game.
    Gen {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "general")]
        profile: Profile,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleMode {
    Common,
    General,
    Receiver,
}

enum Failure {
    Input(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Internal(_) => Failure::Internal(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

fn read_source(path: &str) -> Result<Vec<u8>, Failure> {
    let mut buf = Vec::new();
    let res = if path == "-" {
        io::stdin().read_to_end(&mut buf).map(|_| ())
    } else {
        fs::read(path).map(|b| buf = b)
    };
    res.map_err(|e| Failure::Input(format!("{path}: {e}")))?;
    Ok(buf)
}

fn load_game(path: &str, epsilon: f64) -> Result<GameInstance, Failure> {
    Ok(parse_game(&read_source(path)?)?.with_epsilon(epsilon))
}

fn run(cli: Cli) -> Result<(Vec<u8>, bool), Failure> {
    let tol = cli.tolerance.map_or_else(Tolerances::default, |t| Tolerances { order: t, ic: t });
    let game = |path: &str| load_game(path, cli.epsilon);
    Ok(match &cli.command {
        Command::Check { game: g, policy } => {
            let g = game(g)?;
            let p = parse_policy(&g, &read_source(policy)?)?;
            let verdict = check_implementable(&g, &p, tol)?;
            if let Some(w) = verdict.witness {
                let (a, b) = g.witness_labels(w);
                eprintln!("order violated: p({a}) > p({b})");
            }
            if !verdict.receiver_ok {
                eprintln!("receiver gets {} < beta {}", verdict.ev, verdict.beta);
            }
            (to_json(&verdict), verdict.implementable)
        }
        Command::Tau { game: g, policy } => {
            let g = game(g)?;
            let p = parse_policy(&g, &read_source(policy)?)?;
            (to_json(&build_tau(&g, &p)?), true)
        }
        Command::Audit { game: g, tau } => {
            let g = game(g)?;
            let audit = audit_equilibrium(&g, &parse_tau(&read_source(tau)?)?, tol)?;
            let ok = audit.certified;
            (to_json(&audit), ok)
        }
        Command::SolveSenders { game: g } => (to_json(&solve_common(&game(g)?)?), true),
        Command::SolveSender1 { game: g } => (to_json(&solve_sender1(&game(g)?)?), true),
        Command::SolveReceiver { game: g } => (to_json(&solve_receiver(&game(g)?)?), true),
        Command::Oracle { game: g, mode, resolution } => {
            let g = game(g)?;
            let result = match mode {
                OracleMode::Common => grid_oracle_common(&g, resolution.unwrap_or(DEFAULT_RESOLUTION_COMMON))?,
                OracleMode::General => grid_oracle_general(&g, resolution.unwrap_or(DEFAULT_RESOLUTION_GENERAL))?,
                OracleMode::Receiver => brute_force_receiver(&g)?,
            };
            (to_json(&result), true)
        }
        Command::Simulate { game: g, policy, tau, rounds, seed } => {
            let g = game(g)?;
            if *rounds == 0 {
                return Err(Failure::Input("--rounds must be positive".into()));
            }
            let tau: TauMatrix = match (tau, policy) {
                (Some(t), _) => parse_tau(&read_source(t)?)?,
                (None, Some(p)) => build_tau(&g, &parse_policy(&g, &read_source(p)?)?)?,
                (None, None) => return Err(Failure::Input("need --policy or --tau".into())),
            };
            let honest = truthful(g.len());
            (to_json(&simulate(&g, &tau, *rounds, *seed, &honest, &honest)?), true)
        }
        Command::Gen { seed, n, profile } => {
            if *n == 0 {
                return Err(Failure::Input("--n must be positive".into()));
            }
            (serialize_game(&random_game(*seed, *n, *profile)), true)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let output = cli.output.clone();
    match run(cli) {
        Ok((bytes, positive)) => {
            let written = match &output {
                Some(path) => fs::write(path, &bytes),
                None => io::stdout().write_all(&bytes),
            };
            if let Err(e) = written {
                eprintln!("error: cannot write output: {e}");
                return ExitCode::from(2);
            }
            if positive {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(3)
        }
    }
}
