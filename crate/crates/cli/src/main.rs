use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use eid_core::authority::VettingDossier;
use eid_cli::config::SEED_ENV;
use eid_cli::{cmd_issue, cmd_rates, cmd_revoke, cmd_verify, run_scenario, CliError, Config, Output, ProbeSource};
use eid_core::pki::RevocationReason;

#[derive(Parser)]
#[command(name = "eidkit", version, about = "Match-on-card e-passport toolkit")]
struct Cli {
    /// JSON config file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; overrides the config file and EID_SEED
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Clock in unix seconds
    #[arg(long, global = true)]
    now: Option<u64>,
    /// Also write stdout to this file
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Vet an applicant, personalize a new card and record the issuance
    Issue {
        #[arg(long)]
        card: PathBuf,
        /// Dossier JSON: subject fields, breeder documents, hex portrait
        #[arg(long)]
        dossier: PathBuf,
    },
    /// Run the border inspection against a card file
    Verify {
        #[arg(long)]
        card: PathBuf,
        #[command(flatten)]
        probe: ProbeArgs,
    },
    /// Revoke a serial and republish the revocation list
    Revoke {
        #[arg(long)]
        serial: u64,
        /// no-longer-required, subject-removed, trust-breach, illicit-use, key-compromise
        #[arg(long)]
        reason: RevocationReason,
    },
    /// FER/FRR/FAR over a synthetic population, as CSV
    Rates {
        #[arg(long)]
        population: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        thresholds: Vec<f64>,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Run a scripted scenario and print its transcript
    Scenario {
        /// genuine, impostor, clone, replay, tamper-cert, expired, lockout, revoked
        name: Option<String>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct ProbeArgs {
    /// The person presenting the finger, by national id
    #[arg(long)]
    person: Option<String>,
    /// Probe template JSON
    #[arg(long)]
    probe_file: Option<PathBuf>,
    /// Holder is fingerprint-exempt and was checked manually
    #[arg(long)]
    exempt: bool,
}

fn wall_clock() -> u64 {
    std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

fn run(cli: Cli) -> Result<Output, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    cfg.resolve_seed(cli.seed, std::env::var(SEED_ENV).ok().as_deref())?;
    if cli.now.is_some() {
        cfg.now = cli.now;
    }
    let now = cfg.now.unwrap_or_else(wall_clock);
    match cli.command {
        Command::Issue { card, dossier } => {
            let text = std::fs::read_to_string(&dossier).map_err(|e| CliError::usage(format!("dossier: {e}")))?;
            let d: VettingDossier =
                serde_json::from_str(&text).map_err(|e| CliError::usage(format!("dossier: {e}")))?;
            cmd_issue(&cfg, &card, &d, now)
        }
        Command::Verify { card, probe } => {
            let source = match (probe.person, probe.probe_file) {
                (Some(id), _) => ProbeSource::Person(id),
                (_, Some(path)) => ProbeSource::File(path),
                _ => ProbeSource::Exempt,
            };
            cmd_verify(&cfg, &card, &source, now)
        }
        Command::Revoke { serial, reason } => cmd_revoke(&cfg, serial, reason, now),
        Command::Rates { population, thresholds, trials } => cmd_rates(&cfg, population, &thresholds, trials),
        Command::Scenario { name } => {
            let name = name
                .or_else(|| cfg.scenario.clone())
                .ok_or_else(|| CliError::usage("no scenario named on the command line or in the config"))?;
            let t = run_scenario(&cfg, &name)?;
            Ok(Output { stdout: t.to_json(), exit: t.exit_code() })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.out.clone();
    match run(cli) {
        Ok(o) => {
            print!("{}", o.stdout);
            if let Some(path) = out {
                if let Err(e) = std::fs::write(&path, &o.stdout) {
                    let err = CliError::io("--out", e);
                    eprintln!("{}", err.to_json());
                    return ExitCode::from(err.exit_code() as u8);
                }
            }
            ExitCode::from(o.exit as u8)
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
