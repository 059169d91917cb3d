//! Operator surface for the e-passport toolkit: issue, verify and revoke
//! against on-disk state, evaluate matcher error rates, and run scripted
//! attack scenarios.

pub mod adversary;
pub mod commands;
pub mod config;
pub mod error;
pub mod scenario;
pub mod world;

pub use commands::{cmd_issue, cmd_rates, cmd_revoke, cmd_verify, Output, ProbeSource};
pub use config::Config;
pub use error::CliError;
pub use scenario::{run_scenario, Transcript, SCENARIOS};
