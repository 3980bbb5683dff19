//! Parameter validation, orchestration and reporting for the `jacarith`
//! command-line tool.

pub mod commands;
pub mod params;
pub mod report;

pub use commands::{run, Command, Options};
pub use params::InstanceParams;
pub use report::Report;

/// Invalid parameters or an unmet hypothesis; carries the message shown to
/// the user.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}
