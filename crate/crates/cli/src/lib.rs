//! Documents, reports and the pipelines behind the `posmap` command.

pub mod doc;
pub mod pipeline;
pub mod report;

use posmap_core::Error;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    /// A witness failed to re-check or a defect exceeded its tolerance.
    pub const VERIFICATION_FAILED: i32 = 1;
    pub const INPUT_ERROR: i32 = 2;
}

/// Exit code for an error raised while running a subcommand.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::StaleWitness(_) => exit::VERIFICATION_FAILED,
        _ => exit::INPUT_ERROR,
    }
}
