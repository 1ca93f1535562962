//! Specification parsing, bound tables, the BSC figure and the codebook
//! oracle behind the `ebound` command.

pub mod figure;
pub mod oracle;
pub mod spec;
pub mod suite;
pub mod table;

use std::path::PathBuf;

use thiserror::Error;

pub use figure::{figure_bsc, write_figure, FIGURE_RATES};
pub use oracle::{oracle_cmd, oracle_codebook, Anchor, OracleOptions, OracleReport};
pub use spec::{parse_spec, ChannelSpec, RateUnit, SCHEMA_VERSION};
pub use suite::{default_bounds, ordering_flags, run_suite, Bound};
pub use table::{Column, CurveTable, Flag, Provenance};

/// Exit code for invalid input.
pub const EXIT_VALIDATION: i32 = 2;
/// Exit code when output was written but some bound claim is void.
pub const EXIT_VOID: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("line {line}: {message}")]
    Spec { line: usize, message: String },
    #[error("{bound}: {source}")]
    Bound {
        bound: String,
        #[source]
        source: prob_core::Error,
    },
    #[error("oracle: {0}")]
    Oracle(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Table(String),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Spec { .. } | CliError::Table(_) | CliError::Usage(_) => EXIT_VALIDATION,
            _ => 1,
        }
    }
}
