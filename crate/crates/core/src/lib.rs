//! Explicit-state refinement checking for guarded-event machines.
//!
//! Machines are written in a small textual language (`.ebm`), explored into
//! labelled transition systems, and compared by trace refinement or by
//! failure-divergence refinement. Failed checks come with a pair of
//! corresponding concrete and abstract traces.
//!
//! ```
//! use eventb_fdr::{parser::parse_machine, refine::Pair};
//!
//! let a = parse_machine(
//!     "machine A variables x : int 0..1; init x := 0; events
//!        go == when x = 0 then x := 1 end
//!      end",
//! ).unwrap();
//! let c = parse_machine(
//!     "machine C refines A variables x : int 0..1; ready : bool; init x := 0; ready := false; events
//!        prepare == when not ready then ready := true end
//!        go refines go == when x = 0 /\\ ready then x := 1 end
//!      end",
//! ).unwrap();
//! let pair = Pair::build(&a, &c, 1000).unwrap();
//! assert!(pair.check_trace().refines());
//! assert!(pair.check_fd().refines());
//! ```

pub mod cli;
pub mod model;
pub mod oracle;
pub mod parser;
pub mod refine;
pub mod space;

use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Parse(#[from] parser::ParseError),
}

/// Reads and parses a machine file. Parse errors carry the file name.
pub fn load(path: impl AsRef<Path>) -> Result<model::Machine, LoadError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(parser::parse_file(path, &text)?)
}
