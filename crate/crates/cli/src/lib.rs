//! Front ends for `ahp-core`: the `ahp` command line and its HTTP service.

pub mod cli;
pub mod server;

use std::path::Path;

use ahp_core::ml::{load_model, LogitModel};

/// `path` if given, otherwise the bundled reference model.
pub fn resolve_model(path: Option<&Path>) -> ahp_core::Result<LogitModel> {
    match path {
        Some(p) => load_model(p),
        None => Ok(LogitModel::bundled()),
    }
}
