//! State files, verification reports and the command implementations behind
//! the `qdiscord` binary.

pub mod commands;
pub mod error;
pub mod format;
pub mod report;

pub use error::{CliError, CliResult};

/// Environment variable naming the directory searched for inputs that are
/// not found relative to the working directory.
pub const FIXTURES_ENV: &str = "QDISCORD_FIXTURES";

/// Resolves an input path, falling back to the fixture directory.
pub fn resolve_input(path: &std::path::Path) -> std::path::PathBuf {
    if path.exists() {
        return path.to_path_buf();
    }
    match std::env::var_os(FIXTURES_ENV) {
        Some(dir) if std::path::Path::new(&dir).join(path).exists() => std::path::Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}
