//! Library surface of the workbench CLI: curve-spec files, deterministic
//! JSON reports, and the subcommand implementations (kept in a library so
//! integration tests can drive them directly).

pub mod commands;
pub mod report;
pub mod specfile;
