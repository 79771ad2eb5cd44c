//! Library side of the `duality` command-line tool: randomized verification
//! sweeps and the `analyze`, `verify` and `figures` subcommands.

pub mod commands;
pub mod sweep;
