//! One module per subcommand; each exposes a plain-struct options type and a
//! `run` function so the pipeline can also be driven programmatically.

pub mod bench;
pub mod eval;
pub mod link;
pub mod preprocess;
pub mod simulate;
pub mod sweep;
