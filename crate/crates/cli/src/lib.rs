//! Command-line front end for `stochord`.

pub mod app;
pub mod spec;

pub use app::{main_with, run, Cli, RunConfig};
pub use spec::{parse_distortion, parse_family, parse_law, parse_ns, parse_spec, LawSpec, Spec, SpecError};
