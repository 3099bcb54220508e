//! Problem files, trace and summary output, SVG figures and the step-size
//! benchmark for the `waist` binary.

pub mod bench;
pub mod commands;
mod error;
pub mod output;
pub mod problem_file;
pub mod render;

pub use error::CliError;
pub use problem_file::{parse_problem, ProblemFile};
