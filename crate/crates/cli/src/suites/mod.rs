//! One module per suite; each returns its checks and tables.

use std::path::Path;

use fracdiff::Result;

use crate::config::{Config, Suite};
use crate::report::Report;

pub mod hotspot;
pub mod inhomogeneous;
pub mod kernel;
pub mod linear;
pub mod nonlinear;

/// Runs the suite named in `cfg`. `out` receives side outputs such as checkpoints.
pub fn run(cfg: &Config, out: Option<&Path>) -> Result<Report> {
    match cfg.suite {
        Suite::Kernel => kernel::run(cfg),
        Suite::Linear => linear::run(cfg),
        Suite::Inhomogeneous => inhomogeneous::run(cfg),
        Suite::Nonlinear => nonlinear::run_in(cfg, out),
        Suite::Hotspot => hotspot::run(cfg),
    }
}
