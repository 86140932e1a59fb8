//! One module per subcommand. Each exposes `run` for computations and
//! `self_test` for the module's invariant suite.

pub mod asympt;
pub mod fourier;
pub mod geom;
pub mod heat;
pub mod modes;
pub mod poisson;
pub mod sho;
pub mod wave;

use crate::{CliError, CliResult};

/// Rejects a flag value outside its admissible range.
pub(crate) fn require(ok: bool, msg: impl Into<String>) -> CliResult<()> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Usage(msg.into()))
    }
}

/// `n` evenly spaced points on `[a, b]`, both ends included.
pub(crate) fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}
