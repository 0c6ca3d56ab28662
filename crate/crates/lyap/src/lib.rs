//! Command-line front end for `lyap-core`: single evaluations, parameter
//! sweeps, the Monte Carlo oracle and the self-test battery, with results
//! as CSV or newline-delimited JSON.

use std::fmt;

pub mod cli;
pub mod compute;
pub mod model;
pub mod row;
pub mod selftest;
pub mod sweep;

/// Why an evaluation failed, grouped by exit code.
#[derive(Clone, Debug, PartialEq)]
pub enum Failure {
    /// Bad flags or parameters. Exit code 2.
    Invalid(String),
    /// A solver or estimator failed. Exit code 3.
    Numeric(lyap_core::Error),
    /// The model has no invariant probability measure. Exit code 4.
    NoInvariantMeasure(String),
}

impl Failure {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Failure::Invalid(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Invalid(_) => 2,
            Failure::Numeric(_) => 3,
            Failure::NoInvariantMeasure(_) => 4,
        }
    }
}

impl From<lyap_core::Error> for Failure {
    fn from(e: lyap_core::Error) -> Self {
        match e {
            lyap_core::Error::InvalidArgument(m) => Failure::Invalid(m),
            lyap_core::Error::NoInvariantMeasure(m) => Failure::NoInvariantMeasure(m),
            other => Failure::Numeric(other),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Invalid(m) => write!(f, "invalid input: {m}"),
            Failure::Numeric(e) => write!(f, "numerical failure: {e}"),
            Failure::NoInvariantMeasure(m) => write!(f, "no invariant measure: {m}"),
        }
    }
}

impl std::error::Error for Failure {}
