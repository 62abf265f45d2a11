//! Disagreement-aware scoring toolkit for multi-annotator tweet
//! classification.
//!
//! The pipeline: parse a corpus ([`corpus`]), derive soft and hard gold
//! labels from annotator votes ([`labels`]), produce prediction runs
//! ([`runs`], [`fewshot`]) and score them ([`metrics`], [`report`]). The
//! [`cli`] module exposes each step as a subcommand.

pub mod cli;
pub mod corpus;
pub mod error;
pub mod fewshot;
pub mod labels;
pub mod metrics;
pub mod report;
pub mod runs;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};

/// Formats a probability sum for error messages: six decimals, trailing
/// zeros dropped (0.8999999999999999 prints as 0.9).
pub(crate) fn fmt_sum(x: f64) -> String {
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0');
    s.strip_suffix('.').unwrap_or(s).to_owned()
}
