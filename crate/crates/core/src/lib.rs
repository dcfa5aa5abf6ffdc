//! Group interference analysis for weighted directed retweet networks.

pub mod composition;
pub mod config;
pub mod error;
pub mod graph;
pub mod grouping;
pub mod influence;
pub mod interactions;
pub mod pipeline;
pub mod report;
pub mod robustness;
pub mod stats;
pub mod structure;
pub mod synth;
pub mod temporal;
pub mod verdict;
pub mod virality;

pub use error::{Error, ErrorClass, Result};

/// The guide in `book/`, compiled so its snippets run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/data.md")]
    mod data {}
    #[doc = include_str!("../../../book/src/grouping.md")]
    mod grouping {}
    #[doc = include_str!("../../../book/src/verdicts.md")]
    mod verdicts {}
    #[doc = include_str!("../../../book/src/statistical.md")]
    mod statistical {}
    #[doc = include_str!("../../../book/src/network.md")]
    mod network {}
    #[doc = include_str!("../../../book/src/robustness.md")]
    mod robustness {}
    #[doc = include_str!("../../../book/src/influence.md")]
    mod influence {}
    #[doc = include_str!("../../../book/src/structure.md")]
    mod structure {}
    #[doc = include_str!("../../../book/src/temporal.md")]
    mod temporal {}
    #[doc = include_str!("../../../book/src/virality.md")]
    mod virality {}
    #[doc = include_str!("../../../book/src/synth.md")]
    mod synth {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/report.md")]
    mod report {}
}
