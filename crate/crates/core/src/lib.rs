//! Inference and analysis of colexification networks from multilingual
//! segmented wordlists.
//!
//! Full colexifications join concepts expressed by identical forms. Affix
//! colexifications link the concept of a form to the concept of a longer
//! form that begins or ends with it (a directed relation). Overlap
//! colexifications join concepts whose forms share a prefix or suffix while
//! neither form contains the other.

pub mod analyze;
pub mod bench;
pub mod cli;
pub mod export;
pub mod infer;
pub mod network;
pub mod pipeline;
pub mod seqrel;
pub mod wordlist;

pub use network::{ColexNetwork, NetworkKind, WeightField};
pub use seqrel::{AffixKind, Thresholds};
pub use wordlist::{parse_wordlist, Wordlist};
