//! Information-theoretic measures of phonotactic complexity and
//! morphological irregularity over inflectional lexicons, plus the
//! within- and across-language regression stack that analyzes them.
//!
//! The pipeline ingests UniMorph-style paradigms, pronunciation dictionaries
//! and corpus frequencies; trains held-out phoneme language models and
//! leave-lexeme-out inflection models; joins the resulting measures into
//! analysis tables; and runs per-language OLS, cross-language mixed-effects
//! models, rank correlations and figure rendering from a single config.

pub mod error;
pub mod folds;
pub mod inflection;
pub mod ingest;
pub mod lexicon;
pub mod measures;
pub mod phonotactics;
pub mod report;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
pub use lexicon::{FeatureBundle, LanguageLexicon, LexiconEntry, PhonemeInventory, Segment};
