//! Normal forms in amalgamated free products of cyclic groups, torus knot
//! groups and their Seifert quotients, with the word-length machinery used
//! to show that `bc` and `x^k` cannot generate `x^j` for `1 <= j < k`.

pub mod amalgam;
pub mod audit;
pub mod bounds;
pub mod cyclic;
pub mod error;
pub mod formal;
pub mod search;
pub mod syntax;
pub mod torus;

pub use amalgam::{AmalgamGroup, Factor, FactorSide, Junction, NormalForm, SideLabels, Syllable};
pub use audit::{bound_audit, junction_observations, AuditParams, AuditReport, ConjugatorRule};
pub use bounds::{junction_reduction, lower_bound, BoundCase, BoundInputs, ConjugateShape, Family, SigmaBranch, Sign};
pub use cyclic::{CyclicElement, CyclicGroup, EmbeddingSpec};
pub use error::{Error, Result};
pub use formal::{classify_pair, p_sequence, rewrite_central_powers, FormalWord, PSequence, PairType, ShapeDescriptor};
pub use search::{enumerate_ball, membership, verify_314, SearchBudget, SearchReport, SearchStatus};
pub use syntax::{format_word, parse_formal_word, parse_word, ParseError};
pub use torus::{CentralPower, TorusKnotGroup};
