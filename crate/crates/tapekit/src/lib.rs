//! A workbench for tape-based probabilistic computation.
//!
//! Programs are deterministic combinator codes that consume an explicit
//! random tape (an infinite bit stream per component). The library keeps
//! everything exact: tapes are eventually periodic, events are finite bit
//! patterns, measures are per-bit Bernoulli products, and all probabilities
//! are rationals. On top of the evaluator sit a symbolic trace-tree layer,
//! a tape-indexed truth-value algebra, a partial-correctness modality with
//! evidence-tracked entailment checking, transport of entailments along
//! structured tape rewirings, exact expectation/law extraction, and a
//! finitary-distribution abstraction with a support-based `must` judgment.
//!
//! ```
//! use tapekit::{parse_code, trace, Tape, TapeSpace};
//! use tapekit::extract::law;
//! use tapekit::tape::ProductMeasure;
//!
//! // flip a coin by reading one tape bit
//! let coin = parse_code("(ifbit (read 0 0) (con H) (con T))").unwrap();
//! let outcome = tapekit::eval(&coin, &Tape::parse("0:0").unwrap(), 16);
//! assert_eq!(outcome.value().unwrap().to_string(), "(con H)");
//!
//! // its exact law under the fair measure
//! let tree = trace(&coin, TapeSpace::new(1), 16);
//! let d = law(&tree, &ProductMeasure::fair());
//! assert_eq!(d.entries().count(), 2);
//! ```
//!
//! Rewiring the tape transports computations and evidence:
//!
//! ```
//! use tapekit::{parse_code, translate_evidence, Code, Tape, TapeMapSpec};
//!
//! // evidence over the flipped tape, translated back to the plain one
//! let e = parse_code("(lam x (read 0 0))").unwrap();
//! let tr = translate_evidence(&TapeMapSpec::flip(), &e);
//! let run = Code::app(tr, Code::con("Q"));
//! let out = tapekit::eval(&run, &Tape::parse("0:0").unwrap(), 32);
//! assert_eq!(out.value(), Some(&Code::Bit(true)));
//! ```

pub mod casebook;
pub mod dist;
pub mod extract;
pub mod gen;
pub mod jsonio;
pub mod lang;
pub mod modality;
pub mod rat;
pub mod tape;
pub mod tapemap;
pub mod trace;
pub mod truth;

mod error;

pub use error::Error;

pub use lang::{bracket_abstract, eval, parse_code, translate_evidence, Code, Outcome};
pub use tape::{Address, BitPattern, ProductMeasure, Tape, TapeSpace};
pub use tapemap::TapeMapSpec;
pub use trace::{bind_split, mca_apply, monad_bind, monad_return, trace, TraceTree};
pub use truth::TruthValue;
