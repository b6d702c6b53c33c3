//! Portfolio-based analysis of solver competition results.
//!
//! Starting from recorded runs of many solvers on many instances, the crate
//! computes:
//!
//! - pairwise MiniZinc-style scores and the Borda ranking ([`pairscore`]),
//! - virtual-best-solver performance of any portfolio relative to a baseline
//!   such as the Oracle or the Participant-Oracle ([`portfolio`]),
//! - the smallest portfolios matching the full portfolio ([`mincover`]),
//! - the best portfolio of every size ([`tradeoff`]),
//! - Shapley-value importance of each solver ([`shapley`]).
//!
//! All scores are exact rationals.
//!
//! ```
//! use solverfolio::runstore::{ingest, solver_set, Schema};
//! use solverfolio::portfolio::perf;
//!
//! let csv = "solver,instance,kind,status,time,objective,participant,timeout\n\
//!            a,i1,DECISION,COMPLETE,10,,true,100\n\
//!            b,i1,DECISION,COMPLETE,30,,false,100\n\
//!            b,i2,DECISION,COMPLETE,5,,false,100\n";
//! let ds = ingest(csv.as_bytes(), &Schema::default())?.dataset;
//! let ratio = perf(&ds, &ds.participants(), &ds.solver_ids())?;
//! assert_eq!(ratio.value.to_string(), "1/3");
//! # Ok::<(), solverfolio::Error>(())
//! ```

pub mod cli;
pub mod error;
pub mod mincover;
pub mod numeric;
pub mod pairscore;
pub mod portfolio;
pub mod report;
pub mod runstore;
pub mod shapley;
pub mod tradeoff;

pub use error::{Error, RecordError, Result, Stage};
pub use numeric::{Millis, Rational};
