//! Exact arithmetic for grid-nonzero results on multivariate polynomials:
//! monomial hypothesis detection, lower bounds on the number of nonzeros,
//! a brute-force grid oracle, trimming, the coefficient formula,
//! randomized identity testing and the table-agreement puzzle.

pub mod analysis;
pub mod bounds;
pub mod error;
pub mod oracle;
pub mod parser;
pub mod pit;
pub mod poly;
pub mod puzzle;
pub mod ring;
pub mod transform;

pub use error::{Error, ErrorClass, Result};
pub use parser::{parse_dag, parse_poly, ExprDag, Variables};
pub use poly::{ExponentVector, GridSpec, Polynomial};
pub use ring::{RingElem, RingSpec};
