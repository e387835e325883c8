//! Exact q-series arithmetic, modular form construction and infinite-product
//! exponent extraction, with growth-rate analysis of the exponents.
//!
//! A typical pipeline builds a form, extracts its exponents and fits their growth:
//!
//! ```
//! use qprod_core::{forms, prodexp, asymptotics};
//!
//! let e4 = forms::eisenstein(4, 40).unwrap();
//! let c = prodexp::extract(&e4, 0).unwrap();
//! assert_eq!(c.get(1).unwrap().to_integer(), (-240).into());
//! let fit = asymptotics::growth_fit(&c, (10, 39)).unwrap();
//! assert!(fit.y_hat > 0.8 && fit.y_hat < 0.95);
//! ```

pub mod arith;
pub mod asymptotics;
pub mod error;
pub mod forms;
pub mod io;
pub mod prodexp;
pub mod qseries;

pub use error::{Error, Result};
pub use forms::{FormKind, FormSpec, LevelData};
pub use prodexp::ExponentSeries;
pub use qseries::{Lead, QSeries};
