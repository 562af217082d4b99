//! Poisson-genericity diagnostics for base-b digit streams.
//!
//! The crate is organized bottom-up:
//!
//! * [`digits`]: digit sources (seeded random, constant, Champernowne, de
//!   Bruijn, files, constructions) and materialized buffers.
//! * [`words`]: overlapping length-k word counting.
//! * [`stats`]: the statistics `Z^λ_{j,k}`, Poisson references, total variation,
//!   normality and discrepancy.
//! * [`constructions`]: the reduction maps `f(z)` and their block schedules.
//! * [`measure`]: exact b-adic interval sets, the `Bad` sets and the
//!   digit-selection algorithm over them.

pub mod config;
pub mod constructions;
pub mod digits;
pub mod error;
pub mod measure;
pub mod stats;
pub mod words;

pub use config::Limits;
pub use digits::{Base, DigitBuffer, DigitSource, DigitStream, SourceKind};
pub use error::{Error, Result};
pub use stats::{Convention, Lambda, ZProfile};
pub use words::{OccurrenceTable, WindowSpec};
