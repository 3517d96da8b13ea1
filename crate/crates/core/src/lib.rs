//! Design and simulation toolkit for bistable hair-clip mechanisms (HCMs).
//!
//! The crate covers the analytic chain (critical load, tip angle, energy
//! barrier, snap timescale), a discrete elastic-ribbon oracle used to
//! cross-check it, a single-degree-of-freedom snap simulator, and a
//! reduced-order swimming model.

pub mod buckling;
pub mod error;
pub mod model;
pub mod oracle;
pub mod postbuckle;
pub mod snapdyn;
pub mod swim;
pub mod tridiag;

pub use error::{HcmError, Result};
