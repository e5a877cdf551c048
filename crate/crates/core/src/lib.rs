//! Machine-translation quality estimation without neural components.

pub mod config;
pub mod corpus;
pub mod doclevel;
pub mod ensemble;
pub mod error;
pub mod folds;
pub mod labeler;
pub mod linearqe;
pub mod metrics;

pub use error::{QeError, Result};
