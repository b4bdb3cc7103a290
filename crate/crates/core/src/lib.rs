//! Few-qubit entanglement toolkit: unified-(q,s) entropies, convex-roof and
//! assistance optimizers, two-qubit closed forms, and numerical checks of
//! polygamy-type inequalities.

pub mod entropy;
pub mod error;
pub mod format;
pub mod lemmafn;
pub mod linalg;
pub mod measures;
pub mod qstate;
pub mod registry;
pub mod rng;
pub mod roof;
pub mod scans;
pub mod twoqubit;
pub mod verify;

pub use error::{Error, Result};
