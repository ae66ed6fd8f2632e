pub mod conflict;
pub mod deploy;
pub mod error;
pub mod io;
pub mod model;
pub mod motion;
pub mod oracle;

pub use error::{PlanError, Result};
