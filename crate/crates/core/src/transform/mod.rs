//! Source-to-source transformations: the max-value tracker T1, the cost
//! tracker T2, the simple-form normalizer, and bounded equivalence checking.

mod equiv;
mod instrument;
mod normalize;

pub use equiv::{bounded_equiv, EquivResult};
pub use instrument::{t1_max_tracker, t2_cost_tracker};
pub use normalize::{budget_value, is_simple, normalize_simple, stabilization_search, SimpleForm, SymbolicBound};

use crate::interp::RuntimeError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransformError {
    #[error("{0}")]
    Unsupported(String),
    #[error("'{0}' is unbound")]
    Unbound(String),
    #[error("no stable budget found up to {t_max} iterations")]
    NotStabilized { t_max: u64 },
    #[error("programs take {0} and {1} arguments")]
    ArityMismatch(usize, usize),
    #[error(transparent)]
    Runtime(#[from] RuntimeError),
}
