//! Numerical toolkit for Orlicz spaces and weighted conditional type
//! operators `f ↦ E(uf)` on finite and symbolic measure spaces.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod error;
pub mod essnorm;
pub mod expr;
pub mod numeric;
pub mod criteria;
pub mod orlicz;
mod serde_ext;
pub mod space;
pub mod verify;
pub mod wct;
pub mod young;

pub use error::{Error, Result};
pub use expr::Expr;
pub use young::{GrowthCondition, GrowthReport, YoungFunction};
pub use orlicz::NormResult;
pub use space::{MeasurableFn, MeasureSpace, SubAlgebra, SymbolicAtomSequence};
pub use wct::{NormEstimate, OperatorKind, OperatorSpec, Strategy};
pub use criteria::{Atoms, CriterionId, CriterionReport, GchConstant, Verdict};
pub use essnorm::{BetaResult, LevelSetReport};
