//! Linear model container and LP text export.

mod lp;
mod model;

pub use lp::{canonical, export_lp, parse_lp, to_lp_string, CanonicalModel};
pub use model::{family, Constraint, MilpModel, Sense, VarId, VarKind, Variable};
