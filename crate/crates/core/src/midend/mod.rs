//! Normalization and dynamic elaboration: renaming, A-normal form, runtime
//! evidence ascriptions, germ specialization, pruning, closure conversion.

mod anf;
mod closure;
mod core;
mod dynamic;
mod optimize;
mod rename;

pub use self::core::*;
pub use anf::to_anf;
pub use closure::closure_convert;
pub use dynamic::elaborate_dynamic;
pub use optimize::{prune_dynamic_ascriptions, specialize_germs};
pub use rename::alpha_rename;
