pub mod checker;
pub mod dynamizer;
pub mod evidence;
pub mod harness;
pub mod midend;
pub mod pipeline;
pub mod runtime;
pub mod span;
pub mod surface;
pub mod types;
