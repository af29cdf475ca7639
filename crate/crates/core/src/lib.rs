//! Exact template embedding of problem graphs into Chimera hardware graphs.

pub mod chimera;
pub mod formulations;
pub mod generators;
pub mod graph;
pub mod harness;
pub mod ilp;
pub mod templates;
pub mod verify;

pub use chimera::{ChimeraCoord, ChimeraGraph};
pub use graph::{ProblemGraph, Side};
pub use templates::{Template, TemplateKind};
pub use verify::{verify, Embedding, VerifyReport, Violation};
