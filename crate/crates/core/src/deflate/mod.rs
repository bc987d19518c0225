//! Deflation of singular roots: random stages, the structured deflated
//! system, its naive expansion, and the refine/deflate loop.

mod driver;
mod expand;
mod export;
mod stage;
mod symbolic;
mod system;

pub use driver::{
    deflate_loop, deflate_once, deflate_with_rank, DeflateOptions, Deflation, DeflationOutcome,
    DeflationReport, LoopStatus, DEFAULT_MAX_DEFLATIONS, DEFAULT_SEED,
};
pub use expand::{expand, multiplier_name};
pub use export::export_deflated;
pub use stage::{unit_circle_matrix, DeflationRng, DeflationStage};
pub use symbolic::symbolic_deflation;
pub use system::DeflatedSystem;
