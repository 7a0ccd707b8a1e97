//! Semi-toric realizations, first-order deformations along smoothable edges,
//! and the worked deformation examples.

mod examples;
mod integrate;
mod realize;

pub use examples::{ExampleDeformation, ExampleName, Initial};
pub use integrate::{integrate, IntegrationOptions, IntegrationReport, Sample};
pub use realize::{chart_bivector, homogeneous_lift, Preset, RhoBivector, SemiToricRealization};
