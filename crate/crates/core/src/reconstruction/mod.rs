//! Recovery of the weighted Riemannian structure `(g, ∇, Ric_μ, ρ)` from a
//! generator, using only Γ and L evaluated on coordinate probes.
//!
//! Every quantity here is computed through [`GeneratorSpec::gamma`] and
//! [`GeneratorSpec::apply_l`]; the spec's co-metric expressions are never
//! read directly. Batch helpers evaluate points independently, so callers
//! may fan out over points freely.
//!
//! [`GeneratorSpec::gamma`]: crate::generator::GeneratorSpec::gamma
//! [`GeneratorSpec::apply_l`]: crate::generator::GeneratorSpec::apply_l

mod conjugacy;
mod connection;
mod density;
mod distance;
mod metric;
mod report;
mod ricci;

pub use conjugacy::{check_conjugacy, ConjugacyReport};
pub use connection::{intrinsic_christoffel_jets, recover_christoffels_intrinsic, IntrinsicConnection};
pub use density::{
    drift_one_form_jets, log_density_jet, one_form_closedness, recover_drift, recover_log_density, DensityReport,
    CLOSEDNESS_TOLERANCE,
};
pub use distance::{distance_refinement, intrinsic_distance, ChartBox};
pub use metric::{recover_cometric, recover_metric, recovered_cometric_jets, MetricPoint};
pub use report::{reconstruct_point, reference_oracle, Diagnostics, GeometryReport};
pub use ricci::{recover_ricci_mu, ricci_probes, RicciPoint};
