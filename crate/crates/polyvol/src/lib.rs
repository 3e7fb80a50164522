//! Exact volumes and polynomial integrals of convex polytopes.
//!
//! The central object is the multivariate truncated power T(x|M): the
//! normalized volume of the fiber {u ≥ 0 : Mu = x} of a direction matrix M.
//! Volumes of polytopes given by inequalities, integrals of polynomials over
//! them, and volumes of hyperplane slices of cubes are all obtained as point
//! evaluations of T or of the closely related box spline.
//!
//! Everything is computed in exact rational arithmetic (with explicit √gram
//! factors where Euclidean normalization calls for them). Independent
//! algorithms for the same quantities are kept side by side so results can
//! be cross-checked: an explicit subset-sum formula and a column-removal
//! recurrence for T, plus vertex-based and elimination-based volume routes,
//! and a Monte Carlo oracle for sanity bounds.

pub mod error;
pub mod exact;
pub mod integrate;
pub mod oracle;
pub mod polytope;
pub mod splines;
pub mod tpower;

pub use error::{Error, Result};
pub use exact::{Rat, RatMatrix, RadicalValue};
pub use integrate::{
    integrate_monomial_fiber, integrate_monomial_hrep, integrate_polynomial_hrep, lift_exponents,
    ExponentVector, Polynomial,
};
pub use oracle::{mc_integrate, mc_volume, simplex_exact, McEstimate};
pub use polytope::{
    brion_volume, certify_bounded, enumerate_vertices, euclidean_fiber_volume,
    hrep_direction_system, lasserre_volume, lasserre_volume_with_pivot, relative_volume,
    volume_report, volume_via_T, HPolytope, PivotRule, VPolytope, VertexData, VolumeMethod,
    VolumeReport,
};
pub use splines::{
    box_moment_check, central_section_volume, eval_box_spline, good_check, slice_volume,
    GoodReport, MomentReport, SliceSpec, SPLINE_COLUMN_CAP,
};
pub use tpower::{
    classify_point, eval_E, eval_T_explicit, eval_T_recurrence, sample_generic_c,
    DirectionMatrix, ExpSum, GenericVector, PointClassification, COLUMN_CAP,
};
