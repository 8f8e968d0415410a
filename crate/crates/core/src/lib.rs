//! Mini-batch optimal transport.
//!
//! The crate estimates transport distances and plans between large point
//! clouds by solving many small problems between mini-batches and combining
//! them. Three combination schemes are provided (see [`schemes`]): plain
//! averaging (m-OT), an exact coupling between batches (BoMb-OT) and an
//! entropic coupling between batches (eBoMb-OT). Inner problems use exact,
//! entropic or sliced Wasserstein distances ([`solvers`]).
//!
//! On top of the schemes sit three drivers: particle gradient flows
//! ([`flow`]), palette-based color transfer ([`color`]) and rejection ABC
//! ([`abc`]). [`io`] holds the CSV and PPM readers and writers used by the
//! command-line tool.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod abc;
pub mod color;
pub mod error;
pub mod flow;
pub mod io;
pub mod measures;
pub mod rng;
pub mod schemes;
pub mod solvers;

pub use error::{Error, Result};
pub use measures::{
    batch_measure, empirical_measure, validate_plan, CostMatrix, DiscreteMeasure, MiniBatchIndex,
    PlanCheck, PointCloud, TransportPlan,
};
pub use schemes::{mb_distance, MbResult, OuterScheme, SchemeConfig};
pub use solvers::{InnerMetric, SolverReport};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/measures.md")]
    mod measures {}
    #[doc = include_str!("../../../book/src/solvers.md")]
    mod solvers {}
    #[doc = include_str!("../../../book/src/schemes.md")]
    mod schemes {}
    #[doc = include_str!("../../../book/src/flow.md")]
    mod flow {}
    #[doc = include_str!("../../../book/src/color.md")]
    mod color {}
    #[doc = include_str!("../../../book/src/abc.md")]
    mod abc {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
