//! Proximate growth functions relative to a model growth function.
//!
//! All computation happens in log coordinates `x = ln r`, `y = ln F(r)`.

pub mod asymptotics;
pub mod catalog;
pub mod construct;
pub mod deriv;
pub mod error;
pub mod family;
pub mod funcspec;
pub mod grid;
pub mod model;
pub mod proximate;
pub mod sample;
pub mod source;
pub mod subharmonic;

pub use asymptotics::{estimate_limit, estimate_limsup, LimitEstimate, LimitOptions, LimitStatus};
pub use construct::{construct_proximate, order_estimate, ConstructOptions, ConstructionResult};
pub use error::{Error, Result};
pub use family::{AnalyticFamily, Family, RhoFamily};
pub use funcspec::FunctionSpec;
pub use grid::{Grid, GridSpec, Ray};
pub use model::{validate_model, ModelGrowth, ModelOptions, ValidationReport};
pub use proximate::{check_proximate, equivalence_report, ProximateOptions};
pub use sample::{LogLogSample, Track};
pub use source::{DerivMode, Source};
pub use subharmonic::{circle_mean, disk_mean, means_series, PlaneFunction};
