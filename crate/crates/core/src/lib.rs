//! Tronquee solutions of the third and fourth Painleve equations.

pub mod dd;
pub mod dynamics;
pub mod error;
pub mod exact;
pub mod experiments;
pub mod integrate;
pub mod model;
pub mod scalar;
pub mod series;
pub mod svg;
pub mod acceptance;
pub mod cli;

pub use error::{Error, Result};
pub use exact::ExactScalar;
pub use model::{branch, make_equation, p3ii_y_sector, sector, Branch, EquationSpec, Family, Param, RawParams, Sector, SectorKind, TrackedPoint};
