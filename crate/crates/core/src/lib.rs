pub mod cone;
pub mod error;
pub mod experiments;
pub mod geom;
pub mod lemma_checks;
pub mod minkowski;
pub mod overlap;
pub mod sampling;

pub use error::{Error, Result};
pub use geom::{Point2, Point3, Verdict};
