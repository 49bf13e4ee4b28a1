//! Explicit n-descent on elliptic curves over finite fields.

pub mod error;
pub mod field;
pub mod linalg;
pub mod elliptic;
pub mod etale;
pub mod algebra;
pub mod theta;
pub mod blackbox;
pub mod cubic;
pub mod mpoly;
pub mod hesse;
pub mod flex;
pub mod segre;
pub mod pipeline;
pub mod job;

pub use error::{DescentError, Result};
pub use field::{Fe, Field, Poly, Tower};
pub use linalg::Matrix;
pub use elliptic::{Curve, Point};
pub use etale::{DescentClass, Etale};
pub use cubic::TernaryCubic;
pub use job::{run, JobSpec, Report};
pub use pipeline::Setup;
