pub mod census;
pub mod cover;
pub mod equiv;
pub mod error;
pub mod field;
pub mod galois;
pub mod hypersurface;
pub mod poly;
pub mod projlin;
pub mod recovery;
pub mod rng;

pub use error::{Error, Result};
pub use field::{Field, FieldElement};
pub use poly::{parse, Monomial, Polynomial};
pub use projlin::{Matrix, ProjectivePoint, ProjectiveTransform};
pub use hypersurface::Hypersurface;
