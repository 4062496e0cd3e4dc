pub mod bounds;
pub mod diagnostics;
pub mod error;
pub mod expr;
pub mod families;
pub mod ff;
pub mod incidence;
pub mod multipoly;
pub mod poly;
pub mod valueset;

pub use error::{Error, Result};
pub use expr::{parse_poly_expr, to_expr, Variables};
pub use families::{FamilyKind, FamilyMember, FamilySpec};
pub use ff::{Embedding, FieldSpec, FqElem};
pub use multipoly::{Monomial, MultiPoly};
pub use poly::{MonicFamilyPoly, UniPoly};
