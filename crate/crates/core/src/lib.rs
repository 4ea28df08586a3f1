//! Characteristic classes of Bott manifolds, chain rings and generalized Dold manifolds over `Z_2`.

pub mod bott;
pub mod dold;
pub mod error;
pub mod poly2;
pub mod qring;
pub mod steenrod;

pub use bott::{BottMatrix, BottRing, GradedClasses, MainReport, Method};
pub use dold::{DoldReport, DoldSpec, TruncPoly};
pub use error::{Error, Result};
pub use poly2::{Mask, Monomial, Poly, SqfreePoly};
pub use qring::{KeyReport, ZeroCheck};
pub use steenrod::{MilnorTuple, PermSum};
