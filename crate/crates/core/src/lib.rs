//! Exterior differential systems over exact rational functions: Cartan's
//! test for involutivity, prolongation with torsion, and characteristic
//! varieties of the linearized system.

pub mod cli;
pub mod coframe;
pub mod dsl;
pub mod eds;
pub mod error;
pub mod forms;
pub mod involution;
pub mod linalg;
pub mod linearize;
pub mod prolong;
pub mod scalar;

pub use coframe::{Manifold, SymbolKind};
pub use eds::{ExteriorSystem, IntegralElement};
pub use error::{Error, Result};
pub use forms::{DForm, NumForm, TangentVector};
pub use involution::{cartan_test, CartanReport};
pub use scalar::{Point, Scalar};
