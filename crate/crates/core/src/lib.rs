//! Exact finite sections of Toeplitz, Hankel, slant Toeplitz, slant Hankel,
//! H-Toeplitz and slant H-Toeplitz operators on the Hardy space `H²`, together
//! with matrix-pattern predicates, operator-identity checks and numerical
//! verification of their analytic properties.

pub mod analysis;
pub mod error;
pub mod expr;
pub mod families;
pub mod structure;
pub mod suite;
pub mod symbol;
pub mod text;
pub mod window;
pub mod windowed;

pub use error::{Error, Result};
pub use expr::{eval_expr, parse_expr, OperatorExpr, SymbolTable};
pub use families::{build_compositional, build_family, CoefficientRef, FamilyKind};
pub use structure::{CheckReport, Witness};
pub use symbol::{parse_symbol, LaurentSymbol};
pub use window::IndexWindow;
pub use windowed::{build_chain, build_elementary, ElementaryKind, IndexedVector, WindowedMatrix};
