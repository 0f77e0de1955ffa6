//! Chord and center (Weyl) representations of operators on the quantum torus.
//!
//! The Hilbert space of a torus with `N` states is spanned by position
//! states with boundary phases `(χ_p, χ_q)`. [`operators`] builds the
//! translation and reflection operators on it. [`symbols`] expands any
//! operator in either family. [`products`] multiplies symbols directly, and
//! [`dynamics`] propagates quantized Hamiltonians. It also builds cat maps.
//!
//! ```
//! use torus_weyl::lattice::TorusSpace;
//! use torus_weyl::random::{random_operator, seeded};
//! use torus_weyl::symbols::{chord_symbol, operator_from_chord};
//!
//! let space = TorusSpace::new(3, 0.3, 0.7)?;
//! let a = random_operator(&space, &mut seeded(0));
//! assert!(operator_from_chord(&chord_symbol(&a)).max_abs_diff(&a) < 1e-10);
//! # Ok::<(), torus_weyl::error::Error>(())
//! ```
//!
//! A longer guide lives in the `book/` directory.

pub mod dynamics;
pub mod error;
pub mod io;
pub mod lattice;
pub mod operators;
pub mod products;
pub mod projection;
pub mod random;
pub mod symbols;
pub mod verify;

#[cfg(feature = "cli")]
pub mod cli;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/lattice.md")]
    mod lattice {}
    #[doc = include_str!("../../../book/src/operators.md")]
    mod operators {}
    #[doc = include_str!("../../../book/src/symbols.md")]
    mod symbols {}
    #[doc = include_str!("../../../book/src/products.md")]
    mod products {}
    #[doc = include_str!("../../../book/src/projection.md")]
    mod projection {}
    #[doc = include_str!("../../../book/src/dynamics.md")]
    mod dynamics {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
