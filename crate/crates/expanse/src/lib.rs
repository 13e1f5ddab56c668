//! Expansion sets for generalized Thompson groups.
//!
//! The crate is organized bottom-up:
//!
//! * [`cantor`] — finite binary words, cones, and prefix-substitution partial
//!   bijections of the Cantor set (with n-dimensional box variants in
//!   [`boxes`]);
//! * [`grig`] — arithmetic and the word problem for the Grigorchuk group;
//! * [`topology`] — a finite simplicial-complex engine with exact reduced
//!   homology over GF(2) and the rationals;
//! * [`core`] — the abstract expansion-set machinery: vertices, partitions,
//!   expansion posets, stars/links, covers, and filtration slices;
//! * [`instances`] — concrete expansion sets for Thompson's V, the
//!   Brin–Thompson groups nV, and the Nekrashevych–Röver group;
//! * [`verify`] — executable checks that the instances satisfy the finiteness
//!   hypotheses, with machine-readable reports;
//! * [`synthetic`] — small ordered toy instances used to exercise the linear
//!   and cyclic cover machinery;
//! * [`sampling`] — seeded random trees, elements, vertices, and complexes
//!   for reproducible spot checks.
//!
//! Batch work fans out through [`exec`], which uses rayon when the `parallel`
//! feature is enabled (the default) and plain iterators otherwise.

pub mod boxes;
pub mod cantor;
pub mod core;
pub mod exec;
pub mod grig;
pub mod instances;
pub mod sampling;
pub mod synthetic;
pub mod topology;
pub mod verify;
