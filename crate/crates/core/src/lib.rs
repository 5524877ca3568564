//! Existence bounds and randomized construction for perfect and separating
//! hash families.
//!
//! The crate computes the cluster-expansion local lemma bound on the number of
//! rows `N` that guarantees a perfect hash family `PHF(N; n, m, w)` or a
//! separating hash family `SHF(N; n, m, {w_1, …, w_s})`, compares it with the
//! classical local lemma, expurgation and Stinson–Zaverucha bounds, builds
//! such families with Moser–Tardos resampling and checks them exhaustively.
//!
//! Exact counts use [`num_bigint`]; every real-valued quantity is generic over
//! [`Real`] (any `num_traits::Float`). The `*F64` aliases fix the scalar to `f64`,
//! which is what the tolerances in the test suite assume.

pub mod bounds;
pub mod cluster_expansion;
pub mod combinatorics;
pub mod error;
pub mod matrix;
pub mod mt_engine;
pub mod oracles;
pub mod real;
pub mod tables;

pub use bounds::{AsymptoticWinner, BoundReport, FamilySpec, ShfSpec, SzComparison};
pub use cluster_expansion::{ClusterNumerator, ClusterPolynomial, PhfSpec, StationaryPoint};
pub use combinatorics::{BigCount, BigRational};
pub use error::{Error, Result};
pub use matrix::HashMatrix;
pub use mt_engine::{BadEvent, BadEventPolicy, MtOptions, MtOutcome, MtStats};
pub use oracles::{Witness, WitnessKind};
pub use real::Real;

pub type BoundReportF64 = BoundReport<f64>;
pub type BoundReportF32 = BoundReport<f32>;
pub type ClusterPolynomialF64 = ClusterPolynomial<f64>;
pub type ClusterPolynomialF32 = ClusterPolynomial<f32>;
pub type ClusterNumeratorF64 = ClusterNumerator<f64>;
pub type StationaryPointF64 = StationaryPoint<f64>;
