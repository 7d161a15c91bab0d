//! Work and heat statistics of unital quantum Otto cycles.
//!
//! [`engine`] enumerates every stochastic trajectory of a finite-dimensional
//! cycle, in either the projectively monitored (dephased) picture or the
//! unmonitored picture built on the Kirkwood-Dirac quasiprobability.
//! [`qubit`] holds the closed-form layer for the single-qubit engine, and
//! [`qmath`] the dense linear algebra underneath both.

pub mod engine;
pub mod qmath;
pub mod qubit;
pub mod sample;

pub use engine::{Beta, EngineSpec, Mode};
pub use qmath::{CMatrix, HermitianOperator, KrausChannel, UnitaryOperator};
