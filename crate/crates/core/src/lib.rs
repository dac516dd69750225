//! Simulator and diagnostics laboratory for the classical one-phase Stefan
//! problem on near-circular 2-D domains, written in a fixed-disk harmonic
//! gauge.
//!
//! The moving domain is the graph (1+h(θ))ξ(θ) over the unit circle; the
//! harmonic map Ψ pulls the heat flow back to the fixed disk, where the
//! temperature q, velocity v = −Aᵀ∇q, and the height h evolve together. The
//! crate provides:
//!
//! * a Bessel/eigenbasis toolkit for the Dirichlet disk ([`bessel`], [`eigen`]);
//! * the gauge map and its deformation tensors ([`gauge`]);
//! * an IMEX solver for the transformed system ([`solver`]);
//! * decay/energy/sign diagnostics ([`diagnostics`]);
//! * an independent radially-symmetric front-fixing solver ([`radial`]);
//! * config parsing, presets, and run artifacts ([`runner`]).

pub mod bessel;
pub mod diagnostics;
pub mod eigen;
pub mod error;
pub mod field;
pub mod fourier;
pub mod gauge;
pub mod grid;
pub mod operators;
pub mod radial;
pub mod runner;
pub mod solver;

pub use error::{Error, Result};
