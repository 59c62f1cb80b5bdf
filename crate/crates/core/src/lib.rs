//! Decoherence budgets induced by stochastic gravitational-wave backgrounds.
//!
//! What gets computed:
//!
//! - dephasing variance and fringe-contrast loss for a rhombic matter-wave
//!   interferometer exposed to a strain background, through both a spectral
//!   quadrature and the flat-spectrum closed forms, with the photon-path
//!   channel and the equivalent mirror-displacement noise
//!   ([`dephasing`], [`interferometer`]);
//! - the background itself in its equivalent representations: spectral
//!   density, graviton number per mode, effective noise temperature, and the
//!   temperature frequency `Theta` ([`background`]);
//! - a seeded Monte Carlo oracle that synthesizes stationary Gaussian strain
//!   with a prescribed spectrum and measures the same variance and contrast
//!   empirically ([`montecarlo`]);
//! - momentum-diffusion decoherence of circular two-body orbits with the
//!   damping/diffusion channel comparison ([`planetary`]);
//! - the unified kinetic-energy scaling of the decoherence exponent and a
//!   scan for the quantum-classical transition region ([`planckscale`]).
//!
//! Conventions, fixed once and used everywhere: spectra are two-sided
//! densities stored against angular frequency, with positive-axis bands
//! standing for their symmetric pair; config files and CLI surfaces speak
//! ordinary frequency in Hz and convert on ingestion; every public physical
//! value carries its SI dimension vector ([`quantity::PhysQuantity`]).

pub mod background;
pub mod constants;
pub mod dephasing;
pub mod interferometer;
pub mod montecarlo;
pub mod planckscale;
pub mod planetary;
pub mod quad;
pub mod quantity;
pub mod scenario;

pub use quantity::{Dim, DimensionError, PhysQuantity};
