//! Physical constants and Planck-scale quantities.
//!
//! Values are CODATA 2018 recommended values. The raw `f64` constants in
//! [`si`] are for internal numerics; the public accessors return
//! dimension-carrying [`PhysQuantity`] values.

use thiserror::Error;

use crate::quantity::{Dim, DimensionError, PhysQuantity};

/// Bare SI values (CODATA 2018).
pub mod si {
    /// Newtonian constant of gravitation (m^3 kg^-1 s^-2).
    pub const G: f64 = 6.674_30e-11;
    /// Speed of light in vacuum (m/s).
    pub const C: f64 = 299_792_458.0;
    /// Reduced Planck constant (J s).
    pub const HBAR: f64 = 1.054_571_817e-34;
    /// Boltzmann constant (J/K).
    pub const K_B: f64 = 1.380_649e-23;
}

const DIM_G: Dim = Dim::new(3, -1, -2, 0);
const DIM_K_B: Dim = Dim::new(2, 1, -2, -1);

pub fn gravitational_constant() -> PhysQuantity {
    PhysQuantity::new(si::G, DIM_G)
}

pub fn speed_of_light() -> PhysQuantity {
    PhysQuantity::meters_per_second(si::C)
}

pub fn reduced_planck_constant() -> PhysQuantity {
    PhysQuantity::new(si::HBAR, Dim::ACTION)
}

pub fn boltzmann_constant() -> PhysQuantity {
    PhysQuantity::new(si::K_B, DIM_K_B)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstantsError {
    #[error(transparent)]
    Dimension(#[from] DimensionError),
    #[error("mass must be positive, got {0} kg")]
    NonPositiveMass(f64),
}

/// Planck mass sqrt(hbar c / G), about 22 micrograms.
pub fn planck_mass() -> PhysQuantity {
    let m2 = reduced_planck_constant() * speed_of_light() / gravitational_constant();
    m2.sqrt().expect("hbar*c/G has even exponents")
}

/// Planck time sqrt(hbar G / c^5).
pub fn planck_time() -> PhysQuantity {
    let t2 = reduced_planck_constant() * gravitational_constant() / speed_of_light().powi(5);
    t2.sqrt().expect("hbar*G/c^5 has even exponents")
}

/// Planck length c * t_P.
pub fn planck_length() -> PhysQuantity {
    speed_of_light() * planck_time()
}

/// Planck energy m_P c^2.
pub fn planck_energy() -> PhysQuantity {
    planck_mass() * speed_of_light().powi(2)
}

/// Compton length hbar/(m c) of a mass. The Planck mass is the fixed point
/// where the Compton length equals the Planck length.
pub fn compton_length(mass: PhysQuantity) -> Result<PhysQuantity, ConstantsError> {
    let m = mass.expect_dim(Dim::MASS, "compton_length mass")?;
    if m <= 0.0 {
        return Err(ConstantsError::NonPositiveMass(m));
    }
    Ok(reduced_planck_constant() / (mass * speed_of_light()))
}
