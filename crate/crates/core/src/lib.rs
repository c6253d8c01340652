//! Inviscid gas flow along a space curve `z = λa²`: thermodynamics from a
//! Planck potential, the Euler system and its exact solution families, the
//! quotient system in Tresse coordinates, and the virial-expansion hierarchy
//! with its flow-temperature phase plane.

pub mod euler_system;
pub mod numerics;
pub mod quotient;
pub mod thermo;
pub mod virial_flow;
