//! Concrete expansion-set instances: Thompson's group V, the products nV,
//! and the extension by the first Grigorchuk group.

pub mod nv;
pub mod rover;
pub mod v;

pub use nv::{NVElement, NVInstance};
pub use rover::{RoverElement, RoverInstance, RoverTable};
pub use v::{
    balanced_bijection, orbit_class, same_orbit_witness, OrbitClass, VElement, VInstance,
};
