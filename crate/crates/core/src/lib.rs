//! Simulation and pulse compilation for cold trapped ions in a single-mode
//! optical cavity, with the ion's motional state and the cavity photon
//! number used as bosonic qubits.

pub mod error;
pub mod gates;
pub mod hilbert;
pub mod open_system;
pub mod params;
pub mod propagators;
pub mod protocols;

pub use error::{Error, Result};
pub use hilbert::{BasisLabel, Factor, Internal, OpSpec, OperatorMatrix, PureState, SystemConfig};
pub use num_complex::Complex64 as C64;
pub use params::PhysicalParams;
pub use propagators::{Case, Pulse};
