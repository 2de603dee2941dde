//! Two identical qubits coupled to a one-dimensional waveguide.
//!
//! Units: the waveguide decay rate and the group velocity are 1 unless set otherwise in
//! [`SystemParams`]; the qubit separation enters through the phase k0L.

pub mod error;
pub mod hilbert;
pub mod master_eq;
pub mod params;
pub mod poles;
pub mod single_photon;
pub mod two_photon;

pub use error::{Result, WqedError};
pub use master_eq::{
    build_liouvillian, concurrence, concurrence_scan, excitation_probability, steady_state, CollectiveParams, CollectiveSource, ConcurrencePoint,
    DensityMatrix4, DriveParams, Liouvillian,
};
pub use params::{Channel, ContinuationSettings, Direction, QuadratureSettings, SystemParams};
pub use poles::{continue_poles, enumerate_poles, markov_poles, poles_on_grid, PoleLabel, PoleRecord, Rect, TracePoint};
pub use single_photon::{amplitudes, transmission_map, ComplexAmplitude, ScatteringAmplitudes};
pub use two_photon::{GreenMatrices, Mover, PhotonCoord, TwoPhotonInput, TwoPhotonSolver, TwoPhotonState};
