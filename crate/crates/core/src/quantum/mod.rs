//! Quantum-state primitives: validated types, partial traces, measurement
//! conditioning, dephasing, sorted eigendecompositions and random sampling.

pub mod linalg;
pub mod random;
pub mod state;

pub use linalg::{eig_sorted, psd_order, CMatrix, CVector, Eigensystem, SortOrder, C64, OPT_TOL, TOL};
pub use random::{random_bipartite, random_density, random_unitary, rng_stream};
pub use state::{
    conditional_state, dephase, dephase_energy, partial_trace_ancilla, partial_trace_system,
    validate_density, BipartiteState, Conditional, DensityMatrix, Hamiltonian, MeasurementBasis,
    Unitary, ZERO_PROBABILITY,
};
