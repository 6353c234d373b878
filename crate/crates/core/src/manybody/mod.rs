//! Exact small-N many-body computations: condensate projections, counting weights,
//! reduced density matrices and the renormalised energy.

pub mod alpha;
pub mod hamiltonian;
pub mod pair_form;
pub mod projector;
pub mod rdm;
pub mod state;
pub mod weights;

pub use alpha::{alpha_functional, assemble_orbital, trace_bounds, trace_bounds_full, AlphaReport, TraceBoundSample};
pub use hamiltonian::{energy_n, energy_terms, EnergyTerms, HamiltonianSpec, SingleParticleSpace};
pub use projector::{apply_projector, apply_shifted, apply_weight, occupation, r_hat, Projector};
pub use rdm::{partial_trace, rdm_k, trace_distance_to, trace_norm, DensityMatrix};
pub use state::ManyBodyState;
pub use weights::{weight_m, WeightBounds, WeightTable};
