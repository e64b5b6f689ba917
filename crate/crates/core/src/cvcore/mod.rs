//! Continuous-variable primitives: Gaussian channels on moments, Fock-basis states,
//! phase-space representations and the additive Gaussian noise channel.

mod fock;
mod gaussian;
mod prep;

pub use fock::{
    apply_loss, apply_phase_rotation, coherent_vector, default_coherent_dim, hermitian_eigenvalues, trace_distance,
    trace_distance_padded, trace_norm, truncate_energy, FockMatrix,
};
pub use gaussian::{
    apply_gaussian, gaussian_ln_fidelity_sq, output_fidelity_sq, output_ln_fidelity_sq, pure_output_distance, GaussianChannel,
    GaussianMoments,
};
pub use prep::{
    additive_noise_apply, additive_noise_apply_matrix, delta_s_bound, gamma_overlap, noise_kernel, p_rep_fock_element, p_rep_radial,
    q_rep_fock_element, FockLabel, NoisyState, NOISE_ABS_TOL,
};
