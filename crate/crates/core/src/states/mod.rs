//! Example state families and local-unitary fingerprints.

mod example2;
mod obstruction;
mod smolin;
mod standard;

pub use example2::{
    example2_state, g_value, moduli_fingerprint, moduli_k, EtaParams, Fingerprint, FINGERPRINT_TOL,
};
pub use obstruction::{smolin_lu_obstruction, ObstructionReport, LuVerdict};
pub use smolin::{
    antidiagonal_form, block_pt_invariance_check, diagonal_form, generalized_smolin, generalized_smolin_exact,
    pt_invariant, random_point_on_form, smolin_state, SmolinParams, TAU_ORTHO, T_ROWS,
};
pub use standard::{standard_states, StandardState, STANDARD_NAMES};
