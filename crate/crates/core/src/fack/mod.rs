//! Spectral ramps, rank-comparison witnesses, the finite commutator step and
//! its iteration down a tower of orthogonal positive elements, and the block
//! commutator formula.

mod block_split;
mod ramp;
mod tower;
mod trapecio;
mod witness;

pub use block_split::{
    block_two_commutator_split, block_two_commutator_split_hermitian, BlockSplit, BlockSplitInstance, SplitPair,
    SPLIT_TOL, TRACE_CONDITION_TOL,
};
pub use ramp::{apply_ramp, positive_range, positive_rank, psd_eig, RampMode, SpectralRamp, PSD_TOL, RANK_TOL};
pub use tower::{
    fack_iterate, fack_iterate_with, random_start, BlockSpec, FackResult, FamilyRecord, InnerStep, StageRanks,
    StageRecord, TowerModel, TowerSpec, INNER_NORM_CONSTANT, ZERO_REMAINDER,
};
pub use trapecio::{
    neumann_solve, trapecio_step, trapecio_step_with, StepParams, TrapecioResult, NEUMANN_MAX_ITER, NEUMANN_TOL,
    STEP_TOL,
};
pub use witness::{cuntz_witness, CuntzWitness};
