//! Genuine multi-qubit entanglement from linear-entropy nonlocal information.
//!
//! The measure `E` is the signed sum of bipartite nonlocal information over
//! all cuts of an even register: cuts with two odd sides count positively,
//! cuts with two even sides negatively. It is 1 on GHZ states, 0 on W states
//! and on every product state, and scales as `E / Q^4` under determinant-one
//! local filtering.
//!
//! `examples/quickstart.rs` shows the basic calls.

pub mod error;
pub mod ising;
pub mod lanczos;
pub mod measure;
pub mod partition;
pub mod random;
pub mod slocc;
pub mod state;
pub mod suite;

pub use error::{Error, Result};
pub use ising::{
    build_hamiltonian, field_grid, ground_state, sweep, write_sweep_files, IsingParams, IsingSweepRow, Solver,
    SpectrumResult,
};
pub use measure::{
    entanglement_value, genuine_entanglement, genuine_entanglement_with_tol, nonlocal_info, pair_tangle,
    three_tangle, MeasureReport, NonlocalInfo,
};
pub use partition::{
    class_census, counting_identity, enumerate_bipartitions, factorize, Bipartition, Factorization, PartitionClass,
    PurityCache, DEFAULT_FACTOR_TOL,
};
pub use random::{haar_random_state, RngSeed};
pub use slocc::{
    apply_sl2, check_monotonicity, check_normal_form_properties, check_slocc_covariance, g_abcd, purity_t,
    GAbcdParams, PovmPair, SL2Op,
};
pub use state::{ghz, make_state, tensor_product, w_state, LocalOperator, PureState, QubitSubset, StateFile};
pub use suite::{random_scan, run_suite, ScanSummary, Suite, SuiteConfig, SuiteReport};
