//! Shared fixtures for the benchmarks.

use radpair_core::InitialState;

/// Equal singlet/triplet superposition used as the benchmark input.
pub fn standard_state() -> InitialState {
    InitialState::equal_superposition()
}
