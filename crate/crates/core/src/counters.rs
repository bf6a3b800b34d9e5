//! Thread-local instrumentation counters.
//!
//! Tests use these to check the pass-count contract: one forward and one
//! backward pass per analytic gradient, versus `1 + sum n_l (n_{l-1} + 1)`
//! cost evaluations for the one-sided difference-quotient oracle. Counters
//! are incremented at the single choke point of each operation (forward
//! pass, backward pass, cost evaluation), so a snapshot counts real
//! invocations rather than self-reported totals.

use std::cell::Cell;

thread_local! {
    static FORWARD_PASSES: Cell<u64> = const { Cell::new(0) };
    static BACKWARD_PASSES: Cell<u64> = const { Cell::new(0) };
    static COST_EVALUATIONS: Cell<u64> = const { Cell::new(0) };
}

/// Snapshot of the per-thread counters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PassCounts {
    pub forward_passes: u64,
    pub backward_passes: u64,
    pub cost_evaluations: u64,
}

/// Resets all counters on the current thread.
pub fn reset() {
    FORWARD_PASSES.with(|c| c.set(0));
    BACKWARD_PASSES.with(|c| c.set(0));
    COST_EVALUATIONS.with(|c| c.set(0));
}

/// Reads the current thread's counters.
pub fn snapshot() -> PassCounts {
    PassCounts {
        forward_passes: FORWARD_PASSES.with(Cell::get),
        backward_passes: BACKWARD_PASSES.with(Cell::get),
        cost_evaluations: COST_EVALUATIONS.with(Cell::get),
    }
}

pub(crate) fn record_forward_pass() {
    FORWARD_PASSES.with(|c| c.set(c.get() + 1));
}

pub(crate) fn record_backward_pass() {
    BACKWARD_PASSES.with(|c| c.set(c.get() + 1));
}

pub(crate) fn record_cost_evaluation() {
    COST_EVALUATIONS.with(|c| c.set(c.get() + 1));
}
