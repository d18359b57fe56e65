//! Process-wide limits.

use std::sync::atomic::{AtomicUsize, Ordering};

/// Default cap on the number of stored entries per tensor (2^24).
pub const DEFAULT_MAX_TENSOR_ENTRIES: usize = 1 << 24;

static MAX_TENSOR_ENTRIES: AtomicUsize = AtomicUsize::new(DEFAULT_MAX_TENSOR_ENTRIES);

/// Current cap on stored entries per tensor.
pub fn max_tensor_entries() -> usize {
    MAX_TENSOR_ENTRIES.load(Ordering::Relaxed)
}

/// Override the entry cap. A cap of zero is clamped to one.
pub fn set_max_tensor_entries(cap: usize) {
    MAX_TENSOR_ENTRIES.store(cap.max(1), Ordering::Relaxed);
}
