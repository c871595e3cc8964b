//! Shared setup helpers for the benchmark targets.
