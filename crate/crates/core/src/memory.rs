//! Allocator settings for the large, short-lived field buffers.

/// Keeps freed field buffers in the heap instead of returning them to the
/// system, so repeated operations do not refault fresh pages. Only glibc
/// exposes the knobs; elsewhere this does nothing.
pub fn retain_freed_buffers() {
    #[cfg(all(target_os = "linux", target_env = "gnu"))]
    // SAFETY: mallopt only adjusts allocator thresholds.
    unsafe {
        libc::mallopt(libc::M_MMAP_THRESHOLD, 32 << 20);
        libc::mallopt(libc::M_TRIM_THRESHOLD, 1 << 30);
    }
}
