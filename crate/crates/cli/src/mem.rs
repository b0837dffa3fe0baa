//! Peak resident memory from Linux process accounting.

use std::fs;

/// Resets the peak resident set size of this process so that a later
/// [`peak_rss_bytes`] reflects only what follows. Returns `false` where the
/// kernel does not support it.
pub fn reset_peak() -> bool {
    fs::write("/proc/self/clear_refs", "5").is_ok()
}

/// `VmHWM` of this process in bytes, if available.
pub fn peak_rss_bytes() -> Option<u64> {
    let status = fs::read_to_string("/proc/self/status").ok()?;
    parse_kb_field(&status, "VmHWM:").map(|kb| kb * 1024)
}

fn parse_kb_field(status: &str, key: &str) -> Option<u64> {
    let line = status.lines().find(|l| l.starts_with(key))?;
    line[key.len()..].split_whitespace().next()?.parse().ok()
}
