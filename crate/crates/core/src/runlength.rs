//! Direct run-length predicate and exhaustive counting over all binary
//! strings. This path never touches regexes, automata or generating
//! functions, so it serves as an independent oracle for them.

use crate::exec::Execution;

/// Longest supported exhaustive length; `2^30` strings per length is already
/// minutes of work.
pub const MAX_BRUTE_FORCE_LEN: usize = 30;

/// Whether the `len` low bits of `bits` (most significant first) contain no
/// run of `1`s longer than `j` and no run of `0`s longer than `k`.
pub fn satisfies_run_length(bits: u64, len: usize, j: usize, k: usize) -> bool {
    let mut run = 0usize;
    let mut prev = 2u64;
    for i in (0..len).rev() {
        let b = (bits >> i) & 1;
        run = if b == prev { run + 1 } else { 1 };
        prev = b;
        let limit = if b == 1 { j } else { k };
        if run > limit {
            return false;
        }
    }
    true
}

/// Same predicate on a string of `'0'`/`'1'` characters. Other characters
/// break the string into independent runs.
pub fn satisfies_run_length_str(text: &str, j: usize, k: usize) -> bool {
    let mut run = 0usize;
    let mut prev = None;
    for c in text.chars() {
        run = if Some(c) == prev { run + 1 } else { 1 };
        prev = Some(c);
        let limit = match c {
            '1' => j,
            '0' => k,
            _ => usize::MAX,
        };
        if run > limit {
            return false;
        }
    }
    true
}

/// `counts[n-1]` is the number of length-`n` binary strings satisfying the
/// `(j,k)` predicate, for `n = 1..=max_len`, by testing all `2^n` strings.
///
/// Panics if `max_len` exceeds [`MAX_BRUTE_FORCE_LEN`].
pub fn brute_force_counts(j: usize, k: usize, max_len: usize, exec: Execution) -> Vec<u64> {
    assert!(
        max_len <= MAX_BRUTE_FORCE_LEN,
        "exhaustive enumeration limited to length {MAX_BRUTE_FORCE_LEN}"
    );
    (1..=max_len)
        .map(|n| exec.count_where(0..1u64 << n, |bits| satisfies_run_length(bits, n, j, k)))
        .collect()
}
