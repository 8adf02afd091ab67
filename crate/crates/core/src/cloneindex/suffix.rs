//! Suffix array, LCP array, and repeat-interval enumeration over symbol
//! slices.
//!
//! The suffix array is built by prefix doubling, O(n log^2 n); LCPs by
//! Kasai's algorithm, O(n). Together they support both counting modes and
//! clone-group extraction without materializing windows.

use alloc::vec;
use alloc::vec::Vec;

/// Builds the suffix array of `sym` (indices of suffixes in sorted order).
pub fn suffix_array(sym: &[u32]) -> Vec<u32> {
    let n = sym.len();
    if n == 0 {
        return Vec::new();
    }
    let mut uniq: Vec<u32> = sym.to_vec();
    uniq.sort_unstable();
    uniq.dedup();
    let mut rank: Vec<u32> = sym
        .iter()
        .map(|s| uniq.binary_search(s).unwrap() as u32)
        .collect();
    let mut sa: Vec<u32> = (0..n as u32).collect();
    let mut next: Vec<u32> = vec![0; n];
    let mut k = 1usize;
    while k < n {
        // Rank pairs: (rank of prefix, rank k positions later, shifted so
        // that "past the end" sorts first).
        let key = |i: u32| -> (u32, u32) {
            let i = i as usize;
            let tail = if i + k < n { rank[i + k] + 1 } else { 0 };
            (rank[i], tail)
        };
        sa.sort_unstable_by_key(|&i| key(i));
        next[sa[0] as usize] = 0;
        for j in 1..n {
            let bump = (key(sa[j - 1]) != key(sa[j])) as u32;
            next[sa[j] as usize] = next[sa[j - 1] as usize] + bump;
        }
        rank.copy_from_slice(&next);
        if rank[sa[n - 1] as usize] as usize == n - 1 {
            break;
        }
        k <<= 1;
    }
    sa
}

/// Kasai LCP: `lcp[r]` is the common-prefix length of suffixes `sa[r-1]`
/// and `sa[r]`; `lcp[0] == 0`.
pub fn lcp_array(sym: &[u32], sa: &[u32]) -> Vec<u32> {
    let n = sym.len();
    let mut lcp = vec![0u32; n];
    if n == 0 {
        return lcp;
    }
    let mut inv = vec![0u32; n];
    for (r, &p) in sa.iter().enumerate() {
        inv[p as usize] = r as u32;
    }
    let mut h = 0usize;
    for p in 0..n {
        let r = inv[p] as usize;
        if r == 0 {
            h = 0;
            continue;
        }
        let q = sa[r - 1] as usize;
        while p + h < n && q + h < n && sym[p + h] == sym[q + h] {
            h += 1;
        }
        lcp[r] = h as u32;
        h = h.saturating_sub(1);
    }
    lcp
}

/// Visits every branching repeat of the suffix array: each reported
/// `(depth, lb, rb)` is a (virtual) suffix-tree node whose string has
/// length `depth >= 1` and occurs at all of `sa[lb..=rb]` (at least two
/// suffixes). Every right-maximal repeated string is such a node when the
/// input carries a unique terminal symbol.
pub fn for_each_repeat_interval(lcp: &[u32], mut report: impl FnMut(u32, usize, usize)) {
    let n = lcp.len();
    if n < 2 {
        return;
    }
    let mut stack: Vec<(u32, usize)> = vec![(0, 0)];
    for (i, &here) in lcp.iter().enumerate().skip(1) {
        let mut lb = i - 1;
        while here < stack.last().unwrap().0 {
            let (depth, start) = stack.pop().unwrap();
            report(depth, start, i - 1);
            lb = start;
        }
        if here > stack.last().unwrap().0 {
            stack.push((here, lb));
        }
    }
    while let Some((depth, start)) = stack.pop() {
        if depth > 0 {
            report(depth, start, n - 1);
        }
    }
}
