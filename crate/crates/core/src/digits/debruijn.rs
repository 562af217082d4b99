//! De Bruijn sequence generation.

use crate::error::{resource, Error, Result};

/// Cyclic order-`order` de Bruijn sequence over `base` symbols, by
/// concatenating in lexicographic order the Lyndon words whose length divides
/// `order` (Fredricksen-Kessler-Maiorana).
///
/// The result has length `base^order`; appending its first `order - 1` symbols
/// gives a linear sequence containing every word of length `order` once.
pub fn fkm(base: u32, order: u32, cap: u64) -> Result<Vec<u8>> {
    let n = order as usize;
    let len = checked_pow(base, order, cap)?;
    let top = (base - 1) as u8;
    let mut out = Vec::with_capacity(len as usize);
    let mut a = vec![0u8; n + 1];
    // a[1..=n] holds the current prenecklace; `p` is the length of its
    // longest Lyndon prefix.
    let mut p = 1usize;
    loop {
        if n.is_multiple_of(p) {
            out.extend_from_slice(&a[1..=p]);
        }
        // Next prenecklace in lexicographic order.
        let mut i = n;
        while i > 0 && a[i] == top {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        a[i] += 1;
        for j in i + 1..=n {
            a[j] = a[j - i];
        }
        p = i;
    }
    debug_assert_eq!(out.len() as u64, len);
    Ok(out)
}

/// A linear sequence whose prefix of length `base^k + k - 1` is an order-`k`
/// de Bruijn sequence for every `k` in `1..=max_order`.
///
/// Each order is obtained from the previous one by completing an Euler trail
/// in the order-`k+1` de Bruijn graph, always taking the smallest digit that
/// still admits a completion. The returned sequence has length
/// `base^max_order + max_order - 1`.
pub fn extended(base: u32, max_order: u32, cap: u64) -> Result<Vec<u8>> {
    if base < 3 {
        return Err(Error::Precondition(
            "extension of de Bruijn sequences requires base >= 3".into(),
        ));
    }
    if max_order == 0 {
        return Err(Error::Precondition("max_order must be >= 1".into()));
    }
    checked_pow(base, max_order, cap)?;
    let mut seq: Vec<u8> = (0..base).map(|d| d as u8).collect();
    for order in 2..=max_order {
        seq = extend_once(base, order, seq)?;
    }
    Ok(seq)
}

/// Extends an order-`order - 1` de Bruijn prefix to order `order`.
fn extend_once(base: u32, order: u32, prefix: Vec<u8>) -> Result<Vec<u8>> {
    let b = base as usize;
    let node_len = (order - 1) as usize;
    let nodes = (base as usize).pow(order - 1);
    let edges = nodes * b;
    let node_mod = nodes / b; // base^(order-2)

    // used[e] for edge code e = node * b + digit.
    let mut used = vec![false; edges];
    let mut seq = prefix;
    let code_of = |window: &[u8]| window.iter().fold(0usize, |acc, &d| acc * b + d as usize);
    for w in seq.windows(order as usize) {
        let e = code_of(w);
        if used[e] {
            return Err(Error::Internal(format!(
                "prefix repeats a word of length {order}"
            )));
        }
        used[e] = true;
    }
    let mut remaining = edges - seq.windows(order as usize).count();
    let mut node = code_of(&seq[seq.len() - node_len..]);

    while remaining > 0 {
        let mut advanced = false;
        for digit in 0..b {
            let e = node * b + digit;
            if used[e] {
                continue;
            }
            used[e] = true;
            let next = (node % node_mod.max(1)) * b + digit;
            if completable(&used, b, nodes, next, remaining - 1) {
                seq.push(digit as u8);
                node = next;
                remaining -= 1;
                advanced = true;
                break;
            }
            used[e] = false;
        }
        if !advanced {
            return Err(Error::Internal(format!(
                "de Bruijn extension to order {order} found no continuation"
            )));
        }
    }
    Ok(seq)
}

/// Whether every unused edge is reachable from `start`. Degree balance is
/// preserved by construction, so reachability decides whether an Euler trail
/// over the unused edges starting at `start` exists.
fn completable(used: &[bool], b: usize, nodes: usize, start: usize, remaining: usize) -> bool {
    if remaining == 0 {
        return true;
    }
    let node_mod = (nodes / b).max(1);
    let mut seen = vec![false; nodes];
    let mut stack = vec![start];
    seen[start] = true;
    let mut reached = 0usize;
    while let Some(u) = stack.pop() {
        for d in 0..b {
            let e = u * b + d;
            if used[e] {
                continue;
            }
            reached += 1;
            let v = (u % node_mod) * b + d;
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    reached == remaining
}

fn checked_pow(base: u32, order: u32, cap: u64) -> Result<u64> {
    match u64::from(base).checked_pow(order) {
        Some(v) if v <= cap => Ok(v),
        _ => resource(format!(
            "de Bruijn order {order} in base {base} exceeds the cap of {cap} symbols"
        )),
    }
}
