//! Partition combinatorics and symmetric-group character values.
//!
//! Irreducible characters of symmetric groups are computed with the
//! Murnaghan-Nakayama recursion on beta-sets; values are exact integers.

use std::collections::HashMap;

/// All partitions of `n` with parts descending, ordered reverse
/// lexicographically: `(n)` first, `(1,...,1)` last.
pub fn partitions(n: u64) -> Vec<Vec<u64>> {
    fn rec(remaining: u64, max_part: u64, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if remaining == 0 {
            out.push(prefix.clone());
            return;
        }
        let top = max_part.min(remaining);
        for part in (1..=top).rev() {
            prefix.push(part);
            rec(remaining - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n.max(1), &mut Vec::new(), &mut out);
    if n == 0 {
        return vec![vec![]];
    }
    out
}

/// Canonical bracketed label, e.g. `[3,1,1]`; the empty partition is `[]`.
pub fn partition_label(parts: &[u64]) -> String {
    let inner: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
    format!("[{}]", inner.join(","))
}

pub fn factorial(n: u64) -> u64 {
    (1..=n).product::<u64>().max(1)
}

/// Size of the conjugacy class with cycle type `mu` inside S_n, i.e.
/// n! / z_mu with z_mu the product of i^(m_i) m_i! over part sizes.
pub fn symmetric_class_size(n: u64, mu: &[u64]) -> u64 {
    debug_assert_eq!(mu.iter().sum::<u64>(), n);
    let mut z: u128 = 1;
    let mut mult: HashMap<u64, u64> = HashMap::new();
    for &p in mu {
        *mult.entry(p).or_insert(0) += 1;
    }
    for (p, m) in mult {
        z *= (p as u128).pow(m as u32) * factorial(m) as u128;
    }
    (factorial(n) as u128 / z) as u64
}

fn beta_set(lambda: &[u64]) -> Vec<u64> {
    // Ascending distinct beta numbers lambda_i + (len - i), 1-indexed rows.
    let l = lambda.len() as u64;
    let mut b: Vec<u64> = lambda
        .iter()
        .enumerate()
        .map(|(i, &p)| p + (l - 1 - i as u64))
        .collect();
    b.sort_unstable();
    b
}

fn partition_from_beta(mut beta: Vec<u64>) -> Vec<u64> {
    beta.sort_unstable();
    let mut parts: Vec<u64> = beta
        .iter()
        .enumerate()
        .map(|(i, &b)| b - i as u64)
        .filter(|&p| p > 0)
        .collect();
    parts.reverse();
    parts
}

/// Murnaghan-Nakayama value of the irreducible character labeled `lambda`
/// on the class of cycle type `mu` (both partitions of the same n).
pub fn mn_character(lambda: &[u64], mu: &[u64]) -> i64 {
    assert_eq!(
        lambda.iter().sum::<u64>(),
        mu.iter().sum::<u64>(),
        "character label and class type must partition the same n"
    );
    let mut memo = HashMap::new();
    mn_rec(lambda, mu, &mut memo)
}

fn mn_rec(lambda: &[u64], mu: &[u64], memo: &mut HashMap<(Vec<u64>, Vec<u64>), i64>) -> i64 {
    if mu.is_empty() {
        return 1;
    }
    let key = (lambda.to_vec(), mu.to_vec());
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let k = mu[0];
    let rest = &mu[1..];
    let beta = beta_set(lambda);
    let mut total = 0i64;
    for (pos, &b) in beta.iter().enumerate() {
        if b < k || beta.binary_search(&(b - k)).is_ok() {
            continue;
        }
        // Height of the strip: beta entries strictly between b-k and b.
        let height = beta[..pos].iter().filter(|&&x| x > b - k).count();
        let mut nb = beta.clone();
        nb[pos] = b - k;
        let sub = partition_from_beta(nb);
        let sign = if height % 2 == 0 { 1 } else { -1 };
        total += sign * mn_rec(&sub, rest, memo);
    }
    memo.insert(key, total);
    total
}

/// All permutations of 0..n as image arrays, in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // Next lexicographic permutation.
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).expect("successor exists");
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
    out
}

/// Composition acting left-to-right on points: `(p then q)(i) = q[p[i]]`.
pub fn perm_then(p: &[usize], q: &[usize]) -> Vec<usize> {
    p.iter().map(|&i| q[i]).collect()
}

pub fn perm_inverse(p: &[usize]) -> Vec<usize> {
    let mut out = vec![0; p.len()];
    for (i, &pi) in p.iter().enumerate() {
        out[pi] = i;
    }
    out
}

/// Cycle type as a descending partition.
pub fn cycle_type(p: &[usize]) -> Vec<u64> {
    let mut seen = vec![false; p.len()];
    let mut parts = Vec::new();
    for start in 0..p.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0u64;
        let mut cur = start;
        while !seen[cur] {
            seen[cur] = true;
            cur = p[cur];
            len += 1;
        }
        parts.push(len);
    }
    parts.sort_unstable_by(|a, b| b.cmp(a));
    parts
}

pub fn perm_sign(p: &[usize]) -> i64 {
    let transpositions: u64 = cycle_type(p).iter().map(|c| c - 1).sum();
    if transpositions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// The permutation with the given cycle type on 0..n, using consecutive
/// points: e.g. type [3,2] on 5 points is (0 1 2)(3 4).
pub fn rep_of_cycle_type(n: u64, mu: &[u64]) -> Vec<usize> {
    debug_assert_eq!(mu.iter().sum::<u64>(), n);
    let mut out: Vec<usize> = (0..n as usize).collect();
    let mut base = 0usize;
    for &part in mu {
        let p = part as usize;
        for i in 0..p {
            out[base + i] = base + (i + 1) % p;
        }
        base += p;
    }
    out
}
