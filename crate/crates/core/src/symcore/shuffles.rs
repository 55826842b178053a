//! Block shuffle enumeration. A shuffle of blocks of sizes (n_1, ..., n_r)
//! is an assignment of the positions 0..n (n = sum n_i) to r disjoint
//! increasing sequences, the i-th of size n_i; the induced permutation sends
//! the k-th element of the i-th source block (consecutive ranges) to the k-th
//! smallest assigned position. Enumeration order is lexicographic in the
//! flattened assignment, so it is deterministic.

/// Number of shuffles: the multinomial coefficient (sum n_i)! / prod n_i!.
pub fn multinomial(sizes: &[usize]) -> u128 {
    let mut acc: u128 = 1;
    let mut seen: usize = 0;
    for &n in sizes {
        for k in 1..=n {
            seen += 1;
            acc = acc * seen as u128 / k as u128;
        }
    }
    acc
}

/// All assignments of 0..n into blocks of the given sizes. Each assignment
/// lists the blocks in order, each block sorted increasingly.
pub fn block_assignments(sizes: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let n: usize = sizes.iter().sum();
    let mut out = Vec::new();
    let mut current: Vec<Vec<usize>> = Vec::with_capacity(sizes.len());
    let mut free: Vec<usize> = (0..n).collect();
    assign(sizes, &mut free, &mut current, &mut out);
    out
}

fn assign(
    sizes: &[usize],
    free: &mut Vec<usize>,
    current: &mut Vec<Vec<usize>>,
    out: &mut Vec<Vec<Vec<usize>>>,
) {
    if sizes.is_empty() {
        out.push(current.clone());
        return;
    }
    let k = sizes[0];
    for combo in combinations(free, k) {
        let rest: Vec<usize> = free.iter().copied().filter(|x| !combo.contains(x)).collect();
        current.push(combo);
        let mut rest = rest;
        assign(&sizes[1..], &mut rest, current, out);
        current.pop();
    }
}

/// k-subsets of a sorted slice, in lexicographic order, each sorted.
fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let n = items.len();
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        // Rightmost index that can still advance.
        let mut i = k as isize - 1;
        while i >= 0 && idx[i as usize] == n - k + i as usize {
            i -= 1;
        }
        if i < 0 {
            return out;
        }
        let i = i as usize;
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Permutation (source position -> target position) induced by a block
/// assignment, with source blocks the consecutive ranges of the given sizes.
pub fn permutation_from_assignment(sizes: &[usize], blocks: &[Vec<usize>]) -> Vec<usize> {
    let n: usize = sizes.iter().sum();
    let mut perm = vec![0; n];
    let mut offset = 0;
    for (i, &sz) in sizes.iter().enumerate() {
        for k in 0..sz {
            perm[offset + k] = blocks[i][k];
        }
        offset += sz;
    }
    perm
}
