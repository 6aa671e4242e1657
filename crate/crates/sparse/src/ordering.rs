//! Reverse Cuthill-McKee ordering.

use std::collections::VecDeque;

use crate::{CsrMatrix, Scalar};

/// Symmetric fill-reducing ordering applied before a factorization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FillOrdering {
    #[default]
    ReverseCuthillMcKee,
    Natural,
}

impl FillOrdering {
    pub fn permutation<T: Scalar>(self, a: &CsrMatrix<T>) -> Vec<usize> {
        match self {
            FillOrdering::ReverseCuthillMcKee => reverse_cuthill_mckee(a),
            FillOrdering::Natural => (0..a.nrows()).collect(),
        }
    }
}

/// Reverse Cuthill-McKee permutation of the symmetrized structure of `a`.
///
/// Returns a new-to-old map: position `i` of the reordered matrix holds the
/// original index `perm[i]`. Every connected component is started from a
/// pseudo-peripheral vertex of that component.
pub fn reverse_cuthill_mckee<T: Scalar>(a: &CsrMatrix<T>) -> Vec<usize> {
    rcm_from_adjacency(&a.adjacency())
}

pub fn rcm_from_adjacency(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut level = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    let mut nbrs = Vec::new();

    for start in 0..n {
        if visited[start] {
            continue;
        }
        let root = pseudo_peripheral(adj, &degree, start, &mut level);
        visited[root] = true;
        queue.push_back(root);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            nbrs.clear();
            nbrs.extend(adj[v].iter().copied().filter(|&w| !visited[w]));
            nbrs.sort_unstable_by_key(|&w| (degree[w], w));
            for &w in &nbrs {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

/// George-Liu pseudo-peripheral vertex search within the component of `start`.
fn pseudo_peripheral(
    adj: &[Vec<usize>],
    degree: &[usize],
    start: usize,
    level: &mut [usize],
) -> usize {
    let mut root = start;
    let (mut ecc, mut last) = bfs_levels(adj, root, level);
    loop {
        let cand = last
            .iter()
            .copied()
            .min_by_key(|&v| (degree[v], v))
            .unwrap_or(root);
        let (e2, l2) = bfs_levels(adj, cand, level);
        if e2 > ecc {
            root = cand;
            ecc = e2;
            last = l2;
        } else {
            return root;
        }
    }
}

/// Returns (eccentricity, vertices of the last level). Resets `level` for the
/// visited component afterwards.
fn bfs_levels(adj: &[Vec<usize>], root: usize, level: &mut [usize]) -> (usize, Vec<usize>) {
    let mut seen = vec![root];
    level[root] = 0;
    let mut head = 0;
    while head < seen.len() {
        let v = seen[head];
        head += 1;
        for &w in &adj[v] {
            if level[w] == usize::MAX {
                level[w] = level[v] + 1;
                seen.push(w);
            }
        }
    }
    let ecc = seen.iter().map(|&v| level[v]).max().unwrap_or(0);
    let last = seen.iter().copied().filter(|&v| level[v] == ecc).collect();
    for &v in &seen {
        level[v] = usize::MAX;
    }
    (ecc, last)
}

/// Inverse of a permutation given as a new-to-old map.
pub fn invert(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }
    inv
}

/// Half-bandwidth of `a` after applying `perm` symmetrically.
pub fn bandwidth<T: Scalar>(a: &CsrMatrix<T>, perm: &[usize]) -> usize {
    let inv = invert(perm);
    let mut bw = 0;
    for i in 0..a.nrows() {
        for &j in a.row(i).0 {
            bw = bw.max(inv[i].abs_diff(inv[j]));
        }
    }
    bw
}
