//! One-level restricted additive Schwarz with exact local LU solves.

use std::collections::VecDeque;
use std::io::Write;
use std::time::Instant;

use maxlab_sparse::{CsrMatrix, LuFactor, Scalar};

use super::SetupReport;
use crate::error::{Error, Result};
use crate::krylov::Preconditioner;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RasConfig {
    pub n_subdomains: usize,
    pub overlap: usize,
}

/// Greedy breadth-first partition into `parts` sets. Each set is grown from
/// the lowest unassigned vertex until it reaches its share; the first
/// `n % parts` sets receive one extra vertex so exactly `parts` sets result.
pub fn partition_graph<T: Scalar>(a: &CsrMatrix<T>, parts: usize) -> Result<Vec<Vec<usize>>> {
    let n = a.nrows();
    if parts == 0 || parts > n {
        return Err(Error::Config(format!("cannot split {n} unknowns into {parts} subdomains")));
    }
    let adj = a.adjacency();
    let mut assigned = vec![false; n];
    let mut next_seed = 0;
    let mut sets = Vec::with_capacity(parts);
    for p in 0..parts {
        let target = n / parts + usize::from(p < n % parts);
        let mut set = Vec::with_capacity(target);
        let mut queue = VecDeque::new();
        while set.len() < target {
            let v = match queue.pop_front() {
                Some(v) => v,
                None => {
                    while assigned[next_seed] {
                        next_seed += 1;
                    }
                    next_seed
                }
            };
            if assigned[v] {
                continue;
            }
            assigned[v] = true;
            set.push(v);
            queue.extend(adj[v].iter().copied().filter(|&w| !assigned[w]));
        }
        set.sort_unstable();
        sets.push(set);
    }
    Ok(sets)
}

/// Adds `delta` rings of graph neighbours to every set.
pub fn grow_overlap<T: Scalar>(a: &CsrMatrix<T>, core: &[Vec<usize>], delta: usize) -> Vec<Vec<usize>> {
    let adj = a.adjacency();
    let mut mark = vec![usize::MAX; a.nrows()];
    core.iter()
        .enumerate()
        .map(|(i, set)| {
            let mut out = set.clone();
            for &v in set {
                mark[v] = i;
            }
            let mut frontier = set.clone();
            for _ in 0..delta {
                let mut next = Vec::new();
                for &v in &frontier {
                    for &w in &adj[v] {
                        if mark[w] != i {
                            mark[w] = i;
                            next.push(w);
                        }
                    }
                }
                out.extend_from_slice(&next);
                frontier = next;
            }
            out.sort_unstable();
            out
        })
        .collect()
}

pub struct RasPreconditioner<T: Scalar> {
    n: usize,
    pub core: Vec<Vec<usize>>,
    pub overlapped: Vec<Vec<usize>>,
    factors: Vec<LuFactor<T>>,
    /// Per subdomain, `(local index, global index)` of its core unknowns.
    core_positions: Vec<Vec<(usize, usize)>>,
    pub report: SetupReport,
}

pub fn build_ras<T: Scalar>(a: &CsrMatrix<T>, cfg: &RasConfig) -> Result<RasPreconditioner<T>> {
    let start = Instant::now();
    let core = partition_graph(a, cfg.n_subdomains)?;
    let overlapped = grow_overlap(a, &core, cfg.overlap);
    let mut factors = Vec::with_capacity(core.len());
    let mut core_positions = Vec::with_capacity(core.len());
    for (i, (c, v)) in core.iter().zip(&overlapped).enumerate() {
        let local = a.submatrix(v, v);
        let f = LuFactor::factor(&local).map_err(|source| Error::SingularSubdomain { subdomain: i, source })?;
        factors.push(f);
        core_positions.push(
            c.iter()
                .map(|g| (v.binary_search(g).expect("core inside overlapped set"), *g))
                .collect(),
        );
    }
    let mut report = SetupReport::default();
    report.push("subdomains", core.len());
    report.push("overlap", cfg.overlap);
    report.push("max_local_size", overlapped.iter().map(Vec::len).max().unwrap_or(0));
    report.push("factor_nnz", factors.iter().map(LuFactor::nnz).sum::<usize>());
    report.setup_time = start.elapsed().as_secs_f64();
    Ok(RasPreconditioner { n: a.nrows(), core, overlapped, factors, core_positions, report })
}

impl<T: Scalar> RasPreconditioner<T> {
    /// `dof,subdomain` lines, one per unknown.
    pub fn write_partition_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let mut owner = vec![0; self.n];
        for (i, set) in self.core.iter().enumerate() {
            for &v in set {
                owner[v] = i;
            }
        }
        writeln!(out, "dof,subdomain")?;
        for (v, o) in owner.iter().enumerate() {
            writeln!(out, "{v},{o}")?;
        }
        Ok(())
    }
}

impl<T: Scalar> Preconditioner<T> for RasPreconditioner<T> {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, r: &[T], z: &mut [T]) {
        for ((set, f), pos) in self.overlapped.iter().zip(&self.factors).zip(&self.core_positions) {
            let mut local: Vec<T> = set.iter().map(|&g| r[g]).collect();
            let mut work = vec![T::zero(); set.len()];
            f.solve_in_place(&mut local, &mut work);
            for &(l, g) in pos {
                z[g] = local[l];
            }
        }
    }
}
