// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Exact oracles for small instances.
//!
//! For a side-information graph G with IDC graph K these bracket the
//! optimal scalar-linear code length:
//!
//! ```text
//! ω(non-adjacency graph of G) ≤ minrk₂(G) ≤ φ(K)
//! ```
//!
//! All of them are exponential and guarded by size caps.

use std::fmt;

use thiserror::Error;

use crate::bitset::VertexSet;
use crate::graph::{IdcGraph, SideInfoGraph};
use crate::partition::CliquePartition;

pub const DEFAULT_MAX_FREE: usize = 24;
pub const DEFAULT_MAX_PARTITION_N: usize = 15;
pub const DEFAULT_MAX_CLIQUE_N: usize = 20;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("{what} is {size}, above the oracle cap of {cap}")]
    TooLarge {
        what: &'static str,
        size: usize,
        cap: usize,
    },
}

/// Dense matrix over GF(2), row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<VertexSet>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            cols,
            rows: vec![VertexSet::new(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(cols: usize, rows: &[Vec<bool>]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            for (j, &b) in row.iter().enumerate() {
                m.set(i, j, b);
            }
        }
        m
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn col_count(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].contains(j)
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        if value {
            self.rows[i].insert(j);
        } else {
            self.rows[i].remove(j);
        }
    }

    /// Rank over GF(2) by Gaussian elimination.
    pub fn rank(&self) -> usize {
        gf2_rank(self)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.rows {
            let line: Vec<&str> = (0..self.cols)
                .map(|j| if row.contains(j) { "1" } else { "0" })
                .collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

pub fn gf2_rank(m: &BitMatrix) -> usize {
    let mut rows = m.rows.clone();
    let mut rank = 0;
    for col in 0..m.cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r].contains(col)) else {
            continue;
        };
        rows.swap(rank, pivot);
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row.contains(col) {
                row.symmetric_difference_with(&pivot_row);
            }
        }
        rank += 1;
    }
    rank
}

/// A matrix fitting G: ones on the diagonal, zeros off the arcs, and a
/// chosen bit for every arc position.
///
/// Indices are positions within the live vertex list, not original ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FitMatrix {
    /// Original vertex id of each row/column.
    pub vertices: Vec<usize>,
    /// Arc positions `(row, col)`, row-major order.
    pub free_positions: Vec<(usize, usize)>,
    pub assignment: Vec<bool>,
}

impl FitMatrix {
    pub fn matrix(&self) -> BitMatrix {
        let n = self.vertices.len();
        let mut m = BitMatrix::identity(n);
        for (&(i, j), &b) in self.free_positions.iter().zip(&self.assignment) {
            m.set(i, j, b);
        }
        m
    }

    pub fn rank(&self) -> usize {
        self.matrix().rank()
    }
}

#[derive(Clone, Debug)]
pub struct MinRank {
    pub rank: usize,
    pub witness: FitMatrix,
}

/// minrk₂(G): the least GF(2) rank of any matrix fitting G.
///
/// The search fixes rows one at a time and keeps an echelon basis of the
/// rows chosen so far, so each branch knows its running rank. Branches whose
/// rank already reaches the best complete assignment are cut; the result is
/// the exact minimum over all `2^|E|` assignments.
pub fn minrk2(g: &SideInfoGraph, max_free: usize) -> Result<MinRank, OracleError> {
    let arcs = g.arc_count();
    if arcs > max_free {
        return Err(OracleError::TooLarge {
            what: "arc count",
            size: arcs,
            cap: max_free,
        });
    }
    let vertices = g.live().to_vec();
    let n = vertices.len();
    if n > 64 {
        return Err(OracleError::TooLarge {
            what: "vertex count",
            size: n,
            cap: 64,
        });
    }
    let pos = |v: usize| vertices.binary_search(&v).expect("live vertex");
    let free: Vec<Vec<usize>> = vertices
        .iter()
        .map(|&v| g.held(v).iter().map(pos).collect())
        .collect();

    let mut search = RankSearch {
        free: &free,
        best: n,
        best_choice: vec![0; n],
        choice: vec![0; n],
    };
    let mut basis = [0u64; 64];
    search.descend(0, 0, &mut basis);

    let mut free_positions = Vec::new();
    let mut assignment = Vec::new();
    for (i, cols) in free.iter().enumerate() {
        for (b, &j) in cols.iter().enumerate() {
            free_positions.push((i, j));
            assignment.push(search.best_choice[i] >> b & 1 == 1);
        }
    }
    Ok(MinRank {
        rank: search.best,
        witness: FitMatrix {
            vertices,
            free_positions,
            assignment,
        },
    })
}

struct RankSearch<'a> {
    free: &'a [Vec<usize>],
    best: usize,
    best_choice: Vec<u64>,
    choice: Vec<u64>,
}

impl RankSearch<'_> {
    fn descend(&mut self, row: usize, rank: usize, basis: &mut [u64; 64]) {
        if rank >= self.best {
            return;
        }
        if row == self.free.len() {
            self.best = rank;
            self.best_choice.clone_from(&self.choice);
            return;
        }
        let cols = &self.free[row];
        for mask in 0..1u64 << cols.len() {
            let mut v = 1u64 << row;
            for (b, &j) in cols.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    v |= 1 << j;
                }
            }
            self.choice[row] = mask;
            match reduce(basis, v) {
                None => self.descend(row + 1, rank, basis),
                Some((pivot, reduced)) => {
                    basis[pivot] = reduced;
                    self.descend(row + 1, rank + 1, basis);
                    basis[pivot] = 0;
                }
            }
            if rank >= self.best {
                return;
            }
        }
    }
}

/// Reduces `v` by the basis (indexed by highest set bit). Returns the free
/// pivot and reduced vector if `v` is independent.
fn reduce(basis: &[u64; 64], mut v: u64) -> Option<(usize, u64)> {
    while v != 0 {
        let p = 63 - v.leading_zeros() as usize;
        if basis[p] == 0 {
            return Some((p, v));
        }
        v ^= basis[p];
    }
    None
}

/// Exact minimum clique partition φ(K) by dynamic programming over subsets
/// of the live vertices.
pub fn exact_clique_partition(
    k: &IdcGraph,
    max_n: usize,
) -> Result<CliquePartition, OracleError> {
    let vertices = k.live().to_vec();
    let n = vertices.len();
    if n > max_n || n > 30 {
        return Err(OracleError::TooLarge {
            what: "vertex count",
            size: n,
            cap: max_n.min(30),
        });
    }
    let full = (1usize << n) - 1;
    let adj: Vec<usize> = vertices
        .iter()
        .map(|&u| {
            vertices
                .iter()
                .enumerate()
                .filter(|&(_, &w)| k.adjacent(u, w))
                .fold(0, |m, (b, _)| m | 1 << b)
        })
        .collect();
    let mut is_clique = vec![false; full + 1];
    is_clique[0] = true;
    for mask in 1..=full {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        is_clique[mask] = is_clique[rest] && rest & !adj[low] == 0;
    }

    let mut dp = vec![u8::MAX; full + 1];
    let mut pick = vec![0usize; full + 1];
    dp[0] = 0;
    for mask in 1..=full {
        let low = mask & mask.wrapping_neg();
        let rest = mask ^ low;
        let mut sub = rest;
        loop {
            let c = sub | low;
            if is_clique[c] && dp[mask ^ c] + 1 < dp[mask] {
                dp[mask] = dp[mask ^ c] + 1;
                pick[mask] = c;
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }

    let mut cliques = Vec::new();
    let mut mask = full;
    while mask != 0 {
        let c = pick[mask];
        cliques.push(
            (0..n)
                .filter(|&b| c >> b & 1 == 1)
                .map(|b| vertices[b])
                .collect(),
        );
        mask ^= c;
    }
    Ok(CliquePartition::new(cliques))
}

/// Maximum clique of `k` by branch and bound; returns its sorted members.
pub fn clique_number(k: &IdcGraph, max_n: usize) -> Result<Vec<usize>, OracleError> {
    let n = k.vertex_count();
    if n > max_n {
        return Err(OracleError::TooLarge {
            what: "vertex count",
            size: n,
            cap: max_n,
        });
    }
    let mut best = Vec::new();
    let mut current = Vec::new();
    expand_clique(k, &mut current, k.live().clone(), &mut best);
    best.sort_unstable();
    Ok(best)
}

fn expand_clique(k: &IdcGraph, current: &mut Vec<usize>, mut cand: VertexSet, best: &mut Vec<usize>) {
    if cand.is_empty() {
        if current.len() > best.len() {
            best.clone_from(current);
        }
        return;
    }
    while let Some(v) = cand.first() {
        if current.len() + cand.len() <= best.len() {
            return;
        }
        current.push(v);
        expand_clique(k, current, cand.intersection(k.neighbors(v)), best);
        current.pop();
        cand.remove(v);
    }
    if current.len() > best.len() {
        best.clone_from(current);
    }
}

/// Undirected graph on the live vertices of G with an edge wherever G has no
/// arc in either direction.
///
/// A clique here is an independent set of G's underlying graph, which
/// induces an acyclic subgraph; no linear code can serve those clients
/// with fewer transmissions than their number.
pub fn non_adjacency_graph(g: &SideInfoGraph) -> IdcGraph {
    let live = g.live().to_vec();
    let mut edges = Vec::new();
    for (a, &i) in live.iter().enumerate() {
        for &j in &live[a + 1..] {
            if !g.has_arc(i, j) && !g.has_arc(j, i) {
                edges.push((i, j));
            }
        }
    }
    IdcGraph::from_edges(g.capacity(), edges).restricted_to(g.live())
}

/// Lower bound ω on minrk₂(G), with a witnessing vertex set.
pub fn omega_lower_bound(g: &SideInfoGraph, max_n: usize) -> Result<Vec<usize>, OracleError> {
    clique_number(&non_adjacency_graph(g), max_n)
}
