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


//! Brute-force reference implementations used only by tests.
//!
//! None of these share code with the library; they trade speed for being
//! obviously correct.

#![allow(dead_code)]

use ucic_core::{IdcGraph, SideInfoGraph};

/// Row reduction over GF(2) on plain boolean rows.
pub fn naive_rank(rows: &[Vec<bool>]) -> usize {
    let mut m: Vec<Vec<bool>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| m[r][c]) else {
            continue;
        };
        m.swap(rank, p);
        for r in 0..m.len() {
            if r != rank && m[r][c] {
                let pivot = m[rank].clone();
                for (x, y) in m[r].iter_mut().zip(&pivot) {
                    *x ^= *y;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// minrk₂ by trying every assignment of the arc entries.
pub fn brute_minrk(g: &SideInfoGraph) -> usize {
    let verts = g.live().to_vec();
    let n = verts.len();
    let arcs: Vec<(usize, usize)> = g
        .arcs()
        .into_iter()
        .map(|(i, j)| {
            (
                verts.iter().position(|&v| v == i).unwrap(),
                verts.iter().position(|&v| v == j).unwrap(),
            )
        })
        .collect();
    assert!(arcs.len() <= 20, "brute force over {} arcs", arcs.len());
    let mut best = n;
    for mask in 0u64..(1u64 << arcs.len()) {
        let mut rows = vec![vec![false; n]; n];
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] = true;
        }
        for (b, &(i, j)) in arcs.iter().enumerate() {
            rows[i][j] = mask >> b & 1 == 1;
        }
        best = best.min(naive_rank(&rows));
    }
    best
}

fn is_clique(k: &IdcGraph, set: &[usize]) -> bool {
    set.iter()
        .enumerate()
        .all(|(a, &u)| set[a + 1..].iter().all(|&w| k.adjacent(u, w)))
}

/// φ(K) by enumerating every set partition of the live vertices.
pub fn brute_clique_partition(k: &IdcGraph) -> usize {
    fn go(k: &IdcGraph, verts: &[usize], at: usize, blocks: &mut Vec<Vec<usize>>, best: &mut usize) {
        if blocks.len() >= *best {
            return;
        }
        if at == verts.len() {
            *best = blocks.len();
            return;
        }
        let v = verts[at];
        for b in 0..blocks.len() {
            blocks[b].push(v);
            if is_clique(k, &blocks[b]) {
                go(k, verts, at + 1, blocks, best);
            }
            blocks[b].pop();
        }
        blocks.push(vec![v]);
        go(k, verts, at + 1, blocks, best);
        blocks.pop();
    }
    let verts = k.live().to_vec();
    let mut best = verts.len();
    go(k, &verts, 0, &mut Vec::new(), &mut best);
    best
}

/// ω(K) by scanning every vertex subset.
pub fn brute_clique_number(k: &IdcGraph) -> usize {
    let verts = k.live().to_vec();
    assert!(verts.len() <= 20);
    (0u32..(1 << verts.len()))
        .filter_map(|mask| {
            let set: Vec<usize> = (0..verts.len())
                .filter(|&b| mask >> b & 1 == 1)
                .map(|b| verts[b])
                .collect();
            is_clique(k, &set).then_some(set.len())
        })
        .max()
        .unwrap_or(0)
}
