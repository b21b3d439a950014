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

//! Heuristic clique partitions of the IDC graph.
//!
//! Every heuristic is deterministic: ties go to the lowest vertex id or the
//! lowest clique index. Output cliques are sorted internally and ordered by
//! their smallest member.

use std::fmt;
use std::str::FromStr;

use petgraph::algo::maximum_matching;
use petgraph::graph::{NodeIndex, UnGraph};

use crate::bitset::VertexSet;
use crate::graph::IdcGraph;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct CliquePartition {
    cliques: Vec<Vec<usize>>,
}

impl CliquePartition {
    /// Normalizes member and clique order; performs no validity checks.
    pub fn new(mut cliques: Vec<Vec<usize>>) -> Self {
        for c in &mut cliques {
            c.sort_unstable();
        }
        cliques.sort();
        Self { cliques }
    }

    pub fn cliques(&self) -> &[Vec<usize>] {
        &self.cliques
    }

    /// Number of cliques r.
    pub fn len(&self) -> usize {
        self.cliques.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cliques.is_empty()
    }

    pub fn min_clique_size(&self) -> Option<usize> {
        self.cliques.iter().map(Vec::len).min()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PartitionViolation {
    EmptyClique { clique: usize },
    NotLive { vertex: usize },
    Overlap { vertex: usize, first: usize, second: usize },
    NotClique { clique: usize, u: usize, v: usize },
    Uncovered { vertex: usize },
}

impl fmt::Display for PartitionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::EmptyClique { clique } => write!(f, "clique #{clique} is empty"),
            Self::NotLive { vertex } => write!(f, "vertex {} is not in the graph", vertex + 1),
            Self::Overlap { vertex, first, second } => write!(
                f,
                "vertex {} appears in cliques #{first} and #{second}",
                vertex + 1
            ),
            Self::NotClique { clique, u, v } => write!(
                f,
                "clique #{clique} holds non-adjacent vertices {} and {}",
                u + 1,
                v + 1
            ),
            Self::Uncovered { vertex } => write!(f, "vertex {} is in no clique", vertex + 1),
        }
    }
}

/// Checks disjointness, coverage of the live set, and that every part is a
/// clique of `k`. At most one `NotClique` is reported per part.
pub fn verify_partition(k: &IdcGraph, p: &CliquePartition) -> Vec<PartitionViolation> {
    let mut out = Vec::new();
    let mut owner: Vec<Option<usize>> = vec![None; k.capacity()];
    for (ci, clique) in p.cliques().iter().enumerate() {
        if clique.is_empty() {
            out.push(PartitionViolation::EmptyClique { clique: ci });
        }
        for &v in clique {
            if v >= k.capacity() || !k.live().contains(v) {
                out.push(PartitionViolation::NotLive { vertex: v });
                continue;
            }
            match owner[v] {
                Some(first) if first != ci => out.push(PartitionViolation::Overlap {
                    vertex: v,
                    first,
                    second: ci,
                }),
                _ => owner[v] = Some(ci),
            }
        }
        let bad = clique.iter().enumerate().find_map(|(a, &u)| {
            clique[a + 1..]
                .iter()
                .find(|&&v| u < k.capacity() && v < k.capacity() && !k.adjacent(u, v))
                .map(|&v| (u, v))
        });
        if let Some((u, v)) = bad {
            out.push(PartitionViolation::NotClique { clique: ci, u, v });
        }
    }
    for v in k.live() {
        if owner[v].is_none() {
            out.push(PartitionViolation::Uncovered { vertex: v });
        }
    }
    out
}

/// A clique partitioner for the IDC graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Partitioner {
    Ldg,
    ColorSaving,
    Greedy,
}

impl Partitioner {
    pub const ALL: [Partitioner; 3] = [Partitioner::Ldg, Partitioner::ColorSaving, Partitioner::Greedy];

    pub fn name(self) -> &'static str {
        match self {
            Partitioner::Ldg => "ldg",
            Partitioner::ColorSaving => "color-saving",
            Partitioner::Greedy => "greedy",
        }
    }

    pub fn partition(self, k: &IdcGraph) -> CliquePartition {
        match self {
            Partitioner::Ldg => ldg_partition(k),
            Partitioner::ColorSaving => color_saving_partition(k),
            Partitioner::Greedy => greedy_partition(k),
        }
    }
}

impl fmt::Display for Partitioner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Partitioner {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Partitioner::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown partitioner `{s}` (expected ldg, color-saving, greedy)"))
    }
}

/// Least-difference greedy: vertices in ascending order join the open clique
/// whose common neighbourhood they keep largest.
///
/// A vertex `v` may join clique `Y` when it is adjacent to every member,
/// i.e. `v ∈ C(Y) = ⋂_{u∈Y} N(u)`. Among those, pick the `Y` maximizing
/// `|N(v) ∩ C(Y)|`; otherwise open a new singleton.
pub fn ldg_partition(k: &IdcGraph) -> CliquePartition {
    let mut cliques: Vec<(Vec<usize>, VertexSet)> = Vec::new();
    for v in k.live() {
        let nv = k.neighbors(v);
        let best = cliques
            .iter()
            .enumerate()
            .filter(|(_, (_, common))| common.contains(v))
            .map(|(ci, (_, common))| (nv.intersection_len(common), ci))
            .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
        match best {
            Some((_, ci)) => {
                let (members, common) = &mut cliques[ci];
                members.push(v);
                common.intersect_with(nv);
            }
            None => cliques.push((vec![v], nv.clone())),
        }
    }
    CliquePartition::new(cliques.into_iter().map(|(m, _)| m).collect())
}

/// Lowest unassigned vertex seeds a clique that grows by the lowest
/// compatible vertex until maximal.
pub fn greedy_partition(k: &IdcGraph) -> CliquePartition {
    let mut free = k.live().clone();
    let mut cliques = Vec::new();
    while let Some(seed) = free.first() {
        free.remove(seed);
        let mut clique = vec![seed];
        let mut cand = k.neighbors(seed).intersection(&free);
        while let Some(u) = cand.first() {
            clique.push(u);
            free.remove(u);
            cand.intersect_with(k.neighbors(u));
            cand.remove(u);
        }
        cliques.push(clique);
    }
    CliquePartition::new(cliques)
}

/// Color-saving style partition: peel large cliques, pair the rest with a
/// maximum matching, leave singletons last.
///
/// 1. While a clique of size ≥ 3 is found in the remainder (greedy build
///    from every seed, improved by (1,2)-swaps), extract the best one.
/// 2. Maximum matching on what is left; each matched edge is a 2-clique.
/// 3. Unmatched vertices become singletons.
pub fn color_saving_partition(k: &IdcGraph) -> CliquePartition {
    let mut rem = k.live().clone();
    let mut cliques = Vec::new();
    while let Some(best) = best_clique(k, &rem) {
        if best.len() < 3 {
            break;
        }
        for &v in &best {
            rem.remove(v);
        }
        cliques.push(best);
    }

    for (u, w) in pair_up(k, &rem) {
        rem.remove(u);
        rem.remove(w);
        cliques.push(vec![u, w]);
    }
    cliques.extend(rem.iter().map(|v| vec![v]));
    CliquePartition::new(cliques)
}

/// A maximum matching on `k` restricted to `rem`.
///
/// The lexicographic greedy matching is kept when it is already maximum;
/// otherwise the blossom result is used.
fn pair_up(k: &IdcGraph, rem: &VertexSet) -> Vec<(usize, usize)> {
    let mut free = rem.clone();
    let mut greedy = Vec::new();
    for u in rem {
        if !free.contains(u) {
            continue;
        }
        if let Some(w) = k.neighbors(u).intersection(&free).first() {
            free.remove(u);
            free.remove(w);
            greedy.push((u, w));
        }
    }

    let verts = rem.to_vec();
    let mut g: UnGraph<(), ()> = UnGraph::with_capacity(verts.len(), 0);
    let nodes: Vec<NodeIndex> = verts.iter().map(|_| g.add_node(())).collect();
    let pos = |v: usize| verts.binary_search(&v).expect("vertex in remainder");
    for (a, &u) in verts.iter().enumerate() {
        for w in k.neighbors(u).intersection(rem).iter().filter(|&w| w > u) {
            g.add_edge(nodes[a], nodes[pos(w)], ());
        }
    }
    let matching = maximum_matching(&g);
    if matching.len() == greedy.len() {
        return greedy;
    }
    matching
        .edges()
        .map(|(a, b)| {
            let (u, w) = (verts[a.index()], verts[b.index()]);
            (u.min(w), u.max(w))
        })
        .collect()
}

/// Largest clique found by greedy+swap from any seed in `within`; ties go to
/// the lexicographically smallest member list.
fn best_clique(k: &IdcGraph, within: &VertexSet) -> Option<Vec<usize>> {
    within
        .iter()
        .map(|seed| {
            let mut c = local_search_clique(k, within, seed);
            c.sort_unstable();
            c
        })
        .max_by(|a, b| a.len().cmp(&b.len()).then_with(|| b.cmp(a)))
}

fn local_search_clique(k: &IdcGraph, within: &VertexSet, seed: usize) -> Vec<usize> {
    let mut clique = vec![seed];
    let cand = k.neighbors(seed).intersection(within);
    grow_clique(k, &mut clique, cand);

    'improve: loop {
        for drop_at in 0..clique.len() {
            let mut rest = clique.clone();
            rest.remove(drop_at);
            let mut common = within.clone();
            for &w in &rest {
                common.intersect_with(k.neighbors(w));
            }
            for &w in &clique {
                common.remove(w);
            }
            for a in &common {
                let pair = k.neighbors(a).intersection(&common);
                if let Some(b) = pair.iter().find(|&b| b > a) {
                    let mut cand = common.intersection(k.neighbors(a));
                    cand.intersect_with(k.neighbors(b));
                    clique = rest;
                    clique.push(a);
                    clique.push(b);
                    grow_clique(k, &mut clique, cand);
                    continue 'improve;
                }
            }
        }
        break;
    }
    clique
}

/// Adds the candidate with most neighbours among the remaining candidates
/// (lowest id on ties) until no candidate is left.
fn grow_clique(k: &IdcGraph, clique: &mut Vec<usize>, mut cand: VertexSet) {
    for &w in clique.iter() {
        cand.remove(w);
    }
    while !cand.is_empty() {
        let u = cand
            .iter()
            .max_by(|&a, &b| {
                k.neighbors(a)
                    .intersection_len(&cand)
                    .cmp(&k.neighbors(b).intersection_len(&cand))
                    .then(b.cmp(&a))
            })
            .expect("non-empty candidates");
        clique.push(u);
        cand.intersect_with(k.neighbors(u));
    }
}
