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

//! Graph views of an instance.
//!
//! * [`SideInfoGraph`] (G): arc `i → j` iff client `i` holds symbol `j`.
//! * [`IdcGraph`] (K): undirected, edge `{i, j}` iff both arcs exist in G,
//!   i.e. `p_i ⊕ p_j` is instantly decodable by both clients.
//! * [`InfoFlowGraph`] (I): for single-uniprior instances, vertex `v`
//!   stands for the client holding `p_v`; arc `i → j` iff that client wants
//!   `p_i`.
//!
//! Vertices keep their original ids for the lifetime of a graph; pruning
//! only shrinks the live set.

use std::fmt::Write as _;

use thiserror::Error;

use crate::bitset::VertexSet;
use crate::instance::{symbol_name, ClientId, Instance, SymbolId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("instance is not single-unicast (need k = n and W_i = {{p_i}})")]
    NotSingleUnicast,
    #[error("instance is not single-uniprior (need distinct singleton has sets)")]
    NotSingleUniprior,
    #[error("vertex {} is not live in the graph", symbol_name(*.0))]
    UnknownVertex(usize),
}

/// Directed graph over a fixed id space with a live-vertex subset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    live: VertexSet,
    out: Vec<VertexSet>,
}

impl Digraph {
    pub fn new(n: usize) -> Self {
        Self {
            live: VertexSet::full(n),
            out: vec![VertexSet::new(n); n],
        }
    }

    /// Self-arcs are ignored.
    pub fn from_arcs<I: IntoIterator<Item = (usize, usize)>>(n: usize, arcs: I) -> Self {
        let mut g = Self::new(n);
        for (i, j) in arcs {
            g.add_arc(i, j);
        }
        g
    }

    /// Size of the id space (live or not).
    pub fn capacity(&self) -> usize {
        self.out.len()
    }

    pub fn live(&self) -> &VertexSet {
        &self.live
    }

    pub fn vertex_count(&self) -> usize {
        self.live.len()
    }

    pub fn add_arc(&mut self, i: usize, j: usize) {
        if i != j {
            self.out[i].insert(j);
        }
    }

    pub fn has_arc(&self, i: usize, j: usize) -> bool {
        self.out[i].contains(j)
    }

    pub fn successors(&self, v: usize) -> &VertexSet {
        &self.out[v]
    }

    pub fn arc_count(&self) -> usize {
        self.live.iter().map(|v| self.out[v].len()).sum()
    }

    /// Arcs in lexicographic order.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        self.live
            .iter()
            .flat_map(|i| self.out[i].iter().map(move |j| (i, j)))
            .collect()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.live.iter().filter(|&u| self.out[u].contains(v)).count()
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out[v].len()
    }

    fn remove_vertex(&mut self, v: usize) {
        self.live.remove(v);
        self.out[v].clear();
        for row in &mut self.out {
            row.remove(v);
        }
    }

    fn to_dot(&self, name: &str) -> String {
        let mut s = format!("digraph {name} {{\n");
        for v in &self.live {
            let _ = writeln!(s, "  {};", symbol_name(v));
        }
        for (i, j) in self.arcs() {
            let _ = writeln!(s, "  {} -> {};", symbol_name(i), symbol_name(j));
        }
        s.push_str("}\n");
        s
    }
}

/// Side-information digraph G.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SideInfoGraph {
    graph: Digraph,
}

impl SideInfoGraph {
    /// Requires a single-unicast instance; has-set entries outside `0..n` are
    /// not representable and must be rejected by validation beforehand.
    pub fn from_instance(inst: &Instance) -> Result<Self, GraphError> {
        if !inst.is_single_unicast() {
            return Err(GraphError::NotSingleUnicast);
        }
        let n = inst.n();
        let arcs = inst
            .clients
            .iter()
            .enumerate()
            .flat_map(|(i, c)| c.has.iter().filter(move |&&j| j < n).map(move |&j| (i, j)));
        Ok(Self {
            graph: Digraph::from_arcs(n, arcs),
        })
    }

    pub fn from_arcs<I: IntoIterator<Item = (usize, usize)>>(n: usize, arcs: I) -> Self {
        Self {
            graph: Digraph::from_arcs(n, arcs),
        }
    }

    pub fn digraph(&self) -> &Digraph {
        &self.graph
    }

    pub fn capacity(&self) -> usize {
        self.graph.capacity()
    }

    pub fn live(&self) -> &VertexSet {
        self.graph.live()
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn has_arc(&self, i: usize, j: usize) -> bool {
        self.graph.has_arc(i, j)
    }

    /// Symbols client `v` holds, restricted to live vertices.
    pub fn held(&self, v: usize) -> &VertexSet {
        self.graph.successors(v)
    }

    pub fn arc_count(&self) -> usize {
        self.graph.arc_count()
    }

    pub fn arcs(&self) -> Vec<(usize, usize)> {
        self.graph.arcs()
    }

    pub fn add_arc(&mut self, i: usize, j: usize) {
        self.graph.add_arc(i, j);
    }

    /// IDC graph K: mutual arcs become undirected edges.
    pub fn idc_graph(&self) -> IdcGraph {
        let n = self.capacity();
        let mut adj = vec![VertexSet::new(n); n];
        for i in self.live() {
            for j in self.graph.successors(i) {
                if j > i && self.graph.has_arc(j, i) {
                    adj[i].insert(j);
                    adj[j].insert(i);
                }
            }
        }
        IdcGraph {
            live: self.live().clone(),
            adj,
        }
    }

    /// Prunes `satisfied` and records cache gains: each `(m, i)` adds the
    /// arc `m → i` because client `m` now holds `p_i`.
    pub fn apply_transmission(
        &self,
        satisfied: &VertexSet,
        cache_updates: &[(ClientId, SymbolId)],
    ) -> Result<Self, GraphError> {
        if let Some(v) = satisfied.iter().find(|&v| !self.live().contains(v)) {
            return Err(GraphError::UnknownVertex(v));
        }
        let mut next = self.clone();
        for v in satisfied {
            next.graph.remove_vertex(v);
        }
        for &(m, i) in cache_updates {
            for v in [m, i] {
                if !next.live().contains(v) {
                    return Err(GraphError::UnknownVertex(v));
                }
            }
            next.graph.add_arc(m, i);
        }
        Ok(next)
    }

    pub fn to_dot(&self) -> String {
        self.graph.to_dot("G")
    }
}

/// IDC graph K (undirected, no self-loops).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdcGraph {
    live: VertexSet,
    adj: Vec<VertexSet>,
}

impl IdcGraph {
    pub fn edgeless(n: usize) -> Self {
        Self {
            live: VertexSet::full(n),
            adj: vec![VertexSet::new(n); n],
        }
    }

    pub fn complete(n: usize) -> Self {
        Self::edgeless(n).complement()
    }

    /// Self-loops are ignored.
    pub fn from_edges<I: IntoIterator<Item = (usize, usize)>>(n: usize, edges: I) -> Self {
        let mut g = Self::edgeless(n);
        for (i, j) in edges {
            if i != j {
                g.adj[i].insert(j);
                g.adj[j].insert(i);
            }
        }
        g
    }

    pub fn capacity(&self) -> usize {
        self.adj.len()
    }

    pub fn live(&self) -> &VertexSet {
        &self.live
    }

    pub fn vertex_count(&self) -> usize {
        self.live.len()
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adj[i].contains(j)
    }

    pub fn neighbors(&self, v: usize) -> &VertexSet {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn edge_count(&self) -> usize {
        self.live.iter().map(|v| self.adj[v].len()).sum::<usize>() / 2
    }

    /// Edges `(i, j)` with `i < j`, lexicographic.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.live
            .iter()
            .flat_map(|i| self.adj[i].iter().filter(move |&j| j > i).map(move |j| (i, j)))
            .collect()
    }

    /// Complement over the live vertices.
    pub fn complement(&self) -> Self {
        let adj = (0..self.capacity())
            .map(|v| {
                if self.live.contains(v) {
                    let mut row = self.live.difference(&self.adj[v]);
                    row.remove(v);
                    row
                } else {
                    VertexSet::new(self.capacity())
                }
            })
            .collect();
        Self {
            live: self.live.clone(),
            adj,
        }
    }

    /// Drops every vertex outside `keep` along with its edges.
    pub fn restricted_to(&self, keep: &VertexSet) -> Self {
        let live = self.live.intersection(keep);
        let adj = self
            .adj
            .iter()
            .enumerate()
            .map(|(v, row)| {
                if live.contains(v) {
                    row.intersection(&live)
                } else {
                    VertexSet::new(self.capacity())
                }
            })
            .collect();
        Self { live, adj }
    }

    /// Every pair of members is adjacent (empty and singleton sets count).
    pub fn is_clique(&self, set: &VertexSet) -> bool {
        set.iter().all(|v| {
            let mut others = set.clone();
            others.remove(v);
            others.is_subset(&self.adj[v])
        })
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph K {\n");
        for v in &self.live {
            let _ = writeln!(s, "  {};", symbol_name(v));
        }
        for (i, j) in self.edges() {
            let _ = writeln!(s, "  {} -- {};", symbol_name(i), symbol_name(j));
        }
        s.push_str("}\n");
        s
    }
}

/// Information-flow digraph I of a single-uniprior instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfoFlowGraph {
    graph: Digraph,
}

impl InfoFlowGraph {
    /// Requires every has set to be a singleton and no symbol to be held
    /// twice. Want sets are unrestricted.
    pub fn from_instance(inst: &Instance) -> Result<Self, GraphError> {
        let mut holder = vec![None; inst.k];
        for (c, client) in inst.clients.iter().enumerate() {
            let prior = match client.has.iter().collect::<Vec<_>>()[..] {
                [&p] if p < inst.k => p,
                _ => return Err(GraphError::NotSingleUniprior),
            };
            if holder[prior].replace(c).is_some() {
                return Err(GraphError::NotSingleUniprior);
            }
        }
        let mut graph = Digraph::new(inst.k);
        for client in &inst.clients {
            let prior = *client.has.first().expect("checked singleton");
            for &w in client.want.iter().filter(|&&w| w < inst.k) {
                graph.add_arc(w, prior);
            }
        }
        Ok(Self { graph })
    }

    pub fn digraph(&self) -> &Digraph {
        &self.graph
    }
}

/// Strongly connected components, ordered by smallest member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SccDecomposition {
    /// Each component sorted ascending.
    pub components: Vec<Vec<usize>>,
    /// Component index of each id; `None` for vertices that are not live.
    pub component_of: Vec<Option<usize>>,
}

impl SccDecomposition {
    /// Components that form a chordless directed cycle: at least two
    /// vertices, each with exactly one successor inside the component.
    pub fn cycle_count(&self, g: &Digraph) -> usize {
        self.components
            .iter()
            .filter(|comp| is_chordless_cycle(g, comp))
            .count()
    }
}

pub fn is_chordless_cycle(g: &Digraph, comp: &[usize]) -> bool {
    if comp.len() < 2 {
        return false;
    }
    let members = VertexSet::from_ids(g.capacity(), comp.iter().copied());
    comp.iter()
        .all(|&v| g.successors(v).intersection_len(&members) == 1)
        && comp
            .iter()
            .all(|&v| comp.iter().filter(|&&u| g.has_arc(u, v)).count() == 1)
}

/// Tarjan's algorithm, iterative, over the live vertices.
pub fn scc_decompose(g: &Digraph) -> SccDecomposition {
    const UNSEEN: usize = usize::MAX;
    let n = g.capacity();
    let succ: Vec<Vec<usize>> = (0..n)
        .map(|v| g.successors(v).intersection(g.live()).to_vec())
        .collect();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut raw: Vec<Vec<usize>> = Vec::new();

    for root in g.live() {
        if index[root] != UNSEEN {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if let Some(&w) = succ[v].get(*pos) {
                *pos += 1;
                if index[w] == UNSEEN {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                raw.push(comp);
            }
        }
    }

    raw.sort_by_key(|c| c[0]);
    let mut component_of = vec![None; n];
    for (ci, comp) in raw.iter().enumerate() {
        for &v in comp {
            component_of[v] = Some(ci);
        }
    }
    SccDecomposition {
        components: raw,
        component_of,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{fixture, Fixture};

    fn one_based(arcs: &[(usize, usize)]) -> Vec<(usize, usize)> {
        arcs.iter().map(|&(i, j)| (i + 1, j + 1)).collect()
    }

    #[test]
    fn motivating_side_info_graph() {
        let g = SideInfoGraph::from_instance(&fixture(Fixture::Motivating)).unwrap();
        assert_eq!(
            one_based(&g.arcs()),
            vec![(1, 2), (2, 3), (2, 4), (3, 1), (3, 4), (4, 1), (4, 5), (5, 2), (5, 3)]
        );
        assert_eq!(g.idc_graph().edge_count(), 0);
    }

    #[test]
    fn edgeless_and_alice_bob() {
        let g = SideInfoGraph::from_instance(&Instance::single_unicast(vec![Vec::new(); 4]))
            .unwrap();
        assert_eq!(g.arc_count(), 0);
        let g = SideInfoGraph::from_instance(&fixture(Fixture::AliceBob)).unwrap();
        assert_eq!(one_based(&g.arcs()), vec![(1, 2), (2, 1)]);
        assert_eq!(g.idc_graph().edges(), vec![(0, 1)]);
    }

    #[test]
    fn rejects_non_single_unicast() {
        let inst = Instance::new(2, vec![crate::instance::Client::new([], [0, 1])]);
        assert_eq!(
            SideInfoGraph::from_instance(&inst),
            Err(GraphError::NotSingleUnicast)
        );
    }

    #[test]
    fn transmission_on_motivating_example() {
        let g = SideInfoGraph::from_instance(&fixture(Fixture::Motivating)).unwrap();
        let g1 = g
            .apply_transmission(&VertexSet::from_ids(5, [0]), &[(2, 1), (3, 1)])
            .unwrap();
        assert_eq!(g1.vertex_count(), 4);
        assert_eq!(
            one_based(&g1.arcs()),
            vec![(2, 3), (2, 4), (3, 2), (3, 4), (4, 2), (4, 5), (5, 2), (5, 3)]
        );
        assert_eq!(g1.idc_graph().edges(), vec![(1, 2), (1, 3)]);

        // Second round: c5 satisfied, c4 gains p3 -> arc (v4, v3).
        let g2 = g1
            .apply_transmission(&VertexSet::from_ids(5, [4]), &[(3, 2)])
            .unwrap();
        let k2 = g2.idc_graph();
        assert_eq!(k2.live().to_vec(), vec![1, 2, 3]);
        assert!(k2.is_clique(k2.live()));
    }

    #[test]
    fn transmission_identity_and_errors() {
        let g = SideInfoGraph::from_instance(&fixture(Fixture::Motivating)).unwrap();
        assert_eq!(g.apply_transmission(&VertexSet::new(5), &[]).unwrap(), g);
        let g1 = g.apply_transmission(&VertexSet::from_ids(5, [0]), &[]).unwrap();
        assert_eq!(
            g1.apply_transmission(&VertexSet::from_ids(5, [0]), &[]),
            Err(GraphError::UnknownVertex(0))
        );
        assert_eq!(
            g.apply_transmission(&VertexSet::from_ids(5, [0]), &[(2, 0)]),
            Err(GraphError::UnknownVertex(0))
        );
    }

    #[test]
    fn complement_basics() {
        assert_eq!(IdcGraph::complete(4).complement().edge_count(), 0);
        assert_eq!(IdcGraph::edgeless(5).complement().edge_count(), 10);
        let mut k = SideInfoGraph::from_instance(&fixture(Fixture::Motivating))
            .unwrap()
            .apply_transmission(&VertexSet::from_ids(5, [0]), &[(2, 1), (3, 1)])
            .unwrap()
            .idc_graph();
        k = k.complement();
        // Dead vertex 0 stays isolated.
        assert!(k.neighbors(0).is_empty());
        assert_eq!(k.edge_count(), 6 - 2);
    }

    #[test]
    fn scc_of_permutation() {
        // (1 2 3)(4 5), 0-based.
        let g = Digraph::from_arcs(5, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 3)]);
        let scc = scc_decompose(&g);
        assert_eq!(scc.components, vec![vec![0, 1, 2], vec![3, 4]]);
        assert_eq!(scc.cycle_count(&g), 2);
    }

    #[test]
    fn scc_of_chain() {
        let g = Digraph::from_arcs(3, [(0, 1), (1, 2)]);
        let scc = scc_decompose(&g);
        assert_eq!(scc.components, vec![vec![0], vec![1], vec![2]]);
        assert_eq!(scc.cycle_count(&g), 0);
    }

    #[test]
    fn info_flow_of_uniprior() {
        // H_i = {p_{pi(i)}} with pi = (1 2 3)(4 5).
        let inst = Instance::single_unicast(vec![vec![1], vec![2], vec![0], vec![4], vec![3]]);
        let i = InfoFlowGraph::from_instance(&inst).unwrap();
        let g = i.digraph();
        for v in 0..5 {
            assert_eq!(g.in_degree(v), 1);
            assert_eq!(g.out_degree(v), 1);
        }
        let scc = scc_decompose(g);
        assert_eq!(scc.components.len(), 2);
        assert_eq!(scc.cycle_count(g), 2);

        let bad = Instance::single_unicast(vec![vec![1], vec![0, 2], vec![0]]);
        assert_eq!(
            InfoFlowGraph::from_instance(&bad),
            Err(GraphError::NotSingleUniprior)
        );
    }

    #[test]
    fn dot_export_uses_symbol_names() {
        let g = SideInfoGraph::from_instance(&fixture(Fixture::AliceBob)).unwrap();
        assert!(g.to_dot().contains("p1 -> p2;"));
        assert!(g.idc_graph().to_dot().contains("p1 -- p2;"));
    }
}
