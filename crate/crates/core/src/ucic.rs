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

//! The UCIC loop: clique partition plus one piggybacked symbol per round.
//!
//! Each round rebuilds K from the current side-information graph,
//! partitions it, and looks among the minimum-size cliques for a
//! piggyback symbol that lets extra clients grow their caches. When no
//! such pair exists the remaining partition is sent as-is and the loop
//! stops.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::bitset::VertexSet;
use crate::code::{CodedSymbol, IndexCode};
use crate::graph::{GraphError, IdcGraph, SideInfoGraph};
use crate::instance::{join_violations, symbol_name, ClientId, Instance, SymbolId, Violation};
use crate::partition::{CliquePartition, Partitioner};

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("invalid instance: {}", join_violations(.0))]
    InvalidInstance(Vec<Violation>),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Order among equal-gain `(clique, piggyback)` pairs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TieBreak {
    /// Lowest clique, then lowest piggyback.
    #[default]
    CliqueFirst,
    /// Lowest piggyback, then lowest clique.
    PiggybackFirst,
}

impl TieBreak {
    pub const ALL: [TieBreak; 2] = [TieBreak::CliqueFirst, TieBreak::PiggybackFirst];

    pub fn name(self) -> &'static str {
        match self {
            TieBreak::CliqueFirst => "clique-first",
            TieBreak::PiggybackFirst => "piggyback-first",
        }
    }
}

impl FromStr for TieBreak {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| format!("unknown tie-break `{s}` (expected clique-first or piggyback-first)"))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolveConfig {
    /// When no minimum clique admits a gaining piggyback, send one minimum
    /// clique plain and keep looping instead of flushing the partition.
    pub continue_after_fallback: bool,
    pub tie_break: TieBreak,
    /// Literal re-partitioning: always use the fresh partition, even when
    /// the previous round's leftover cliques are fewer.
    pub fresh_partition_only: bool,
}

/// Outcome of the piggyback search for one clique.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piggyback {
    pub symbol: SymbolId,
    /// Clients that decode `symbol` from the transmission.
    pub gaining: Vec<ClientId>,
}

impl Piggyback {
    pub fn gain(&self) -> usize {
        self.gaining.len()
    }
}

/// Best piggyback for `clique`, lowest symbol id among equal gains.
///
/// A candidate must be live, outside the clique, and held by every clique
/// member. Gain may be zero; `None` means there is no candidate at all.
pub fn greedy_search(g: &SideInfoGraph, clique: &VertexSet) -> Option<Piggyback> {
    let mut candidates = g.live().difference(clique);
    for j in clique {
        candidates.intersect_with(g.held(j));
    }
    let holders: Vec<ClientId> = g
        .live()
        .iter()
        .filter(|&m| !clique.contains(m) && clique.is_subset(g.held(m)))
        .collect();
    let mut best: Option<Piggyback> = None;
    for i in &candidates {
        let gaining: Vec<ClientId> = holders
            .iter()
            .copied()
            .filter(|&m| m != i && !g.held(m).contains(i))
            .collect();
        if best.as_ref().is_none_or(|b| gaining.len() > b.gain()) {
            best = Some(Piggyback { symbol: i, gaining });
        }
    }
    best
}

/// Picks the pair with maximum gain; `None` unless some gain is positive.
///
/// `results[b]` belongs to `beta[b]`, and `beta` is in lexicographic order.
pub fn select_best_pair(
    beta: &[Vec<usize>],
    results: &[Option<Piggyback>],
    tie_break: TieBreak,
) -> Option<usize> {
    debug_assert_eq!(beta.len(), results.len());
    let mut best: Option<(usize, usize, SymbolId)> = None;
    for (b, r) in results.iter().enumerate() {
        let Some(p) = r.as_ref().filter(|p| p.gain() > 0) else {
            continue;
        };
        let better = match best {
            None => true,
            Some((_, gain, sym)) => {
                p.gain() > gain
                    || (p.gain() == gain
                        && tie_break == TieBreak::PiggybackFirst
                        && p.symbol < sym)
            }
        };
        if better {
            best = Some((b, p.gain(), p.symbol));
        }
    }
    best.map(|(b, _, _)| b)
}

/// One plain transmission per clique.
pub fn fallback_emit(partition: &CliquePartition) -> Vec<CodedSymbol> {
    partition
        .cliques()
        .iter()
        .filter_map(|c| CodedSymbol::new(c.iter().copied()))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IterationRecord {
    /// Transmitted clique; for a fallback flush, every vertex that was left.
    pub chosen_clique: Vec<usize>,
    pub piggyback: Option<SymbolId>,
    pub satisfied: Vec<ClientId>,
    pub cache_gains: Vec<(ClientId, SymbolId)>,
    /// Size r of this round's partition.
    pub partition_size: usize,
    /// The partition was the previous round's leftover, because the fresh
    /// one had more cliques.
    pub partition_carried: bool,
    /// Transmissions this round contributed.
    pub transmissions: usize,
}

impl IterationRecord {
    /// One trace line.
    pub fn to_line(&self, iteration: usize) -> String {
        let syms = |v: &[usize]| -> String {
            if v.is_empty() {
                "-".into()
            } else {
                v.iter().map(|&s| symbol_name(s)).collect::<Vec<_>>().join(",")
            }
        };
        let clients = |v: &[usize]| -> String {
            if v.is_empty() {
                "-".into()
            } else {
                v.iter().map(|c| format!("c{}", c + 1)).collect::<Vec<_>>().join(",")
            }
        };
        let gains = if self.cache_gains.is_empty() {
            "-".to_string()
        } else {
            self.cache_gains
                .iter()
                .map(|&(m, s)| format!("c{}+{}", m + 1, symbol_name(s)))
                .collect::<Vec<_>>()
                .join(",")
        };
        format!(
            "iteration={} Y_b={} pbs={} satisfied={} gains={} r={}{}",
            iteration,
            syms(&self.chosen_clique),
            self.piggyback.map_or("-".into(), symbol_name),
            clients(&self.satisfied),
            gains,
            self.partition_size,
            if self.partition_carried { " carried" } else { "" }
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolveTrace {
    pub iterations: Vec<IterationRecord>,
    /// The fallback flushed the partition.
    pub fallback_used: bool,
}

impl SolveTrace {
    /// r of the first partition, i.e. the plain heuristic's code length.
    pub fn initial_partition_size(&self) -> Option<usize> {
        self.iterations.first().map(|r| r.partition_size)
    }

    /// Line-delimited trace, one record per iteration.
    pub fn to_lines(&self) -> String {
        let mut s = String::new();
        for (i, r) in self.iterations.iter().enumerate() {
            s.push_str(&r.to_line(i + 1));
            s.push('\n');
        }
        s
    }
}

impl fmt::Display for SolveTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_lines())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub code: IndexCode,
    pub trace: SolveTrace,
}

/// Runs UCIC with one of the built-in partitioners.
pub fn ucic_solve(
    inst: &Instance,
    partitioner: Partitioner,
    config: SolveConfig,
) -> Result<Solution, SolveError> {
    ucic_solve_with(inst, |k| partitioner.partition(k), config)
}

/// Runs UCIC with an arbitrary partition function.
///
/// The instance must be valid and single-unicast. Unless
/// `fresh_partition_only` is set, a round whose fresh partition has more
/// cliques than the previous round's leftover uses the leftover instead;
/// the leftover stays valid because K only gains edges among the remaining
/// vertices. Every piggybacked round then shrinks r by one, so ℓ never
/// exceeds the first partition's size.
pub fn ucic_solve_with<F>(inst: &Instance, partition: F, config: SolveConfig) -> Result<Solution, SolveError>
where
    F: Fn(&IdcGraph) -> CliquePartition,
{
    let violations = inst.validate();
    if !violations.is_empty() {
        return Err(SolveError::InvalidInstance(violations));
    }
    let mut g = SideInfoGraph::from_instance(inst)?;
    let mut code = IndexCode::default();
    let mut trace = SolveTrace::default();
    let n = g.capacity();
    let mut leftover: Option<CliquePartition> = None;

    while g.vertex_count() > 0 {
        let k = g.idc_graph();
        let fresh = partition(&k);
        let (p, carried) = match leftover.take() {
            Some(old) if !config.fresh_partition_only && old.len() < fresh.len() => (old, true),
            _ => (fresh, false),
        };
        let r = p.len();
        let min = p.min_clique_size().expect("live vertices imply a clique");
        let beta: Vec<Vec<usize>> = p.cliques().iter().filter(|c| c.len() == min).cloned().collect();
        let sets: Vec<VertexSet> = beta
            .iter()
            .map(|c| VertexSet::from_ids(n, c.iter().copied()))
            .collect();
        let results: Vec<Option<Piggyback>> = sets.iter().map(|c| greedy_search(&g, c)).collect();

        match select_best_pair(&beta, &results, config.tie_break) {
            Some(b) => {
                let pb = results[b].clone().expect("selected pair has a piggyback");
                let mut support = beta[b].clone();
                support.push(pb.symbol);
                code.push(CodedSymbol::new(support).expect("nonempty"));
                let gains: Vec<(ClientId, SymbolId)> =
                    pb.gaining.iter().map(|&m| (m, pb.symbol)).collect();
                g = g.apply_transmission(&sets[b], &gains)?;
                leftover = Some(without(&p, &beta[b]));
                trace.iterations.push(IterationRecord {
                    chosen_clique: beta[b].clone(),
                    piggyback: Some(pb.symbol),
                    satisfied: beta[b].clone(),
                    cache_gains: gains,
                    partition_size: r,
                    partition_carried: carried,
                    transmissions: 1,
                });
            }
            None if config.continue_after_fallback => {
                code.push(CodedSymbol::new(beta[0].iter().copied()).expect("nonempty"));
                g = g.apply_transmission(&sets[0], &[])?;
                leftover = Some(without(&p, &beta[0]));
                trace.iterations.push(IterationRecord {
                    chosen_clique: beta[0].clone(),
                    piggyback: None,
                    satisfied: beta[0].clone(),
                    cache_gains: Vec::new(),
                    partition_size: r,
                    partition_carried: carried,
                    transmissions: 1,
                });
            }
            None => {
                let emitted = fallback_emit(&p);
                let remaining = g.live().to_vec();
                trace.iterations.push(IterationRecord {
                    chosen_clique: remaining.clone(),
                    piggyback: None,
                    satisfied: remaining,
                    cache_gains: Vec::new(),
                    partition_size: r,
                    partition_carried: carried,
                    transmissions: emitted.len(),
                });
                for t in emitted {
                    code.push(t);
                }
                trace.fallback_used = true;
                break;
            }
        }
    }
    Ok(Solution { code, trace })
}

fn without(p: &CliquePartition, clique: &[usize]) -> CliquePartition {
    CliquePartition::new(p.cliques().iter().filter(|c| c.as_slice() != clique).cloned().collect())
}
