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

//! Seeded instance generators.
//!
//! Randomness comes from ChaCha8 (`rand_chacha`) seeded with
//! `seed_from_u64`. The random family draws client `i`'s has set from its
//! own stream seeded with `mix(seed) ^ i`, testing `j = 0, 1, ...` in order
//! with `gen_bool(p_has)`; `mix` is the SplitMix64 finalizer, so nearby
//! seeds do not share client streams.

use std::fmt;
use std::str::FromStr;

use petgraph::algo::maximum_matching;
use petgraph::graph::UnGraph;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub use crate::fixtures::{fixture, Fixture};
use crate::graph::IdcGraph;
use crate::instance::Instance;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("bad parameters for family {family}: {message}")]
    BadFamilyParams { family: Family, message: String },
    #[error("unknown fixture `{0}` (expected motivating, alice-bob or future-work)")]
    UnknownFixture(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Random,
    SingleUniprior,
    Complete,
    Star,
    Edgeless,
    Matching2NoF,
    Fixture,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Random,
        Family::SingleUniprior,
        Family::Complete,
        Family::Star,
        Family::Edgeless,
        Family::Matching2NoF,
        Family::Fixture,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Random => "random",
            Family::SingleUniprior => "single-uniprior",
            Family::Complete => "complete",
            Family::Star => "star",
            Family::Edgeless => "edgeless",
            Family::Matching2NoF => "matching2-noF",
            Family::Fixture => "fixture",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Family::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                let names: Vec<_> = Family::ALL.iter().map(|f| f.name()).collect();
                format!("unknown family `{s}` (expected one of {})", names.join(", "))
            })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenSpec {
    pub family: Family,
    pub n: usize,
    /// Only read by [`Family::Random`].
    pub p_has: f64,
    pub seed: u64,
    /// Required by [`Family::Fixture`].
    pub fixture: Option<Fixture>,
}

impl GenSpec {
    pub fn new(family: Family, n: usize, seed: u64) -> Self {
        Self {
            family,
            n,
            p_has: 0.0,
            seed,
            fixture: None,
        }
    }
}

fn bad(family: Family, message: impl Into<String>) -> GenError {
    GenError::BadFamilyParams {
        family,
        message: message.into(),
    }
}

pub fn generate(spec: &GenSpec) -> Result<Instance, GenError> {
    match spec.family {
        Family::Random => {
            if spec.n == 0 {
                return Err(bad(Family::Random, "n must be at least 1"));
            }
            if !(0.0..=1.0).contains(&spec.p_has) {
                return Err(bad(Family::Random, format!("p_has {} outside [0, 1]", spec.p_has)));
            }
            Ok(gen_random(spec.n, spec.p_has, spec.seed))
        }
        Family::SingleUniprior => {
            if spec.n < 2 {
                return Err(bad(Family::SingleUniprior, "n must be at least 2"));
            }
            Ok(gen_single_uniprior(spec.n, spec.seed).0)
        }
        Family::Fixture => spec
            .fixture
            .map(fixture)
            .ok_or_else(|| bad(Family::Fixture, "no fixture name given")),
        family => gen_near_extreme(family, spec.n, spec.seed),
    }
}

/// `W_i = {p_i}`; each `p_j`, `j ≠ i`, joins `H_i` with probability `p_has`.
///
/// # Panics
/// If `p_has` is outside `[0, 1]`.
pub fn gen_random(n: usize, p_has: f64, seed: u64) -> Instance {
    let has = (0..n)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(mix(seed) ^ i as u64);
            (0..n)
                .filter(|&j| rng.gen_bool(p_has) && j != i)
                .collect::<Vec<_>>()
        })
        .collect();
    Instance::single_unicast(has)
}

fn mix(seed: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniform fixed-point-free permutation `π` by rejection; client `i` holds
/// `p_{π(i)}`. Returns the instance and the cycle count ξ of `π`.
///
/// # Panics
/// If `n < 2`.
pub fn gen_single_uniprior(n: usize, seed: u64) -> (Instance, usize) {
    assert!(n >= 2, "a derangement needs n >= 2");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pi: Vec<usize> = (0..n).collect();
    loop {
        pi.shuffle(&mut rng);
        if pi.iter().enumerate().all(|(i, &p)| i != p) {
            break;
        }
    }
    let xi = cycle_count(&pi);
    (Instance::single_unicast(pi.iter().map(|&p| vec![p]).collect()), xi)
}

/// Single-uniprior instance for an explicit permutation.
///
/// # Panics
/// If `pi` is not a fixed-point-free permutation.
pub fn single_uniprior_from(pi: &[usize]) -> (Instance, usize) {
    let mut seen = vec![false; pi.len()];
    for (i, &p) in pi.iter().enumerate() {
        assert!(p < pi.len() && !seen[p] && p != i, "not a derangement: {pi:?}");
        seen[p] = true;
    }
    (
        Instance::single_unicast(pi.iter().map(|&p| vec![p]).collect()),
        cycle_count(pi),
    )
}

fn cycle_count(pi: &[usize]) -> usize {
    let mut seen = vec![false; pi.len()];
    let mut cycles = 0;
    for start in 0..pi.len() {
        if seen[start] {
            continue;
        }
        cycles += 1;
        let mut v = start;
        while !seen[v] {
            seen[v] = true;
            v = pi[v];
        }
    }
    cycles
}

/// Structured families with known optimal length.
///
/// * complete: every client holds every other symbol.
/// * star: a random center holds all symbols and every leaf holds the
///   center's only.
/// * edgeless: empty has sets.
/// * matching2-noF: K is two vertex-disjoint stars (random centers and
///   sizes) plus isolated vertices, so its maximum matching is two and it
///   has no triangle.
pub fn gen_near_extreme(family: Family, n: usize, seed: u64) -> Result<Instance, GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let has: Vec<Vec<usize>> = match family {
        Family::Complete => (0..n).map(|i| (0..n).filter(|&j| j != i).collect()).collect(),
        Family::Edgeless => vec![Vec::new(); n],
        Family::Star => {
            if n < 2 {
                return Err(bad(family, "a star needs n >= 2"));
            }
            let center = rng.gen_range(0..n);
            let mut has = vec![vec![center]; n];
            has[center] = (0..n).filter(|&j| j != center).collect();
            has
        }
        Family::Matching2NoF => {
            if n < 6 {
                return Err(bad(family, "matching2-noF needs n >= 6"));
            }
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            let used = rng.gen_range(4..=n);
            let first_leaves = rng.gen_range(1..=used - 3);
            let (a, rest) = order[..used].split_at(first_leaves + 1);
            let mut has = vec![Vec::new(); n];
            for star in [a, rest] {
                let (&center, leaves) = star.split_first().expect("star has a center");
                for &l in leaves {
                    has[center].push(l);
                    has[l].push(center);
                }
            }
            has
        }
        Family::Random | Family::SingleUniprior | Family::Fixture => {
            return Err(bad(family, "not a near-extreme family"));
        }
    };
    Ok(Instance::single_unicast(has))
}

/// The forbidden 4-vertex pattern F: a triangle `{0,1,2}` with the
/// pendant edge `{2,3}`.
pub fn forbidden_f() -> IdcGraph {
    IdcGraph::from_edges(4, [(0, 1), (0, 2), (1, 2), (2, 3)])
}

/// Whether some four live vertices of `k` carry a copy of `pattern`
/// (a 4-vertex graph) as a not necessarily induced subgraph.
pub fn contains_subgraph4(k: &IdcGraph, pattern: &IdcGraph) -> bool {
    let perms = permutations4();
    let edges = pattern.edges();
    let verts = k.live().to_vec();
    let n = verts.len();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    let quad = [verts[a], verts[b], verts[c], verts[d]];
                    if perms.iter().any(|p| {
                        edges
                            .iter()
                            .all(|&(x, y)| k.adjacent(quad[p[x]], quad[p[y]]))
                    }) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    if (0..4).all(|x| p.contains(&x)) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

/// Maximum matching size of `k` over its live vertices.
pub fn maximum_matching_size(k: &IdcGraph) -> usize {
    let verts = k.live().to_vec();
    let mut g: UnGraph<(), ()> = UnGraph::with_capacity(verts.len(), k.edge_count());
    let nodes: Vec<_> = verts.iter().map(|_| g.add_node(())).collect();
    let pos = |v: usize| verts.binary_search(&v).expect("live vertex");
    for (i, j) in k.edges() {
        g.add_edge(nodes[pos(i)], nodes[pos(j)], ());
    }
    maximum_matching(&g).edges().count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{scc_decompose, InfoFlowGraph, SideInfoGraph};

    fn idc(inst: &Instance) -> IdcGraph {
        SideInfoGraph::from_instance(inst).unwrap().idc_graph()
    }

    #[test]
    fn random_extremes() {
        let empty = gen_random(6, 0.0, 3);
        assert!(empty.clients.iter().all(|c| c.has.is_empty()));
        let full = gen_random(6, 1.0, 3);
        assert_eq!(idc(&full).edge_count(), 15);
        assert!(full.validate().is_empty());
    }

    #[test]
    fn random_is_deterministic_and_seed_sensitive() {
        assert_eq!(gen_random(30, 0.3, 9).to_json(), gen_random(30, 0.3, 9).to_json());
        assert_ne!(gen_random(30, 0.3, 9), gen_random(30, 0.3, 10));
    }

    #[test]
    fn random_density_concentrates() {
        let n = 40;
        let p = 0.05;
        let trials = 100u64;
        let arcs: usize = (0..trials)
            .map(|s| SideInfoGraph::from_instance(&gen_random(n, p, s)).unwrap().arc_count())
            .sum();
        let slots = (n * (n - 1)) as f64 * trials as f64;
        let sigma = (p * (1.0 - p) / slots).sqrt();
        assert!((arcs as f64 / slots - p).abs() < 3.0 * sigma);
    }

    #[test]
    fn uniprior_structure() {
        for seed in 0..200 {
            let (inst, xi) = gen_single_uniprior(7, seed);
            assert!(inst.validate().is_empty(), "seed {seed}");
            let i = InfoFlowGraph::from_instance(&inst).unwrap();
            let scc = scc_decompose(i.digraph());
            assert_eq!(scc.components.len(), xi);
            assert_eq!(scc.cycle_count(i.digraph()), xi);
            assert_eq!(scc.components.iter().map(Vec::len).sum::<usize>(), 7);
        }
    }

    #[test]
    fn explicit_permutations() {
        assert_eq!(single_uniprior_from(&[1, 2, 3, 0]).1, 1);
        assert_eq!(single_uniprior_from(&[1, 0, 3, 2]).1, 2);
    }

    #[test]
    fn near_extreme_shapes() {
        assert_eq!(idc(&gen_near_extreme(Family::Complete, 4, 0).unwrap()).edge_count(), 6);
        assert_eq!(idc(&gen_near_extreme(Family::Edgeless, 4, 0).unwrap()).edge_count(), 0);
        let star = idc(&gen_near_extreme(Family::Star, 6, 5).unwrap());
        assert_eq!(star.edge_count(), 5);
        assert_eq!((0..6).filter(|&v| star.degree(v) == 5).count(), 1);
        assert!(matches!(
            gen_near_extreme(Family::Matching2NoF, 5, 0),
            Err(GenError::BadFamilyParams { .. })
        ));
    }

    #[test]
    fn matching2_has_no_f() {
        let triangle = IdcGraph::from_edges(4, [(0, 1), (0, 2), (1, 2)]);
        for n in 6..=10 {
            for seed in 0..40 {
                let k = idc(&gen_near_extreme(Family::Matching2NoF, n, seed).unwrap());
                assert_eq!(maximum_matching_size(&k), 2, "n={n} seed={seed}");
                assert!(!contains_subgraph4(&k, &forbidden_f()));
                assert!(!contains_subgraph4(&k, &triangle));
            }
        }
    }

    #[test]
    fn f_pattern_detection() {
        let f = forbidden_f();
        assert!(contains_subgraph4(&f, &f));
        // Relabelled copy inside a larger graph.
        let g = IdcGraph::from_edges(6, [(5, 1), (1, 3), (3, 5), (3, 0)]);
        assert!(contains_subgraph4(&g, &f));
        assert!(contains_subgraph4(&IdcGraph::complete(4), &f));
        assert!(!contains_subgraph4(&IdcGraph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)]), &f));
        assert!(!contains_subgraph4(&IdcGraph::from_edges(3, [(0, 1), (1, 2), (0, 2)]), &f));
    }

    #[test]
    fn generate_dispatch() {
        let spec = GenSpec {
            fixture: Some(Fixture::AliceBob),
            ..GenSpec::new(Family::Fixture, 0, 0)
        };
        assert_eq!(generate(&spec).unwrap(), fixture(Fixture::AliceBob));
        let spec = GenSpec {
            p_has: 1.5,
            ..GenSpec::new(Family::Random, 4, 0)
        };
        assert!(generate(&spec).is_err());
        assert_eq!("matching2-nof".parse::<Family>(), Ok(Family::Matching2NoF));
        assert_eq!(
            "nope".parse::<Fixture>(),
            Err(GenError::UnknownFixture("nope".into()))
        );
    }
}
