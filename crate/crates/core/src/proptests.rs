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


//! Property tests for the invariants shared across modules.

use std::collections::BTreeSet;

use proptest::prelude::*;

use crate::bitset::VertexSet;
use crate::codec::{encode, simulate_decode, verify_code_valid, verify_code_with, DecodeMode, PayloadStore};
use crate::generate::{gen_random, gen_single_uniprior, generate, Family, GenSpec};
use crate::graph::{scc_decompose, IdcGraph, InfoFlowGraph, SideInfoGraph};
use crate::harness::{solve, Algorithm};
use crate::instance::{Client, Instance};
use crate::oracle::{exact_clique_partition, minrk2, omega_lower_bound};
use crate::partition::{verify_partition, Partitioner};
use crate::ucic::{ucic_solve, SolveConfig, TieBreak};

/// Single-unicast instance from an `n × n` has-matrix (diagonal ignored).
fn single_unicast(max_n: usize) -> impl Strategy<Value = Instance> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(proptest::collection::vec(any::<bool>(), n), n).prop_map(move |rows| {
            Instance::single_unicast(
                rows.iter()
                    .enumerate()
                    .map(|(i, r)| (0..n).filter(|&j| j != i && r[j]).collect::<Vec<_>>())
                    .collect(),
            )
        })
    })
}

/// Unicast instance with multi-symbol wants, idle clients and unwanted
/// symbols allowed.
fn unicast(max_k: usize) -> impl Strategy<Value = Instance> {
    (1..=max_k, 1..=max_k).prop_flat_map(|(k, n)| {
        (
            proptest::collection::vec(0..n + 1, k),
            proptest::collection::vec(proptest::collection::vec(any::<bool>(), k), n),
        )
            .prop_map(move |(owner, has)| {
                let clients = (0..n)
                    .map(|c| {
                        let want: BTreeSet<usize> = (0..k).filter(|&s| owner[s] == c).collect();
                        let held: BTreeSet<usize> =
                            (0..k).filter(|&s| has[c][s] && !want.contains(&s)).collect();
                        Client { has: held, want }
                    })
                    .collect();
                Instance::new(k, clients)
            })
    })
}

fn idc_graph(max_n: usize) -> impl Strategy<Value = IdcGraph> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let pairs = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
            IdcGraph::from_edges(n, pairs.zip(bits).filter(|(_, b)| *b).map(|(e, _)| e))
        })
    })
}

fn arcs_at_most(inst: &Instance, cap: usize) -> bool {
    SideInfoGraph::from_instance(inst).unwrap().arc_count() <= cap
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn parse_inverts_serialize(inst in unicast(7), payload in proptest::option::of(1usize..64)) {
        let inst = Instance { payload_size_bytes: payload, ..inst };
        prop_assert_eq!(Instance::parse(&inst.to_json()).unwrap(), inst);
    }

    #[test]
    fn validate_matches_rules(k in 1usize..6, raw in proptest::collection::vec((proptest::collection::btree_set(0usize..8, 0..4), proptest::collection::btree_set(0usize..8, 0..3)), 0..5)) {
        let inst = Instance::new(k, raw.iter().map(|(h, w)| Client { has: h.clone(), want: w.clone() }).collect());
        let ok = raw.iter().all(|(h, w)| h.iter().chain(w).all(|&s| s < k) && h.is_disjoint(w));
        prop_assert_eq!(inst.validate().is_empty(), ok);
    }

    #[test]
    fn reduction_preserves_solvability(inst in unicast(6)) {
        let red = inst.reduce_to_single_unicast().unwrap();
        prop_assert!(red.instance.is_single_unicast());
        for a in [Algorithm::Plain(Partitioner::Ldg), Algorithm::Ucic(Partitioner::Greedy)] {
            let run = solve(&red.instance, a, SolveConfig::default()).unwrap();
            let lifted = red.lift_code(&run.code);
            prop_assert!(verify_code_valid(&inst, &lifted).valid);
        }
    }

    #[test]
    fn idc_edges_come_from_mutual_arcs(inst in single_unicast(10)) {
        let g = SideInfoGraph::from_instance(&inst).unwrap();
        let k = g.idc_graph();
        for (i, j) in k.edges() {
            prop_assert!(g.has_arc(i, j) && g.has_arc(j, i));
        }
        prop_assert!(k.edge_count() <= g.arc_count() / 2);
    }

    #[test]
    fn transmission_shrinks_graph(inst in single_unicast(10), pick in any::<prop::sample::Index>()) {
        let g = SideInfoGraph::from_instance(&inst).unwrap();
        let v = pick.index(inst.n());
        let next = g.apply_transmission(&VertexSet::from_ids(inst.n(), [v]), &[]).unwrap();
        prop_assert_eq!(next.vertex_count(), g.vertex_count() - 1);
        prop_assert!(next.arcs().iter().all(|&(i, j)| i != v && j != v));
    }

    #[test]
    fn complement_is_an_involution(k in idc_graph(12)) {
        prop_assert_eq!(k.complement().complement(), k);
    }

    #[test]
    fn uniprior_components_are_cycles(n in 2usize..14, seed in any::<u64>()) {
        let (inst, xi) = gen_single_uniprior(n, seed);
        let info = InfoFlowGraph::from_instance(&inst).unwrap();
        let scc = scc_decompose(info.digraph());
        prop_assert_eq!(scc.cycle_count(info.digraph()), scc.components.len());
        prop_assert_eq!(scc.components.len(), xi);
        prop_assert!(scc.component_of.iter().all(Option::is_some));
    }

    #[test]
    fn heuristic_partitions_are_valid(k in idc_graph(12)) {
        let phi = exact_clique_partition(&k, 12).unwrap().len();
        for p in Partitioner::ALL {
            let q = p.partition(&k);
            prop_assert!(verify_partition(&k, &q).is_empty(), "{}", p);
            prop_assert!(q.len() <= k.vertex_count());
            prop_assert_eq!(q.len() == k.vertex_count(), k.edge_count() == 0);
            prop_assert!(q.len() >= phi);
        }
    }

    #[test]
    fn minrk_does_not_grow_with_arcs(inst in single_unicast(6), extra in (0usize..6, 0usize..6)) {
        let g = SideInfoGraph::from_instance(&inst).unwrap();
        prop_assume!(g.arc_count() < 24);
        let (i, j) = (extra.0 % inst.n(), extra.1 % inst.n());
        let mut more = g.clone();
        more.add_arc(i, j);
        prop_assert!(minrk2(&more, 30).unwrap().rank <= minrk2(&g, 30).unwrap().rank);
    }

    #[test]
    fn oracle_sandwich(inst in single_unicast(7)) {
        prop_assume!(arcs_at_most(&inst, 24));
        let g = SideInfoGraph::from_instance(&inst).unwrap();
        let omega = omega_lower_bound(&g, 20).unwrap().len();
        let rank = minrk2(&g, 24).unwrap().rank;
        let phi = exact_clique_partition(&g.idc_graph(), 15).unwrap().len();
        prop_assert!(omega <= rank && rank <= phi, "{} {} {}", omega, rank, phi);
    }

    #[test]
    fn ucic_contract(inst in single_unicast(12), tie in prop::sample::select(TieBreak::ALL.to_vec())) {
        let config = SolveConfig { tie_break: tie, ..SolveConfig::default() };
        for p in Partitioner::ALL {
            let s = ucic_solve(&inst, p, config).unwrap();
            prop_assert!(verify_code_valid(&inst, &s.code).valid);
            let r0 = s.trace.initial_partition_size().unwrap();
            prop_assert!(s.code.len() <= r0);
            let plain = solve(&inst, Algorithm::Plain(p), config).unwrap().code.len();
            prop_assert!(s.code.len() <= plain);

            let mut seen = BTreeSet::new();
            for (it, rec) in s.trace.iterations.iter().enumerate() {
                prop_assert!(!rec.satisfied.is_empty());
                for &c in &rec.satisfied {
                    prop_assert!(seen.insert(c), "client satisfied twice");
                }
                if rec.piggyback.is_some() {
                    prop_assert!(!rec.cache_gains.is_empty());
                    prop_assert_eq!(&rec.satisfied, &rec.chosen_clique);
                } else if s.trace.fallback_used {
                    prop_assert_eq!(it, s.trace.iterations.len() - 1);
                }
            }
            prop_assert_eq!(seen.len(), inst.n());
            prop_assert_eq!(ucic_solve(&inst, p, config).unwrap(), s);
        }
    }

    #[test]
    fn ucic_respects_lower_bound(inst in single_unicast(7)) {
        prop_assume!(arcs_at_most(&inst, 24));
        let rank = minrk2(&SideInfoGraph::from_instance(&inst).unwrap(), 24).unwrap().rank;
        for p in Partitioner::ALL {
            prop_assert!(ucic_solve(&inst, p, SolveConfig::default()).unwrap().code.len() >= rank);
        }
    }

    #[test]
    fn continue_mode_is_valid_and_dominant(inst in single_unicast(12)) {
        let config = SolveConfig { continue_after_fallback: true, ..SolveConfig::default() };
        for p in Partitioner::ALL {
            let s = ucic_solve(&inst, p, config).unwrap();
            prop_assert!(verify_code_valid(&inst, &s.code).valid);
            prop_assert!(s.code.len() <= s.trace.initial_partition_size().unwrap());
        }
    }

    #[test]
    fn decode_round_trip(inst in single_unicast(10), size in 1usize..24, seed in any::<u64>()) {
        let code = ucic_solve(&inst, Partitioner::ColorSaving, SolveConfig::default()).unwrap().code;
        let store = PayloadStore::random(inst.k, size, seed);
        let frames = encode(&code, &store).unwrap();
        let states = simulate_decode(&inst, &code, &frames, &store, DecodeMode::Sequential).unwrap();
        for (client, st) in inst.clients.iter().zip(&states) {
            prop_assert!(st.known.is_superset(&client.has));
            prop_assert!(st.known.is_superset(&client.want));
            for (s, bytes) in &st.recovered_payloads {
                prop_assert_eq!(Some(bytes.as_slice()), store.get(*s));
            }
        }
    }

    #[test]
    fn fixpoint_decodes_at_least_as_much(inst in single_unicast(8), order in any::<u64>()) {
        let code = ucic_solve(&inst, Partitioner::Ldg, SolveConfig::default()).unwrap().code;
        let code = if order % 2 == 0 { code } else { code.reversed() };
        let seq = verify_code_with(&inst, &code, 4, 1, order, DecodeMode::Sequential);
        let fix = verify_code_with(&inst, &code, 4, 1, order, DecodeMode::Fixpoint);
        prop_assert!(fix.valid || !seq.valid);
        prop_assert!(fix.unsatisfied.len() <= seq.unsatisfied.len());
    }

    #[test]
    fn generators_are_deterministic(n in 6usize..20, p in 0.0f64..=1.0, seed in any::<u64>(), fam in prop::sample::select(vec![Family::Random, Family::SingleUniprior, Family::Complete, Family::Star, Family::Edgeless, Family::Matching2NoF])) {
        let spec = GenSpec { p_has: p, ..GenSpec::new(fam, n, seed) };
        let a = generate(&spec).unwrap();
        prop_assert!(a.validate().is_empty());
        prop_assert_eq!(a.to_json(), generate(&spec).unwrap().to_json());
    }

    #[test]
    fn random_generator_matches_rule(n in 1usize..12, seed in any::<u64>()) {
        let inst = gen_random(n, 1.0, seed);
        for (i, c) in inst.clients.iter().enumerate() {
            prop_assert_eq!(c.has.len(), n - 1);
            prop_assert!(!c.has.contains(&i));
        }
    }
}
