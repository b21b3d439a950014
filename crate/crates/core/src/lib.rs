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

//! Index coding over XOR broadcasts.
//!
//! A server holds symbols `p_1..p_k`; each client caches a has set and asks
//! for a want set. The crate builds the side-information graph G and the
//! instantly-decodable graph K, partitions K into cliques, and runs the
//! UCIC loop that piggybacks one extra symbol per clique transmission so
//! that other clients grow their caches.
//!
//! ```
//! use ucic_core::{fixture, ucic_solve, verify_code_valid, Fixture, Partitioner, SolveConfig};
//!
//! let inst = fixture(Fixture::Motivating);
//! let sol = ucic_solve(&inst, Partitioner::Ldg, SolveConfig::default()).unwrap();
//! assert_eq!(sol.code.len(), 3);
//! assert!(verify_code_valid(&inst, &sol.code).valid);
//! ```

pub mod bitset;
pub mod code;
pub mod codec;
pub mod fixtures;
pub mod generate;
pub mod graph;
pub mod harness;
pub mod instance;
pub mod oracle;
pub mod partition;
pub mod ucic;

#[cfg(test)]
mod proptests;

pub use bitset::VertexSet;
pub use code::{CodedSymbol, IndexCode};
pub use codec::{
    encode, simulate_decode, verify_code_valid, verify_code_with, ClientState, CodecError,
    DecodeMode, PayloadStore, ValidityReport,
};
pub use fixtures::{fixture, Fixture};
pub use generate::{
    gen_near_extreme, gen_random, gen_single_uniprior, generate, Family, GenError, GenSpec,
};
pub use graph::{
    scc_decompose, Digraph, GraphError, IdcGraph, InfoFlowGraph, SccDecomposition, SideInfoGraph,
};
pub use harness::{
    check_bounds, run_experiment, solve, Algorithm, CheckReport, ExperimentRow, ExperimentSpec,
    HarnessError, OracleCaps, Run,
};
pub use instance::{
    symbol_name, Client, ClientId, CodingGain, Instance, ParseError, ReduceError, Reduction,
    SymbolId, Violation,
};
pub use oracle::{
    clique_number, exact_clique_partition, gf2_rank, minrk2, omega_lower_bound, BitMatrix,
    MinRank, OracleError,
};
pub use partition::{verify_partition, CliquePartition, PartitionViolation, Partitioner};
pub use ucic::{
    ucic_solve, ucic_solve_with, IterationRecord, SolveConfig, SolveError, SolveTrace, Solution,
    TieBreak,
};
