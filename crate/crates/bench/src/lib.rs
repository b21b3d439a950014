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


//! Shared inputs for the criterion benchmarks.

use ucic_core::{gen_random, Instance};

/// `(n, p_has)` grid the solver benchmarks sweep.
pub const GRID: [(usize, f64); 4] = [(20, 0.05), (40, 0.05), (40, 0.1), (60, 0.1)];

/// A fixed random instance per grid point.
pub fn grid_instances(seed: u64) -> Vec<(String, Instance)> {
    GRID.iter()
        .map(|&(n, p)| (format!("n{n}_p{p}"), gen_random(n, p, seed)))
        .collect()
}
