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

//! Algorithm registry, experiment sweeps and bound checks.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::code::IndexCode;
use crate::codec::{verify_code_valid, ValidityReport};
use crate::generate::gen_random;
use crate::graph::SideInfoGraph;
use crate::instance::{CodingGain, Instance, ReduceError};
use crate::oracle::{
    exact_clique_partition, minrk2, omega_lower_bound, OracleError, DEFAULT_MAX_CLIQUE_N,
    DEFAULT_MAX_FREE, DEFAULT_MAX_PARTITION_N,
};
use crate::partition::Partitioner;
use crate::ucic::{fallback_emit, ucic_solve, SolveConfig, SolveError, SolveTrace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    /// One transmission per clique of the partition.
    Plain(Partitioner),
    Ucic(Partitioner),
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Plain(Partitioner::Ldg),
        Algorithm::Plain(Partitioner::ColorSaving),
        Algorithm::Plain(Partitioner::Greedy),
        Algorithm::Ucic(Partitioner::Ldg),
        Algorithm::Ucic(Partitioner::ColorSaving),
        Algorithm::Ucic(Partitioner::Greedy),
    ];

    pub fn name(self) -> String {
        match self {
            Algorithm::Plain(p) => p.name().to_string(),
            Algorithm::Ucic(p) => format!("ucic-{}", p.name()),
        }
    }

    pub fn partitioner(self) -> Partitioner {
        match self {
            Algorithm::Plain(p) | Algorithm::Ucic(p) => p,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.strip_prefix("ucic-") {
            Some(rest) => rest.parse().map(Algorithm::Ucic),
            None => s.parse().map(Algorithm::Plain),
        }
        .map_err(|_| {
            format!(
                "unknown algorithm `{s}` (expected one of {})",
                Algorithm::ALL.map(|a| a.name()).join(", ")
            )
        })
    }
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Reduce(#[from] ReduceError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("{algorithm} produced an invalid code (n={n}, p_has={p_has}, trial={trial}): {report}\ntrace:\n{trace}")]
    InvalidCodeProduced {
        algorithm: Algorithm,
        n: usize,
        p_has: f64,
        trial: usize,
        report: ValidityReport,
        trace: String,
    },
    #[error("experiment spec: {0}")]
    BadSpec(String),
}

/// A solved instance, expressed over the instance's own symbol ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Run {
    pub code: IndexCode,
    /// Absent for plain partition heuristics.
    pub trace: Option<SolveTrace>,
}

impl Run {
    pub fn fallback_used(&self) -> bool {
        self.trace.as_ref().is_some_and(|t| t.fallback_used)
    }
}

/// Reduces to single-unicast when needed, solves, and maps the code back.
pub fn solve(inst: &Instance, algorithm: Algorithm, config: SolveConfig) -> Result<Run, HarnessError> {
    if inst.is_single_unicast() {
        return solve_single_unicast(inst, algorithm, config);
    }
    let red = inst.reduce_to_single_unicast()?;
    let run = solve_single_unicast(&red.instance, algorithm, config)?;
    Ok(Run {
        code: red.lift_code(&run.code),
        trace: run.trace,
    })
}

fn solve_single_unicast(
    inst: &Instance,
    algorithm: Algorithm,
    config: SolveConfig,
) -> Result<Run, HarnessError> {
    match algorithm {
        Algorithm::Plain(p) => {
            let violations = inst.validate();
            if !violations.is_empty() {
                return Err(SolveError::InvalidInstance(violations).into());
            }
            let g = SideInfoGraph::from_instance(inst).map_err(SolveError::from)?;
            Ok(Run {
                code: IndexCode::from_symbols(fallback_emit(&p.partition(&g.idc_graph()))),
                trace: None,
            })
        }
        Algorithm::Ucic(p) => {
            let s = ucic_solve(inst, p, config)?;
            Ok(Run {
                code: s.code,
                trace: Some(s.trace),
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub n_values: Vec<usize>,
    pub p_has_values: Vec<f64>,
    pub trials: usize,
    pub algorithms: Vec<Algorithm>,
    pub base_seed: u64,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            n_values: vec![20, 30, 40, 50, 60],
            p_has_values: vec![0.05, 0.1],
            trials: 100,
            algorithms: Algorithm::ALL.to_vec(),
            base_seed: 0,
        }
    }
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.trials == 0 {
            return Err(HarnessError::BadSpec("trials must be at least 1".into()));
        }
        if self.algorithms.is_empty() {
            return Err(HarnessError::BadSpec("no algorithms selected".into()));
        }
        if let Some(p) = self.p_has_values.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(HarnessError::BadSpec(format!("p_has {p} outside [0, 1]")));
        }
        if self.n_values.contains(&0) {
            return Err(HarnessError::BadSpec("n must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRow {
    pub n: usize,
    pub p_has: f64,
    pub algorithm: Algorithm,
    pub trial: usize,
    pub seed: u64,
    pub ell: usize,
    pub coding_gain: CodingGain,
    pub fallback_used: bool,
    pub valid: bool,
}

pub const CSV_HEADER: &str = "n,p_has,algorithm,trial,seed,ell,coding_gain,fallback_used";

impl ExperimentRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{:.4},{}",
            self.n,
            self.p_has,
            self.algorithm,
            self.trial,
            self.seed,
            self.ell,
            self.coding_gain.value(),
            self.fallback_used
        )
    }
}

/// Rows ordered by `n`, `p_has`, trial, then the spec's algorithm order.
///
/// Trials run in parallel; every code is re-verified and the first invalid
/// one aborts the run.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<ExperimentRow>, HarnessError> {
    spec.validate()?;
    let cells: Vec<(usize, f64, usize)> = spec
        .n_values
        .iter()
        .flat_map(|&n| {
            spec.p_has_values
                .iter()
                .flat_map(move |&p| (0..spec.trials).map(move |t| (n, p, t)))
        })
        .collect();
    let per_cell: Vec<Vec<ExperimentRow>> = cells
        .par_iter()
        .map(|&(n, p_has, trial)| {
            let seed = spec.base_seed.wrapping_add(trial as u64);
            let inst = gen_random(n, p_has, seed);
            spec.algorithms
                .iter()
                .map(|&algorithm| {
                    let run = solve(&inst, algorithm, SolveConfig::default())?;
                    let report = verify_code_valid(&inst, &run.code);
                    if !report.valid {
                        return Err(HarnessError::InvalidCodeProduced {
                            algorithm,
                            n,
                            p_has,
                            trial,
                            report,
                            trace: run.trace.map(|t| t.to_lines()).unwrap_or_default(),
                        });
                    }
                    Ok(ExperimentRow {
                        n,
                        p_has,
                        algorithm,
                        trial,
                        seed,
                        ell: run.code.len(),
                        coding_gain: CodingGain::new(inst.k, run.code.len())
                            .expect("n >= 1 gives a nonempty code"),
                        fallback_used: run.fallback_used(),
                        valid: true,
                    })
                })
                .collect()
        })
        .collect::<Result<_, _>>()?;
    Ok(per_cell.into_iter().flatten().collect())
}

pub fn rows_to_csv(rows: &[ExperimentRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&r.to_csv());
        s.push('\n');
    }
    s
}

/// Mean coding gain per `(n, p_has, algorithm)` in row order.
pub fn mean_gains(rows: &[ExperimentRow]) -> Vec<(usize, f64, Algorithm, f64)> {
    let mut out: Vec<(usize, f64, Algorithm, f64, usize)> = Vec::new();
    for r in rows {
        match out
            .iter_mut()
            .find(|e| e.0 == r.n && e.1 == r.p_has && e.2 == r.algorithm)
        {
            Some(e) => {
                e.3 += r.coding_gain.value();
                e.4 += 1;
            }
            None => out.push((r.n, r.p_has, r.algorithm, r.coding_gain.value(), 1)),
        }
    }
    out.into_iter()
        .map(|(n, p, a, sum, count)| (n, p, a, sum / count as f64))
        .collect()
}

/// One-sided sign test of "positive differences dominate"; zeros dropped.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignTest {
    pub positive: usize,
    pub negative: usize,
    pub zeros: usize,
    /// `P(X ≥ positive)` for `X ~ Binomial(positive + negative, 1/2)`.
    pub p_value: f64,
}

pub fn sign_test(diffs: &[f64]) -> SignTest {
    let positive = diffs.iter().filter(|&&d| d > 0.0).count();
    let negative = diffs.iter().filter(|&&d| d < 0.0).count();
    let zeros = diffs.len() - positive - negative;
    let m = positive + negative;
    let ln_choose = |k: usize| -> f64 {
        (1..=k).map(|i| ((m - k + i) as f64).ln() - (i as f64).ln()).sum()
    };
    let p_value = if m == 0 {
        1.0
    } else {
        (positive..=m)
            .map(|k| (ln_choose(k) - m as f64 * std::f64::consts::LN_2).exp())
            .sum::<f64>()
            .min(1.0)
    };
    SignTest {
        positive,
        negative,
        zeros,
        p_value,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleCaps {
    pub max_free: usize,
    pub max_partition_n: usize,
    pub max_clique_n: usize,
}

impl Default for OracleCaps {
    fn default() -> Self {
        Self {
            max_free: DEFAULT_MAX_FREE,
            max_partition_n: DEFAULT_MAX_PARTITION_N,
            max_clique_n: DEFAULT_MAX_CLIQUE_N,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub n: usize,
    pub omega: usize,
    pub minrk2: usize,
    pub phi: usize,
    pub lengths: Vec<(Algorithm, usize)>,
    pub violations: Vec<String>,
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "omega = {}", self.omega)?;
        writeln!(f, "minrk2 = {}", self.minrk2)?;
        writeln!(f, "phi = {}", self.phi)?;
        for (a, l) in &self.lengths {
            writeln!(f, "ell({a}) = {l}")?;
        }
        if self.violations.is_empty() {
            write!(f, "sandwich holds")
        } else {
            let mut s = String::new();
            for v in &self.violations {
                let _ = writeln!(s, "violation: {v}");
            }
            f.write_str(s.trim_end())
        }
    }
}

/// Runs the oracles and every algorithm, and lists any broken link of
/// `ω ≤ minrk₂ ≤ ℓ(ucic-X) ≤ ℓ(X) ≤ n` and `minrk₂ ≤ φ ≤ ℓ(X)`.
///
/// Invalid codes are reported as violations too.
pub fn check_bounds(inst: &Instance, caps: OracleCaps) -> Result<CheckReport, HarnessError> {
    let red = if inst.is_single_unicast() {
        None
    } else {
        Some(inst.reduce_to_single_unicast()?)
    };
    let su = red.as_ref().map_or(inst, |r| &r.instance);
    let violations = su.validate();
    if !violations.is_empty() {
        return Err(SolveError::InvalidInstance(violations).into());
    }
    let g = SideInfoGraph::from_instance(su).map_err(SolveError::from)?;
    let omega = omega_lower_bound(&g, caps.max_clique_n)?.len();
    let rank = minrk2(&g, caps.max_free)?.rank;
    let phi = exact_clique_partition(&g.idc_graph(), caps.max_partition_n)?.len();
    let n = su.n();

    let mut report = CheckReport {
        n,
        omega,
        minrk2: rank,
        phi,
        lengths: Vec::new(),
        violations: Vec::new(),
    };
    let mut expect = |ok: bool, msg: String| {
        if !ok {
            report.violations.push(msg);
        }
    };
    expect(omega <= rank, format!("omega {omega} > minrk2 {rank}"));
    expect(rank <= phi, format!("minrk2 {rank} > phi {phi}"));
    let mut lengths = Vec::new();
    for a in Algorithm::ALL {
        let run = solve(inst, a, SolveConfig::default())?;
        let l = run.code.len();
        expect(verify_code_valid(inst, &run.code).valid, format!("{a} code is invalid"));
        expect(rank <= l, format!("minrk2 {rank} > ell({a}) {l}"));
        expect(l <= n, format!("ell({a}) {l} > n {n}"));
        if let Algorithm::Plain(_) = a {
            expect(phi <= l, format!("phi {phi} > ell({a}) {l}"));
        }
        lengths.push((a, l));
    }
    for &(a, l) in &lengths {
        if let Algorithm::Ucic(p) = a {
            let plain = lengths
                .iter()
                .find(|(b, _)| *b == Algorithm::Plain(p))
                .map(|&(_, l)| l)
                .expect("every partitioner has a plain run");
            expect(l <= plain, format!("ell({a}) {l} > ell({p}) {plain}"));
        }
    }
    report.lengths = lengths;
    Ok(report)
}
