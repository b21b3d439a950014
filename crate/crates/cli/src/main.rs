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


//! `ucic`: generate, solve, verify and check index coding instances.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use ucic_core::harness::{mean_gains, rows_to_csv};
use ucic_core::{
    check_bounds, exact_clique_partition, generate, minrk2, omega_lower_bound,
    run_experiment, solve, symbol_name, verify_code_with, Algorithm, CodingGain, DecodeMode,
    ExperimentSpec, Family, Fixture, GenSpec, IndexCode, Instance, OracleCaps, OracleError,
    SideInfoGraph, SolveConfig, TieBreak,
};

#[derive(Parser)]
#[command(name = "ucic", version, about = "Index coding with clique partitions and piggybacking")]
struct Cli {
    /// Seed for generators, experiments and payload draws.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the per-iteration solver trace here.
    #[arg(long, global = true, value_name = "PATH")]
    trace: Option<PathBuf>,
    /// Write G and K in Graphviz format here.
    #[arg(long, global = true, value_name = "PATH")]
    dot: Option<PathBuf>,
    /// Output file (default: stdout).
    #[arg(short, long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance.
    Gen(GenArgs),
    /// Solve an instance and write the code file.
    Solve(SolveArgs),
    /// Check a code file against an instance.
    Verify {
        instance: PathBuf,
        code: PathBuf,
        /// Payload size in bytes (default: the instance's, else 1).
        #[arg(long)]
        payload_size: Option<usize>,
        /// Re-scan frames until nothing new decodes (diagnostic).
        #[arg(long)]
        fixpoint: bool,
    },
    /// Exact small-instance oracles.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Print ω, minrk₂, φ and every algorithm's ℓ; fail if the bounds break.
    Check {
        instance: PathBuf,
        #[command(flatten)]
        caps: CapArgs,
    },
    /// Sweep random instances and emit CSV.
    Experiment(ExperimentArgs),
    /// Built-in fixtures.
    #[command(subcommand)]
    Fixtures(FixturesCommand),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_parser = parse_family, required_unless_present = "fixture")]
    family: Option<Family>,
    #[arg(long, default_value_t = 10)]
    n: usize,
    #[arg(long, default_value_t = 0.05)]
    p_has: f64,
    #[arg(long, value_parser = parse_fixture, conflicts_with = "family")]
    fixture: Option<Fixture>,
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, short, default_value = "ucic-ldg", value_parser = parse_algorithm)]
    algorithm: Algorithm,
    #[arg(long, default_value = "clique-first", value_parser = parse_tie_break)]
    tie_break: TieBreak,
    /// Send one minimum clique per round instead of flushing the partition.
    #[arg(long)]
    continue_after_fallback: bool,
    /// Always use the round's fresh partition, never the previous leftover.
    #[arg(long)]
    fresh_partition_only: bool,
}

#[derive(Args)]
struct CapArgs {
    #[arg(long, default_value_t = ucic_core::oracle::DEFAULT_MAX_FREE)]
    max_free: usize,
    #[arg(long, default_value_t = ucic_core::oracle::DEFAULT_MAX_PARTITION_N)]
    max_partition_n: usize,
    #[arg(long, default_value_t = ucic_core::oracle::DEFAULT_MAX_CLIQUE_N)]
    max_clique_n: usize,
}

impl CapArgs {
    fn caps(&self) -> OracleCaps {
        OracleCaps {
            max_free: self.max_free,
            max_partition_n: self.max_partition_n,
            max_clique_n: self.max_clique_n,
        }
    }
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Minimum GF(2) rank of a matrix fitting G.
    Minrk2 {
        instance: PathBuf,
        #[arg(long, default_value_t = ucic_core::oracle::DEFAULT_MAX_FREE)]
        max_free: usize,
    },
    /// Exact minimum clique partition of K.
    Phi {
        instance: PathBuf,
        #[arg(long, default_value_t = ucic_core::oracle::DEFAULT_MAX_PARTITION_N)]
        max_n: usize,
    },
    /// Largest set of clients with no side information about each other.
    Omega {
        instance: PathBuf,
        #[arg(long, default_value_t = ucic_core::oracle::DEFAULT_MAX_CLIQUE_N)]
        max_n: usize,
    },
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [20, 30, 40, 50, 60])]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.05, 0.1])]
    p_has: Vec<f64>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, value_delimiter = ',', value_parser = parse_algorithm)]
    algorithms: Vec<Algorithm>,
    /// Print mean coding gains to stderr.
    #[arg(long)]
    summary: bool,
}

#[derive(Subcommand)]
enum FixturesCommand {
    /// List fixture names.
    List,
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse()
}

fn parse_fixture(s: &str) -> Result<Fixture, String> {
    s.parse().map_err(|e: ucic_core::GenError| e.to_string())
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse()
}

fn parse_tie_break(s: &str) -> Result<TieBreak, String> {
    s.parse()
}

/// Failure classes, mapped to exit codes 1, 2 and 3.
enum Failure {
    Usage(anyhow::Error),
    Validation(anyhow::Error),
    Invariant(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Validation(_) => 2,
            Failure::Invariant(_) => 3,
        }
    }

    fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Usage(e) | Failure::Validation(e) | Failure::Invariant(e) => e,
        }
    }
}

type Outcome = Result<(), Failure>;

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

fn validation(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Validation(e.into())
}

fn oracle_failure(e: OracleError) -> Failure {
    Failure::Usage(anyhow!("{e}; raise the cap or use a smaller instance"))
}

fn read_instance(path: &Path) -> Result<Instance, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(usage)?;
    let inst = Instance::parse(&text)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(validation)?;
    let violations = inst.validate();
    if !violations.is_empty() {
        let lines: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err(validation(anyhow!(
            "{} is not a valid instance:\n  {}",
            path.display(),
            lines.join("\n  ")
        )));
    }
    Ok(inst)
}

fn read_code(path: &Path) -> Result<IndexCode, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(usage)?;
    IndexCode::parse(&text)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(validation)
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(usage)
}

/// Writes to `--output` when given, otherwise to stdout.
fn emit(cli: &Cli, text: &str) -> Result<(), Failure> {
    match &cli.output {
        Some(p) => write_file(p, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).context("writing stdout").map_err(usage)
        }
    }
}

/// Graph views of the single-unicast form of `inst`.
fn single_unicast_graph(inst: &Instance) -> Result<SideInfoGraph, Failure> {
    let su = if inst.is_single_unicast() {
        inst.clone()
    } else {
        inst.reduce_to_single_unicast().map_err(validation)?.instance
    };
    SideInfoGraph::from_instance(&su).map_err(validation)
}

fn write_dot(cli: &Cli, inst: &Instance) -> Result<(), Failure> {
    if let Some(path) = &cli.dot {
        let g = single_unicast_graph(inst)?;
        write_file(path, &format!("{}{}", g.to_dot(), g.idc_graph().to_dot()))?;
    }
    Ok(())
}

fn names(vs: &[usize]) -> String {
    let v: Vec<String> = vs.iter().map(|&s| symbol_name(s)).collect();
    format!("{{{}}}", v.join(", "))
}

fn cmd_gen(cli: &Cli, args: &GenArgs) -> Outcome {
    let spec = GenSpec {
        family: args.family.unwrap_or(Family::Fixture),
        n: args.n,
        p_has: args.p_has,
        seed: cli.seed,
        fixture: args.fixture,
    };
    let inst = generate(&spec).map_err(usage)?;
    write_dot(cli, &inst)?;
    emit(cli, &inst.to_json())
}

fn cmd_solve(cli: &Cli, args: &SolveArgs) -> Outcome {
    let inst = read_instance(&args.instance)?;
    let config = SolveConfig {
        continue_after_fallback: args.continue_after_fallback,
        tie_break: args.tie_break,
        fresh_partition_only: args.fresh_partition_only,
    };
    let run = solve(&inst, args.algorithm, config).map_err(validation)?;
    let report = ucic_core::verify_code_valid(&inst, &run.code);
    if !report.valid {
        return Err(Failure::Invariant(anyhow!("{} produced an invalid code: {report}", args.algorithm)));
    }
    if let (Some(path), Some(trace)) = (&cli.trace, &run.trace) {
        write_file(path, &trace.to_lines())?;
    }
    write_dot(cli, &inst)?;
    let gain = CodingGain::new(inst.k, run.code.len())
        .map_or_else(|| "undefined".to_string(), |g| g.to_string());
    println!(
        "algorithm={} ell={} coding_gain={} fallback_used={}",
        args.algorithm,
        run.code.len(),
        gain,
        run.fallback_used()
    );
    match &cli.output {
        Some(p) => write_file(p, &format!("{}\n", run.code.to_json())),
        None => {
            println!("{}", run.code.to_json());
            Ok(())
        }
    }
}

fn cmd_verify(cli: &Cli, instance: &Path, code: &Path, payload_size: Option<usize>, fixpoint: bool) -> Outcome {
    let inst = read_instance(instance)?;
    let code = read_code(code)?;
    let mode = if fixpoint {
        DecodeMode::Fixpoint
    } else {
        DecodeMode::Sequential
    };
    let size = payload_size.unwrap_or(inst.payload_size());
    if size == 0 {
        return Err(usage(anyhow!("payload size must be positive")));
    }
    let report = verify_code_with(&inst, &code, size, ucic_core::codec::VERIFY_DRAWS, cli.seed, mode);
    println!("{report}");
    if report.valid {
        Ok(())
    } else {
        Err(validation(anyhow!("code does not satisfy every client")))
    }
}

fn cmd_oracle(cli: &Cli, cmd: &OracleCommand) -> Outcome {
    let out = match cmd {
        OracleCommand::Minrk2 { instance, max_free } => {
            let g = single_unicast_graph(&read_instance(instance)?)?;
            let m = minrk2(&g, *max_free).map_err(oracle_failure)?;
            format!(
                "minrk2 = {}\nrows/cols: {}\n{}\n",
                m.rank,
                names(&m.witness.vertices),
                m.witness.matrix()
            )
        }
        OracleCommand::Phi { instance, max_n } => {
            let g = single_unicast_graph(&read_instance(instance)?)?;
            let p = exact_clique_partition(&g.idc_graph(), *max_n).map_err(oracle_failure)?;
            let parts: Vec<String> = p.cliques().iter().map(|c| names(c)).collect();
            format!("phi = {}\n{}\n", p.len(), parts.join(" "))
        }
        OracleCommand::Omega { instance, max_n } => {
            let g = single_unicast_graph(&read_instance(instance)?)?;
            let w = omega_lower_bound(&g, *max_n).map_err(oracle_failure)?;
            format!("omega = {}\n{}\n", w.len(), names(&w))
        }
    };
    emit(cli, &out)
}

fn cmd_check(cli: &Cli, instance: &Path, caps: &CapArgs) -> Outcome {
    let inst = read_instance(instance)?;
    write_dot(cli, &inst)?;
    let report = check_bounds(&inst, caps.caps()).map_err(|e| match e {
        ucic_core::HarnessError::Oracle(o) => oracle_failure(o),
        other => validation(other),
    })?;
    emit(cli, &format!("{report}\n"))?;
    if report.violations.is_empty() {
        Ok(())
    } else {
        Err(Failure::Invariant(anyhow!("{} bound violation(s)", report.violations.len())))
    }
}

fn cmd_experiment(cli: &Cli, args: &ExperimentArgs) -> Outcome {
    let spec = ExperimentSpec {
        n_values: args.n.clone(),
        p_has_values: args.p_has.clone(),
        trials: args.trials,
        algorithms: if args.algorithms.is_empty() {
            Algorithm::ALL.to_vec()
        } else {
            args.algorithms.clone()
        },
        base_seed: cli.seed,
    };
    let rows = run_experiment(&spec).map_err(|e| match e {
        e @ ucic_core::HarnessError::InvalidCodeProduced { .. } => Failure::Invariant(e.into()),
        e @ ucic_core::HarnessError::BadSpec(_) => usage(e),
        e => validation(e),
    })?;
    if args.summary {
        for (n, p, a, mean) in mean_gains(&rows) {
            eprintln!("n={n} p_has={p} {a}: mean coding gain {mean:.4}");
        }
    }
    emit(cli, &rows_to_csv(&rows))
}

fn cmd_fixtures(cli: &Cli) -> Outcome {
    let mut out = String::new();
    for f in Fixture::ALL {
        let inst = ucic_core::fixture(f);
        out.push_str(&format!("{}\tn={}\n", f, inst.n()));
    }
    emit(cli, &out)
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Gen(args) => cmd_gen(cli, args),
        Command::Solve(args) => cmd_solve(cli, args),
        Command::Verify {
            instance,
            code,
            payload_size,
            fixpoint,
        } => cmd_verify(cli, instance, code, *payload_size, *fixpoint),
        Command::Oracle(cmd) => cmd_oracle(cli, cmd),
        Command::Check { instance, caps } => cmd_check(cli, instance, caps),
        Command::Experiment(args) => cmd_experiment(cli, args),
        Command::Fixtures(FixturesCommand::List) => cmd_fixtures(cli),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error());
            ExitCode::from(f.code())
        }
    }
}
