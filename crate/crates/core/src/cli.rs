//! Command-line front end.
//!
//! Every subcommand prints canonical JSON on stdout. Exit codes: 0 on
//! success (or a passing verification), 1 when verification fails, 2 on
//! bad input, 3 when a search budget runs out.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::allocator::{
    allocate_forest, allocate_general, allocate_unicyclic_union, verify_allocation, verify_partition, AgentPartition,
    IntersectionMode, VerificationReport,
};
use crate::error::{Error, Result};
use crate::instances::{
    check_positive_value_bound, from_json, gen_cycle_counterexample, gen_random_forest_instance, to_canonical_json,
    AllocationDoc, InstanceDoc, MmsDoc, PartitionDoc, PartitionsDoc,
};
use crate::metric_graph::MetricGraph;
use crate::mms::{maximin_share, mms_discretized, mms_path_exact, MmsResult};

#[derive(Parser, Debug)]
#[command(name = "graphcake", version, about = "Maximin-share division of graphical cakes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate an instance document.
    Gen {
        #[command(subcommand)]
        generator: Generator,
    },
    /// Maximin share of one agent.
    Mms {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        agent: usize,
        #[arg(long)]
        k: usize,
        /// Grid spacing; forces the discretized oracle.
        #[arg(long)]
        resolution: Option<f64>,
        #[arg(long, value_enum, default_value_t = OracleChoice::Auto)]
        oracle: OracleChoice,
    },
    /// Maximin partition of one agent, or of every agent when `--agent` is
    /// omitted.
    Partition {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        agent: Option<usize>,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        resolution: Option<f64>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Allocate pieces from one partition per agent.
    Allocate {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum)]
        method: AllocMethod,
        /// Partitions file; defaults to the partitions declared in the
        /// instance, then to maximin partitions computed on the spot.
        #[arg(long)]
        partitions: Option<PathBuf>,
        #[arg(long)]
        resolution: Option<f64>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Verify an allocation, or the agents' partitions when no allocation
    /// is given.
    Verify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        allocation: Option<PathBuf>,
        /// Check containment of a part; without a file the instance's
        /// declared partitions are used.
        #[arg(long, num_args = 0..=1)]
        partitions: Option<Option<PathBuf>>,
        /// One threshold for everybody or a comma-separated list per agent.
        #[arg(long, value_delimiter = ',')]
        min_values: Option<Vec<f64>>,
        #[arg(long, value_enum, default_value_t = ModeArg::Disjoint)]
        mode: ModeArg,
    },
    /// Minimum feedback vertex set and circuit rank.
    Fvs {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Largest number of agents a separated allocation can serve positive
    /// value, on instances whose valuable components are cycles.
    PositiveBound {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        resolution: Option<f64>,
    },
}

#[derive(Subcommand, Debug)]
enum Generator {
    /// Union of cycles where `min(n + r, 2n - 1) - 1` parts do not suffice.
    CycleCounterexample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        s: f64,
        /// Defaults to `min(s/20, s/(4n))`.
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Random forest with random valid partitions; `--count` instances from
    /// consecutive seeds are printed as a JSON array.
    RandomForest {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        trees: usize,
        #[arg(long, default_value_t = 6)]
        vertices: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        s: f64,
        #[arg(long)]
        count: Option<usize>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OracleChoice {
    Auto,
    PathExact,
    Discretized,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AllocMethod {
    Forest,
    General,
    Unicyclic,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Disjoint,
    FiniteOverlap,
}

enum Outcome {
    Done(String),
    Verified(String, bool),
}

/// Maps `f` over `items` on up to `jobs` threads, keeping input order.
fn parallel_map<T: Sync, U: Send>(jobs: usize, items: &[T], f: impl Fn(&T) -> U + Sync) -> Vec<U> {
    let jobs = jobs.max(1).min(items.len().max(1));
    if jobs == 1 {
        return items.iter().map(f).collect();
    }
    let chunk = items.len().div_ceil(jobs);
    std::thread::scope(|scope| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|part| {
                let f = &f;
                scope.spawn(move || part.iter().map(f).collect::<Vec<U>>())
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker thread panicked"))
            .collect()
    })
}

fn in_file(path: &Path, e: Error) -> Error {
    match e {
        Error::Json(m) => Error::Json(format!("{}: {m}", path.display())),
        other => other,
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::InvalidParameters(format!("{}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<(InstanceDoc, MetricGraph)> {
    let doc: InstanceDoc = from_json(&read(path)?).map_err(|e| in_file(path, e))?;
    let g = doc.graph()?;
    Ok((doc, g))
}

fn load_partitions(path: &Path, g: &MetricGraph) -> Result<Vec<AgentPartition>> {
    let doc: PartitionsDoc = from_json(&read(path)?).map_err(|e| in_file(path, e))?;
    doc.to_partitions(g)
}

fn oracle(doc: &InstanceDoc, g: &MetricGraph, agent: usize, k: usize, resolution: Option<f64>) -> Result<MmsResult> {
    let v = doc.valuation(g, agent)?;
    let mut r = match resolution {
        Some(_) => mms_discretized(&v, g, k, doc.separation, resolution)?,
        None => maximin_share(&v, g, k, doc.separation)?,
    };
    r.partition.agent = agent;
    Ok(r)
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    to_canonical_json(value)
}

fn thresholds(values: &Option<Vec<f64>>, n: usize) -> Result<Option<Vec<f64>>> {
    match values.as_deref() {
        None => Ok(None),
        Some([one]) => Ok(Some(vec![*one; n])),
        Some(list) if list.len() == n => Ok(Some(list.to_vec())),
        Some(list) => Err(Error::InvalidParameters(format!(
            "{} minimum values given for {n} agents",
            list.len()
        ))),
    }
}

fn merge_reports(reports: Vec<VerificationReport>) -> VerificationReport {
    let mut out = VerificationReport {
        passed: true,
        ..Default::default()
    };
    for r in reports {
        out.passed &= r.passed;
        out.checks_run += r.checks_run;
        out.failures.extend(r.failures);
    }
    out
}

fn execute(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Gen { generator } => match generator {
            Generator::CycleCounterexample { n, r, s, eps } => {
                let eps = eps.unwrap_or_else(|| (s / 20.0).min(s / (4.0 * n.max(1) as f64)));
                Ok(Outcome::Done(gen_cycle_counterexample(n, r, s, eps)?.to_json()?))
            }
            Generator::RandomForest {
                seed,
                trees,
                vertices,
                n,
                s,
                count,
                jobs,
            } => match count {
                None => Ok(Outcome::Done(gen_random_forest_instance(seed, trees, vertices, n, s)?.to_json()?)),
                Some(count) => {
                    let seeds: Vec<u64> = (0..count as u64).map(|i| seed + i).collect();
                    let docs = parallel_map(jobs, &seeds, |&sd| gen_random_forest_instance(sd, trees, vertices, n, s));
                    let docs: Vec<InstanceDoc> = docs.into_iter().collect::<Result<_>>()?;
                    Ok(Outcome::Done(json(&docs)?))
                }
            },
        },
        Command::Mms {
            instance,
            agent,
            k,
            resolution,
            oracle: choice,
        } => {
            let (doc, g) = load_instance(&instance)?;
            let r = match choice {
                OracleChoice::Auto => oracle(&doc, &g, agent, k, resolution)?,
                OracleChoice::PathExact => {
                    let mut r = mms_path_exact(&doc.valuation(&g, agent)?, &g, k, doc.separation)?;
                    r.partition.agent = agent;
                    r
                }
                OracleChoice::Discretized => {
                    let mut r = mms_discretized(&doc.valuation(&g, agent)?, &g, k, doc.separation, resolution)?;
                    r.partition.agent = agent;
                    r
                }
            };
            Ok(Outcome::Done(json(&MmsDoc::from_result(&g, &r))?))
        }
        Command::Partition {
            instance,
            agent,
            k,
            resolution,
            jobs,
        } => {
            let (doc, g) = load_instance(&instance)?;
            match agent {
                Some(a) => {
                    let r = oracle(&doc, &g, a, k, resolution)?;
                    Ok(Outcome::Done(json(&PartitionDoc::from_partition(&g, &r.partition))?))
                }
                None => {
                    let agents: Vec<usize> = (0..doc.agents.len()).collect();
                    let rs = parallel_map(jobs, &agents, |&a| oracle(&doc, &g, a, k, resolution));
                    let ps: Vec<AgentPartition> = rs.into_iter().map(|r| r.map(|r| r.partition)).collect::<Result<_>>()?;
                    Ok(Outcome::Done(json(&PartitionsDoc::from_partitions(&g, &ps))?))
                }
            }
        }
        Command::Allocate {
            instance,
            method,
            partitions,
            resolution,
            jobs,
        } => {
            let (doc, g) = load_instance(&instance)?;
            let s = doc.separation;
            let n = doc.agents.len();
            let parts = match partitions {
                Some(path) => load_partitions(&path, &g)?,
                None if doc.agents.iter().all(|a| a.partition.is_some()) => doc.partitions(&g)?,
                None => {
                    let k = match method {
                        AllocMethod::Forest => n,
                        AllocMethod::General => n + g.fvs().len(),
                        AllocMethod::Unicyclic => {
                            let cyclic = g.components().iter().filter(|c| !g.restrict(c).is_forest()).count();
                            (n + cyclic).min((2 * n).saturating_sub(1)).max(1)
                        }
                    };
                    let agents: Vec<usize> = (0..n).collect();
                    let rs = parallel_map(jobs, &agents, |&a| oracle(&doc, &g, a, k, resolution));
                    rs.into_iter().map(|r| r.map(|r| r.partition)).collect::<Result<_>>()?
                }
            };
            let alloc = match method {
                AllocMethod::Forest => allocate_forest(&g, &parts, s)?,
                AllocMethod::General => allocate_general(&g, &parts, s)?,
                AllocMethod::Unicyclic => allocate_unicyclic_union(&g, &parts, s)?.0,
            };
            Ok(Outcome::Done(json(&AllocationDoc::from_allocation(&g, &alloc))?))
        }
        Command::Verify {
            instance,
            allocation,
            partitions,
            min_values,
            mode,
        } => {
            let (doc, g) = load_instance(&instance)?;
            let n = doc.agents.len();
            let parts = match &partitions {
                Some(Some(path)) => Some(load_partitions(path, &g)?),
                Some(None) => Some(doc.partitions(&g)?),
                None => None,
            };
            let mode = match mode {
                ModeArg::Disjoint => IntersectionMode::Disjoint,
                ModeArg::FiniteOverlap => IntersectionMode::FiniteOverlap,
            };
            let ts = thresholds(&min_values, n)?;
            let vals = if ts.is_some() { Some(doc.valuations(&g)?) } else { None };
            let report = match allocation {
                Some(path) => {
                    let adoc: AllocationDoc =
                        from_json(&read(&path)?).map_err(|e| in_file(&path, e))?;
                    let alloc = adoc.to_allocation(&g)?;
                    verify_allocation(&g, &alloc, adoc.s, mode, parts.as_deref(), vals.as_deref(), ts.as_deref())
                }
                None => {
                    let parts = match parts {
                        Some(p) => p,
                        None => doc.partitions(&g)?,
                    };
                    merge_reports(
                        parts
                            .iter()
                            .map(|p| {
                                let v = vals.as_ref().map(|vs| &vs[p.agent.min(n.saturating_sub(1))]);
                                verify_partition(&g, p, v, ts.as_ref().map(|t| t[p.agent.min(n.saturating_sub(1))]))
                            })
                            .collect(),
                    )
                }
            };
            let passed = report.passed;
            Ok(Outcome::Verified(json(&report)?, passed))
        }
        Command::Fvs { instance } => {
            let (_, g) = load_instance(&instance)?;
            let out = json!({ "fvs": g.fvs(), "circuit_rank": g.circuit_rank() });
            Ok(Outcome::Done(json(&out)?))
        }
        Command::PositiveBound { instance, resolution } => {
            let (doc, _) = load_instance(&instance)?;
            let best = check_positive_value_bound(&doc, resolution)?;
            Ok(Outcome::Done(json(&json!({ "max_served": best, "agents": doc.agents.len() }))?))
        }
    }
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match execute(cli) {
        Ok(Outcome::Done(text)) => {
            let _ = out.write_all(text.as_bytes());
            0
        }
        Ok(Outcome::Verified(text, passed)) => {
            let _ = out.write_all(text.as_bytes());
            if passed {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::BudgetExceeded(_) => 3,
                _ => 2,
            }
        }
    }
}
