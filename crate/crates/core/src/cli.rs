//! The `polyembed` command line.
//!
//! Exit codes: 0 success / valid / feasible, 1 a well-formed negative answer
//! (invalid embedding, infeasible instance, no partition), 2 usage or input
//! error, 3 timeout.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use crate::model::{Embedding, EmbeddingInstance, PointSet, RawPoints, RawTree};
use crate::reduction::{brute_force_3p, build_instance, extract_partition, validate_3p, ReductionMeta};
use crate::render::render_svg;
use crate::solver::{decide_embedding, embed_tree_unconstrained, SolveOutcome, SolverConfig};
use crate::verifier::verify_embedding;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_TIMEOUT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "polyembed", version, about = "Tree embeddings on point sets inside simple polygons")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate an embedding instance from a 3-partition instance.
    Gen {
        #[arg(long = "B")]
        target: u64,
        #[arg(long = "a", value_delimiter = ',', required = true)]
        values: Vec<u64>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        meta: PathBuf,
    },
    /// Decide whether an instance admits an embedding.
    Solve {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long = "timeout-ms")]
        timeout_ms: Option<u64>,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Check an embedding against an instance.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        embedding: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Read the 3-partition out of an embedding of a generated instance.
    Extract {
        #[arg(long)]
        meta: PathBuf,
        #[arg(long)]
        embedding: PathBuf,
    },
    /// Exhaustively solve a small 3-partition instance.
    Brute3p {
        #[arg(long = "B")]
        target: u64,
        #[arg(long = "a", value_delimiter = ',', required = true)]
        values: Vec<u64>,
    },
    /// Draw an instance, optionally with an embedding, as SVG.
    Render {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        embedding: Option<PathBuf>,
        #[arg(long)]
        meta: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Embed a tree on points in general position, no polygon.
    EmbedFree {
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(rendered.as_bytes())
            } else {
                out.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_INPUT
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn load_instance(path: &Path) -> Result<EmbeddingInstance> {
    EmbeddingInstance::from_json(&read(path)?).with_context(|| format!("instance {}", path.display()))
}

fn load_embedding(path: &Path) -> Result<Embedding> {
    Embedding::from_json(&read(path)?).with_context(|| format!("embedding {}", path.display()))
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Gen {
            target,
            values,
            out: out_path,
            meta,
        } => {
            let tp = validate_3p(target, &values)?;
            let (inst, m) = build_instance(&tp)?;
            write(&out_path, &inst.to_json())?;
            write(&meta, &m.to_json())?;
            writeln!(
                out,
                "n={} B={} points={} polygon_vertices={}",
                m.n,
                m.target,
                inst.points().len(),
                inst.polygon().len()
            )?;
            Ok(EXIT_OK)
        }
        Command::Solve {
            input,
            out: out_path,
            timeout_ms,
            threads,
        } => {
            let inst = load_instance(&input)?;
            let cfg = SolverConfig {
                time_limit: timeout_ms.map(Duration::from_millis),
                thread_count: threads,
                ..SolverConfig::default()
            };
            match decide_embedding(&inst, &cfg)? {
                SolveOutcome::Embedded(emb) => {
                    write(&out_path, &emb.to_json())?;
                    writeln!(out, "embedded")?;
                    Ok(EXIT_OK)
                }
                SolveOutcome::Infeasible => {
                    writeln!(out, "infeasible")?;
                    Ok(EXIT_NEGATIVE)
                }
                SolveOutcome::TimedOut(elapsed) => {
                    writeln!(out, "timed out after {} ms", elapsed.as_millis())?;
                    Ok(EXIT_TIMEOUT)
                }
            }
        }
        Command::Verify {
            input,
            embedding,
            report,
        } => {
            let inst = load_instance(&input)?;
            let emb = load_embedding(&embedding)?;
            let r = verify_embedding(&inst, &emb)?;
            if let Some(path) = report {
                write(&path, &r.to_json())?;
            }
            if r.valid {
                writeln!(out, "valid")?;
                Ok(EXIT_OK)
            } else {
                writeln!(out, "invalid: {} violation(s)", r.violations.len())?;
                for v in &r.violations {
                    writeln!(out, "  {:?} edges={:?} points={:?}", v.kind, v.edges, v.points)?;
                }
                Ok(EXIT_NEGATIVE)
            }
        }
        Command::Extract { meta, embedding } => {
            let m = ReductionMeta::from_json(&read(&meta)?)?;
            let emb = load_embedding(&embedding)?;
            let partition = extract_partition(&m, &emb)?;
            out.write_all(partition.to_json().as_bytes())?;
            Ok(EXIT_OK)
        }
        Command::Brute3p { target, values } => {
            let tp = validate_3p(target, &values)?;
            match brute_force_3p(&tp)? {
                Some(p) => {
                    out.write_all(p.to_json().as_bytes())?;
                    Ok(EXIT_OK)
                }
                None => {
                    writeln!(out, "no partition")?;
                    Ok(EXIT_NEGATIVE)
                }
            }
        }
        Command::Render {
            input,
            embedding,
            meta,
            out: out_path,
        } => {
            let inst = load_instance(&input)?;
            let emb = embedding.as_deref().map(load_embedding).transpose()?;
            let m = match meta {
                Some(path) => Some(ReductionMeta::from_json(&read(&path)?)?),
                None => None,
            };
            write(&out_path, &render_svg(&inst, emb.as_ref(), m.as_ref())?)?;
            Ok(EXIT_OK)
        }
        Command::EmbedFree {
            points,
            tree,
            out: out_path,
        } => {
            let raw: RawPoints = crate::model::parse_json(&read(&points)?)?;
            let pts = PointSet::new(raw.points)?;
            let raw_tree: RawTree = crate::model::parse_json(&read(&tree)?)?;
            let t = raw_tree.to_tree()?;
            if t.node_count() != pts.len() {
                bail!(
                    "SizeMismatch: tree has {} nodes but {} points were given",
                    t.node_count(),
                    pts.len()
                );
            }
            let emb = embed_tree_unconstrained(&t, &pts)?;
            write(&out_path, &emb.to_json())?;
            Ok(EXIT_OK)
        }
    }
}
