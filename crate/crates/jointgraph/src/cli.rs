//! Command-line interface.
//!
//! Exit status is 0 on success, 2 when a file cannot be read or written,
//! and 1 for every other failure, including malformed arguments.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use jointgraph_core::classify::{ClassifierConfig, Target};
use jointgraph_core::sgm::SgmConfig;
use jointgraph_core::synth::{sample_correlated_pair, SbmSpec};
use jointgraph_core::Matrix;

use crate::error::{Error, Result};
use crate::harness::{emit_csv, run_class_sweep, run_sgm_sweep, ClassSweepConfig, SgmSweepConfig};
use crate::io;
use crate::plot::{emit_plot, PlotKind};

#[derive(Debug, Parser)]
#[command(
    name = "jointgraph",
    version,
    about = "Seeded matching and joint embedding of graph pairs"
)]
pub struct Cli {
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true, env = "JOINTGRAPH_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Align two edge lists and a label file into a pair directory.
    Preprocess(PreprocessArgs),
    /// Matching accuracy as a function of the number of seeds.
    SgmSweep(SgmSweepArgs),
    /// Joint against single-graph classification error per dimension.
    ClassSweep(ClassSweepArgs),
    /// Sample a correlated block-model pair into a pair directory.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct PreprocessArgs {
    #[arg(long)]
    pub edges_a: PathBuf,
    #[arg(long)]
    pub edges_b: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct SgmSweepArgs {
    #[arg(long)]
    pub pair_dir: PathBuf,
    /// Seed counts, e.g. `0:180:20` or `0,10,20`.
    #[arg(long, default_value = "0:180:20", value_parser = parse_list)]
    pub m_values: IntList,
    #[arg(long, default_value_t = 100)]
    pub replicates: usize,
    #[arg(long, default_value_t = 0)]
    pub rng_seed: u64,
    /// Frank-Wolfe iteration cap.
    #[arg(long, default_value_t = SgmConfig::default().max_iterations)]
    pub max_iterations: usize,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassifierKind {
    Knn,
    SvmRbf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TargetArg {
    G1,
    G2,
    Both,
}

impl TargetArg {
    fn targets(self) -> Vec<Target> {
        match self {
            TargetArg::G1 => vec![Target::G1],
            TargetArg::G2 => vec![Target::G2],
            TargetArg::Both => vec![Target::G1, Target::G2],
        }
    }
}

#[derive(Debug, Args)]
pub struct ClassSweepArgs {
    #[arg(long)]
    pub pair_dir: PathBuf,
    /// Embedding dimensions, e.g. `2:119:3`.
    #[arg(long, default_value = "2:119:3", value_parser = parse_list)]
    pub d_values: IntList,
    #[arg(long, value_enum, default_value_t = ClassifierKind::Knn)]
    pub classifier: ClassifierKind,
    /// Neighbours for `knn`; must be odd.
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    /// RBF width for `svm-rbf`; defaults to 1/d.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Soft-margin penalty for `svm-rbf`.
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, value_enum, default_value_t = TargetArg::Both)]
    pub target: TargetArg,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Block sizes, e.g. `50,50,50`.
    #[arg(long, value_parser = parse_list)]
    pub blocks: IntList,
    /// Symmetric block probability matrix, one row per line.
    #[arg(long)]
    pub probs: PathBuf,
    #[arg(long)]
    pub rho: f64,
    #[arg(long, default_value_t = 0)]
    pub rng_seed: u64,
    #[arg(long)]
    pub out_dir: PathBuf,
}

/// A parsed integer list. Wrapped so clap treats it as one value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntList(pub Vec<usize>);

impl IntList {
    /// Sweep parameters: sorted, each value once.
    fn sweep_values(&self) -> Vec<usize> {
        let mut v = self.0.clone();
        v.sort_unstable();
        v.dedup();
        v
    }
}

fn parse_int(token: &str) -> std::result::Result<usize, String> {
    token
        .trim()
        .parse()
        .map_err(|_| format!("`{token}` is not a non-negative integer"))
}

/// Comma-separated integers and inclusive `start:end:step` ranges, in the
/// order given.
pub fn parse_list(s: &str) -> std::result::Result<IntList, String> {
    let mut out = Vec::new();
    for item in s.split(',') {
        if item.trim().is_empty() {
            return Err(format!("empty entry in list `{s}`"));
        }
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [one] => out.push(parse_int(one)?),
            [a, b, step] => {
                let (a, b, step) = (parse_int(a)?, parse_int(b)?, parse_int(step)?);
                if step == 0 {
                    return Err(format!("range `{item}` has zero step"));
                }
                if a > b {
                    return Err(format!("range `{item}` starts after it ends"));
                }
                out.extend((a..=b).step_by(step));
            }
            _ => {
                return Err(format!(
                    "`{item}` is neither an integer nor a start:end:step range"
                ))
            }
        }
    }
    Ok(IntList(out))
}

fn preprocess(a: &PreprocessArgs) -> Result<()> {
    let p = io::preprocess_files(&a.edges_a, &a.edges_b, &a.labels)?;
    io::write_preprocessed(&a.out_dir, &p)?;
    print!("{}", p.report.render());
    Ok(())
}

fn sgm_sweep(a: &SgmSweepArgs) -> Result<()> {
    let pair = io::read_pair_dir(&a.pair_dir)?;
    let cfg = SgmSweepConfig {
        m_values: a.m_values.sweep_values(),
        replicates: a.replicates,
        rng_seed: a.rng_seed,
        sgm: SgmConfig {
            max_iterations: a.max_iterations,
            ..SgmConfig::default()
        },
    };
    let records = run_sgm_sweep(&pair, &cfg)?;
    emit_csv(&records, &a.out)?;
    if let Some(plot) = &a.plot {
        emit_plot(&records, plot, PlotKind::Errorbar)?;
    }
    Ok(())
}

fn class_sweep(a: &ClassSweepArgs) -> Result<()> {
    let pair = io::read_pair_dir(&a.pair_dir)?;
    if pair.vertices().labels().is_none() {
        return Err(Error::Validation(format!(
            "{}: class-sweep needs {}",
            a.pair_dir.display(),
            io::LABELS_FILE
        )));
    }
    let classifier = match a.classifier {
        ClassifierKind::Knn => ClassifierConfig::Knn { k: a.k },
        ClassifierKind::SvmRbf => ClassifierConfig::SvmRbf {
            gamma: a.gamma,
            c: a.c,
        },
    };
    let cfg = ClassSweepConfig {
        d_values: a.d_values.sweep_values(),
        classifier,
        targets: a.target.targets(),
    };
    let records = run_class_sweep(&pair, &cfg)?;
    emit_csv(&records, &a.out)?;
    if let Some(plot) = &a.plot {
        emit_plot(&records, plot, PlotKind::Lines)?;
    }
    Ok(())
}

fn synth(a: &SynthArgs) -> Result<()> {
    let rows = io::read_matrix(&a.probs)?;
    let k = rows.len();
    if rows.iter().any(|r| r.len() != k) {
        return Err(Error::Validation(format!(
            "{}: probability matrix must be square",
            a.probs.display()
        )));
    }
    let data: Vec<f64> = rows.into_iter().flatten().collect();
    let probs = Matrix::from_vec(k, k, data)?;
    let spec = SbmSpec::new(a.blocks.0.clone(), probs, a.rho)?;
    let pair = sample_correlated_pair(&spec, a.rng_seed)?;
    io::write_pair_dir(&a.out_dir, &pair)
}

pub fn execute(cli: &Cli) -> Result<()> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(Error::Validation("--threads must be at least 1".into()));
        }
        pool = pool.num_threads(t);
    }
    let pool = pool
        .build()
        .map_err(|e| Error::Validation(format!("cannot start worker pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Preprocess(a) => preprocess(a),
        Command::SgmSweep(a) => sgm_sweep(a),
        Command::ClassSweep(a) => class_sweep(a),
        Command::Synth(a) => synth(a),
    })
}

/// Parses `args` (including the program name), runs, and returns the exit
/// status. Diagnostics go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn list_syntax() {
        assert_eq!(
            parse_list("0:180:20").unwrap().0,
            (0..=180).step_by(20).collect::<Vec<_>>()
        );
        assert_eq!(parse_list("5").unwrap().0, vec![5]);
        assert_eq!(parse_list("10,2,2:8:3").unwrap().0, vec![10, 2, 2, 5, 8]);
        assert_eq!(
            parse_list("10,2,2:8:3").unwrap().sweep_values(),
            vec![2, 5, 8, 10]
        );
        assert_eq!(parse_list("15,15").unwrap().0, vec![15, 15]);
        assert_eq!(parse_list("2:119:3").unwrap().0.last(), Some(&119));
    }

    #[test]
    fn bad_lists_name_the_token() {
        assert!(parse_list("1,x").unwrap_err().contains("`x`"));
        assert!(parse_list("1:5").unwrap_err().contains("1:5"));
        assert!(parse_list("5:1:1").unwrap_err().contains("5:1:1"));
        assert!(parse_list("0:10:0").unwrap_err().contains("zero step"));
        assert!(parse_list("1,,2").is_err());
        assert!(parse_list("-3").unwrap_err().contains("-3"));
    }

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
