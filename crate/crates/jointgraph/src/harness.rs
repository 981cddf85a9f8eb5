//! Seed-count and embedding-dimension sweeps, with CSV emission.
//!
//! Every sweep cell draws from its own stream derived from the configured
//! seed and the cell coordinates, and records are sorted before they are
//! written, so output never depends on scheduling.

use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use jointgraph_core::classify::{ClassificationSweep, ClassifierConfig, Target, VertexLabels};
use jointgraph_core::sgm::{
    chance_accuracy, matching_accuracy, sgm_match, Matching, SeedSet, SgmConfig,
};
use jointgraph_core::stats;
use jointgraph_core::GraphPair;

use crate::error::{Error, Result};

/// Seed counts `0, 20, ..., 180`.
pub fn default_m_values() -> Vec<usize> {
    (0..=180).step_by(20).collect()
}

/// Dimensions `2, 5, ..., 119`.
pub fn default_d_values() -> Vec<usize> {
    (2..=119).step_by(3).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SgmSweepConfig {
    pub m_values: Vec<usize>,
    pub replicates: usize,
    pub rng_seed: u64,
    pub sgm: SgmConfig,
}

impl Default for SgmSweepConfig {
    fn default() -> Self {
        SgmSweepConfig {
            m_values: default_m_values(),
            replicates: 100,
            rng_seed: 0,
            sgm: SgmConfig::default(),
        }
    }
}

impl SgmSweepConfig {
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::Validation("replicates must be at least 1".into()));
        }
        if let Some(&m) = self.m_values.iter().find(|&&m| m >= n) {
            return Err(Error::Validation(format!(
                "seed count {m} must be below n = {n}"
            )));
        }
        self.sgm.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassSweepConfig {
    pub d_values: Vec<usize>,
    pub classifier: ClassifierConfig,
    pub targets: Vec<Target>,
}

impl Default for ClassSweepConfig {
    fn default() -> Self {
        ClassSweepConfig {
            d_values: default_d_values(),
            classifier: ClassifierConfig::default(),
            targets: vec![Target::G1, Target::G2],
        }
    }
}

impl ClassSweepConfig {
    pub fn validate(&self, n: usize) -> Result<()> {
        if let Some(&d) = self.d_values.iter().find(|&&d| d == 0 || d > 2 * n) {
            return Err(Error::Validation(format!(
                "dimension {d} outside 1..={}",
                2 * n
            )));
        }
        if self.targets.is_empty() {
            return Err(Error::Validation("no target graph selected".into()));
        }
        self.classifier.validate()?;
        Ok(())
    }
}

// Variant order matches the lexicographic order of the printed names, so
// sorting typed records sorts the CSV rows.

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Experiment {
    ClassSweep,
    SgmSweep,
}

impl Experiment {
    pub fn as_str(self) -> &'static str {
        match self {
            Experiment::ClassSweep => "class_sweep",
            Experiment::SgmSweep => "sgm_sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Metric {
    Chance,
    Delta,
    JointError,
    SingleError,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Chance => "chance",
            Metric::Delta => "delta",
            Metric::JointError => "joint_error",
            Metric::SingleError => "single_error",
        }
    }
}

/// A replicate index, or the marker for a leave-one-out estimate on one
/// target graph. Indices sort numerically and before markers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Replicate {
    Index(usize),
    Loocv(Target),
}

impl fmt::Display for Replicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Replicate::Index(r) => write!(f, "{r}"),
            Replicate::Loocv(t) => write!(f, "loocv:{}", t.as_str()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentRecord {
    pub experiment: Experiment,
    /// `m` for seed sweeps, `d` for classification sweeps.
    pub parameter: usize,
    pub replicate: Replicate,
    pub metric: Metric,
    /// Always in `[0, 1]`.
    pub value: f64,
}

impl ExperimentRecord {
    fn key(&self) -> (Experiment, usize, Replicate, Metric) {
        (self.experiment, self.parameter, self.replicate, self.metric)
    }
}

pub fn sort_records(records: &mut [ExperimentRecord]) {
    records.sort_by(|a, b| a.key().cmp(&b.key()).then(a.value.total_cmp(&b.value)));
}

/// SplitMix64 finalizer over the seed and cell coordinates.
fn derive_seed(rng_seed: u64, parameter: usize, replicate: usize) -> u64 {
    let mut z = rng_seed;
    for word in [parameter as u64, replicate as u64] {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_add(word);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
    }
    z
}

/// The seed set used for cell `(m, replicate)`, sorted ascending.
pub fn seed_set_for(n: usize, m: usize, rng_seed: u64, replicate: usize) -> Result<(SeedSet, u64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(rng_seed, m, replicate));
    let mut idx = sample(&mut rng, n, m).into_vec();
    idx.sort_unstable();
    let solver_seed = rng.gen();
    Ok((SeedSet::new(idx, n)?, solver_seed))
}

/// Matching accuracy against the identity correspondence for every
/// `(m, replicate)` cell, plus the chance level `1 / (n - m)` per cell.
pub fn run_sgm_sweep(pair: &GraphPair, cfg: &SgmSweepConfig) -> Result<Vec<ExperimentRecord>> {
    let n = pair.n();
    cfg.validate(n)?;
    let truth = Matching::identity(n);
    let cells: Vec<(usize, usize)> = cfg
        .m_values
        .iter()
        .flat_map(|&m| (0..cfg.replicates).map(move |r| (m, r)))
        .collect();
    let per_cell = cells
        .par_iter()
        .map(|&(m, r)| -> Result<[ExperimentRecord; 2]> {
            let (seeds, solver_seed) = seed_set_for(n, m, cfg.rng_seed, r)?;
            let sgm = SgmConfig {
                rng_seed: solver_seed,
                ..cfg.sgm
            };
            let found = sgm_match(pair, &seeds, &sgm)?;
            let delta = matching_accuracy(&found, &truth, &seeds)?;
            let record = |metric, value| ExperimentRecord {
                experiment: Experiment::SgmSweep,
                parameter: m,
                replicate: Replicate::Index(r),
                metric,
                value,
            };
            Ok([
                record(Metric::Delta, delta),
                record(Metric::Chance, chance_accuracy(n, m)?),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut records: Vec<ExperimentRecord> = per_cell.into_iter().flatten().collect();
    sort_records(&mut records);
    Ok(records)
}

/// Leave-one-out joint and single-graph errors for every `(d, target)`.
///
/// The single-graph embedding only exists for `d <= n`; above that only
/// the joint error is recorded.
pub fn run_class_sweep(pair: &GraphPair, cfg: &ClassSweepConfig) -> Result<Vec<ExperimentRecord>> {
    let n = pair.n();
    cfg.validate(n)?;
    let labels = VertexLabels::from_table(pair.vertices())?;
    let sweep = ClassificationSweep::new(pair)?;
    let cells: Vec<(usize, Target)> = cfg
        .d_values
        .iter()
        .flat_map(|&d| cfg.targets.iter().map(move |&t| (d, t)))
        .collect();
    let per_cell = cells
        .par_iter()
        .map(|&(d, target)| -> Result<Vec<ExperimentRecord>> {
            let record = |metric, value| ExperimentRecord {
                experiment: Experiment::ClassSweep,
                parameter: d,
                replicate: Replicate::Loocv(target),
                metric,
                value,
            };
            let mut out = vec![record(
                Metric::JointError,
                sweep.joint_error(&labels, d, &cfg.classifier, target)?,
            )];
            if d <= n {
                out.push(record(
                    Metric::SingleError,
                    sweep.single_error(&labels, d, &cfg.classifier, target)?,
                ));
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut records: Vec<ExperimentRecord> = per_cell.into_iter().flatten().collect();
    sort_records(&mut records);
    Ok(records)
}

/// Mean and standard deviation of one metric at one parameter value.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub experiment: Experiment,
    pub parameter: usize,
    /// Set for classification sweeps, which summarize per target graph.
    pub target: Option<Target>,
    pub metric: Metric,
    pub mean: f64,
    pub std_dev: f64,
    pub standard_error: f64,
    pub count: usize,
}

/// Groups records by experiment, parameter, target and metric.
pub fn summarize(records: &[ExperimentRecord]) -> Vec<Summary> {
    let mut keyed: Vec<_> = records
        .iter()
        .map(|r| {
            let target = match r.replicate {
                Replicate::Loocv(t) => Some(t),
                Replicate::Index(_) => None,
            };
            ((r.experiment, r.parameter, target, r.metric), r.value)
        })
        .collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut out = Vec::new();
    for group in keyed.chunk_by(|a, b| a.0 == b.0) {
        let (experiment, parameter, target, metric) = group[0].0;
        let values: Vec<f64> = group.iter().map(|g| g.1).collect();
        out.push(Summary {
            experiment,
            parameter,
            target,
            metric,
            mean: stats::mean(&values),
            std_dev: stats::std_dev(&values),
            standard_error: stats::standard_error(&values),
            count: values.len(),
        });
    }
    out
}

/// Nine significant digits, shortest of fixed or exponent form as `%.9g`
/// would choose, with trailing zeros removed.
pub fn format_value(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

pub const CSV_HEADER: &str = "experiment,parameter,replicate,metric,value";

/// The CSV text for `records`, sorted.
pub fn records_csv(records: &[ExperimentRecord]) -> String {
    let mut sorted = records.to_vec();
    sort_records(&mut sorted);
    let mut out = String::with_capacity(32 * (sorted.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in &sorted {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.experiment.as_str(),
            r.parameter,
            r.replicate,
            r.metric.as_str(),
            format_value(r.value)
        ));
    }
    out
}

pub fn emit_csv(records: &[ExperimentRecord], path: &Path) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(records_csv(records).as_bytes())
        .map_err(|e| Error::io(path, e))
}
