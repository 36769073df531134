//! Experiment orchestration: seeded instance suites, run matrices over
//! (problem × n × variant × p × noise scales), runtime estimation, CSV
//! reporting, and figure-data emitters.

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuits::ScheduledCircuit;
use crate::densim::MAX_QUBITS;
use crate::noise::{baseline_params, scale_params, NoiseParams};
use crate::problems::{gen_graph, gen_partition, ProblemInstance, ProblemKind};
use crate::qaoa::{
    run_rqaoa, run_variational, OptimizerConfig, Variant, VariantConfig,
};
use crate::{Error, Result};
use rand::SeedableRng;

/// Full description of an experiment suite. JSON-serializable
/// field-for-field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub problems: Vec<ProblemKind>,
    /// Problem sizes n.
    pub sizes: Vec<usize>,
    pub instances_per_size: usize,
    pub variants: Vec<Variant>,
    /// Layer counts p.
    pub layers: Vec<usize>,
    /// Depolarizing-scale grid values.
    pub d_depol: Vec<f64>,
    /// Thermal-scale grid values.
    pub d_thermal: Vec<f64>,
    #[serde(default = "default_shots")]
    pub shots_per_iteration: u64,
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    pub master_seed: u64,
    /// Worker threads; 0 = rayon default.
    #[serde(default)]
    pub jobs: usize,
    /// Edge probability of the random graphs.
    #[serde(default = "default_edge_prob")]
    pub edge_prob: f64,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    #[serde(default = "default_rqaoa_samples")]
    pub rqaoa_samples: u64,
    #[serde(default = "default_rqaoa_cutoff")]
    pub rqaoa_cutoff: usize,
    /// Base noise parameters before grid scaling.
    #[serde(default = "baseline_params")]
    pub noise: NoiseParams,
}

fn default_shots() -> u64 {
    1000
}
fn default_repeats() -> usize {
    3
}
fn default_edge_prob() -> f64 {
    0.5
}
fn default_rqaoa_samples() -> u64 {
    10
}
fn default_rqaoa_cutoff() -> usize {
    1
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.problems.is_empty()
            || self.sizes.is_empty()
            || self.variants.is_empty()
            || self.layers.is_empty()
            || self.d_depol.is_empty()
            || self.d_thermal.is_empty()
        {
            return Err(Error::invalid("all experiment lists must be nonempty"));
        }
        if self.instances_per_size == 0 || self.repeats == 0 {
            return Err(Error::invalid("instances_per_size and repeats must be >= 1"));
        }
        if self.layers.iter().any(|&p| p == 0) {
            return Err(Error::invalid("layer counts must be >= 1"));
        }
        if self.sizes.iter().any(|&n| n < 2 || n > MAX_QUBITS) {
            return Err(Error::Capacity(*self.sizes.iter().max().unwrap(), MAX_QUBITS));
        }
        if !(0.0..=1.0).contains(&self.edge_prob) {
            return Err(Error::invalid("edge_prob must lie in [0, 1]"));
        }
        if self
            .d_depol
            .iter()
            .chain(self.d_thermal.iter())
            .any(|&v| v < 0.0 || !v.is_finite())
        {
            return Err(Error::invalid("noise scales must be finite and nonnegative"));
        }
        self.noise.validate()
    }

    /// Small suite that runs in minutes on a workstation.
    pub fn desk(master_seed: u64) -> Self {
        ExperimentConfig {
            problems: vec![
                ProblemKind::MaxCut,
                ProblemKind::Partition,
                ProblemKind::VertexCover,
            ],
            sizes: vec![5, 6, 7],
            instances_per_size: 20,
            variants: vec![
                Variant::Standard,
                Variant::WsInit,
                Variant::Wsqaoa,
                Variant::Rqaoa,
            ],
            layers: vec![1],
            d_depol: vec![0.0, 1.0],
            d_thermal: vec![0.0, 1.0],
            shots_per_iteration: 1000,
            repeats: 3,
            master_seed,
            jobs: 0,
            edge_prob: 0.5,
            optimizer: OptimizerConfig::default(),
            rqaoa_samples: 10,
            rqaoa_cutoff: 1,
            noise: baseline_params(),
        }
    }

    /// Full-scale suite: 100 instances per size, n up to 10, p up to 4,
    /// 5×5 noise grid. Expect very long runtimes.
    pub fn paper(master_seed: u64) -> Self {
        ExperimentConfig {
            sizes: (5..=10).collect(),
            instances_per_size: 100,
            layers: vec![1, 2, 3, 4],
            d_depol: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            d_thermal: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            ..Self::desk(master_seed)
        }
    }
}

/// One generated instance of a suite with its position in the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceEntry {
    pub problem: ProblemKind,
    pub n: usize,
    pub index: usize,
    pub instance: ProblemInstance,
}

/// splitmix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn derive_seed(parts: &[u64]) -> u64 {
    parts.iter().fold(0x853c_49e6_748f_ea9b, |acc, &p| mix(acc ^ p))
}

fn problem_tag(kind: ProblemKind) -> u64 {
    match kind {
        ProblemKind::MaxCut => 1,
        ProblemKind::Partition => 2,
        ProblemKind::VertexCover => 3,
    }
}

/// Instance seed: a stable function of (master seed, problem, n, index) so
/// suites survive unrelated config edits.
pub fn instance_seed(master_seed: u64, kind: ProblemKind, n: usize, index: usize) -> u64 {
    derive_seed(&[master_seed, problem_tag(kind), n as u64, index as u64])
}

/// The deterministic instance suite of a config.
pub fn generate_instances(cfg: &ExperimentConfig) -> Result<Vec<InstanceEntry>> {
    cfg.validate()?;
    let mut out = Vec::new();
    for &kind in &cfg.problems {
        for &n in &cfg.sizes {
            for index in 0..cfg.instances_per_size {
                let seed = instance_seed(cfg.master_seed, kind, n, index);
                let instance = match kind {
                    ProblemKind::Partition => gen_partition(n, seed)?,
                    _ => gen_graph(kind, n, cfg.edge_prob, seed)?,
                };
                out.push(InstanceEntry { problem: kind, n, index, instance });
            }
        }
    }
    Ok(out)
}

/// One row of the results table.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRecord {
    pub problem: ProblemKind,
    pub n: usize,
    pub instance_id: usize,
    pub seed: u64,
    pub variant: Variant,
    pub p: usize,
    pub d_depol: f64,
    pub d_thermal: f64,
    pub avg_quality: f64,
    pub energy: f64,
    pub optimizer_evals: usize,
    pub quantum_time_est_s: f64,
    pub classical_time_s: f64,
    pub repeats: usize,
}

pub const CSV_HEADER: &str = "problem,n,instance_id,seed,variant,p,d_depol,d_thermal,\
avg_quality,energy,optimizer_evals,quantum_time_est_s,classical_time_s,repeats";

/// Formats a float with 12 significant digits.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        format!("{x:.11e}")
    }
}

impl ResultRecord {
    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.problem.as_str(),
            self.n,
            self.instance_id,
            self.seed,
            self.variant.as_str(),
            self.p,
            fmt_float(self.d_depol),
            fmt_float(self.d_thermal),
            fmt_float(self.avg_quality),
            fmt_float(self.energy),
            self.optimizer_evals,
            fmt_float(self.quantum_time_est_s),
            fmt_float(self.classical_time_s),
            self.repeats,
        )
    }

    pub fn from_csv_row(line: &str) -> Result<Self> {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 14 {
            return Err(Error::invalid(format!(
                "expected 14 CSV fields, got {}",
                fields.len()
            )));
        }
        let num = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|e| Error::invalid(format!("bad float {s:?}: {e}")))
        };
        let int = |s: &str| -> Result<usize> {
            s.parse::<usize>()
                .map_err(|e| Error::invalid(format!("bad integer {s:?}: {e}")))
        };
        Ok(ResultRecord {
            problem: fields[0].parse()?,
            n: int(fields[1])?,
            instance_id: int(fields[2])?,
            seed: fields[3]
                .parse::<u64>()
                .map_err(|e| Error::invalid(format!("bad seed: {e}")))?,
            variant: fields[4].parse()?,
            p: int(fields[5])?,
            d_depol: num(fields[6])?,
            d_thermal: num(fields[7])?,
            avg_quality: num(fields[8])?,
            energy: num(fields[9])?,
            optimizer_evals: int(fields[10])?,
            quantum_time_est_s: num(fields[11])?,
            classical_time_s: num(fields[12])?,
            repeats: int(fields[13])?,
        })
    }
}

pub fn records_to_csv(records: &[ResultRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.to_csv_row());
        out.push('\n');
    }
    out
}

pub fn records_from_csv(text: &str) -> Result<Vec<ResultRecord>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        _ => return Err(Error::invalid("missing or unexpected CSV header")),
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .map(ResultRecord::from_csv_row)
        .collect()
}

/// Quantum execution estimate for a variational run: each objective
/// evaluation executes the circuit `shots` times, each execution takes the
/// scheduled circuit duration plus the measurement time.
pub fn estimate_quantum_time(
    sc: &ScheduledCircuit,
    np: &NoiseParams,
    optimizer_evals: usize,
    shots: u64,
) -> f64 {
    (sc.total_ns + np.measure_duration_ns) * 1e-9 * shots as f64 * optimizer_evals as f64
}

/// Runs every (instance × variant × p × noise cell) of the config.
/// Deterministic content for a fixed (config, master seed); execution order
/// is parallel and irrelevant to the output (records are sorted).
pub fn run_matrix(cfg: &ExperimentConfig) -> Result<Vec<ResultRecord>> {
    let instances = generate_instances(cfg)?;
    run_on_instances(cfg, &instances)
}

/// Like [`run_matrix`] but over a pre-generated instance list.
pub fn run_on_instances(
    cfg: &ExperimentConfig,
    instances: &[InstanceEntry],
) -> Result<Vec<ResultRecord>> {
    cfg.validate()?;
    struct Cell<'a> {
        entry: &'a InstanceEntry,
        variant: Variant,
        p: usize,
        d_depol: f64,
        d_thermal: f64,
    }
    let mut cells = Vec::new();
    for entry in instances {
        for &variant in &cfg.variants {
            for &p in &cfg.layers {
                for &dd in &cfg.d_depol {
                    for &dt in &cfg.d_thermal {
                        cells.push(Cell { entry, variant, p, d_depol: dd, d_thermal: dt });
                    }
                }
            }
        }
    }

    let run_cell = |cell: &Cell| -> Result<ResultRecord> {
        let entry = cell.entry;
        let noise = scale_params(&cfg.noise, cell.d_depol, cell.d_thermal)?;
        let vc = VariantConfig {
            variant: cell.variant,
            p: cell.p,
            optimizer: cfg.optimizer,
            repeats: cfg.repeats,
            shots: cfg.shots_per_iteration,
            rqaoa_samples: cfg.rqaoa_samples,
            rqaoa_cutoff: cfg.rqaoa_cutoff,
        };
        let cell_seed = derive_seed(&[
            cfg.master_seed,
            problem_tag(entry.problem),
            entry.n as u64,
            entry.index as u64,
            variant_tag(cell.variant),
            cell.p as u64,
            cell.d_depol.to_bits(),
            cell.d_thermal.to_bits(),
        ]);
        let mut rng = ChaCha8Rng::seed_from_u64(cell_seed);
        let result = match cell.variant {
            Variant::Rqaoa => run_rqaoa(&entry.instance, &vc, &noise, &mut rng)?,
            _ => run_variational(&entry.instance, &vc, &noise, &mut rng)?,
        };
        Ok(ResultRecord {
            problem: entry.problem,
            n: entry.n,
            instance_id: entry.index,
            seed: entry.instance.seed,
            variant: cell.variant,
            p: cell.p,
            d_depol: cell.d_depol,
            d_thermal: cell.d_thermal,
            avg_quality: result.avg_quality,
            energy: result.energy,
            optimizer_evals: result.optimizer_evals,
            quantum_time_est_s: result.quantum_time_est_s,
            classical_time_s: result.classical_time_s,
            repeats: cfg.repeats,
        })
    };

    let execute = || -> Vec<ResultRecord> {
        cells
            .par_iter()
            .filter_map(|cell| match run_cell(cell) {
                Ok(rec) => Some(rec),
                Err(e) => {
                    log::error!(
                        "cell failed ({:?} n={} #{} {:?} p={} dd={} dt={}): {e}",
                        cell.entry.problem,
                        cell.entry.n,
                        cell.entry.index,
                        cell.variant,
                        cell.p,
                        cell.d_depol,
                        cell.d_thermal
                    );
                    None
                }
            })
            .collect()
    };
    let mut records = if cfg.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .map_err(|e| Error::Internal(format!("thread pool: {e}")))?
            .install(execute)
    } else {
        execute()
    };

    records.sort_by(|a, b| {
        (problem_tag(a.problem), a.n, a.instance_id, variant_tag(a.variant), a.p)
            .cmp(&(problem_tag(b.problem), b.n, b.instance_id, variant_tag(b.variant), b.p))
            .then(a.d_depol.partial_cmp(&b.d_depol).unwrap())
            .then(a.d_thermal.partial_cmp(&b.d_thermal).unwrap())
    });
    Ok(records)
}

fn variant_tag(v: Variant) -> u64 {
    match v {
        Variant::Standard => 1,
        Variant::WsInit => 2,
        Variant::Wsqaoa => 3,
        Variant::Rqaoa => 4,
    }
}

/// One cell of the relative-advantage grid: mean quality at `p` layers over
/// mean quality at `p − 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdvantageCell {
    pub d_depol: f64,
    pub d_thermal: f64,
    /// `None` when either layer count has no records in this cell.
    pub ratio: Option<f64>,
}

fn mean_quality(records: &[&ResultRecord]) -> Option<f64> {
    if records.is_empty() {
        None
    } else {
        Some(records.iter().map(|r| r.avg_quality).sum::<f64>() / records.len() as f64)
    }
}

/// Fig. 3 data: per noise cell, mean quality at `p` divided by mean quality
/// at `p − 1`, over all instances of `(variant, problem)`.
pub fn relative_advantage(
    records: &[ResultRecord],
    variant: Variant,
    problem: ProblemKind,
    p: usize,
) -> Result<Vec<AdvantageCell>> {
    if p < 2 {
        return Err(Error::invalid("relative advantage needs p >= 2"));
    }
    let relevant: Vec<&ResultRecord> = records
        .iter()
        .filter(|r| r.variant == variant && r.problem == problem)
        .collect();
    let mut grid: Vec<(f64, f64)> = relevant
        .iter()
        .map(|r| (r.d_depol, r.d_thermal))
        .collect();
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup();

    Ok(grid
        .into_iter()
        .map(|(dd, dt)| {
            let at = |layer: usize| -> Vec<&ResultRecord> {
                relevant
                    .iter()
                    .copied()
                    .filter(|r| r.p == layer && r.d_depol == dd && r.d_thermal == dt)
                    .collect()
            };
            let ratio = match (mean_quality(&at(p)), mean_quality(&at(p - 1))) {
                (Some(hi), Some(lo)) if lo > 0.0 => Some(hi / lo),
                _ => None,
            };
            AdvantageCell { d_depol: dd, d_thermal: dt, ratio }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportKind {
    QualityByLayers,
    QualityByN,
    QualityVsRuntime,
    AdvantageGrid,
}

impl std::str::FromStr for ReportKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quality-by-layers" => Ok(ReportKind::QualityByLayers),
            "quality-by-n" => Ok(ReportKind::QualityByN),
            "quality-vs-runtime" => Ok(ReportKind::QualityVsRuntime),
            "advantage-grid" => Ok(ReportKind::AdvantageGrid),
            other => Err(Error::invalid(format!("unknown report kind {other:?}"))),
        }
    }
}

/// Aggregated figure-data tables from raw records.
pub fn report(records: &[ResultRecord], kind: ReportKind) -> Result<String> {
    if records.is_empty() {
        return Err(Error::invalid("no records to report on"));
    }
    let mut out = String::new();
    match kind {
        ReportKind::QualityByLayers => {
            out.push_str("problem,variant,p,mean_quality,records\n");
            for ((problem, variant, p), group) in
                group_by(records, |r| (problem_tag(r.problem), variant_tag(r.variant), r.p))
            {
                let _ = (problem, variant, p);
                let r0 = group[0];
                let mean =
                    group.iter().map(|r| r.avg_quality).sum::<f64>() / group.len() as f64;
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    r0.problem.as_str(),
                    r0.variant.as_str(),
                    r0.p,
                    fmt_float(mean),
                    group.len()
                ));
            }
        }
        ReportKind::QualityByN => {
            out.push_str("problem,variant,n,mean_quality,records\n");
            for (_, group) in
                group_by(records, |r| (problem_tag(r.problem), variant_tag(r.variant), r.n))
            {
                let r0 = group[0];
                let mean =
                    group.iter().map(|r| r.avg_quality).sum::<f64>() / group.len() as f64;
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    r0.problem.as_str(),
                    r0.variant.as_str(),
                    r0.n,
                    fmt_float(mean),
                    group.len()
                ));
            }
        }
        ReportKind::QualityVsRuntime => {
            out.push_str("variant,p,n,mean_runtime_s,mean_quality,records\n");
            for (_, group) in
                group_by(records, |r| (variant_tag(r.variant), r.p as u64, r.n))
            {
                let r0 = group[0];
                let inv = 1.0 / group.len() as f64;
                let mean_q = group.iter().map(|r| r.avg_quality).sum::<f64>() * inv;
                let mean_t =
                    group.iter().map(|r| r.quantum_time_est_s).sum::<f64>() * inv;
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r0.variant.as_str(),
                    r0.p,
                    r0.n,
                    fmt_float(mean_t),
                    fmt_float(mean_q),
                    group.len()
                ));
            }
        }
        ReportKind::AdvantageGrid => {
            out.push_str("problem,variant,p,d_depol,d_thermal,ratio\n");
            let mut combos: Vec<(ProblemKind, Variant, usize)> = records
                .iter()
                .filter(|r| r.p >= 2)
                .map(|r| (r.problem, r.variant, r.p))
                .collect();
            combos.sort_by_key(|&(pr, v, p)| (problem_tag(pr), variant_tag(v), p));
            combos.dedup();
            for (problem, variant, p) in combos {
                for cell in relative_advantage(records, variant, problem, p)? {
                    out.push_str(&format!(
                        "{},{},{},{},{},{}\n",
                        problem.as_str(),
                        variant.as_str(),
                        p,
                        fmt_float(cell.d_depol),
                        fmt_float(cell.d_thermal),
                        cell.ratio.map(fmt_float).unwrap_or_default()
                    ));
                }
            }
        }
    }
    Ok(out)
}

/// Groups records by a sortable key, preserving key order.
fn group_by<K: Ord + Copy>(
    records: &[ResultRecord],
    key: impl Fn(&ResultRecord) -> K,
) -> Vec<(K, Vec<&ResultRecord>)> {
    let mut keyed: Vec<(K, &ResultRecord)> = records.iter().map(|r| (key(r), r)).collect();
    keyed.sort_by_key(|&(k, _)| k);
    let mut out: Vec<(K, Vec<&ResultRecord>)> = Vec::new();
    for (k, r) in keyed {
        match out.last_mut() {
            Some((lk, group)) if *lk == k => group.push(r),
            _ => out.push((k, vec![r])),
        }
    }
    out
}
