//! Variational drivers for the four QAOA variants, the derivative-free
//! parameter optimizer, and the RQAOA recursion with variable elimination.

use std::cell::{Cell, RefCell};
use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuits::{
    build_qaoa_circuit, insert_noise, schedule, simulate_noisy, transpile, CircuitVariant,
};
use crate::densim::{BasisSample, DensityMatrix, Prep};
use crate::noise::NoiseParams;
use crate::problems::{
    self, encode, ws_thetas, IsingModel, ProblemInstance, SpinAssignment,
};
use crate::{Error, Result};

/// Per-layer rotation angles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaParams {
    pub betas: Vec<f64>,
    pub gammas: Vec<f64>,
}

impl QaoaParams {
    pub fn p(&self) -> usize {
        self.betas.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Standard,
    WsInit,
    Wsqaoa,
    Rqaoa,
}

impl Variant {
    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::Standard => "standard",
            Variant::WsInit => "ws-init",
            Variant::Wsqaoa => "wsqaoa",
            Variant::Rqaoa => "rqaoa",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(Variant::Standard),
            "ws-init" => Ok(Variant::WsInit),
            "wsqaoa" => Ok(Variant::Wsqaoa),
            "rqaoa" => Ok(Variant::Rqaoa),
            other => Err(Error::invalid(format!("unknown variant {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Final trust-region radius.
    pub tolerance: f64,
    /// Objective-evaluation budget per optimizer run.
    pub max_evals: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig { tolerance: 0.01, max_evals: 150 }
    }
}

/// Configuration of one variant run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantConfig {
    pub variant: Variant,
    /// Layer count p.
    pub p: usize,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    /// Independent optimizer runs per instance, qualities averaged.
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    /// Measurement shots per objective evaluation (runtime estimate only).
    #[serde(default = "default_shots")]
    pub shots: u64,
    /// Shots used to estimate term correlations in RQAOA.
    #[serde(default = "default_rqaoa_samples")]
    pub rqaoa_samples: u64,
    /// RQAOA recursion stops when this many variables remain.
    #[serde(default = "default_rqaoa_cutoff")]
    pub rqaoa_cutoff: usize,
}

fn default_repeats() -> usize {
    3
}
fn default_shots() -> u64 {
    1000
}
fn default_rqaoa_samples() -> u64 {
    10
}
fn default_rqaoa_cutoff() -> usize {
    1
}

impl VariantConfig {
    pub fn new(variant: Variant, p: usize) -> Self {
        VariantConfig {
            variant,
            p,
            optimizer: OptimizerConfig::default(),
            repeats: default_repeats(),
            shots: default_shots(),
            rqaoa_samples: default_rqaoa_samples(),
            rqaoa_cutoff: default_rqaoa_cutoff(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p == 0 || self.repeats == 0 || self.rqaoa_samples == 0 {
            return Err(Error::invalid("p, repeats and rqaoa_samples must be >= 1"));
        }
        if self.optimizer.tolerance <= 0.0 || self.optimizer.max_evals == 0 {
            return Err(Error::invalid("optimizer tolerance > 0 and max_evals >= 1 required"));
        }
        Ok(())
    }
}

/// One elimination step of the RQAOA recursion. `sigma ∈ {−1, +1}`. Indices
/// refer to the model *at elimination time* (they shift as variables drop).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EliminationRecord {
    /// `s_i = sigma`
    Fix { i: usize, sigma: i8 },
    /// `s_i = sigma · s_j`
    Merge { i: usize, j: usize, sigma: i8 },
}

/// Outcome of one variant run on one instance.
#[derive(Debug, Clone)]
pub struct RunResult {
    /// Best parameters of the last repeat.
    pub params: QaoaParams,
    /// Mean approximation quality over repeats.
    pub avg_quality: f64,
    /// Mean exact ⟨H_C⟩ of the final state (RQAOA: energy of the assignment).
    pub energy: f64,
    /// Total objective evaluations across repeats (and recursion steps).
    pub optimizer_evals: usize,
    /// Estimated quantum execution time, seconds.
    pub quantum_time_est_s: f64,
    /// Wall-clock optimizer/warm-start/elimination time, excluding simulation.
    pub classical_time_s: f64,
    /// RQAOA only: the recovered assignment of the last repeat.
    pub assignment: Option<SpinAssignment>,
    /// RQAOA only: quality of `assignment`.
    pub assignment_quality: Option<f64>,
}

/// Derivative-free local minimization (COBYLA).
///
/// Stops when the trust-region radius shrinks to `tolerance` or after
/// `max_evals` objective evaluations. Returns the best point seen, its
/// value, and the evaluation count; guarantees `f* ≤ f(x0)`.
pub fn minimize<F>(
    f: F,
    x0: &[f64],
    tolerance: f64,
    max_evals: usize,
) -> Result<(Vec<f64>, f64, usize)>
where
    F: Fn(&[f64]) -> f64,
{
    if x0.is_empty() {
        return Err(Error::Optimizer("empty parameter vector".into()));
    }
    if tolerance <= 0.0 || max_evals == 0 {
        return Err(Error::Optimizer("tolerance > 0 and max_evals >= 1 required".into()));
    }

    let evals = Cell::new(0usize);
    let bad = Cell::new(false);
    let best: RefCell<(f64, Vec<f64>)> = RefCell::new((f64::INFINITY, x0.to_vec()));

    let objective = |x: &[f64], _: &mut ()| -> f64 {
        if evals.get() >= max_evals {
            // Budget exhausted: report the best value without evaluating so
            // the count stays within the contract while COBYLA winds down.
            return best.borrow().0;
        }
        evals.set(evals.get() + 1);
        let v = f(x);
        if !v.is_finite() {
            bad.set(true);
            return 1e30;
        }
        let mut b = best.borrow_mut();
        if v < b.0 {
            *b = (v, x.to_vec());
        }
        v
    };

    let bounds: Vec<(f64, f64)> = x0.iter().map(|&v| (v - 10.0, v + 10.0)).collect();
    let cons: Vec<&dyn cobyla::Func<()>> = Vec::new();
    let stop = cobyla::StopTols {
        xtol_abs: vec![tolerance; x0.len()],
        ..Default::default()
    };
    let outcome = cobyla::minimize(
        objective,
        x0,
        &bounds,
        &cons,
        (),
        max_evals,
        cobyla::RhoBeg::All(0.5),
        Some(stop),
    );
    if bad.get() {
        return Err(Error::Optimizer("objective returned a non-finite value".into()));
    }
    if let Err((status, _, _)) = outcome {
        return Err(Error::Optimizer(format!("COBYLA failed: {status:?}")));
    }
    let (f_best, x_best) = best.into_inner();
    if !f_best.is_finite() {
        // No successful evaluation happened.
        return Err(Error::Optimizer("no finite objective evaluation".into()));
    }
    Ok((x_best, f_best, evals.get()))
}

fn circuit_variant(v: Variant) -> Result<CircuitVariant> {
    match v {
        Variant::Standard => Ok(CircuitVariant::Standard),
        Variant::WsInit => Ok(CircuitVariant::WsInit),
        Variant::Wsqaoa => Ok(CircuitVariant::Wsqaoa),
        Variant::Rqaoa => Err(Error::invalid("RQAOA has no direct circuit form")),
    }
}

/// Simulates the noisy QAOA circuit for one angle set. Returns the final
/// state and the scheduled circuit duration in nanoseconds.
fn simulate_angles(
    m: &IsingModel,
    betas: &[f64],
    gammas: &[f64],
    variant: CircuitVariant,
    thetas: Option<&[f64]>,
    noise: &NoiseParams,
) -> Result<(DensityMatrix, f64)> {
    let circ = build_qaoa_circuit(m, betas, gammas, variant, thetas)?;
    let native = transpile(&circ)?;
    let sc = schedule(&native, noise)?;
    let total_ns = sc.total_ns;
    let nc = insert_noise(&sc, noise)?;
    let rho = simulate_noisy(&nc, &Prep::AllZero)?;
    Ok((rho, total_ns))
}

/// One optimizer run on an Ising model: seeded random start, COBYLA descent
/// on the exact noisy expectation value.
struct InnerRun {
    params: QaoaParams,
    energy: f64,
    evals: usize,
    rho: DensityMatrix,
    duration_ns: f64,
    sim_secs: f64,
}

fn optimize_model(
    m: &IsingModel,
    variant: CircuitVariant,
    thetas: Option<&[f64]>,
    p: usize,
    opt: &OptimizerConfig,
    noise: &NoiseParams,
    rng: &mut ChaCha8Rng,
) -> Result<InnerRun> {
    use std::f64::consts::PI;
    let mut x0 = Vec::with_capacity(2 * p);
    for _ in 0..p {
        x0.push(rng.gen::<f64>() * PI);
    }
    for _ in 0..p {
        x0.push(rng.gen::<f64>() * 2.0 * PI);
    }

    let sim_secs = Cell::new(0.0f64);
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let objective = |x: &[f64]| -> f64 {
        let t = Instant::now();
        let out = simulate_angles(m, &x[..p], &x[p..], variant, thetas, noise)
            .and_then(|(rho, _)| rho.expectation_ising(m));
        sim_secs.set(sim_secs.get() + t.elapsed().as_secs_f64());
        match out {
            Ok(e) => e,
            Err(err) => {
                failure.borrow_mut().get_or_insert(err);
                f64::NAN
            }
        }
    };

    let minimized = minimize(objective, &x0, opt.tolerance, opt.max_evals);
    if let Some(err) = failure.into_inner() {
        return Err(err);
    }
    let (x_best, f_best, evals) = minimized?;

    let t = Instant::now();
    let (rho, duration_ns) =
        simulate_angles(m, &x_best[..p], &x_best[p..], variant, thetas, noise)?;
    let energy = rho.expectation_ising(m)?;
    let sim_total = sim_secs.get() + t.elapsed().as_secs_f64();
    debug_assert!((energy - f_best).abs() < 1e-9);
    Ok(InnerRun {
        params: QaoaParams {
            betas: x_best[..p].to_vec(),
            gammas: x_best[p..].to_vec(),
        },
        energy,
        evals,
        rho,
        duration_ns,
        sim_secs: sim_total,
    })
}

const NS_PER_S: f64 = 1e-9;

/// Runs one non-recursive variant on an instance: `repeats` independent
/// optimizer runs from fresh seeded starts, qualities averaged.
pub fn run_variational(
    inst: &ProblemInstance,
    cfg: &VariantConfig,
    noise: &NoiseParams,
    rng: &mut ChaCha8Rng,
) -> Result<RunResult> {
    cfg.validate()?;
    let variant = circuit_variant(cfg.variant)?;
    let started = Instant::now();
    let m = encode(inst);

    let thetas = match cfg.variant {
        Variant::Standard => None,
        _ => Some(ws_thetas(&problems::warmstart(inst))),
    };

    let mut sim_secs = 0.0;
    let mut qualities = Vec::with_capacity(cfg.repeats);
    let mut energies = Vec::with_capacity(cfg.repeats);
    let mut evals_total = 0usize;
    let mut quantum_s = 0.0;
    let mut last_params = None;

    for _ in 0..cfg.repeats {
        let run = optimize_model(
            &m,
            variant,
            thetas.as_deref(),
            cfg.p,
            &cfg.optimizer,
            noise,
            rng,
        )?;
        let probs = run.rho.measurement_probabilities();
        qualities.push(problems::average_quality(inst, &probs)?);
        energies.push(run.energy);
        evals_total += run.evals;
        quantum_s += (run.duration_ns + noise.measure_duration_ns)
            * NS_PER_S
            * cfg.shots as f64
            * run.evals as f64;
        sim_secs += run.sim_secs;
        last_params = Some(run.params);
    }

    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    Ok(RunResult {
        params: last_params.expect("repeats >= 1"),
        avg_quality: mean(&qualities),
        energy: mean(&energies),
        optimizer_evals: evals_total,
        quantum_time_est_s: quantum_s,
        classical_time_s: (started.elapsed().as_secs_f64() - sim_secs).max(0.0),
        assignment: None,
        assignment_quality: None,
    })
}

/// One correlation term of the RQAOA term set `T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Term {
    Linear(usize),
    Quad(usize, usize),
}

/// Empirical means of every term in `T = {s_i : h_i ≠ 0} ∪ {s_i s_j : J_ij ≠ 0}`
/// over a multiset of basis samples. Quadratic terms come first, each group
/// in index order.
pub fn expected_term_values(samples: &[BasisSample], m: &IsingModel) -> Vec<(Term, f64)> {
    let total: u64 = samples.iter().map(|s| s.multiplicity).sum();
    assert!(total > 0, "expected_term_values needs samples");
    let mut out = Vec::new();
    for (i, k, _) in m.couplings() {
        let mean: f64 = samples
            .iter()
            .map(|s| (s.spin(i) as i64 * s.spin(k) as i64 * s.multiplicity as i64) as f64)
            .sum::<f64>()
            / total as f64;
        out.push((Term::Quad(i, k), mean));
    }
    for (i, _) in m.linears() {
        let mean: f64 = samples
            .iter()
            .map(|s| (s.spin(i) as i64 * s.multiplicity as i64) as f64)
            .sum::<f64>()
            / total as f64;
        out.push((Term::Linear(i), mean));
    }
    out
}

/// Substitutes the recorded constraint into the model, removing variable `i`
/// and compacting indices above it.
pub fn eliminate(m: &IsingModel, rec: &EliminationRecord) -> Result<IsingModel> {
    let n = m.n();
    let check = |v: usize| -> Result<()> {
        if v >= n {
            Err(Error::invalid(format!("eliminated variable {v} out of range (n = {n})")))
        } else {
            Ok(())
        }
    };
    let (removed, sigma) = match *rec {
        EliminationRecord::Fix { i, sigma } => {
            check(i)?;
            (i, sigma)
        }
        EliminationRecord::Merge { i, j, sigma } => {
            check(i)?;
            check(j)?;
            if i == j {
                return Err(Error::invalid("merge needs two distinct variables"));
            }
            (i, sigma)
        }
    };
    if sigma != 1 && sigma != -1 {
        return Err(Error::invalid("sigma must be ±1"));
    }
    if n == 0 {
        return Err(Error::invalid("cannot eliminate from an empty model"));
    }
    let s = sigma as f64;

    // Work on a copy with the substitution folded in, then drop variable i.
    let mut h: Vec<f64> = (0..n).map(|v| m.linear(v)).collect();
    let mut offset = m.offset();
    let j_of = |a: usize, b: usize| m.coupling(a, b);
    let mut extra_j: Vec<(usize, usize, f64)> = Vec::new();

    match *rec {
        EliminationRecord::Fix { i, .. } => {
            // s_i = σ: couplings J_iv become linear terms, h_i becomes offset.
            for v in 0..n {
                if v != i {
                    h[v] += s * j_of(i, v);
                }
            }
            offset -= s * h[i];
        }
        EliminationRecord::Merge { i, j, .. } => {
            // s_i = σ·s_j.
            h[j] += s * h[i];
            offset -= s * j_of(i, j);
            for k in 0..n {
                if k != i && k != j {
                    let jik = j_of(i, k);
                    if jik != 0.0 {
                        extra_j.push((j, k, s * jik));
                    }
                }
            }
        }
    }

    // Compact: old index v > removed maps to v − 1.
    let map = |v: usize| if v > removed { v - 1 } else { v };
    let mut out = IsingModel::new(n - 1);
    out.set_offset(offset);
    for v in 0..n {
        if v != removed {
            *out.linear_mut(map(v)) += h[v];
        }
    }
    for (a, b, val) in m.couplings() {
        if a != removed && b != removed {
            *out.coupling_mut(map(a), map(b)) += val;
        }
    }
    for (a, b, val) in extra_j {
        debug_assert!(a != removed && b != removed);
        *out.coupling_mut(map(a), map(b)) += val;
    }
    Ok(out)
}

/// Replays elimination records in reverse, growing `tail` back to an
/// assignment over the original variable count.
pub fn back_substitute(
    records: &[EliminationRecord],
    tail: &SpinAssignment,
) -> Result<SpinAssignment> {
    let mut s = tail.clone();
    for rec in records.iter().rev() {
        match *rec {
            EliminationRecord::Fix { i, sigma } => {
                if i > s.len() {
                    return Err(Error::Internal(format!(
                        "fix index {i} beyond assignment length {}",
                        s.len()
                    )));
                }
                s.insert(i, sigma);
            }
            EliminationRecord::Merge { i, j, sigma } => {
                // j was recorded pre-removal; translate into the compacted
                // indexing the current assignment uses.
                let jc = if j > i { j - 1 } else { j };
                if i > s.len() || jc >= s.len() {
                    return Err(Error::Internal(format!(
                        "merge ({i},{j}) inconsistent with assignment length {}",
                        s.len()
                    )));
                }
                let v = sigma * s[jc];
                s.insert(i, v);
            }
        }
    }
    Ok(s)
}

/// Runs the RQAOA recursion: standard QAOA on the shrinking model, term
/// selection from `rqaoa_samples` measurement shots, elimination down to
/// `rqaoa_cutoff` variables, brute force on the remainder, back-substitution
/// to a full assignment. Repeated `repeats` times, qualities averaged.
pub fn run_rqaoa(
    inst: &ProblemInstance,
    cfg: &VariantConfig,
    noise: &NoiseParams,
    rng: &mut ChaCha8Rng,
) -> Result<RunResult> {
    cfg.validate()?;
    if cfg.variant != Variant::Rqaoa {
        return Err(Error::invalid("run_rqaoa requires the rqaoa variant"));
    }
    let started = Instant::now();
    let base = encode(inst);

    let mut sim_secs = 0.0;
    let mut qualities = Vec::with_capacity(cfg.repeats);
    let mut energies = Vec::with_capacity(cfg.repeats);
    let mut evals_total = 0usize;
    let mut quantum_s = 0.0;
    let mut last: Option<(QaoaParams, SpinAssignment, f64)> = None;

    for _ in 0..cfg.repeats {
        let mut m = base.clone();
        let mut records: Vec<EliminationRecord> = Vec::new();
        let mut last_params = QaoaParams {
            betas: vec![0.0; cfg.p],
            gammas: vec![0.0; cfg.p],
        };

        while m.n() > cfg.rqaoa_cutoff {
            let has_terms =
                m.couplings().next().is_some() || m.linears().next().is_some();
            if !has_terms {
                break;
            }
            let run = optimize_model(
                &m,
                CircuitVariant::Standard,
                None,
                cfg.p,
                &cfg.optimizer,
                noise,
                rng,
            )?;
            evals_total += run.evals;
            let per_circuit = (run.duration_ns + noise.measure_duration_ns) * NS_PER_S;
            quantum_s += per_circuit * cfg.shots as f64 * run.evals as f64
                + per_circuit * cfg.rqaoa_samples as f64;
            sim_secs += run.sim_secs;
            last_params = run.params;

            let t = Instant::now();
            let samples = run.rho.sample(cfg.rqaoa_samples, rng);
            sim_secs += t.elapsed().as_secs_f64();

            let terms = expected_term_values(&samples, &m);
            // argmax |E[t]|; ties resolved by list order (quadratic terms
            // first, lowest indices first) via strict improvement.
            let (term, value) = terms
                .iter()
                .fold(None::<(Term, f64)>, |acc, &(t, v)| match acc {
                    Some((_, bv)) if v.abs() <= bv.abs() => acc,
                    _ => Some((t, v)),
                })
                .expect("nonempty term set");
            let sigma: i8 = if value < 0.0 { -1 } else { 1 };
            let rec = match term {
                Term::Linear(i) => EliminationRecord::Fix { i, sigma },
                Term::Quad(i, j) => EliminationRecord::Merge { i, j, sigma },
            };
            m = eliminate(&m, &rec)?;
            records.push(rec);
        }

        let tail: SpinAssignment = if m.n() > 0 {
            m.brute_force_min()?.0
        } else {
            Vec::new()
        };
        let s = back_substitute(&records, &tail)?;
        let q = problems::quality(inst, &s);
        qualities.push(q);
        energies.push(base.energy(&s));
        last = Some((last_params, s, q));
    }

    let (params, assignment, q_last) = last.expect("repeats >= 1");
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    Ok(RunResult {
        params,
        avg_quality: mean(&qualities),
        energy: mean(&energies),
        optimizer_evals: evals_total,
        quantum_time_est_s: quantum_s,
        classical_time_s: (started.elapsed().as_secs_f64() - sim_secs).max(0.0),
        assignment: Some(assignment),
        assignment_quality: Some(q_last),
    })
}
