//! Problem instances, Ising encodings, brute-force oracles and quality
//! metrics for Max-Cut, Partition and Vertex Cover.
//!
//! Spin convention: `s_i ∈ {−1, +1}`, binary variables `x_i = (1 − s_i) / 2`,
//! so spin `+1` means bit 0. Basis state `x` maps to spins
//! `s_i = (−1)^{x_i}`.

mod warmstart;

pub use warmstart::warmstart;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Spin assignment over `{−1, +1}`.
pub type SpinAssignment = Vec<i8>;

/// Quadratic Ising objective `C(s) = −Σ_{i<j} J_ij s_i s_j − Σ_i h_i s_i + offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel {
    n: usize,
    h: Vec<f64>,
    /// Strictly upper-triangular couplings, `j[i * n + k]` for `i < k`.
    j: Vec<f64>,
    offset: f64,
}

impl IsingModel {
    pub fn new(n: usize) -> Self {
        IsingModel {
            n,
            h: vec![0.0; n],
            j: vec![0.0; n * n],
            offset: 0.0,
        }
    }

    pub fn from_parts(
        n: usize,
        h: Vec<f64>,
        couplings: Vec<(usize, usize, f64)>,
        offset: f64,
    ) -> Result<Self> {
        if h.len() != n {
            return Err(Error::DimensionMismatch("linear coefficient count".into()));
        }
        let mut m = IsingModel {
            n,
            h,
            j: vec![0.0; n * n],
            offset,
        };
        for (a, b, v) in couplings {
            if a == b || a >= n || b >= n {
                return Err(Error::invalid(format!("bad coupling ({a},{b})")));
            }
            *m.coupling_mut(a, b) += v;
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn set_offset(&mut self, v: f64) {
        self.offset = v;
    }

    pub fn linear(&self, i: usize) -> f64 {
        self.h[i]
    }

    pub fn linear_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.h[i]
    }

    pub fn coupling(&self, a: usize, b: usize) -> f64 {
        assert_ne!(a, b);
        let (i, k) = if a < b { (a, b) } else { (b, a) };
        self.j[i * self.n + k]
    }

    pub fn coupling_mut(&mut self, a: usize, b: usize) -> &mut f64 {
        assert_ne!(a, b);
        let (i, k) = if a < b { (a, b) } else { (b, a) };
        &mut self.j[i * self.n + k]
    }

    /// Nonzero couplings as `(i, k, J_ik)` with `i < k`.
    pub fn couplings(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            (i + 1..self.n).filter_map(move |k| {
                let v = self.j[i * self.n + k];
                (v != 0.0).then_some((i, k, v))
            })
        })
    }

    /// Nonzero linear terms as `(i, h_i)`.
    pub fn linears(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.h
            .iter()
            .enumerate()
            .filter_map(|(i, &v)| (v != 0.0).then_some((i, v)))
    }

    pub fn energy(&self, s: &[i8]) -> f64 {
        assert_eq!(s.len(), self.n);
        let mut e = self.offset;
        for (i, hi) in self.linears() {
            e -= hi * s[i] as f64;
        }
        for (i, k, v) in self.couplings() {
            e -= v * (s[i] as f64) * (s[k] as f64);
        }
        e
    }

    /// Energy of a computational basis state via `s_i = (−1)^{x_i}`.
    pub fn energy_of_state(&self, x: usize) -> f64 {
        let spins = spins_of_state(x, self.n);
        self.energy(&spins)
    }

    /// Minimizing spin assignment by exhaustive enumeration (`n ≤ 20`).
    pub fn brute_force_min(&self) -> Result<(SpinAssignment, f64)> {
        if self.n > 20 {
            return Err(Error::Capacity(self.n, 20));
        }
        let mut best = (0usize, f64::INFINITY);
        for x in 0..1usize << self.n {
            let e = self.energy_of_state(x);
            if e < best.1 {
                best = (x, e);
            }
        }
        Ok((spins_of_state(best.0, self.n), best.1))
    }
}

/// Spins of a basis state, qubit 0 first.
pub fn spins_of_state(x: usize, n: usize) -> SpinAssignment {
    (0..n)
        .map(|i| if (x >> i) & 1 == 0 { 1 } else { -1 })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    MaxCut,
    Partition,
    VertexCover,
}

impl ProblemKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProblemKind::MaxCut => "maxcut",
            ProblemKind::Partition => "partition",
            ProblemKind::VertexCover => "vertexcover",
        }
    }
}

impl std::str::FromStr for ProblemKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "maxcut" => Ok(ProblemKind::MaxCut),
            "partition" => Ok(ProblemKind::Partition),
            "vertexcover" => Ok(ProblemKind::VertexCover),
            other => Err(Error::invalid(format!("unknown problem kind {other:?}"))),
        }
    }
}

/// One concrete problem instance. The payload (edges or weights) is stored
/// explicitly so files round-trip bit-exactly without relying on the seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance {
    pub kind: ProblemKind,
    pub n: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub edges: Option<Vec<(usize, usize)>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub weights: Option<Vec<f64>>,
}

impl ProblemInstance {
    pub fn edges(&self) -> &[(usize, usize)] {
        self.edges.as_deref().unwrap_or(&[])
    }

    pub fn weights(&self) -> &[f64] {
        self.weights.as_deref().unwrap_or(&[])
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges()
            .iter()
            .filter(|&&(a, b)| a == v || b == v)
            .count()
    }
}

/// Random `G(n, edge_prob)` graph, deterministic per seed. Used for Max-Cut
/// and Vertex Cover.
pub fn gen_graph(kind: ProblemKind, n: usize, edge_prob: f64, seed: u64) -> Result<ProblemInstance> {
    if n < 2 {
        return Err(Error::invalid("graph instances need n >= 2"));
    }
    if !matches!(kind, ProblemKind::MaxCut | ProblemKind::VertexCover) {
        return Err(Error::invalid("gen_graph requires a graph problem"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen::<f64>() < edge_prob {
                edges.push((a, b));
            }
        }
    }
    Ok(ProblemInstance {
        kind,
        n,
        seed,
        edges: Some(edges),
        weights: None,
    })
}

/// Partition instance with weights i.i.d. uniform on `[0, 1]`.
pub fn gen_partition(n: usize, seed: u64) -> Result<ProblemInstance> {
    if n < 2 {
        return Err(Error::invalid("partition instances need n >= 2"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights = (0..n).map(|_| rng.gen::<f64>()).collect();
    Ok(ProblemInstance {
        kind: ProblemKind::Partition,
        n,
        seed,
        edges: None,
        weights: Some(weights),
    })
}

/// Vertex Cover penalty weights: `A · Σ_edges (1−x_u)(1−x_v) + B · Σ_v x_v`
/// with `A > B` so every Ising optimum is a valid cover.
pub const VERTEX_COVER_A: f64 = 2.0;
pub const VERTEX_COVER_B: f64 = 1.0;

/// Ising encoding of an instance; one spin per vertex/number.
pub fn encode(inst: &ProblemInstance) -> IsingModel {
    let n = inst.n;
    let mut m = IsingModel::new(n);
    match inst.kind {
        ProblemKind::MaxCut => {
            // C(s) = −cut(s): J_uv = −1/2 per edge, offset −|E|/2.
            for &(u, v) in inst.edges() {
                *m.coupling_mut(u, v) += -0.5;
            }
            m.set_offset(-(inst.edges().len() as f64) / 2.0);
        }
        ProblemKind::Partition => {
            // C(s) = (Σ a_i s_i)² = Σ a_i² + 2 Σ_{i<k} a_i a_k s_i s_k.
            let a = inst.weights();
            for i in 0..n {
                for k in i + 1..n {
                    *m.coupling_mut(i, k) += -2.0 * a[i] * a[k];
                }
            }
            m.set_offset(a.iter().map(|w| w * w).sum());
        }
        ProblemKind::VertexCover => {
            // A Σ_E (1+s_u)(1+s_v)/4 + B Σ_v (1−s_v)/2 expanded into (h, J, offset).
            let (aa, bb) = (VERTEX_COVER_A, VERTEX_COVER_B);
            let e = inst.edges().len() as f64;
            for &(u, v) in inst.edges() {
                *m.coupling_mut(u, v) += -aa / 4.0;
                *m.linear_mut(u) += -aa / 4.0;
                *m.linear_mut(v) += -aa / 4.0;
            }
            for v in 0..n {
                *m.linear_mut(v) += bb / 2.0;
            }
            m.set_offset(aa * e / 4.0 + bb * n as f64 / 2.0);
        }
    }
    m
}

/// Problem-specific measure of an assignment (larger is better).
///
/// Max-Cut: cut size. Partition: sum of the lighter side. Vertex Cover:
/// reciprocal cover size, with invalid covers replaced by the full vertex set.
pub fn measure(inst: &ProblemInstance, s: &[i8]) -> f64 {
    match inst.kind {
        ProblemKind::MaxCut => inst
            .edges()
            .iter()
            .filter(|&&(u, v)| s[u] != s[v])
            .count() as f64,
        ProblemKind::Partition => {
            let a = inst.weights();
            let plus: f64 = (0..inst.n).filter(|&i| s[i] > 0).map(|i| a[i]).sum();
            let minus: f64 = (0..inst.n).filter(|&i| s[i] < 0).map(|i| a[i]).sum();
            plus.min(minus)
        }
        ProblemKind::VertexCover => {
            let size = cover_size(inst, s);
            if size == 0 {
                // Only reachable on the edgeless graph (empty cover is valid).
                f64::INFINITY
            } else {
                1.0 / size as f64
            }
        }
    }
}

/// Cover size under the replacement rule: invalid covers count as the full
/// vertex set.
pub fn cover_size(inst: &ProblemInstance, s: &[i8]) -> usize {
    let in_cover = |v: usize| s[v] < 0;
    let valid = inst
        .edges()
        .iter()
        .all(|&(u, v)| in_cover(u) || in_cover(v));
    if valid {
        (0..inst.n).filter(|&v| in_cover(v)).count()
    } else {
        inst.n
    }
}

/// Exhaustive optimum of the problem measure.
#[derive(Debug, Clone)]
pub struct BruteForceResult {
    pub best: SpinAssignment,
    pub best_measure: f64,
    pub worst_measure: f64,
}

pub fn brute_force(inst: &ProblemInstance) -> Result<BruteForceResult> {
    if inst.n > 20 {
        return Err(Error::Capacity(inst.n, 20));
    }
    let mut best: Option<(SpinAssignment, f64)> = None;
    let mut worst = f64::INFINITY;
    for x in 0..1usize << inst.n {
        let s = spins_of_state(x, inst.n);
        let v = measure(inst, &s);
        worst = worst.min(v);
        if best.as_ref().map_or(true, |(_, b)| v > *b) {
            best = Some((s, v));
        }
    }
    let (best, best_measure) = best.expect("nonempty enumeration");
    Ok(BruteForceResult {
        best,
        best_measure,
        worst_measure: worst,
    })
}

/// Approximation quality in `[0, 1]` against the exhaustive optimum.
pub fn quality(inst: &ProblemInstance, s: &[i8]) -> f64 {
    let oracle = brute_force(inst).expect("instance within brute-force capacity");
    quality_against(inst, s, &oracle)
}

/// Quality with a precomputed oracle, for callers scoring many assignments.
pub fn quality_against(inst: &ProblemInstance, s: &[i8], oracle: &BruteForceResult) -> f64 {
    match inst.kind {
        ProblemKind::MaxCut | ProblemKind::Partition => {
            if oracle.best_measure == 0.0 {
                // Degenerate instance (empty graph / unsplittable weights):
                // every assignment attains the optimum.
                1.0
            } else {
                (measure(inst, s) / oracle.best_measure).clamp(0.0, 1.0)
            }
        }
        ProblemKind::VertexCover => {
            let opt = if oracle.best_measure.is_finite() {
                (1.0 / oracle.best_measure).round() as usize
            } else {
                0
            };
            let got = cover_size(inst, s);
            if opt == 0 {
                if got == 0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                (opt as f64 / got as f64).clamp(0.0, 1.0)
            }
        }
    }
}

/// `Σ_x probs[x] · quality(spins(x))` over the computational basis.
pub fn average_quality(inst: &ProblemInstance, probs: &[f64]) -> Result<f64> {
    if probs.len() != 1 << inst.n {
        return Err(Error::DimensionMismatch(format!(
            "probability vector of length {} for n = {}",
            probs.len(),
            inst.n
        )));
    }
    let oracle = brute_force(inst)?;
    Ok(probs
        .iter()
        .enumerate()
        .map(|(x, p)| p * quality_against(inst, &spins_of_state(x, inst.n), &oracle))
        .sum())
}

/// Warm-start rotation angles `θ_i = 2·arcsin(√(0.5 − 0.25·z*_i)) ∈ [0, π]`.
pub fn ws_thetas(z_star: &[i8]) -> Vec<f64> {
    z_star
        .iter()
        .map(|&z| 2.0 * (0.5 - 0.25 * z as f64).sqrt().asin())
        .collect()
}
