//! Classical approximation algorithms supplying warm starts: low-rank
//! relaxation with hyperplane rounding for Max-Cut, greedy list scheduling
//! for Partition, maximal matching for Vertex Cover.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{measure, ProblemInstance, ProblemKind, SpinAssignment};

const BM_ITERATIONS: usize = 500;
const BM_STEP: f64 = 0.5;
const ROUNDING_TRIES: usize = 100;

/// Approximate solution for an instance, used to seed warm-start variants.
/// Deterministic per instance seed.
pub fn warmstart(inst: &ProblemInstance) -> SpinAssignment {
    match inst.kind {
        ProblemKind::MaxCut => maxcut_low_rank(inst),
        ProblemKind::Partition => partition_greedy(inst),
        ProblemKind::VertexCover => vertex_cover_matching(inst),
    }
}

/// Rank-limited relaxation of Max-Cut: unit vectors `v_u ∈ R^k` with
/// `k = ⌈√(2n)⌉` maximizing `Σ_E (1 − v_u·v_v)/2` by projected gradient
/// ascent, followed by the best of 100 random-hyperplane roundings.
fn maxcut_low_rank(inst: &ProblemInstance) -> SpinAssignment {
    let n = inst.n;
    let k = ((2.0 * n as f64).sqrt().ceil() as usize).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(inst.seed ^ 0x9e37_79b9_7f4a_7c15);

    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let mut row: Vec<f64> = (0..k).map(|_| rng.sample(StandardNormal)).collect();
            normalize(&mut row);
            row
        })
        .collect();

    let mut grad = vec![vec![0.0; k]; n];
    for _ in 0..BM_ITERATIONS {
        for g in &mut grad {
            g.fill(0.0);
        }
        // ∂/∂v_u of the relaxed cut value is −½ Σ_{neighbors} v_w.
        for &(a, b) in inst.edges() {
            for d in 0..k {
                grad[a][d] -= 0.5 * v[b][d];
                grad[b][d] -= 0.5 * v[a][d];
            }
        }
        for u in 0..n {
            for d in 0..k {
                v[u][d] += BM_STEP * grad[u][d];
            }
            normalize(&mut v[u]);
        }
    }

    let mut best: Option<(SpinAssignment, f64)> = None;
    for _ in 0..ROUNDING_TRIES {
        let r: Vec<f64> = (0..k).map(|_| rng.sample(StandardNormal)).collect();
        let s: SpinAssignment = v
            .iter()
            .map(|vu| {
                let dot: f64 = vu.iter().zip(&r).map(|(a, b)| a * b).sum();
                if dot >= 0.0 {
                    1
                } else {
                    -1
                }
            })
            .collect();
        let cut = measure(inst, &s);
        if best.as_ref().map_or(true, |(_, b)| cut > *b) {
            best = Some((s, cut));
        }
    }
    best.expect("at least one rounding").0
}

fn normalize(row: &mut [f64]) {
    let norm: f64 = row.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 1e-12 {
        for x in row.iter_mut() {
            *x /= norm;
        }
    } else {
        row[0] = 1.0;
        for x in row.iter_mut().skip(1) {
            *x = 0.0;
        }
    }
}

/// Greedy list scheduling: weights sorted descending, each assigned to the
/// currently lighter side. Side `+1` wins ties.
fn partition_greedy(inst: &ProblemInstance) -> SpinAssignment {
    let w = inst.weights();
    let mut order: Vec<usize> = (0..inst.n).collect();
    order.sort_by(|&a, &b| w[b].partial_cmp(&w[a]).unwrap().then(a.cmp(&b)));
    let mut s = vec![0i8; inst.n];
    let (mut plus, mut minus) = (0.0f64, 0.0f64);
    for i in order {
        if plus <= minus {
            s[i] = 1;
            plus += w[i];
        } else {
            s[i] = -1;
            minus += w[i];
        }
    }
    s
}

/// Classic 2-approximation: both endpoints of a greedily built maximal
/// matching enter the cover. Spin `−1` means "in cover".
fn vertex_cover_matching(inst: &ProblemInstance) -> SpinAssignment {
    let mut in_cover = vec![false; inst.n];
    for &(a, b) in inst.edges() {
        if !in_cover[a] && !in_cover[b] {
            in_cover[a] = true;
            in_cover[b] = true;
        }
    }
    in_cover.iter().map(|&c| if c { -1 } else { 1 }).collect()
}
