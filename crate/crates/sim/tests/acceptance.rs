//! End-to-end acceptance suite. Each numbered criterion prints one
//! PASS/FAIL line; the test fails if any criterion fails.
//!
//! Criteria 8–10 and 12 execute the desk-scale Max-Cut suite (n ∈ {5,6,7},
//! 20 instances, p = 1, repeats 3) at zero and baseline noise; expect a
//! runtime in the tens of minutes on one core.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qaoa_sim::bench::{
    estimate_quantum_time, records_to_csv, run_on_instances, ExperimentConfig,
    ResultRecord,
};
use qaoa_sim::circuits::{
    build_qaoa_circuit, misra_gries_coloring, schedule, simulate, transpile, unitary_of,
    Circuit, CircuitVariant, Gate,
};
use qaoa_sim::densim::{init_state, KrausChannel, Prep};
use qaoa_sim::noise::{
    average_fidelity, baseline_params, depolarizing_avg_fidelity, depolarizing_channel,
    match_depol_probability, monte_carlo_fidelity, scale_params, thermal_avg_fidelity,
    thermal_channel, thermal_pair_avg_fidelity,
};
use qaoa_sim::problems::{
    average_quality, brute_force, encode, gen_graph, gen_partition, measure,
    IsingModel, ProblemInstance, ProblemKind,
};
use qaoa_sim::qaoa::{
    back_substitute, eliminate, run_variational, EliminationRecord, Variant,
    VariantConfig,
};

struct Scorecard {
    rows: Vec<(usize, String, bool)>,
}

impl Scorecard {
    fn new() -> Self {
        Scorecard { rows: Vec::new() }
    }

    fn record(&mut self, idx: usize, what: &str, ok: bool) {
        println!(
            "criterion {idx:2}: {} — {what}",
            if ok { "PASS" } else { "FAIL" }
        );
        self.rows.push((idx, what.to_string(), ok));
    }

    fn finish(mut self) {
        self.rows.sort_by_key(|r| r.0);
        println!("\n==== acceptance summary ====");
        for (idx, what, ok) in &self.rows {
            println!("criterion {idx:2}: {} — {what}", if *ok { "PASS" } else { "FAIL" });
        }
        let failed: Vec<usize> =
            self.rows.iter().filter(|r| !r.2).map(|r| r.0).collect();
        assert!(failed.is_empty(), "failed criteria: {failed:?}");
    }
}

// ---------------------------------------------------------------- criterion 1

fn random_gate<R: Rng>(n: usize, rng: &mut R) -> Gate {
    let q = rng.gen_range(0..n);
    let theta = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
    let pick = if n >= 2 { rng.gen_range(0..8) } else { rng.gen_range(0..6) };
    match pick {
        0 => Gate::Rz { q, theta },
        1 => Gate::Sx { q },
        2 => Gate::X { q },
        3 => Gate::H { q },
        4 => Gate::Rx { q, theta },
        5 => Gate::Ry { q, theta },
        _ => {
            let mut other = rng.gen_range(0..n - 1);
            if other >= q {
                other += 1;
            }
            if pick == 6 {
                Gate::Rzz { a: q, b: other, theta }
            } else {
                Gate::Cx { control: q, target: other }
            }
        }
    }
}

fn criterion_1(card: &mut Scorecard) {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0001);
    let mut worst_trace = 0.0f64;
    let mut worst_herm = 0.0f64;
    let mut worst_eig = 0.0f64;
    for _ in 0..500 {
        let n = rng.gen_range(1..=5);
        let prep = if rng.gen_bool(0.5) { Prep::AllZero } else { Prep::UniformPlus };
        let mut rho = init_state(n, &prep).unwrap();
        for _ in 0..10 {
            if rng.gen_bool(0.6) {
                let g = random_gate(n, &mut rng);
                rho = rho.apply_unitary(&g.matrix(), &g.qubits()).unwrap();
            } else if rng.gen_bool(0.5) {
                let t = rng.gen_range(0.0..2000.0);
                let ch = thermal_channel(100_000.0, 150_000.0, t).unwrap();
                let q = rng.gen_range(0..n);
                rho = rho.apply_channel(&ch, &[q]).unwrap();
            } else {
                let arity = if n >= 2 && rng.gen_bool(0.5) { 2 } else { 1 };
                let ch = depolarizing_channel(arity, rng.gen_range(0.0..0.3)).unwrap();
                let a = rng.gen_range(0..n);
                let targets = if arity == 1 {
                    vec![a]
                } else {
                    let mut b = rng.gen_range(0..n - 1);
                    if b >= a {
                        b += 1;
                    }
                    vec![a, b]
                };
                rho = rho.apply_channel(&ch, &targets).unwrap();
            }
        }
        worst_trace = worst_trace.max((rho.trace().re - 1.0).abs() + rho.trace().im.abs());
        worst_herm = worst_herm.max(rho.hermiticity_error());
        worst_eig = worst_eig.max(-rho.min_eigenvalue());
    }
    card.record(
        1,
        &format!(
            "500 random circuits: |trace−1| ≤ {worst_trace:.2e}, hermiticity ≤ \
             {worst_herm:.2e}, min eigenvalue ≥ −{worst_eig:.2e}"
        ),
        worst_trace <= 1e-9 && worst_herm <= 1e-10 && worst_eig <= 1e-9,
    );
}

// ---------------------------------------------------------------- criterion 2

fn tensor_pair(ch: &KrausChannel) -> KrausChannel {
    let mut ops = Vec::new();
    for a in ch.kraus_ops() {
        for b in ch.kraus_ops() {
            ops.push(a.kron(b));
        }
    }
    KrausChannel::new(2, ops).unwrap()
}

fn criterion_2(card: &mut Scorecard) {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0002);
    let mc = 100_000;
    let mut ok = true;
    let mut notes = Vec::new();

    // Depolarizing closed forms vs Monte Carlo.
    for (arity, p, formula) in [(1usize, 0.2, 1.0 - 0.2 / 2.0), (2, 0.4, 1.0 - 3.0 * 0.4 / 4.0)]
    {
        let analytic = depolarizing_avg_fidelity(arity, p);
        ok &= (analytic - formula).abs() < 1e-15;
        let est = monte_carlo_fidelity(
            &depolarizing_channel(arity, p).unwrap(),
            mc,
            &mut rng,
        );
        ok &= (analytic - est).abs() < 1e-3;
        notes.push(format!("depol{arity} Δmc={:.1e}", (analytic - est).abs()));
    }

    // Thermal relaxation, general and T1 = T2 forms.
    let (t1, t2, t) = (100_000.0, 150_000.0, 500.0);
    let analytic = thermal_avg_fidelity(t1, t2, t).unwrap();
    let closed = 0.5 + (-t / t1).exp() / 6.0 + (-t / t2).exp() / 3.0;
    ok &= (analytic - closed).abs() < 1e-15;
    let est = monte_carlo_fidelity(&thermal_channel(t1, t2, t).unwrap(), mc, &mut rng);
    ok &= (analytic - est).abs() < 1e-3;
    notes.push(format!("thermal Δmc={:.1e}", (analytic - est).abs()));

    let equal_t = thermal_avg_fidelity(80_000.0, 80_000.0, 700.0).unwrap();
    let paper_form = 0.5 + 0.5 * (-700.0f64 / 80_000.0).exp();
    ok &= (equal_t - paper_form).abs() < 1e-15;
    let est =
        monte_carlo_fidelity(&thermal_channel(80_000.0, 80_000.0, 700.0).unwrap(), mc, &mut rng);
    ok &= (equal_t - est).abs() < 1e-3;

    // Matched depolarizing probabilities reproduce the native-gate errors as
    // composed-channel infidelity.
    let np = baseline_params();
    let th_sx = thermal_channel(np.t1_ns, np.t2_ns, np.sx.duration_ns).unwrap();
    let f_sx = thermal_avg_fidelity(np.t1_ns, np.t2_ns, np.sx.duration_ns).unwrap();
    let m = match_depol_probability(1.0 - np.sx.error, f_sx, 1).unwrap();
    let composed = th_sx.then(&depolarizing_channel(1, m.p).unwrap()).unwrap();
    let dev_sx = (average_fidelity(&composed) - (1.0 - np.sx.error)).abs();
    ok &= dev_sx < 1e-6;

    let th_cx = tensor_pair(&thermal_channel(np.t1_ns, np.t2_ns, np.cx.duration_ns).unwrap());
    let f_cx = thermal_pair_avg_fidelity(np.t1_ns, np.t2_ns, np.cx.duration_ns).unwrap();
    ok &= (average_fidelity(&th_cx) - f_cx).abs() < 1e-12;
    let m = match_depol_probability(1.0 - np.cx.error, f_cx, 2).unwrap();
    let composed = th_cx.then(&depolarizing_channel(2, m.p).unwrap()).unwrap();
    let dev_cx = (average_fidelity(&composed) - (1.0 - np.cx.error)).abs();
    ok &= dev_cx < 1e-6;
    notes.push(format!("SX dev={dev_sx:.1e}, CX dev={dev_cx:.1e}"));

    card.record(2, &format!("channel math: {}", notes.join("; ")), ok);
}

// ---------------------------------------------------------------- criterion 3

fn criterion_3(card: &mut Scorecard) {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0003);
    let mut worst = 0.0f64;
    let mut native = true;
    for _ in 0..200 {
        let n = rng.gen_range(1..=4);
        let mut circ = Circuit::new(n);
        for _ in 0..8 {
            circ.push(random_gate(n, &mut rng));
        }
        let out = transpile(&circ).unwrap();
        native &= out.is_native();
        worst = worst.max(
            unitary_of(&out)
                .unwrap()
                .dist_up_to_phase(&unitary_of(&circ).unwrap()),
        );
    }
    card.record(
        3,
        &format!("200 transpiled circuits: native = {native}, max phase-free deviation = {worst:.2e}"),
        native && worst < 1e-9,
    );
}

// ---------------------------------------------------------------- criterion 4

fn proper_coloring(n: usize, edges: &[(usize, usize)]) -> bool {
    let colors = misra_gries_coloring(n, edges);
    let mut degree = vec![0usize; n];
    for &(a, b) in edges {
        degree[a] += 1;
        degree[b] += 1;
    }
    let max_degree = degree.iter().copied().max().unwrap_or(0);
    let within = colors.iter().all(|&c| c <= max_degree);
    let mut clash = false;
    for (i, &(a, b)) in edges.iter().enumerate() {
        for &(c, d) in &edges[i + 1..] {
            let shares = a == c || a == d || b == c || b == d;
            if shares && colors[i] == colors[edges.iter().position(|&e| e == (c, d)).unwrap()]
            {
                clash = true;
            }
        }
    }
    within && !clash
}

fn criterion_4(card: &mut Scorecard) {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0004);
    let mut ok = true;
    for _ in 0..100 {
        let n = 10;
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if rng.gen_bool(0.5) {
                    edges.push((a, b));
                }
            }
        }
        ok &= proper_coloring(n, &edges);
    }
    // Named witnesses: K3, the star K{1,4}, the 5-cycle.
    ok &= proper_coloring(3, &[(0, 1), (1, 2), (0, 2)]);
    ok &= proper_coloring(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
    ok &= proper_coloring(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
    card.record(4, "edge coloring proper with ≤ Δ+1 colors on 103 graphs", ok);
}

// ---------------------------------------------------------------- criterion 5

fn criterion_5(card: &mut Scorecard) {
    let mut ok = true;
    for kind in [ProblemKind::MaxCut, ProblemKind::Partition, ProblemKind::VertexCover] {
        for i in 0..50u64 {
            let n = 4 + (i as usize % 5);
            let inst = match kind {
                ProblemKind::Partition => gen_partition(n, 900 + i).unwrap(),
                _ => gen_graph(kind, n, 0.5, 900 + i).unwrap(),
            };
            let model = encode(&inst);
            let (ground, _) = model.brute_force_min().unwrap();
            let oracle = brute_force(&inst).unwrap();
            // Exact: the Ising ground state achieves the brute-force optimum.
            ok &= measure(&inst, &ground) == oracle.best_measure;
            if kind == ProblemKind::VertexCover {
                ok &= inst
                    .edges()
                    .iter()
                    .all(|&(a, b)| ground[a] == -1 || ground[b] == -1);
            }
        }
    }
    card.record(5, "Ising ground states are measure-optimal (3 × 50 instances, exact)", ok);
}

// ---------------------------------------------------------------- criterion 6

fn criterion_6(card: &mut Scorecard) {
    let inst = ProblemInstance {
        kind: ProblemKind::MaxCut,
        n: 2,
        seed: 0,
        edges: Some(vec![(0, 1)]),
        weights: None,
    };
    let noiseless = scale_params(&baseline_params(), 0.0, 0.0).unwrap();
    let cfg = VariantConfig::new(Variant::Standard, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0006);
    let run = run_variational(&inst, &cfg, &noiseless, &mut rng).unwrap();

    // Independent verification: exhaustive 100×100 angle scan.
    let model = encode(&inst);
    let mut grid_best = 0.0f64;
    for ib in 0..100 {
        let beta = std::f64::consts::PI * ib as f64 / 100.0;
        for ig in 0..100 {
            let gamma = 2.0 * std::f64::consts::PI * ig as f64 / 100.0;
            let circ =
                build_qaoa_circuit(&model, &[beta], &[gamma], CircuitVariant::Standard, None)
                    .unwrap();
            let rho = simulate(&circ, &Prep::AllZero).unwrap();
            let q = average_quality(&inst, &rho.measurement_probabilities()).unwrap();
            grid_best = grid_best.max(q);
        }
    }
    card.record(
        6,
        &format!(
            "single-edge Max-Cut p=1: optimizer quality {:.4}, grid-scan max {grid_best:.4}",
            run.avg_quality
        ),
        run.avg_quality >= 0.99 && grid_best >= 0.99,
    );
}

// ---------------------------------------------------------------- criterion 7

fn random_model<R: Rng>(n: usize, rng: &mut R) -> IsingModel {
    // Integer coefficients keep every energy sum exact in f64.
    let mut m = IsingModel::new(n);
    for i in 0..n {
        *m.linear_mut(i) = rng.gen_range(-3..=3) as f64;
        for k in i + 1..n {
            *m.coupling_mut(i, k) = rng.gen_range(-3..=3) as f64;
        }
    }
    m
}

fn criterion_7(card: &mut Scorecard) {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0007);
    let mut ok = true;
    for _ in 0..200 {
        let n = rng.gen_range(2..=6);
        let original = random_model(n, &mut rng);
        let steps = rng.gen_range(1..n);
        let mut reduced = original.clone();
        let mut records = Vec::new();
        for _ in 0..steps {
            let cur = reduced.n();
            let sigma = if rng.gen_bool(0.5) { 1 } else { -1 };
            let i = rng.gen_range(0..cur);
            let rec = if cur >= 2 && rng.gen_bool(0.7) {
                let mut j = rng.gen_range(0..cur - 1);
                if j >= i {
                    j += 1;
                }
                EliminationRecord::Merge { i, j, sigma }
            } else {
                EliminationRecord::Fix { i, sigma }
            };
            reduced = eliminate(&reduced, &rec).unwrap();
            records.push(rec);
        }

        // The tails of the reduced model enumerate exactly the assignments
        // satisfying the recorded constraints.
        let tail_n = reduced.n();
        let mut restricted_min = f64::INFINITY;
        for x in 0..1usize << tail_n {
            let tail: Vec<i8> =
                (0..tail_n).map(|b| if (x >> b) & 1 == 1 { 1 } else { -1 }).collect();
            let full = back_substitute(&records, &tail).unwrap();
            restricted_min = restricted_min.min(original.energy(&full));
            // Replay each elimination stage and verify its constraint.
            let mut cur = full.clone();
            for rec in &records {
                match *rec {
                    EliminationRecord::Fix { i, sigma } => {
                        ok &= cur[i] == sigma;
                        cur.remove(i);
                    }
                    EliminationRecord::Merge { i, j, sigma } => {
                        ok &= cur[i] == sigma * cur[j];
                        cur.remove(i);
                    }
                }
            }
        }
        let (_, reduced_min) = reduced.brute_force_min().unwrap();
        ok &= restricted_min == reduced_min;
    }
    card.record(7, "elimination preserves constrained minima on 200 models (exact)", ok);
}

// ------------------------------------------------------- criteria 8, 9, 10, 12

/// Fixed suite seed; the trend checks below are directional statements about
/// this deterministic instance set.
const SUITE_SEED: u64 = 2884075528;

fn suite_config(problems: Vec<ProblemKind>, sizes: Vec<usize>, noisy: bool) -> ExperimentConfig {
    let scale = if noisy { 1.0 } else { 0.0 };
    ExperimentConfig {
        problems,
        sizes,
        instances_per_size: 20,
        variants: vec![Variant::Standard, Variant::WsInit, Variant::Wsqaoa, Variant::Rqaoa],
        layers: vec![1],
        d_depol: vec![scale],
        d_thermal: vec![scale],
        repeats: 3,
        master_seed: SUITE_SEED,
        ..ExperimentConfig::desk(SUITE_SEED)
    }
}

fn run_suite(problems: Vec<ProblemKind>, sizes: Vec<usize>, variants: Option<Vec<Variant>>) -> Vec<ResultRecord> {
    let mut records = Vec::new();
    for noisy in [false, true] {
        let mut cfg = suite_config(problems.clone(), sizes.clone(), noisy);
        if let Some(v) = &variants {
            cfg.variants = v.clone();
        }
        records.extend(
            run_on_instances(&cfg, &qaoa_sim::bench::generate_instances(&cfg).unwrap())
                .unwrap(),
        );
    }
    records
}

fn mean<'a>(records: impl Iterator<Item = &'a ResultRecord>) -> f64 {
    let v: Vec<f64> = records.map(|r| r.avg_quality).collect();
    v.iter().sum::<f64>() / v.len() as f64
}

fn desk_criteria(card: &mut Scorecard) {
    let t0 = std::time::Instant::now();
    let records = run_suite(vec![ProblemKind::MaxCut], vec![5, 6, 7], None);
    let suite_secs = t0.elapsed().as_secs_f64();

    let noisy = |r: &&ResultRecord| r.d_depol == 1.0;
    let noiseless = |r: &&ResultRecord| r.d_depol == 0.0;

    // 8: RQAOA best vs standard worst at baseline noise.
    let q_rqaoa = mean(records.iter().filter(noisy).filter(|r| r.variant == Variant::Rqaoa));
    let q_std =
        mean(records.iter().filter(noisy).filter(|r| r.variant == Variant::Standard));
    card.record(
        8,
        &format!(
            "desk suite ({suite_secs:.0} s): baseline-noise mean quality RQAOA {q_rqaoa:.4} \
             vs standard {q_std:.4}"
        ),
        q_rqaoa > q_std + 0.02,
    );

    // 9: every variant degrades (within slack) under noise.
    let mut ok9 = true;
    let mut parts = Vec::new();
    for v in [Variant::Standard, Variant::WsInit, Variant::Wsqaoa, Variant::Rqaoa] {
        let qn = mean(records.iter().filter(noisy).filter(|r| r.variant == v));
        let qc = mean(records.iter().filter(noiseless).filter(|r| r.variant == v));
        ok9 &= qn <= qc + 0.01;
        parts.push(format!("{} {qc:.3}→{qn:.3}", v.as_str()));
    }
    card.record(9, &format!("noise never helps: {}", parts.join(", ")), ok9);

    // 10: Partition degrades at least as much as Max-Cut (standard, n = 6).
    let partition = run_suite(
        vec![ProblemKind::Partition],
        vec![6],
        Some(vec![Variant::Standard]),
    );
    let drop = |records: &[ResultRecord], n: usize| -> f64 {
        let f = |r: &&ResultRecord| r.variant == Variant::Standard && r.n == n;
        mean(records.iter().filter(noiseless).filter(f))
            - mean(records.iter().filter(noisy).filter(f))
    };
    let drop_mc = drop(&records, 6);
    let drop_pt = drop(&partition, 6);
    card.record(
        10,
        &format!("noise-induced drop: Partition {drop_pt:.4} ≥ Max-Cut {drop_mc:.4}"),
        drop_pt >= drop_mc,
    );

    // 11 (runtime ordering half): recursion costs more than one inner run.
    let t_rqaoa = mean_time(&records, Variant::Rqaoa);
    let t_std = mean_time(&records, Variant::Standard);
    criterion_11(card, t_rqaoa, t_std);

    // 12: full rerun is bit-identical modulo wall-clock columns.
    let rerun = run_suite(vec![ProblemKind::MaxCut], vec![5, 6, 7], None);
    let strip = |rs: &[ResultRecord]| {
        let cleaned: Vec<ResultRecord> = rs
            .iter()
            .map(|r| ResultRecord { classical_time_s: 0.0, ..r.clone() })
            .collect();
        records_to_csv(&cleaned)
    };
    card.record(
        12,
        "identical desk-suite rerun reproduces the results CSV",
        strip(&records) == strip(&rerun),
    );
}

fn mean_time(records: &[ResultRecord], v: Variant) -> f64 {
    let times: Vec<f64> = records
        .iter()
        .filter(|r| r.variant == v && r.d_depol == 1.0)
        .map(|r| r.quantum_time_est_s)
        .collect();
    times.iter().sum::<f64>() / times.len() as f64
}

// --------------------------------------------------------------- criterion 11

fn criterion_11(card: &mut Scorecard, t_rqaoa: f64, t_std: f64) {
    let np = baseline_params();
    let empty = schedule(&Circuit::new(1), &np).unwrap();
    let t_empty = estimate_quantum_time(&empty, &np, 1, 1000);

    let mut cx = Circuit::new(2);
    cx.push(Gate::Cx { control: 0, target: 1 });
    let sc = schedule(&cx, &np).unwrap();
    let t_cx = estimate_quantum_time(&sc, &np, 1, 1000);
    let linear = (estimate_quantum_time(&sc, &np, 7, 1000) - 7.0 * t_cx).abs() < 1e-15;

    card.record(
        11,
        &format!(
            "runtime estimator: empty {:.3} ms, CX {:.3} ms, linear in evals, \
             RQAOA {t_rqaoa:.3} s > inner QAOA {t_std:.3} s",
            t_empty * 1e3,
            t_cx * 1e3
        ),
        (t_empty - 4.09e-3).abs() < 1e-12
            && (t_cx - 4.49e-3).abs() < 1e-12
            && linear
            && t_rqaoa > t_std,
    );
}

// --------------------------------------------------------------------- driver

#[test]
fn acceptance() {
    let mut card = Scorecard::new();
    criterion_1(&mut card);
    criterion_2(&mut card);
    criterion_3(&mut card);
    criterion_4(&mut card);
    criterion_5(&mut card);
    criterion_6(&mut card);
    criterion_7(&mut card);
    desk_criteria(&mut card);
    card.finish();
}
