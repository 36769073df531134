//! Gate-level circuit IR, QAOA circuit construction, transpilation to the
//! native set `{RZ, SX, CX}`, ASAP scheduling and noise-channel insertion.

mod coloring;
mod schedule;
mod transpile;

pub use coloring::misra_gries_coloring;
pub use schedule::{
    insert_noise, schedule, ChannelKind, IdleSegment, NoisyCircuit, ScheduledCircuit,
    ScheduledGate, SimStep,
};
pub use transpile::transpile;

use crate::densim::{self, DensityMatrix, Prep};
use crate::linalg::{c, pauli_x, CMatrix};
use crate::problems::IsingModel;
use crate::{Error, Result};

/// One gate occurrence. Two-qubit gates carry their qubits explicitly;
/// `targets[0]` of the embedded operator is the first listed qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    Rz { q: usize, theta: f64 },
    Sx { q: usize },
    X { q: usize },
    H { q: usize },
    Rx { q: usize, theta: f64 },
    Ry { q: usize, theta: f64 },
    Rzz { a: usize, b: usize, theta: f64 },
    Cx { control: usize, target: usize },
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Rz { q, .. }
            | Gate::Sx { q }
            | Gate::X { q }
            | Gate::H { q }
            | Gate::Rx { q, .. }
            | Gate::Ry { q, .. } => vec![q],
            Gate::Rzz { a, b, .. } => vec![a, b],
            Gate::Cx { control, target } => vec![control, target],
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gate::Rz { .. } => "RZ",
            Gate::Sx { .. } => "SX",
            Gate::X { .. } => "X",
            Gate::H { .. } => "H",
            Gate::Rx { .. } => "RX",
            Gate::Ry { .. } => "RY",
            Gate::Rzz { .. } => "RZZ",
            Gate::Cx { .. } => "CX",
        }
    }

    pub fn theta(&self) -> Option<f64> {
        match *self {
            Gate::Rz { theta, .. }
            | Gate::Rx { theta, .. }
            | Gate::Ry { theta, .. }
            | Gate::Rzz { theta, .. } => Some(theta),
            _ => None,
        }
    }

    /// True for members of the native set `{RZ, SX, CX}`.
    pub fn is_native(&self) -> bool {
        matches!(self, Gate::Rz { .. } | Gate::Sx { .. } | Gate::Cx { .. })
    }

    /// Unitary matrix of the gate on its own qubits (`targets[k]` = bit `k`).
    pub fn matrix(&self) -> CMatrix {
        match *self {
            Gate::Rz { theta, .. } => rz_matrix(theta),
            Gate::Sx { .. } => sx_matrix(),
            Gate::X { .. } => pauli_x(),
            Gate::H { .. } => h_matrix(),
            Gate::Rx { theta, .. } => {
                let (co, si) = ((theta / 2.0).cos(), (theta / 2.0).sin());
                CMatrix::from_rows(&[&[c(co, 0.), c(0., -si)], &[c(0., -si), c(co, 0.)]])
            }
            Gate::Ry { theta, .. } => {
                let (co, si) = ((theta / 2.0).cos(), (theta / 2.0).sin());
                CMatrix::from_rows(&[&[c(co, 0.), c(-si, 0.)], &[c(si, 0.), c(co, 0.)]])
            }
            Gate::Rzz { theta, .. } => {
                // exp(−i θ/2 Z⊗Z): phase −θ/2 on aligned, +θ/2 on anti-aligned.
                let mut m = CMatrix::zeros(4);
                let minus = c(0.0, -theta / 2.0).exp();
                let plus = c(0.0, theta / 2.0).exp();
                m[(0, 0)] = minus;
                m[(1, 1)] = plus;
                m[(2, 2)] = plus;
                m[(3, 3)] = minus;
                m
            }
            Gate::Cx { .. } => {
                // Control is bit 0, target is bit 1.
                let mut m = CMatrix::zeros(4);
                m[(0, 0)] = c(1., 0.);
                m[(3, 1)] = c(1., 0.);
                m[(2, 2)] = c(1., 0.);
                m[(1, 3)] = c(1., 0.);
                m
            }
        }
    }
}

pub fn rz_matrix(theta: f64) -> CMatrix {
    let mut m = CMatrix::zeros(2);
    m[(0, 0)] = c(0.0, -theta / 2.0).exp();
    m[(1, 1)] = c(0.0, theta / 2.0).exp();
    m
}

pub fn sx_matrix() -> CMatrix {
    CMatrix::from_rows(&[
        &[c(0.5, 0.5), c(0.5, -0.5)],
        &[c(0.5, -0.5), c(0.5, 0.5)],
    ])
}

pub fn h_matrix() -> CMatrix {
    CMatrix::from_rows(&[&[c(1., 0.), c(1., 0.)], &[c(1., 0.), c(-1., 0.)]])
        .scale(c(std::f64::consts::FRAC_1_SQRT_2, 0.))
}

/// Ordered gate list over `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub n: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n: usize) -> Self {
        Circuit { n, gates: Vec::new() }
    }

    pub fn push(&mut self, g: Gate) {
        debug_assert!(g.qubits().iter().all(|&q| q < self.n));
        self.gates.push(g);
    }

    pub fn is_native(&self) -> bool {
        self.gates.iter().all(Gate::is_native)
    }

    /// Line-per-gate debug dump: `GATE kind targets [theta]`.
    pub fn dump_text(&self) -> String {
        let mut out = String::new();
        for g in &self.gates {
            out.push_str("GATE ");
            out.push_str(g.name());
            for q in g.qubits() {
                out.push_str(&format!(" {q}"));
            }
            if let Some(t) = g.theta() {
                out.push_str(&format!(" {t:.12}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Initial-state and mixer style of a non-recursive QAOA circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CircuitVariant {
    Standard,
    WsInit,
    Wsqaoa,
}

/// Builds the layered QAOA circuit for an Ising model.
///
/// The separator realizes `e^{−iγ H_C}` exactly (up to the global phase from
/// the constant offset): `RZ(−2γh_i)` per linear term, then `RZZ(−2γJ_ij)`
/// per coupling, the latter grouped into Misra-Gries color classes so that
/// each class can run in parallel. The mixer is `RX(2β)` per qubit, replaced
/// by `RY(−θ_i)·RZ(−2β)·RY(θ_i)` for the warm-start mixer.
pub fn build_qaoa_circuit(
    m: &IsingModel,
    betas: &[f64],
    gammas: &[f64],
    variant: CircuitVariant,
    warm_thetas: Option<&[f64]>,
) -> Result<Circuit> {
    let n = m.n();
    if betas.is_empty() || betas.len() != gammas.len() {
        return Err(Error::invalid("need p >= 1 layers with matching angle lists"));
    }
    let thetas = match (variant, warm_thetas) {
        (CircuitVariant::Standard, _) => None,
        (_, Some(t)) if t.len() == n => Some(t),
        (_, Some(_)) => {
            return Err(Error::DimensionMismatch("warm-start angle count".into()))
        }
        (_, None) => {
            return Err(Error::invalid("warm-start variants require warm_thetas"))
        }
    };

    let mut circ = Circuit::new(n);

    // Initial state.
    match thetas {
        None => {
            for q in 0..n {
                circ.push(Gate::H { q });
            }
        }
        Some(t) => {
            for q in 0..n {
                circ.push(Gate::Ry { q, theta: t[q] });
            }
        }
    }

    // Edge coloring orders the two-qubit separator terms.
    let edges: Vec<(usize, usize)> = m.couplings().map(|(i, k, _)| (i, k)).collect();
    let colors = misra_gries_coloring(n, &edges);
    let num_colors = colors.iter().copied().max().map_or(0, |c| c + 1);

    for layer in 0..betas.len() {
        let (beta, gamma) = (betas[layer], gammas[layer]);

        // Separator: linear terms first, then coupling terms per color class.
        for (i, h) in m.linears() {
            circ.push(Gate::Rz { q: i, theta: -2.0 * gamma * h });
        }
        for color in 0..num_colors {
            for (idx, &(a, b)) in edges.iter().enumerate() {
                if colors[idx] == color {
                    let j = m.coupling(a, b);
                    circ.push(Gate::Rzz { a, b, theta: -2.0 * gamma * j });
                }
            }
        }

        // Mixer.
        match (variant, thetas) {
            (CircuitVariant::Wsqaoa, Some(t)) => {
                for q in 0..n {
                    circ.push(Gate::Ry { q, theta: -t[q] });
                    circ.push(Gate::Rz { q, theta: -2.0 * beta });
                    circ.push(Gate::Ry { q, theta: t[q] });
                }
            }
            _ => {
                for q in 0..n {
                    circ.push(Gate::Rx { q, theta: 2.0 * beta });
                }
            }
        }
    }
    Ok(circ)
}

/// Embeds a 1- or 2-qubit operator into the full `2^n` space.
pub fn embed(u: &CMatrix, targets: &[usize], n: usize) -> CMatrix {
    let k = targets.len();
    debug_assert_eq!(u.dim(), 1 << k);
    let dim = 1usize << n;
    let offsets: Vec<usize> = (0..1usize << k)
        .map(|v| {
            targets
                .iter()
                .enumerate()
                .map(|(b, &t)| ((v >> b) & 1) << t)
                .sum()
        })
        .collect();
    let rest: Vec<usize> = (0..n).filter(|q| !targets.contains(q)).collect();
    let mut out = CMatrix::zeros(dim);
    for w in 0..1usize << rest.len() {
        let base: usize = rest
            .iter()
            .enumerate()
            .map(|(b, &q)| ((w >> b) & 1) << q)
            .sum();
        for i in 0..1usize << k {
            for j in 0..1usize << k {
                out[(base | offsets[i], base | offsets[j])] = u[(i, j)];
            }
        }
    }
    out
}

/// Full-circuit unitary, for equivalence checks (`n ≤ 6`).
pub fn unitary_of(circ: &Circuit) -> Result<CMatrix> {
    if circ.n > 6 {
        return Err(Error::Capacity(circ.n, 6));
    }
    let mut total = CMatrix::identity(1 << circ.n);
    for g in &circ.gates {
        total = embed(&g.matrix(), &g.qubits(), circ.n).mul(&total);
    }
    Ok(total)
}

/// Simulates a noiseless circuit from the given preparation.
pub fn simulate(circ: &Circuit, prep: &Prep) -> Result<DensityMatrix> {
    let mut rho = densim::init_state(circ.n, prep)?;
    for g in &circ.gates {
        rho = rho.apply_unitary(&g.matrix(), &g.qubits())?;
    }
    Ok(rho)
}

/// Simulates a scheduled circuit with its inserted noise channels.
pub fn simulate_noisy(nc: &NoisyCircuit, prep: &Prep) -> Result<DensityMatrix> {
    let mut rho = densim::init_state(nc.scheduled.n, prep)?;
    for step in &nc.steps {
        rho = match step {
            SimStep::Gate(g) => rho.apply_unitary(&g.matrix(), &g.qubits())?,
            SimStep::Channel { ch, targets, .. } => rho.apply_channel(ch, targets)?,
        };
    }
    Ok(rho)
}
