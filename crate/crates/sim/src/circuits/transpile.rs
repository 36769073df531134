//! Transpilation to the native gate set `{RZ, SX, CX}`.
//!
//! Single-qubit gates go through a ZYZ Euler decomposition and are emitted
//! as the standard RZ-SX-RZ-SX-RZ template (or shorter when the middle angle
//! degenerates); `RZZ(θ)` becomes `CX · RZ(θ) · CX`. A final pass merges
//! adjacent RZ rotations on the same qubit and drops the ones that vanish.

use std::collections::HashMap;
use std::f64::consts::PI;

use crate::linalg::CMatrix;
use crate::{Error, Result};

use super::{Circuit, Gate};

const ANGLE_EPS: f64 = 1e-9;

/// Rewrites a circuit into the native set, preserving the overall unitary up
/// to global phase.
pub fn transpile(circ: &Circuit) -> Result<Circuit> {
    let mut out = Circuit::new(circ.n);
    for g in &circ.gates {
        match *g {
            Gate::Rz { .. } | Gate::Sx { .. } | Gate::Cx { .. } => out.push(*g),
            Gate::Rzz { a, b, theta } => {
                out.push(Gate::Cx { control: a, target: b });
                out.push(Gate::Rz { q: b, theta });
                out.push(Gate::Cx { control: a, target: b });
            }
            Gate::X { q } | Gate::H { q } | Gate::Rx { q, .. } | Gate::Ry { q, .. } => {
                let (theta, phi, lam) = zyz_angles(&g.matrix())?;
                emit_zsz(&mut out, q, theta, phi, lam);
            }
        }
    }
    Ok(merge_rz(&out))
}

/// ZYZ Euler angles of a single-qubit unitary: `U ∝ RZ(φ) RY(θ) RZ(λ)`
/// with `θ ∈ [0, π]`.
fn zyz_angles(u: &CMatrix) -> Result<(f64, f64, f64)> {
    if u.dim() != 2 {
        return Err(Error::Transpile("ZYZ expects a 2×2 unitary".into()));
    }
    // Normalize to determinant 1 so entry phases are well defined.
    let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
    let phase = det.sqrt();
    if phase.norm() < 1e-12 {
        return Err(Error::Transpile("singular matrix in ZYZ".into()));
    }
    let u00 = u[(0, 0)] / phase;
    let u10 = u[(1, 0)] / phase;
    let u11 = u[(1, 1)] / phase;

    let theta = 2.0 * u10.norm().atan2(u00.norm());
    let (half_sum, half_diff) = if u00.norm() < 1e-10 {
        (0.0, u10.arg())
    } else if u10.norm() < 1e-10 {
        (u11.arg(), 0.0)
    } else {
        (u11.arg(), u10.arg())
    };
    Ok((theta, half_sum + half_diff, half_sum - half_diff))
}

/// Emits `RZ(φ) RY(θ) RZ(λ)` (matrix order) as native gates in temporal
/// order, using the shortest template for the given θ.
fn emit_zsz(out: &mut Circuit, q: usize, theta: f64, phi: f64, lam: f64) {
    if theta.abs() < ANGLE_EPS {
        out.push(Gate::Rz { q, theta: phi + lam });
    } else if (theta - PI / 2.0).abs() < ANGLE_EPS {
        // RZ(φ) RY(π/2) RZ(λ) ∝ RZ(φ + π/2) · SX · RZ(λ − π/2)
        out.push(Gate::Rz { q, theta: lam - PI / 2.0 });
        out.push(Gate::Sx { q });
        out.push(Gate::Rz { q, theta: phi + PI / 2.0 });
    } else {
        // General case: RZ(φ + π) · SX · RZ(θ + π) · SX · RZ(λ)
        out.push(Gate::Rz { q, theta: lam });
        out.push(Gate::Sx { q });
        out.push(Gate::Rz { q, theta: theta + PI });
        out.push(Gate::Sx { q });
        out.push(Gate::Rz { q, theta: phi + PI });
    }
}

/// Merges runs of RZ gates on the same qubit (RZ commutes with nothing else
/// in the native set, so merging only across gates on other qubits is safe)
/// and drops rotations that are ≡ 0 (mod 2π).
fn merge_rz(circ: &Circuit) -> Circuit {
    let mut out = Circuit::new(circ.n);
    let mut pending: HashMap<usize, f64> = HashMap::new();

    let flush = |out: &mut Circuit, pending: &mut HashMap<usize, f64>, qs: &[usize]| {
        for &q in qs {
            if let Some(theta) = pending.remove(&q) {
                if !is_zero_mod_2pi(theta) {
                    out.push(Gate::Rz { q, theta: normalize_angle(theta) });
                }
            }
        }
    };

    for g in &circ.gates {
        match *g {
            Gate::Rz { q, theta } => {
                *pending.entry(q).or_insert(0.0) += theta;
            }
            _ => {
                flush(&mut out, &mut pending, &g.qubits());
                out.push(*g);
            }
        }
    }
    let mut rest: Vec<usize> = pending.keys().copied().collect();
    rest.sort_unstable();
    flush(&mut out, &mut pending, &rest);
    out
}

fn is_zero_mod_2pi(theta: f64) -> bool {
    let r = theta.rem_euclid(2.0 * PI);
    r < ANGLE_EPS || (2.0 * PI - r) < ANGLE_EPS
}

/// Wraps an angle into `(−π, π]`.
fn normalize_angle(theta: f64) -> f64 {
    let mut r = theta.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    r
}
