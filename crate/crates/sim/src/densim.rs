//! Exact density-matrix simulation.
//!
//! States are dense `2^n × 2^n` complex matrices. Qubit index 0 is the
//! least-significant bit of the computational-basis integer: basis state
//! `|x⟩` has qubit `i` in state `(x >> i) & 1`.
//!
//! Unitaries and Kraus channels acting on one or two qubits are applied by
//! index arithmetic over the target qubits (block updates of the density
//! matrix), so a channel application costs `O(4^n)` rather than `O(8^n)`.

use num_complex::Complex64;
use rand::Rng;

use crate::linalg::CMatrix;
use crate::problems::IsingModel;
use crate::{Error, Result};

/// Hard capacity of the dense simulator.
pub const MAX_QUBITS: usize = 12;

/// Initial state preparations.
#[derive(Debug, Clone, PartialEq)]
pub enum Prep {
    /// `|0...0⟩`
    AllZero,
    /// `|+⟩^n`
    UniformPlus,
    /// `⊗_i RY(θ_i)|0⟩`
    ProductRy(Vec<f64>),
}

/// Mixed quantum state as a Hermitian, PSD, unit-trace matrix.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    n: usize,
    data: Vec<Complex64>,
}

/// Trace-preserving quantum channel in Kraus form.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    arity: usize,
    ops: Vec<CMatrix>,
    /// Set when the channel is known to be depolarizing with this
    /// probability; unlocks a closed-form application path.
    pub(crate) depol: Option<f64>,
}

/// One measured basis state with its multiplicity within a sample set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisSample {
    /// Basis-state integer (qubit 0 = least-significant bit).
    pub state: usize,
    pub multiplicity: u64,
}

impl BasisSample {
    /// Bit of qubit `i`.
    pub fn bit(&self, i: usize) -> u8 {
        ((self.state >> i) & 1) as u8
    }

    /// Spin value `(−1)^{x_i}` of qubit `i`.
    pub fn spin(&self, i: usize) -> i8 {
        if self.bit(i) == 0 {
            1
        } else {
            -1
        }
    }

    /// Bitstring with qubit 0 first.
    pub fn bitstring(&self, n: usize) -> String {
        (0..n).map(|i| if self.bit(i) == 0 { '0' } else { '1' }).collect()
    }
}

impl KrausChannel {
    /// Builds a channel, checking the completeness relation `Σ K†K = I`
    /// within `1e-10`.
    pub fn new(arity: usize, ops: Vec<CMatrix>) -> Result<Self> {
        if arity == 0 || arity > 2 {
            return Err(Error::invalid(format!("unsupported channel arity {arity}")));
        }
        let dim = 1 << arity;
        if ops.is_empty() || ops.iter().any(|k| k.dim() != dim) {
            return Err(Error::invalid("Kraus operator dimension mismatch"));
        }
        let mut sum = CMatrix::zeros(dim);
        for k in &ops {
            sum = sum.add(&k.dagger().mul(k));
        }
        let dev = sum.sub(&CMatrix::identity(dim)).max_norm();
        if dev > 1e-10 {
            return Err(Error::NotTracePreserving(dev));
        }
        Ok(KrausChannel { arity, ops, depol: None })
    }

    pub fn identity(arity: usize) -> Self {
        KrausChannel {
            arity,
            ops: vec![CMatrix::identity(1 << arity)],
            depol: None,
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn kraus_ops(&self) -> &[CMatrix] {
        &self.ops
    }

    /// True if the channel is exactly a single identity Kraus operator up to
    /// global phase. Used to skip no-op insertions.
    pub fn is_identity(&self) -> bool {
        self.ops.len() == 1
            && self.ops[0]
                .dist_up_to_phase(&CMatrix::identity(1 << self.arity))
                < 1e-14
    }

    /// Composition `other ∘ self` (apply `self` first), as the product Kraus
    /// family.
    pub fn then(&self, other: &KrausChannel) -> Result<KrausChannel> {
        if self.arity != other.arity {
            return Err(Error::DimensionMismatch(
                "composing channels of different arity".into(),
            ));
        }
        let mut ops = Vec::with_capacity(self.ops.len() * other.ops.len());
        for a in &other.ops {
            for b in &self.ops {
                ops.push(a.mul(b));
            }
        }
        KrausChannel::new(self.arity, ops)
    }
}

/// Creates the pure state `|ψ⟩⟨ψ|` for the requested preparation.
pub fn init_state(n: usize, prep: &Prep) -> Result<DensityMatrix> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::Capacity(n, MAX_QUBITS));
    }
    let dim = 1usize << n;
    // Build the statevector, then the outer product.
    let psi: Vec<Complex64> = match prep {
        Prep::AllZero => {
            let mut v = vec![Complex64::new(0.0, 0.0); dim];
            v[0] = Complex64::new(1.0, 0.0);
            v
        }
        Prep::UniformPlus => {
            let amp = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
            vec![amp; dim]
        }
        Prep::ProductRy(thetas) => {
            if thetas.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "expected {n} angles, got {}",
                    thetas.len()
                )));
            }
            if thetas.iter().any(|t| !t.is_finite()) {
                return Err(Error::invalid("non-finite RY angle"));
            }
            let mut v = Vec::with_capacity(dim);
            for x in 0..dim {
                // RY(θ)|0⟩ = cos(θ/2)|0⟩ + sin(θ/2)|1⟩ per qubit.
                let mut amp = 1.0;
                for (i, t) in thetas.iter().enumerate() {
                    amp *= if (x >> i) & 1 == 0 {
                        (t / 2.0).cos()
                    } else {
                        (t / 2.0).sin()
                    };
                }
                v.push(Complex64::new(amp, 0.0));
            }
            v
        }
    };
    let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
    for r in 0..dim {
        for c in 0..dim {
            data[r * dim + c] = psi[r] * psi[c].conj();
        }
    }
    Ok(DensityMatrix { n, data })
}

impl DensityMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn entry(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.dim() + c]
    }

    /// Maximally mixed state `I / 2^n`.
    pub fn maximally_mixed(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::Capacity(n, MAX_QUBITS));
        }
        let dim = 1usize << n;
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Complex64::new(1.0 / dim as f64, 0.0);
        }
        Ok(DensityMatrix { n, data })
    }

    fn validate_targets(&self, targets: &[usize]) -> Result<()> {
        if targets.is_empty() || targets.len() > 2 {
            return Err(Error::invalid("operators act on 1 or 2 qubits"));
        }
        if targets.iter().any(|&t| t >= self.n) {
            return Err(Error::invalid(format!("target out of range: {targets:?}")));
        }
        if targets.len() == 2 && targets[0] == targets[1] {
            return Err(Error::invalid("duplicate target qubits"));
        }
        Ok(())
    }

    /// `ρ′ = U ρ U†` with `U` embedded on `targets`.
    ///
    /// `targets[k]` corresponds to bit `k` of the operator's own basis index.
    pub fn apply_unitary(&self, u: &CMatrix, targets: &[usize]) -> Result<DensityMatrix> {
        self.validate_targets(targets)?;
        if u.dim() != 1 << targets.len() {
            return Err(Error::DimensionMismatch(format!(
                "operator dim {} for {} target(s)",
                u.dim(),
                targets.len()
            )));
        }
        let err = u.unitarity_error();
        if err > 1e-10 {
            return Err(Error::NotUnitary(err));
        }
        let udag = u.dagger();
        Ok(self.map_blocks(targets, |block, out, scratch| {
            block_conjugate(u, &udag, block, out, scratch, true);
        }))
    }

    /// `ρ′ = Σ_k K_k ρ K_k†` with the channel embedded on `targets`.
    pub fn apply_channel(&self, ch: &KrausChannel, targets: &[usize]) -> Result<DensityMatrix> {
        self.validate_targets(targets)?;
        if ch.arity() != targets.len() {
            return Err(Error::DimensionMismatch(format!(
                "channel arity {} for {} target(s)",
                ch.arity(),
                targets.len()
            )));
        }
        let b = 1usize << targets.len();
        if let Some(p) = ch.depol {
            // Closed form ρ′ = (1−p)ρ + p · Tr_targets(ρ) ⊗ I/d: per block,
            // scale by 1−p and add p/d times the block trace on the diagonal.
            let keep = Complex64::new(1.0 - p, 0.0);
            return Ok(self.map_blocks(targets, move |block, out, _| {
                let mut tr = Complex64::new(0.0, 0.0);
                for i in 0..b {
                    tr += block[i * b + i];
                }
                let fill = tr * (p / b as f64);
                for (o, &v) in out.iter_mut().zip(block) {
                    *o = v * keep;
                }
                for i in 0..b {
                    out[i * b + i] += fill;
                }
            }));
        }
        // Fold the Kraus family into one superoperator so each block costs
        // d⁴ multiplications regardless of the number of operators.
        let bb = b * b;
        let mut sop = vec![Complex64::new(0.0, 0.0); bb * bb];
        for k in &ch.ops {
            for i in 0..b {
                for kk in 0..b {
                    for j in 0..b {
                        for l in 0..b {
                            sop[(i * b + j) * bb + (kk * b + l)] +=
                                k[(i, kk)] * k[(j, l)].conj();
                        }
                    }
                }
            }
        }
        Ok(self.map_blocks(targets, move |block, out, _| {
            for (r, o) in out.iter_mut().enumerate() {
                let row = &sop[r * bb..(r + 1) * bb];
                let mut acc = Complex64::new(0.0, 0.0);
                for (s, &v) in row.iter().zip(block) {
                    acc += s * v;
                }
                *o = acc;
            }
        }))
    }

    /// Applies `f` to every block of `ρ` spanned by the target qubits.
    ///
    /// `f(block, out, scratch)` must write (or accumulate into) `out`; `out`
    /// starts zeroed for each block.
    fn map_blocks<F>(&self, targets: &[usize], f: F) -> DensityMatrix
    where
        F: Fn(&[Complex64], &mut [Complex64], &mut [Complex64]),
    {
        let dim = self.dim();
        let b = 1usize << targets.len();
        let offsets: Vec<usize> = (0..b)
            .map(|v| {
                targets
                    .iter()
                    .enumerate()
                    .map(|(k, &t)| ((v >> k) & 1) << t)
                    .sum()
            })
            .collect();
        let bases = base_indices(self.n, targets);

        let mut new = vec![Complex64::new(0.0, 0.0); dim * dim];
        let mut block = vec![Complex64::new(0.0, 0.0); b * b];
        let mut out = vec![Complex64::new(0.0, 0.0); b * b];
        let mut scratch = vec![Complex64::new(0.0, 0.0); b * b];
        for &br in &bases {
            for &bc in &bases {
                for i in 0..b {
                    for j in 0..b {
                        block[i * b + j] = self.data[(br | offsets[i]) * dim + (bc | offsets[j])];
                    }
                }
                out.fill(Complex64::new(0.0, 0.0));
                f(&block, &mut out, &mut scratch);
                for i in 0..b {
                    for j in 0..b {
                        new[(br | offsets[i]) * dim + (bc | offsets[j])] = out[i * b + j];
                    }
                }
            }
        }
        DensityMatrix { n: self.n, data: new }
    }

    /// Diagonal of `ρ` as a probability vector.
    ///
    /// Small negative entries (floating-point PSD drift) are clamped to zero
    /// and the vector renormalized.
    pub fn measurement_probabilities(&self) -> Vec<f64> {
        let dim = self.dim();
        let mut probs: Vec<f64> = (0..dim)
            .map(|i| self.data[i * dim + i].re.max(0.0))
            .collect();
        let total: f64 = probs.iter().sum();
        if total > 0.0 {
            for p in &mut probs {
                *p /= total;
            }
        }
        probs
    }

    /// Draws `shots` i.i.d. basis-state samples, aggregated by state and
    /// sorted by basis index. Deterministic for a seeded generator.
    pub fn sample<R: Rng>(&self, shots: u64, rng: &mut R) -> Vec<BasisSample> {
        let probs = self.measurement_probabilities();
        let mut cumulative = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for p in &probs {
            acc += p;
            cumulative.push(acc);
        }
        let mut counts = vec![0u64; probs.len()];
        for _ in 0..shots {
            let u: f64 = rng.gen::<f64>() * acc;
            let idx = cumulative.partition_point(|&c| c <= u).min(probs.len() - 1);
            counts[idx] += 1;
        }
        counts
            .into_iter()
            .enumerate()
            .filter(|&(_, m)| m > 0)
            .map(|(state, multiplicity)| BasisSample { state, multiplicity })
            .collect()
    }

    /// Exact `⟨H_C⟩ = Σ_x p_x · C(spins(x))` with `spins(x)_i = (−1)^{x_i}`.
    pub fn expectation_ising(&self, m: &IsingModel) -> Result<f64> {
        if m.n() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "model has {} variables, state has {} qubits",
                m.n(),
                self.n
            )));
        }
        let probs = self.measurement_probabilities();
        Ok(probs
            .iter()
            .enumerate()
            .map(|(x, p)| p * m.energy_of_state(x))
            .sum())
    }

    pub fn trace(&self) -> Complex64 {
        let dim = self.dim();
        (0..dim).map(|i| self.data[i * dim + i]).sum()
    }

    /// `max |ρ[i][j] − conj(ρ[j][i])|`.
    pub fn hermiticity_error(&self) -> f64 {
        let dim = self.dim();
        let mut worst: f64 = 0.0;
        for r in 0..dim {
            for c in r..dim {
                let d = (self.data[r * dim + c] - self.data[c * dim + r].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Smallest eigenvalue, via the real symmetric embedding
    /// `[[Re ρ, −Im ρ], [Im ρ, Re ρ]]`.
    pub fn min_eigenvalue(&self) -> f64 {
        let dim = self.dim();
        let mut m = nalgebra::DMatrix::<f64>::zeros(2 * dim, 2 * dim);
        for r in 0..dim {
            for c in 0..dim {
                let v = self.data[r * dim + c];
                m[(r, c)] = v.re;
                m[(dim + r, dim + c)] = v.re;
                m[(r, dim + c)] = -v.im;
                m[(dim + r, c)] = v.im;
            }
        }
        let eig = nalgebra::SymmetricEigen::new(m);
        eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// All basis indices with zero bits at the target positions.
fn base_indices(n: usize, targets: &[usize]) -> Vec<usize> {
    let rest: Vec<usize> = (0..n).filter(|q| !targets.contains(q)).collect();
    (0..1usize << rest.len())
        .map(|w| {
            rest.iter()
                .enumerate()
                .map(|(k, &q)| ((w >> k) & 1) << q)
                .sum()
        })
        .collect()
}

/// Accumulates `K · block · K†` into `out` (overwrites when `overwrite`).
fn block_conjugate(
    k: &CMatrix,
    kdag: &CMatrix,
    block: &[Complex64],
    out: &mut [Complex64],
    scratch: &mut [Complex64],
    overwrite: bool,
) {
    let b = k.dim();
    // scratch = K · block
    for i in 0..b {
        for j in 0..b {
            let mut acc = Complex64::new(0.0, 0.0);
            for p in 0..b {
                acc += k[(i, p)] * block[p * b + j];
            }
            scratch[i * b + j] = acc;
        }
    }
    // out (+)= scratch · K†
    for i in 0..b {
        for j in 0..b {
            let mut acc = Complex64::new(0.0, 0.0);
            for p in 0..b {
                acc += scratch[i * b + p] * kdag[(p, j)];
            }
            if overwrite {
                out[i * b + j] = acc;
            } else {
                out[i * b + j] += acc;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn pauli_x() -> CMatrix {
        CMatrix::from_rows(&[&[c(0., 0.), c(1., 0.)], &[c(1., 0.), c(0., 0.)]])
    }

    fn pauli_z() -> CMatrix {
        CMatrix::from_rows(&[&[c(1., 0.), c(0., 0.)], &[c(0., 0.), c(-1., 0.)]])
    }

    #[test]
    fn init_all_zero() {
        let rho = init_state(1, &Prep::AllZero).unwrap();
        assert!((rho.entry(0, 0).re - 1.0).abs() < 1e-15);
        assert!(rho.entry(1, 1).norm() < 1e-15);
    }

    #[test]
    fn init_uniform_plus_single_qubit() {
        let rho = init_state(1, &Prep::UniformPlus).unwrap();
        for r in 0..2 {
            for c_ in 0..2 {
                assert!((rho.entry(r, c_).re - 0.5).abs() < 1e-15);
                assert!(rho.entry(r, c_).im.abs() < 1e-15);
            }
        }
    }

    #[test]
    fn init_product_ry() {
        // RY(π/3)|0⟩: populations cos²(π/6) = 0.75, sin²(π/6) = 0.25.
        let rho = init_state(1, &Prep::ProductRy(vec![PI / 3.0])).unwrap();
        assert!((rho.entry(0, 0).re - 0.75).abs() < 1e-12);
        assert!((rho.entry(1, 1).re - 0.25).abs() < 1e-12);
    }

    #[test]
    fn init_capacity_error() {
        assert!(matches!(
            init_state(MAX_QUBITS + 1, &Prep::AllZero),
            Err(Error::Capacity(..))
        ));
        assert!(matches!(init_state(0, &Prep::AllZero), Err(Error::Capacity(..))));
    }

    #[test]
    fn x_flips_ground_state() {
        let rho = init_state(1, &Prep::AllZero).unwrap();
        let rho = rho.apply_unitary(&pauli_x(), &[0]).unwrap();
        assert!(rho.entry(0, 0).norm() < 1e-15);
        assert!((rho.entry(1, 1).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn z_turns_plus_into_minus() {
        let rho = init_state(1, &Prep::UniformPlus).unwrap();
        let rho = rho.apply_unitary(&pauli_z(), &[0]).unwrap();
        assert!((rho.entry(0, 0).re - 0.5).abs() < 1e-15);
        assert!((rho.entry(0, 1).re + 0.5).abs() < 1e-15);
    }

    #[test]
    fn bell_state_corners() {
        // H on qubit 0 then CX(0 → 1) from |00⟩.
        let h = CMatrix::from_rows(&[
            &[c(1., 0.), c(1., 0.)],
            &[c(1., 0.), c(-1., 0.)],
        ])
        .scale(c(std::f64::consts::FRAC_1_SQRT_2, 0.));
        let mut cx = CMatrix::zeros(4);
        cx[(0, 0)] = c(1., 0.);
        cx[(3, 1)] = c(1., 0.);
        cx[(2, 2)] = c(1., 0.);
        cx[(1, 3)] = c(1., 0.);
        let rho = init_state(2, &Prep::AllZero)
            .unwrap()
            .apply_unitary(&h, &[0])
            .unwrap()
            .apply_unitary(&cx, &[0, 1])
            .unwrap();
        for (r, c_) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            assert!((rho.entry(r, c_).re - 0.5).abs() < 1e-12, "corner ({r},{c_})");
        }
        let probs = rho.measurement_probabilities();
        assert!((probs[0] - 0.5).abs() < 1e-12);
        assert!(probs[1].abs() < 1e-12);
        assert!(probs[2].abs() < 1e-12);
        assert!((probs[3] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn non_unitary_rejected() {
        let bad = CMatrix::from_rows(&[&[c(1., 0.), c(0., 0.)], &[c(0., 0.), c(0.5, 0.)]]);
        let rho = init_state(1, &Prep::AllZero).unwrap();
        assert!(matches!(rho.apply_unitary(&bad, &[0]), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn duplicate_targets_rejected() {
        let rho = init_state(2, &Prep::AllZero).unwrap();
        let id = CMatrix::identity(4);
        assert!(rho.apply_unitary(&id, &[1, 1]).is_err());
    }

    #[test]
    fn identity_channel_is_noop() {
        let rho = init_state(2, &Prep::UniformPlus).unwrap();
        let out = rho.apply_channel(&KrausChannel::identity(1), &[1]).unwrap();
        for r in 0..4 {
            for c_ in 0..4 {
                assert!((rho.entry(r, c_) - out.entry(r, c_)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn full_depolarizing_gives_maximally_mixed_qubit() {
        // p = 1 depolarizing as a Kraus family over the Pauli basis.
        let half = 0.5;
        let i = CMatrix::identity(2).scale(c(half, 0.));
        let x = pauli_x().scale(c(half, 0.));
        let y = CMatrix::from_rows(&[&[c(0., 0.), c(0., -1.)], &[c(0., 1.), c(0., 0.)]])
            .scale(c(half, 0.));
        let z = pauli_z().scale(c(half, 0.));
        let ch = KrausChannel::new(1, vec![i, x, y, z]).unwrap();
        let rho = init_state(1, &Prep::AllZero).unwrap();
        let out = rho.apply_channel(&ch, &[0]).unwrap();
        assert!((out.entry(0, 0).re - 0.5).abs() < 1e-12);
        assert!((out.entry(1, 1).re - 0.5).abs() < 1e-12);
        assert!(out.entry(0, 1).norm() < 1e-12);
    }

    #[test]
    fn incomplete_kraus_rejected() {
        let k = CMatrix::identity(2).scale(c(0.9, 0.));
        assert!(matches!(
            KrausChannel::new(1, vec![k]),
            Err(Error::NotTracePreserving(_))
        ));
    }

    #[test]
    fn single_kraus_unitary_matches_apply_unitary() {
        let rho = init_state(2, &Prep::UniformPlus).unwrap();
        let x = pauli_x();
        let via_unitary = rho.apply_unitary(&x, &[1]).unwrap();
        let ch = KrausChannel::new(1, vec![x]).unwrap();
        let via_channel = rho.apply_channel(&ch, &[1]).unwrap();
        for r in 0..4 {
            for c_ in 0..4 {
                assert!((via_unitary.entry(r, c_) - via_channel.entry(r, c_)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn point_mass_sampling() {
        let rho = init_state(3, &Prep::AllZero).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let samples = rho.sample(10, &mut rng);
        assert_eq!(samples, vec![BasisSample { state: 0, multiplicity: 10 }]);
    }

    #[test]
    fn sampling_concentrates_and_is_deterministic() {
        let rho = init_state(1, &Prep::UniformPlus).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let samples = rho.sample(100_000, &mut rng);
        let zero = samples.iter().find(|s| s.state == 0).unwrap().multiplicity;
        let freq = zero as f64 / 100_000.0;
        assert!((freq - 0.5).abs() < 0.01, "freq {freq}");

        let mut rng2 = ChaCha8Rng::seed_from_u64(42);
        assert_eq!(samples, rho.sample(100_000, &mut rng2));
    }

    #[test]
    fn multiplicities_sum_to_shots() {
        let rho = init_state(2, &Prep::UniformPlus).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let samples = rho.sample(123, &mut rng);
        let total: u64 = samples.iter().map(|s| s.multiplicity).sum();
        assert_eq!(total, 123);
    }

    #[test]
    fn expectation_single_coupling() {
        // C(s) = −s₁s₂ on |00⟩: both spins +1 → −1.
        let m = IsingModel::from_parts(2, vec![0.0, 0.0], vec![(0, 1, 1.0)], 0.0).unwrap();
        let rho = init_state(2, &Prep::AllZero).unwrap();
        assert!((rho.expectation_ising(&m).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn expectation_maximally_mixed_is_offset() {
        let m = IsingModel::from_parts(2, vec![0.0, 0.0], vec![(0, 1, 1.0)], 0.75).unwrap();
        let rho = DensityMatrix::maximally_mixed(2).unwrap();
        assert!((rho.expectation_ising(&m).unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn expectation_dimension_mismatch() {
        let m = IsingModel::from_parts(3, vec![0.0; 3], vec![], 0.0).unwrap();
        let rho = init_state(2, &Prep::AllZero).unwrap();
        assert!(rho.expectation_ising(&m).is_err());
    }

    #[test]
    fn invariants_hold_after_operations() {
        let rho = init_state(2, &Prep::UniformPlus)
            .unwrap()
            .apply_unitary(&pauli_x(), &[0])
            .unwrap()
            .apply_unitary(&pauli_z(), &[1])
            .unwrap();
        assert!((rho.trace().re - 1.0).abs() < 1e-12);
        assert!(rho.hermiticity_error() < 1e-12);
        assert!(rho.min_eigenvalue() > -1e-12);
    }
}
