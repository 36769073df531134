//! ASAP scheduling of native circuits and insertion of noise channels.
//!
//! Every qubit gets a gap-free timeline from 0 to the circuit duration:
//! gates, plus explicit idle segments wherever a qubit waits. Noise
//! insertion attaches thermal relaxation to every timed segment (gate or
//! idle) and a depolarizing contribution after each SX/CX, with the
//! depolarizing probability solved so the composed per-gate channel matches
//! the calibrated average gate error.

use crate::densim::KrausChannel;
use crate::noise::{
    depolarizing_channel, match_depol_probability, thermal_avg_fidelity,
    thermal_pair_avg_fidelity, DepolMatch, NoiseParams,
};
use crate::{Error, Result};

use super::{Circuit, Gate};

/// A gate with its start time and duration in nanoseconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduledGate {
    pub gate: Gate,
    pub start_ns: f64,
    pub duration_ns: f64,
}

/// A waiting period of one qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdleSegment {
    pub qubit: usize,
    pub start_ns: f64,
    pub duration_ns: f64,
}

/// Native circuit with per-gate times and explicit idles.
#[derive(Debug, Clone)]
pub struct ScheduledCircuit {
    pub n: usize,
    pub gates: Vec<ScheduledGate>,
    pub idles: Vec<IdleSegment>,
    pub total_ns: f64,
}

impl ScheduledCircuit {
    /// Timeline debug dump as CSV rows `qubit,start_ns,duration_ns,label`,
    /// sorted by qubit then start time.
    pub fn timeline_csv(&self) -> String {
        let mut rows: Vec<(usize, f64, f64, String)> = Vec::new();
        for sg in &self.gates {
            for q in sg.gate.qubits() {
                rows.push((q, sg.start_ns, sg.duration_ns, sg.gate.name().to_string()));
            }
        }
        for idle in &self.idles {
            rows.push((idle.qubit, idle.start_ns, idle.duration_ns, "IDLE".into()));
        }
        rows.sort_by(|a, b| {
            a.0.cmp(&b.0)
                .then(a.1.partial_cmp(&b.1).unwrap())
                .then(a.2.partial_cmp(&b.2).unwrap())
        });
        let mut out = String::from("qubit,start_ns,duration_ns,label\n");
        for (q, s, d, l) in rows {
            out.push_str(&format!("{q},{s},{d},{l}\n"));
        }
        out
    }
}

fn gate_duration(g: &Gate, np: &NoiseParams) -> Result<f64> {
    match g {
        Gate::Rz { .. } => Ok(np.rz.duration_ns),
        Gate::Sx { .. } => Ok(np.sx.duration_ns),
        Gate::Cx { .. } => Ok(np.cx.duration_ns),
        other => Err(Error::Transpile(format!(
            "cannot schedule non-native gate {}",
            other.name()
        ))),
    }
}

/// As-soon-as-possible schedule of a native circuit.
pub fn schedule(circ: &Circuit, np: &NoiseParams) -> Result<ScheduledCircuit> {
    np.validate()?;
    let mut ready = vec![0.0f64; circ.n];
    let mut gates = Vec::with_capacity(circ.gates.len());
    for g in &circ.gates {
        let dur = gate_duration(g, np)?;
        let qs = g.qubits();
        let start = qs.iter().map(|&q| ready[q]).fold(0.0, f64::max);
        for &q in &qs {
            ready[q] = start + dur;
        }
        gates.push(ScheduledGate { gate: *g, start_ns: start, duration_ns: dur });
    }
    let total_ns = ready.iter().copied().fold(0.0, f64::max);

    // Idle segments: walk each qubit's (already time-ordered) gate list and
    // record every gap, including leading and trailing ones. Zero-length
    // gaps are skipped.
    let mut idles = Vec::new();
    let mut cursor = vec![0.0f64; circ.n];
    for sg in &gates {
        for q in sg.gate.qubits() {
            if sg.start_ns > cursor[q] {
                idles.push(IdleSegment {
                    qubit: q,
                    start_ns: cursor[q],
                    duration_ns: sg.start_ns - cursor[q],
                });
            }
            cursor[q] = sg.start_ns + sg.duration_ns;
        }
    }
    for q in 0..circ.n {
        if total_ns > cursor[q] {
            idles.push(IdleSegment {
                qubit: q,
                start_ns: cursor[q],
                duration_ns: total_ns - cursor[q],
            });
        }
    }
    idles.sort_by(|a, b| {
        a.start_ns
            .partial_cmp(&b.start_ns)
            .unwrap()
            .then(a.qubit.cmp(&b.qubit))
    });

    Ok(ScheduledCircuit { n: circ.n, gates, idles, total_ns })
}

/// One step of a noisy simulation: a unitary gate or a noise channel.
#[derive(Debug, Clone)]
pub enum SimStep {
    Gate(Gate),
    Channel {
        ch: KrausChannel,
        targets: Vec<usize>,
        kind: ChannelKind,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKind {
    Thermal,
    Depolarizing,
}

/// Scheduled circuit with its interleaved noise channels, ready to simulate.
#[derive(Debug, Clone)]
pub struct NoisyCircuit {
    pub scheduled: ScheduledCircuit,
    pub steps: Vec<SimStep>,
    /// Depolarizing probability solved for the SX gate (before scaling).
    pub sx_depol: DepolMatch,
    /// Depolarizing probability solved for the CX gate (before scaling).
    pub cx_depol: DepolMatch,
}

impl NoisyCircuit {
    pub fn count_channels(&self, kind: ChannelKind) -> usize {
        self.steps
            .iter()
            .filter(|s| matches!(s, SimStep::Channel { kind: k, .. } if *k == kind))
            .count()
    }
}

/// Attaches noise channels to a scheduled circuit.
///
/// Per gate: RZ is noiseless; SX gets thermal relaxation for its duration
/// followed by a depolarizing contribution; CX gets independent thermal
/// relaxation on both qubits followed by a two-qubit depolarizing
/// contribution. Idle segments get thermal relaxation only. Depolarizing
/// probabilities are solved against the *unscaled* thermal fidelity so the
/// composed channel reproduces the calibrated gate error at scales (1, 1),
/// then multiplied by `d_depol`; thermal durations are multiplied by
/// `d_thermal`.
pub fn insert_noise(sc: &ScheduledCircuit, np: &NoiseParams) -> Result<NoisyCircuit> {
    np.validate()?;
    let (t1, t2) = (np.t1_ns, np.t2_ns);

    let sx_depol = match_depol_probability(
        1.0 - np.sx.error,
        thermal_avg_fidelity(t1, t2, np.sx.duration_ns)?,
        1,
    )?;
    let cx_depol = match_depol_probability(
        1.0 - np.cx.error,
        thermal_pair_avg_fidelity(t1, t2, np.cx.duration_ns)?,
        2,
    )?;
    let p_sx = (sx_depol.p * np.d_depol).min(1.0);
    let p_cx = (cx_depol.p * np.d_depol).min(1.0);

    // Events ordered by start time; gates keep their circuit order among
    // equal starts (all same-start gates commute: disjoint supports), idles
    // follow the gates that end where they begin.
    enum Ev {
        G(usize),
        I(usize),
    }
    let mut events: Vec<(f64, u8, usize, Ev)> = Vec::new();
    for (i, sg) in sc.gates.iter().enumerate() {
        events.push((sg.start_ns, 0, i, Ev::G(i)));
    }
    for (i, idle) in sc.idles.iter().enumerate() {
        events.push((idle.start_ns, 1, i, Ev::I(i)));
    }
    events.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap()
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });

    let thermal = |dur_ns: f64| -> Result<Option<KrausChannel>> {
        let t = dur_ns * np.d_thermal;
        if t <= 0.0 {
            return Ok(None);
        }
        Ok(Some(crate::noise::thermal_channel(t1, t2, t)?))
    };

    let mut steps = Vec::new();
    for (_, _, _, ev) in events {
        match ev {
            Ev::G(i) => {
                let sg = &sc.gates[i];
                steps.push(SimStep::Gate(sg.gate));
                match sg.gate {
                    Gate::Rz { .. } => {}
                    Gate::Sx { q } => {
                        if let Some(ch) = thermal(sg.duration_ns)? {
                            steps.push(SimStep::Channel {
                                ch,
                                targets: vec![q],
                                kind: ChannelKind::Thermal,
                            });
                        }
                        if p_sx > 0.0 {
                            steps.push(SimStep::Channel {
                                ch: depolarizing_channel(1, p_sx)?,
                                targets: vec![q],
                                kind: ChannelKind::Depolarizing,
                            });
                        }
                    }
                    Gate::Cx { control, target } => {
                        for q in [control, target] {
                            if let Some(ch) = thermal(sg.duration_ns)? {
                                steps.push(SimStep::Channel {
                                    ch,
                                    targets: vec![q],
                                    kind: ChannelKind::Thermal,
                                });
                            }
                        }
                        if p_cx > 0.0 {
                            steps.push(SimStep::Channel {
                                ch: depolarizing_channel(2, p_cx)?,
                                targets: vec![control, target],
                                kind: ChannelKind::Depolarizing,
                            });
                        }
                    }
                    other => {
                        return Err(Error::Transpile(format!(
                            "non-native gate {} in schedule",
                            other.name()
                        )))
                    }
                }
            }
            Ev::I(i) => {
                let idle = &sc.idles[i];
                if let Some(ch) = thermal(idle.duration_ns)? {
                    steps.push(SimStep::Channel {
                        ch,
                        targets: vec![idle.qubit],
                        kind: ChannelKind::Thermal,
                    });
                }
            }
        }
    }

    Ok(NoisyCircuit {
        scheduled: sc.clone(),
        steps,
        sx_depol,
        cx_depol,
    })
}
