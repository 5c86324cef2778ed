// SPDX-License-Identifier: Apache-2.0

//! Clocked stages over a combinational core, and pulse-level simulation.
//!
//! A [`SequentialCircuit`] is a flattened [`Netlist`] whose feedback outputs are
//! latched back into their destination input lines between evaluations, plus a
//! list of [`StageBinding`]s that say which gates belong to which flip-flop and
//! where each flip-flop takes its clock from.
//!
//! One clock pulse is simulated as a high phase followed by a low phase. In each
//! phase the cascade is evaluated once, in order. Before a stage's gates run,
//! the stage's clock line is driven:
//!
//! * a stage on the global clock sees the raw clock level;
//! * a stage clocked by the Q of an earlier stage sees a high level in the high
//!   phase only if that Q made the stage's trigger transition since the pulse
//!   began, and a low level otherwise.
//!
//! Each stage therefore fires at most once per pulse and ripples strictly from
//! the least significant stage upward. Circuits without a clock line are
//! evaluated once per pulse.

use std::fmt;
use std::ops::Range;

use serde::Serialize;

use crate::netlist::{InputRole, Netlist};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ClockSource {
    Global,
    /// Clocked by the Q output of the given earlier stage.
    Stage(usize),
}

impl fmt::Display for ClockSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClockSource::Global => f.write_str("global"),
            ClockSource::Stage(j) => write!(f, "q{j}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Trigger {
    Rise,
    Fall,
}

impl Trigger {
    fn matches(self, before: bool, after: bool) -> bool {
        match self {
            Trigger::Rise => !before && after,
            Trigger::Fall => before && !after,
        }
    }
}

impl fmt::Display for Trigger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Trigger::Rise => "rise",
            Trigger::Fall => "fall",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StageBinding {
    pub index: usize,
    /// Feedback source line holding this stage's Q.
    pub q_line: usize,
    pub clock: ClockSource,
    pub trigger: Trigger,
    /// Line this stage reads as its clock, if it has one.
    pub clock_line: Option<usize>,
    /// Gate instances owned by this stage.
    pub gates: Range<usize>,
    /// Further feedback sources that hold the same value as Q between pulses
    /// (the master latch of a master-slave flip-flop).
    pub aux: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SequentialCircuit {
    core: Netlist,
    clock_line: Option<usize>,
    stages: Vec<StageBinding>,
}

impl SequentialCircuit {
    pub fn new(
        core: Netlist,
        clock_line: Option<usize>,
        stages: Vec<StageBinding>,
    ) -> Result<Self, Error> {
        let bad = |msg: String| Err(Error::InvalidSequential(msg));
        if let Some(v) = core.validate().first() {
            return Err(Error::InvalidNetlist(v.to_string()));
        }
        if stages.is_empty() {
            return bad("no stages".into());
        }
        if let Some(c) = clock_line {
            if !matches!(core.input_role(c), Some(InputRole::Primary(_))) {
                return bad(format!("clock line {c} is not a primary input"));
            }
        }
        let feedbacks = core.feedbacks();
        let mut owned = vec![false; feedbacks.len()];
        let mut gate_cursor = 0;
        for (i, s) in stages.iter().enumerate() {
            if s.index != i {
                return bad(format!("stage {} listed in position {i}", s.index));
            }
            for &src in std::iter::once(&s.q_line).chain(&s.aux) {
                let Some(k) = feedbacks.iter().position(|f| f.0 == src) else {
                    return bad(format!("stage {i}: line {src} is not a feedback source"));
                };
                if owned[k] {
                    return bad(format!("stage {i}: feedback from line {src} already bound"));
                }
                owned[k] = true;
            }
            match s.clock {
                ClockSource::Global => {
                    if s.clock_line != clock_line {
                        return bad(format!(
                            "stage {i}: global stage must read the global clock"
                        ));
                    }
                }
                ClockSource::Stage(j) => {
                    if j >= i {
                        return bad(format!("stage {i}: clocked by later stage {j}"));
                    }
                    match s.clock_line {
                        None => return bad(format!("stage {i}: rippled stage needs a clock line")),
                        Some(l) if Some(l) == clock_line => {
                            return bad(format!(
                                "stage {i}: rippled clock on the global clock line"
                            ))
                        }
                        Some(l) if l >= core.line_count() => {
                            return bad(format!("stage {i}: clock line {l} out of range"))
                        }
                        Some(_) => {}
                    }
                }
            }
            if s.gates.start < gate_cursor || s.gates.end < s.gates.start {
                return bad(format!(
                    "stage {i}: gate range {:?} overlaps or is reversed",
                    s.gates
                ));
            }
            if s.gates.end > core.gates().len() {
                return bad(format!("stage {i}: gate range {:?} out of range", s.gates));
            }
            gate_cursor = s.gates.end;
        }
        if let Some(k) = owned.iter().position(|o| !o) {
            return bad(format!(
                "feedback from line {} belongs to no stage",
                feedbacks[k].0
            ));
        }
        for (src, dest, _) in &feedbacks {
            if Some(*dest) == clock_line {
                return bad(format!("feedback from line {src} drives the clock line"));
            }
        }
        Ok(SequentialCircuit {
            core,
            clock_line,
            stages,
        })
    }

    pub fn core(&self) -> &Netlist {
        &self.core
    }

    pub fn clock_line(&self) -> Option<usize> {
        self.clock_line
    }

    pub fn stages(&self) -> &[StageBinding] {
        &self.stages
    }

    pub fn width(&self) -> usize {
        self.stages.len()
    }

    /// Primary inputs that are neither the clock nor a state destination.
    pub fn data_inputs(&self) -> Vec<usize> {
        let dests: Vec<usize> = self.core.feedbacks().iter().map(|f| f.1).collect();
        (0..self.core.line_count())
            .filter(|&l| {
                matches!(self.core.input_role(l), Some(InputRole::Primary(_)))
                    && Some(l) != self.clock_line
                    && !dests.contains(&l)
            })
            .collect()
    }

    fn q_register(&self, stage: usize) -> usize {
        let q = self.stages[stage].q_line;
        self.core
            .feedbacks()
            .iter()
            .position(|f| f.0 == q)
            .expect("validated")
    }
}

/// The combinational core with feedback lines exposed as inputs and outputs.
pub fn flatten(circuit: &SequentialCircuit) -> Netlist {
    circuit.core.clone()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CounterState {
    bits: Vec<bool>,
    /// Every feedback register, in feedback-source order.
    registers: Vec<bool>,
    pub pulse_count: u64,
}

impl CounterState {
    /// Power-on state taken from the feedback initial values.
    pub fn initial(circuit: &SequentialCircuit) -> Self {
        let registers: Vec<bool> = circuit.core.feedbacks().iter().map(|f| f.2).collect();
        Self::from_registers(circuit, registers, 0)
    }

    /// State holding `bits` (LSB first); auxiliary registers mirror their stage.
    pub fn from_bits(circuit: &SequentialCircuit, bits: &[bool]) -> Result<Self, Error> {
        if bits.len() != circuit.width() {
            return Err(Error::StateWidth {
                expected: circuit.width(),
                got: bits.len(),
            });
        }
        let feedbacks = circuit.core.feedbacks();
        let mut registers = vec![false; feedbacks.len()];
        for (stage, &b) in circuit.stages.iter().zip(bits) {
            for src in std::iter::once(&stage.q_line).chain(&stage.aux) {
                let k = feedbacks
                    .iter()
                    .position(|f| f.0 == *src)
                    .expect("validated");
                registers[k] = b;
            }
        }
        Ok(Self::from_registers(circuit, registers, 0))
    }

    /// State whose bits encode `value` (bit i is stage i).
    pub fn from_value(circuit: &SequentialCircuit, value: u64) -> Result<Self, Error> {
        let bits: Vec<bool> = (0..circuit.width())
            .map(|i| (value >> i) & 1 == 1)
            .collect();
        Self::from_bits(circuit, &bits)
    }

    fn from_registers(circuit: &SequentialCircuit, registers: Vec<bool>, pulse_count: u64) -> Self {
        let bits = (0..circuit.width())
            .map(|i| registers[circuit.q_register(i)])
            .collect();
        CounterState {
            bits,
            registers,
            pulse_count,
        }
    }

    /// One bit per stage, least significant stage first.
    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// The bits read as an unsigned integer, stage 0 least significant.
    pub fn value(&self) -> u64 {
        self.bits
            .iter()
            .rev()
            .fold(0, |acc, &b| (acc << 1) | b as u64)
    }

    /// Binary string with the most significant stage on the left.
    pub fn to_msb_string(&self) -> String {
        self.bits
            .iter()
            .rev()
            .map(|&b| if b { '1' } else { '0' })
            .collect()
    }
}

/// Which stages fired in the high phase of one pulse.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PulseTrace {
    pub pulse: u64,
    pub fired: Vec<bool>,
}

/// Applies one clock pulse with every data input held high.
pub fn pulse(circuit: &SequentialCircuit, state: &CounterState) -> Result<CounterState, Error> {
    pulse_with(circuit, state, &[]).map(|(s, _)| s)
}

/// Applies one clock pulse. Data inputs named in `inputs` take the given
/// value; the rest are held high.
pub fn pulse_with(
    circuit: &SequentialCircuit,
    state: &CounterState,
    inputs: &[(&str, bool)],
) -> Result<(CounterState, PulseTrace), Error> {
    let core = &circuit.core;
    let feedbacks = core.feedbacks();
    if state.registers.len() != feedbacks.len() || state.bits.len() != circuit.width() {
        return Err(Error::StateWidth {
            expected: circuit.width(),
            got: state.bits.len(),
        });
    }
    let data = circuit.data_inputs();
    let mut data_values = vec![true; data.len()];
    for (name, value) in inputs {
        let k = data
            .iter()
            .position(|&l| core.input_name(l) == Some(name))
            .ok_or_else(|| Error::UnknownInput(name.to_string()))?;
        data_values[k] = *value;
    }

    let start_q = state.bits.clone();
    let mut registers = state.registers.clone();
    let mut fired = vec![false; circuit.width()];
    let phases: &[bool] = if circuit.clock_line.is_some() {
        &[true, false]
    } else {
        &[true]
    };
    for &level in phases {
        let mut v = core.constant_frame();
        for (&l, &b) in data.iter().zip(&data_values) {
            v[l] = b;
        }
        for (&(_, dest, _), &r) in feedbacks.iter().zip(&registers) {
            v[dest] = r;
        }
        if let Some(c) = circuit.clock_line {
            v[c] = level;
        }
        let mut cursor = 0;
        for stage in &circuit.stages {
            core.apply_range(&mut v, cursor..stage.gates.start);
            let drive = match stage.clock {
                ClockSource::Global => level,
                ClockSource::Stage(j) => {
                    level
                        && stage
                            .trigger
                            .matches(start_q[j], v[circuit.stages[j].q_line])
                }
            };
            if let Some(l) = stage.clock_line {
                v[l] = drive;
            }
            if level && drive {
                fired[stage.index] = true;
            }
            core.apply_range(&mut v, stage.gates.clone());
            cursor = stage.gates.end;
        }
        core.apply_range(&mut v, cursor..core.gates().len());
        registers = feedbacks.iter().map(|&(src, _, _)| v[src]).collect();
    }
    let next = CounterState::from_registers(circuit, registers, state.pulse_count + 1);
    let trace = PulseTrace {
        pulse: next.pulse_count,
        fired,
    };
    Ok((next, trace))
}

/// Runs `pulses` pulses from the initial state; returns `pulses + 1` states.
pub fn run(circuit: &SequentialCircuit, pulses: u64) -> Vec<CounterState> {
    run_traced(circuit, pulses).0
}

pub fn run_traced(
    circuit: &SequentialCircuit,
    pulses: u64,
) -> (Vec<CounterState>, Vec<PulseTrace>) {
    let mut states = vec![CounterState::initial(circuit)];
    let mut traces = Vec::new();
    for _ in 0..pulses {
        let (next, trace) =
            pulse_with(circuit, states.last().unwrap(), &[]).expect("state built for this circuit");
        states.push(next);
        traces.push(trace);
    }
    (states, traces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gatelib::GateKind;
    use crate::netlist::OutputRole;

    /// Clocked T flip-flop: PG(CLK, T, Q) with Q fed back.
    fn clocked() -> SequentialCircuit {
        let mut n = Netlist::new(0);
        let clk = n.add_line(InputRole::Primary("CLK".into()));
        let t = n.add_line(InputRole::Primary("T".into()));
        let q = n.add_line(InputRole::Primary("Q".into()));
        n.push_gate(GateKind::Pg, &[clk, t, q]).unwrap();
        n.set_output(clk, OutputRole::Primary("CLK".into()))
            .unwrap();
        n.set_output(t, OutputRole::Garbage).unwrap();
        n.set_output(
            q,
            OutputRole::Feedback {
                dest: q,
                init: false,
            },
        )
        .unwrap();
        let stage = StageBinding {
            index: 0,
            q_line: q,
            clock: ClockSource::Global,
            trigger: Trigger::Rise,
            clock_line: Some(clk),
            gates: 0..1,
            aux: vec![],
        };
        SequentialCircuit::new(n, Some(clk), vec![stage]).unwrap()
    }

    #[test]
    fn zero_pulses_is_identity() {
        let c = clocked();
        assert_eq!(run(&c, 0), vec![CounterState::initial(&c)]);
    }

    #[test]
    fn toggle_and_hold() {
        let c = clocked();
        let s0 = CounterState::initial(&c);
        let (s1, trace) = pulse_with(&c, &s0, &[("T", true)]).unwrap();
        assert_eq!(s1.bits(), [true]);
        assert_eq!(trace.fired, vec![true]);
        let (s2, _) = pulse_with(&c, &s1, &[("T", false)]).unwrap();
        assert_eq!(s2.bits(), [true]);
        assert_eq!(s2.pulse_count, 2);
    }

    #[test]
    fn unknown_input_and_width() {
        let c = clocked();
        let s = CounterState::initial(&c);
        assert_eq!(
            pulse_with(&c, &s, &[("X", true)]).unwrap_err(),
            Error::UnknownInput("X".into())
        );
        assert!(matches!(
            CounterState::from_bits(&c, &[true, false]),
            Err(Error::StateWidth {
                expected: 1,
                got: 2
            })
        ));
    }

    #[test]
    fn rejects_bad_bindings() {
        let c = clocked();
        let mut stage = c.stages()[0].clone();
        stage.clock = ClockSource::Stage(0);
        assert!(SequentialCircuit::new(c.core().clone(), c.clock_line(), vec![stage]).is_err());

        let mut stage = c.stages()[0].clone();
        stage.q_line = 0;
        assert!(SequentialCircuit::new(c.core().clone(), c.clock_line(), vec![stage]).is_err());

        let mut stage = c.stages()[0].clone();
        stage.gates = 0..2;
        assert!(SequentialCircuit::new(c.core().clone(), c.clock_line(), vec![stage]).is_err());
    }

    #[test]
    fn state_string_is_msb_left() {
        let c = clocked();
        let s = CounterState::from_value(&c, 1).unwrap();
        assert_eq!(s.to_msb_string(), "1");
        assert_eq!(s.value(), 1);
    }
}
