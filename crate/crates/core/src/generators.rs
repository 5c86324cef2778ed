// SPDX-License-Identifier: Apache-2.0

//! Constructors for the reversible T flip-flops and counters, and the
//! closed-form cost of the counters.
//!
//! Stage cores are a Peres gate `PG(CLK, T, Q)`, which leaves `Q ^ T·CLK` on
//! the Q line and `CLK ^ T` as the stage's single garbage output, followed by
//! a Feynman-family gate that copies the new Q onto constant ancillas.
//!
//! * Variant (a) copies onto a constant-1 ancilla, so the copy is `!Q`.
//!   Synchronous counters chain these complements into their toggle inputs.
//! * Variant (b) copies onto constant-0 ancillas. Inside a ripple counter all
//!   but the last stage widen the copy to a double Feynman gate so the second
//!   copy can clock the next stage.
//!
//! Every generated cascade is a chain (consecutive gates share a line), so
//! its delay equals its quantum cost.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::gatelib::GateKind;
use crate::netlist::{InputRole, Netlist, OutputRole};
use crate::sequential::{ClockSource, SequentialCircuit, StageBinding, Trigger};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum CounterMode {
    Async,
    Sync,
}

impl fmt::Display for CounterMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CounterMode::Async => "async",
            CounterMode::Sync => "sync",
        })
    }
}

impl FromStr for CounterMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "async" => Ok(CounterMode::Async),
            "sync" => Ok(CounterMode::Sync),
            other => Err(format!(
                "unknown counter mode `{other}` (expected async or sync)"
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CounterSpec {
    pub bits: usize,
    pub mode: CounterMode,
}

impl CounterSpec {
    pub fn new(bits: usize, mode: CounterMode) -> Result<Self, Error> {
        if bits == 0 {
            return Err(Error::ZeroWidth);
        }
        Ok(CounterSpec { bits, mode })
    }
}

/// Closed-form gate count, garbage and quantum cost of a counter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PredictedCost {
    pub gates: u64,
    pub garbage: u64,
    pub quantum: u64,
    /// False outside the range the formulas are stated for (sync below 3 bits).
    pub applicable: bool,
}

/// Async: `g = 2n`, `b = n`, `Q = 6n - 1`. Sync (n >= 3): `g = 4n - 4`, `b = n`, `Q = 11n - 12`.
pub fn predict_cost(spec: CounterSpec) -> PredictedCost {
    let n = spec.bits as u64;
    match spec.mode {
        CounterMode::Async => PredictedCost {
            gates: 2 * n,
            garbage: n,
            quantum: (6 * n).saturating_sub(1),
            applicable: n >= 1,
        },
        CounterMode::Sync if n >= 3 => PredictedCost {
            gates: 4 * n - 4,
            garbage: n,
            quantum: 11 * n - 12,
            applicable: true,
        },
        CounterMode::Sync => PredictedCost {
            gates: 0,
            garbage: 0,
            quantum: 0,
            applicable: false,
        },
    }
}

/// The two clocked T flip-flop layouts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ClockedVariant {
    /// Complemented copy of Q; used by the synchronous counter.
    A,
    /// Plain copy of Q; used by the ripple counter.
    B,
}

impl ClockedVariant {
    fn ancilla(self) -> bool {
        matches!(self, ClockedVariant::A)
    }
}

fn primary(name: &str) -> InputRole {
    InputRole::Primary(name.to_string())
}

fn out(name: impl Into<String>) -> OutputRole {
    OutputRole::Primary(name.into())
}

fn feedback(line: usize) -> OutputRole {
    OutputRole::Feedback {
        dest: line,
        init: false,
    }
}

// The builders only use indices they just allocated.
fn gate(n: &mut Netlist, kind: GateKind, lines: &[usize]) {
    n.push_gate(kind, lines)
        .expect("generator uses allocated lines");
}

fn role(n: &mut Netlist, line: usize, role: OutputRole) {
    n.set_output(line, role)
        .expect("generator uses allocated lines");
}

fn finish(n: Netlist, clock: Option<usize>, stages: Vec<StageBinding>) -> SequentialCircuit {
    SequentialCircuit::new(n, clock, stages).expect("generated circuits are well formed")
}

/// T flip-flop as one Feynman gate on `(T, Q)`: `Q' = T ^ Q`.
pub fn build_t_ff() -> SequentialCircuit {
    let mut n = Netlist::new(0);
    let t = n.add_line(primary("T"));
    let q = n.add_line(primary("Q"));
    gate(&mut n, GateKind::Fg, &[t, q]);
    role(&mut n, t, out("T"));
    role(&mut n, q, feedback(q));
    let stage = StageBinding {
        index: 0,
        q_line: q,
        clock: ClockSource::Global,
        trigger: Trigger::Rise,
        clock_line: None,
        gates: 0..1,
        aux: vec![],
    };
    finish(n, None, vec![stage])
}

/// Clocked T flip-flop: `PG(CLK, T, Q)` then a Feynman copy of the new Q.
pub fn build_clocked_t_ff(variant: ClockedVariant) -> SequentialCircuit {
    let mut n = Netlist::new(0);
    let clk = n.add_line(primary("CLK"));
    let t = n.add_line(primary("T"));
    let q = n.add_line(primary("Q"));
    let copy = n.add_line(InputRole::Constant(variant.ancilla()));
    gate(&mut n, GateKind::Pg, &[clk, t, q]);
    gate(&mut n, GateKind::Fg, &[q, copy]);
    role(&mut n, clk, out("CLK"));
    role(&mut n, t, OutputRole::Garbage);
    role(&mut n, q, feedback(q));
    role(
        &mut n,
        copy,
        out(if variant == ClockedVariant::A {
            "QN"
        } else {
            "Q"
        }),
    );
    let stage = StageBinding {
        index: 0,
        q_line: q,
        clock: ClockSource::Global,
        trigger: Trigger::Rise,
        clock_line: Some(clk),
        gates: 0..2,
        aux: vec![],
    };
    finish(n, Some(clk), vec![stage])
}

/// Master-slave T flip-flop.
///
/// The master is `MPG(CLK, T, QM)`: it toggles while the clock is high and
/// leaves `!CLK` on the clock line. Two Feynman gates form `QM ^ QS` on a
/// constant-0 ancilla, and the slave `PG(!CLK, QM ^ QS, QS)` copies the master
/// into QS while the clock is low. Q changes once per full clock pulse.
pub fn build_ms_t_ff() -> SequentialCircuit {
    let mut n = Netlist::new(0);
    let clk = n.add_line(primary("CLK"));
    let t = n.add_line(primary("T"));
    let qm = n.add_line(primary("QM"));
    let qs = n.add_line(primary("Q"));
    let diff = n.add_line(InputRole::Constant(false));
    gate(&mut n, GateKind::Mpg, &[clk, t, qm]);
    gate(&mut n, GateKind::Fg, &[qm, diff]);
    gate(&mut n, GateKind::Fg, &[qs, diff]);
    gate(&mut n, GateKind::Pg, &[clk, diff, qs]);
    role(&mut n, clk, OutputRole::Consumed);
    role(&mut n, t, OutputRole::Garbage);
    role(&mut n, qm, feedback(qm));
    role(&mut n, qs, feedback(qs));
    role(&mut n, diff, OutputRole::Garbage);
    let stage = StageBinding {
        index: 0,
        q_line: qs,
        clock: ClockSource::Global,
        trigger: Trigger::Fall,
        clock_line: Some(clk),
        gates: 0..4,
        aux: vec![qm],
    };
    finish(n, Some(clk), vec![stage])
}

pub fn build_counter(spec: CounterSpec) -> Result<SequentialCircuit, Error> {
    if spec.bits == 0 {
        return Err(Error::ZeroWidth);
    }
    Ok(match spec.mode {
        CounterMode::Async => build_async(spec.bits),
        CounterMode::Sync => build_sync(spec.bits),
    })
}

/// Ripple counter. Stage i is `PG(clk_i, 1, Q_i)` followed by a copy of the new
/// Q_i; every stage but the last also copies Q_i onto `clk_{i+1}`, and stage
/// i+1 fires on the falling edge of Q_i.
fn build_async(bits: usize) -> SequentialCircuit {
    let mut n = Netlist::new(0);
    let mut stages = Vec::with_capacity(bits);
    let global = n.add_line(primary("CLK"));
    let mut clk = global;
    for i in 0..bits {
        let t = n.add_line(InputRole::Constant(true));
        let q = n.add_line(primary(&format!("Q{i}")));
        let copy = n.add_line(InputRole::Constant(false));
        let next = (i + 1 < bits).then(|| n.add_line(InputRole::Constant(false)));
        let start = n.gates().len();
        gate(&mut n, GateKind::Pg, &[clk, t, q]);
        match next {
            Some(k) => gate(&mut n, GateKind::Dfg, &[q, copy, k]),
            None => gate(&mut n, GateKind::Fg, &[q, copy]),
        }
        role(
            &mut n,
            clk,
            if i == 0 {
                out("CLK")
            } else {
                OutputRole::Consumed
            },
        );
        role(&mut n, t, OutputRole::Garbage);
        role(&mut n, q, feedback(q));
        role(&mut n, copy, out(format!("Q{i}")));
        stages.push(StageBinding {
            index: i,
            q_line: q,
            clock: if i == 0 {
                ClockSource::Global
            } else {
                ClockSource::Stage(i - 1)
            },
            trigger: if i == 0 { Trigger::Rise } else { Trigger::Fall },
            clock_line: Some(clk),
            gates: start..n.gates().len(),
            aux: vec![],
        });
        if let Some(k) = next {
            clk = k;
        }
    }
    finish(n, Some(global), stages)
}

/// Synchronous counter on one shared clock.
///
/// Each stage leaves `!Q_i` (post-pulse) on a constant-1 ancilla. The toggle
/// input of stage i is the AND of `!Q_j` for all j < i, which for an up-counter
/// equals the AND of the pre-pulse `Q_j`: the low bits have all wrapped to zero
/// exactly when they were all one. `T_1` is `!Q_0` directly; higher toggles
/// accumulate through Toffoli gates, and each toggle line is copied once
/// before its Peres gate turns it into garbage.
fn build_sync(bits: usize) -> SequentialCircuit {
    let mut n = Netlist::new(0);
    let mut stages = Vec::with_capacity(bits);
    let clk = n.add_line(primary("CLK"));
    role(&mut n, clk, out("CLK"));
    let mut toggle = n.add_line(InputRole::Constant(true));
    for i in 0..bits {
        let start = n.gates().len();
        let carry_copy = (i >= 1 && i + 2 <= bits).then(|| {
            let c = n.add_line(InputRole::Constant(false));
            gate(&mut n, GateKind::Fg, &[toggle, c]);
            role(&mut n, c, OutputRole::Consumed);
            c
        });
        let q = n.add_line(primary(&format!("Q{i}")));
        let nq = n.add_line(InputRole::Constant(true));
        gate(&mut n, GateKind::Pg, &[clk, toggle, q]);
        gate(&mut n, GateKind::Fg, &[q, nq]);
        role(&mut n, toggle, OutputRole::Garbage);
        role(&mut n, q, feedback(q));
        let last = i + 1 == bits;
        if last {
            role(&mut n, nq, out(format!("QN{i}")));
        }
        // Stage 0's complement feeds stage 1 directly; later complements feed a Toffoli.
        let next_toggle = if last {
            None
        } else if let Some(c) = carry_copy {
            let t = n.add_line(InputRole::Constant(false));
            gate(&mut n, GateKind::Tg, &[c, nq, t]);
            role(&mut n, nq, OutputRole::Consumed);
            Some(t)
        } else {
            Some(nq)
        };
        stages.push(StageBinding {
            index: i,
            q_line: q,
            clock: ClockSource::Global,
            trigger: Trigger::Rise,
            clock_line: Some(clk),
            gates: start..n.gates().len(),
            aux: vec![],
        });
        if let Some(t) = next_toggle {
            toggle = t;
        }
    }
    finish(n, Some(clk), stages)
}

/// True when `range` holds a stage core of `variant`: `PG(_, _, q)` directly
/// followed by a copy of `q` onto ancillas of the variant's polarity. Variant
/// (b) may use a double Feynman gate for the copy.
pub fn contains_clocked_core(
    netlist: &Netlist,
    range: std::ops::Range<usize>,
    variant: ClockedVariant,
) -> bool {
    let gates = &netlist.gates()[range];
    let is_ancilla =
        |l: usize| netlist.input_role(l) == Some(&InputRole::Constant(variant.ancilla()));
    gates.windows(2).any(|w| {
        let (pg, copy) = (&w[0], &w[1]);
        let copy_ok = match copy.gate {
            GateKind::Fg => true,
            GateKind::Dfg => variant == ClockedVariant::B,
            _ => false,
        };
        pg.gate == GateKind::Pg
            && copy_ok
            && copy.lines[0] == pg.lines[2]
            && copy.lines[1..].iter().all(|&l| is_ancilla(l))
    })
}
