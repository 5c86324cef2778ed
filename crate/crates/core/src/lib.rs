// SPDX-License-Identifier: Apache-2.0

//! Reversible sequential circuits: T flip-flops and n-bit counters built from
//! Feynman, Peres and Toffoli gates.
//!
//! The crate is organised bottom-up:
//!
//! * [`gatelib`] defines the built-in reversible gates and their quantum-primitive
//!   decompositions.
//! * [`netlist`] is the combinational cascade model; [`format`] reads and writes it.
//! * [`metrics`] measures gate count, quantum cost, delay and garbage.
//! * [`sequential`] adds feedback state and clocking and simulates clock pulses.
//! * [`generators`] builds the flip-flops and counters and predicts their cost.
//! * [`verify`] holds the exhaustive checkers, and [`report`] renders comparison tables.

pub mod format;
pub mod gatelib;
pub mod generators;
pub mod metrics;
pub mod netlist;
pub mod report;
pub mod sequential;
pub mod verify;

pub use format::{parse, serialize, Design};
pub use gatelib::{builtin_gates, GateDef, GateKind, PrimitiveKind, QuantumPrimitive};
pub use generators::{CounterMode, CounterSpec, PredictedCost};
pub use metrics::CostReport;
pub use netlist::{GateInstance, InputRole, Netlist, OutputRole, Violation};
pub use sequential::{ClockSource, CounterState, SequentialCircuit, StageBinding, Trigger};
pub use verify::VerificationReport;

use thiserror::Error;

/// Errors raised by circuit construction, evaluation and simulation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("gate {gate} takes {expected} lines, got {got}")]
    Arity {
        gate: GateKind,
        expected: usize,
        got: usize,
    },
    #[error("unknown gate `{0}`")]
    UnknownGate(String),
    #[error("line index {index} out of range for {lines} lines")]
    LineOutOfRange { index: usize, lines: usize },
    #[error("expected {expected} input bits, got {got}")]
    InputWidth { expected: usize, got: usize },
    #[error("line {line} is constant {expected} but the input drives {got}")]
    ConstantViolation {
        line: usize,
        expected: bool,
        got: bool,
    },
    #[error("state has {got} bits, circuit has {expected} stages")]
    StateWidth { expected: usize, got: usize },
    #[error("invalid netlist: {0}")]
    InvalidNetlist(String),
    #[error("invalid sequential circuit: {0}")]
    InvalidSequential(String),
    #[error("counter width must be at least 1")]
    ZeroWidth,
    #[error("no input named `{0}`")]
    UnknownInput(String),
    #[error("{free} free inputs exceed the exhaustive bound of {bound}")]
    TooManyInputs { free: usize, bound: usize },
    #[error("{0}")]
    Signature(String),
    #[error("max bits must be at least {min}, got {got}")]
    MaxBits { min: usize, got: usize },
}
