// SPDX-License-Identifier: Apache-2.0

//! Combinational reversible cascades.
//!
//! A [`Netlist`] is an ordered list of gate instances over `L` lines. Each line
//! carries one input role (a named primary input or a constant) and one output
//! role (a named output, garbage, a value consumed by another structure, or a
//! feedback source that becomes state for the next clock pulse).

use std::fmt;

use serde::Serialize;

use crate::gatelib::GateKind;
use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum InputRole {
    Primary(String),
    Constant(bool),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum OutputRole {
    Primary(String),
    Garbage,
    /// The final value feeds another structure; not garbage.
    Consumed,
    /// The final value is latched into input line `dest` for the next pulse.
    Feedback {
        dest: usize,
        init: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GateInstance {
    pub gate: GateKind,
    pub lines: Vec<usize>,
}

impl GateInstance {
    pub fn new(gate: GateKind, lines: &[usize]) -> Self {
        GateInstance {
            gate,
            lines: lines.to_vec(),
        }
    }

    pub fn touches(&self, line: usize) -> bool {
        self.lines.contains(&line)
    }
}

impl fmt::Display for GateInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.gate)?;
        for l in &self.lines {
            write!(f, " {l}")?;
        }
        Ok(())
    }
}

/// A structural problem found by [`Netlist::validate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Violation {
    MissingInputRole {
        line: usize,
    },
    MissingOutputRole {
        line: usize,
    },
    DuplicateLine {
        gate: usize,
        line: usize,
    },
    LineOutOfRange {
        gate: usize,
        line: usize,
    },
    ArityMismatch {
        gate: usize,
        expected: usize,
        got: usize,
    },
    FeedbackOutOfRange {
        source: usize,
        dest: usize,
    },
    FeedbackIntoConstant {
        source: usize,
        dest: usize,
    },
    DuplicateFeedback {
        dest: usize,
    },
    EmptyLineSet,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingInputRole { line } => write!(f, "line {line} has no input role"),
            Violation::MissingOutputRole { line } => write!(f, "line {line} has no output role"),
            Violation::DuplicateLine { gate, line } => {
                write!(f, "gate #{gate} uses line {line} more than once")
            }
            Violation::LineOutOfRange { gate, line } => {
                write!(
                    f,
                    "gate #{gate} references line {line}, which does not exist"
                )
            }
            Violation::ArityMismatch {
                gate,
                expected,
                got,
            } => {
                write!(f, "gate #{gate} needs {expected} lines, has {got}")
            }
            Violation::FeedbackOutOfRange { source, dest } => {
                write!(f, "feedback from line {source} targets missing line {dest}")
            }
            Violation::FeedbackIntoConstant { source, dest } => {
                write!(
                    f,
                    "feedback from line {source} targets constant line {dest}"
                )
            }
            Violation::DuplicateFeedback { dest } => {
                write!(f, "line {dest} receives more than one feedback")
            }
            Violation::EmptyLineSet => write!(f, "netlist has no lines"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Netlist {
    inputs: Vec<Option<InputRole>>,
    outputs: Vec<Option<OutputRole>>,
    gates: Vec<GateInstance>,
}

impl Netlist {
    /// A netlist of `lines` lines with no roles and no gates.
    pub fn new(lines: usize) -> Self {
        Netlist {
            inputs: vec![None; lines],
            outputs: vec![None; lines],
            gates: Vec::new(),
        }
    }

    pub fn line_count(&self) -> usize {
        self.inputs.len()
    }

    pub fn gates(&self) -> &[GateInstance] {
        &self.gates
    }

    pub fn input_role(&self, line: usize) -> Option<&InputRole> {
        self.inputs.get(line).and_then(Option::as_ref)
    }

    pub fn output_role(&self, line: usize) -> Option<&OutputRole> {
        self.outputs.get(line).and_then(Option::as_ref)
    }

    /// Appends a line with the given input role and returns its index.
    pub fn add_line(&mut self, role: InputRole) -> usize {
        self.inputs.push(Some(role));
        self.outputs.push(None);
        self.inputs.len() - 1
    }

    pub fn set_input(&mut self, line: usize, role: InputRole) -> Result<(), Error> {
        self.check_line(line)?;
        self.inputs[line] = Some(role);
        Ok(())
    }

    pub fn set_output(&mut self, line: usize, role: OutputRole) -> Result<(), Error> {
        self.check_line(line)?;
        self.outputs[line] = Some(role);
        Ok(())
    }

    /// Appends a gate. Line indices must exist and match the gate's arity;
    /// repeated lines are accepted here and reported by [`Netlist::validate`].
    pub fn push_gate(&mut self, gate: GateKind, lines: &[usize]) -> Result<usize, Error> {
        if lines.len() != gate.arity() {
            return Err(Error::Arity {
                gate,
                expected: gate.arity(),
                got: lines.len(),
            });
        }
        for &l in lines {
            self.check_line(l)?;
        }
        self.gates.push(GateInstance::new(gate, lines));
        Ok(self.gates.len() - 1)
    }

    fn check_line(&self, line: usize) -> Result<(), Error> {
        if line < self.line_count() {
            Ok(())
        } else {
            Err(Error::LineOutOfRange {
                index: line,
                lines: self.line_count(),
            })
        }
    }

    /// Lines whose input is not a constant, in index order.
    pub fn free_lines(&self) -> Vec<usize> {
        (0..self.line_count())
            .filter(|&l| !matches!(self.inputs[l], Some(InputRole::Constant(_))))
            .collect()
    }

    /// Looks up a primary input by name.
    pub fn input_line(&self, name: &str) -> Option<usize> {
        self.inputs
            .iter()
            .position(|r| matches!(r, Some(InputRole::Primary(n)) if n == name))
    }

    pub fn input_name(&self, line: usize) -> Option<&str> {
        match self.input_role(line) {
            Some(InputRole::Primary(n)) => Some(n),
            _ => None,
        }
    }

    /// `(source, dest, init)` for every feedback output, in source order.
    pub fn feedbacks(&self) -> Vec<(usize, usize, bool)> {
        self.outputs
            .iter()
            .enumerate()
            .filter_map(|(src, r)| match r {
                Some(OutputRole::Feedback { dest, init }) => Some((src, *dest, *init)),
                _ => None,
            })
            .collect()
    }

    pub fn count_outputs(&self, pred: impl Fn(&OutputRole) -> bool) -> usize {
        self.outputs.iter().flatten().filter(|r| pred(r)).count()
    }

    pub fn constant_count(&self) -> usize {
        self.inputs
            .iter()
            .filter(|r| matches!(r, Some(InputRole::Constant(_))))
            .count()
    }

    /// Evaluates the cascade on a full line assignment.
    pub fn eval(&self, input: &[bool]) -> Result<Vec<bool>, Error> {
        if input.len() != self.line_count() {
            return Err(Error::InputWidth {
                expected: self.line_count(),
                got: input.len(),
            });
        }
        for (line, role) in self.inputs.iter().enumerate() {
            if let Some(InputRole::Constant(c)) = role {
                if input[line] != *c {
                    return Err(Error::ConstantViolation {
                        line,
                        expected: *c,
                        got: input[line],
                    });
                }
            }
        }
        let mut values = input.to_vec();
        self.apply_range(&mut values, 0..self.gates.len());
        Ok(values)
    }

    /// Evaluates with constants filled in; `free` follows [`Netlist::free_lines`] order.
    pub fn eval_free(&self, free: &[bool]) -> Result<Vec<bool>, Error> {
        let lines = self.free_lines();
        if free.len() != lines.len() {
            return Err(Error::InputWidth {
                expected: lines.len(),
                got: free.len(),
            });
        }
        let mut values = self.constant_frame();
        for (&l, &b) in lines.iter().zip(free) {
            values[l] = b;
        }
        self.apply_range(&mut values, 0..self.gates.len());
        Ok(values)
    }

    /// All-zero line vector with constants set.
    pub fn constant_frame(&self) -> Vec<bool> {
        self.inputs
            .iter()
            .map(|r| matches!(r, Some(InputRole::Constant(true))))
            .collect()
    }

    /// Applies gates in `range` to `values` in place.
    ///
    /// Each gate gathers its operand lines, applies its permutation and writes
    /// the results back in operand order. A gate with repeated lines therefore
    /// keeps only the last write to that line, which is how such a fan-out
    /// attempt loses information.
    pub fn apply_range(&self, values: &mut [bool], range: std::ops::Range<usize>) {
        let mut operand = [false; 3];
        for inst in &self.gates[range] {
            let def = inst.gate.def();
            for (k, &l) in inst.lines.iter().enumerate() {
                operand[k] = values[l];
            }
            let pattern = crate::gatelib::pack(&operand[..def.arity]);
            let out = def.permutation[pattern];
            for (k, &l) in inst.lines.iter().enumerate() {
                values[l] = (out >> (def.arity - 1 - k)) & 1 == 1;
            }
        }
    }

    /// Applies every gate to 64 assignments at once: bit `k` of `values[l]` is
    /// line `l` in assignment `k`. Matches [`Netlist::apply_range`] lane by lane.
    pub fn apply_sliced(&self, values: &mut [u64]) {
        let mut operand = [0u64; 3];
        for inst in &self.gates {
            let def = inst.gate.def();
            let arity = def.arity;
            for (k, &l) in inst.lines.iter().enumerate() {
                operand[k] = values[l];
            }
            let mut out = [0u64; 3];
            for (pattern, &image) in def.permutation.iter().enumerate() {
                let mut minterm = !0u64;
                for (k, x) in operand[..arity].iter().enumerate() {
                    let set = (pattern >> (arity - 1 - k)) & 1 == 1;
                    minterm &= if set { *x } else { !*x };
                }
                for (k, o) in out[..arity].iter_mut().enumerate() {
                    if (image >> (arity - 1 - k)) & 1 == 1 {
                        *o |= minterm;
                    }
                }
            }
            for (k, &l) in inst.lines.iter().enumerate() {
                values[l] = out[k];
            }
        }
    }

    /// Checks every structural invariant; an empty list means the netlist is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        let n = self.line_count();
        if n == 0 {
            v.push(Violation::EmptyLineSet);
        }
        for line in 0..n {
            if self.inputs[line].is_none() {
                v.push(Violation::MissingInputRole { line });
            }
            if self.outputs[line].is_none() {
                v.push(Violation::MissingOutputRole { line });
            }
        }
        for (g, inst) in self.gates.iter().enumerate() {
            if inst.lines.len() != inst.gate.arity() {
                v.push(Violation::ArityMismatch {
                    gate: g,
                    expected: inst.gate.arity(),
                    got: inst.lines.len(),
                });
            }
            for (k, &l) in inst.lines.iter().enumerate() {
                if l >= n {
                    v.push(Violation::LineOutOfRange { gate: g, line: l });
                } else if inst.lines[..k].contains(&l) {
                    v.push(Violation::DuplicateLine { gate: g, line: l });
                }
            }
        }
        let mut dests = Vec::new();
        for (source, dest, _) in self.feedbacks() {
            if dest >= n {
                v.push(Violation::FeedbackOutOfRange { source, dest });
                continue;
            }
            if matches!(self.inputs[dest], Some(InputRole::Constant(_))) {
                v.push(Violation::FeedbackIntoConstant { source, dest });
            }
            if dests.contains(&dest) {
                v.push(Violation::DuplicateFeedback { dest });
            }
            dests.push(dest);
        }
        v
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Places `other` on fresh lines after this netlist's lines; gates are appended.
    pub fn place_beside(&mut self, other: &Netlist) {
        let offset = self.line_count();
        self.inputs.extend(other.inputs.iter().cloned());
        self.outputs.extend(other.outputs.iter().map(|r| match r {
            Some(OutputRole::Feedback { dest, init }) => Some(OutputRole::Feedback {
                dest: dest + offset,
                init: *init,
            }),
            r => r.clone(),
        }));
        self.gates.extend(other.gates.iter().map(|g| GateInstance {
            gate: g.gate,
            lines: g.lines.iter().map(|l| l + offset).collect(),
        }));
    }
}
