// SPDX-License-Identifier: Apache-2.0

//! Built-in reversible gates.
//!
//! Every gate is a bijection over `arity` bits together with a decomposition
//! into unit-cost quantum primitives. Bit patterns are indexed with the first
//! gate line as the most significant bit, so for a 3-line gate the pattern
//! `(a, b, c)` has index `4a + 2b + c`.

use std::fmt;
use std::str::FromStr;
use std::sync::LazyLock;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::Error;

/// Entrywise tolerance used when comparing unitaries.
pub const UNITARY_TOLERANCE: f64 = 1e-9;

/// Identifier of a built-in gate, as spelled in netlist files.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GateKind {
    /// 1x1 inverter.
    Not,
    /// Feynman gate, `(A, B) -> (A, A^B)`.
    Fg,
    /// Double Feynman gate, `(A, B, C) -> (A, A^B, A^C)`.
    Dfg,
    /// Peres gate, `(A, B, C) -> (A, A^B, AB^C)`.
    Pg,
    /// Modified Peres gate, `(A, B, C) -> (!A, A^B, AB^C)`.
    Mpg,
    /// Toffoli gate, `(A, B, C) -> (A, B, AB^C)`.
    Tg,
}

impl GateKind {
    pub const ALL: [GateKind; 6] = [
        GateKind::Not,
        GateKind::Fg,
        GateKind::Dfg,
        GateKind::Pg,
        GateKind::Mpg,
        GateKind::Tg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::Not => "NOT",
            GateKind::Fg => "FG",
            GateKind::Dfg => "DFG",
            GateKind::Pg => "PG",
            GateKind::Mpg => "MPG",
            GateKind::Tg => "TG",
        }
    }

    /// The full definition of this gate.
    pub fn def(self) -> &'static GateDef {
        &BUILTINS[self as usize]
    }

    pub fn arity(self) -> usize {
        self.def().arity
    }

    pub fn quantum_cost(self) -> u32 {
        self.def().quantum_cost
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GateKind::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| Error::UnknownGate(s.to_string()))
    }
}

/// Kinds of unit-cost quantum primitive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PrimitiveKind {
    Not,
    Cnot,
    /// Controlled square root of NOT.
    CtrlV,
    /// Controlled adjoint of V.
    CtrlVDag,
    /// CNOT that also inverts its control line: `(c, t) -> (!c, c^t)`.
    /// It is a single 2x2 reversible gate and therefore costs one unit.
    CnotInvert,
}

/// One step of a gate decomposition, addressed by gate-local line index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuantumPrimitive {
    pub kind: PrimitiveKind,
    pub target: usize,
    pub control: Option<usize>,
}

impl QuantumPrimitive {
    pub const fn not(target: usize) -> Self {
        Self {
            kind: PrimitiveKind::Not,
            target,
            control: None,
        }
    }

    pub const fn cnot(control: usize, target: usize) -> Self {
        Self {
            kind: PrimitiveKind::Cnot,
            target,
            control: Some(control),
        }
    }

    pub const fn cv(control: usize, target: usize) -> Self {
        Self {
            kind: PrimitiveKind::CtrlV,
            target,
            control: Some(control),
        }
    }

    pub const fn cv_dag(control: usize, target: usize) -> Self {
        Self {
            kind: PrimitiveKind::CtrlVDag,
            target,
            control: Some(control),
        }
    }

    pub const fn cnot_invert(control: usize, target: usize) -> Self {
        Self {
            kind: PrimitiveKind::CnotInvert,
            target,
            control: Some(control),
        }
    }

    /// NOT carries no control; every other kind has exactly one, distinct from the target.
    pub fn is_well_formed(&self, lines: usize) -> bool {
        if self.target >= lines {
            return false;
        }
        match (self.kind, self.control) {
            (PrimitiveKind::Not, None) => true,
            (PrimitiveKind::Not, Some(_)) => false,
            (_, Some(c)) => c < lines && c != self.target,
            (_, None) => false,
        }
    }

    /// Matrix of this primitive expanded to the full space of `lines` lines.
    pub fn unitary(&self, lines: usize) -> DMatrix<Complex64> {
        let dim = 1usize << lines;
        let bit = |state: usize, line: usize| (state >> (lines - 1 - line)) & 1;
        let flip = |state: usize, line: usize| state ^ (1 << (lines - 1 - line));
        let mut u = DMatrix::<Complex64>::zeros(dim, dim);
        for col in 0..dim {
            match (self.kind, self.control) {
                (PrimitiveKind::Not, _) => u[(flip(col, self.target), col)] = one(),
                (kind, Some(c)) => {
                    let ctrl = bit(col, c) == 1;
                    let base = if kind == PrimitiveKind::CnotInvert {
                        flip(col, c)
                    } else {
                        col
                    };
                    if !ctrl {
                        u[(base, col)] = one();
                        continue;
                    }
                    let m = match kind {
                        PrimitiveKind::Cnot | PrimitiveKind::CnotInvert => pauli_x(),
                        PrimitiveKind::CtrlV => sqrt_not(),
                        PrimitiveKind::CtrlVDag => sqrt_not().adjoint(),
                        PrimitiveKind::Not => unreachable!(),
                    };
                    let t = bit(col, self.target);
                    for out in 0..2 {
                        let row = if out == t {
                            base
                        } else {
                            flip(base, self.target)
                        };
                        u[(row, col)] += m[(out, t)];
                    }
                }
                (_, None) => panic!("controlled primitive without a control line"),
            }
        }
        u
    }
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

pub fn pauli_x() -> DMatrix<Complex64> {
    let z = Complex64::new(0.0, 0.0);
    DMatrix::from_row_slice(2, 2, &[z, one(), one(), z])
}

/// V with V·V = X: `V = ½ [[1+i, 1-i], [1-i, 1+i]]`.
pub fn sqrt_not() -> DMatrix<Complex64> {
    let p = Complex64::new(0.5, 0.5);
    let m = Complex64::new(0.5, -0.5);
    DMatrix::from_row_slice(2, 2, &[p, m, m, p])
}

/// A named reversible gate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GateDef {
    pub kind: GateKind,
    pub arity: usize,
    /// `permutation[i]` is the output pattern for input pattern `i`.
    pub permutation: Vec<usize>,
    pub quantum_cost: u32,
    pub decomposition: Vec<QuantumPrimitive>,
}

impl GateDef {
    fn from_fn(
        kind: GateKind,
        arity: usize,
        quantum_cost: u32,
        decomposition: Vec<QuantumPrimitive>,
        f: impl Fn(&[bool]) -> Vec<bool>,
    ) -> Self {
        let permutation = (0..1usize << arity)
            .map(|i| pack(&f(&unpack(i, arity))))
            .collect();
        GateDef {
            kind,
            arity,
            permutation,
            quantum_cost,
            decomposition,
        }
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    /// Applies the gate to a bit-vector of length `arity`.
    pub fn apply(&self, input: &[bool]) -> Result<Vec<bool>, Error> {
        if input.len() != self.arity {
            return Err(Error::Arity {
                gate: self.kind,
                expected: self.arity,
                got: input.len(),
            });
        }
        Ok(unpack(self.permutation[pack(input)], self.arity))
    }

    /// Applies the inverse permutation.
    pub fn apply_inverse(&self, output: &[bool]) -> Result<Vec<bool>, Error> {
        if output.len() != self.arity {
            return Err(Error::Arity {
                gate: self.kind,
                expected: self.arity,
                got: output.len(),
            });
        }
        let target = pack(output);
        let idx = self
            .permutation
            .iter()
            .position(|&p| p == target)
            .expect("bijective gate");
        Ok(unpack(idx, self.arity))
    }

    pub fn is_bijection(&self) -> bool {
        let mut seen = vec![false; self.permutation.len()];
        for &p in &self.permutation {
            if p >= seen.len() || seen[p] {
                return false;
            }
            seen[p] = true;
        }
        true
    }

    /// The 0/1 matrix sending basis state `i` to `permutation[i]`.
    pub fn permutation_matrix(&self) -> DMatrix<Complex64> {
        let dim = self.permutation.len();
        let mut m = DMatrix::zeros(dim, dim);
        for (col, &row) in self.permutation.iter().enumerate() {
            m[(row, col)] = one();
        }
        m
    }

    /// Product of the decomposition's primitive matrices, first primitive applied first.
    pub fn decomposition_unitary(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.arity;
        self.decomposition
            .iter()
            .fold(DMatrix::identity(dim, dim), |acc, p| {
                p.unitary(self.arity) * acc
            })
    }
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Packs bits MSB-first into a pattern index.
pub fn pack(bits: &[bool]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
}

/// Inverse of [`pack`].
pub fn unpack(index: usize, width: usize) -> Vec<bool> {
    (0..width)
        .map(|k| (index >> (width - 1 - k)) & 1 == 1)
        .collect()
}

static BUILTINS: LazyLock<[GateDef; 6]> = LazyLock::new(|| {
    use QuantumPrimitive as P;
    [
        GateDef::from_fn(GateKind::Not, 1, 1, vec![P::not(0)], |x| vec![!x[0]]),
        GateDef::from_fn(GateKind::Fg, 2, 1, vec![P::cnot(0, 1)], |x| {
            vec![x[0], x[0] ^ x[1]]
        }),
        GateDef::from_fn(
            GateKind::Dfg,
            3,
            2,
            vec![P::cnot(0, 1), P::cnot(0, 2)],
            |x| vec![x[0], x[0] ^ x[1], x[0] ^ x[2]],
        ),
        // V^(b) V^(a) on C, then B ^= A, then V^-(a^b): exponent a + b - (a^b) = 2ab.
        GateDef::from_fn(
            GateKind::Pg,
            3,
            4,
            vec![P::cv(1, 2), P::cv(0, 2), P::cnot(0, 1), P::cv_dag(1, 2)],
            |x| vec![x[0], x[0] ^ x[1], (x[0] & x[1]) ^ x[2]],
        ),
        GateDef::from_fn(
            GateKind::Mpg,
            3,
            4,
            vec![
                P::cv(1, 2),
                P::cv(0, 2),
                P::cnot_invert(0, 1),
                P::cv_dag(1, 2),
            ],
            |x| vec![!x[0], x[0] ^ x[1], (x[0] & x[1]) ^ x[2]],
        ),
        GateDef::from_fn(
            GateKind::Tg,
            3,
            5,
            vec![
                P::cv(1, 2),
                P::cnot(0, 1),
                P::cv_dag(1, 2),
                P::cnot(0, 1),
                P::cv(0, 2),
            ],
            |x| vec![x[0], x[1], (x[0] & x[1]) ^ x[2]],
        ),
    ]
});

/// All built-in gate definitions.
pub fn builtin_gates() -> &'static [GateDef] {
    &BUILTINS[..]
}

/// Looks up a built-in gate by its file-format name.
pub fn lookup(name: &str) -> Result<&'static GateDef, Error> {
    name.parse::<GateKind>().map(GateKind::def)
}

/// Applies `gate` to `input`.
pub fn apply_gate(gate: &GateDef, input: &[bool]) -> Result<Vec<bool>, Error> {
    gate.apply(input)
}
