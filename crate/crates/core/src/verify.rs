// SPDX-License-Identifier: Apache-2.0

//! Exhaustive checkers for reversibility, functional equivalence, gate
//! decompositions, the closed-form cost formulas and counting behaviour.
//!
//! Every check enumerates its whole input space; nothing is sampled. Checks
//! that would need more than [`EXHAUSTIVE_BOUND`] free inputs refuse to run.

use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use crate::gatelib::{builtin_gates, max_abs_diff, UNITARY_TOLERANCE};
use crate::generators::{build_counter, predict_cost, CounterMode, CounterSpec};
use crate::metrics::CostReport;
use crate::netlist::{InputRole, Netlist};
use crate::sequential::{run, SequentialCircuit};
use crate::Error;

/// Largest free-input count an exhaustive check will enumerate.
pub const EXHAUSTIVE_BOUND: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    subject: String,
    checks: Vec<Check>,
    all_passed: bool,
}

impl VerificationReport {
    pub fn new(subject: impl Into<String>) -> Self {
        VerificationReport {
            subject: subject.into(),
            checks: Vec::new(),
            all_passed: true,
        }
    }

    pub fn push(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.all_passed &= passed;
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    /// Appends another report's checks, prefixing their names with its subject.
    pub fn absorb(&mut self, other: VerificationReport) {
        for c in other.checks {
            self.push(format!("{}: {}", other.subject, c.name), c.passed, c.detail);
        }
    }

    pub fn subject(&self) -> &str {
        &self.subject
    }

    pub fn checks(&self) -> &[Check] {
        &self.checks
    }

    pub fn all_passed(&self) -> bool {
        self.all_passed
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.subject)?;
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "  {tag} {}: {}", c.name, c.detail)?;
        }
        let failed = self.failures().count();
        if failed == 0 && self.checks.len() == 1 {
            write!(f, "1 check passed")
        } else if failed == 0 {
            write!(f, "all {} checks passed", self.checks.len())
        } else {
            write!(f, "{failed} of {} checks failed", self.checks.len())
        }
    }
}

fn describe(netlist: &Netlist, free: &[usize], index: u64) -> String {
    free.iter()
        .enumerate()
        .map(|(j, &l)| {
            let bit = (index >> j) & 1;
            match netlist.input_name(l) {
                Some(name) => format!("{name}={bit}"),
                None => format!("l{l}={bit}"),
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

const MIX: u128 = 0x9e37_79b9_7f4a_7c15_f39c_c060_5ced_c835;

/// Transposes a 64x64 bit matrix: bit `j` of `a[i]` moves to bit `i` of `a[j]`.
fn transpose64(a: &mut [u64; 64]) {
    let mut j = 32;
    let mut m: u64 = 0x0000_0000_ffff_ffff;
    while j != 0 {
        let mut k = 0;
        while k < 64 {
            let t = ((a[k] >> j) ^ a[k + j]) & m;
            a[k] ^= t << j;
            a[k + j] ^= t;
            k = (k + j + 1) & !j;
        }
        j >>= 1;
        m ^= m << j;
    }
}

/// Evaluates every free-input assignment 64 at a time and hands `visit` the
/// assignment index and a 128-bit key of its output vector. With at most 128
/// lines the key is the output itself; wider netlists get a mixed key.
fn for_each_output(netlist: &Netlist, free: &[usize], mut visit: impl FnMut(u64, u128)) {
    let lines = netlist.line_count();
    let total: u64 = 1 << free.len();
    let frame = netlist.constant_frame();
    let mut values = vec![0u64; lines];
    let mut keys = [0u128; 64];
    let mut block = 0u64;
    while block < total {
        for (l, v) in values.iter_mut().enumerate() {
            *v = if frame[l] { !0 } else { 0 };
        }
        for (j, &l) in free.iter().enumerate() {
            values[l] = if j < 6 {
                // Lane k holds assignment block + k; its low six bits are k.
                (0..64u64)
                    .filter(|k| (k >> j) & 1 == 1)
                    .fold(0, |m, k| m | (1 << k))
            } else if (block >> j) & 1 == 1 {
                !0
            } else {
                0
            };
        }
        netlist.apply_sliced(&mut values);
        keys.fill(0);
        for (chunk, words) in values.chunks(64).enumerate() {
            let mut rows = [0u64; 64];
            rows[..words.len()].copy_from_slice(words);
            transpose64(&mut rows);
            for (key, &row) in keys.iter_mut().zip(&rows) {
                *key = match chunk {
                    0 => u128::from(row),
                    1 => *key | u128::from(row) << 64,
                    _ => key.rotate_left(47).wrapping_mul(MIX) ^ u128::from(row),
                };
            }
        }
        let lanes = (total - block).min(64);
        for (k, key) in keys.iter().enumerate().take(lanes as usize) {
            visit(block + k as u64, *key);
        }
        block += 64;
    }
}

/// Passes iff distinct free-input assignments always give distinct outputs.
///
/// Constant lines keep their declared values and every line's final value
/// counts as output.
pub fn check_reversible(netlist: &Netlist) -> Result<VerificationReport, Error> {
    check_reversible_named(netlist, "netlist")
}

pub fn check_reversible_named(
    netlist: &Netlist,
    subject: &str,
) -> Result<VerificationReport, Error> {
    let free = netlist.free_lines();
    if free.len() > EXHAUSTIVE_BOUND {
        return Err(Error::TooManyInputs {
            free: free.len(),
            bound: EXHAUSTIVE_BOUND,
        });
    }
    let mut report = VerificationReport::new(subject);
    let mut keys = Vec::with_capacity(1 << free.len());
    for_each_output(netlist, &free, |_, key| keys.push(key));
    keys.sort_unstable();
    let repeated: HashSet<u128> = keys
        .windows(2)
        .filter(|w| w[0] == w[1])
        .map(|w| w[0])
        .collect();
    drop(keys);

    let total = 1u64 << free.len();
    let witness = if repeated.is_empty() {
        None
    } else {
        // Equal keys are only candidates when the netlist is wider than the key.
        let mut groups: Vec<(u128, u64)> = Vec::new();
        for_each_output(netlist, &free, |i, key| {
            if repeated.contains(&key) {
                groups.push((key, i));
            }
        });
        groups.sort_unstable();
        let assign = |i: u64| -> Vec<bool> { (0..free.len()).map(|j| (i >> j) & 1 == 1).collect() };
        let mut found = None;
        'outer: for group in groups.chunk_by(|a, b| a.0 == b.0) {
            for (x, a) in group.iter().enumerate() {
                let ya = netlist.eval_free(&assign(a.1))?;
                for b in &group[x + 1..] {
                    if netlist.eval_free(&assign(b.1))? == ya {
                        found = Some((a.1, b.1));
                        break 'outer;
                    }
                }
            }
        }
        found
    };
    match witness {
        None => report.push(
            "injective",
            true,
            format!(
                "{total} assignments of {} free inputs give distinct outputs",
                free.len()
            ),
        ),
        Some((a, b)) => report.push(
            "injective",
            false,
            format!(
                "[{}] and [{}] give the same output",
                describe(netlist, &free, a),
                describe(netlist, &free, b)
            ),
        ),
    }
    Ok(report)
}

pub type TruthFn<'a> = Box<dyn Fn(&[bool]) -> Vec<bool> + 'a>;

/// An explicit truth function over named inputs, compared on chosen lines.
pub struct TruthReference<'a> {
    /// Primary input names, in the order `function` receives them.
    pub inputs: Vec<String>,
    /// Output lines compared, in the order `function` returns them.
    pub outputs: Vec<usize>,
    pub function: TruthFn<'a>,
}

impl<'a> TruthReference<'a> {
    pub fn new(
        inputs: &[&str],
        outputs: &[usize],
        function: impl Fn(&[bool]) -> Vec<bool> + 'a,
    ) -> Self {
        TruthReference {
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
            outputs: outputs.to_vec(),
            function: Box::new(function),
        }
    }
}

/// Compares `netlist` against `reference` on every input assignment.
///
/// The reference must name exactly the netlist's free inputs.
pub fn check_equivalent(
    netlist: &Netlist,
    reference: &TruthReference<'_>,
) -> Result<VerificationReport, Error> {
    let free = netlist.free_lines();
    let mut names = Vec::with_capacity(free.len());
    for &l in &free {
        match netlist.input_role(l) {
            Some(InputRole::Primary(n)) => names.push(n.as_str()),
            _ => return Err(Error::Signature(format!("line {l} has no input role"))),
        }
    }
    let mut want: Vec<&str> = reference.inputs.iter().map(String::as_str).collect();
    let mut have = names.clone();
    want.sort_unstable();
    have.sort_unstable();
    if want != have {
        return Err(Error::Signature(format!(
            "reference inputs [{}] do not match netlist inputs [{}]",
            reference.inputs.join(", "),
            names.join(", ")
        )));
    }
    if free.len() > EXHAUSTIVE_BOUND {
        return Err(Error::TooManyInputs {
            free: free.len(),
            bound: EXHAUSTIVE_BOUND,
        });
    }
    if let Some(&l) = reference
        .outputs
        .iter()
        .find(|&&l| l >= netlist.line_count())
    {
        return Err(Error::LineOutOfRange {
            index: l,
            lines: netlist.line_count(),
        });
    }
    let lines: Vec<usize> = reference
        .inputs
        .iter()
        .map(|n| netlist.input_line(n).expect("names matched"))
        .collect();

    let mut report = VerificationReport::new("equivalence");
    let total = 1u64 << lines.len();
    let mut mismatch = None;
    for a in 0..total {
        let x: Vec<bool> = (0..lines.len()).map(|j| (a >> j) & 1 == 1).collect();
        let mut v = netlist.constant_frame();
        for (&l, &b) in lines.iter().zip(&x) {
            v[l] = b;
        }
        let y = netlist.eval(&v)?;
        let got: Vec<bool> = reference.outputs.iter().map(|&l| y[l]).collect();
        let want = (reference.function)(&x);
        if want.len() != got.len() {
            return Err(Error::Signature(format!(
                "reference returns {} bits for {} output lines",
                want.len(),
                got.len()
            )));
        }
        if got != want {
            mismatch = Some((a, got, want));
            break;
        }
    }
    match mismatch {
        None => report.push("outputs", true, format!("{total} assignments agree")),
        Some((a, got, want)) => {
            let inputs = reference
                .inputs
                .iter()
                .enumerate()
                .map(|(j, n)| format!("{n}={}", (a >> j) & 1))
                .collect::<Vec<_>>()
                .join(" ");
            report.push(
                "outputs",
                false,
                format!("[{inputs}] gives {got:?}, expected {want:?}"),
            );
        }
    }
    Ok(report)
}

/// Builds every counter up to `max_bits` in both modes and compares its
/// measured cost to [`predict_cost`]. Sync counters start at three bits.
pub fn check_theorems(max_bits: usize) -> Result<VerificationReport, Error> {
    if max_bits < 4 {
        return Err(Error::MaxBits {
            min: 4,
            got: max_bits,
        });
    }
    let mut specs = Vec::new();
    for mode in [CounterMode::Async, CounterMode::Sync] {
        let first = if mode == CounterMode::Sync { 3 } else { 1 };
        for bits in first..=max_bits {
            specs.push(CounterSpec { bits, mode });
        }
    }
    let rows: Vec<(String, bool, String)> = std::thread::scope(|s| {
        let handles: Vec<_> = specs
            .iter()
            .map(|&spec| s.spawn(move || theorem_row(spec)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("theorem row panicked"))
            .collect()
    });
    let mut report = VerificationReport::new(format!("cost formulas up to {max_bits} bits"));
    for (name, passed, detail) in rows {
        report.push(name, passed, detail);
    }
    Ok(report)
}

fn theorem_row(spec: CounterSpec) -> (String, bool, String) {
    let circuit = build_counter(spec).expect("width is positive");
    let m = CostReport::of(circuit.core());
    let p = predict_cost(spec);
    let passed = m.gate_count == p.gates
        && m.garbage_outputs == p.garbage
        && m.quantum_cost == p.quantum
        && m.delay == m.quantum_cost;
    let detail = format!(
        "measured gates {} garbage {} quantum {} delay {}; predicted gates {} garbage {} quantum {}",
        m.gate_count, m.garbage_outputs, m.quantum_cost, m.delay, p.gates, p.garbage, p.quantum
    );
    (format!("{} n={}", spec.mode, spec.bits), passed, detail)
}

/// Runs the counter for `pulses` pulses and checks state t equals t mod 2^n.
pub fn check_counting(spec: CounterSpec, pulses: u64) -> Result<VerificationReport, Error> {
    let circuit = build_counter(spec)?;
    Ok(check_counting_circuit(
        &circuit,
        &format!("{} {}-bit counter", spec.mode, spec.bits),
        pulses,
    ))
}

/// [`check_counting`] for an arbitrary sequential circuit.
pub fn check_counting_circuit(
    circuit: &SequentialCircuit,
    subject: &str,
    pulses: u64,
) -> VerificationReport {
    let mut report = VerificationReport::new(subject);
    let width = circuit.width();
    let modulus = if width >= 64 { u64::MAX } else { 1u64 << width };
    let states = run(circuit, pulses);
    let bad = states
        .iter()
        .enumerate()
        .find(|(t, s)| s.value() != *t as u64 % modulus);
    match bad {
        None => report.push(
            "counting",
            true,
            format!("{} states follow t mod {modulus}", states.len()),
        ),
        Some((t, s)) => report.push(
            "counting",
            false,
            format!(
                "after {t} pulses state is {}, expected {}",
                s.value(),
                t as u64 % modulus
            ),
        ),
    }
    report
}

/// For every builtin gate: bijection, decomposition unitary equal to the
/// permutation matrix within tolerance, and decomposition length equal to
/// the declared quantum cost.
pub fn check_decompositions() -> VerificationReport {
    let mut report = VerificationReport::new("builtin gates");
    for def in builtin_gates() {
        let deviation = max_abs_diff(&def.decomposition_unitary(), &def.permutation_matrix());
        let length = def.decomposition.len();
        let bijective = def.is_bijection();
        let passed =
            bijective && deviation <= UNITARY_TOLERANCE && length == def.quantum_cost as usize;
        report.push(
            def.name(),
            passed,
            format!(
                "arity {} cost {} decomposition length {length} deviation {deviation:.1e}{}",
                def.arity,
                def.quantum_cost,
                if bijective { "" } else { " not a bijection" }
            ),
        );
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gatelib::GateKind;
    use crate::generators::{build_clocked_t_ff, build_t_ff, ClockedVariant};
    use crate::netlist::OutputRole;
    use crate::sequential::{flatten, StageBinding, Trigger};

    #[test]
    fn transpose_moves_bits() {
        let mut a = [0u64; 64];
        for (i, w) in a.iter_mut().enumerate() {
            *w = (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ (1 << (i % 7));
        }
        let before = a;
        transpose64(&mut a);
        for (i, row) in before.iter().enumerate() {
            for (j, col) in a.iter().enumerate() {
                assert_eq!((row >> j) & 1, (col >> i) & 1, "bit {j} of row {i}");
            }
        }
    }

    #[test]
    fn t_ff_is_reversible() {
        let r = check_reversible(build_t_ff().core()).unwrap();
        assert!(r.all_passed(), "{r}");
    }

    #[test]
    fn async_core_is_reversible() {
        let c = build_counter(CounterSpec::new(4, CounterMode::Async).unwrap()).unwrap();
        assert!(check_reversible(&flatten(&c)).unwrap().all_passed());
    }

    fn and_fragment() -> Netlist {
        let mut n = Netlist::new(2);
        n.set_input(0, InputRole::Primary("a".into())).unwrap();
        n.set_input(1, InputRole::Primary("b".into())).unwrap();
        n.set_output(0, OutputRole::Garbage).unwrap();
        n.set_output(1, OutputRole::Primary("y".into())).unwrap();
        n.push_gate(GateKind::Tg, &[0, 1, 1]).unwrap();
        n
    }

    #[test]
    fn collapsing_fragment_fails() {
        let r = check_reversible(&and_fragment()).unwrap();
        assert!(!r.all_passed());
        assert!(r.checks()[0].detail.contains("a=1"), "{r}");
    }

    #[test]
    fn wide_netlist_uses_exact_recheck() {
        // 130 lines pushes keys past 128 bits; the collision must still be found.
        let mut n = and_fragment();
        for l in 0..128 {
            let line = n.add_line(InputRole::Constant(l % 3 == 0));
            n.set_output(line, OutputRole::Garbage).unwrap();
        }
        assert!(!check_reversible(&n).unwrap().all_passed());
        let mut ok = build_t_ff().core().clone();
        for _ in 0..140 {
            let line = ok.add_line(InputRole::Constant(true));
            ok.set_output(line, OutputRole::Garbage).unwrap();
        }
        ok.push_gate(GateKind::Fg, &[1, 141]).unwrap();
        assert!(check_reversible(&ok).unwrap().all_passed());
    }

    #[test]
    fn bound_is_enforced() {
        let mut n = Netlist::new(0);
        for i in 0..25 {
            let l = n.add_line(InputRole::Primary(format!("x{i}")));
            n.set_output(l, OutputRole::Garbage).unwrap();
        }
        assert_eq!(
            check_reversible(&n),
            Err(Error::TooManyInputs {
                free: 25,
                bound: 24
            })
        );
    }

    #[test]
    fn clocked_core_equivalence() {
        let core = build_clocked_t_ff(ClockedVariant::A).core().clone();
        let good = TruthReference::new(&["CLK", "T", "Q"], &[2], |x| vec![(x[0] & x[1]) ^ x[2]]);
        assert!(check_equivalent(&core, &good).unwrap().all_passed());
        let bad = TruthReference::new(&["CLK", "T", "Q"], &[2], |x| vec![x[1] ^ x[2]]);
        assert!(!check_equivalent(&core, &bad).unwrap().all_passed());
        let wrong = TruthReference::new(&["T", "Q"], &[1], |x| vec![x[0] ^ x[1]]);
        assert!(matches!(
            check_equivalent(&core, &wrong),
            Err(Error::Signature(_))
        ));
    }

    #[test]
    fn t_ff_equivalence() {
        let core = build_t_ff().core().clone();
        let r = TruthReference::new(&["Q", "T"], &[1], |x| vec![x[0] ^ x[1]]);
        assert!(check_equivalent(&core, &r).unwrap().all_passed());
    }

    #[test]
    fn theorem_rows() {
        assert_eq!(check_theorems(3), Err(Error::MaxBits { min: 4, got: 3 }));
        let r = check_theorems(16).unwrap();
        assert!(r.all_passed(), "{r}");
        assert_eq!(r.checks().len(), 16 + 14);
        let row = |name: &str| {
            r.checks()
                .iter()
                .find(|c| c.name == name)
                .unwrap()
                .detail
                .clone()
        };
        assert!(row("async n=4").starts_with("measured gates 8 garbage 4 quantum 23 delay 23"));
        assert!(row("sync n=4").starts_with("measured gates 12 garbage 4 quantum 32 delay 32"));
        assert!(row("async n=16").contains("quantum 95"));
    }

    #[test]
    fn counting_examples() {
        let a4 = CounterSpec::new(4, CounterMode::Async).unwrap();
        assert!(check_counting(a4, 48).unwrap().all_passed());
        let s3 = CounterSpec::new(3, CounterMode::Sync).unwrap();
        assert!(check_counting(s3, 24).unwrap().all_passed());
    }

    #[test]
    fn rising_ripple_is_caught() {
        let good = build_counter(CounterSpec::new(4, CounterMode::Async).unwrap()).unwrap();
        let stages: Vec<StageBinding> = good
            .stages()
            .iter()
            .cloned()
            .map(|mut s| {
                s.trigger = Trigger::Rise;
                s
            })
            .collect();
        let bad = SequentialCircuit::new(good.core().clone(), good.clock_line(), stages).unwrap();
        let r = check_counting_circuit(&bad, "rising ripple", 48);
        assert!(!r.all_passed(), "{r}");
    }

    #[test]
    fn decompositions_pass() {
        let r = check_decompositions();
        assert!(r.all_passed(), "{r}");
        let names: Vec<&str> = r.checks().iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, ["NOT", "FG", "DFG", "PG", "MPG", "TG"]);
        assert!(r.checks()[5].detail.contains("length 5"));
    }

    #[test]
    fn report_rendering() {
        let mut r = VerificationReport::new("x");
        r.push("a", true, "fine");
        r.push("b", false, "broken");
        assert!(!r.all_passed());
        assert_eq!(
            r.to_string(),
            "x\n  PASS a: fine\n  FAIL b: broken\n1 of 2 checks failed"
        );
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["all_passed"], false);
        assert_eq!(json["checks"][1]["name"], "b");
    }
}
