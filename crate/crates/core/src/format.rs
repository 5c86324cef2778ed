// SPDX-License-Identifier: Apache-2.0

//! Line-oriented text format for netlists and sequential circuits.
//!
//! ```text
//! .rnl 1
//! .lines 4
//! .input 0 CLK
//! .input 1 T
//! .input 2 Q
//! .const 3 1
//! .output 0 CLK
//! .garbage 1
//! .feedback 2 2 0
//! .output 3 QN
//! .clock 0
//! .stage 0 global rise out=2 clk=0 gates=0..2
//! gate PG 0 1 2
//! gate FG 2 3
//! .end
//! ```
//!
//! `#` starts a comment. Line indices are 0-based. `.stage` takes the stage
//! index, its clock source (`global` or `q<j>`), its trigger edge and then
//! `out=` (the feedback line holding Q), optional `clk=` (the line read as the
//! stage's clock), `gates=<start>..<end>` and optional `aux=<l>[,<l>...]`.
//! A file with `.stage` or `.clock` directives describes a sequential circuit.

use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::gatelib::GateKind;
use crate::netlist::{InputRole, Netlist, OutputRole};
use crate::sequential::{ClockSource, SequentialCircuit, StageBinding, Trigger};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Design {
    Combinational(Netlist),
    Sequential(SequentialCircuit),
}

impl Design {
    pub fn netlist(&self) -> &Netlist {
        match self {
            Design::Combinational(n) => n,
            Design::Sequential(s) => s.core(),
        }
    }
}

impl From<Netlist> for Design {
    fn from(n: Netlist) -> Self {
        Design::Combinational(n)
    }
}

impl From<SequentialCircuit> for Design {
    fn from(s: SequentialCircuit) -> Self {
        Design::Sequential(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("unknown gate `{0}`")]
    UnknownGate(String),
    #[error("line index {index} out of range for {lines} lines")]
    IndexOutOfRange { index: usize, lines: usize },
    #[error("line {0} already has {1} role")]
    DuplicateRole(usize, &'static str),
    #[error("{0}")]
    Sequential(String),
}

/// A parse failure at a 1-based line and column.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let code = line.split('#').next().unwrap_or("");
    let mut tokens = Vec::new();
    let mut start = None;
    for (i, c) in code.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                tokens.push(Token {
                    text: &code[s..i],
                    column: code[..s].chars().count() + 1,
                });
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        tokens.push(Token {
            text: &code[s..],
            column: code[..s].chars().count() + 1,
        });
    }
    tokens
}

struct Parser {
    line_no: usize,
    lines: Option<usize>,
    netlist: Netlist,
    clock: Option<usize>,
    stages: Vec<StageBinding>,
}

impl Parser {
    fn err<T>(&self, column: usize, kind: ParseErrorKind) -> Result<T, ParseError> {
        Err(ParseError {
            line: self.line_no,
            column,
            kind,
        })
    }

    fn syntax<T>(&self, column: usize, msg: impl Into<String>) -> Result<T, ParseError> {
        self.err(column, ParseErrorKind::Syntax(msg.into()))
    }

    fn number(&self, tok: &Token) -> Result<usize, ParseError> {
        match tok.text.parse::<usize>() {
            Ok(v) => Ok(v),
            Err(_) => self.syntax(
                tok.column,
                format!("expected a number, found `{}`", tok.text),
            ),
        }
    }

    fn bit(&self, tok: &Token) -> Result<bool, ParseError> {
        match tok.text {
            "0" => Ok(false),
            "1" => Ok(true),
            other => self.syntax(tok.column, format!("expected 0 or 1, found `{other}`")),
        }
    }

    fn index(&self, tok: &Token) -> Result<usize, ParseError> {
        let Some(lines) = self.lines else {
            return self.syntax(tok.column, ".lines must precede line indices");
        };
        let v = self.number(tok)?;
        if v >= lines {
            return self.err(
                tok.column,
                ParseErrorKind::IndexOutOfRange { index: v, lines },
            );
        }
        Ok(v)
    }

    fn arity(&self, toks: &[Token], n: usize) -> Result<(), ParseError> {
        if toks.len() == n + 1 {
            return Ok(());
        }
        let column = toks.get(n + 1).or(toks.last()).map_or(1, |t| t.column);
        self.syntax(
            column,
            format!(
                "`{}` takes {n} operand(s), found {}",
                toks[0].text,
                toks.len() - 1
            ),
        )
    }

    fn set_input(&mut self, tok: &Token, role: InputRole) -> Result<(), ParseError> {
        let line = self.index(tok)?;
        if self.netlist.input_role(line).is_some() {
            return self.err(tok.column, ParseErrorKind::DuplicateRole(line, "an input"));
        }
        self.netlist.set_input(line, role).expect("index checked");
        Ok(())
    }

    fn set_output(&mut self, tok: &Token, role: OutputRole) -> Result<(), ParseError> {
        let line = self.index(tok)?;
        if self.netlist.output_role(line).is_some() {
            return self.err(tok.column, ParseErrorKind::DuplicateRole(line, "an output"));
        }
        self.netlist.set_output(line, role).expect("index checked");
        Ok(())
    }

    fn directive(&mut self, toks: &[Token]) -> Result<(), ParseError> {
        let head = &toks[0];
        if self.lines.is_none() && head.text != ".lines" {
            return self.syntax(
                head.column,
                format!("expected `.lines`, found `{}`", head.text),
            );
        }
        match head.text {
            ".lines" => {
                self.arity(toks, 1)?;
                if self.lines.is_some() {
                    return self.syntax(head.column, "duplicate `.lines`");
                }
                let n = self.number(&toks[1])?;
                self.lines = Some(n);
                self.netlist = Netlist::new(n);
            }
            ".input" => {
                self.arity(toks, 2)?;
                self.set_input(&toks[1], InputRole::Primary(toks[2].text.to_string()))?;
            }
            ".const" => {
                self.arity(toks, 2)?;
                let b = self.bit(&toks[2])?;
                self.set_input(&toks[1], InputRole::Constant(b))?;
            }
            ".output" => {
                self.arity(toks, 2)?;
                self.set_output(&toks[1], OutputRole::Primary(toks[2].text.to_string()))?;
            }
            ".garbage" => {
                self.arity(toks, 1)?;
                self.set_output(&toks[1], OutputRole::Garbage)?;
            }
            ".consumed" => {
                self.arity(toks, 1)?;
                self.set_output(&toks[1], OutputRole::Consumed)?;
            }
            ".feedback" => {
                self.arity(toks, 3)?;
                let dest = self.index(&toks[2])?;
                let init = self.bit(&toks[3])?;
                self.set_output(&toks[1], OutputRole::Feedback { dest, init })?;
            }
            ".clock" => {
                self.arity(toks, 1)?;
                if self.clock.is_some() {
                    return self.syntax(head.column, "duplicate `.clock`");
                }
                self.clock = Some(self.index(&toks[1])?);
            }
            ".stage" => self.stage(toks)?,
            "gate" => {
                if toks.len() < 2 {
                    return self.syntax(head.column, "`gate` needs a gate name");
                }
                let kind = match toks[1].text.parse::<GateKind>() {
                    Ok(k) => k,
                    Err(_) => {
                        let name = toks[1].text.to_string();
                        return self.err(toks[1].column, ParseErrorKind::UnknownGate(name));
                    }
                };
                if toks.len() != kind.arity() + 2 {
                    let column = toks.last().map_or(1, |t| t.column);
                    return self.syntax(
                        column,
                        format!(
                            "{kind} takes {} line(s), found {}",
                            kind.arity(),
                            toks.len() - 2
                        ),
                    );
                }
                let lines = toks[2..]
                    .iter()
                    .map(|t| self.index(t))
                    .collect::<Result<Vec<_>, _>>()?;
                self.netlist
                    .push_gate(kind, &lines)
                    .expect("arity and range checked");
            }
            other => return self.syntax(head.column, format!("unknown directive `{other}`")),
        }
        Ok(())
    }

    fn stage(&mut self, toks: &[Token]) -> Result<(), ParseError> {
        if toks.len() < 4 {
            return self.syntax(
                toks[0].column,
                "`.stage` needs an index, a clock source and an edge",
            );
        }
        let index = self.number(&toks[1])?;
        let clock = match toks[2].text {
            "global" => ClockSource::Global,
            s => match s.strip_prefix('q').and_then(|j| j.parse().ok()) {
                Some(j) => ClockSource::Stage(j),
                None => {
                    return self.syntax(
                        toks[2].column,
                        format!("expected `global` or `q<j>`, found `{s}`"),
                    )
                }
            },
        };
        let trigger = match toks[3].text {
            "rise" => Trigger::Rise,
            "fall" => Trigger::Fall,
            s => {
                return self.syntax(
                    toks[3].column,
                    format!("expected `rise` or `fall`, found `{s}`"),
                )
            }
        };
        let (mut q_line, mut clock_line, mut gates, mut aux) = (None, None, None, Vec::new());
        for tok in &toks[4..] {
            let Some((key, value)) = tok.text.split_once('=') else {
                return self.syntax(
                    tok.column,
                    format!("expected key=value, found `{}`", tok.text),
                );
            };
            let sub = Token {
                text: value,
                column: tok.column + key.len() + 1,
            };
            match key {
                "out" if q_line.is_none() => q_line = Some(self.index(&sub)?),
                "clk" if clock_line.is_none() => clock_line = Some(self.index(&sub)?),
                "gates" if gates.is_none() => {
                    let Some((a, b)) = value.split_once("..") else {
                        return self.syntax(sub.column, "expected gates=<start>..<end>");
                    };
                    let start = self.number(&Token {
                        text: a,
                        column: sub.column,
                    })?;
                    let end = self.number(&Token {
                        text: b,
                        column: sub.column + a.len() + 2,
                    })?;
                    gates = Some(start..end);
                }
                "aux" if aux.is_empty() => {
                    let mut col = sub.column;
                    for part in value.split(',') {
                        aux.push(self.index(&Token {
                            text: part,
                            column: col,
                        })?);
                        col += part.len() + 1;
                    }
                }
                _ => {
                    return self.syntax(tok.column, format!("unexpected or repeated field `{key}`"))
                }
            }
        }
        let (Some(q_line), Some(gates)) = (q_line, gates) else {
            return self.syntax(toks[0].column, "`.stage` requires out= and gates=");
        };
        self.stages.push(StageBinding {
            index,
            q_line,
            clock,
            trigger,
            clock_line,
            gates,
            aux,
        });
        Ok(())
    }
}

/// Parses a netlist or sequential circuit.
pub fn parse(text: &str) -> Result<Design, ParseError> {
    let mut p = Parser {
        line_no: 0,
        lines: None,
        netlist: Netlist::new(0),
        clock: None,
        stages: Vec::new(),
    };
    let mut seen_header = false;
    let mut end_line = None;
    for (i, raw) in text.lines().enumerate() {
        p.line_no = i + 1;
        let toks = tokenize(raw);
        let Some(head) = toks.first() else { continue };
        if end_line.is_some() {
            return p.syntax(head.column, "content after `.end`");
        }
        if !seen_header {
            if head.text != ".rnl" {
                return p.syntax(head.column, "file must start with `.rnl 1`");
            }
            p.arity(&toks, 1)?;
            if toks[1].text != "1" {
                return p.syntax(
                    toks[1].column,
                    format!("unsupported version `{}`", toks[1].text),
                );
            }
            seen_header = true;
            continue;
        }
        if head.text == ".end" {
            p.arity(&toks, 0)?;
            end_line = Some(p.line_no);
            continue;
        }
        if head.text == ".rnl" {
            return p.syntax(head.column, "duplicate `.rnl` header");
        }
        p.directive(&toks)?;
    }
    let Some(end) = end_line else {
        p.line_no = text.lines().count() + 1;
        return p.syntax(1, "missing `.end`");
    };
    if p.lines.is_none() {
        p.line_no = end;
        return p.syntax(1, "missing `.lines`");
    }
    if p.stages.is_empty() && p.clock.is_none() {
        return Ok(Design::Combinational(p.netlist));
    }
    SequentialCircuit::new(p.netlist, p.clock, p.stages)
        .map(Design::Sequential)
        .map_err(|e| ParseError {
            line: end,
            column: 1,
            kind: ParseErrorKind::Sequential(e.to_string()),
        })
}

/// Parses a file that must describe a combinational netlist (a flattened core is accepted too).
pub fn parse_netlist(text: &str) -> Result<Netlist, ParseError> {
    parse(text).map(|d| match d {
        Design::Combinational(n) => n,
        Design::Sequential(s) => s.core().clone(),
    })
}

/// Canonical text form.
pub fn serialize(design: &Design) -> String {
    let mut out = String::new();
    write_design(&mut out, design).expect("writing to a String");
    out
}

pub fn serialize_netlist(netlist: &Netlist) -> String {
    let mut out = String::new();
    write_netlist_header(&mut out, netlist).expect("writing to a String");
    write_gates(&mut out, netlist).expect("writing to a String");
    out
}

fn write_design(out: &mut String, design: &Design) -> fmt::Result {
    let netlist = design.netlist();
    write_netlist_header(out, netlist)?;
    if let Design::Sequential(s) = design {
        if let Some(c) = s.clock_line() {
            writeln!(out, ".clock {c}")?;
        }
        for st in s.stages() {
            write!(
                out,
                ".stage {} {} {} out={}",
                st.index, st.clock, st.trigger, st.q_line
            )?;
            if let Some(c) = st.clock_line {
                write!(out, " clk={c}")?;
            }
            write!(out, " gates={}..{}", st.gates.start, st.gates.end)?;
            if !st.aux.is_empty() {
                let aux: Vec<String> = st.aux.iter().map(usize::to_string).collect();
                write!(out, " aux={}", aux.join(","))?;
            }
            writeln!(out)?;
        }
    }
    write_gates(out, netlist)
}

fn write_netlist_header(out: &mut String, n: &Netlist) -> fmt::Result {
    writeln!(out, ".rnl 1")?;
    writeln!(out, ".lines {}", n.line_count())?;
    for l in 0..n.line_count() {
        match n.input_role(l) {
            Some(InputRole::Primary(name)) => writeln!(out, ".input {l} {name}")?,
            Some(InputRole::Constant(b)) => writeln!(out, ".const {l} {}", u8::from(*b))?,
            None => {}
        }
    }
    for l in 0..n.line_count() {
        match n.output_role(l) {
            Some(OutputRole::Primary(name)) => writeln!(out, ".output {l} {name}")?,
            Some(OutputRole::Garbage) => writeln!(out, ".garbage {l}")?,
            Some(OutputRole::Consumed) => writeln!(out, ".consumed {l}")?,
            Some(OutputRole::Feedback { dest, init }) => {
                writeln!(out, ".feedback {l} {dest} {}", u8::from(*init))?
            }
            None => {}
        }
    }
    Ok(())
}

fn write_gates(out: &mut String, n: &Netlist) -> fmt::Result {
    for g in n.gates() {
        writeln!(out, "gate {g}")?;
    }
    writeln!(out, ".end")
}
