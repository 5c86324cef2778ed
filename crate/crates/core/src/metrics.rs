// SPDX-License-Identifier: Apache-2.0

//! Cost metrics: gate count, quantum cost, delay and garbage outputs.
//!
//! Delay is the logical depth of the cascade. Gate B depends on gate A when A
//! precedes B and the two share a line; a gate's weight is its quantum cost,
//! so the primitives inside one gate are serial while gates on disjoint lines
//! may overlap. A cascade in which every consecutive pair of gates shares a
//! line has delay equal to its quantum cost.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::netlist::{Netlist, OutputRole};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CostReport {
    #[serde(rename = "gates")]
    pub gate_count: u64,
    pub quantum_cost: u64,
    pub delay: u64,
    #[serde(rename = "garbage")]
    pub garbage_outputs: u64,
    #[serde(rename = "constants")]
    pub constant_inputs: u64,
}

impl CostReport {
    pub fn of(netlist: &Netlist) -> Self {
        CostReport {
            gate_count: gate_count(netlist),
            quantum_cost: quantum_cost(netlist),
            delay: delay(netlist),
            garbage_outputs: garbage_count(netlist),
            constant_inputs: netlist.constant_count() as u64,
        }
    }

    pub const CSV_HEADER: &'static str = "gates,quantum_cost,delay,garbage,constants";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.gate_count,
            self.quantum_cost,
            self.delay,
            self.garbage_outputs,
            self.constant_inputs
        )
    }
}

impl fmt::Display for CostReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "gates {}", self.gate_count)?;
        writeln!(f, "quantum_cost {}", self.quantum_cost)?;
        writeln!(f, "delay {}", self.delay)?;
        writeln!(f, "garbage {}", self.garbage_outputs)?;
        write!(f, "constants {}", self.constant_inputs)
    }
}

pub fn gate_count(netlist: &Netlist) -> u64 {
    netlist.gates().len() as u64
}

pub fn quantum_cost(netlist: &Netlist) -> u64 {
    netlist
        .gates()
        .iter()
        .map(|g| u64::from(g.gate.quantum_cost()))
        .sum()
}

/// Critical-path weight through the line-sharing dependency graph.
pub fn delay(netlist: &Netlist) -> u64 {
    let mut ready = vec![0u64; netlist.line_count()];
    let mut depth = 0;
    for inst in netlist.gates() {
        let start = inst.lines.iter().map(|&l| ready[l]).max().unwrap_or(0);
        let finish = start + u64::from(inst.gate.quantum_cost());
        for &l in &inst.lines {
            ready[l] = finish;
        }
        depth = depth.max(finish);
    }
    depth
}

pub fn garbage_count(netlist: &Netlist) -> u64 {
    netlist.count_outputs(|r| matches!(r, OutputRole::Garbage)) as u64
}

/// True when every consecutive pair of gates shares at least one line.
pub fn is_chain(netlist: &Netlist) -> bool {
    netlist
        .gates()
        .windows(2)
        .all(|w| w[0].lines.iter().any(|l| w[1].touches(*l)))
}
