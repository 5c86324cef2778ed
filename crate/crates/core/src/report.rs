// SPDX-License-Identifier: Apache-2.0

//! Comparison tables against published designs and counter scaling data.
//!
//! Rows for published designs are stored constants. The "Proposed" rows are
//! measured from the generators every time a table is rendered.

use std::fmt::Write as _;

use serde::Serialize;

use crate::generators::{
    build_clocked_t_ff, build_counter, build_ms_t_ff, predict_cost, ClockedVariant, CounterMode,
    CounterSpec,
};
use crate::metrics::CostReport;

/// Published cost figures for an earlier design.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ReferenceRow {
    pub design: &'static str,
    pub citation: &'static str,
    pub quantum_cost: u64,
    pub delay: u64,
    pub garbage: u64,
}

const fn reference(
    design: &'static str,
    citation: &'static str,
    quantum_cost: u64,
    delay: u64,
    garbage: u64,
) -> ReferenceRow {
    ReferenceRow {
        design,
        citation,
        quantum_cost,
        delay,
        garbage,
    }
}

pub const CLOCKED_T_FF_REFERENCES: [ReferenceRow; 2] = [
    reference("Chuang", "chuang2008", 6, 6, 2),
    reference("Thapliyal", "thapliyal2010", 6, 6, 2),
];

pub const MASTER_SLAVE_REFERENCES: [ReferenceRow; 2] = [
    reference("Thapliyal", "thapliyal2010", 11, 11, 3),
    reference("Thapliyal", "thapliyal2007", 17, 17, 4),
];

pub const ASYNC_COUNTER_REFERENCES: [ReferenceRow; 1] =
    [reference("Rajmohan", "rajmohan2011", 55, 55, 12)];

pub const SYNC_COUNTER_REFERENCES: [ReferenceRow; 1] = [reference("Khan", "khan2011", 35, 35, 4)];

/// Full citations for the keys used in the tables.
pub const CITATIONS: [(&str, &str); 5] = [
    ("chuang2008", "M.-L. Chuang and C.-Y. Wang, Synthesis of reversible sequential elements, ACM JETC 3(4), 2008"),
    ("thapliyal2010", "H. Thapliyal and N. Ranganathan, Design of reversible sequential circuits optimizing quantum cost, delay, and garbage outputs, ACM JETC 6(4), 2010"),
    ("thapliyal2007", "H. Thapliyal and A. P. Vinod, Design of reversible sequential elements with feasibility of transistor implementation, ISCAS 2007"),
    ("rajmohan2011", "V. Rajmohan and V. Ranganathan, Design of counter using reversible logic, 2011"),
    ("khan2011", "M. H. A. Khan and M. Perkowski, Synthesis of reversible synchronous counters, ISMVL 2011"),
];

/// One comparison table: a measured row followed by the published ones.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComparisonTable {
    pub title: &'static str,
    pub proposed: CostReport,
    pub references: Vec<ReferenceRow>,
}

pub fn comparison_tables() -> Vec<ComparisonTable> {
    let counter = |mode| {
        let spec = CounterSpec { bits: 4, mode };
        CostReport::of(build_counter(spec).expect("width is positive").core())
    };
    vec![
        ComparisonTable {
            title: "Clocked T flip-flop",
            proposed: CostReport::of(build_clocked_t_ff(ClockedVariant::A).core()),
            references: CLOCKED_T_FF_REFERENCES.to_vec(),
        },
        ComparisonTable {
            title: "Master-slave T flip-flop",
            proposed: CostReport::of(build_ms_t_ff().core()),
            references: MASTER_SLAVE_REFERENCES.to_vec(),
        },
        ComparisonTable {
            title: "4-bit asynchronous counter",
            proposed: counter(CounterMode::Async),
            references: ASYNC_COUNTER_REFERENCES.to_vec(),
        },
        ComparisonTable {
            title: "4-bit synchronous counter",
            proposed: counter(CounterMode::Sync),
            references: SYNC_COUNTER_REFERENCES.to_vec(),
        },
    ]
}

/// Plain-text rendering of all four tables and the citation list.
pub fn render_tables() -> String {
    let mut out = String::new();
    for table in comparison_tables() {
        let mut rows = vec![(
            "Proposed".to_string(),
            table.proposed.quantum_cost,
            table.proposed.delay,
            table.proposed.garbage_outputs,
        )];
        rows.extend(table.references.iter().map(|r| {
            (
                format!("{} [{}]", r.design, r.citation),
                r.quantum_cost,
                r.delay,
                r.garbage,
            )
        }));
        let width = rows
            .iter()
            .map(|r| r.0.len())
            .max()
            .unwrap_or(0)
            .max("design".len());
        writeln!(out, "{}", table.title).unwrap();
        writeln!(
            out,
            "{:<width$}  {:>12}  {:>5}  {:>7}",
            "design", "quantum_cost", "delay", "garbage"
        )
        .unwrap();
        for (name, qc, delay, garbage) in rows {
            writeln!(out, "{name:<width$}  {qc:>12}  {delay:>5}  {garbage:>7}").unwrap();
        }
        out.push('\n');
    }
    for (key, text) in CITATIONS {
        writeln!(out, "[{key}] {text}").unwrap();
    }
    out
}

/// One line of the scaling sweep. `predicted_qc` is absent where the closed
/// form does not apply (synchronous counters below three bits).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ScalingRow {
    pub n: usize,
    pub mode: CounterMode,
    pub measured_qc: u64,
    pub predicted_qc: Option<u64>,
}

/// Measured and predicted quantum cost for n = 1..=max_bits, async rows first.
pub fn scaling(max_bits: usize, mode: Option<CounterMode>) -> Vec<ScalingRow> {
    let modes = match mode {
        Some(m) => vec![m],
        None => vec![CounterMode::Async, CounterMode::Sync],
    };
    let mut rows = Vec::new();
    for mode in modes {
        for n in 1..=max_bits {
            let spec = CounterSpec { bits: n, mode };
            let measured = CostReport::of(build_counter(spec).expect("width is positive").core());
            let predicted = predict_cost(spec);
            rows.push(ScalingRow {
                n,
                mode,
                measured_qc: measured.quantum_cost,
                predicted_qc: predicted.applicable.then_some(predicted.quantum),
            });
        }
    }
    rows
}

pub const SCALING_CSV_HEADER: &str = "n,mode,measured_qc,predicted_qc";

pub fn scaling_csv(rows: &[ScalingRow]) -> String {
    let mut out = String::from(SCALING_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let predicted = r.predicted_qc.map(|p| p.to_string()).unwrap_or_default();
        writeln!(out, "{},{},{},{}", r.n, r.mode, r.measured_qc, predicted).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn proposed_rows() {
        let t = comparison_tables();
        let triple = |r: &CostReport| (r.quantum_cost, r.delay, r.garbage_outputs);
        assert_eq!(triple(&t[0].proposed), (5, 5, 1));
        assert_eq!(triple(&t[1].proposed), (10, 10, 2));
        assert_eq!(triple(&t[2].proposed), (23, 23, 4));
        assert_eq!(triple(&t[3].proposed), (32, 32, 4));
        assert_eq!(t[2].references[0].quantum_cost, 55);
    }

    #[test]
    fn scaling_single_async_row() {
        let rows = scaling(1, Some(CounterMode::Async));
        assert_eq!(
            scaling_csv(&rows),
            "n,mode,measured_qc,predicted_qc\n1,async,5,5\n"
        );
    }

    #[test]
    fn small_sync_has_no_prediction() {
        let csv = scaling_csv(&scaling(3, Some(CounterMode::Sync)));
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[1], "1,sync,5,");
        assert_eq!(lines[3], "3,sync,21,21");
    }
}
