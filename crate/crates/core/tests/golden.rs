// SPDX-License-Identifier: Apache-2.0

use revcounter::report::{render_tables, scaling, scaling_csv, CITATIONS};
use revcounter::CounterMode;

#[test]
fn tables_match_golden_file() {
    let golden = include_str!("golden/tables.txt");
    assert_eq!(render_tables(), golden);
}

#[test]
fn every_reference_row_is_cited() {
    let text = render_tables();
    for (key, _) in CITATIONS {
        assert!(
            text.contains(&format!(" [{key}] ")),
            "{key} not used in a table row"
        );
    }
    assert!(text.contains("Rajmohan [rajmohan2011]            55     55       12"));
}

#[test]
fn scaling_rows_agree_where_the_formula_applies() {
    for row in scaling(16, None) {
        if let Some(p) = row.predicted_qc {
            assert_eq!(row.measured_qc, p, "{} n={}", row.mode, row.n);
        } else {
            assert!(row.mode == CounterMode::Sync && row.n < 3);
        }
    }
    let csv = scaling_csv(&scaling(16, None));
    assert_eq!(csv.lines().count(), 1 + 32);
    assert!(csv.contains("\n16,async,95,95\n"));
    assert!(csv.contains("\n16,sync,164,164\n"));
}
