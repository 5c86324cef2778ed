// SPDX-License-Identifier: Apache-2.0

use revcounter::generators::build_counter;
use revcounter::sequential::{pulse, pulse_with, run, run_traced};
use revcounter::{CounterMode, CounterSpec, CounterState, SequentialCircuit};

fn counter(bits: usize, mode: CounterMode) -> SequentialCircuit {
    build_counter(CounterSpec::new(bits, mode).unwrap()).unwrap()
}

#[test]
fn both_modes_count_modulo_width() {
    for mode in [CounterMode::Async, CounterMode::Sync] {
        for n in 1..=8 {
            let states = run(&counter(n, mode), 3 << n);
            for (t, s) in states.iter().enumerate() {
                assert_eq!(s.value(), t as u64 % (1 << n), "{mode} n={n} pulse {t}");
                assert_eq!(s.pulse_count, t as u64);
            }
        }
    }
}

#[test]
fn async_and_sync_agree_from_any_start() {
    for n in 1..=6 {
        let a = counter(n, CounterMode::Async);
        let s = counter(n, CounterMode::Sync);
        for start in 0..(1u64 << n) {
            let mut x = CounterState::from_value(&a, start).unwrap();
            let mut y = CounterState::from_value(&s, start).unwrap();
            for step in 1..=4u64 {
                x = pulse(&a, &x).unwrap();
                y = pulse(&s, &y).unwrap();
                assert_eq!(x.bits(), y.bits(), "n={n} start={start} step={step}");
                assert_eq!(x.value(), (start + step) % (1 << n));
            }
        }
    }
}

#[test]
fn msb_string_and_examples() {
    let a4 = counter(4, CounterMode::Async);
    assert_eq!(run(&a4, 5).last().unwrap().to_msb_string(), "0101");
    let s3 = counter(3, CounterMode::Sync);
    assert_eq!(run(&s3, 8).last().unwrap().to_msb_string(), "000");
    assert_eq!(run(&s3, 0).len(), 1);
}

#[test]
fn ripple_fires_only_on_carries() {
    let (_, traces) = run_traced(&counter(3, CounterMode::Async), 8);
    let fired: Vec<usize> = traces
        .iter()
        .map(|t| t.fired.iter().filter(|f| **f).count())
        .collect();
    // 0->1 fires stage 0 only, 1->2 also stage 1, 3->4 all three, 7->0 all three.
    assert_eq!(fired, [1, 2, 1, 3, 1, 2, 1, 3]);
}

#[test]
fn state_width_is_checked() {
    let c = counter(3, CounterMode::Sync);
    assert!(CounterState::from_bits(&c, &[true; 2]).is_err());
    let other = CounterState::initial(&counter(4, CounterMode::Sync));
    assert!(pulse(&c, &other).is_err());
}

#[test]
fn t_input_holds_the_clocked_flip_flop() {
    let c = revcounter::generators::build_clocked_t_ff(revcounter::generators::ClockedVariant::B);
    let s0 = CounterState::initial(&c);
    let (held, trace) = pulse_with(&c, &s0, &[("T", false)]).unwrap();
    assert_eq!(held.value(), 0);
    assert_eq!(trace.fired, [true]);
    let (toggled, _) = pulse_with(&c, &s0, &[("T", true)]).unwrap();
    assert_eq!(toggled.value(), 1);
    assert!(pulse_with(&c, &s0, &[("X", true)]).is_err());
}
