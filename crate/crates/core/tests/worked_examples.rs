//! Worked theories from the data directory: traces, unity and costs.

use std::collections::BTreeSet;

use appc_core::cost::{cost, cost_noise};
use appc_core::lang::{parse_atom, parse_sequence, parse_theory, Atom, SensorySequence, Theory};
use appc_core::trace::{covers, trace};
use appc_core::unity::unified;

fn data(path: &str) -> String {
    std::fs::read_to_string(format!("{}/data/{path}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn theory(name: &str) -> Theory {
    parse_theory(&data(&format!("theories/{name}"))).unwrap()
}

fn atoms(list: &[&str]) -> BTreeSet<Atom> {
    list.iter().map(|a| parse_atom(a).unwrap()).collect()
}

fn ex1_sequence() -> SensorySequence {
    let text: String = data("tasks/ex1.task")
        .lines()
        .filter(|l| l.starts_with("at "))
        .map(|l| format!("{l}\n"))
        .collect();
    parse_sequence(&text).unwrap()
}

#[test]
fn example_one_trace_cycles_with_period_three() {
    let th = theory("ex1.thy");
    let tr = trace(&th, 4).unwrap();
    assert_eq!(tr.at(1), &atoms(&["on(a)", "on(b)", "p2(a)", "p1(b)", "r(a,b)", "r(b,a)"]));
    assert_eq!(tr.at(2), &atoms(&["off(a)", "on(b)", "p3(a)", "p2(b)", "r(a,b)", "r(b,a)"]));
    assert_eq!(tr.at(3), &atoms(&["on(a)", "off(b)", "p1(a)", "p3(b)", "r(a,b)", "r(b,a)"]));
    assert_eq!(tr.at(4), tr.at(1));
    assert_eq!(tr.period, Some((1, 3)));
}

#[test]
fn example_one_theory_makes_sense_of_its_sequence() {
    let th = theory("ex1.thy");
    let seq = ex1_sequence();
    assert_eq!(seq.len(), 10);
    let report = unified(&th, &seq);
    assert!(report.accepted(), "{report}");
    let tr = trace(&th, 10).unwrap();
    assert!(covers(&tr, &seq));
    assert_eq!(
        tr.at(10),
        &atoms(&["on(a)", "on(b)", "r(a,b)", "r(b,a)", "p2(a)", "p1(b)"])
    );
}

#[test]
fn alternative_interpretations_are_unified() {
    let seq = ex1_sequence();
    for name in ["ex2.thy", "ex3.thy"] {
        let th = theory(name);
        let report = unified(&th, &seq);
        assert!(report.accepted(), "{name}: {report}");
    }
}

#[test]
fn moving_sensors_use_different_connecting_atoms() {
    let th = theory("ex3.thy");
    let tr = trace(&th, 2).unwrap();
    assert!(tr.at(1).is_superset(&atoms(&["part(a,c1)", "r(c1,c2)", "part(b,c2)"])));
    assert!(tr.at(2).is_superset(&atoms(&["part(a,c3)", "r(c3,c1)", "part(b,c1)"])));
}

#[test]
fn worked_costs() {
    assert_eq!(cost(&theory("ex1.thy")).total, 16);
    assert_eq!(cost(&theory("ex2.thy")).total, 12);
    assert_eq!(cost(&theory("ex3.thy")).total, 17);
    let noise = cost_noise(&theory("ex1.thy"), &ex1_sequence()).unwrap();
    assert_eq!(noise.noise_total(1), 16);
}

#[test]
fn rule_110_reproduces_the_trajectory() {
    let rows = [
        "00000100000",
        "00001100000",
        "00011100000",
        "00110100000",
        "01111100000",
        "11000100000",
        "11001100001",
        "01011100011",
        "11110100111",
        "00011101100",
    ];
    let th = theory("rule110.thy");
    let c = cost(&th);
    assert_eq!((c.n_inits, c.n_causal, c.n_body_atoms), (22, 2, 8));
    let tr = trace(&th, 11).unwrap();
    for (t, row) in rows.iter().enumerate() {
        for (i, bit) in row.chars().enumerate() {
            let cell = format!("c{}", i + 1);
            let want = if bit == '1' { "on" } else { "off" };
            assert!(
                tr.at(t + 1).contains(&Atom::unary(want, &cell)),
                "step {} cell {cell}",
                t + 1
            );
        }
    }
}
