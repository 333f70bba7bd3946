//! End-to-end runs of the `qubo` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qubo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qubo")).args(args).output().expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn sat_build_reports_dimension_and_prediction() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = dir.path().join("one.cnf");
    let out = dir.path().join("one.qubo");
    fs::write(&cnf, "p cnf 8 1\n1 2 3 4 5 6 7 8 0\n").unwrap();
    let o = qubo(&["sat-build", s(&cnf), "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(stdout(&o), "n=16 predicted=16\n");
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("qubo 16 "), "{text}");
    assert!(text.contains("map 0 0 8 9 10 11\n"), "{text}");
    assert!(text.contains("map 0 1 12 13 14\n"), "{text}");
    assert!(text.contains("map 0 2 15\n"), "{text}");
}

#[test]
fn hc_build_selects_the_encoding() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("ring.hc");
    fs::write(&graph, "p hc 3 3 directed\n1 2\n2 3\n3 1\n").unwrap();

    let ours = dir.path().join("ours.qubo");
    let o = qubo(&["hc-build", s(&graph), "--out", s(&ours)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(stdout(&o), "n=4\n");
    assert!(fs::read_to_string(&ours).unwrap().starts_with("qubo 4 0 "));

    let lucas = dir.path().join("lucas.qubo");
    let o = qubo(&["hc-build", s(&graph), "--out", s(&lucas), "--baseline", "lucas"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "n=9\n");
    assert!(fs::read_to_string(&lucas).unwrap().starts_with("qubo 9 6 "));
}

#[test]
fn undirected_edges_expand_both_ways() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("tri.hc");
    fs::write(&graph, "p hc 3 3 undirected\n1 2\n2 3\n1 3\n").unwrap();
    let out = dir.path().join("tri.qubo");
    let o = qubo(&["hc-build", s(&graph), "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(stdout(&o), "n=8\n");
}

#[test]
fn solve_and_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = dir.path().join("f.cnf");
    let matrix = dir.path().join("f.qubo");
    let sol = dir.path().join("f.sol");
    fs::write(&cnf, "p cnf 3 2\n1 -2 0\n2 3 0\n").unwrap();
    assert_eq!(code(&qubo(&["sat-build", s(&cnf), "--out", s(&matrix)])), 0);

    let o = qubo(&["solve", s(&matrix), "--method", "exhaustive", "--out", s(&sol)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report = stdout(&o);
    assert!(report.contains("method exhaustive\n"), "{report}");
    assert!(report.contains("energy 0\n"), "{report}");
    assert!(report.contains("evaluations 8\n"), "{report}");
    assert_eq!(fs::read_to_string(&sol).unwrap(), "001\n");

    let o = qubo(&["verify", s(&matrix), s(&sol), s(&cnf)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(stdout(&o), "n 3\nenergy 0\nmodel valid\n");
}

#[test]
fn verify_rejects_a_tampered_solution() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.hc");
    let matrix = dir.path().join("g.qubo");
    let sol = dir.path().join("g.sol");
    fs::write(&graph, "p hc 3 3 directed\n1 2\n2 3\n3 1\n").unwrap();
    assert_eq!(code(&qubo(&["hc-build", s(&graph), "--out", s(&matrix)])), 0);

    let o = qubo(&["solve", s(&matrix), "--out", s(&sol)]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("energy -12\n"));
    let o = qubo(&["verify", s(&matrix), s(&sol), s(&graph)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(stdout(&o), "n 4\nenergy -12\ncycle valid\n");

    let bits = fs::read_to_string(&sol).unwrap();
    let flipped = match &bits[0..1] {
        "0" => format!("1{}", &bits[1..]),
        _ => format!("0{}", &bits[1..]),
    };
    fs::write(&sol, flipped).unwrap();
    let o = qubo(&["verify", s(&matrix), s(&sol), s(&graph)]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    assert!(stderr(&o).starts_with("error:"), "{}", stderr(&o));
}

#[test]
fn annealing_solves_the_ring_and_stays_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.hc");
    let matrix = dir.path().join("g.qubo");
    fs::write(&graph, "p hc 3 3 directed\n1 2\n2 3\n3 1\n").unwrap();
    assert_eq!(code(&qubo(&["hc-build", s(&graph), "--out", s(&matrix)])), 0);

    let args = ["solve", s(&matrix), "--method", "sa", "--seed", "7", "--sweeps", "50", "--restarts", "3"];
    let first = qubo(&args);
    let second = qubo(&args);
    assert_eq!(code(&first), 0, "{}", stderr(&first));
    let report = stdout(&first);
    assert_eq!(report, stdout(&second));
    assert!(report.contains("method sa\n"), "{report}");
    assert!(report.contains("energy -12\n"), "{report}");
    assert!(report.contains("seed 7\n"), "{report}");
}

#[test]
fn malformed_inputs_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.qubo");

    let bad_cnf = dir.path().join("bad.cnf");
    fs::write(&bad_cnf, "p cnf x 1\n1 0\n").unwrap();
    let o = qubo(&["sat-build", s(&bad_cnf), "--out", s(&out)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 1"), "{}", stderr(&o));

    let empty_cnf = dir.path().join("empty.cnf");
    fs::write(&empty_cnf, "p cnf 2 0\n").unwrap();
    let o = qubo(&["sat-build", s(&empty_cnf), "--out", s(&out)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("no clauses"), "{}", stderr(&o));

    let lower = dir.path().join("lower.qubo");
    fs::write(&lower, "qubo 2 0 1\n1 0 5\nvar 0 p:x1\nvar 1 p:x2\n").unwrap();
    let o = qubo(&["solve", s(&lower)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("j < i"), "{}", stderr(&o));

    let loops = dir.path().join("loop.hc");
    fs::write(&loops, "p hc 3 1 directed\n2 2\n").unwrap();
    let o = qubo(&["hc-build", s(&loops), "--out", s(&out)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("self-loop"), "{}", stderr(&o));
}

#[test]
fn exhaustive_capacity_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let wide = dir.path().join("wide.qubo");
    let mut text = String::from("qubo 26 0 0\n");
    for i in 0..26 {
        text.push_str(&format!("var {i} p:x{}\n", i + 1));
    }
    fs::write(&wide, text).unwrap();
    let o = qubo(&["solve", s(&wide), "--method", "exhaustive"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stderr(&o).contains("annealing"), "{}", stderr(&o));
}

#[test]
fn generators_are_seed_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.cnf");
    let b = dir.path().join("b.cnf");
    for p in [&a, &b] {
        let o = qubo(&["gen-sat", "--vars", "6", "--clauses", "4", "--k", "3", "--seed", "7", "--out", s(p)]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        assert_eq!(stdout(&o), "");
    }
    assert_eq!(fs::read_to_string(&a).unwrap(), fs::read_to_string(&b).unwrap());

    let ga = dir.path().join("a.hc");
    let gb = dir.path().join("b.hc");
    for p in [&ga, &gb] {
        let o = qubo(&["gen-graph", "--vertices", "6", "--edges", "12", "--directed", "--seed", "11", "--out", s(p)]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    let text = fs::read_to_string(&ga).unwrap();
    assert_eq!(text, fs::read_to_string(&gb).unwrap());
    assert!(text.starts_with("p hc 6 12 directed\n"), "{text}");
}

#[test]
fn generated_instances_flow_through_the_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = dir.path().join("r.cnf");
    let matrix = dir.path().join("r.qubo");
    let sol = dir.path().join("r.sol");
    let o = qubo(&["gen-sat", "--vars", "6", "--clauses", "4", "--k", "3", "--seed", "7", "--out", s(&cnf)]);
    assert_eq!(code(&o), 0);
    let o = qubo(&["sat-build", s(&cnf), "--out", s(&matrix)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(stdout(&o), "n=10 predicted=10\n");
    assert_eq!(code(&qubo(&["solve", s(&matrix), "--out", s(&sol)])), 0);
    assert_eq!(code(&qubo(&["verify", s(&matrix), s(&sol), s(&cnf)])), 0);

    let graph = dir.path().join("r.hc");
    let gm = dir.path().join("rg.qubo");
    let gs = dir.path().join("rg.sol");
    let o = qubo(&["gen-graph", "--vertices", "5", "--edges", "9", "--seed", "3", "--out", s(&graph)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(code(&qubo(&["hc-build", s(&graph), "--out", s(&gm)])), 0);
    let o = qubo(&["solve", s(&gm), "--out", s(&gs)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("energy -30\n"), "{}", stdout(&o));
    let o = qubo(&["verify", s(&gm), s(&gs), s(&graph)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn scaling_emits_the_figure_rows() {
    let dir = tempfile::tempdir().unwrap();

    let fig1 = dir.path().join("fig1.csv");
    let o = qubo(&["scaling", "--figure", "1", "--out", s(&fig1)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(&fig1).unwrap();
    assert!(text.starts_with("k,chancellor,ours\n2,2,0\n"), "{text}");
    assert!(text.contains("\n8,8,8\n"), "{text}");
    assert!(text.contains("\n16,16,9\n"), "{text}");
    assert_eq!(text.lines().count(), 64, "{text}");

    let fig2 = dir.path().join("fig2.csv");
    let o = qubo(&["scaling", "--figure", "2", "--out", s(&fig2)]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(&fig2).unwrap();
    assert!(text.starts_with("N,lucas,ours\n"), "{text}");
    assert!(text.contains("\n10,100,306\n"), "{text}");
    assert_eq!(text.lines().count(), 37);

    let fig3 = dir.path().join("fig3.csv");
    let o = qubo(&["scaling", "--figure", "3", "--min", "5", "--max", "32", "--out", s(&fig3)]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(&fig3).unwrap();
    assert!(text.contains("\n19,361,348\n"), "{text}");
    assert!(text.contains("\n32,1024,728\n"), "{text}");

    let again = dir.path().join("fig3b.csv");
    let o = qubo(&["scaling", "--figure", "3", "--min", "5", "--max", "32", "--out", s(&again)]);
    assert_eq!(code(&o), 0);
    assert_eq!(text, fs::read_to_string(&again).unwrap());

    let o = qubo(&["scaling", "--figure", "4", "--out", s(&fig1)]);
    assert_eq!(code(&o), 2);
}
