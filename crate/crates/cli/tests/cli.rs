use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prockit")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn hidden_protocol_is_branching_equivalent_to_one_place_buffer() {
    let o = run(&["check", "branching", &data("abp_hidden.lts"), &data("buffer1.lts")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("RESULT: branching true\n"), "{out}");
    assert!(out.contains("verified"), "{out}");
}

#[test]
fn split_and_split_like_differ_strongly_with_confirmed_formula() {
    let o = run(&["check", "bisim", &data("split.lts"), &data("splitlike.lts")]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.starts_with("RESULT: bisim false\n"), "{out}");
    assert!(out.lines().any(|l| l.starts_with("distinguisher: <") && l.ends_with(", confirmed")), "{out}");
}

#[test]
fn split_and_split_like_share_traces() {
    let o = run(&["check", "trace", &data("split.lts"), &data("splitlike.lts")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("RESULT: trace true"));
}

#[test]
fn trace_distinguisher_is_confirmed() {
    let o = run(&["check", "trace", &data("counter3.lts"), &data("buffer1.lts")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains(", confirmed"));
}

#[test]
fn unbounded_unfolding_exhausts_budget() {
    let o = run(&["lts", "--spec", &data("counter_unbounded.spec"), "--bound", "10"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(!o.stdout.is_empty());
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["check", "nonsense", "a", "b"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["lts", "--expr", "a", "--bound", "0"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn parse_errors_exit_three() {
    let o = run(&["lts", "--expr", "a . . b"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!o.stderr.is_empty());
}

#[test]
fn output_is_deterministic() {
    for args in [
        vec!["demo", "abp"],
        vec!["lts", "--expr", "(a + b) || c . d"],
        vec!["minimize", "--relation", "branching", "ABP"],
    ] {
        let args: Vec<String> =
            args.iter().map(|a| if *a == "ABP" { data("abp_hidden.lts") } else { a.to_string() }).collect();
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let first = run(&args);
        let second = run(&args);
        assert_eq!(first.status.code(), Some(0), "{args:?}");
        assert_eq!(first.stdout, second.stdout, "{args:?}");
    }
}

#[test]
fn parse_round_trips_lts_files() {
    let o = run(&["parse", &data("buffer2.lts")]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(data("buffer2.lts")).unwrap();
    assert_eq!(stdout(&o), text);
}

#[test]
fn demos_succeed() {
    for d in ["abp", "buffers", "scheduler"] {
        let o = run(&["demo", d]);
        assert_eq!(o.status.code(), Some(0), "{d}");
        assert!(!stdout(&o).contains(" false"), "{d}");
    }
}

#[test]
fn model_prints_catalogued_buffer() {
    let o = run(&["model", "buffer", "l=2", "D=0,1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("lts "));
    assert_eq!(run(&["model", "no_such_model"]).status.code(), Some(2));
}

#[test]
fn compose_hide_and_minimize() {
    let o = run(&["compose", "hide", &data("abp_channel_l.lts"), "--set", "{i}"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("tau"));
    let o = run(&["minimize", "--relation", "strong", &data("counter3.lts")]);
    assert_eq!(o.status.code(), Some(0));
}
