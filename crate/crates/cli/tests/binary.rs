//! End-to-end checks of the installed binary: exit codes, stream routing,
//! and independence of the output from the worker-thread count.

use std::process::{Command, Output};

fn pplab(args: &[&str], threads: Option<&str>) -> Output {
    let mut command = Command::new(env!("CARGO_BIN_EXE_pplab"));
    command.args(args);
    match threads {
        Some(threads) => command.env("PPLAB_THREADS", threads),
        None => command.env_remove("PPLAB_THREADS"),
    };
    command.output().expect("binary runs")
}

#[test]
fn version_flag_succeeds() {
    let output = pplab(&["--version"], None);
    assert!(output.status.success());
    assert!(String::from_utf8_lossy(&output.stdout).contains("pplab"));
}

#[test]
fn sweep_output_does_not_depend_on_the_thread_count() {
    let args = ["sweep", "--grid", "7", "--trials", "16", "--n", "200", "--seed", "11"];
    let single = pplab(&args, Some("1"));
    let several = pplab(&args, Some("4"));
    assert!(single.status.success());
    assert!(several.status.success());
    assert!(!single.stdout.is_empty());
    assert_eq!(single.stdout, several.stdout);
}

#[test]
fn bad_arguments_exit_2_and_write_to_stderr() {
    let output = pplab(&["simulate", "--n", "10"], None);
    assert_eq!(output.status.code(), Some(2));
    assert!(output.stdout.is_empty());
    assert!(String::from_utf8_lossy(&output.stderr).contains("--eta"));
}

#[test]
fn unreadable_profile_exits_3() {
    let output = pplab(&["thresholds", "--profile", "/nonexistent/profile.kv"], None);
    assert_eq!(output.status.code(), Some(3));
}

#[test]
fn examples_pass_through_the_binary() {
    let output = pplab(&["example", "--name", "threshold-75"], Some("2"));
    assert_eq!(output.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.ends_with("PASS example threshold-75\n"));
}
