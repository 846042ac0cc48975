use std::path::PathBuf;
use std::process::{Command, Output};

fn dpmin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dpmin")).args(args).env_remove("DPMIN_WORKERS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn acceptance(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs/acceptance")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dpmin-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn padic_least_k() {
    let o = dpmin(&["padic-verify", "--p", "3", "--n", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("derived_k=1"));
}

#[test]
fn ict_absent_on_simple_dlo() {
    let o = dpmin(&["ict-search", "--config", &acceptance("ict_simple_absent.toml")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("absent (exhaustive)"));
}

#[test]
fn empty_delta_counts_one_type() {
    let o = dpmin(&["vc-profile", "--sizes", "2,4"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("simple_dlo,empty,2,1,"));
    assert!(out.contains("simple_dlo,empty,4,1,"));
}

#[test]
fn failed_expectation_exits_one() {
    let o = dpmin(&["vc-profile", "--config", &acceptance("vc_pair.toml"), "--workers", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn config_problems_exit_two() {
    assert_eq!(dpmin(&["ict-search"]).status.code(), Some(2));
    assert_eq!(dpmin(&["hahn-verify", "--config", &acceptance("ict_pair_present.toml")]).status.code(), Some(2));
    assert_eq!(dpmin(&["hahn-verify", "--config", "/nonexistent/dpmin.toml"]).status.code(), Some(2));
    assert_eq!(dpmin(&["vc-profile", "--sizes", "4"]).status.code(), Some(2));
    assert_eq!(dpmin(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn single_formula_qe() {
    let o = dpmin(&["qe", "E x. ((0,0) < x & x < y)"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.contains("eliminated: 0 < (1/2)*y + (-1/2)*f(y)"));
    assert!(out.contains("0 disagreements"));
}

#[test]
fn report_and_replay() {
    let dir = scratch("replay");
    let stem = dir.join("hahn");
    let stem_s = stem.to_string_lossy().into_owned();
    let o = dpmin(&["hahn-verify", "--samples", "30", "--seed", "11", "--out", &stem_s]);
    assert_eq!(o.status.code(), Some(0));
    let report = stem.with_extension("report.toml");
    let r = dpmin(&["replay", &report.to_string_lossy()]);
    assert_eq!(r.status.code(), Some(0));
    assert!(stdout(&r).contains("tables identical"));

    let text = std::fs::read_to_string(&report).unwrap();
    std::fs::write(&report, &text[..text.len() / 3]).unwrap();
    assert_eq!(dpmin(&["replay", &report.to_string_lossy()]).status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}
