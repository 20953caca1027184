use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use refrou::{ref_lu_factorize, solve, IntMatrix, IntVector, UpdateSpec};
use tempfile::TempDir;

const A: &str = "4\n3 8 7 1\n5 3 5 4\n6 -2 1 7\n7 -2 -6 11\n";
const V: &str = "4\n1 5 7 2\n";
const W: &str = "4\n2 6 3 4\n";

struct Dir(TempDir);

impl Dir {
    fn new() -> Self {
        Dir(tempfile::tempdir().unwrap())
    }

    fn file(&self, name: &str, text: &str) -> PathBuf {
        let p = self.0.path().join(name);
        fs::write(&p, text).unwrap();
        p
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.path().join(name)
    }
}

fn refrou(args: &[&dyn AsRef<std::ffi::OsStr>]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_refrou")).args(args.iter().map(|a| a.as_ref())).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn merged_rows(fact: &Path) -> Vec<String> {
    let text = fs::read_to_string(fact).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    let at = lines.iter().position(|l| *l == "merged").unwrap();
    lines[at + 1..at + 1 + (lines.len() - at - 2) / 2].iter().map(|s| s.to_string()).collect()
}

#[test]
fn factor_worked_example() {
    let d = Dir::new();
    let a = d.file("a.txt", A);
    let out = d.path("a.lu");
    let o = refrou(&[&"factor", &a, &"-o", &out]);
    assert_eq!(code(&o), 0);
    let rows = merged_rows(&out);
    assert_eq!(rows.last().unwrap().split_whitespace().last(), Some("-89"));
    assert!(fs::read_to_string(&out).unwrap().contains("det -89"));
}

#[test]
fn factor_identity_and_singular() {
    let d = Dir::new();
    let i = d.file("i.txt", "3\n1 0 0\n0 1 0\n0 0 1\n");
    let o = refrou(&[&"factor", &i]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("merged\n1 0 0\n0 1 0\n0 0 1\n"));
    let s = d.file("s.txt", "3\n1 2 3\n1 2 3\n4 5 6\n");
    assert_eq!(code(&refrou(&[&"factor", &s])), 3);
}

#[test]
fn update_worked_example_and_downdate() {
    let d = Dir::new();
    let (a, v, w) = (d.file("a.txt", A), d.file("v.txt", V), d.file("w.txt", W));
    let (lu, up, down) = (d.path("a.lu"), d.path("up.lu"), d.path("down.lu"));
    assert_eq!(code(&refrou(&[&"factor", &a, &"-o", &lu])), 0);
    let o = refrou(&[&"update", &lu, &v, &w, &"-o", &up]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("sc2_calls 0"));
    assert_eq!(merged_rows(&up).last().unwrap(), "11 -104 -50 -178");
    assert_eq!(code(&refrou(&[&"update", &up, &v, &w, &"--gamma", &"-1", &"-o", &down])), 0);
    assert_eq!(fs::read_to_string(&down).unwrap(), fs::read_to_string(&lu).unwrap());
}

#[test]
fn update_errors() {
    let d = Dir::new();
    let (a, v) = (d.file("a.txt", A), d.file("v.txt", V));
    let lu = d.path("a.lu");
    refrou(&[&"factor", &a, &"-o", &lu]);
    let short = d.file("short.txt", "3\n1 2 3\n");
    assert_eq!(code(&refrou(&[&"update", &lu, &v, &short])), 2);
    let bad = d.file("bad.txt", "4\n1 2 x 4\n");
    assert_eq!(code(&refrou(&[&"update", &lu, &v, &bad])), 2);
    // Subtracting the first column from itself makes A_hat singular.
    let col = d.file("col.txt", "4\n3 5 6 7\n");
    let e1 = d.file("e1.txt", "4\n1 0 0 0\n");
    assert_eq!(code(&refrou(&[&"update", &lu, &col, &e1, &"--gamma", &"-1"])), 3);
    assert_eq!(code(&refrou(&[&"update", &lu, &v, &v, &"--gamma", &"0"])), 3);
}

#[test]
fn replace_column_one_based() {
    let d = Dir::new();
    let a = d.file("a.txt", A);
    let lu = d.path("a.lu");
    refrou(&[&"factor", &a, &"-o", &lu]);
    let col = d.file("c.txt", "4\n1 0 0 0\n");
    let o = refrou(&[&"replace-col", &lu, &"2", &col]);
    assert_eq!(code(&o), 0);
    let mut m = IntMatrix::from_i64(&[&[3, 8, 7, 1], &[5, 3, 5, 4], &[6, -2, 1, 7], &[7, -2, -6, 11]]);
    for i in 0..4 {
        m[(i, 1)] = (i == 0).into();
    }
    assert!(stdout(&o).contains(&format!("original\n{m}")));
    assert_eq!(code(&refrou(&[&"replace-col", &lu, &"0", &col])), 2);
    assert_eq!(code(&refrou(&[&"replace-col", &lu, &"5", &col])), 2);
}

#[test]
fn solve_outputs() {
    let d = Dir::new();
    let a = d.file("a.txt", "2\n3 1\n1 1\n");
    let b = d.file("b.txt", "2\n4 2\n");
    let o = refrou(&[&"solve", &a, &b]);
    assert_eq!((code(&o), stdout(&o)), (0, "1/1, 1/1\n".to_string()));
    let i = d.file("i.txt", "3\n1 0 0\n0 1 0\n0 0 1\n");
    let b3 = d.file("b3.txt", "3\n-4 0 9\n");
    assert_eq!(stdout(&refrou(&[&"solve", &i, &b3])), "-4/1, 0/1, 9/1\n");
    // x = [1/3, 0]: 1/3 to ten digits rounds down, 2/3 rounds up.
    let c = d.file("c.txt", "2\n3 0\n0 3\n");
    let b2 = d.file("b2.txt", "2\n1 2\n");
    assert_eq!(stdout(&refrou(&[&"solve", &c, &b2, &"--digits", &"10"])), "0.3333333333, 0.6666666667\n");
    let o = refrou(&[&"solve", &c, &b2, &"--json"]);
    assert!(stdout(&o).contains("\"det\":\"9\""));
}

#[test]
fn solve_rational_inputs_rescale() {
    let d = Dir::new();
    let a = d.file("a.txt", "2\n1/2 0\n0 1\n");
    let b = d.file("b.txt", "2\n1/3 1\n");
    assert_eq!(stdout(&refrou(&[&"solve", &a, &b])), "2/3, 1/1\n");
}

#[test]
fn solve_singular_and_parse_errors() {
    let d = Dir::new();
    let s = d.file("s.txt", "2\n1 2\n2 4\n");
    let b = d.file("b.txt", "2\n1 1\n");
    assert_eq!(code(&refrou(&[&"solve", &s, &b])), 3);
    let junk = d.file("j.txt", "2\n1 2\n3\n");
    assert_eq!(code(&refrou(&[&"solve", &junk, &b])), 2);
    assert_eq!(code(&refrou(&[&"solve", &d.path("missing.txt"), &b])), 2);
}

#[test]
fn file_chain_matches_in_memory() {
    let d = Dir::new();
    let (a, v, w) = (d.file("a.txt", A), d.file("v.txt", V), d.file("w.txt", W));
    let b = d.file("b.txt", "4\n1 -1 2 3\n");
    let (lu, up) = (d.path("a.lu"), d.path("up.lu"));
    refrou(&[&"factor", &a, &"-o", &lu]);
    refrou(&[&"update", &lu, &v, &w, &"-o", &up]);
    let from_files = stdout(&refrou(&[&"solve", &up, &b]));

    let m = IntMatrix::from_i64(&[&[3, 8, 7, 1], &[5, 3, 5, 4], &[6, -2, 1, 7], &[7, -2, -6, 11]]);
    let spec = UpdateSpec::outer(IntVector::from_i64(&[1, 5, 7, 2]), IntVector::from_i64(&[2, 6, 3, 4])).unwrap();
    let g = refrou::rank_one_update(&ref_lu_factorize(&m).unwrap(), &spec).unwrap();
    let xs = solve(&g, &IntVector::from_i64(&[1, -1, 2, 3])).unwrap().rationals().unwrap();
    let expect: Vec<String> = xs.iter().map(ToString::to_string).collect();
    assert_eq!(from_files, expect.join(", ") + "\n");
}

#[test]
fn cholesky_and_verify() {
    let d = Dir::new();
    let s = d.file("s.txt", "3\n4 2 2\n2 5 3\n2 3 6\n");
    let out = d.path("s.lu");
    assert_eq!(code(&refrou(&[&"cholesky", &s, &"-o", &out])), 0);
    assert!(fs::read_to_string(&out).unwrap().contains("symmetric 1"));
    let o = refrou(&[&"verify", &out]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("ok n=3"));
    let ns = d.file("ns.txt", "2\n1 2\n3 4\n");
    assert_eq!(code(&refrou(&[&"cholesky", &ns])), 3);
    let tampered = fs::read_to_string(&out).unwrap().replacen("merged\n4 2 2", "merged\n4 2 3", 1);
    let t = d.file("t.lu", &tampered);
    assert_eq!(code(&refrou(&[&"verify", &t])), 4);
    let o = refrou(&[&"verify", &"--sizes", &"3,5", &"--trials", &"2", &"--seed", &"11"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

fn strip_times(line: &str) -> String {
    let mut v: serde_json::Value = serde_json::from_str(line).unwrap();
    let obj = v.as_object_mut().unwrap();
    obj.remove("refactor_time");
    obj.remove("rou_time");
    v.to_string()
}

#[test]
fn bench_is_deterministic_modulo_timing() {
    let run = || {
        let o = refrou(&[
            &"bench",
            &"--experiment",
            &"1",
            &"--sizes",
            &"16,32",
            &"--trials",
            &"3",
            &"--seed",
            &"7",
            &"--json",
        ]);
        assert_eq!(code(&o), 0);
        stdout(&o).lines().map(strip_times).collect::<Vec<_>>()
    };
    let first = run();
    assert_eq!(first.len(), 6);
    assert_eq!(first, run());
    assert!(first.iter().all(|l| l.contains("\"oracle_pass\":true")));
}

#[test]
fn bench_experiments_two_and_three() {
    let o = refrou(&[&"bench", &"--experiment", &"2", &"--sizes", &"8", &"--trials", &"2", &"--json"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).lines().all(|l| l.contains("\"sc2_calls\":") && l.contains("\"r\":")));
    let o = refrou(&[&"bench", &"--experiment", &"3", &"--sizes", &"8", &"--trials", &"2"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("ChaCha8"));
}

#[test]
fn usage_errors() {
    assert_eq!(code(&refrou(&[])), 1);
    assert_eq!(code(&refrou(&[&"frobnicate"])), 1);
    assert_eq!(code(&refrou(&[&"bench", &"--experiment", &"4"])), 2);
    assert_eq!(code(&refrou(&[&"--help"])), 0);
}
