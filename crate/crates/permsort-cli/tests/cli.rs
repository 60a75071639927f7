//! End-to-end tests driving the built binary: output contracts, exit
//! codes, certificate round trips, cache behavior, and format shapes.

use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn permsort(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_permsort"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is utf-8")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is utf-8")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("process exits normally")
}

/// Workspace with an isolated cache; commands run inside it so relative
/// output paths stay contained.
struct Ws {
    dir: TempDir,
    cache: String,
}

impl Ws {
    fn new() -> Ws {
        let dir = TempDir::new().expect("tempdir");
        let cache = dir.path().join("cache").display().to_string();
        Ws { dir, cache }
    }

    fn run(&self, args: &[&str]) -> Output {
        let mut full = vec!["--cache-dir", self.cache.as_str()];
        full.extend_from_slice(args);
        permsort(self.dir.path(), &full)
    }
}

#[test]
fn wst_known_values() {
    let ws = Ws::new();

    let out = ws.run(&["wst", "--spec", "Bub", "--n", "4"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("wst(Bub, 4) = 6"), "{}", stdout(&out));
    assert!(stdout(&out).contains("4 3 2 1"));

    let out = ws.run(&["wst", "--spec", "all", "--n", "5"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("wst(all, 5) = 1"));

    let out = ws.run(&["wst", "--spec", "RR", "--n", "4"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("infinite"));

    let out = ws.run(&["wst", "--spec", "Bub", "--n", "4", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("json");
    assert_eq!(v["wst"], 6);
    assert_eq!(v["argmax_count"], 1);
    assert_eq!(v["argmax"][0], "4 3 2 1");

    let out = ws.run(&["wst", "--spec", "RR", "--n", "4", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("json");
    assert!(v["wst"].is_null());
    assert_eq!(v["generated_order"], 8);
    assert_eq!(v["unsortable_count"], 16);
}

#[test]
fn sort_then_verify_round_trip() {
    let ws = Ws::new();

    let out = ws.run(&[
        "sort",
        "--sorter",
        "pbt",
        "--perm",
        "8 7 6 5 4 3 2 1",
        "--out",
        "pbt.txt",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("3 steps"), "{}", stdout(&out));
    let out = ws.run(&["verify", "pbt.txt"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("certificate ok"));

    let out = ws.run(&[
        "sort", "--sorter", "pancake", "--perm", "3 1 2", "--out", "pan.txt",
    ]);
    assert!(stdout(&out).contains("2 steps"));
    assert_eq!(code(&ws.run(&["verify", "pan.txt"])), 0);

    let out = ws.run(&[
        "sort",
        "--optimal",
        "--spec",
        "F",
        "--perm",
        "3 2 1",
        "--out",
        "f.txt",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("3 steps"));
    assert_eq!(code(&ws.run(&["verify", "f.txt"])), 0);

    let out = ws.run(&[
        "sort", "--sorter", "bubble", "--perm", "2 1", "--out", "b.json", "--json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("json");
    assert_eq!(v["steps"], 1);
    assert_eq!(v["class"], "Bub");
}

#[test]
fn tampered_certificates_exit_3() {
    let ws = Ws::new();
    ws.run(&[
        "sort", "--sorter", "bubble", "--perm", "3 2 1", "--out", "ok.txt",
    ]);

    // Swapping the class line leaves the steps outside the declared class.
    let text = std::fs::read_to_string(ws.dir.path().join("ok.txt")).unwrap();
    let swapped = text.replacen("Bub", "inc", 1);
    std::fs::write(ws.dir.path().join("class.txt"), swapped).unwrap();
    let out = ws.run(&["verify", "class.txt"]);
    assert_eq!(code(&out), 3);
    assert!(
        stderr(&out).contains("not a member of inc"),
        "{}",
        stderr(&out)
    );

    // Dropping the last step breaks the product.
    let mut lines: Vec<&str> = text.lines().collect();
    lines.pop();
    std::fs::write(ws.dir.path().join("short.txt"), lines.join("\n")).unwrap();
    let out = ws.run(&["verify", "short.txt"]);
    assert_eq!(code(&out), 3);
    assert!(
        stderr(&out).contains("not at the identity"),
        "{}",
        stderr(&out)
    );
}

#[test]
fn exit_code_contract() {
    let ws = Ws::new();

    let out = ws.run(&["sort", "--sorter", "zigzag", "--perm", "1 2"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("unknown sorter"));

    let out = ws.run(&["wst", "--spec", "Bub", "--n", "12"]);
    assert_eq!(code(&out), 2);

    let out = ws.run(&["enumerate", "--spec", "all", "--n", "11", "--count"]);
    assert_eq!(code(&out), 2);

    let out = ws.run(&["wst", "--spec", "Av(", "--n", "4"]);
    assert_eq!(code(&out), 1);

    // Missing required arguments are usage errors, not the library default.
    let out = ws.run(&["wst", "--spec", "Bub"]);
    assert_eq!(code(&out), 1);

    assert_eq!(code(&ws.run(&["--help"])), 0);
    assert_eq!(code(&ws.run(&["--version"])), 0);
}

#[test]
fn cache_round_trip_is_byte_identical() {
    let ws = Ws::new();
    let args = ["wst", "--spec", "Ins", "--n", "5"];

    let cold = ws.run(&args);
    assert!(
        stderr(&cold).contains("cache: miss table Ins n=5"),
        "{}",
        stderr(&cold)
    );
    assert!(stderr(&cold).contains("cache: wrote"));

    let warm = ws.run(&args);
    assert!(
        stderr(&warm).contains("cache: hit table Ins n=5"),
        "{}",
        stderr(&warm)
    );
    assert_eq!(cold.stdout, warm.stdout);

    // Deleting the cache and recomputing changes nothing on stdout.
    std::fs::remove_dir_all(&ws.cache).unwrap();
    let rebuilt = ws.run(&args);
    assert!(stderr(&rebuilt).contains("cache: miss"));
    assert_eq!(cold.stdout, rebuilt.stdout);

    // A corrupted entry is discarded and recomputed, not trusted.
    let entry = std::fs::read_dir(&ws.cache)
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| p.extension().is_some_and(|x| x == "pswb"))
        .expect("table entry exists");
    std::fs::write(&entry, b"PSWB1 garbage").unwrap();
    let healed = ws.run(&args);
    assert!(
        stderr(&healed).contains("discarding corrupt"),
        "{}",
        stderr(&healed)
    );
    assert_eq!(cold.stdout, healed.stdout);
}

/// Strips the trailing runtime_ms column, the one sanctioned
/// run-dependent field.
fn without_runtime(csv: &str) -> String {
    csv.lines()
        .map(|l| match l.rsplit_once(',') {
            Some((head, _)) => head.to_string(),
            None => l.to_string(),
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn scan_emits_expected_csv() {
    let ws = Ws::new();

    let out = ws.run(&["scan", "Bub", "3..7"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "spec,n,wst,level_size,rin_of_class,counting_lower_bound,runtime_ms"
    );
    let wst_column: Vec<&str> = lines[1..]
        .iter()
        .map(|l| l.split(',').nth(2).unwrap())
        .collect();
    assert_eq!(wst_column, ["3", "6", "10", "15", "21"]);

    let out = ws.run(&["scan", "Ins", "3..7"]);
    let text = stdout(&out);
    let wst_column: Vec<&str> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap())
        .collect();
    assert_eq!(wst_column, ["2", "3", "4", "5", "6"]);

    // Second run answers from the cache; only runtimes may differ.
    let again = ws.run(&["scan", "Ins", "3..7"]);
    assert!(stderr(&again).contains("cache: hit"));
    assert_eq!(without_runtime(&text), without_runtime(&stdout(&again)));

    // A spec whose canonical form contains a comma gets quoted.
    let out = ws.run(&["scan", "Av(321,3412)", "3..4"]);
    let text = stdout(&out);
    assert!(
        text.lines()
            .nth(1)
            .unwrap()
            .starts_with("\"Av(321,3412)\","),
        "{text}"
    );
}

#[test]
fn classify_json_shape_and_caching() {
    let ws = Ws::new();
    let args = ["classify", "--spec", "Av(231,312)", "--json"];

    let cold = ws.run(&args);
    assert_eq!(code(&cold), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&cold)).expect("json");
    assert_eq!(v["band"], "polylog");
    assert_eq!(v["confidence"], "exact");
    assert!(v["evidence"].as_array().is_some_and(|a| !a.is_empty()));

    let warm = ws.run(&args);
    assert!(
        stderr(&warm).contains("cache: hit verdict"),
        "{}",
        stderr(&warm)
    );
    assert_eq!(cold.stdout, warm.stdout);

    let plain = ws.run(&["classify", "--spec", "Av(231,312)"]);
    assert!(stdout(&plain).contains("band: polylog"));
    assert!(stdout(&plain).contains("confidence: exact"));
}

#[test]
fn enumerate_lists_and_counts() {
    let ws = Ws::new();

    let out = ws.run(&["enumerate", "--spec", "F", "--n", "4"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).lines().count(), 5);

    let out = ws.run(&["enumerate", "--spec", "F", "--n", "4", "--count"]);
    assert_eq!(stdout(&out).trim(), "5");

    let out = ws.run(&["enumerate", "--spec", "F", "--n", "4", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("json");
    assert_eq!(v["count"], 5);
    assert_eq!(v["members"].as_array().unwrap().len(), 5);
}

#[test]
fn rin_and_member_answers() {
    let ws = Ws::new();

    let out = ws.run(&["rin", "--perm", "2 4 1 3"]);
    assert_eq!(stdout(&out).trim(), "1");

    let out = ws.run(&["rin", "--spec", "T", "--n", "5", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("json");
    assert_eq!(v["rin_of_class"], 1);

    let out = ws.run(&["member", "--spec", "L", "--perm", "2 1 4 3"]);
    assert_eq!(stdout(&out).trim(), "true");
    let out = ws.run(&["member", "--spec", "L", "--perm", "2 4 1 3"]);
    assert_eq!(stdout(&out).trim(), "false");
}

#[test]
fn diagram_exports() {
    let ws = Ws::new();

    let out = ws.run(&["diagram", "adjacency", "--perm", "2 4 1 3"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("graph {"));
    assert!(stdout(&out).contains(" -- "));

    let out = ws.run(&[
        "diagram",
        "sorting",
        "--steps",
        "2413;3214;3412",
        "--out",
        "sd.dot",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("vertices: 28"));
    assert!(stdout(&out).contains("crossings: 10"));
    assert!(stdout(&out).contains("composition: 4 2 1 3"));
    let dot = std::fs::read_to_string(ws.dir.path().join("sd.dot")).unwrap();
    assert!(dot.starts_with("graph {"));

    // Same seed, same diagram; a different seed diverges.
    let a = ws.run(&["diagram", "sorting", "--random", "3,5", "--seed", "7"]);
    let b = ws.run(&["diagram", "sorting", "--random", "3,5", "--seed", "7"]);
    let c = ws.run(&["diagram", "sorting", "--random", "3,5", "--seed", "8"]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);

    let out = ws.run(&["diagram", "sorting", "--random", "2,4", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("json");
    assert_eq!(v["n"], 4);
    assert_eq!(v["t"], 2);
    assert!(v["edges"].as_array().is_some());
}
