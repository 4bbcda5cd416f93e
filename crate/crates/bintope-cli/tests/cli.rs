use std::path::Path;
use std::process::{Command, Output};

fn bintope() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bintope"))
}

fn run(args: &[&str]) -> Output {
    bintope()
        .args(args)
        .env_remove("BINTOPE_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    assert!(
        output.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    String::from_utf8(output.stdout.clone()).expect("stdout is utf8")
}

fn write_superpotential(dir: &Path, m: usize, k: usize) -> std::path::PathBuf {
    let path = dir.join(format!("w{m}{k}.json"));
    let out = run(&["mspace", &m.to_string(), &k.to_string()]);
    std::fs::write(&path, stdout(&out)).expect("system file written");
    path
}

#[test]
fn snf_reports_rank_divisors_and_transforms() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("m.txt");
    std::fs::write(&path, "2 3\n2 4 4\n-6 6 12\n").expect("matrix written");

    let out = stdout(&run(&["snf", path.to_str().unwrap()]));
    assert!(out.starts_with("rank: 2\ndivisors: "), "got: {out}");
    assert!(out.contains("P:\n2 2\n"), "got: {out}");
    assert!(out.contains("Q:\n3 3\n"), "got: {out}");

    let chained = stdout(&run(&["snf", path.to_str().unwrap(), "--divisor-chain"]));
    assert!(chained.contains("divisors: 2 6"), "got: {chained}");
}

#[test]
fn analyze_reports_dimension_and_components() {
    let dir = tempfile::tempdir().expect("tempdir");
    let system = write_superpotential(dir.path(), 1, 2);

    let out = stdout(&run(&["analyze", system.to_str().unwrap()]));
    assert_eq!(out, "dimension: 4\ncomponents: 1\ndivisors: 1 1\n");
}

#[test]
fn degree_counts_and_writes_cells() {
    let dir = tempfile::tempdir().expect("tempdir");
    let system = write_superpotential(dir.path(), 1, 2);
    let cells = dir.path().join("cells.json");

    let out = stdout(&run(&[
        "degree",
        system.to_str().unwrap(),
        "--seed",
        "7",
        "--cells",
        cells.to_str().unwrap(),
    ]));
    assert_eq!(out, "degree: 2\n");

    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&cells).expect("cells file"))
            .expect("cells json");
    assert_eq!(doc["seed"], serde_json::json!(7));
    let cell_list = doc["cells"].as_array().expect("cells array");
    let total: u64 = cell_list
        .iter()
        .map(|c| c["nvol"].as_u64().expect("nvol is a number"))
        .sum();
    assert_eq!(total, 2);
    for cell in cell_list {
        assert!(cell["indices"].as_array().is_some());
        assert!(cell["normal"].as_array().is_some());
    }
}

#[test]
fn degree_output_is_reproducible_for_a_fixed_seed() {
    let dir = tempfile::tempdir().expect("tempdir");
    let system = write_superpotential(dir.path(), 2, 2);
    let args = ["degree", system.to_str().unwrap(), "--seed", "11"];

    let first = run(&args);
    let second = run(&args);
    assert_eq!(stdout(&first), "degree: 14\n");
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn witness_emits_complete_point_set_as_json() {
    let dir = tempfile::tempdir().expect("tempdir");
    let system = write_superpotential(dir.path(), 1, 2);

    let out = stdout(&run(&["witness", system.to_str().unwrap(), "--seed", "5"]));
    let doc: serde_json::Value = serde_json::from_str(&out).expect("witness json");
    assert_eq!(doc["expected"], serde_json::json!(2));
    assert_eq!(doc["complete"], serde_json::json!(true));
    let points = doc["points"].as_array().expect("points array");
    assert_eq!(points.len(), 2);
    for point in points {
        let residual = point["residual"].as_f64().expect("residual");
        assert!(residual < 1e-6, "residual {residual}");
    }
}

#[test]
fn seed_flag_overrides_environment_seed() {
    let dir = tempfile::tempdir().expect("tempdir");
    let system = write_superpotential(dir.path(), 1, 2);
    let path = system.to_str().unwrap();

    let env_only = bintope()
        .args(["degree", path])
        .env("BINTOPE_SEED", "7")
        .output()
        .expect("binary runs");
    let flag_only = run(&["degree", path, "--seed", "7"]);
    let flag_wins = bintope()
        .args(["degree", path, "--seed", "7"])
        .env("BINTOPE_SEED", "99")
        .output()
        .expect("binary runs");

    assert_eq!(env_only.stdout, flag_only.stdout);
    assert_eq!(flag_only.stdout, flag_wins.stdout);

    let invalid = bintope()
        .args(["degree", path])
        .env("BINTOPE_SEED", "not-a-number")
        .output()
        .expect("binary runs");
    assert_eq!(invalid.status.code(), Some(4));
}

#[test]
fn inconsistent_system_exits_with_code_two() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("inconsistent.json");
    std::fs::write(
        &path,
        r#"{"n": 1, "equations": [{"exponents": [0], "rhs": 2.0}]}"#,
    )
    .expect("system written");

    for sub in ["analyze", "degree", "witness"] {
        let out = run(&[sub, path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "subcommand {sub}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("inconsistent"));
    }
}

#[test]
fn unreadable_or_malformed_input_exits_with_code_four() {
    let missing = run(&["analyze", "/definitely/not/here.json"]);
    assert_eq!(missing.status.code(), Some(4));

    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("garbage.json");
    std::fs::write(&path, "{ not json").expect("file written");
    let malformed = run(&["degree", path.to_str().unwrap()]);
    assert_eq!(malformed.status.code(), Some(4));

    let bad_matrix = dir.path().join("bad.txt");
    std::fs::write(&bad_matrix, "2 2\n1 2\n3\n").expect("file written");
    let short_row = run(&["snf", bad_matrix.to_str().unwrap()]);
    assert_eq!(short_row.status.code(), Some(4));

    let degenerate = run(&["mspace", "1", "1"]);
    assert_eq!(degenerate.status.code(), Some(4));
}

#[test]
fn bench_emits_csv_rows_up_to_the_requested_size() {
    let out = stdout(&run(&[
        "bench", "--max", "2", "--budget", "60", "--seed", "3",
    ]));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "m,k,dim,components,degree,is_lower_bound,time_s,lps");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("1,2,4,1,2,false,"), "got: {}", lines[1]);
    assert!(lines[2].starts_with("2,2,6,1,14,false,"), "got: {}", lines[2]);
}
