use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_size-ramsey"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn field<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|rest| rest.strip_prefix(' ')))
        .unwrap_or_else(|| panic!("no `{key}` in\n{text}"))
}

fn path_power_file(dir: &Path, n: usize, k: usize) -> String {
    let mut text = String::new();
    for i in 0..n {
        for j in i + 1..n.min(i + k + 1) {
            text.push_str(&format!("{i} {j}\n"));
        }
    }
    let path = dir.join("host.txt");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn plane_documents() {
    let out = run(&["plane", "--q", "3"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["points"].as_array().unwrap().len(), 9);
    assert_eq!(doc["lines"].as_array().unwrap().len(), 12);
    assert_eq!(doc["classes"].as_array().unwrap().len(), 4);

    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("plane.json");
    let out = run(&["plane", "--q", "4", "--out", file.to_str().unwrap()]);
    let summary = stdout(&out);
    assert_eq!(field(&summary, "points"), "16");
    assert_eq!(field(&summary, "lines"), "20");
    assert_eq!(field(&summary, "classes"), "5");
    assert_eq!(field(&summary, "axioms"), "ok");
    assert!(file.exists());
}

#[test]
fn non_prime_power_is_an_input_error() {
    let out = run(&["plane", "--q", "6"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("prime power"));
}

#[test]
fn path_power_bound() {
    let out = stdout(&run(&["bounds", "--r", "4", "--n", "10000", "--k", "2"]));
    let n = 10000.0;
    let want = 4.0 * (2.0 * n - 3.0);
    assert!((field(&out, "lower_bound").parse::<f64>().unwrap() - want).abs() < 1e-6);

    let out = stdout(&run(&[
        "bounds", "--r", "4", "--n", "10000", "--k", "2", "--C", "5",
    ]));
    assert!((field(&out, "lower_bound").parse::<f64>().unwrap() - (want - 500.0)).abs() < 1e-6);
}

#[test]
fn three_colors_bound_warns() {
    let out = run(&["bounds", "--r", "3", "--n", "100", "--d", "2"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("r >= 4"));
    assert_eq!(field(&stdout(&out), "lower_bound"), "100.000000");
}

#[test]
fn optimize_three_colors_flags_printed_degree() {
    let out = stdout(&run(&["optimize", "--r", "3"]));
    let cd: f64 = field(&out, "cd_star").parse().unwrap();
    assert!((763.5..764.1).contains(&cd));
    assert!(out.contains("d=82.1405: g=+0.46"));
    assert!(out.contains("g > 0, infeasible"));
    assert!(out.contains("c*d=681.10"));
    assert!(out.contains("d=92.1405"));
    assert!(out.contains("(~0)"));
    assert_eq!(field(&out, "integer_degree"), "93");
}

#[test]
fn optimize_trace_file() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.txt");
    let out = run(&["optimize", "--r", "4", "--trace", trace.to_str().unwrap()]);
    assert!(out.status.success());
    let text = fs::read_to_string(trace).unwrap();
    assert!(text.starts_with("iteration lo hi c cd\n"));
    assert!(text.lines().count() > 10);
}

#[test]
fn sample_is_reproducible_and_regular() {
    let a = run(&[
        "sample",
        "--side-size",
        "30",
        "--degree",
        "2",
        "--seed",
        "9",
    ]);
    let b = run(&[
        "sample",
        "--side-size",
        "30",
        "--degree",
        "2",
        "--seed",
        "9",
    ]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let edges: Vec<(usize, usize)> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            let mut w = l.split_whitespace().map(|x| x.parse::<usize>().unwrap());
            (w.next().unwrap(), w.next().unwrap())
        })
        .collect();
    assert_eq!(edges.len(), 60);
    let mut deg = vec![0; 60];
    for (u, v) in edges {
        deg[u] += 1;
        deg[v] += 1;
    }
    assert!(deg.iter().all(|&x| x == 2));
}

#[test]
fn degree_one_sample_is_a_perfect_matching() {
    let text = stdout(&run(&[
        "sample",
        "--side-size",
        "7",
        "--degree",
        "1",
        "--seed",
        "3",
    ]));
    let edges: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(edges.len(), 7);
    assert!(text.contains("# bipartition 7 7"));
}

#[test]
fn hopeless_simple_sampling_is_infeasible() {
    let out = run(&[
        "sample",
        "--side-size",
        "40",
        "--degree",
        "30",
        "--max-attempts",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn expand_empty_graph_fails_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("empty.txt");
    fs::write(&g, "# bipartition 4 4\n").unwrap();
    let out = run(&["expand", "--graph", g.to_str().unwrap(), "--s", "2"]);
    assert_eq!(out.status.code(), Some(4));
    let text = stdout(&out);
    assert!(text.contains("verdict FAIL"));
    assert_eq!(field(&text, "S").split_whitespace().count(), 2);
    assert_eq!(field(&text, "T").split_whitespace().count(), 2);
}

#[test]
fn sample_then_expand_at_optimizer_constants() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.txt");
    let out = run(&[
        "sample",
        "--side-size",
        "133",
        "--degree",
        "93",
        "--multigraph",
        "--seed",
        "4",
        "--out",
        g.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let out = run(&[
        "expand",
        "--graph",
        g.to_str().unwrap(),
        "--c",
        "8.2919",
        "--mode",
        "sampled",
        "--samples",
        "2000",
        "--seed",
        "1",
    ]);
    assert!(out.status.success(), "{}", stdout(&out));
    let text = stdout(&out);
    assert_eq!(field(&text, "s"), "9");
    assert!(text.contains("verdict NO_VIOLATION_FOUND"));
}

#[test]
fn arrow_oracle_small_cases() {
    let k4 = stdout(&run(&[
        "arrow-oracle",
        "--complete",
        "4",
        "--path-vertices",
        "3",
    ]));
    assert_eq!(field(&k4, "arrows"), "true");
    let p3 = stdout(&run(&[
        "arrow-oracle",
        "--path",
        "3",
        "--path-vertices",
        "3",
    ]));
    assert_eq!(field(&p3, "arrows"), "false");
}

#[test]
fn color_certifies_path_power_and_replays() {
    let dir = tempfile::tempdir().unwrap();
    let host = path_power_file(dir.path(), 2000, 2);
    let outdir = dir.path().join("cert");
    let args = [
        "color",
        "--graph",
        &host,
        "--r",
        "4",
        "--d",
        "3.99",
        "--C",
        "10",
        "--trials",
        "100",
        "--seed",
        "7",
        "--out-dir",
        outdir.to_str().unwrap(),
    ];
    let out = run(&args);
    assert!(out.status.success(), "{}", stdout(&out));
    let text = stdout(&out);
    assert_eq!(field(&text, "verdict"), "CERTIFIED");
    assert_eq!(field(&text, "confinement"), "ok");
    let max: f64 = field(&text, "max_line_count").parse().unwrap();
    let threshold: f64 = field(&text, "threshold").parse().unwrap();
    assert!(max < threshold);
    let csv = fs::read_to_string(outdir.join("line_counts.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 6);
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",true")));

    // byte-identical rerun
    assert_eq!(run(&args).stdout, out.stdout);

    let coloring = outdir.join("coloring.txt");
    let replay = |file: &Path| {
        run(&[
            "color",
            "--replay",
            file.to_str().unwrap(),
            "--r",
            "4",
            "--d",
            "3.99",
            "--C",
            "10",
        ])
    };
    let ok = replay(&coloring);
    assert!(ok.status.success(), "{}", stdout(&ok));
    assert_eq!(field(&stdout(&ok), "verdict"), "VERIFIED");

    // recolor every edge of one color into the next: components spill across lines
    let text = fs::read_to_string(&coloring).unwrap();
    let corrupted: String = text
        .lines()
        .map(|l| match l.strip_prefix("edge ") {
            Some(rest) if rest.ends_with(" 2") => format!("edge {}3", &rest[..rest.len() - 1]),
            _ => l.to_string(),
        })
        .map(|l| l + "\n")
        .collect();
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, corrupted).unwrap();
    let out = replay(&bad);
    assert_eq!(out.status.code(), Some(4));
    let text = stdout(&out);
    assert_eq!(field(&text, "verdict"), "FAIL");
    assert_eq!(field(&text, "confinement"), "FAIL");
}

#[test]
fn color_empty_graph_is_trivially_certified() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("empty.txt");
    fs::write(&g, "# bipartition 5 5\n").unwrap();
    let out = run(&[
        "color",
        "--graph",
        g.to_str().unwrap(),
        "--r",
        "4",
        "--d",
        "2",
        "--trials",
        "1",
    ]);
    assert!(out.status.success(), "{}", stdout(&out));
    assert_eq!(field(&stdout(&out), "max_line_count"), "0");
}

#[test]
fn color_rejects_three_colors_and_exhausts_on_dense_hosts() {
    let dir = tempfile::tempdir().unwrap();
    let host = path_power_file(dir.path(), 40, 39);
    let out = run(&["color", "--graph", &host, "--r", "3", "--d", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&[
        "color", "--graph", &host, "--r", "4", "--d", "0.5", "--beta", "0.9", "--trials", "20",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(field(&stdout(&out), "verdict"), "NO_CERTIFICATE");
}

#[test]
fn g_surface_and_convergence_tables() {
    let out = stdout(&run(&[
        "g-surface",
        "--c-min",
        "3",
        "--c-max",
        "9",
        "--d-min",
        "80",
        "--d-max",
        "100",
        "--steps",
        "6",
    ]));
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("c,d,g,cd,valid"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 49);
    assert!(rows
        .iter()
        .filter(|r| r.starts_with("3,"))
        .all(|r| r.ends_with(",false")));

    let out = stdout(&run(&[
        "moment-converge",
        "--c",
        "8.2919",
        "--d",
        "92.1405",
        "--n",
        "1000,10000",
    ]));
    assert_eq!(out.lines().count(), 3);
    assert!(out.starts_with("n,exact_log_moment,g,scaled_gap\n"));
}
