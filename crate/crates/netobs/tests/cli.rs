//! End-to-end runs of the compiled binary: outputs, formats, exit codes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn netobs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netobs"))
        .args(args)
        .env_remove("OBS_SEED")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "expected success, stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn write_path4(dir: &Path) -> String {
    let path = dir.join("p4.edges");
    fs::write(&path, "0 1\n1 2\n2 3\n").unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn generate_ba_density_writes_graph_and_sidecar() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("ba.edges");
    let run = netobs(&[
        "generate", "--family", "ba", "--n", "250", "--density", "0.016",
        "--seed", "7", "--out", out.to_str().unwrap(),
    ]);
    assert!(run.status.success());

    let body = fs::read_to_string(&out).unwrap();
    let edge_lines = body.lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(edge_lines, 496, "m=2 attachment gives m(n-m) edges");

    let sidecar: Value =
        serde_json::from_str(&fs::read_to_string(format!("{}.json", out.display())).unwrap())
            .unwrap();
    assert_eq!(sidecar["config"]["family"], "ba");
    assert_eq!(sidecar["config"]["m"], 2);
    assert_eq!(sidecar["result"]["edges"], 496);
    assert_eq!(sidecar["result"]["n"], 250);
}

#[test]
fn generate_complete_four_has_six_edges() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("k4.edges");
    let run = netobs(&[
        "generate", "--family", "complete", "--n", "4",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(run.status.success());
    let body = fs::read_to_string(&out).unwrap();
    assert_eq!(body.lines().filter(|l| !l.starts_with('#')).count(), 6);
}

#[test]
fn generate_rejects_unreachable_density() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("x.edges");
    let run = netobs(&[
        "generate", "--family", "ws", "--n", "100", "--density", "0.001",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&run), 3);
    assert!(!out.exists());
}

#[test]
fn observe_path4_closed_form() {
    let dir = TempDir::new().unwrap();
    let p4 = write_path4(dir.path());
    let doc = stdout_json(&netobs(&[
        "observe", &p4, "--target", "edge", "--level", "global", "--hops", "1", "--nc", "2",
    ]));
    let value = doc["result"]["value"].as_f64().unwrap();
    assert!((value - 5.0 / 6.0).abs() < 1e-12);
    assert_eq!(doc["result"]["method"], "closed-form");
    assert_eq!(doc["result"]["trials"], 0);
    assert_eq!(doc["result"]["stderr"], 0.0);
}

#[test]
fn observe_fraction_zero_is_zero() {
    let dir = TempDir::new().unwrap();
    let p4 = write_path4(dir.path());
    let doc = stdout_json(&netobs(&["observe", &p4, "--fraction", "0"]));
    assert_eq!(doc["result"]["value"].as_f64().unwrap(), 0.0);
    assert_eq!(doc["result"]["nc"], 0);
}

#[test]
fn observe_monte_carlo_reports_method_and_trials() {
    let dir = TempDir::new().unwrap();
    let p4 = write_path4(dir.path());
    let doc = stdout_json(&netobs(&[
        "observe", &p4, "--target", "node", "--hops", "2", "--nc", "1",
        "--trials", "64", "--seed", "5",
    ]));
    assert_eq!(doc["result"]["method"], "monte-carlo");
    assert_eq!(doc["result"]["trials"], 64);
    let v = doc["result"]["value"].as_f64().unwrap();
    assert!(v > 0.0 && v <= 1.0);
}

#[test]
fn usage_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let p4 = write_path4(dir.path());
    assert_eq!(exit_code(&netobs(&["observe", &p4, "--nc", "1", "--hops", "0"])), 2);
    assert_eq!(
        exit_code(&netobs(&["observe", &p4, "--nc", "1", "--fraction", "0.5"])),
        2
    );
    assert_eq!(exit_code(&netobs(&["observe", &p4])), 2, "needs --nc or --fraction");
}

#[test]
fn data_errors_exit_three() {
    let dir = TempDir::new().unwrap();
    let p4 = write_path4(dir.path());
    let missing = netobs(&["observe", "/no/such/file.edges", "--nc", "1"]);
    assert_eq!(exit_code(&missing), 3);
    let diagnostic = String::from_utf8_lossy(&missing.stderr);
    assert_eq!(diagnostic.lines().count(), 1, "single-line diagnostic");
    assert!(diagnostic.contains("/no/such/file.edges"));

    assert_eq!(exit_code(&netobs(&["observe", &p4, "--fraction", "1.5"])), 3);
    assert_eq!(
        exit_code(&netobs(&["observe", &p4, "--level", "local", "--nc", "4"])),
        3,
        "local metric undefined when everything is compromised"
    );
    assert_eq!(exit_code(&netobs(&["sweep", "/no/events.csv", "--windows", "1h"])), 3);
}

#[test]
fn curve_selftest_linear_has_half_auoc() {
    let doc = stdout_json(&netobs(&["curve", "--selftest-linear"]));
    let auoc = doc["auoc"].as_f64().unwrap();
    assert!((auoc - 0.5).abs() <= 1e-9);
    assert_eq!(doc["points"].as_array().unwrap().len(), 21);
}

#[test]
fn curve_complete_graph_node_auoc_with_unit_grid() {
    // With every n_c on the grid the node curve jumps to 1 at n_c=1,
    // so the area is 1 - 1/(2n).
    let dir = TempDir::new().unwrap();
    let k50 = dir.path().join("k50.edges");
    assert!(netobs(&[
        "generate", "--family", "complete", "--n", "50",
        "--out", k50.to_str().unwrap(),
    ])
    .status
    .success());
    let doc = stdout_json(&netobs(&[
        "curve", k50.to_str().unwrap(), "--target", "node", "--level", "global",
        "--hops", "1", "--grid-points", "51", "--trials", "100",
    ]));
    let auoc = doc["auoc"].as_f64().unwrap();
    assert!(auoc >= 0.98, "got {auoc}");
}

#[test]
fn curve_csv_has_metadata_and_auoc_comments() {
    let dir = TempDir::new().unwrap();
    let p4 = write_path4(dir.path());
    let run = netobs(&[
        "curve", &p4, "--grid-points", "5", "--format", "csv", "--seed", "3",
    ]);
    assert!(run.status.success());
    let text = String::from_utf8(run.stdout).unwrap();
    let mut lines = text.lines();
    let meta = lines.next().unwrap();
    assert!(meta.starts_with("# netobs "));
    assert!(meta.contains("\"seed\":3"));
    assert!(lines.next().unwrap().starts_with("# auoc="));
    assert_eq!(lines.next().unwrap(), "x,value,stderr");
}

#[test]
fn curve_outputs_are_worker_independent() {
    let dir = TempDir::new().unwrap();
    let ba = dir.path().join("ba.edges");
    assert!(netobs(&[
        "generate", "--family", "ba", "--n", "120", "--m", "3", "--seed", "2",
        "--out", ba.to_str().unwrap(),
    ])
    .status
    .success());
    let args = [
        "curve", ba.to_str().unwrap(), "--target", "node", "--hops", "2",
        "--grid-points", "6", "--trials", "200", "--seed", "9", "--format", "csv",
    ];
    let one = netobs(&[&args[..], &["--workers", "1"][..]].concat());
    let four = netobs(&[&args[..], &["--workers", "4"][..]].concat());
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout);
    assert!(!one.stdout.is_empty());
}

#[test]
fn sweep_single_window_emits_one_row() {
    let dir = TempDir::new().unwrap();
    let events = dir.path().join("events.csv");
    fs::write(
        &events,
        "src,dst,timestamp\na,b,100\nb,c,7200\na,c,90000\n",
    )
    .unwrap();
    let run = netobs(&[
        "sweep", events.to_str().unwrap(), "--windows", "1d",
        "--fraction", "0.5", "--trials", "50",
    ]);
    assert!(run.status.success());
    let text = String::from_utf8(run.stdout).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "window_seconds,mean,stderr,auoc");
    assert_eq!(rows.len(), 2, "header plus exactly one row");
    assert!(rows[1].starts_with("86400,"));
}

#[test]
fn sweep_rejects_bad_window_suffix() {
    let dir = TempDir::new().unwrap();
    let events = dir.path().join("events.csv");
    fs::write(&events, "a,b,100\n").unwrap();
    let run = netobs(&["sweep", events.to_str().unwrap(), "--windows", "1w"]);
    assert_eq!(exit_code(&run), 2);
}

#[test]
fn colocate_buckets_by_hour_and_cell() {
    let dir = TempDir::new().unwrap();
    let sightings = dir.path().join("sightings.csv");
    fs::write(
        &sightings,
        "a,b,timestamp,cell\np1,p2,100,c7\np2,p3,200,c7\np1,p3,3700,c7\np4,p5,150,c9\n",
    )
    .unwrap();
    let run = netobs(&[
        "colocate", sightings.to_str().unwrap(), "--fraction", "0.5", "--trials", "20",
    ]);
    assert!(run.status.success());
    let text = String::from_utf8(run.stdout).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "hour,cell,nodes,edges,nc,mean,stderr");
    assert_eq!(rows.len(), 4, "three buckets");
    assert!(rows[1].starts_with("0,c7,3,2,2,"));
    assert!(rows[2].starts_with("0,c9,2,1,1,"));
    assert!(rows[3].starts_with("1,c7,2,1,1,"));
}

#[test]
fn city_census_hand_case() {
    let dir = TempDir::new().unwrap();
    let blocks = dir.path().join("blocks.txt");
    fs::write(&blocks, "1000\n9000\n").unwrap();
    let doc = stdout_json(&netobs(&[
        "city", "--blocks", blocks.to_str().unwrap(), "--fraction", "0.01",
    ]));
    let estimate = doc["result"]["estimate"].as_f64().unwrap();
    assert!((estimate - 0.5064).abs() < 5e-4);
    assert_eq!(doc["result"]["method"], "census");
}

#[test]
fn city_exponential_band() {
    let doc = stdout_json(&netobs(&[
        "city", "--population", "8800000", "--area", "1572",
        "--fraction", "0.01", "--samples", "100000", "--seed", "1",
    ]));
    let estimate = doc["result"]["estimate"].as_f64().unwrap();
    assert!((0.46..=0.66).contains(&estimate), "got {estimate}");
    assert_eq!(doc["result"]["method"], "exponential");
}

#[test]
fn city_grid_reports_curve_with_auoc() {
    let dir = TempDir::new().unwrap();
    let blocks = dir.path().join("blocks.txt");
    fs::write(&blocks, "1000\n9000\n").unwrap();
    let doc = stdout_json(&netobs(&[
        "city", "--blocks", blocks.to_str().unwrap(), "--grid", "0,0.25,0.5,0.75,1",
    ]));
    assert!(doc["auoc"].as_f64().unwrap() > 0.0);
    assert_eq!(doc["points"].as_array().unwrap().len(), 5);
}

#[test]
fn city_requires_a_source_and_a_fraction() {
    assert_eq!(exit_code(&netobs(&["city", "--fraction", "0.01"])), 2);
    let dir = TempDir::new().unwrap();
    let blocks = dir.path().join("blocks.txt");
    fs::write(&blocks, "1000\n").unwrap();
    assert_eq!(exit_code(&netobs(&["city", "--blocks", blocks.to_str().unwrap()])), 2);
}

#[test]
fn help_documents_every_flag() {
    let expected: &[(&str, &[&str])] = &[
        (
            "generate",
            &["--family", "--n", "--density", "--p", "--m", "--k", "--seed", "--out"],
        ),
        (
            "observe",
            &["--target", "--level", "--hops", "--nc", "--fraction", "--trials", "--seed", "--out"],
        ),
        (
            "curve",
            &[
                "--target", "--level", "--hops", "--grid-points", "--trials", "--seed",
                "--label", "--selftest-linear", "--format", "--out",
            ],
        ),
        (
            "sweep",
            &["--windows", "--target", "--level", "--hops", "--fraction", "--trials", "--seed", "--format", "--out"],
        ),
        (
            "colocate",
            &["--target", "--level", "--hops", "--fraction", "--trials", "--seed", "--format", "--out"],
        ),
        (
            "city",
            &[
                "--blocks", "--population", "--area", "--fraction", "--grid", "--samples",
                "--seed", "--lno-slope", "--lno-intercept", "--format", "--out",
            ],
        ),
    ];
    for (sub, flags) in expected {
        let run = netobs(&[sub, "--help"]);
        assert!(run.status.success());
        let text = String::from_utf8(run.stdout).unwrap();
        for flag in *flags {
            assert!(text.contains(flag), "{sub} --help missing {flag}");
        }
        assert!(text.contains("--workers"), "{sub} --help missing --workers");
    }
}
