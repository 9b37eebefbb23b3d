use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tdakernel"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn matrix(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split(',').map(|v| v.trim().parse().unwrap()).collect())
        .collect()
}

fn diagram_files(dir: &TempDir, n: usize) -> Vec<PathBuf> {
    (0..n)
        .map(|i| {
            let mut text = String::from("degree,birth,death\n");
            for j in 0..=(i % 4) {
                let b = 0.1 * (i + j) as f64 % 1.0;
                text.push_str(&format!("1,{b},{}\n", b + 0.2 + 0.13 * j as f64));
            }
            write(dir, &format!("d{i}.csv"), &text)
        })
        .collect()
}

#[test]
fn triangle_cech_row() {
    let dir = TempDir::new().unwrap();
    let cloud = write(&dir, "tri.txt", "0 0\n1 0\n0.5 0.8660254037844386\n");
    let out = ok(&["diagram", s(&cloud), "--mode", "cech2d"]);
    assert!(
        out.lines().any(|l| l == "1,0.5,0.57735026918962573"),
        "{out}"
    );
}

#[test]
fn empty_cloud_is_a_parse_error() {
    let dir = TempDir::new().unwrap();
    let cloud = write(&dir, "empty.txt", "");
    assert_eq!(run(&["diagram", s(&cloud)]).status.code(), Some(2));
    assert_eq!(
        run(&["diagram", "/nonexistent/cloud.txt"]).status.code(),
        Some(2)
    );
}

#[test]
fn rips_square_has_one_loop() {
    let dir = TempDir::new().unwrap();
    let cloud = write(&dir, "sq.txt", "0 0\n1 0\n1 1\n0 1\n");
    let out = ok(&["diagram", s(&cloud), "--mode", "rips", "--q-max", "1"]);
    let loops: Vec<&str> = out.lines().filter(|l| l.starts_with("1,")).collect();
    assert_eq!(loops, ["1,0.5,0.70710678118654757"]);
}

#[test]
fn single_diagram_gaussian_gram_is_one() {
    let dir = TempDir::new().unwrap();
    let d = diagram_files(&dir, 1);
    let out = ok(&[
        "gram",
        s(&d[0]),
        "--spec",
        r#"{"sigma":0.5,"rkhs":"gaussian","tau":1.0}"#,
    ]);
    assert_eq!(matrix(&out), vec![vec![1.0]]);
}

#[test]
fn rff_gram_tracks_exact() {
    let dir = TempDir::new().unwrap();
    let ds = diagram_files(&dir, 6);
    let spec = r#"{"sigma":0.3,"C":1.0,"p":5,"rkhs":"linear"}"#;
    let mut args: Vec<&str> = vec!["gram", "--spec", spec];
    args.extend(ds.iter().map(|p| s(p)));
    let exact = matrix(&ok(&args));
    args.extend(["--approx", "rff", "--M", "5000", "--seed", "3"]);
    let approx = matrix(&ok(&args));
    let max = exact.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    let err = exact
        .iter()
        .flatten()
        .zip(approx.iter().flatten())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    assert!(err <= 0.05 * max, "{err} vs {max}");
}

#[test]
fn sidecar_records_median_sigma() {
    let dir = TempDir::new().unwrap();
    let ds = diagram_files(&dir, 5);
    let out = dir.path().join("g.csv");
    let mut args: Vec<&str> = vec![
        "gram",
        "--spec",
        r#"{"sigma":"median","rkhs":"linear"}"#,
        "--out",
        s(&out),
    ];
    args.extend(ds.iter().map(|p| s(p)));
    ok(&args);
    let side: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("g.csv.json")).unwrap()).unwrap();
    assert!(side["spec"]["sigma"].as_f64().unwrap() > 0.0, "{side}");
}

#[test]
fn rff_with_pssk_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let ds = diagram_files(&dir, 2);
    let out = run(&[
        "gram",
        s(&ds[0]),
        s(&ds[1]),
        "--spec",
        r#"{"rkhs":"pssk","t":0.1}"#,
        "--approx",
        "rff",
        "--seed",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

fn block_gram(dir: &TempDir) -> PathBuf {
    let mut text = String::new();
    for i in 0..20 {
        let row: Vec<String> = (0..20)
            .map(|j| {
                let v = if (i < 10) == (j < 10) {
                    if i == j {
                        1.0
                    } else {
                        0.9
                    }
                } else {
                    0.1
                };
                format!("{v}")
            })
            .collect();
        text.push_str(&row.join(","));
        text.push('\n');
    }
    write(dir, "block.csv", &text)
}

#[test]
fn kfdr_block_fixture() {
    let dir = TempDir::new().unwrap();
    let g = block_gram(&dir);
    let out_path = dir.path().join("scan.csv");
    let stdout = ok(&["kfdr", s(&g), "--margin", "2", "--out", s(&out_path)]);
    assert_eq!(stdout.trim(), "argmax 10");
    let scan = fs::read_to_string(&out_path).unwrap();
    assert_eq!(scan.lines().count() - 1, 20 - 2 * 2 - 1);
}

#[test]
fn kfdr_constant_gram_is_zero() {
    let dir = TempDir::new().unwrap();
    let row = ["2.5"; 8].join(",");
    let g = write(&dir, "const.csv", &format!("{}\n", vec![row; 8].join("\n")));
    let out = ok(&["kfdr", s(&g)]);
    for line in out.lines().skip(1) {
        let fields: Vec<f64> = line
            .split(',')
            .skip(1)
            .map(|v| v.parse().unwrap())
            .collect();
        assert_eq!(fields, [0.0, 0.0]);
    }
}

#[test]
fn changepoint_experiment_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let stdout = ok(&["experiment", "changepoint", "--seed", "4", "--out", s(out)]);
        let detected: usize = stdout.trim().rsplit(' ').next().unwrap().parse().unwrap();
        assert!((18..=22).contains(&detected));
    }
    for f in ["results.json", "kfdr.csv", "kpca.csv"] {
        assert_eq!(
            fs::read(a.join(f)).unwrap(),
            fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
    let bad = write(&dir, "bad.json", r#"{"n_before": 20, "bogus": 1}"#);
    assert_eq!(
        run(&["experiment", "changepoint", "--config", s(&bad)])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn svm_train_then_predict_from_diagrams() {
    let dir = TempDir::new().unwrap();
    // small loops versus large loops
    let mut files = Vec::new();
    let mut labels = String::new();
    for i in 0..12 {
        let big = i % 2 == 0;
        let (b, d) = if big {
            (0.1, 2.0 + 0.05 * i as f64)
        } else {
            (0.1, 0.3 + 0.01 * i as f64)
        };
        files.push(write(&dir, &format!("t{i}.csv"), &format!("1,{b},{d}\n")));
        labels.push_str(if big { "1\n" } else { "-1\n" });
    }
    let labels = write(&dir, "labels.txt", &labels);
    let gram = dir.path().join("train.csv");
    let mut args: Vec<&str> = vec![
        "gram",
        "--spec",
        r#"{"sigma":0.5,"rkhs":"linear"}"#,
        "--out",
        s(&gram),
    ];
    args.extend(files.iter().map(|p| s(p)));
    ok(&args);
    let model = dir.path().join("model.json");
    let sidecar = dir.path().join("train.csv.json");
    ok(&[
        "svm-train",
        s(&gram),
        "--labels",
        s(&labels),
        "--reg-c",
        "10",
        "--sidecar",
        s(&sidecar),
        "--out",
        s(&model),
    ]);
    let big = write(&dir, "q_big.csv", "1,0.1,2.2\n");
    let small = write(&dir, "q_small.csv", "1,0.1,0.35\n");
    let pred = ok(&["svm-predict", "--model", s(&model), s(&big), s(&small)]);
    assert_eq!(pred.lines().collect::<Vec<_>>(), ["1", "-1"]);
}

#[test]
fn synth_writes_manifest() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("data");
    ok(&[
        "synth",
        "--seed",
        "1",
        "--n-train",
        "4",
        "--n-test",
        "3",
        "--out",
        s(&out),
    ]);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["instances"].as_array().unwrap().len(), 7);
    assert_eq!(run(&["synth", "--out", s(&out)]).status.code(), Some(3));
}
