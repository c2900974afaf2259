use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;
use tfjam::dataset::clean_signal;
use tfjam::synthesis::{SignalClass, SynthesisProfile, BPSK_SYMBOL_RATE, PULSE_PERIOD, PULSE_WIDTH};

fn tfjam(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tfjam"))
        .args(args)
        .current_dir(dir)
        .env("RUST_LOG", "info")
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = tfjam(dir, args);
    assert!(
        out.status.success(),
        "tfjam {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_slice(&fs::read(path).unwrap()).unwrap()
}

fn read_iq(path: &Path) -> Vec<(f32, f32)> {
    fs::read(path)
        .unwrap()
        .chunks_exact(8)
        .map(|c| {
            (
                f32::from_le_bytes(c[..4].try_into().unwrap()),
                f32::from_le_bytes(c[4..].try_into().unwrap()),
            )
        })
        .collect()
}

#[test]
fn synth_is_deterministic() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    for d in [&a, &b] {
        ok(
            d.path(),
            &["synth", "--class", "single-tone", "--seed", "7", "--spectrogram"],
        );
    }
    for name in [
        "single-tone-seed7.iq",
        "single-tone-seed7.json",
        "single-tone-seed7.png",
    ] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn iq_file_is_interleaved_f32_le() {
    let dir = TempDir::new().unwrap();
    ok(
        dir.path(),
        &["synth", "--class", "sweeping", "--seed", "3", "--out", "x.iq"],
    );
    let iq = read_iq(&dir.path().join("x.iq"));
    let (want, _) = clean_signal(&SynthesisProfile::default(), SignalClass::Sweeping, 5.0, 3).unwrap();
    assert_eq!(iq.len(), want.len());
    for (got, w) in iq.iter().zip(want.samples()) {
        assert_eq!(*got, (w.re as f32, w.im as f32));
    }
    let meta = json(&dir.path().join("x.json"));
    assert_eq!(meta["format"], "cf32le");
    assert_eq!(meta["n_samples"], 600);
}

#[test]
fn synth_defaults_fill_omitted_parameters() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["synth", "--class", "pulse"]);
    let meta = json(&dir.path().join("pulse-seed0.json"));
    assert_eq!(meta["sample_rate"], 2.0e6);
    assert_eq!(meta["config"]["jsr_db"], 5.0);
    assert_eq!(meta["config"]["snr_db"], Value::Null);
    let spec = &meta["spec"];
    assert_eq!(spec["host"]["symbol_rate"], BPSK_SYMBOL_RATE);
    assert_eq!(spec["interference"]["jammer"]["pulse_width"], PULSE_WIDTH);
    assert_eq!(spec["interference"]["jammer"]["period"], PULSE_PERIOD);
}

/// Brightest row per image column, mapped back from the frequency axis.
fn hop_rows(dir: &Path, seed: &str) -> (Vec<usize>, Vec<usize>) {
    ok(
        dir,
        &[
            "synth",
            "--class",
            "fh",
            "--seed",
            seed,
            "--spectrogram",
            "--out",
            "fh.iq",
        ],
    );
    let img = image::open(dir.join("fh.png")).unwrap().into_luma8();
    let (w, h) = img.dimensions();
    let ridge: Vec<usize> = (0..w)
        .map(|x| {
            (0..h)
                .max_by_key(|&y| (img.get_pixel(x, y).0[0], std::cmp::Reverse(y)))
                .unwrap() as usize
        })
        .collect();
    let meta = json(&dir.join("fh.json"));
    let fs = meta["sample_rate"].as_f64().unwrap();
    let bins_per_row = 256 / h as usize;
    let expected = meta["spec"]["host"]["hop_freqs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| {
            let bin = (f.as_f64().unwrap() / (fs / 512.0)).round() as usize;
            h as usize - 1 - bin / bins_per_row
        })
        .collect();
    (ridge, expected)
}

#[test]
fn fh_spectrogram_shows_six_plateaus() {
    let dir = TempDir::new().unwrap();
    let (ridge, expected) = hop_rows(dir.path(), "11");
    assert_eq!(expected.len(), 6);
    assert!(
        expected.windows(2).all(|w| w[0].abs_diff(w[1]) > 2),
        "fixture hops must be distinct: {expected:?}"
    );
    // Each hop spans 64/6 columns; ignore the ones blurred by hop edges.
    let cols = ridge.len() as f64 / 6.0;
    for (j, &row) in expected.iter().enumerate() {
        let inner = (j as f64 * cols + 2.0).ceil() as usize..((j + 1) as f64 * cols - 2.0).floor() as usize;
        for x in inner {
            assert!(
                ridge[x].abs_diff(row) <= 1,
                "hop {j} column {x}: row {} vs {row}",
                ridge[x]
            );
        }
    }
    // Runs of at least three columns at a steady height.
    let mut plateaus = 0;
    let mut run = 1;
    for x in 1..=ridge.len() {
        if x < ridge.len() && ridge[x].abs_diff(ridge[x - 1]) <= 1 {
            run += 1;
        } else {
            plateaus += (run >= 3) as usize;
            run = 1;
        }
    }
    assert_eq!(plateaus, 6, "ridge {ridge:?}");
}

#[test]
fn bad_parameters_exit_nonzero_with_one_line() {
    let dir = TempDir::new().unwrap();
    for args in [
        &["synth"][..],
        &["synth", "--class", "am-radio"],
        &["synth", "--class", "fh", "--channel", "rician"],
        &["synth", "--class", "fh", "--time-window", "32"],
        &["dataset"],
        &["dataset", "--out-dir", "d", "--preset", "huge"],
        &["train"],
        &["eval", "--model", "m"],
    ] {
        let out = tfjam(dir.path(), args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8(out.stderr).unwrap();
        let line = err
            .lines()
            .find(|l| l.starts_with("error:"))
            .unwrap_or_else(|| panic!("{args:?}: {err}"));
        assert!(line.len() > 10);
    }
    assert_eq!(tfjam(dir.path(), &["frobnicate"]).status.code(), Some(2));
    assert_eq!(tfjam(dir.path(), &["--help"]).status.code(), Some(0));

    fs::write(dir.path().join("broken.model"), b"TFJAMMDL\x01").unwrap();
    fs::create_dir(dir.path().join("empty")).unwrap();
    let out = tfjam(
        dir.path(),
        &[
            "eval",
            "--model",
            "broken.model",
            "--manifest",
            "empty/manifest.json",
            "--out-dir",
            "r",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().filter(|l| l.starts_with("error:")).count(), 1, "{err}");
}

#[test]
fn dataset_counts_and_paper_scale_warning() {
    let dir = TempDir::new().unwrap();
    let desk = ok(dir.path(), &["dataset", "--out-dir", "d", "--dry-run"]);
    assert!(desk.contains("train 900, test 450"), "{desk}");
    let out = tfjam(
        dir.path(),
        &["dataset", "--out-dir", "d", "--preset", "paper", "--dry-run"],
    );
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("paper-scale run"));
    assert!(String::from_utf8_lossy(&out.stdout).contains("train 90000, test 22500"));
    assert!(!dir.path().join("d").exists());
}

#[test]
fn config_file_sections_with_flag_override() {
    let dir = TempDir::new().unwrap();
    fs::write(
        dir.path().join("run.toml"),
        "[dataset]\nout_dir = \"from-file\"\ntrain_per_cell = 3\ntest_per_cell = 1\nsnr = [-6.0, 10.0]\nseed = 4\n",
    )
    .unwrap();
    let out = tfjam(
        dir.path(),
        &["--config", "run.toml", "dataset", "--train-per-cell", "5", "--dry-run"],
    );
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("train 90, test 18"));
    let log = String::from_utf8_lossy(&out.stderr);
    assert!(
        log.contains("\"out_dir\":\"from-file\"") && log.contains("\"master_seed\":4"),
        "{log}"
    );

    fs::write(dir.path().join("bad.toml"), "[dataset]\ntrain_per_cel = 3\n").unwrap();
    let out = tfjam(dir.path(), &["--config", "bad.toml", "dataset", "--out-dir", "x"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("train_per_cel"));
}

fn files(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .map(|p| (PathBuf::from(p.file_name().unwrap()), fs::read(&p).unwrap()))
        .collect();
    out.sort();
    out
}

#[test]
fn dataset_train_eval_novel_round_trip() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let summary = ok(
        d,
        &[
            "dataset",
            "--out-dir",
            "data",
            "--snr=-6,-2,2,6,10",
            "--train-per-cell",
            "2",
            "--test-per-cell",
            "1",
            "--seed",
            "5",
        ],
    );
    assert!(summary.contains("train 90, test 45"), "{summary}");
    ok(
        d,
        &[
            "dataset",
            "--out-dir",
            "novel",
            "--classes",
            "novel-power-law-fm,novel-parabolic-fm",
            "--snr",
            "6",
            "--train-per-cell",
            "0",
            "--test-per-cell",
            "4",
            "--seed",
            "6",
        ],
    );

    // Seed-fixed reruns give identical model bytes.
    for out in ["a.model", "b.model"] {
        ok(
            d,
            &[
                "train",
                "--manifest",
                "data/manifest.json",
                "--model",
                "cnn",
                "--max-epochs",
                "2",
                "--seed",
                "3",
                "--out",
                out,
            ],
        );
    }
    assert_eq!(
        fs::read(d.join("a.model")).unwrap(),
        fs::read(d.join("b.model")).unwrap()
    );
    let history = fs::read_to_string(d.join("a.model.history.csv")).unwrap();
    assert!(
        history.starts_with("epoch,") && history.lines().count() == 3,
        "{history}"
    );

    ok(
        d,
        &[
            "train",
            "--manifest",
            "data/manifest.json",
            "--model",
            "knn",
            "--k",
            "1",
            "--out",
            "knn.model",
        ],
    );
    ok(
        d,
        &[
            "train",
            "--manifest",
            "data/manifest.json",
            "--model",
            "gnb",
            "--out",
            "gnb.model",
        ],
    );
    assert!(!d.join("knn.model.history.csv").exists());

    // k = 1 on its own training split is a perfect oracle: diagonal confusion.
    ok(
        d,
        &[
            "eval",
            "--model",
            "knn.model",
            "--manifest",
            "data/manifest.json",
            "--split",
            "train",
            "--out-dir",
            "oracle",
        ],
    );
    let confusion = fs::read_to_string(d.join("oracle/confusion.csv")).unwrap();
    for (i, line) in confusion.lines().skip(1).enumerate() {
        let counts: Vec<usize> = line.split(',').skip(1).map(|v| v.parse().unwrap()).collect();
        for (j, &c) in counts.iter().enumerate() {
            assert_eq!(c, if i == j { 10 } else { 0 }, "{confusion}");
        }
    }

    for out in ["r1", "r2"] {
        ok(
            d,
            &[
                "eval",
                "--model",
                "a.model",
                "--manifest",
                "data/manifest.json",
                "--group",
                "snr",
                "--novel-threshold",
                "0.95",
                "--out-dir",
                out,
            ],
        );
    }
    let curve = fs::read_to_string(d.join("r1/curve.csv")).unwrap();
    let groups: Vec<f64> = curve
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(groups, [-6.0, -2.0, 2.0, 6.0, 10.0]);
    assert!(d.join("r1/curve.png").exists() && d.join("r1/confusion.png").exists());
    let (r1, r2) = (files(&d.join("r1")), files(&d.join("r2")));
    assert_eq!(r1, r2);
    let report = json(&d.join("r1/report.json"));
    assert!(report["generator"].as_str().unwrap().starts_with("tfjam "));
    assert_eq!(report["report"]["n_samples"], 45);

    let table = ok(
        d,
        &[
            "novel",
            "--model",
            "a.model",
            "--manifest",
            "data/manifest.json,novel/manifest.json",
            "--out-dir",
            "nov",
        ],
    );
    assert!(
        table.contains("novel-parabolic-fm") && table.contains("known-class flag rate"),
        "{table}"
    );
    let csv = fs::read_to_string(d.join("nov/novelty.csv")).unwrap();
    let novel_rows = csv.lines().filter(|l| l.contains(",true,")).count();
    assert_eq!(novel_rows, 2, "{csv}");
    assert_eq!(csv.lines().count(), 1 + 2 + 9 * 5);

    // KNN has no confidence output.
    let out = tfjam(
        d,
        &[
            "novel",
            "--model",
            "knn.model",
            "--manifest",
            "novel/manifest.json",
            "--out-dir",
            "x",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
}
