use std::collections::HashMap;
use std::fs;
use std::time::Instant;

use tfjam::dataset::{
    generate_dataset, load_dataset, read_manifest, render_sample, Split, SweepConfig, MANIFEST_FILE, PARTIAL_MARKER,
};
use tfjam::synthesis::SignalClass;
use tfjam::Error;

fn small_config() -> SweepConfig {
    SweepConfig {
        classes: vec![SignalClass::Fh, SignalClass::SingleTone, SignalClass::NovelPowerLawFm],
        snr_grid_db: vec![2.0, 10.0],
        train_per_cell: 3,
        test_per_cell: 2,
        master_seed: 42,
        ..SweepConfig::default()
    }
}

#[test]
fn regeneration_is_byte_identical() {
    let cfg = small_config();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let ma = generate_dataset(&cfg, a.path()).unwrap();
    let mb = generate_dataset(&cfg, b.path()).unwrap();
    assert_eq!(ma, mb);
    assert_eq!(
        fs::read(a.path().join(MANIFEST_FILE)).unwrap(),
        fs::read(b.path().join(MANIFEST_FILE)).unwrap()
    );
    for r in &ma.records {
        assert_eq!(
            fs::read(a.path().join(&r.path)).unwrap(),
            fs::read(b.path().join(&r.path)).unwrap()
        );
    }
}

#[test]
fn counts_are_stratified_and_seeds_disjoint() {
    let cfg = small_config();
    let dir = tempfile::tempdir().unwrap();
    let m = generate_dataset(&cfg, dir.path()).unwrap();
    assert_eq!(m.records.len(), 3 * 2 * (3 + 2));
    m.check_integrity().unwrap();
    let train: Vec<u64> = m.split(Split::Train).map(|r| r.seed).collect();
    assert!(m.split(Split::Test).all(|r| !train.contains(&r.seed)));
    let novel = m.records.iter().filter(|r| r.class == SignalClass::NovelPowerLawFm);
    assert!(novel.clone().all(|r| r.label.is_none()));
    assert!(m
        .records
        .iter()
        .filter(|r| r.class == SignalClass::Fh)
        .all(|r| r.label == Some(2)));
}

#[test]
fn loaded_pixels_match_regenerated_images() {
    let cfg = small_config();
    let dir = tempfile::tempdir().unwrap();
    generate_dataset(&cfg, dir.path()).unwrap();
    let data = load_dataset(&dir.path().join(MANIFEST_FILE)).unwrap();
    assert_eq!(data.samples.len(), 30);
    for s in data.samples.iter().step_by(4) {
        let r = &s.record;
        let (img, _) = render_sample(&cfg, r.class, r.snr_db, r.jsr_db, r.seed).unwrap();
        let want: Vec<f32> = img.as_raw().iter().map(|&p| p as f32 / 255.0).collect();
        assert_eq!(s.pixels, want, "{}", r.id);
        assert!(s.pixels.iter().all(|p| (0.0..=1.0).contains(p)));
    }
}

#[test]
fn missing_file_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let m = generate_dataset(&small_config(), dir.path()).unwrap();
    let victim = &m.records[7];
    fs::remove_file(dir.path().join(&victim.path)).unwrap();
    match load_dataset(&dir.path().join(MANIFEST_FILE)) {
        Err(Error::CorruptRecord { id, .. }) => assert_eq!(id, victim.id),
        other => panic!("expected corrupt record, got {other:?}"),
    }
}

#[test]
fn tampered_file_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let m = generate_dataset(&small_config(), dir.path()).unwrap();
    let victim = &m.records[3];
    let path = dir.path().join(&victim.path);
    let mut bytes = fs::read(&path).unwrap();
    let last = bytes.len() - 1;
    bytes[last] ^= 0xff;
    fs::write(&path, bytes).unwrap();
    let err = load_dataset(&dir.path().join(MANIFEST_FILE)).unwrap_err();
    assert!(err.to_string().contains(&victim.id), "{err}");
}

#[test]
fn shuffled_manifest_keeps_class_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut m = generate_dataset(&small_config(), dir.path()).unwrap();
    m.records.reverse();
    m.records.rotate_left(11);
    let path = dir.path().join("shuffled.json");
    fs::write(&path, serde_json::to_vec(&m).unwrap()).unwrap();
    let data = load_dataset(&path).unwrap();
    let mut counts: HashMap<SignalClass, usize> = HashMap::new();
    for s in &data.samples {
        *counts.entry(s.record.class).or_default() += 1;
    }
    assert_eq!(counts.len(), 3);
    assert!(counts.values().all(|&c| c == 10));
}

#[test]
fn empty_class_list_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = SweepConfig {
        classes: vec![],
        ..small_config()
    };
    assert!(generate_dataset(&cfg, &out).is_err());
    assert!(!out.exists());
}

#[test]
fn write_failure_leaves_partial_marker() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config();
    let plans = tfjam::dataset::plan_samples(&cfg).unwrap();
    // A directory squatting on an image path makes that one write fail.
    fs::create_dir_all(dir.path().join("images").join(format!("{}.png", plans[4].id()))).unwrap();
    assert!(generate_dataset(&cfg, dir.path()).is_err());
    assert!(dir.path().join(PARTIAL_MARKER).exists());
    assert!(!dir.path().join(MANIFEST_FILE).exists());
    let marker: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join(PARTIAL_MARKER)).unwrap()).unwrap();
    assert_eq!(marker["completed"], 29);
}

#[test]
fn desk_config_counts_and_time() {
    let dir = tempfile::tempdir().unwrap();
    let start = Instant::now();
    let m = generate_dataset(&SweepConfig::default(), dir.path()).unwrap();
    let elapsed = start.elapsed();
    assert_eq!(m.split(Split::Train).count(), 900);
    assert_eq!(m.split(Split::Test).count(), 450);
    assert!(elapsed.as_secs() < 120, "{elapsed:?}");
    assert_eq!(read_manifest(&dir.path().join(MANIFEST_FILE)).unwrap(), m);
}
