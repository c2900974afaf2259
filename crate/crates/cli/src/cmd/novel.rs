use std::path::PathBuf;

use serde::Serialize;
use tfjam::classify::{novelty_report, ClassifierModel, GroupKey, DEFAULT_NOVELTY_THRESHOLD};
use tfjam::dataset::{load_dataset, Split};
use tfjam::VERSION;

use super::{log_resolved, parse, parse_split, sha256_file, write};
use crate::config::{usage, NovelArgs};

pub fn run(args: NovelArgs) -> anyhow::Result<()> {
    let model_path = args.model.ok_or_else(|| usage("novel needs --model <file>"))?;
    let manifests = args
        .manifest
        .filter(|m| !m.is_empty())
        .ok_or_else(|| usage("novel needs at least one --manifest"))?;
    let out_dir = args.out_dir.ok_or_else(|| usage("novel needs --out-dir"))?;
    let split = parse_split(args.split.as_deref())?;
    let group: GroupKey = parse("group", args.group.as_deref().unwrap_or("snr"))?;
    let threshold = args.threshold.unwrap_or(DEFAULT_NOVELTY_THRESHOLD);
    if !(0.0..=1.0).contains(&threshold) {
        return Err(usage(format!("--threshold must be in [0, 1], got {threshold}")));
    }

    #[derive(Serialize)]
    struct Resolved<'a> {
        model: &'a PathBuf,
        manifests: &'a [PathBuf],
        out_dir: &'a PathBuf,
        split: Split,
        group: GroupKey,
        threshold: f64,
    }
    log_resolved(
        "novel",
        &Resolved {
            model: &model_path,
            manifests: &manifests,
            out_dir: &out_dir,
            split,
            group,
            threshold,
        },
    )?;

    let model = ClassifierModel::load(&model_path)?;
    let datasets = manifests
        .iter()
        .map(|m| load_dataset(m))
        .collect::<Result<Vec<_>, _>>()?;
    let report = novelty_report(&model, datasets.iter().flat_map(|d| d.split(split)), threshold, group)?;

    #[derive(Serialize)]
    struct Config {
        model_sha256: String,
        manifest_sha256: Vec<String>,
        split: Split,
        group: GroupKey,
        threshold: f64,
    }
    #[derive(Serialize)]
    struct ReportFile<'a> {
        generator: &'static str,
        config: Config,
        novel_flag_rate: f64,
        false_novel_rate: f64,
        report: &'a tfjam::classify::NoveltyReport,
    }
    let file = ReportFile {
        generator: VERSION,
        config: Config {
            model_sha256: sha256_file(&model_path)?,
            manifest_sha256: manifests
                .iter()
                .map(|m| sha256_file(m))
                .collect::<anyhow::Result<_>>()?,
            split,
            group,
            threshold,
        },
        novel_flag_rate: report.novel_flag_rate(),
        false_novel_rate: report.false_novel_rate(),
        report: &report,
    };
    write(&out_dir.join("novelty.csv"), report.to_csv())?;
    write(
        &out_dir.join("novelty.json"),
        serde_json::to_string_pretty(&file)? + "\n",
    )?;

    println!(
        "{:<22} {:>8} {:>6} {:>8} {:>7}",
        "class", "group", "count", "flagged", "rate"
    );
    for r in &report.rows {
        println!(
            "{:<22} {:>8} {:>6} {:>8} {:>6.1}%",
            r.class,
            r.group,
            r.count,
            r.flagged,
            100.0 * r.rate
        );
    }
    println!(
        "novel-class flag rate {:.1}%, known-class flag rate {:.1}% at threshold {threshold}",
        100.0 * file.novel_flag_rate,
        100.0 * file.false_novel_rate
    );
    Ok(())
}
