//! Glue between loaded datasets and the classifiers.

use serde::{Deserialize, Serialize};

use super::cnn::{Cnn, CnnArch};
use super::eval::{EvalReport, GroupKey, Prediction};
use super::features::{pooled_features, FEATURE_GRID};
use super::gnb::train_gnb;
use super::knn::{train_knn, DEFAULT_K};
use super::model::{Classifier, ClassifierModel, ModelKind, ModelMetadata};
use super::novel::{detect_novel, Novelty};
use super::train::{stratified_split, train_cnn, LabeledSet, TrainConfig, TrainHistory};
use crate::dataset::{sha256_hex, Dataset, Sample, Split};
use crate::error::{Error, Result};
use crate::rng::derive_seed;
use crate::synthesis::SignalClass;

pub const DEFAULT_VAL_FRACTION: f64 = 0.15;

const SPLIT_STREAM: u64 = 1;
const INIT_STREAM: u64 = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainOptions {
    pub k: usize,
    pub feature_grid: usize,
    /// Fraction of the training split held out for validation (CNN only).
    pub val_fraction: f64,
    pub cnn: TrainConfig,
}

impl Default for TrainOptions {
    fn default() -> Self {
        Self {
            k: DEFAULT_K,
            feature_grid: FEATURE_GRID,
            val_fraction: DEFAULT_VAL_FRACTION,
            cnn: TrainConfig::default(),
        }
    }
}

pub fn class_names() -> Vec<String> {
    SignalClass::CLOSED_SET.iter().map(|c| c.slug().to_string()).collect()
}

/// Closed-set samples of one split, in manifest order.
pub fn labeled(dataset: &Dataset, split: Split) -> Vec<(&Sample, usize)> {
    dataset
        .split(split)
        .into_iter()
        .filter_map(|s| s.record.label.map(|l| (s, l)))
        .collect()
}

fn manifest_digest(dataset: &Dataset) -> Result<String> {
    Ok(sha256_hex(&serde_json::to_vec(&dataset.manifest)?))
}

pub fn train_model(dataset: &Dataset, kind: ModelKind, opts: &TrainOptions) -> Result<ClassifierModel> {
    let (h, w) = dataset.image_size();
    let train = labeled(dataset, Split::Train);
    if train.is_empty() {
        return Err(Error::Empty("labelled training split"));
    }
    let n_classes = SignalClass::CLOSED_SET.len();
    let features = || -> Result<(Vec<Vec<f32>>, Vec<usize>)> {
        let f = train
            .iter()
            .map(|(s, _)| pooled_features(&s.pixels, h, w, opts.feature_grid))
            .collect::<Result<Vec<_>>>()?;
        Ok((f, train.iter().map(|(_, l)| *l).collect()))
    };
    let mut train_config = None;
    let mut history: Option<TrainHistory> = None;
    let (classifier, settings) = match kind {
        ModelKind::Knn => {
            let (f, l) = features()?;
            (
                Classifier::Knn(train_knn(&f, &l, n_classes, opts.k)?),
                serde_json::json!({ "k": opts.k }),
            )
        }
        ModelKind::Gnb => {
            let (f, l) = features()?;
            (Classifier::Gnb(train_gnb(&f, &l, n_classes)?), serde_json::json!({}))
        }
        ModelKind::Cnn => {
            let labels: Vec<usize> = train.iter().map(|(_, l)| *l).collect();
            let (fit_idx, val_idx) =
                stratified_split(&labels, opts.val_fraction, derive_seed(opts.cnn.seed, SPLIT_STREAM))?;
            let set = LabeledSet::new(
                train.iter().flat_map(|(s, _)| s.pixels.iter().copied()).collect(),
                labels,
                h * w,
            )?;
            let mut net = Cnn::new(
                CnnArch::compact(h, w, n_classes),
                derive_seed(opts.cnn.seed, INIT_STREAM),
            )?;
            history = Some(train_cnn(
                &mut net,
                &set.subset(&fit_idx),
                &set.subset(&val_idx),
                &opts.cnn,
            )?);
            train_config = Some(opts.cnn.clone());
            (
                Classifier::Cnn(net),
                serde_json::json!({ "val_fraction": opts.val_fraction, "train_samples": fit_idx.len(), "val_samples": val_idx.len() }),
            )
        }
    };
    Ok(ClassifierModel {
        metadata: ModelMetadata {
            generator: crate::VERSION.to_string(),
            kind,
            class_names: class_names(),
            image_size: (h, w),
            feature_grid: opts.feature_grid,
            dataset_digest: Some(manifest_digest(dataset)?),
            train_config,
            history,
            settings,
        },
        classifier,
    })
}

fn check_size(model: &ClassifierModel, dataset: &Dataset) -> Result<()> {
    if model.metadata.image_size != dataset.image_size() {
        return Err(Error::Shape {
            expected: format!("{:?} images", model.metadata.image_size),
            got: format!("{:?}", dataset.image_size()),
        });
    }
    Ok(())
}

/// Scores the closed-set samples of `split`.
pub fn evaluate_model(model: &ClassifierModel, dataset: &Dataset, split: Split, group: GroupKey) -> Result<EvalReport> {
    check_size(model, dataset)?;
    let samples = labeled(dataset, split);
    let predictions = samples
        .iter()
        .map(|(s, truth)| {
            Ok(Prediction {
                truth: *truth,
                predicted: model.predict(&s.pixels)?,
                group: match group {
                    GroupKey::Snr => s.record.snr_db,
                    GroupKey::Jsr => s.record.jsr_db,
                    GroupKey::None => 0.0,
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    EvalReport::from_predictions(model.kind().name(), &model.metadata.class_names, &predictions, group)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoveltyRow {
    pub class: String,
    pub novel_class: bool,
    pub group: f64,
    pub count: usize,
    pub flagged: usize,
    pub rate: f64,
}

/// Flag rates per (class, group value). For novel classes this is the
/// detection rate; for known classes it is the false-novel rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoveltyReport {
    pub generator: String,
    pub threshold: f64,
    pub group_key: GroupKey,
    pub rows: Vec<NoveltyRow>,
}

impl NoveltyReport {
    fn rate_where(&self, novel: bool) -> f64 {
        let (flagged, count) = self
            .rows
            .iter()
            .filter(|r| r.novel_class == novel)
            .fold((0, 0), |(f, c), r| (f + r.flagged, c + r.count));
        if count == 0 {
            0.0
        } else {
            flagged as f64 / count as f64
        }
    }

    pub fn novel_flag_rate(&self) -> f64 {
        self.rate_where(true)
    }

    pub fn false_novel_rate(&self) -> f64 {
        self.rate_where(false)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("class,novel_class,group,count,flagged,rate\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.class, r.novel_class, r.group, r.count, r.flagged, r.rate
            ));
        }
        s
    }
}

pub fn novelty_report<'a>(
    model: &ClassifierModel,
    samples: impl IntoIterator<Item = &'a Sample>,
    threshold: f64,
    group: GroupKey,
) -> Result<NoveltyReport> {
    let mut rows: Vec<NoveltyRow> = Vec::new();
    for s in samples {
        let probs = model
            .probabilities(&s.pixels)?
            .ok_or_else(|| Error::invalid(format!("{} models have no confidence output", model.kind().name())))?;
        let flagged = (detect_novel(&probs, threshold) == Novelty::Novel) as usize;
        let g = match group {
            GroupKey::Snr => s.record.snr_db,
            GroupKey::Jsr => s.record.jsr_db,
            GroupKey::None => 0.0,
        };
        let class = s.record.class.slug();
        match rows
            .iter_mut()
            .find(|r| r.class == class && r.group.to_bits() == g.to_bits())
        {
            Some(r) => {
                r.count += 1;
                r.flagged += flagged;
            }
            None => rows.push(NoveltyRow {
                class: class.to_string(),
                novel_class: s.record.class.is_novel(),
                group: g,
                count: 1,
                flagged,
                rate: 0.0,
            }),
        }
    }
    if rows.is_empty() {
        return Err(Error::Empty("novelty sample set"));
    }
    rows.sort_by(|a, b| {
        (!a.novel_class, &a.class)
            .cmp(&(!b.novel_class, &b.class))
            .then(a.group.total_cmp(&b.group))
    });
    for r in &mut rows {
        r.rate = r.flagged as f64 / r.count as f64;
    }
    Ok(NoveltyReport {
        generator: crate::VERSION.to_string(),
        threshold,
        group_key: group,
        rows,
    })
}
