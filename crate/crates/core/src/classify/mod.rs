//! KNN, Gaussian naive Bayes and a compact CNN over spectrogram images, with
//! evaluation reports and max-softmax novelty detection.

mod cnn;
mod eval;
mod features;
mod gnb;
mod knn;
mod model;
mod novel;
mod pipeline;
mod train;

pub use cnn::{argmax, softmax, Cnn, CnnArch, Layout};
pub use eval::{ClassAccuracy, EvalReport, GroupAccuracy, GroupKey, Prediction};
pub use features::{pooled_features, FEATURE_GRID};
pub use gnb::{train_gnb, GaussianNb, ABSOLUTE_VARIANCE_FLOOR, VARIANCE_FLOOR_FRACTION};
pub use knn::{train_knn, Knn, DEFAULT_K};
pub use model::{Classifier, ClassifierModel, ModelKind, ModelMetadata, MODEL_FORMAT_VERSION, MODEL_MAGIC};
pub use novel::{detect_novel, Novelty, DEFAULT_NOVELTY_THRESHOLD};
pub use pipeline::{
    class_names, evaluate_model, labeled, novelty_report, train_model, NoveltyReport, NoveltyRow, TrainOptions,
    DEFAULT_VAL_FRACTION,
};
pub use train::{stratified_split, train_cnn, Adam, EpochRecord, LabeledSet, TrainConfig, TrainHistory};
