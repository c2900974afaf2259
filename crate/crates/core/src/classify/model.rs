use std::path::Path;

use serde::{Deserialize, Serialize};

use super::cnn::{argmax, Cnn, CnnArch};
use super::features::pooled_features;
use super::gnb::GaussianNb;
use super::knn::Knn;
use super::train::{TrainConfig, TrainHistory};
use crate::error::{Error, Result};

pub const MODEL_MAGIC: &[u8; 8] = b"TFJAMMDL";
pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Knn,
    Gnb,
    Cnn,
}

impl ModelKind {
    fn code(self) -> u8 {
        match self {
            ModelKind::Knn => 1,
            ModelKind::Gnb => 2,
            ModelKind::Cnn => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Knn => "knn",
            ModelKind::Gnb => "gnb",
            ModelKind::Cnn => "cnn",
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "knn" => Ok(Self::Knn),
            "gnb" => Ok(Self::Gnb),
            "cnn" => Ok(Self::Cnn),
            other => Err(Error::invalid(format!("unknown model '{other}' (knn, gnb, cnn)"))),
        }
    }
}

/// JSON block embedded in every model file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelMetadata {
    pub generator: String,
    pub kind: ModelKind,
    pub class_names: Vec<String>,
    /// (height, width) of the input images.
    pub image_size: (usize, usize),
    /// Pooling grid for the KNN/GNB feature extractor.
    pub feature_grid: usize,
    /// SHA-256 of the training manifest.
    pub dataset_digest: Option<String>,
    pub train_config: Option<TrainConfig>,
    pub history: Option<TrainHistory>,
    /// Free-form settings (e.g. `k`, hold-out fraction).
    pub settings: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Classifier {
    Knn(Knn<f32>),
    Gnb(GaussianNb<f32>),
    Cnn(Cnn<f32>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierModel {
    pub metadata: ModelMetadata,
    pub classifier: Classifier,
}

impl ClassifierModel {
    pub fn kind(&self) -> ModelKind {
        match self.classifier {
            Classifier::Knn(_) => ModelKind::Knn,
            Classifier::Gnb(_) => ModelKind::Gnb,
            Classifier::Cnn(_) => ModelKind::Cnn,
        }
    }

    fn features(&self, pixels: &[f32]) -> Result<Vec<f32>> {
        let (h, w) = self.metadata.image_size;
        pooled_features(pixels, h, w, self.metadata.feature_grid)
    }

    /// Class probabilities when the model defines them (CNN softmax, GNB posterior).
    pub fn probabilities(&self, pixels: &[f32]) -> Result<Option<Vec<f32>>> {
        Ok(match &self.classifier {
            Classifier::Cnn(net) => Some(net.forward_one(pixels)?),
            Classifier::Gnb(m) => Some(m.posterior(&self.features(pixels)?)),
            Classifier::Knn(_) => None,
        })
    }

    pub fn predict(&self, pixels: &[f32]) -> Result<usize> {
        let (h, w) = self.metadata.image_size;
        if pixels.len() != h * w {
            return Err(Error::Shape {
                expected: format!("{h}x{w}"),
                got: format!("{} pixels", pixels.len()),
            });
        }
        Ok(match &self.classifier {
            Classifier::Cnn(net) => argmax(&net.forward_one(pixels)?),
            Classifier::Gnb(m) => m.predict(&self.features(pixels)?),
            Classifier::Knn(m) => m.predict(&self.features(pixels)?),
        })
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        if self.metadata.kind != self.kind() {
            return Err(Error::ModelFormat("metadata kind does not match classifier".into()));
        }
        let meta = serde_json::to_vec(&self.metadata)?;
        let mut w = Writer(Vec::new());
        w.0.extend_from_slice(MODEL_MAGIC);
        w.u32(MODEL_FORMAT_VERSION);
        w.0.push(self.kind().code());
        w.usize(meta.len());
        w.0.extend_from_slice(&meta);
        match &self.classifier {
            Classifier::Knn(m) => {
                w.usize(m.k);
                w.usize(m.n_classes);
                w.usize(m.dim);
                w.usize(m.labels.len());
                w.f32s(&m.exemplars);
                for &l in &m.labels {
                    w.usize(l);
                }
            }
            Classifier::Gnb(m) => {
                w.usize(m.n_classes);
                w.usize(m.dim);
                w.f32s(&m.log_priors);
                w.f32s(&m.means);
                w.f32s(&m.variances);
            }
            Classifier::Cnn(net) => {
                let a = net.arch();
                for v in [
                    a.height,
                    a.width,
                    a.channels[0],
                    a.channels[1],
                    a.channels[2],
                    a.hidden,
                    a.n_classes,
                ] {
                    w.usize(v);
                }
                w.usize(net.params().len());
                w.f32s(net.params());
            }
        }
        Ok(w.0)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, at: 0 };
        if r.take(8)? != MODEL_MAGIC {
            return Err(Error::ModelFormat("not a model file (bad magic)".into()));
        }
        let version = r.u32()?;
        if version != MODEL_FORMAT_VERSION {
            return Err(Error::ModelFormat(format!(
                "format version {version} is not supported (expected {MODEL_FORMAT_VERSION})"
            )));
        }
        let code = r.take(1)?[0];
        let meta_len = r.usize()?;
        let metadata: ModelMetadata = serde_json::from_slice(r.take(meta_len)?)?;
        let classifier = match code {
            1 => {
                let (k, n_classes, dim, n) = (r.usize()?, r.usize()?, r.usize()?, r.usize()?);
                let exemplars = r.f32s(n * dim)?;
                let labels = (0..n).map(|_| r.usize()).collect::<Result<Vec<_>>>()?;
                if k == 0 || k > n || labels.iter().any(|&l| l >= n_classes) {
                    return Err(Error::ModelFormat("inconsistent KNN payload".into()));
                }
                Classifier::Knn(Knn {
                    k,
                    n_classes,
                    dim,
                    exemplars,
                    labels,
                })
            }
            2 => {
                let (n_classes, dim) = (r.usize()?, r.usize()?);
                Classifier::Gnb(GaussianNb {
                    n_classes,
                    dim,
                    log_priors: r.f32s(n_classes)?,
                    means: r.f32s(n_classes * dim)?,
                    variances: r.f32s(n_classes * dim)?,
                })
            }
            3 => {
                let mut dims = [0usize; 7];
                for d in &mut dims {
                    *d = r.usize()?;
                }
                let arch = CnnArch {
                    height: dims[0],
                    width: dims[1],
                    channels: [dims[2], dims[3], dims[4]],
                    hidden: dims[5],
                    n_classes: dims[6],
                };
                let n = r.usize()?;
                Classifier::Cnn(Cnn::from_params(arch, r.f32s(n)?).map_err(|e| Error::ModelFormat(e.to_string()))?)
            }
            other => return Err(Error::ModelFormat(format!("unknown model kind code {other}"))),
        };
        if r.at != bytes.len() {
            return Err(Error::ModelFormat(format!("{} trailing bytes", bytes.len() - r.at)));
        }
        let model = Self { metadata, classifier };
        if model.metadata.kind != model.kind() {
            return Err(Error::ModelFormat("metadata kind does not match payload".into()));
        }
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_bytes(&std::fs::read(path).map_err(|e| Error::io(path, e))?)
    }
}

struct Writer(Vec<u8>);

impl Writer {
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }

    fn usize(&mut self, v: usize) {
        self.u32(u32::try_from(v).expect("model dimensions fit in u32"));
    }

    fn f32s(&mut self, v: &[f32]) {
        for x in v {
            self.0.extend_from_slice(&x.to_le_bytes());
        }
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .at
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::ModelFormat("file is truncated".into()))?;
        let s = &self.bytes[self.at..end];
        self.at = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn usize(&mut self) -> Result<usize> {
        Ok(self.u32()? as usize)
    }

    fn f32s(&mut self, n: usize) -> Result<Vec<f32>> {
        let raw = self.take(
            n.checked_mul(4)
                .ok_or_else(|| Error::ModelFormat("size overflow".into()))?,
        )?;
        Ok(raw
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")))
            .collect())
    }
}
