//! Config file sections and flag overlay.
//!
//! The file is TOML with one table per subcommand. Keys are the long flag
//! names with `-` replaced by `_`. A flag given on the command line always
//! wins over the file.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};

/// Bad invocation: exit status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Turns a library error raised while checking user input into a usage error.
pub fn invalid(e: tfjam::Error) -> anyhow::Error {
    usage(e.to_string())
}

pub trait Overlay {
    /// Fields set in `self` win; unset ones are taken from `file`.
    fn overlay(self, file: Self) -> Self;
}

impl<T> Overlay for Option<T> {
    fn overlay(self, file: Self) -> Self {
        self.or(file)
    }
}

macro_rules! overlay {
    ($t:ty { $($f:ident),* $(,)? }) => {
        impl Overlay for $t {
            fn overlay(self, file: Self) -> Self {
                Self { $($f: Overlay::overlay(self.$f, file.$f)),* }
            }
        }
    };
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FileConfig {
    pub synth: SynthArgs,
    pub dataset: DatasetArgs,
    pub train: TrainArgs,
    pub eval: EvalArgs,
    pub novel: NovelArgs,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text =
            fs::read_to_string(path).map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| {
            let msg = e.message().to_string();
            usage(format!("config {}: {}", path.display(), msg.trim()))
        })
    }
}

#[derive(Debug, Default, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthArgs {
    /// Signal class slug, e.g. fh, bpsk, single-tone, novel-parabolic-fm.
    #[arg(long)]
    pub class: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// IQ output path [default: <class>-seed<seed>.iq].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the time-frequency image next to the IQ file.
    #[arg(long, num_args = 0..=1, require_equals = true, default_missing_value = "true")]
    pub spectrogram: Option<bool>,
    /// Jammer-to-signal ratio in dB [default: 5].
    #[arg(long, allow_negative_numbers = true)]
    pub jsr: Option<f64>,
    /// Pass the frame through the channel at this SNR; omitted means noise-free.
    #[arg(long, allow_negative_numbers = true)]
    pub snr: Option<f64>,
    /// gaussian, rayleigh[:sigma] or two-path[:delay] [default: gaussian].
    #[arg(long)]
    pub channel: Option<String>,
    /// Hz [default: 2e6].
    #[arg(long)]
    pub sample_rate: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub image: ImageArgs,
}

overlay!(SynthArgs {
    class,
    seed,
    out,
    spectrogram,
    jsr,
    snr,
    channel,
    sample_rate,
    image
});

/// Time-frequency rendering settings shared by `synth` and `dataset`.
#[derive(Debug, Default, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ImageArgs {
    /// wvd, pwvd or spwvd [default: spwvd].
    #[arg(long)]
    pub tf_method: Option<String>,
    /// Hamming time-window length; 0 disables time smoothing [default: 33].
    #[arg(long)]
    pub time_window: Option<usize>,
    /// Hamming lag-window length; 0 uses every lag unweighted [default: 129].
    #[arg(long)]
    pub lag_window: Option<usize>,
    /// Frequency bins per slice [default: 256].
    #[arg(long)]
    pub freq_bins: Option<usize>,
    /// Square image side in pixels [default: 64].
    #[arg(long)]
    pub image_size: Option<usize>,
}

overlay!(ImageArgs {
    tf_method,
    time_window,
    lag_window,
    freq_bins,
    image_size
});

#[derive(Debug, Default, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DatasetArgs {
    /// desk, paper or jsr-sweep [default: desk].
    #[arg(long)]
    pub preset: Option<String>,
    /// Directory receiving manifest.json and images/.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Comma-separated class slugs [default: the nine closed-set classes].
    #[arg(long, value_delimiter = ',')]
    pub classes: Option<Vec<String>>,
    /// Comma-separated SNR grid in dB.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub snr: Option<Vec<f64>>,
    /// Comma-separated JSR grid in dB.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub jsr: Option<Vec<f64>>,
    /// gaussian, rayleigh[:sigma] or two-path[:delay].
    #[arg(long)]
    pub channel: Option<String>,
    #[arg(long)]
    pub train_per_cell: Option<usize>,
    #[arg(long)]
    pub test_per_cell: Option<usize>,
    /// Master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Resolve and report the sweep without rendering anything.
    #[arg(long, num_args = 0..=1, require_equals = true, default_missing_value = "true")]
    pub dry_run: Option<bool>,
    #[command(flatten)]
    #[serde(flatten)]
    pub image: ImageArgs,
}

overlay!(DatasetArgs {
    preset,
    out_dir,
    classes,
    snr,
    jsr,
    channel,
    train_per_cell,
    test_per_cell,
    seed,
    dry_run,
    image,
});

#[derive(Debug, Default, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainArgs {
    /// Dataset manifest.json.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// knn, gnb or cnn [default: cnn].
    #[arg(long)]
    pub model: Option<String>,
    /// Model file path [default: <model>.model].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Training history CSV [default: <out>.history.csv].
    #[arg(long)]
    pub history: Option<PathBuf>,
    /// KNN neighbours [default: 5].
    #[arg(long)]
    pub k: Option<usize>,
    /// Pooling grid side for KNN/GNB features [default: 8].
    #[arg(long)]
    pub feature_grid: Option<usize>,
    /// Validation fraction held out of the training split [default: 0.15].
    #[arg(long)]
    pub val_fraction: Option<f64>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub max_epochs: Option<usize>,
    #[arg(long)]
    pub patience: Option<usize>,
    #[arg(long)]
    pub lr_decay: Option<f64>,
    /// Seed for weight init, shuffling and the validation split [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
}

overlay!(TrainArgs {
    manifest,
    model,
    out,
    history,
    k,
    feature_grid,
    val_fraction,
    batch_size,
    learning_rate,
    max_epochs,
    patience,
    lr_decay,
    seed,
});

#[derive(Debug, Default, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalArgs {
    /// Model file.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Dataset manifest.json.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// train or test [default: test].
    #[arg(long)]
    pub split: Option<String>,
    /// snr, jsr or none [default: snr].
    #[arg(long)]
    pub group: Option<String>,
    /// Also write a novelty table at this confidence threshold.
    #[arg(long)]
    pub novel_threshold: Option<f64>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

overlay!(EvalArgs {
    model,
    manifest,
    split,
    group,
    novel_threshold,
    out_dir
});

#[derive(Debug, Default, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NovelArgs {
    /// Model file with a confidence output (cnn or gnb).
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// One or more manifests; their samples are pooled.
    #[arg(long, value_delimiter = ',')]
    pub manifest: Option<Vec<PathBuf>>,
    /// train or test [default: test].
    #[arg(long)]
    pub split: Option<String>,
    /// Maximum-probability threshold below which a sample is flagged [default: 0.95].
    #[arg(long)]
    pub threshold: Option<f64>,
    /// snr, jsr or none [default: snr].
    #[arg(long)]
    pub group: Option<String>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

overlay!(NovelArgs {
    model,
    manifest,
    split,
    threshold,
    group,
    out_dir
});

/// Parses `gaussian`, `rayleigh[:sigma]` or `two-path[:delay]`.
pub fn parse_channel(s: &str) -> anyhow::Result<tfjam::ChannelModel> {
    use tfjam::ChannelModel;
    let (name, arg) = match s.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (s, None),
    };
    let bad = || {
        usage(format!(
            "bad channel '{s}' (gaussian, rayleigh[:sigma], two-path[:delay])"
        ))
    };
    let model = match (name.to_ascii_lowercase().as_str(), arg) {
        ("gaussian" | "awgn", None) => ChannelModel::Gaussian,
        ("rayleigh", None) => ChannelModel::rayleigh(),
        ("rayleigh", Some(a)) => ChannelModel::RayleighBlock {
            sigma: a.parse().map_err(|_| bad())?,
        },
        ("two-path" | "freq-selective", None) => ChannelModel::two_path(tfjam::channel::TWO_PATH_DELAY),
        ("two-path" | "freq-selective", Some(a)) => ChannelModel::two_path(a.parse().map_err(|_| bad())?),
        _ => return Err(bad()),
    };
    model.validate().map_err(invalid)?;
    Ok(model)
}

/// `Option<usize>` window length where 0 means "no window".
pub fn window_len(v: usize) -> Option<usize> {
    (v > 0).then_some(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_over_file() {
        let file: FileConfig = toml::from_str(
            "[train]\nmodel = \"knn\"\nk = 3\nseed = 9\n[dataset]\nsnr = [-2.0, 6.0]\ntime_window = 17\n",
        )
        .unwrap();
        let flags = TrainArgs {
            k: Some(7),
            ..TrainArgs::default()
        };
        let t = flags.overlay(file.train);
        assert_eq!((t.model.as_deref(), t.k, t.seed), (Some("knn"), Some(7), Some(9)));
        let d = DatasetArgs::default().overlay(file.dataset);
        assert_eq!(d.snr, Some(vec![-2.0, 6.0]));
        assert_eq!(d.image.time_window, Some(17));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<FileConfig>("[train]\nbatchsize = 3\n").is_err());
        assert!(toml::from_str::<FileConfig>("[plots]\n").is_err());
        assert!(toml::from_str::<FileConfig>("[dataset]\nimage_sise = 32\n").is_err());
        assert!(toml::from_str::<FileConfig>("[synth]\nimage_size = 32\n").is_ok());
    }

    #[test]
    fn channel_specs() {
        assert_eq!(parse_channel("gaussian").unwrap(), tfjam::ChannelModel::Gaussian);
        assert_eq!(parse_channel("two-path:20").unwrap(), tfjam::ChannelModel::two_path(20));
        assert_eq!(parse_channel("rayleigh").unwrap(), tfjam::ChannelModel::rayleigh());
        assert!(parse_channel("rician").is_err());
        assert!(parse_channel("rayleigh:-1").is_err());
    }
}
