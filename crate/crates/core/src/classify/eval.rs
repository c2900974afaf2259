use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How test samples are grouped for accuracy curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum GroupKey {
    #[default]
    Snr,
    Jsr,
    None,
}

impl std::str::FromStr for GroupKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "snr" => Ok(Self::Snr),
            "jsr" => Ok(Self::Jsr),
            "none" => Ok(Self::None),
            other => Err(Error::invalid(format!("unknown group key '{other}' (snr, jsr, none)"))),
        }
    }
}

/// One scored test sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub truth: usize,
    pub predicted: usize,
    /// SNR or JSR value of the sample's cell; ignored for `GroupKey::None`.
    pub group: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassAccuracy {
    pub class: String,
    pub count: usize,
    pub correct: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupAccuracy {
    pub value: f64,
    pub count: usize,
    pub correct: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub generator: String,
    pub model: String,
    pub class_names: Vec<String>,
    pub n_samples: usize,
    pub correct: usize,
    pub accuracy: f64,
    pub per_class: Vec<ClassAccuracy>,
    /// Rows are truth, columns are prediction, both in `class_names` order.
    pub confusion: Vec<Vec<usize>>,
    pub group_key: GroupKey,
    /// Ascending by value; empty for `GroupKey::None`.
    pub groups: Vec<GroupAccuracy>,
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

impl EvalReport {
    pub fn from_predictions(
        model: &str,
        class_names: &[String],
        predictions: &[Prediction],
        group_key: GroupKey,
    ) -> Result<Self> {
        if predictions.is_empty() {
            return Err(Error::Empty("test set"));
        }
        let k = class_names.len();
        let mut confusion = vec![vec![0usize; k]; k];
        for p in predictions {
            if p.truth >= k || p.predicted >= k {
                return Err(Error::invalid(format!("label out of range for {k} classes")));
            }
            confusion[p.truth][p.predicted] += 1;
        }
        let per_class: Vec<ClassAccuracy> = class_names
            .iter()
            .enumerate()
            .map(|(c, name)| {
                let count = confusion[c].iter().sum();
                ClassAccuracy {
                    class: name.clone(),
                    count,
                    correct: confusion[c][c],
                    accuracy: ratio(confusion[c][c], count),
                }
            })
            .collect();
        let correct = (0..k).map(|c| confusion[c][c]).sum();

        let mut groups: Vec<GroupAccuracy> = Vec::new();
        if group_key != GroupKey::None {
            for p in predictions {
                let hit = (p.truth == p.predicted) as usize;
                match groups.iter_mut().find(|g| g.value.to_bits() == p.group.to_bits()) {
                    Some(g) => {
                        g.count += 1;
                        g.correct += hit;
                    }
                    None => groups.push(GroupAccuracy {
                        value: p.group,
                        count: 1,
                        correct: hit,
                        accuracy: 0.0,
                    }),
                }
            }
            groups.sort_by(|a, b| a.value.total_cmp(&b.value));
            for g in &mut groups {
                g.accuracy = ratio(g.correct, g.count);
            }
        }
        Ok(Self {
            generator: crate::VERSION.to_string(),
            model: model.to_string(),
            class_names: class_names.to_vec(),
            n_samples: predictions.len(),
            correct,
            accuracy: ratio(correct, predictions.len()),
            per_class,
            confusion,
            group_key,
            groups,
        })
    }

    pub fn group_accuracy(&self, value: f64) -> Option<f64> {
        self.groups.iter().find(|g| g.value == value).map(|g| g.accuracy)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    /// `group,count,correct,accuracy`; a single `all` row when ungrouped.
    pub fn curve_csv(&self) -> String {
        let key = match self.group_key {
            GroupKey::Snr => "snr_db",
            GroupKey::Jsr => "jsr_db",
            GroupKey::None => "group",
        };
        let mut s = format!("{key},count,correct,accuracy\n");
        if self.groups.is_empty() {
            s.push_str(&format!("all,{},{},{}\n", self.n_samples, self.correct, self.accuracy));
        }
        for g in &self.groups {
            s.push_str(&format!("{},{},{},{}\n", g.value, g.count, g.correct, g.accuracy));
        }
        s
    }

    pub fn per_class_csv(&self) -> String {
        let mut s = String::from("class,count,correct,accuracy\n");
        for c in &self.per_class {
            s.push_str(&format!("{},{},{},{}\n", c.class, c.count, c.correct, c.accuracy));
        }
        s
    }

    pub fn confusion_csv(&self) -> String {
        let mut s = String::from("truth\\predicted");
        for name in &self.class_names {
            s.push(',');
            s.push_str(name);
        }
        s.push('\n');
        for (name, row) in self.class_names.iter().zip(&self.confusion) {
            s.push_str(name);
            for v in row {
                s.push_str(&format!(",{v}"));
            }
            s.push('\n');
        }
        s
    }
}
