//! Training configuration shared by all trainers, with a flat `key=value`
//! text form used by config files, manifests and the native model header.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    Word2Vec,
    Glove,
    FastText,
    /// Vectors loaded from an interchange file; no training history.
    Imported,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Architecture {
    Cbow,
    Skipgram,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Loss {
    NegativeSampling,
    HierarchicalSoftmax,
}

macro_rules! string_enum {
    ($ty:ident { $($variant:ident => $name:literal $(| $alias:literal)*),+ $(,)? }) => {
        impl $ty {
            pub fn as_str(self) -> &'static str {
                match self { $($ty::$variant => $name),+ }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $ty {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($name $(| $alias)* => Ok($ty::$variant),)+
                    other => Err(Error::Config(format!(
                        concat!("unknown ", stringify!($ty), " {:?}"), other
                    ))),
                }
            }
        }
    };
}

string_enum!(Algorithm {
    Word2Vec => "word2vec" | "w2v",
    Glove => "glove",
    FastText => "fasttext",
    Imported => "imported",
});

string_enum!(Architecture {
    Cbow => "cbow",
    Skipgram => "skipgram" | "sg",
});

string_enum!(Loss {
    NegativeSampling => "ns",
    HierarchicalSoftmax => "hs",
});

/// Every hyperparameter of a training run.
///
/// Fields that do not apply to the selected algorithm are carried along
/// unchanged so the snapshot is always complete.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub algorithm: Algorithm,
    pub architecture: Architecture,
    pub loss: Loss,
    pub dim: usize,
    pub window: usize,
    pub epochs: usize,
    /// Initial learning rate.
    pub lr: f64,
    pub negatives: usize,
    /// Subsampling threshold; `0` disables subsampling.
    pub sample: f64,
    pub seed: u64,
    pub workers: usize,
    pub min_count: u64,
    pub ns_power: f64,
    pub minn: usize,
    pub maxn: usize,
    pub bucket: usize,
    pub xmax: f64,
    /// Exponent of the GloVe weighting function.
    pub weight_exponent: f64,
}

impl TrainConfig {
    pub fn word2vec(architecture: Architecture, loss: Loss) -> Self {
        TrainConfig {
            algorithm: Algorithm::Word2Vec,
            architecture,
            loss,
            dim: 100,
            window: 5,
            epochs: 5,
            lr: match architecture {
                Architecture::Cbow => 0.05,
                Architecture::Skipgram => 0.025,
            },
            negatives: 5,
            sample: 1e-3,
            seed: 1,
            workers: 1,
            min_count: crate::vocab::DEFAULT_MIN_COUNT,
            ns_power: crate::vocab::DEFAULT_NS_POWER,
            minn: 2,
            maxn: 5,
            bucket: 2_000_000,
            xmax: 100.0,
            weight_exponent: 0.75,
        }
    }

    pub fn glove() -> Self {
        TrainConfig {
            algorithm: Algorithm::Glove,
            dim: 300,
            window: 15,
            epochs: 15,
            lr: 0.05,
            ..TrainConfig::word2vec(Architecture::Cbow, Loss::NegativeSampling)
        }
    }

    pub fn fasttext(architecture: Architecture) -> Self {
        TrainConfig {
            algorithm: Algorithm::FastText,
            lr: 0.05,
            sample: 1e-4,
            ..TrainConfig::word2vec(architecture, Loss::NegativeSampling)
        }
    }

    /// Defaults for an algorithm, before any preset or override.
    pub fn defaults_for(algorithm: Algorithm) -> Self {
        match algorithm {
            Algorithm::Word2Vec => {
                TrainConfig::word2vec(Architecture::Cbow, Loss::NegativeSampling)
            }
            Algorithm::Glove => TrainConfig::glove(),
            Algorithm::FastText => TrainConfig::fasttext(Architecture::Cbow),
            Algorithm::Imported => TrainConfig {
                algorithm: Algorithm::Imported,
                ..TrainConfig::word2vec(Architecture::Cbow, Loss::NegativeSampling)
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Config(m.to_string()));
        if self.dim < 1 {
            return fail("dim must be at least 1");
        }
        if self.window < 1 {
            return fail("window must be at least 1");
        }
        if self.epochs < 1 {
            return fail("epochs must be at least 1");
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return fail("learning rate must be positive");
        }
        if self.workers < 1 {
            return fail("workers must be at least 1");
        }
        if self.min_count < 1 {
            return fail("min_count must be at least 1");
        }
        if self.sample < 0.0 || !self.sample.is_finite() {
            return fail("sample must be non-negative");
        }
        let uses_ns = self.algorithm == Algorithm::FastText
            || (self.algorithm == Algorithm::Word2Vec && self.loss == Loss::NegativeSampling);
        if uses_ns && self.negatives < 1 {
            return fail("negatives must be at least 1 with negative sampling");
        }
        if uses_ns && self.ns_power <= 0.0 {
            return fail("ns_power must be positive");
        }
        if self.algorithm == Algorithm::FastText {
            if self.minn < 1 || self.minn > self.maxn {
                return fail("subword range requires 1 <= minn <= maxn");
            }
            if self.bucket < 1 {
                return fail("bucket must be at least 1");
            }
            if self.loss != Loss::NegativeSampling {
                return fail("fasttext supports negative sampling only");
            }
        }
        if self.algorithm == Algorithm::Glove && (self.xmax <= 0.0 || self.weight_exponent <= 0.0) {
            return fail("xmax and alpha must be positive");
        }
        Ok(())
    }

    /// All fields as `(key, value)` pairs in a fixed order.
    pub fn to_pairs(&self) -> Vec<(&'static str, String)> {
        vec![
            ("algorithm", self.algorithm.to_string()),
            ("architecture", self.architecture.to_string()),
            ("loss", self.loss.to_string()),
            ("dim", self.dim.to_string()),
            ("window", self.window.to_string()),
            ("epochs", self.epochs.to_string()),
            ("lr", fmt_f64(self.lr)),
            ("negatives", self.negatives.to_string()),
            ("sample", fmt_f64(self.sample)),
            ("seed", self.seed.to_string()),
            ("workers", self.workers.to_string()),
            ("min_count", self.min_count.to_string()),
            ("ns_power", fmt_f64(self.ns_power)),
            ("minn", self.minn.to_string()),
            ("maxn", self.maxn.to_string()),
            ("bucket", self.bucket.to_string()),
            ("xmax", fmt_f64(self.xmax)),
            ("weight_exponent", fmt_f64(self.weight_exponent)),
        ]
    }

    /// Set one field from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
            v.trim()
                .parse()
                .map_err(|_| Error::Config(format!("invalid value {v:?} for {key}")))
        }
        let v = value.trim();
        match key.trim() {
            "algorithm" => self.algorithm = v.parse()?,
            "architecture" => self.architecture = v.parse()?,
            "loss" => self.loss = v.parse()?,
            "dim" => self.dim = num(key, v)?,
            "window" => self.window = num(key, v)?,
            "epochs" => self.epochs = num(key, v)?,
            "lr" => self.lr = num(key, v)?,
            "negatives" => self.negatives = num(key, v)?,
            "sample" => self.sample = num(key, v)?,
            "seed" => self.seed = num(key, v)?,
            "workers" => self.workers = num(key, v)?,
            "min_count" => self.min_count = num(key, v)?,
            "ns_power" => self.ns_power = num(key, v)?,
            "minn" => self.minn = num(key, v)?,
            "maxn" => self.maxn = num(key, v)?,
            "bucket" => self.bucket = num(key, v)?,
            "xmax" => self.xmax = num(key, v)?,
            "weight_exponent" => self.weight_exponent = num(key, v)?,
            other => return Err(Error::Config(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    /// `key=value` lines, one per field.
    pub fn to_text(&self) -> String {
        self.to_pairs()
            .into_iter()
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect()
    }

    /// Parse `key=value` lines. Blank lines and `#` comments are skipped;
    /// missing keys keep the defaults of the algorithm named in the text.
    pub fn from_text(text: &str) -> Result<Self> {
        let pairs = parse_pairs(text)?;
        let algorithm = pairs
            .iter()
            .find(|(k, _)| k == "algorithm")
            .map(|(_, v)| v.parse())
            .transpose()?
            .unwrap_or(Algorithm::Word2Vec);
        let mut config = TrainConfig::defaults_for(algorithm);
        for (k, v) in &pairs {
            config.set(k, v)?;
        }
        Ok(config)
    }
}

/// Split flat `key=value` text into pairs.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: n + 1,
            msg: "expected key=value".into(),
        })?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

// Shortest representation that parses back to the same f64.
fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let mut c = TrainConfig::fasttext(Architecture::Skipgram);
        c.dim = 300;
        c.sample = 1.5e-4;
        c.seed = 99;
        let back = TrainConfig::from_text(&c.to_text()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn defaults() {
        let c = TrainConfig::word2vec(Architecture::Skipgram, Loss::HierarchicalSoftmax);
        assert_eq!((c.lr, c.negatives, c.sample, c.epochs), (0.025, 5, 1e-3, 5));
        assert_eq!(
            TrainConfig::word2vec(Architecture::Cbow, Loss::NegativeSampling).lr,
            0.05
        );
        let g = TrainConfig::glove();
        assert_eq!(
            (g.window, g.xmax, g.weight_exponent, g.lr, g.epochs),
            (15, 100.0, 0.75, 0.05, 15)
        );
        let f = TrainConfig::fasttext(Architecture::Cbow);
        assert_eq!(
            (f.minn, f.maxn, f.bucket, f.sample),
            (2, 5, 2_000_000, 1e-4)
        );
    }

    #[test]
    fn validation() {
        let mut c = TrainConfig::word2vec(Architecture::Cbow, Loss::NegativeSampling);
        assert!(c.validate().is_ok());
        c.negatives = 0;
        assert!(c.validate().is_err());
        c.loss = Loss::HierarchicalSoftmax;
        assert!(c.validate().is_ok());
        c.dim = 0;
        assert!(c.validate().is_err());

        let mut f = TrainConfig::fasttext(Architecture::Cbow);
        f.minn = 6;
        assert!(f.validate().is_err());
    }

    #[test]
    fn bad_keys_and_values() {
        let mut c = TrainConfig::glove();
        assert!(c.set("nope", "1").is_err());
        assert!(c.set("dim", "x").is_err());
        assert!(c.set("loss", "softmax").is_err());
        assert!(TrainConfig::from_text("dim 3").is_err());
        assert_eq!(
            TrainConfig::from_text("# comment\n\nalgorithm=glove\ndim=7\n")
                .unwrap()
                .dim,
            7
        );
    }
}
