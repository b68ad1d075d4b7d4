//! The nine published model configurations.

use uzvec::{Architecture, Loss, TrainConfig};

#[derive(Clone, Debug)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub config: TrainConfig,
}

fn w2v(arch: Architecture, loss: Loss, dim: usize, window: usize) -> TrainConfig {
    TrainConfig {
        dim,
        window,
        ..TrainConfig::word2vec(arch, loss)
    }
}

fn ft(arch: Architecture, dim: usize) -> TrainConfig {
    TrainConfig {
        dim,
        minn: 2,
        maxn: 5,
        ..TrainConfig::fasttext(arch)
    }
}

pub fn pipeline_presets() -> Vec<Preset> {
    use Architecture::{Cbow, Skipgram};
    use Loss::{HierarchicalSoftmax as Hs, NegativeSampling as Ns};
    vec![
        Preset {
            name: "w2v-cbow-ns-100",
            description: "word2vec CBOW, negative sampling, 100d, window 5",
            config: w2v(Cbow, Ns, 100, 5),
        },
        Preset {
            name: "w2v-cbow-hs-300",
            description: "word2vec CBOW, hierarchical softmax, 300d, window 5",
            config: w2v(Cbow, Hs, 300, 5),
        },
        Preset {
            name: "w2v-skipgram-ns-100",
            description: "word2vec skipgram, negative sampling, 100d, window 10",
            config: w2v(Skipgram, Ns, 100, 10),
        },
        Preset {
            name: "w2v-skipgram-hs-300",
            description: "word2vec skipgram, hierarchical softmax, 300d, window 10",
            config: w2v(Skipgram, Hs, 300, 10),
        },
        Preset {
            name: "glove-300",
            description: "GloVe, 300d",
            config: TrainConfig {
                dim: 300,
                ..TrainConfig::glove()
            },
        },
        Preset {
            name: "fasttext-cbow-100",
            description: "fastText CBOW, 100d, n-grams 2-5",
            config: ft(Cbow, 100),
        },
        Preset {
            name: "fasttext-cbow-300",
            description: "fastText CBOW, 300d, n-grams 2-5",
            config: ft(Cbow, 300),
        },
        Preset {
            name: "fasttext-skipgram-100",
            description: "fastText skipgram, 100d, n-grams 2-5",
            config: ft(Skipgram, 100),
        },
        Preset {
            name: "fasttext-skipgram-300",
            description: "fastText skipgram, 300d, n-grams 2-5",
            config: ft(Skipgram, 300),
        },
    ]
}

pub fn preset(name: &str) -> Option<Preset> {
    pipeline_presets().into_iter().find(|p| p.name == name)
}

pub fn preset_names() -> Vec<&'static str> {
    pipeline_presets().iter().map(|p| p.name).collect()
}
