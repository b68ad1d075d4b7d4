//! Gradient kernels for negative sampling and hierarchical softmax, and the
//! windowed training loop shared by the word2vec and fastText trainers.
//!
//! Kernels follow the reference trainers: output rows are updated in place
//! one at a time, while the step for the input side is accumulated into a
//! buffer and applied by the caller once the output side is done.

use std::ops::Range;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{Architecture, TrainConfig};
use crate::corpus::EncodedCorpus;
use crate::hogwild::HogwildMatrix;
use crate::matrix::{Matrix, ParamRows};
use crate::scalar::{axpy, dot};
use crate::vocab::{keep_probability, HuffmanCoding, NegativeSampler, Vocabulary};
use crate::Real;

/// Linearly decaying learning rate, floored at `1e-4 · alpha0`.
pub fn linear_lr(progress: f64, alpha0: f64) -> f64 {
    alpha0 * (1.0 - progress).max(1e-4)
}

/// One binary logistic term on output row `row`.
///
/// `label` is 1 for the observed word (or code bit 0), 0 otherwise.
#[inline]
fn logistic_term<F: Real, M: ParamRows<F>>(
    input: &[F],
    input_step: &mut [F],
    output: &mut M,
    row: usize,
    label: F,
    lr: F,
) -> F {
    let v = output.row_mut(row);
    let score = dot(input, v);
    let loss = if label > F::zero() {
        score.neg_log_sigmoid()
    } else {
        (-score).neg_log_sigmoid()
    };
    let g = (label - score.sigmoid()) * lr;
    axpy(g, v, input_step);
    axpy(g, input, v);
    loss
}

/// Negative-sampling update for one (input, target) pair.
///
/// Minimizes `-ln σ(u·v⁺) - Σₖ ln σ(-u·vₖ)`. Output rows of the target and
/// each negative move by `-lr · ∂loss/∂v`; `-lr · ∂loss/∂u` is added to
/// `input_step`. Returns the loss before the update.
pub fn ns_update<F: Real, M: ParamRows<F>>(
    input: &[F],
    input_step: &mut [F],
    output: &mut M,
    target: usize,
    negatives: &[usize],
    lr: F,
) -> F {
    let mut loss = logistic_term(input, input_step, output, target, F::one(), lr);
    for &neg in negatives {
        loss += logistic_term(input, input_step, output, neg, F::zero(), lr);
    }
    loss
}

/// Hierarchical-softmax update along the Huffman path of the target word.
///
/// Minimizes `-Σⱼ ln σ((1 - 2·codeⱼ) · u·nⱼ)`; same conventions as
/// [`ns_update`]. A zero-length code is a no-op with loss 0.
pub fn hs_update<F: Real, M: ParamRows<F>>(
    input: &[F],
    input_step: &mut [F],
    output: &mut M,
    code: &[u8],
    path: &[u32],
    lr: F,
) -> F {
    debug_assert_eq!(code.len(), path.len());
    let mut loss = F::zero();
    for (&bit, &node) in code.iter().zip(path) {
        let label = if bit == 0 { F::one() } else { F::zero() };
        loss += logistic_term(input, input_step, output, node as usize, label, lr);
    }
    loss
}

/// Output side of the model.
#[derive(Clone, Copy)]
pub enum OutputLayer<'a> {
    Negative {
        sampler: &'a NegativeSampler,
        negatives: usize,
    },
    Hierarchical {
        huffman: &'a HuffmanCoding,
    },
}

/// One update where the input is the mean of the input rows `rows`.
///
/// The accumulated input step is added back to every listed row, scaled by
/// `1 / rows.len()` when `mean_gradient` is set (the exact gradient of the
/// mean) or unscaled otherwise (word2vec CBOW convention). Rows listed
/// twice receive the step twice.
#[allow(clippy::too_many_arguments)]
pub fn composed_step<F: Real, M: ParamRows<F>, N: ParamRows<F>>(
    input: &mut M,
    output: &mut N,
    rows: &[u32],
    target: Target<'_>,
    lr: F,
    mean_gradient: bool,
    rep: &mut [F],
    step: &mut [F],
) -> F {
    debug_assert!(!rows.is_empty());
    rep.iter_mut().for_each(|x| *x = F::zero());
    step.iter_mut().for_each(|x| *x = F::zero());
    for &r in rows {
        axpy(F::one(), input.row(r as usize), rep);
    }
    let inv = F::one() / F::of(rows.len() as f64);
    if rows.len() > 1 {
        rep.iter_mut().for_each(|x| *x *= inv);
    }
    let loss = match target {
        Target::Negative { word, negatives } => ns_update(rep, step, output, word, negatives, lr),
        Target::Hierarchical { code, path } => hs_update(rep, step, output, code, path, lr),
    };
    let scale = if mean_gradient { inv } else { F::one() };
    for &r in rows {
        axpy(scale, step, input.row_mut(r as usize));
    }
    loss
}

/// What a [`composed_step`] predicts.
#[derive(Clone, Copy, Debug)]
pub enum Target<'a> {
    Negative { word: usize, negatives: &'a [usize] },
    Hierarchical { code: &'a [u8], path: &'a [u32] },
}

/// Rows gathered to represent a word on the input side.
pub(crate) enum InputSets<'a> {
    /// The word's own row (word2vec).
    Words(Vec<u32>),
    /// Word row plus n-gram bucket rows (fastText); gradients are averaged.
    Subwords(&'a [Vec<u32>]),
}

impl InputSets<'_> {
    #[inline]
    fn rows(&self, word: usize) -> &[u32] {
        match self {
            InputSets::Words(ids) => &ids[word..word + 1],
            InputSets::Subwords(sets) => &sets[word],
        }
    }

    fn mean_gradient(&self) -> bool {
        matches!(self, InputSets::Subwords(_))
    }
}

/// Per-epoch training statistics.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainReport {
    /// Mean loss per update step, one entry per epoch.
    pub epoch_loss: Vec<f64>,
}

pub(crate) struct Engine<'a> {
    pub corpus: &'a EncodedCorpus,
    pub vocab: &'a Vocabulary,
    pub config: &'a TrainConfig,
    pub layer: OutputLayer<'a>,
    pub sets: InputSets<'a>,
}

/// RNG for worker `stream`; stream 0 is reserved for initialization.
pub(crate) fn worker_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

struct Worker<F> {
    input: HogwildMatrix<F>,
    output: HogwildMatrix<F>,
    rep: Vec<F>,
    step: Vec<F>,
    rows: Vec<u32>,
    negs: Vec<usize>,
    kept: Vec<u32>,
}

impl<'a> Engine<'a> {
    pub fn run<F: Real>(
        &self,
        input: Matrix<F>,
        output: Matrix<F>,
    ) -> (Matrix<F>, Matrix<F>, TrainReport) {
        let cfg = self.config;
        let keep: Vec<f64> = self
            .vocab
            .entries()
            .iter()
            .map(|(_, c)| keep_probability(*c, self.vocab.total_tokens().max(*c), cfg.sample))
            .collect();
        let input = HogwildMatrix::new(input);
        let output = HogwildMatrix::new(output);
        let ranges = self.corpus.partition(cfg.workers);
        let mut rngs: Vec<ChaCha8Rng> = (0..ranges.len())
            .map(|w| worker_rng(cfg.seed, w as u64 + 1))
            .collect();
        let total_work = (cfg.epochs * self.corpus.num_tokens()).max(1) as f64;
        let processed = AtomicU64::new(0);
        let mut report = TrainReport::default();

        for _ in 0..cfg.epochs {
            let results: Vec<(f64, u64)> = std::thread::scope(|s| {
                let handles: Vec<_> = ranges
                    .iter()
                    .cloned()
                    .zip(rngs.iter_mut())
                    .map(|(range, rng)| {
                        let mut worker = Worker {
                            input: input.clone(),
                            output: output.clone(),
                            rep: vec![F::zero(); cfg.dim],
                            step: vec![F::zero(); cfg.dim],
                            rows: Vec::new(),
                            negs: Vec::new(),
                            kept: Vec::new(),
                        };
                        let keep = &keep;
                        let processed = &processed;
                        s.spawn(move || {
                            self.run_range(&mut worker, range, rng, keep, processed, total_work)
                        })
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("training worker panicked"))
                    .collect()
            });
            let (loss, steps) = results
                .iter()
                .fold((0.0, 0u64), |(l, n), (wl, wn)| (l + wl, n + wn));
            report
                .epoch_loss
                .push(if steps > 0 { loss / steps as f64 } else { 0.0 });
        }
        (input.into_inner(), output.into_inner(), report)
    }

    fn run_range<F: Real>(
        &self,
        w: &mut Worker<F>,
        range: Range<usize>,
        rng: &mut ChaCha8Rng,
        keep: &[f64],
        processed: &AtomicU64,
        total_work: f64,
    ) -> (f64, u64) {
        let cfg = self.config;
        let mean_gradient = self.sets.mean_gradient();
        let mut loss_sum = 0.0;
        let mut steps = 0u64;

        for si in range {
            let sentence = self.corpus.sentence(si);
            let done = processed.fetch_add(sentence.len() as u64, Ordering::Relaxed);
            let lr = F::of(linear_lr(done as f64 / total_work, cfg.lr));

            w.kept.clear();
            for &id in sentence {
                let p = keep[id as usize];
                if p >= 1.0 || rng.gen::<f64>() < p {
                    w.kept.push(id);
                }
            }

            for pos in 0..w.kept.len() {
                let b = rng.gen_range(1..=cfg.window);
                let lo = pos.saturating_sub(b);
                let hi = (pos + b).min(w.kept.len() - 1);
                let center = w.kept[pos] as usize;
                match cfg.architecture {
                    Architecture::Skipgram => {
                        for c in lo..=hi {
                            if c == pos {
                                continue;
                            }
                            let context = w.kept[c] as usize;
                            let rows = self.sets.rows(center);
                            loss_sum += self.step(w, rows, context, lr, mean_gradient, rng, false);
                            steps += 1;
                        }
                    }
                    Architecture::Cbow => {
                        w.rows.clear();
                        for c in lo..=hi {
                            if c != pos {
                                w.rows.extend_from_slice(self.sets.rows(w.kept[c] as usize));
                            }
                        }
                        if w.rows.is_empty() {
                            continue;
                        }
                        loss_sum += self.step(w, &[], center, lr, mean_gradient, rng, true);
                        steps += 1;
                    }
                }
            }
        }
        (loss_sum, steps)
    }

    /// `use_buffer` selects `w.rows` as the input set instead of `rows`.
    #[allow(clippy::too_many_arguments)]
    #[inline]
    fn step<F: Real>(
        &self,
        w: &mut Worker<F>,
        rows: &[u32],
        target: usize,
        lr: F,
        mean_gradient: bool,
        rng: &mut ChaCha8Rng,
        use_buffer: bool,
    ) -> f64 {
        let target = match self.layer {
            OutputLayer::Negative { sampler, negatives } => {
                w.negs.clear();
                for _ in 0..negatives {
                    if let Some(n) = sampler.sample_excluding(rng, target) {
                        w.negs.push(n);
                    }
                }
                Target::Negative {
                    word: target,
                    negatives: &w.negs,
                }
            }
            OutputLayer::Hierarchical { huffman } => Target::Hierarchical {
                code: huffman.code(target),
                path: huffman.path(target),
            },
        };
        let rows = if use_buffer { &w.rows[..] } else { rows };
        composed_step(
            &mut w.input,
            &mut w.output,
            rows,
            target,
            lr,
            mean_gradient,
            &mut w.rep,
            &mut w.step,
        )
        .as_f64()
    }
}
