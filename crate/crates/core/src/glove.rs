//! Distance-weighted co-occurrence extraction and the AdaGrad GloVe fit.

use std::collections::HashMap;
use std::io::{Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use rand::seq::SliceRandom;

use crate::config::{Algorithm, TrainConfig};
use crate::corpus::EncodedCorpus;
use crate::error::{Error, Result};
use crate::hogwild::HogwildMatrix;
use crate::matrix::{Matrix, ParamRows};
use crate::model::EmbeddingModel;
use crate::scalar::dot;
use crate::sgd::worker_rng;
use crate::vocab::Vocabulary;
use crate::Real;

/// Accumulated weight of word `j` appearing in the context of word `i`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CooccurrenceRecord {
    pub i: u32,
    pub j: u32,
    pub x: f64,
}

/// Size of one record in the binary co-occurrence file.
pub const RECORD_BYTES: usize = 16;

/// Co-occurrence records sorted by `(i, j)`.
///
/// For every pair of tokens at distance `d <= window` on the same line,
/// `1/d` is added to both `X(i, j)` and `X(j, i)`.
///
/// For windows up to 22 the sums are kept as integers in units of
/// `1/lcm(1..=window)`, so every weight is the correctly rounded value of
/// the exact sum regardless of traversal order. Wider windows sum in `f64`.
pub fn build_cooccurrence(corpus: &EncodedCorpus, window: usize) -> Vec<CooccurrenceRecord> {
    match lcm_upto(window) {
        Some(unit) => accumulate(
            corpus,
            window,
            |d| unit / d as u64,
            |x: u64| x as f64 / unit as f64,
        ),
        None => accumulate(corpus, window, |d| 1.0 / d as f64, |x: f64| x),
    }
}

fn accumulate<T, W, X>(
    corpus: &EncodedCorpus,
    window: usize,
    weight: W,
    finish: X,
) -> Vec<CooccurrenceRecord>
where
    T: Copy + Default + std::ops::AddAssign,
    W: Fn(usize) -> T,
    X: Fn(T) -> f64,
{
    let weights: Vec<T> = (0..=window)
        .map(|d| if d == 0 { T::default() } else { weight(d) })
        .collect();
    let mut table: HashMap<(u32, u32), T> = HashMap::new();
    for sentence in corpus.sentences() {
        for (pos, &right) in sentence.iter().enumerate() {
            for d in 1..=window.min(pos) {
                let left = sentence[pos - d];
                *table.entry((left, right)).or_default() += weights[d];
                *table.entry((right, left)).or_default() += weights[d];
            }
        }
    }
    let mut records: Vec<CooccurrenceRecord> = table
        .into_iter()
        .map(|((i, j), x)| CooccurrenceRecord { i, j, x: finish(x) })
        .collect();
    records.sort_unstable_by_key(|r| (r.i, r.j));
    records
}

/// `lcm(1, ..., n)` if it is at most `2^32`.
fn lcm_upto(n: usize) -> Option<u64> {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    let mut l: u64 = 1;
    for k in 1..=n as u64 {
        l = l / gcd(l, k) * k;
        if l > 1 << 32 {
            return None;
        }
    }
    Some(l)
}

/// Little-endian `(u32 i, u32 j, f64 x)` triples.
pub fn write_records<W: Write>(records: &[CooccurrenceRecord], w: &mut W) -> Result<()> {
    for r in records {
        w.write_u32::<LittleEndian>(r.i)?;
        w.write_u32::<LittleEndian>(r.j)?;
        w.write_f64::<LittleEndian>(r.x)?;
    }
    Ok(())
}

pub fn read_records<R: Read>(r: &mut R) -> Result<Vec<CooccurrenceRecord>> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() % RECORD_BYTES != 0 {
        return Err(Error::Format(format!(
            "co-occurrence file length {} is not a multiple of {RECORD_BYTES}",
            bytes.len()
        )));
    }
    let mut cur = &bytes[..];
    let mut out = Vec::with_capacity(bytes.len() / RECORD_BYTES);
    while !cur.is_empty() {
        let i = cur.read_u32::<LittleEndian>()?;
        let j = cur.read_u32::<LittleEndian>()?;
        let x = cur.read_f64::<LittleEndian>()?;
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::Format(format!(
                "record {} has weight {x}",
                out.len()
            )));
        }
        out.push(CooccurrenceRecord { i, j, x });
    }
    Ok(out)
}

/// `(x / xmax)^alpha`, capped at 1.
pub fn glove_weight(x: f64, xmax: f64, alpha: f64) -> f64 {
    if x < xmax {
        (x / xmax).powf(alpha)
    } else {
        1.0
    }
}

/// GloVe parameters. Each row is a vector followed by its bias, so row
/// width is `dim + 1`; `main` holds the word vectors, `context` the
/// context vectors, and the `*_gradsq` matrices their AdaGrad accumulators.
pub struct GloveParams<M> {
    pub main: M,
    pub context: M,
    pub main_gradsq: M,
    pub context_gradsq: M,
}

/// Cost of one record and its gradients.
#[derive(Clone, Debug, PartialEq)]
pub struct GloveGradient<F> {
    pub cost: F,
    /// Gradient w.r.t. the main row (vector then bias).
    pub main: Vec<F>,
    /// Gradient w.r.t. the context row (vector then bias).
    pub context: Vec<F>,
}

/// `f(x) · (w·w̃ + b + b̃ - ln x)²` and its exact gradient.
pub fn glove_gradient<F: Real>(
    record: &CooccurrenceRecord,
    main: &[F],
    context: &[F],
    xmax: f64,
    alpha: f64,
) -> GloveGradient<F> {
    let dim = main.len() - 1;
    let residual =
        dot(&main[..dim], &context[..dim]) + main[dim] + context[dim] - F::of(record.x.ln());
    let weight = F::of(glove_weight(record.x, xmax, alpha));
    let coef = F::of(2.0) * weight * residual;
    let mut gm: Vec<F> = context[..dim].iter().map(|&c| coef * c).collect();
    gm.push(coef);
    let mut gc: Vec<F> = main[..dim].iter().map(|&m| coef * m).collect();
    gc.push(coef);
    GloveGradient {
        cost: weight * residual * residual,
        main: gm,
        context: gc,
    }
}

/// One AdaGrad step on a record; returns the record's cost before the step.
///
/// Each coordinate moves by `-lr · g / sqrt(G)`, then `G += g²`.
pub fn glove_step<F: Real, M: ParamRows<F>>(
    record: &CooccurrenceRecord,
    params: &mut GloveParams<M>,
    lr: F,
    xmax: f64,
    alpha: f64,
) -> F {
    let (i, j) = (record.i as usize, record.j as usize);
    let grad = glove_gradient(
        record,
        params.main.row(i),
        params.context.row(j),
        xmax,
        alpha,
    );
    if grad.cost == F::zero() {
        return grad.cost;
    }
    adagrad(
        params.main.row_mut(i),
        params.main_gradsq.row_mut(i),
        &grad.main,
        lr,
    );
    adagrad(
        params.context.row_mut(j),
        params.context_gradsq.row_mut(j),
        &grad.context,
        lr,
    );
    grad.cost
}

#[inline]
fn adagrad<F: Real>(w: &mut [F], gradsq: &mut [F], grad: &[F], lr: F) {
    for ((w, g2), &g) in w.iter_mut().zip(gradsq.iter_mut()).zip(grad) {
        *w -= lr * g / g2.sqrt();
        *g2 += g * g;
    }
}

impl<F: Real> GloveParams<Matrix<F>> {
    /// Vectors and biases uniform in `[-0.5/(dim+1), 0.5/(dim+1))`,
    /// accumulators at 1.
    pub fn init(vocab_size: usize, dim: usize, seed: u64) -> Self {
        let mut rng = worker_rng(seed, 0);
        let bound = 0.5 / (dim + 1) as f64;
        let ones = || Matrix::from_vec(vocab_size, dim + 1, vec![F::one(); vocab_size * (dim + 1)]);
        GloveParams {
            main: Matrix::uniform(vocab_size, dim + 1, bound, &mut rng),
            context: Matrix::uniform(vocab_size, dim + 1, bound, &mut rng),
            main_gradsq: ones(),
            context_gradsq: ones(),
        }
    }

    /// Sum of record costs at the current parameters.
    pub fn total_cost(&self, records: &[CooccurrenceRecord], xmax: f64, alpha: f64) -> F {
        records
            .iter()
            .map(|r| {
                glove_gradient(
                    r,
                    self.main.row(r.i as usize),
                    self.context.row(r.j as usize),
                    xmax,
                    alpha,
                )
                .cost
            })
            .sum()
    }

    /// Published vectors: `w + w̃` for every word, biases dropped.
    pub fn word_vectors(&self) -> Matrix<F> {
        let (n, dim) = (self.main.rows(), self.main.cols() - 1);
        let mut data = Vec::with_capacity(n * dim);
        for i in 0..n {
            let (m, c) = (self.main.row(i), self.context.row(i));
            data.extend((0..dim).map(|k| m[k] + c[k]));
        }
        Matrix::from_vec(n, dim, data)
    }
}

/// Per-epoch GloVe costs (sum over records, measured during the pass).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GloveReport {
    pub epoch_cost: Vec<f64>,
}

pub fn train_glove<F: Real>(
    records: &[CooccurrenceRecord],
    vocab: &Vocabulary,
    config: &TrainConfig,
) -> Result<EmbeddingModel<F>> {
    train_glove_with_report(records, vocab, config).map(|(m, _)| m)
}

/// Fit GloVe vectors. Records are reshuffled every epoch under the seed;
/// workers take contiguous chunks of the shuffled order. The model's input
/// matrix holds `w + w̃`; its output matrix is empty.
pub fn train_glove_with_report<F: Real>(
    records: &[CooccurrenceRecord],
    vocab: &Vocabulary,
    config: &TrainConfig,
) -> Result<(EmbeddingModel<F>, GloveReport)> {
    if config.algorithm != Algorithm::Glove {
        return Err(Error::Config(format!(
            "expected a glove config, got {}",
            config.algorithm
        )));
    }
    config.validate()?;
    if records.is_empty() {
        return Err(Error::EmptyInput("no co-occurrence records".into()));
    }
    let v = vocab.len();
    if records
        .iter()
        .any(|r| r.i as usize >= v || r.j as usize >= v)
    {
        return Err(Error::Config(
            "record ids exceed the vocabulary size".into(),
        ));
    }

    let (params, report) = fit(
        records,
        GloveParams::init(v, config.dim, config.seed),
        config,
    );
    let model = EmbeddingModel {
        config: config.clone(),
        vocab: vocab.clone(),
        input: params.word_vectors(),
        output: Matrix::zeros(0, config.dim),
    };
    if !model.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok((model, report))
}

/// Run the configured epochs on `params`.
pub fn fit<F: Real>(
    records: &[CooccurrenceRecord],
    params: GloveParams<Matrix<F>>,
    config: &TrainConfig,
) -> (GloveParams<Matrix<F>>, GloveReport) {
    let shared = GloveParams {
        main: HogwildMatrix::new(params.main),
        context: HogwildMatrix::new(params.context),
        main_gradsq: HogwildMatrix::new(params.main_gradsq),
        context_gradsq: HogwildMatrix::new(params.context_gradsq),
    };
    let mut order: Vec<usize> = (0..records.len()).collect();
    let mut shuffle_rng = worker_rng(config.seed, 1);
    let workers = config.workers.clamp(1, records.len());
    let chunk = records.len().div_ceil(workers);
    let lr = F::of(config.lr);
    let (xmax, alpha) = (config.xmax, config.weight_exponent);
    let mut report = GloveReport::default();

    for _ in 0..config.epochs {
        order.shuffle(&mut shuffle_rng);
        let cost: f64 = std::thread::scope(|s| {
            let handles: Vec<_> = order
                .chunks(chunk)
                .map(|part| {
                    let mut local = GloveParams {
                        main: shared.main.clone(),
                        context: shared.context.clone(),
                        main_gradsq: shared.main_gradsq.clone(),
                        context_gradsq: shared.context_gradsq.clone(),
                    };
                    s.spawn(move || {
                        part.iter()
                            .map(|&k| glove_step(&records[k], &mut local, lr, xmax, alpha).as_f64())
                            .sum::<f64>()
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("glove worker panicked"))
                .sum()
        });
        report.epoch_cost.push(cost);
    }

    let params = GloveParams {
        main: shared.main.into_inner(),
        context: shared.context.into_inner(),
        main_gradsq: shared.main_gradsq.into_inner(),
        context_gradsq: shared.context_gradsq.into_inner(),
    };
    (params, report)
}
