use rand::Rng;

use super::Vocabulary;

/// Default exponent applied to counts for the noise distribution.
pub const DEFAULT_NS_POWER: f64 = 0.75;

/// Noise distribution `p(w) ∝ count(w)^power`, drawn in O(1) with Vose's
/// alias method.
///
/// The sampler is immutable; callers bring their own RNG so each worker
/// keeps an independent stream.
#[derive(Clone, Debug)]
pub struct NegativeSampler {
    probs: Vec<f64>,
    accept: Vec<f64>,
    alias: Vec<u32>,
}

pub fn build_negative_sampler(vocab: &Vocabulary, power: f64) -> NegativeSampler {
    let weights: Vec<f64> = vocab
        .entries()
        .iter()
        .map(|(_, c)| (*c as f64).powf(power))
        .collect();
    NegativeSampler::from_weights(&weights)
}

impl NegativeSampler {
    /// Build from non-negative, not all zero weights.
    pub fn from_weights(weights: &[f64]) -> Self {
        let n = weights.len();
        assert!(n > 0, "sampler needs at least one outcome");
        let total: f64 = weights.iter().sum();
        assert!(
            total > 0.0 && total.is_finite(),
            "weights must have a positive finite sum"
        );
        let probs: Vec<f64> = weights.iter().map(|w| w / total).collect();

        let mut accept: Vec<f64> = probs.iter().map(|p| p * n as f64).collect();
        let mut alias: Vec<u32> = (0..n as u32).collect();
        let mut small = Vec::new();
        let mut large = Vec::new();
        for (i, &a) in accept.iter().enumerate() {
            if a < 1.0 {
                small.push(i);
            } else {
                large.push(i);
            }
        }
        while let (Some(&s), Some(&l)) = (small.last(), large.last()) {
            small.pop();
            alias[s] = l as u32;
            accept[l] -= 1.0 - accept[s];
            if accept[l] < 1.0 {
                large.pop();
                small.push(l);
            }
        }
        // Leftovers are numerically 1.
        for i in small.into_iter().chain(large) {
            accept[i] = 1.0;
        }
        NegativeSampler {
            probs,
            accept,
            alias,
        }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probability(&self, id: usize) -> f64 {
        self.probs[id]
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let i = rng.gen_range(0..self.accept.len());
        if rng.gen::<f64>() < self.accept[i] {
            i
        } else {
            self.alias[i] as usize
        }
    }

    /// Draw until the outcome differs from `target`. `None` when no other
    /// outcome exists.
    #[inline]
    pub fn sample_excluding<R: Rng + ?Sized>(&self, rng: &mut R, target: usize) -> Option<usize> {
        if self.accept.len() < 2 {
            return None;
        }
        loop {
            let s = self.sample(rng);
            if s != target {
                return Some(s);
            }
        }
    }
}
