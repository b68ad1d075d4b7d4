use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::Vocabulary;

/// Binary codes and inner-node paths for hierarchical softmax.
///
/// `path(w)[j]` is the inner node whose decision emits `code(w)[j]`, listed
/// root first. Inner nodes are numbered `0..vocab_size - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HuffmanCoding {
    codes: Vec<Vec<u8>>,
    paths: Vec<Vec<u32>>,
}

impl HuffmanCoding {
    pub fn code(&self, word: usize) -> &[u8] {
        &self.codes[word]
    }

    pub fn path(&self, word: usize) -> &[u32] {
        &self.paths[word]
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    /// Number of inner nodes, i.e. rows of the hierarchical-softmax output matrix.
    pub fn inner_nodes(&self) -> usize {
        self.codes.len().saturating_sub(1)
    }
}

/// Huffman tree over word counts, merging the two lightest nodes first.
///
/// On equal weight the lower node id is merged first and becomes the left
/// (bit 0) child. Leaves are word ids; the `k`-th merge creates node
/// `vocab_size + k`. A single-word vocabulary gets an empty code.
pub fn build_huffman(vocab: &Vocabulary) -> HuffmanCoding {
    let counts: Vec<u64> = vocab.entries().iter().map(|(_, c)| *c).collect();
    huffman_from_counts(&counts)
}

/// Same as [`build_huffman`] over raw counts in id order.
pub fn huffman_from_counts(counts: &[u64]) -> HuffmanCoding {
    let n = counts.len();
    if n <= 1 {
        return HuffmanCoding {
            codes: vec![Vec::new(); n],
            paths: vec![Vec::new(); n],
        };
    }

    let total_nodes = 2 * n - 1;
    let mut parent = vec![0usize; total_nodes];
    let mut bit = vec![0u8; total_nodes];
    let mut heap: BinaryHeap<Reverse<(u64, usize)>> = counts
        .iter()
        .enumerate()
        .map(|(id, &c)| Reverse((c, id)))
        .collect();

    for node in n..total_nodes {
        let Reverse((wa, a)) = heap.pop().expect("two nodes remain");
        let Reverse((wb, b)) = heap.pop().expect("two nodes remain");
        parent[a] = node;
        parent[b] = node;
        bit[b] = 1;
        heap.push(Reverse((wa + wb, node)));
    }

    let root = total_nodes - 1;
    let mut codes = Vec::with_capacity(n);
    let mut paths = Vec::with_capacity(n);
    for leaf in 0..n {
        let mut code = Vec::new();
        let mut path = Vec::new();
        let mut node = leaf;
        while node != root {
            code.push(bit[node]);
            node = parent[node];
            path.push((node - n) as u32);
        }
        code.reverse();
        path.reverse();
        codes.push(code);
        paths.push(path);
    }
    HuffmanCoding { codes, paths }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Minimal Σ count·len over all complete prefix codes, by exhaustive
    /// search over non-decreasing length assignments to counts sorted in
    /// descending order (an optimal code can always be rearranged that way).
    pub(crate) fn brute_force_cost(counts: &[u64]) -> u64 {
        let mut sorted = counts.to_vec();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        let n = sorted.len();
        if n == 1 {
            return 0;
        }
        fn go(sorted: &[u64], i: usize, min_len: u32, kraft: f64, cost: u64, best: &mut u64) {
            if i == sorted.len() {
                if (kraft - 1.0).abs() < 1e-12 {
                    *best = (*best).min(cost);
                }
                return;
            }
            for len in min_len..sorted.len() as u32 {
                let k = kraft + 0.5f64.powi(len as i32);
                if k > 1.0 + 1e-12 {
                    continue;
                }
                go(sorted, i + 1, len, k, cost + sorted[i] * len as u64, best);
            }
        }
        let mut best = u64::MAX;
        go(&sorted, 0, 1, 0.0, 0, &mut best);
        best
    }

    fn lengths(h: &HuffmanCoding) -> Vec<usize> {
        (0..h.len()).map(|w| h.code(w).len()).collect()
    }

    #[test]
    fn three_words() {
        // c:10, a:5, b:5 in id order
        let h = huffman_from_counts(&[10, 5, 5]);
        assert_eq!(lengths(&h), vec![1, 2, 2]);
        assert_eq!(brute_force_cost(&[10, 5, 5]), 30);
    }

    #[test]
    fn two_words() {
        let h = huffman_from_counts(&[1, 1]);
        assert_eq!(lengths(&h), vec![1, 1]);
        assert_ne!(h.code(0), h.code(1));
        assert_eq!(h.path(0), &[0]);
        assert_eq!(h.path(1), &[0]);
        // lower id merged first goes left
        assert_eq!(h.code(0), &[0]);
    }

    #[test]
    fn single_word_is_degenerate() {
        let h = huffman_from_counts(&[7]);
        assert!(h.code(0).is_empty());
        assert_eq!(h.inner_nodes(), 0);
    }

    #[test]
    fn root_is_last_inner_node() {
        let h = huffman_from_counts(&[9, 7, 4, 3, 1]);
        for w in 0..5 {
            assert_eq!(h.path(w)[0], 3);
        }
    }

    proptest! {
        #[test]
        fn optimal_and_complete(counts in prop::collection::vec(1u64..100, 1..=8)) {
            let h = huffman_from_counts(&counts);
            let cost: u64 = counts.iter().zip(lengths(&h)).map(|(c, l)| c * l as u64).sum();
            prop_assert_eq!(cost, brute_force_cost(&counts));
            if counts.len() > 1 {
                let kraft: f64 = lengths(&h).iter().map(|&l| 0.5f64.powi(l as i32)).sum();
                prop_assert_eq!(kraft, 1.0);
            }
            for w in 0..counts.len() {
                prop_assert_eq!(h.code(w).len(), h.path(w).len());
                prop_assert!(h.path(w).iter().all(|&p| (p as usize) < counts.len() - 1));
                for v in 0..counts.len() {
                    if v != w {
                        prop_assert!(!h.code(v).starts_with(h.code(w)), "prefix violation");
                    }
                }
            }
        }
    }
}
