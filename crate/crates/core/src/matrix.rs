use rand::Rng;

use crate::Real;

/// Dense row-major matrix; one row per word or subword bucket.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<F> {
    data: Vec<F>,
    rows: usize,
    cols: usize,
}

impl<F: Real> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            data: vec![F::zero(); rows * cols],
            rows,
            cols,
        }
    }

    /// Entries drawn uniformly from `[-bound, bound)`.
    pub fn uniform<R: Rng>(rows: usize, cols: usize, bound: f64, rng: &mut R) -> Self {
        let data = (0..rows * cols)
            .map(|_| F::of((rng.gen::<f64>() - 0.5) * 2.0 * bound))
            .collect();
        Matrix { data, rows, cols }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<F>) -> Self {
        assert_eq!(rows * cols, data.len(), "matrix data does not match shape");
        Matrix { data, rows, cols }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[F] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [F] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<F> {
        self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [F] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[F]> {
        // chunks() panics on zero width
        self.data.chunks(self.cols.max(1)).take(self.rows)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// Keep only the first `rows` rows.
    pub fn truncate_rows(&mut self, rows: usize) {
        if rows < self.rows {
            self.data.truncate(rows * self.cols);
            self.rows = rows;
        }
    }

    pub fn cast<G: Real>(&self) -> Matrix<G> {
        Matrix {
            data: self.data.iter().map(|&x| G::of(x.as_f64())).collect(),
            rows: self.rows,
            cols: self.cols,
        }
    }
}

/// Row access used by the SGD kernels.
///
/// Implemented by plain matrices and by per-worker handles onto a shared
/// matrix, so the same update code runs in single- and multi-worker mode.
pub trait ParamRows<F> {
    fn row(&self, i: usize) -> &[F];
    fn row_mut(&mut self, i: usize) -> &mut [F];
}

impl<F: Real> ParamRows<F> for Matrix<F> {
    #[inline]
    fn row(&self, i: usize) -> &[F] {
        Matrix::row(self, i)
    }

    #[inline]
    fn row_mut(&mut self, i: usize) -> &mut [F] {
        Matrix::row_mut(self, i)
    }
}
