//! Lock-free shared parameter storage for multi-worker SGD.
//!
//! Workers update rows of the same matrix without synchronization. Updates
//! are sparse (a handful of rows per step), so lost or torn writes are rare
//! and tolerated, as in the reference word2vec/GloVe/fastText trainers.
//! Single-worker runs go through the same type and are fully deterministic.

use std::cell::UnsafeCell;
use std::sync::Arc;

use crate::matrix::{Matrix, ParamRows};
use crate::Real;

struct Shared<F>(UnsafeCell<Matrix<F>>);

// Concurrent row writes are the point of this type; see module docs.
unsafe impl<F: Send> Send for Shared<F> {}
unsafe impl<F: Send> Sync for Shared<F> {}

/// Handle onto a matrix shared between workers. Cloning yields another
/// handle onto the same storage.
pub struct HogwildMatrix<F>(Arc<Shared<F>>);

impl<F> Clone for HogwildMatrix<F> {
    fn clone(&self) -> Self {
        HogwildMatrix(Arc::clone(&self.0))
    }
}

impl<F: Real> HogwildMatrix<F> {
    pub fn new(m: Matrix<F>) -> Self {
        HogwildMatrix(Arc::new(Shared(UnsafeCell::new(m))))
    }

    #[inline]
    fn inner(&self) -> &Matrix<F> {
        unsafe { &*self.0 .0.get() }
    }

    #[inline]
    fn inner_mut(&mut self) -> &mut Matrix<F> {
        unsafe { &mut *self.0 .0.get() }
    }

    pub fn rows(&self) -> usize {
        self.inner().rows()
    }

    /// Recover the matrix once every other handle has been dropped.
    pub fn into_inner(self) -> Matrix<F> {
        match Arc::try_unwrap(self.0) {
            Ok(shared) => shared.0.into_inner(),
            Err(_) => panic!("HogwildMatrix still shared"),
        }
    }
}

impl<F: Real> ParamRows<F> for HogwildMatrix<F> {
    #[inline]
    fn row(&self, i: usize) -> &[F] {
        self.inner().row(i)
    }

    #[inline]
    fn row_mut(&mut self, i: usize) -> &mut [F] {
        self.inner_mut().row_mut(i)
    }
}
