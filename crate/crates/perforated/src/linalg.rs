//! Dense LU helpers shared by the bordered solves.

use nalgebra::{DMatrix, DVector, Dyn, LU};

use crate::error::{Error, Result};

/// An LU factorization that refuses numerically singular matrices.
pub struct Factored {
    lu: LU<f64, Dyn, Dyn>,
    n: usize,
}

/// Relative pivot size below which a factorization is declared singular.
const PIVOT_FLOOR: f64 = 1e-14;

impl Factored {
    pub fn new(a: DMatrix<f64>, what: &str) -> Result<Self> {
        let n = a.nrows();
        if n != a.ncols() {
            return Err(Error::InvalidInput(format!("{what}: matrix not square")));
        }
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::Singular(format!("{what}: non-finite entries")));
        }
        let scale = a.amax();
        let lu = a.lu();
        let smallest = lu.u().diagonal().amin();
        if !(smallest > PIVOT_FLOOR * scale) {
            return Err(Error::Singular(format!(
                "{what}: pivot {smallest:.3e} against scale {scale:.3e}"
            )));
        }
        Ok(Factored { lu, n })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let b = DVector::from_column_slice(rhs);
        self.lu
            .solve(&b)
            .map(|x| x.as_slice().to_vec())
            .ok_or_else(|| Error::Singular("LU solve failed".into()))
    }
}

/// 2-norm condition number of a small matrix.
pub fn condition_number(a: &DMatrix<f64>) -> f64 {
    let sv = a.clone().singular_values();
    let max = sv.max();
    let min = sv.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Largest absolute entry of `a·x − b`.
pub fn residual(a: &DMatrix<f64>, x: &[f64], b: &[f64]) -> f64 {
    let ax = a * DVector::from_column_slice(x);
    ax.iter()
        .zip(b)
        .map(|(l, r)| (l - r).abs())
        .fold(0.0, f64::max)
}
