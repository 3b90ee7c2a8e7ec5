//! Cholesky factorisation of symmetric positive definite band matrices.

use crate::error::{Error, Result};

/// Lower Cholesky factor of an SPD matrix with half bandwidth `bw`
/// (`a[i][j] == 0` whenever `|i - j| > bw`).
#[derive(Clone, Debug)]
pub struct BandCholesky {
    n: usize,
    bw: usize,
    /// `l[i * (bw + 1) + (bw - (i - j))] = L[i][j]` for `i - bw <= j <= i`.
    l: Vec<f64>,
}

impl BandCholesky {
    /// Factor the matrix whose entries are produced by `entry(i, j)`; only
    /// the lower band `j <= i, i - j <= bw` is queried.
    pub fn factor(n: usize, bw: usize, entry: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let w = bw + 1;
        let mut l = vec![0.0; n * w];
        for i in 0..n {
            let j0 = i.saturating_sub(bw);
            for j in j0..=i {
                let mut sum = entry(i, j);
                let k0 = j0.max(j.saturating_sub(bw));
                for k in k0..j {
                    sum -= l[i * w + bw - (i - k)] * l[j * w + bw - (j - k)];
                }
                if i == j {
                    if !(sum > 0.0) || !sum.is_finite() {
                        return Err(Error::SingularBlock {
                            pivot: i,
                            value: sum,
                        });
                    }
                    l[i * w + bw] = sum.sqrt();
                } else {
                    l[i * w + bw - (i - j)] = sum / l[j * w + bw];
                }
            }
        }
        Ok(BandCholesky { n, bw, l })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Overwrite `b` with `A⁻¹ b`.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        debug_assert_eq!(b.len(), self.n);
        let (bw, w) = (self.bw, self.bw + 1);
        for i in 0..self.n {
            let mut sum = b[i];
            for k in i.saturating_sub(bw)..i {
                sum -= self.l[i * w + bw - (i - k)] * b[k];
            }
            b[i] = sum / self.l[i * w + bw];
        }
        for i in (0..self.n).rev() {
            let mut sum = b[i];
            for k in i + 1..(i + bw + 1).min(self.n) {
                sum -= self.l[k * w + bw - (k - i)] * b[k];
            }
            b[i] = sum / self.l[i * w + bw];
        }
    }
}
