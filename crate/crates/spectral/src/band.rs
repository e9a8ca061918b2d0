//! Symmetric banded Cholesky. Grid meshes keep the half bandwidth near the
//! angular resolution, so the factorization runs in O(n b^2) and never
//! allocates beyond the band.

#[derive(Clone, Debug)]
pub struct BandMatrix {
    pub n: usize,
    pub half_bandwidth: usize,
    // Row-major lower band: entry (i, j) with i-b <= j <= i sits at
    // data[i*(b+1) + (j - i + b)].
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, half_bandwidth: usize) -> Self {
        BandMatrix {
            n,
            half_bandwidth,
            data: vec![0.0; n * (half_bandwidth + 1)],
        }
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(j <= i && i - j <= self.half_bandwidth);
        i * (self.half_bandwidth + 1) + (j + self.half_bandwidth - i)
    }

    #[cfg(test)]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        if hi - lo > self.half_bandwidth {
            0.0
        } else {
            self.data[self.slot(hi, lo)]
        }
    }

    #[cfg(test)]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        let s = self.slot(hi, lo);
        self.data[s] = value;
    }

    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        let s = self.slot(hi, lo);
        self.data[s] += value;
    }

    /// In-place lower Cholesky factor. Fails on a non positive pivot, which
    /// for our use means the shifted operator was not positive definite.
    pub fn cholesky(mut self) -> Result<BandCholesky, usize> {
        let b = self.half_bandwidth;
        for i in 0..self.n {
            let lo = i.saturating_sub(b);
            for j in lo..=i {
                let mut sum = self.data[self.slot(i, j)];
                let kmin = lo.max(j.saturating_sub(b));
                for k in kmin..j {
                    sum -= self.data[self.slot(i, k)] * self.data[self.slot(j, k)];
                }
                if i == j {
                    if sum <= 0.0 {
                        return Err(i);
                    }
                    let s = self.slot(i, i);
                    self.data[s] = sum.sqrt();
                } else {
                    let piv = self.data[self.slot(j, j)];
                    let s = self.slot(i, j);
                    self.data[s] = sum / piv;
                }
            }
        }
        Ok(BandCholesky { factor: self })
    }
}

pub struct BandCholesky {
    factor: BandMatrix,
}

impl BandCholesky {
    /// Solves L L^T x = rhs.
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let f = &self.factor;
        let b = f.half_bandwidth;
        let n = f.n;
        let mut x = rhs.to_vec();
        for i in 0..n {
            let lo = i.saturating_sub(b);
            let mut sum = x[i];
            for j in lo..i {
                sum -= f.data[f.slot(i, j)] * x[j];
            }
            x[i] = sum / f.data[f.slot(i, i)];
        }
        for i in (0..n).rev() {
            let hi = (i + b).min(n - 1);
            let mut sum = x[i];
            for j in (i + 1)..=hi {
                sum -= f.data[f.slot(j, i)] * x[j];
            }
            x[i] = sum / f.data[f.slot(i, i)];
        }
        x
    }
}
