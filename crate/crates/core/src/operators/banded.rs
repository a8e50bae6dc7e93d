//! Band storage, matrix-vector products and LU with partial pivoting.

use crate::error::{Error, Result};

/// Square band matrix with `kl` sub- and `ku` super-diagonals.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    // row-major, entry (i, j) at i * width + (j + kl - i)
    data: Vec<f64>,
}

impl BandedMatrix {
    /// Builds a band matrix from sparse rows `(column, value)`; duplicate
    /// columns are summed.
    pub fn from_rows(rows: &[Vec<(usize, f64)>]) -> Self {
        let n = rows.len();
        let (mut kl, mut ku) = (0usize, 0usize);
        for (i, row) in rows.iter().enumerate() {
            for &(j, _) in row {
                assert!(j < n, "column {j} out of range");
                if j < i {
                    kl = kl.max(i - j);
                } else {
                    ku = ku.max(j - i);
                }
            }
        }
        let mut m = Self {
            n,
            kl,
            ku,
            data: vec![0.0; n * (kl + ku + 1)],
        };
        for (i, row) in rows.iter().enumerate() {
            for &(j, v) in row {
                *m.entry_mut(i, j) += v;
            }
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            kl: 0,
            ku: 0,
            data: vec![1.0; n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.kl.max(self.ku)
    }

    pub fn lower(&self) -> usize {
        self.kl
    }

    pub fn upper(&self) -> usize {
        self.ku
    }

    fn width(&self) -> usize {
        self.kl + self.ku + 1
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j + self.kl < i || j > i + self.ku {
            0.0
        } else {
            self.data[i * self.width() + j + self.kl - i]
        }
    }

    fn entry_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        let w = self.width();
        &mut self.data[i * w + j + self.kl - i]
    }

    fn row_range(&self, i: usize) -> std::ops::Range<usize> {
        i.saturating_sub(self.kl)..(i + self.ku + 1).min(self.n)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| self.row_range(i).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut m = self.clone();
        m.data.iter_mut().for_each(|v| *v *= c);
        m
    }

    /// `I + c * self`
    pub fn shifted_identity(&self, c: f64) -> Self {
        let mut m = self.scaled(c);
        for i in 0..self.n {
            *m.entry_mut(i, i) += 1.0;
        }
        m
    }

    /// Replaces row `i` by the unit row `e_i`.
    pub fn set_identity_row(&mut self, i: usize) {
        for j in self.row_range(i) {
            *self.entry_mut(i, j) = if i == j { 1.0 } else { 0.0 };
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn factor(&self) -> Result<BandedLu> {
        BandedLu::new(self)
    }
}

/// Gaussian elimination with partial pivoting in band storage (LAPACK
/// `gbtrf` layout: the upper band grows to `kl + ku` under row swaps).
#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    data: Vec<f64>,
    pivots: Vec<usize>,
}

impl BandedLu {
    // self.ku already includes the fill-in from pivoting
    fn width(&self) -> usize {
        self.kl + self.ku + 1
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.width() + j + self.kl - i
    }

    pub fn new(m: &BandedMatrix) -> Result<Self> {
        let (n, kl, ku) = (m.n, m.kl, m.ku);
        let mut lu = Self {
            n,
            kl,
            ku: kl + ku,
            data: vec![0.0; n * (2 * kl + ku + 1)],
            pivots: vec![0; n],
        };
        for i in 0..n {
            for j in m.row_range(i) {
                let k = lu.idx(i, j);
                lu.data[k] = m.get(i, j);
            }
        }
        let scale = m.data.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        let ku_ext = lu.ku;
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = lu.data[lu.idx(k, k)].abs();
            for i in k + 1..=last_row {
                let v = lu.data[lu.idx(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if !(best > scale * 1e-300) || !best.is_finite() {
                return Err(Error::SingularSystem(format!(
                    "zero pivot in column {k} of {n}"
                )));
            }
            lu.pivots[k] = p;
            let last_col = (k + ku_ext).min(n - 1);
            if p != k {
                for j in k..=last_col {
                    let (a, b) = (lu.idx(k, j), lu.idx(p, j));
                    lu.data.swap(a, b);
                }
            }
            let pivot = lu.data[lu.idx(k, k)];
            for i in k + 1..=last_row {
                let ik = lu.idx(i, k);
                let l = lu.data[ik] / pivot;
                lu.data[ik] = l;
                if l != 0.0 {
                    for j in k + 1..=last_col {
                        let kj = lu.data[lu.idx(k, j)];
                        let ij = lu.idx(i, j);
                        lu.data[ij] -= l * kj;
                    }
                }
            }
        }
        Ok(lu)
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.n;
        assert_eq!(rhs.len(), n);
        let mut x = rhs.to_vec();
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                x.swap(k, p);
            }
            let xk = x[k];
            for i in k + 1..=(k + self.kl).min(n - 1) {
                x[i] -= self.data[self.idx(i, k)] * xk;
            }
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..=(i + self.ku).min(n - 1) {
                s -= self.data[self.idx(i, j)] * x[j];
            }
            x[i] = s / self.data[self.idx(i, i)];
        }
        x
    }
}
