//! Small dense square matrices of nonnegative integers.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix {
    n: usize,
    data: Vec<u32>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u32>]) -> Option<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return None;
        }
        Some(Matrix {
            n,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub(crate) fn from_flat(n: usize, data: Vec<u32>) -> Self {
        debug_assert_eq!(data.len(), n * n);
        Matrix { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.n + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.n + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.n..(r + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        (0..self.n).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.data
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.n);
        for r in 0..self.n {
            for c in 0..self.n {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|r| (r + 1..self.n).all(|c| self.get(r, c) == self.get(c, r)))
    }

    /// Product with entries widened to `u64`.
    pub fn mul_wide(&self, rhs: &Matrix) -> Vec<u64> {
        let n = self.n;
        let mut out = vec![0u64; n * n];
        for r in 0..n {
            for k in 0..n {
                let x = self.get(r, k) as u64;
                if x == 0 {
                    continue;
                }
                for c in 0..n {
                    out[r * n + c] += x * rhs.get(k, c) as u64;
                }
            }
        }
        out
    }

    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        Matrix::from_flat(
            self.n,
            self.mul_wide(rhs).into_iter().map(|x| x as u32).collect(),
        )
    }

    /// Relabel by `perm`: entry `(r, c)` of the result is entry
    /// `(perm[r], perm[c])` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(self.n);
        for r in 0..self.n {
            for c in 0..self.n {
                m.set(r, c, self.get(perm[r], perm[c]));
            }
        }
        m
    }

    /// Principal submatrix on `idx`.
    pub fn submatrix(&self, idx: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(idx.len());
        for (r, &a) in idx.iter().enumerate() {
            for (c, &b) in idx.iter().enumerate() {
                m.set(r, c, self.get(a, b));
            }
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

impl Serialize for Matrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<u32>>::deserialize(d)?;
        Matrix::from_rows(&rows).ok_or_else(|| serde::de::Error::custom("matrix is not square"))
    }
}

/// Connected components of the undirected graph on `0..n` with an edge
/// `a ~ b` whenever some matrix has a nonzero `(a, b)` entry.
pub fn support_components<'a>(n: usize, mats: impl IntoIterator<Item = &'a Matrix>) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    for m in mats {
        for a in 0..n {
            for b in 0..n {
                if m.get(a, b) > 0 {
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    if ra != rb {
                        parent[ra.max(rb)] = ra.min(rb);
                    }
                }
            }
        }
    }
    let mut comps: Vec<Vec<usize>> = Vec::new();
    let mut root_slot = vec![usize::MAX; n];
    for a in 0..n {
        let r = find(&mut parent, a);
        if root_slot[r] == usize::MAX {
            root_slot[r] = comps.len();
            comps.push(Vec::new());
        }
        comps[root_slot[r]].push(a);
    }
    comps
}

/// Perron eigenvector of a symmetric nonnegative matrix, scaled to unit
/// Euclidean norm with nonnegative entries.
pub fn perron_vector(sym: &[f64], n: usize) -> (f64, Vec<f64>) {
    let m = nalgebra::DMatrix::from_row_slice(n, n, sym);
    let eig = nalgebra::SymmetricEigen::new(m);
    let (best, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| {
            if v > bv {
                (i, v)
            } else {
                (bi, bv)
            }
        });
    let col = eig.eigenvectors.column(best);
    let sign = if col.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
    let v: Vec<f64> = col.iter().map(|x| x * sign).collect();
    (eig.eigenvalues[best], v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_ops() {
        let a = Matrix::from_rows(&[vec![0, 1], vec![1, 1]]).unwrap();
        assert_eq!(a.mul(&a), Matrix::from_rows(&[vec![1, 1], vec![1, 2]]).unwrap());
        assert!(a.is_symmetric());
        assert_eq!(a.permuted(&[1, 0]).rows(), vec![vec![1, 1], vec![1, 0]]);
        assert!(Matrix::from_rows(&[vec![1, 2]]).is_none());
    }

    #[test]
    fn components_and_perron() {
        let a = Matrix::from_rows(&[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 1]]).unwrap();
        assert_eq!(support_components(3, [&a]), vec![vec![0, 1], vec![2]]);
        let (l, v) = perron_vector(&[0.0, 1.0, 1.0, 1.0], 2);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((l - phi).abs() < 1e-12);
        assert!((v[1] / v[0] - phi).abs() < 1e-12);
    }
}
