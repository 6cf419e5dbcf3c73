use std::collections::VecDeque;

use super::SparseSymMatrix;
use crate::error::{Error, Result};

/// Reverse Cuthill-McKee ordering of the matrix graph. `perm[new] = old`.
pub fn reverse_cuthill_mckee(a: &SparseSymMatrix) -> Vec<usize> {
    let n = a.dim();
    let degree: Vec<usize> = (0..n).map(|i| a.row(i).0.len()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut nbrs = Vec::new();
    while order.len() < n {
        // Start each component from a pseudo-peripheral node.
        let seed = (0..n).filter(|&i| !visited[i]).min_by_key(|&i| degree[i]).unwrap();
        let start = pseudo_peripheral(a, seed, &visited);
        let mut queue = VecDeque::from([start]);
        visited[start] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            nbrs.clear();
            nbrs.extend(a.row(v).0.iter().copied().filter(|&w| !visited[w]));
            nbrs.sort_by_key(|&w| (degree[w], w));
            for &w in &nbrs {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

fn bfs_levels(a: &SparseSymMatrix, start: usize, blocked: &[bool]) -> (Vec<usize>, usize) {
    let mut level = vec![usize::MAX; a.dim()];
    let mut queue = VecDeque::from([start]);
    level[start] = 0;
    let mut last = Vec::new();
    let mut depth = 0;
    while let Some(v) = queue.pop_front() {
        if level[v] > depth {
            depth = level[v];
            last.clear();
        }
        last.push(v);
        for &w in a.row(v).0 {
            if !blocked[w] && level[w] == usize::MAX {
                level[w] = level[v] + 1;
                queue.push_back(w);
            }
        }
    }
    (last, depth)
}

fn pseudo_peripheral(a: &SparseSymMatrix, seed: usize, blocked: &[bool]) -> usize {
    let mut current = seed;
    let (mut last, mut depth) = bfs_levels(a, current, blocked);
    for _ in 0..8 {
        let cand = *last.iter().min_by_key(|&&v| (a.row(v).0.len(), v)).unwrap();
        let (l2, d2) = bfs_levels(a, cand, blocked);
        if d2 <= depth {
            break;
        }
        current = cand;
        last = l2;
        depth = d2;
    }
    current
}

/// Cholesky factor stored by rows over the matrix envelope (profile) after a
/// bandwidth-reducing permutation.
#[derive(Debug, Clone)]
pub struct EnvelopeCholesky {
    perm: Vec<usize>,
    first: Vec<usize>,
    start: Vec<usize>,
    data: Vec<f64>,
}

impl EnvelopeCholesky {
    pub fn factor(a: &SparseSymMatrix) -> Result<Self> {
        let n = a.dim();
        let perm = reverse_cuthill_mckee(a);
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut first = vec![0; n];
        for i in 0..n {
            first[i] = a.row(perm[i]).0.iter().map(|&j| inv[j]).filter(|&j| j <= i).min().unwrap_or(i);
        }
        let mut start = Vec::with_capacity(n + 1);
        start.push(0);
        for i in 0..n {
            start.push(start[i] + (i - first[i] + 1));
        }
        let mut data = vec![0.0; start[n]];
        for i in 0..n {
            let (c, v) = a.row(perm[i]);
            for (&j, &x) in c.iter().zip(v) {
                let jn = inv[j];
                if jn <= i {
                    data[start[i] + jn - first[i]] = x;
                }
            }
        }
        for i in 0..n {
            let fi = first[i];
            let row_i = start[i];
            for j in fi..i {
                let fj = first[j];
                let lo = fi.max(fj);
                let row_j = start[j];
                let mut s = data[row_i + j - fi];
                let li = &data[row_i + lo - fi..row_i + j - fi];
                let lj = &data[row_j + lo - fj..row_j + j - fj];
                s -= li.iter().zip(lj).map(|(a, b)| a * b).sum::<f64>();
                data[row_i + j - fi] = s / data[row_j + j - fj];
            }
            let li = &data[row_i..row_i + i - fi];
            let d = data[row_i + i - fi] - li.iter().map(|x| x * x).sum::<f64>();
            if !d.is_finite() || d <= 0.0 {
                return Err(Error::SingularFactorization { pivot: perm[i], value: d });
            }
            data[row_i + i - fi] = d.sqrt();
        }
        Ok(Self { perm, first, start, data })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    /// Stored entries of the factor.
    pub fn fill(&self) -> usize {
        self.data.len()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut y: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.data[self.start[i]..self.start[i + 1]];
            let s: f64 = row[..i - fi].iter().zip(&y[fi..i]).map(|(a, b)| a * b).sum();
            y[i] = (y[i] - s) / row[i - fi];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let row = &self.data[self.start[i]..self.start[i + 1]];
            y[i] /= row[i - fi];
            let yi = y[i];
            for (k, &l) in row[..i - fi].iter().enumerate() {
                y[fi + k] -= l * yi;
            }
        }
        let mut x = vec![0.0; n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = y[i];
        }
        x
    }
}
