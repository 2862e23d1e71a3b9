//! Symmetric spin-`N/2` ⊗ truncated Fock space and the collective operators
//! acting on it.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest Hilbert-space dimension accepted for dense work.
pub const MAX_DENSE_DIM: usize = 4096;

/// Basis `|k> ⊗ |n>` with `k = m + N/2` spin excitations and `n` photons.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpinFockSpace {
    pub n_qubits: u32,
    pub fock_dim: usize,
}

impl SpinFockSpace {
    pub fn new(n_qubits: u32, fock_dim: usize) -> Result<Self> {
        if n_qubits == 0 || fock_dim < 2 {
            return Err(Error::Domain(format!(
                "spin-Fock space needs N >= 1 and fock_dim >= 2, got N = {n_qubits}, fock_dim = {fock_dim}"
            )));
        }
        Ok(Self { n_qubits, fock_dim })
    }

    pub fn spin_dim(&self) -> usize {
        self.n_qubits as usize + 1
    }

    pub fn dim(&self) -> usize {
        self.spin_dim() * self.fock_dim
    }

    pub fn index(&self, k: usize, n: usize) -> usize {
        k * self.fock_dim + n
    }

    pub fn split(&self, index: usize) -> (usize, usize) {
        (index / self.fock_dim, index % self.fock_dim)
    }

    /// `J_z` eigenvalue of spin index `k`.
    pub fn m(&self, k: usize) -> f64 {
        k as f64 - 0.5 * self.n_qubits as f64
    }

    /// `<k+1| J_+ |k>`
    pub fn j_plus(&self, k: usize) -> f64 {
        let j = 0.5 * self.n_qubits as f64;
        let m = self.m(k);
        (j * (j + 1.0) - m * (m + 1.0)).max(0.0).sqrt()
    }

    pub fn jz_diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.m(self.split(i).0)).collect()
    }

    pub fn number_diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.split(i).1 as f64).collect()
    }

    /// Excitation parity `(k + n) mod 2`, conserved by the Dicke couplings.
    pub fn parity(&self, index: usize) -> usize {
        let (k, n) = self.split(index);
        (k + n) % 2
    }

    /// `J_+ (lambda_r a + lambda_cr a^dag) + h.c.`
    pub fn anisotropic_coupling(&self, lambda_r: f64, lambda_cr: f64) -> SparseMatrix {
        let mut entries = Vec::new();
        for k in 0..self.spin_dim() - 1 {
            let jp = self.j_plus(k);
            for n in 0..self.fock_dim {
                let from = self.index(k, n);
                if n >= 1 && lambda_r != 0.0 {
                    let to = self.index(k + 1, n - 1);
                    let v = lambda_r * jp * (n as f64).sqrt();
                    entries.push((to, from, v));
                    entries.push((from, to, v));
                }
                if n + 1 < self.fock_dim && lambda_cr != 0.0 {
                    let to = self.index(k + 1, n + 1);
                    let v = lambda_cr * jp * ((n + 1) as f64).sqrt();
                    entries.push((to, from, v));
                    entries.push((from, to, v));
                }
            }
        }
        SparseMatrix::from_triplets(self.dim(), entries)
    }

    /// `(J_+ + J_-)(a + a^dag)`
    pub fn dicke_coupling(&self) -> SparseMatrix {
        self.anisotropic_coupling(1.0, 1.0)
    }

    /// `a^2 + a^dag^2`
    pub fn two_photon(&self) -> SparseMatrix {
        let mut entries = Vec::new();
        for k in 0..self.spin_dim() {
            for n in 0..self.fock_dim.saturating_sub(2) {
                let v = ((n + 1) as f64 * (n + 2) as f64).sqrt();
                let (a, b) = (self.index(k, n), self.index(k, n + 2));
                entries.push((a, b, v));
                entries.push((b, a, v));
            }
        }
        SparseMatrix::from_triplets(self.dim(), entries)
    }

    /// Population in the two highest Fock levels.
    pub fn top_fock_population(&self, state: &[Complex64]) -> f64 {
        state
            .iter()
            .enumerate()
            .filter(|(i, _)| self.split(*i).1 + 2 >= self.fock_dim)
            .map(|(_, z)| z.norm_sqr())
            .sum()
    }
}

/// Real sparse matrix in row-major triplet form.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    pub dim: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

impl SparseMatrix {
    pub fn from_triplets(dim: usize, triplets: Vec<(usize, usize, f64)>) -> Self {
        let mut rows = vec![Vec::new(); dim];
        for (r, c, v) in triplets {
            rows[r].push((c, v));
        }
        for row in &mut rows {
            row.sort_by_key(|e| e.0);
            // merge duplicates
            let mut merged: Vec<(usize, f64)> = Vec::with_capacity(row.len());
            for &(c, v) in row.iter() {
                match merged.last_mut() {
                    Some(last) if last.0 == c => last.1 += v,
                    _ => merged.push((c, v)),
                }
            }
            *row = merged;
        }
        Self { dim, rows }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            rows: self
                .rows
                .iter()
                .map(|row| row.iter().map(|&(c, v)| (c, v * factor)).collect())
                .collect(),
        }
    }

    pub fn add(&self, other: &SparseMatrix) -> Self {
        let mut triplets = Vec::new();
        for m in [self, other] {
            for (r, row) in m.rows.iter().enumerate() {
                triplets.extend(row.iter().map(|&(c, v)| (r, c, v)));
            }
        }
        Self::from_triplets(self.dim, triplets)
    }

    /// Principal submatrix on `indices` (which must be sorted).
    pub fn restrict(&self, indices: &[usize]) -> Self {
        let mut position = vec![usize::MAX; self.dim];
        for (i, &g) in indices.iter().enumerate() {
            position[g] = i;
        }
        let rows = indices
            .iter()
            .map(|&g| {
                self.rows[g]
                    .iter()
                    .filter(|(c, _)| position[*c] != usize::MAX)
                    .map(|&(c, v)| (position[c], v))
                    .collect()
            })
            .collect();
        Self { dim: indices.len(), rows }
    }

    pub fn row(&self, r: usize) -> &[(usize, f64)] {
        &self.rows[r]
    }

    /// `out = self * x`
    pub fn apply(&self, x: &[Complex64], out: &mut [Complex64]) {
        for (r, row) in self.rows.iter().enumerate() {
            out[r] = row.iter().map(|&(c, v)| x[c] * v).sum();
        }
    }

    pub fn apply_real(&self, x: &[f64], out: &mut [f64]) {
        for (r, row) in self.rows.iter().enumerate() {
            out[r] = row.iter().map(|&(c, v)| x[c] * v).sum();
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                m[(r, c)] += v;
            }
        }
        m
    }
}
