//! Finite-N exact diagonalisation of the effective anisotropic Dicke model.
//!
//! The Hamiltonian conserves the excitation parity `(k + n) mod 2`, so the
//! lowest excitation gap in the normal phase is the difference between the
//! lowest odd-sector and lowest even-sector eigenvalues.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{SparseMatrix, SpinFockSpace};
use crate::reduction::EffectiveModel;

/// `w0~ J_z + wc~ a^dag a + N^{-1/2}[J_+(lambda_r a + lambda_cr a^dag) + h.c.]`
/// with exact spin operators on the symmetric subspace.
pub fn effective_hamiltonian(model: &EffectiveModel, space: &SpinFockSpace) -> SparseMatrix {
    let scale = 1.0 / (space.n_qubits as f64).sqrt();
    let coupling = space
        .anisotropic_coupling(model.lambda_r, model.lambda_cr)
        .scaled(scale);
    let jz = space.jz_diagonal();
    let num = space.number_diagonal();
    let diagonal = (0..space.dim())
        .map(|i| (i, i, model.omega0_tilde * jz[i] + model.omega_c_tilde * num[i]))
        .collect();
    coupling.add(&SparseMatrix::from_triplets(space.dim(), diagonal))
}

/// Lowest eigenvalue of a real symmetric sparse matrix by Lanczos with full
/// reorthogonalisation.
pub fn lanczos_lowest(matrix: &SparseMatrix, tol: f64, max_iter: usize) -> Result<f64> {
    let dim = matrix.dim;
    if dim == 0 {
        return Err(Error::Domain("empty matrix".into()));
    }
    let max_iter = max_iter.min(dim).max(1);

    // deterministic start vector with overlap on every basis state
    let mut v: Vec<f64> = (0..dim).map(|i| 1.0 + 0.1 * ((i * 7919) % 101) as f64 / 101.0).collect();
    normalise(&mut v);

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(max_iter);
    let mut alphas = Vec::with_capacity(max_iter);
    let mut betas: Vec<f64> = Vec::with_capacity(max_iter);
    let mut w = vec![0.0; dim];
    let mut last = f64::NAN;

    for iter in 0..max_iter {
        matrix.apply_real(&v, &mut w);
        let a = dot(&v, &w);
        alphas.push(a);
        basis.push(v.clone());
        for q in &basis {
            let c = dot(q, &w);
            axpy(-c, q, &mut w);
        }
        // second pass keeps the basis orthogonal to working precision
        for q in &basis {
            let c = dot(q, &w);
            axpy(-c, q, &mut w);
        }
        let b = dot(&w, &w).sqrt();

        let k = alphas.len();
        let mut t = DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alphas[i];
            if i + 1 < k {
                t[(i, i + 1)] = betas[i];
                t[(i + 1, i)] = betas[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        let (imin, &lowest) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty tridiagonal");
        let residual = b * eig.eigenvectors[(k - 1, imin)].abs();
        let scale = lowest.abs().max(1.0);
        if residual <= tol * scale || b <= f64::EPSILON * scale || iter + 1 == dim {
            return Ok(lowest);
        }
        last = lowest;

        betas.push(b);
        v = w.iter().map(|x| x / b).collect();
    }
    Err(Error::Numerical(format!(
        "Lanczos did not converge in {max_iter} iterations (last estimate {last})"
    )))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(c: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += c * xi;
    }
}

fn normalise(v: &mut [f64]) {
    let n = dot(v, v).sqrt();
    v.iter_mut().for_each(|x| *x /= n);
}

/// Lowest eigenvalue in each parity sector, `[even, odd]`.
pub fn sector_ground_energies(model: &EffectiveModel, n_qubits: u32, fock_dim: usize) -> Result<[f64; 2]> {
    let space = SpinFockSpace::new(n_qubits, fock_dim)?;
    let h = effective_hamiltonian(model, &space);
    let mut out = [0.0; 2];
    for (parity, slot) in out.iter_mut().enumerate() {
        let indices: Vec<usize> = (0..space.dim()).filter(|&i| space.parity(i) == parity).collect();
        *slot = lanczos_lowest(&h.restrict(&indices), 1e-11, 600)?;
    }
    Ok(out)
}

/// Lowest odd-parity minus lowest even-parity energy.
pub fn finite_n_gap(model: &EffectiveModel, n_qubits: u32, fock_dim: usize) -> Result<f64> {
    let [even, odd] = sector_ground_energies(model, n_qubits, fock_dim)?;
    Ok(odd - even)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapExtrapolation {
    pub sizes: Vec<u32>,
    pub gaps: Vec<f64>,
    /// Polynomial extrapolation of the gaps to `1/N = 0`.
    pub extrapolated: f64,
}

/// Finite-N gaps extrapolated in `1/N` through all given sizes.
pub fn extrapolated_gap(model: &EffectiveModel, sizes: &[u32], fock_dim: usize) -> Result<GapExtrapolation> {
    if sizes.is_empty() {
        return Err(Error::Domain("at least one system size is required".into()));
    }
    let gaps = sizes
        .iter()
        .map(|&n| finite_n_gap(model, n, fock_dim))
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = sizes.iter().map(|&n| 1.0 / n as f64).collect();
    Ok(GapExtrapolation {
        sizes: sizes.to_vec(),
        extrapolated: neville_at_zero(&xs, &gaps),
        gaps,
    })
}

/// Value at `x = 0` of the interpolating polynomial through `(xs, ys)`.
pub fn neville_at_zero(xs: &[f64], ys: &[f64]) -> f64 {
    let mut p = ys.to_vec();
    let n = xs.len();
    for level in 1..n {
        for i in 0..n - level {
            let (xi, xj) = (xs[i], xs[i + level]);
            p[i] = (xj * p[i] - xi * p[i + 1]) / (xj - xi);
        }
    }
    p[0]
}
