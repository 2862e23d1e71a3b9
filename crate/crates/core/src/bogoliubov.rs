//! Quadratic fluctuations about a mean-field state and their quasiparticle
//! spectrum.
//!
//! With `v = (c, d, c^dag, d^dag)` the second-order part of the expanded
//! Hamiltonian is `v^dag G v`, `G = 1/2 [[A, B], [B*, A*]]`, where
//! `A_ij = d^2 e / dz_i* dz_j` and `B_ij = d^2 e / dz_i* dz_j*` are Wirtinger
//! derivatives of the energy per qubit with `z = (alpha, beta)`. The linear
//! part is `Omega^T v` with `Omega = (de/dalpha, de/dbeta, de/dalpha*, de/dbeta*)`,
//! quoted per `sqrt(N)`. Quasiparticle frequencies are the non-negative
//! eigenvalues of `Sigma 2G`, `Sigma = diag(1, 1, -1, -1)`.

use nalgebra::{Matrix4, SMatrix, SymmetricEigen, Vector4};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::meanfield::{solve_displacements, GroundState, Phase};
use crate::reduction::EffectiveModel;

pub type CMatrix4 = Matrix4<Complex64>;

pub const STATIONARITY_TOL: f64 = 1e-9;
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Imaginary parts of dynamical eigenvalues below this are treated as zero.
pub const IMAG_TOL: f64 = 1e-10;
/// Eigenvalues of `2G` below this fraction of the largest are set to zero.
const PSD_CLAMP: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm {
    pub omega_vec: [Complex64; 4],
    pub g_matrix: CMatrix4,
    pub ground_energy: f64,
}

impl QuadraticForm {
    pub fn max_linear_residual(&self) -> f64 {
        self.omega_vec.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn scale(&self) -> f64 {
        self.g_matrix.iter().map(|z| z.norm()).fold(0.0, f64::max) * 2.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    pub omega_minus: f64,
    pub omega_plus: f64,
    pub stable: bool,
    /// Rows express `(gamma_-, gamma_+, gamma_-^dag, gamma_+^dag)` in terms of
    /// `(c, d, c^dag, d^dag)`. Absent for zero modes and unstable expansions.
    #[serde(skip)]
    pub transformation: Option<CMatrix4>,
}

pub fn metric() -> CMatrix4 {
    CMatrix4::from_diagonal(&Vector4::new(1.0, 1.0, -1.0, -1.0).map(|x| Complex64::new(x, 0.0)))
}

/// Taylor coefficients about the scaled displacement `(alpha, beta)`.
pub fn expand_quadratic_at(model: &EffectiveModel, alpha: Complex64, beta: Complex64) -> Result<QuadraticForm> {
    let beta_sq = beta.norm_sqr();
    if beta_sq >= 1.0 {
        return Err(Error::Domain(format!(
            "|beta| = {} must stay below 1 for the square-root expansion",
            beta_sq.sqrt()
        )));
    }
    let (wc, w0) = (model.omega_c_tilde, model.omega0_tilde);
    let (lr, lcr) = (model.lambda_r, model.lambda_cr);
    let s = (1.0 - beta_sq).sqrt();
    let drive = lr * alpha + lcr * alpha.conj();
    let q = 2.0 * (beta.conj() * drive).re;

    let d_alpha_conj = wc * alpha + s * (lcr * beta.conj() + lr * beta);
    let d_beta_conj = w0 * beta + s * drive - beta * q / (2.0 * s);

    let s3 = s * s * s;
    let a_aa = Complex64::new(wc, 0.0);
    let a_ab = lr * (s - beta_sq / (2.0 * s)) - lcr * beta.conj() * beta.conj() / (2.0 * s);
    let a_bb = Complex64::new(w0 - q / s - beta_sq * q / (4.0 * s3), 0.0);
    let b_ab = lcr * (s - beta_sq / (2.0 * s)) - lr * beta * beta / (2.0 * s);
    let b_bb = -(beta * drive) / s - beta * beta * q / (4.0 * s3);
    let zero = Complex64::new(0.0, 0.0);

    let a = nalgebra::Matrix2::new(a_aa, a_ab, a_ab.conj(), a_bb);
    let b = nalgebra::Matrix2::new(zero, b_ab, b_ab, b_bb);
    let half = Complex64::new(0.5, 0.0);
    let mut g = CMatrix4::zeros();
    g.fixed_view_mut::<2, 2>(0, 0).copy_from(&(a * half));
    g.fixed_view_mut::<2, 2>(0, 2).copy_from(&(b * half));
    g.fixed_view_mut::<2, 2>(2, 0).copy_from(&(b.map(|z| z.conj()) * half));
    g.fixed_view_mut::<2, 2>(2, 2).copy_from(&(a.map(|z| z.conj()) * half));

    let energy = crate::meanfield::classical_energy(model, alpha, beta)?;
    Ok(QuadraticForm {
        omega_vec: [d_alpha_conj.conj(), d_beta_conj.conj(), d_alpha_conj, d_beta_conj],
        g_matrix: g,
        ground_energy: energy,
    })
}

/// Expansion about a mean-field ground state.
pub fn expand_quadratic(model: &EffectiveModel, gs: &GroundState) -> Result<QuadraticForm> {
    expand_quadratic_at(model, gs.alpha_scaled, gs.beta_scaled)
}

fn hermitian_deviation(m: &CMatrix4) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Quasiparticle frequencies and the Bogoliubov transformation.
pub fn excitation_spectrum(qf: &QuadraticForm) -> Result<Spectrum> {
    let scale = qf.scale();
    let deviation = hermitian_deviation(&qf.g_matrix);
    if deviation > HERMITIAN_TOL * scale.max(1.0) {
        return Err(Error::NotHermitian(deviation));
    }
    let residual = qf.max_linear_residual();
    if residual > STATIONARITY_TOL * scale.max(1.0) {
        return Err(Error::NotStationary(residual));
    }

    let h2 = {
        let m = qf.g_matrix * Complex64::new(2.0, 0.0);
        (m + m.adjoint()) * Complex64::new(0.5, 0.0)
    };
    let eig = SymmetricEigen::new(h2);
    let largest = eig.eigenvalues.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let clamped = eig
        .eigenvalues
        .map(|x| if x.abs() <= PSD_CLAMP * largest { 0.0 } else { x });
    if clamped.iter().any(|&x| x < 0.0) {
        return Ok(indefinite_spectrum(&h2));
    }

    let sigma = metric();
    let v = eig.eigenvectors;
    let root = &v * CMatrix4::from_diagonal(&clamped.map(|x| Complex64::new(x.sqrt(), 0.0))) * v.adjoint();
    let k = &root * sigma * &root;
    let k = (k + k.adjoint()) * Complex64::new(0.5, 0.0);
    let keig = SymmetricEigen::new(k);

    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&i, &j| keig.eigenvalues[j].total_cmp(&keig.eigenvalues[i]));
    let (hi, lo) = (keig.eigenvalues[order[0]].abs(), keig.eigenvalues[order[1]].abs());
    // both near zero at a double zero mode, where round-off can swap them
    let (omega_minus, omega_plus) = (lo.min(hi), lo.max(hi));

    let transformation = if clamped.iter().all(|&x| x > 0.0) && omega_minus > PSD_CLAMP.sqrt() * largest {
        let inv_root =
            &v * CMatrix4::from_diagonal(&clamped.map(|x| Complex64::new(1.0 / x.sqrt(), 0.0))) * v.adjoint();
        let mut rows = CMatrix4::zeros();
        // positive-frequency eigenvectors, lower frequency first
        for (row, &idx) in [order[1], order[0]].iter().enumerate() {
            let kappa = keig.eigenvalues[idx];
            let w = &inv_root * keig.eigenvectors.column(idx) * Complex64::new(kappa.abs().sqrt(), 0.0);
            // gamma = w^dag Sigma v
            let r = (w.adjoint() * sigma).transpose();
            for col in 0..4 {
                rows[(row, col)] = r[col];
                // gamma^dag = conj(r) applied to (c^dag, d^dag, c, d)
                rows[(row + 2, (col + 2) % 4)] = r[col].conj();
            }
        }
        Some(rows)
    } else {
        None
    };

    Ok(Spectrum {
        omega_minus,
        omega_plus,
        stable: true,
        transformation,
    })
}

/// Eigenvalues of `Sigma 2G` for a non-positive `G`, via the real 8x8 embedding.
fn indefinite_spectrum(h2: &CMatrix4) -> Spectrum {
    let values = dynamical_eigenvalues(h2);
    let stable = values.iter().all(|z| z.im.abs() <= IMAG_TOL);
    let mut mags: Vec<f64> = values.iter().map(|z| z.norm()).collect();
    mags.sort_by(f64::total_cmp);
    Spectrum {
        omega_minus: mags[0],
        omega_plus: mags[mags.len() - 1],
        stable,
        transformation: None,
    }
}

/// All eigenvalues of `Sigma h2`, each reported twice (with its conjugate).
pub(crate) fn dynamical_eigenvalues(h2: &CMatrix4) -> Vec<Complex64> {
    let d = metric() * h2;
    let mut real = SMatrix::<f64, 8, 8>::zeros();
    for i in 0..4 {
        for j in 0..4 {
            let z = d[(i, j)];
            real[(i, j)] = z.re;
            real[(i + 4, j + 4)] = z.re;
            real[(i, j + 4)] = -z.im;
            real[(i + 4, j)] = z.im;
        }
    }
    real.complex_eigenvalues().iter().copied().collect()
}

/// One sample of a spectrum scan.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumSample {
    pub parameter: f64,
    pub model: EffectiveModel,
    pub ground_state: Option<GroundState>,
    pub spectrum: Option<Spectrum>,
    pub on_boundary: bool,
    pub error: Option<String>,
}

/// Ground state and spectrum along a one-parameter family of models.
pub fn spectrum_scan<F>(family: F, start: f64, end: f64, samples: usize) -> Result<Vec<SpectrumSample>>
where
    F: Fn(f64) -> EffectiveModel + Sync,
{
    if samples < 2 {
        return Err(Error::Domain(format!("spectrum scan needs at least 2 samples, got {samples}")));
    }
    Ok((0..samples)
        .into_par_iter()
        .map(|i| {
            let parameter = start + (end - start) * i as f64 / (samples - 1) as f64;
            let model = family(parameter);
            match analyse(&model) {
                Ok((gs, spectrum)) => SpectrumSample {
                    parameter,
                    model,
                    ground_state: Some(gs),
                    spectrum: Some(spectrum),
                    on_boundary: gs.on_boundary,
                    error: None,
                },
                Err(e) => SpectrumSample {
                    parameter,
                    model,
                    ground_state: None,
                    spectrum: None,
                    on_boundary: false,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect())
}

/// Ground state plus its excitation spectrum.
pub fn analyse(model: &EffectiveModel) -> Result<(GroundState, Spectrum)> {
    let gs = solve_displacements(model)?[0];
    let spectrum = excitation_spectrum(&expand_quadratic(model, &gs)?)?;
    Ok((gs, spectrum))
}

/// Goldstone threshold relative to `omega0_tilde`.
pub const GOLDSTONE_TOL: f64 = 1e-8;

pub fn is_goldstone(phase: Phase, spectrum: &Spectrum, model: &EffectiveModel) -> bool {
    matches!(phase, Phase::SEMa | Phase::SEMb) && spectrum.omega_minus <= GOLDSTONE_TOL * model.omega0_tilde
}
