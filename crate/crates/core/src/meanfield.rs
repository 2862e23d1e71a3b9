//! Thermodynamic-limit ground states of the anisotropic Dicke model.
//!
//! Replacing `a -> sqrt(N) alpha` and `b -> sqrt(N) beta` in the
//! Holstein-Primakoff Hamiltonian gives the energy per qubit
//!
//! ```text
//! e = wc~ |alpha|^2 + w0~ |beta|^2 - w0~/2
//!     + 2 Re[ conj(beta) sqrt(1 - |beta|^2) (lambda_r alpha + lambda_cr conj(alpha)) ]
//! ```
//!
//! `e` is quadratic in `alpha`, so the cavity displacement can be eliminated
//! exactly. Writing `beta = r e^{i phi}` leaves
//! `-r^2 (1 - r^2) |lambda_r e^{i phi} + lambda_cr e^{-i phi}|^2 / wc~`, which is
//! minimised by real `beta` when `lambda_r lambda_cr > 0`, imaginary `beta` when
//! the product is negative, and any `phi` on the coupling axes.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reduction::{EffectiveModel, Regime};

/// Relative boundary tolerance used when none is given.
pub const DEFAULT_TOL_FACTOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    Normal,
    SE,
    SM,
    SEMa,
    SEMb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Symmetry {
    None,
    Z2,
    U1,
}

impl Phase {
    pub fn broken_symmetry(&self) -> Symmetry {
        match self {
            Phase::Normal => Symmetry::None,
            Phase::SE | Phase::SM => Symmetry::Z2,
            Phase::SEMa | Phase::SEMb => Symmetry::U1,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Phase::Normal => "Normal",
            Phase::SE => "SE",
            Phase::SM => "SM",
            Phase::SEMa => "SEMa",
            Phase::SEMb => "SEMb",
        }
    }

    pub fn is_superradiant(&self) -> bool {
        *self != Phase::Normal
    }
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Phase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Normal" | "N" => Ok(Phase::Normal),
            "SE" => Ok(Phase::SE),
            "SM" => Ok(Phase::SM),
            "SEMa" => Ok(Phase::SEMa),
            "SEMb" => Ok(Phase::SEMb),
            other => Err(Error::Config(format!("unknown phase label {other:?}"))),
        }
    }
}

/// A mean-field ground state. Displacements are per `sqrt(N)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundState {
    pub phase: Phase,
    pub alpha_scaled: Complex64,
    pub beta_scaled: Complex64,
    /// Gauge angle of this member of a U(1) manifold.
    pub theta: f64,
    pub energy_per_qubit: f64,
    /// The model sits on the normal/superradiant boundary within tolerance.
    pub on_boundary: bool,
}

impl GroundState {
    /// Another member of the degenerate manifold: SEMa maps
    /// `(alpha, beta) -> (alpha e^{-i theta}, beta e^{i theta})`, SEMb maps
    /// both with `e^{i theta}`. Other phases are returned unchanged.
    pub fn rotated(&self, theta: f64) -> GroundState {
        let rot = Complex64::from_polar(1.0, theta);
        let (alpha, beta) = match self.phase {
            Phase::SEMa => (self.alpha_scaled * rot.conj(), self.beta_scaled * rot),
            Phase::SEMb => (self.alpha_scaled * rot, self.beta_scaled * rot),
            _ => return *self,
        };
        GroundState {
            alpha_scaled: alpha,
            beta_scaled: beta,
            theta: self.theta + theta,
            ..*self
        }
    }
}

/// Mean-field energy per qubit at scaled displacements.
pub fn classical_energy(model: &EffectiveModel, alpha: Complex64, beta: Complex64) -> Result<f64> {
    let beta_sq = beta.norm_sqr();
    if beta_sq > 1.0 {
        return Err(Error::Domain(format!(
            "|beta| = {} exceeds the Holstein-Primakoff bound 1",
            beta_sq.sqrt()
        )));
    }
    Ok(energy_unchecked(model, alpha, beta))
}

pub(crate) fn energy_unchecked(model: &EffectiveModel, alpha: Complex64, beta: Complex64) -> f64 {
    let beta_sq = beta.norm_sqr();
    let root = (1.0 - beta_sq).sqrt();
    let drive = model.lambda_r * alpha + model.lambda_cr * alpha.conj();
    model.omega_c_tilde * alpha.norm_sqr() + model.omega0_tilde * beta_sq - 0.5 * model.omega0_tilde
        + 2.0 * (beta.conj() * root * drive).re
}

fn default_tol(crit: f64) -> f64 {
    DEFAULT_TOL_FACTOR * crit
}

fn check_classifiable(model: &EffectiveModel) -> Result<f64> {
    match (model.regime(), model.lambda_crit) {
        (Regime::Valid | Regime::ZeroFrequency, Some(crit)) if model.omega0_tilde >= 0.0 => Ok(crit),
        _ => model.require_valid(),
    }
}

/// Phase label from the coupling geometry.
pub fn classify_phase(model: &EffectiveModel, tol: f64) -> Result<Phase> {
    let crit = check_classifiable(model)?;
    if !(tol >= 0.0) {
        return Err(Error::Domain(format!("tolerance must be non-negative, got {tol}")));
    }
    let (lr, lcr) = (model.lambda_r, model.lambda_cr);
    let phase = if (lcr + lr).abs() <= crit + tol && (lcr - lr).abs() <= crit + tol {
        Phase::Normal
    } else if lr.abs() <= tol {
        Phase::SEMa
    } else if lcr.abs() <= tol {
        Phase::SEMb
    } else if lr * lcr > 0.0 {
        Phase::SE
    } else {
        Phase::SM
    };
    Ok(phase)
}

/// Classification with the default tolerance `1e-9 * lambda_crit`.
pub fn classify(model: &EffectiveModel) -> Result<Phase> {
    let crit = check_classifiable(model)?;
    classify_phase(model, default_tol(crit))
}

/// All degenerate global minimisers of [`classical_energy`], representative first.
pub fn solve_displacements(model: &EffectiveModel) -> Result<Vec<GroundState>> {
    let crit = model.require_valid()?;
    solve_displacements_with_tol(model, default_tol(crit))
}

pub fn solve_displacements_with_tol(model: &EffectiveModel, tol: f64) -> Result<Vec<GroundState>> {
    let crit = model.require_valid()?;
    let phase = classify_phase(model, tol)?;
    let (lr, lcr) = (model.lambda_r, model.lambda_cr);
    let on_boundary = ((lr.abs() + lcr.abs()) - crit).abs() <= tol;

    if phase == Phase::Normal {
        return Ok(vec![GroundState {
            phase,
            alpha_scaled: Complex64::new(0.0, 0.0),
            beta_scaled: Complex64::new(0.0, 0.0),
            theta: 0.0,
            energy_per_qubit: -0.5 * model.omega0_tilde,
            on_boundary,
        }]);
    }

    // Orientation of beta: real for SE and the theta = 0 members of the
    // U(1) manifolds, imaginary for SM.
    let orientation = if phase == Phase::SM {
        Complex64::new(0.0, 1.0)
    } else {
        Complex64::new(1.0, 0.0)
    };
    let effective = lr * orientation + lcr * orientation.conj();
    let strength = effective.norm();
    let ratio = crit / strength;
    let r_sq = (0.5 * (1.0 - ratio * ratio)).max(0.0);
    let r = r_sq.sqrt();
    let s = (1.0 - r_sq).sqrt();
    let beta = r * orientation;
    let alpha = -(r * s * effective) / model.omega_c_tilde;
    let energy =
        -0.5 * model.omega0_tilde - strength * strength / model.omega_c_tilde * r_sq * r_sq;

    let representative = GroundState {
        phase,
        alpha_scaled: alpha,
        beta_scaled: beta,
        theta: 0.0,
        energy_per_qubit: energy,
        on_boundary,
    };
    let mut states = vec![representative];
    if phase.broken_symmetry() == Symmetry::Z2 {
        states.push(GroundState {
            alpha_scaled: -alpha,
            beta_scaled: -beta,
            ..representative
        });
    }
    Ok(states)
}

/// The gauge-fixed representative ground state.
pub fn ground_state(model: &EffectiveModel) -> Result<GroundState> {
    Ok(solve_displacements(model)?[0])
}
