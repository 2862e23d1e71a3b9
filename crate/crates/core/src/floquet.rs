//! Exact finite-N simulation of the modulated lab-frame Hamiltonian and
//! fidelity comparison against the effective model.
//!
//! The lab Hamiltonian is
//! `H_t = (w0 + xi nu cos(nu t)) J_z + w_c a^dag a
//!        + g0 N^{-1/2} (J_+ + J_-)(a + a^dag) + g_A2 (a + a^dag)^2`.
//! Its diagonal part is integrated in closed form, so the fixed-step RK4
//! stepper only sees the slow interaction-picture couplings.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{SparseMatrix, SpinFockSpace, MAX_DENSE_DIM};
use crate::reduction::{
    effective_model, rwa_report, ModulationParams, RwaReport, Sidebands, SystemParams, DEFAULT_RWA_N_MAX,
    DEFAULT_RWA_THRESHOLD,
};

pub const MIN_FOCK_DIM: usize = 8;
pub const MAX_SIM_QUBITS: u32 = 6;
pub const LEAKAGE_LIMIT: f64 = 1e-6;
/// Fidelity target for the rotating-wave check. A design choice, not a
/// derived bound.
pub const FIDELITY_TARGET: f64 = 0.98;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialState {
    /// All spins down, cavity empty.
    Vacuum,
    /// Spins down, truncated and renormalised cavity coherent state.
    Coherent { re: f64, im: f64 },
    /// Spin coherent state on the Bloch sphere (`theta = 0` is all down),
    /// cavity empty.
    SpinCoherent { theta: f64, phi: f64 },
    /// Amplitudes in the basis order `k * fock_dim + n`, with `k = m + N/2`.
    /// Imaginary parts are optional.
    Custom {
        re: Vec<f64>,
        #[serde(default)]
        im: Vec<f64>,
    },
}

fn default_dt() -> f64 {
    0.01
}
fn default_t_final() -> f64 {
    50.0
}
fn default_samples() -> usize {
    501
}
fn default_initial() -> InitialState {
    InitialState::Vacuum
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n_qubits: u32,
    pub fock_dim: usize,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_t_final")]
    pub t_final: f64,
    /// Number of evenly spaced output samples, endpoints included.
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_initial")]
    pub initial_state: InitialState,
}

impl SimConfig {
    pub fn new(n_qubits: u32, fock_dim: usize) -> Self {
        Self {
            n_qubits,
            fock_dim,
            dt: default_dt(),
            t_final: default_t_final(),
            samples: default_samples(),
            initial_state: default_initial(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=MAX_SIM_QUBITS).contains(&self.n_qubits) {
            return Err(Error::Config(format!(
                "n_qubits must lie in 1..={MAX_SIM_QUBITS}, got {}",
                self.n_qubits
            )));
        }
        if self.fock_dim < MIN_FOCK_DIM {
            return Err(Error::Config(format!(
                "fock_dim must be at least {MIN_FOCK_DIM}, got {}",
                self.fock_dim
            )));
        }
        if (self.n_qubits as usize + 1) * self.fock_dim > MAX_DENSE_DIM {
            return Err(Error::Config(format!(
                "Hilbert space dimension exceeds {MAX_DENSE_DIM}"
            )));
        }
        if !(self.dt > 0.0 && self.dt.is_finite() && self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(Error::Config(format!(
                "need dt > 0 and t_final >= 0, got dt = {}, t_final = {}",
                self.dt, self.t_final
            )));
        }
        if self.samples < 2 {
            return Err(Error::Config("samples must be at least 2".into()));
        }
        Ok(())
    }

    pub fn space(&self) -> Result<SpinFockSpace> {
        SpinFockSpace::new(self.n_qubits, self.fock_dim)
    }

    /// Step count, rounded up so the actual step never exceeds `dt`.
    pub fn steps(&self) -> usize {
        ((self.t_final / self.dt).ceil() as usize).max(1)
    }

    fn check_system(&self, sys: &SystemParams) -> Result<()> {
        sys.validate()?;
        if sys.n_qubits != self.n_qubits {
            return Err(Error::Config(format!(
                "simulation uses N = {} but system parameters have N = {}",
                self.n_qubits, sys.n_qubits
            )));
        }
        Ok(())
    }
}

/// State vector at time `t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabState {
    pub t: f64,
    pub amplitudes: Vec<Complex64>,
}

impl LabState {
    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Initial state vector.
pub fn initial_vector(cfg: &SimConfig) -> Result<Vec<Complex64>> {
    let space = cfg.space()?;
    let mut psi = vec![Complex64::new(0.0, 0.0); space.dim()];
    match &cfg.initial_state {
        InitialState::Vacuum => psi[space.index(0, 0)] = Complex64::new(1.0, 0.0),
        InitialState::Coherent { re, im } => {
            let alpha = Complex64::new(*re, *im);
            let mut amp = Complex64::new(1.0, 0.0);
            for n in 0..space.fock_dim {
                if n > 0 {
                    amp *= alpha / (n as f64).sqrt();
                }
                psi[space.index(0, n)] = amp;
            }
        }
        InitialState::SpinCoherent { theta, phi } => {
            let n = space.n_qubits as usize;
            let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
            let mut binom = 1.0f64;
            for k in 0..=n {
                if k > 0 {
                    binom *= (n - k + 1) as f64 / k as f64;
                }
                let mag = binom.sqrt() * c.powi((n - k) as i32) * s.powi(k as i32);
                psi[space.index(k, 0)] = Complex64::from_polar(mag, k as f64 * phi);
            }
        }
        InitialState::Custom { re, im } => {
            if re.len() != space.dim() || !(im.is_empty() || im.len() == space.dim()) {
                return Err(Error::Config(format!(
                    "custom state needs {} amplitudes, got re: {}, im: {}",
                    space.dim(),
                    re.len(),
                    im.len()
                )));
            }
            for i in 0..space.dim() {
                psi[i] = Complex64::new(re[i], im.get(i).copied().unwrap_or(0.0));
            }
        }
    }
    let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::Config("initial state has zero norm".into()));
    }
    psi.iter_mut().for_each(|z| *z /= norm);
    Ok(psi)
}

/// Dense lab-frame Hamiltonian at time `t`. All entries are real.
pub fn build_lab_hamiltonian(
    sys: &SystemParams,
    modulation: &ModulationParams,
    fock_dim: usize,
    t: f64,
) -> Result<DMatrix<f64>> {
    sys.validate()?;
    let space = SpinFockSpace::new(sys.n_qubits, fock_dim)?;
    if space.dim() > MAX_DENSE_DIM {
        return Err(Error::Domain(format!(
            "dimension {} exceeds the dense limit {MAX_DENSE_DIM}",
            space.dim()
        )));
    }
    let mut h = off_diagonal(sys, &space).to_dense();
    let d = diagonal_rates(sys, &space);
    let drive = modulation.xi * modulation.nu * (modulation.nu * t).cos();
    let jz = space.jz_diagonal();
    for i in 0..space.dim() {
        h[(i, i)] += d[i] + drive * jz[i];
    }
    Ok(h)
}

/// Dicke coupling plus `g_A2 (a^2 + a^dag^2)`.
fn off_diagonal(sys: &SystemParams, space: &SpinFockSpace) -> SparseMatrix {
    let dicke = space.dicke_coupling().scaled(sys.g0 / (sys.n_qubits as f64).sqrt());
    let g_a2 = sys.g_a2();
    if g_a2 == 0.0 {
        dicke
    } else {
        dicke.add(&space.two_photon().scaled(g_a2))
    }
}

/// Static diagonal: `w0 m + w_c' n + g_A2`.
fn diagonal_rates(sys: &SystemParams, space: &SpinFockSpace) -> Vec<f64> {
    let jz = space.jz_diagonal();
    let num = space.number_diagonal();
    let (w0, wc, g_a2) = (sys.omega0, sys.omega_c_prime(), sys.g_a2());
    (0..space.dim()).map(|i| w0 * jz[i] + wc * num[i] + g_a2).collect()
}

/// Fixed-step RK4 in the frame of the diagonal part.
struct Stepper {
    off: SparseMatrix,
    rates: Vec<f64>,
    jz: Vec<f64>,
    xi: f64,
    nu: f64,
    scratch: [Vec<Complex64>; 6],
}

impl Stepper {
    fn new(sys: &SystemParams, modulation: &ModulationParams, space: &SpinFockSpace) -> Self {
        let dim = space.dim();
        let zeros = || vec![Complex64::new(0.0, 0.0); dim];
        Self {
            off: off_diagonal(sys, space),
            rates: diagonal_rates(sys, space),
            jz: space.jz_diagonal(),
            xi: modulation.xi,
            nu: modulation.nu,
            scratch: [zeros(), zeros(), zeros(), zeros(), zeros(), zeros()],
        }
    }

    /// `exp(-i phi(t))` with `phi = int_0^t` of the diagonal.
    fn frame(&self, t: f64, out: &mut [Complex64]) {
        let s = self.xi * (self.nu * t).sin();
        for (i, z) in out.iter_mut().enumerate() {
            *z = Complex64::from_polar(1.0, -(self.rates[i] * t + s * self.jz[i]));
        }
    }

    /// `out = -i e^{i phi} H_off e^{-i phi} psi`, using `phases = e^{-i phi}`.
    fn rhs(off: &SparseMatrix, phases: &[Complex64], psi: &[Complex64], tmp: &mut [Complex64], out: &mut [Complex64]) {
        for i in 0..psi.len() {
            tmp[i] = phases[i] * psi[i];
        }
        off.apply(tmp, out);
        let minus_i = Complex64::new(0.0, -1.0);
        for i in 0..psi.len() {
            out[i] = minus_i * phases[i].conj() * out[i];
        }
    }

    fn step(&mut self, psi: &mut [Complex64], t: f64, h: f64) {
        let [k1, k2, k3, k4, ph, tmp] = &mut self.scratch;
        let mut trial = vec![Complex64::new(0.0, 0.0); psi.len()];

        let s = self.xi * (self.nu * t).sin();
        for (i, z) in ph.iter_mut().enumerate() {
            *z = Complex64::from_polar(1.0, -(self.rates[i] * t + s * self.jz[i]));
        }
        Self::rhs(&self.off, ph, psi, tmp, k1);

        let tm = t + 0.5 * h;
        let s = self.xi * (self.nu * tm).sin();
        for (i, z) in ph.iter_mut().enumerate() {
            *z = Complex64::from_polar(1.0, -(self.rates[i] * tm + s * self.jz[i]));
        }
        for i in 0..psi.len() {
            trial[i] = psi[i] + k1[i] * (0.5 * h);
        }
        Self::rhs(&self.off, ph, &trial, tmp, k2);
        for i in 0..psi.len() {
            trial[i] = psi[i] + k2[i] * (0.5 * h);
        }
        Self::rhs(&self.off, ph, &trial, tmp, k3);

        let te = t + h;
        let s = self.xi * (self.nu * te).sin();
        for (i, z) in ph.iter_mut().enumerate() {
            *z = Complex64::from_polar(1.0, -(self.rates[i] * te + s * self.jz[i]));
        }
        for i in 0..psi.len() {
            trial[i] = psi[i] + k3[i] * h;
        }
        Self::rhs(&self.off, ph, &trial, tmp, k4);

        for i in 0..psi.len() {
            psi[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0);
        }
    }
}

/// Integrates from `t = 0` and calls `visit(step, t, lab_state)` after every
/// step (and once at `step = 0`). Returns the final lab-frame state.
fn integrate<F>(cfg: &SimConfig, sys: &SystemParams, modulation: &ModulationParams, mut visit: F) -> Result<Vec<Complex64>>
where
    F: FnMut(usize, f64, &[Complex64]),
{
    cfg.validate()?;
    cfg.check_system(sys)?;
    let space = cfg.space()?;
    let steps = cfg.steps();
    let h = cfg.t_final / steps as f64;
    let mut stepper = Stepper::new(sys, modulation, &space);
    let mut psi_i = initial_vector(cfg)?;
    let mut frame = vec![Complex64::new(0.0, 0.0); space.dim()];
    let mut lab = psi_i.clone();

    visit(0, 0.0, &lab);
    for k in 0..steps {
        let t = k as f64 * h;
        stepper.step(&mut psi_i, t, h);
        let t_next = (k + 1) as f64 * h;
        stepper.frame(t_next, &mut frame);
        for i in 0..lab.len() {
            lab[i] = frame[i] * psi_i[i];
        }
        visit(k + 1, t_next, &lab);
    }

    let leak = space.top_fock_population(&lab);
    if leak >= LEAKAGE_LIMIT {
        return Err(Error::Truncation {
            population: leak,
            fock_dim: cfg.fock_dim,
        });
    }
    Ok(lab)
}

fn is_sample(step: usize, steps: usize, samples: usize) -> bool {
    // sample j sits at step round(j * steps / (samples - 1))
    let j = ((step as f64) * (samples - 1) as f64 / steps as f64).round() as usize;
    j < samples && ((j as f64) * steps as f64 / (samples - 1) as f64).round() as usize == step
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub states: Vec<LabState>,
    /// Largest `| |psi| - 1 |` over every step.
    pub max_norm_drift: f64,
    /// Population in the two highest Fock levels at the final time.
    pub final_top_population: f64,
}

/// Exact lab-frame evolution, sampled at `cfg.samples` times.
pub fn propagate_exact(cfg: &SimConfig, sys: &SystemParams, modulation: &ModulationParams) -> Result<Trajectory> {
    let steps = cfg.steps();
    let mut states = Vec::new();
    let mut drift = 0.0f64;
    let last = integrate(cfg, sys, modulation, |step, t, psi| {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        drift = drift.max((norm - 1.0).abs());
        if is_sample(step, steps, cfg.samples) {
            states.push(LabState {
                t,
                amplitudes: psi.to_vec(),
            });
        }
    })?;
    Ok(Trajectory {
        states,
        max_norm_drift: drift,
        final_top_population: cfg.space()?.top_fock_population(&last),
    })
}

/// `U_eff(t) = V1(t) V2(t) exp(-i H_rot t)` for the selected sidebands.
pub struct EffectivePropagator {
    space: SpinFockSpace,
    omega0: f64,
    omega_c_prime: f64,
    omega0_tilde: f64,
    omega_c_tilde: f64,
    xi: f64,
    nu: f64,
    energies: DVector<f64>,
    vectors: DMatrix<f64>,
}

impl EffectivePropagator {
    pub fn new(cfg: &SimConfig, sys: &SystemParams, modulation: &ModulationParams, sb: &Sidebands) -> Result<Self> {
        cfg.validate()?;
        cfg.check_system(sys)?;
        let space = cfg.space()?;
        let model = effective_model(sys, modulation, sb)?;
        let h_rot = crate::exact::effective_hamiltonian(&model, &space).to_dense();
        let eig = SymmetricEigen::new(h_rot);
        Ok(Self {
            space,
            omega0: sys.omega0,
            omega_c_prime: sys.omega_c_prime(),
            omega0_tilde: model.omega0_tilde,
            omega_c_tilde: model.omega_c_tilde,
            xi: modulation.xi,
            nu: modulation.nu,
            energies: eig.eigenvalues,
            vectors: eig.eigenvectors,
        })
    }

    /// Diagonal of `V1(t) V2(t)`.
    fn frame_phases(&self, t: f64) -> Vec<Complex64> {
        let s = self.xi * (self.nu * t).sin();
        (0..self.space.dim())
            .map(|i| {
                let (k, n) = self.space.split(i);
                let m = self.space.m(k);
                let n = n as f64;
                let phi1 = (self.omega0 * t + s) * m + self.omega_c_prime * t * n;
                let phi2 = (self.omega0_tilde * m + self.omega_c_tilde * n) * t;
                Complex64::from_polar(1.0, phi2 - phi1)
            })
            .collect()
    }

    pub fn apply(&self, t: f64, psi0: &[Complex64]) -> Vec<Complex64> {
        let dim = self.space.dim();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); dim];
        for (j, c) in coeffs.iter_mut().enumerate() {
            let overlap: Complex64 = (0..dim).map(|i| psi0[i] * self.vectors[(i, j)]).sum();
            *c = overlap * Complex64::from_polar(1.0, -self.energies[j] * t);
        }
        let phases = self.frame_phases(t);
        (0..dim)
            .map(|i| {
                let v: Complex64 = (0..dim).map(|j| coeffs[j] * self.vectors[(i, j)]).sum();
                phases[i] * v
            })
            .collect()
    }

    pub fn matrix(&self, t: f64) -> DMatrix<Complex64> {
        let dim = self.space.dim();
        let phases = self.frame_phases(t);
        DMatrix::from_fn(dim, dim, |i, k| {
            let v: Complex64 = (0..dim)
                .map(|j| Complex64::from_polar(self.vectors[(i, j)] * self.vectors[(k, j)], -self.energies[j] * t))
                .sum();
            phases[i] * v
        })
    }
}

/// Dense `U_eff(t)` on the simulation space.
pub fn effective_frame_propagator(
    cfg: &SimConfig,
    sys: &SystemParams,
    modulation: &ModulationParams,
    sb: &Sidebands,
    t: f64,
) -> Result<DMatrix<Complex64>> {
    Ok(EffectivePropagator::new(cfg, sys, modulation, sb)?.matrix(t))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FidelityReport {
    pub times: Vec<f64>,
    pub fidelity: Vec<f64>,
    pub norm: Vec<f64>,
    /// Minimum over every integration step, not only the samples.
    pub min_fidelity: f64,
    pub max_norm_drift: f64,
    pub rwa: RwaReport,
    pub fidelity_target: f64,
    pub warning: Option<String>,
}

/// `F(t) = |<psi_exact(t)| U_eff(t) |psi(0)>|^2`.
pub fn compare_fidelity(
    cfg: &SimConfig,
    sys: &SystemParams,
    modulation: &ModulationParams,
    sb: &Sidebands,
) -> Result<FidelityReport> {
    let rwa = rwa_report(sys, modulation, sb, DEFAULT_RWA_THRESHOLD, DEFAULT_RWA_N_MAX.max(sb.n0.abs().max(sb.m0.abs()) + 2))?;
    let warning = (!rwa.pass).then(|| {
        format!(
            "rotating-wave check failed (worst neglected sideband ratio {:.3e}, tie = {}); fidelity is not expected to be high",
            rwa.worst_sideband_ratio, rwa.tie
        )
    });
    let prop = EffectivePropagator::new(cfg, sys, modulation, sb)?;
    let psi0 = initial_vector(cfg)?;
    let steps = cfg.steps();

    let mut report = FidelityReport {
        times: Vec::new(),
        fidelity: Vec::new(),
        norm: Vec::new(),
        min_fidelity: 1.0,
        max_norm_drift: 0.0,
        rwa,
        fidelity_target: FIDELITY_TARGET,
        warning,
    };
    integrate(cfg, sys, modulation, |step, t, psi| {
        let predicted = prop.apply(t, &psi0);
        let overlap: Complex64 = psi.iter().zip(&predicted).map(|(a, b)| a.conj() * b).sum();
        let f = overlap.norm_sqr();
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        report.min_fidelity = report.min_fidelity.min(f);
        report.max_norm_drift = report.max_norm_drift.max((norm - 1.0).abs());
        if is_sample(step, steps, cfg.samples) {
            report.times.push(t);
            report.fidelity.push(f);
            report.norm.push(norm);
        }
    })?;
    Ok(report)
}
