//! Two-frame Floquet reduction of the frequency-modulated Dicke model.
//!
//! The lab-frame model is a standard Dicke Hamiltonian with an `A^2` term
//! and a cosine modulation `xi * nu * cos(nu t) J_z` of the qubit splitting.
//! Going to the frame of the bare energies plus the modulation splits each
//! coupling into Bessel sidebands; picking one rotating sideband `n0` and
//! one counter-rotating sideband `m0` and dropping the rest gives an
//! anisotropic Dicke model with frequencies `omega0_tilde`, `omega_c_tilde`
//! and couplings `lambda_r`, `lambda_cr`.

use serde::{Deserialize, Serialize};

use crate::bessel::{bessel_j, MAX_ORDER};
use crate::error::{Error, Result};

pub const DEFAULT_RWA_N_MAX: i32 = 32;
pub const DEFAULT_RWA_THRESHOLD: f64 = 0.1;

/// Relative tolerance used to decide that two detunings are equally near.
const TIE_TOLERANCE: f64 = 1e-12;

/// Lab-frame constants. Energies share the unit of `omega0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub omega0: f64,
    /// Bare cavity frequency, before the `A^2` shift.
    pub omega_c: f64,
    pub g0: f64,
    pub n_qubits: u32,
    pub chi: f64,
}

impl SystemParams {
    pub fn new(omega0: f64, omega_c: f64, g0: f64, n_qubits: u32, chi: f64) -> Result<Self> {
        let params = Self {
            omega0,
            omega_c,
            g0,
            n_qubits,
            chi,
        };
        params.validate()?;
        Ok(params)
    }

    /// Builds parameters from the dressed cavity frequency `omega_c'`.
    pub fn with_dressed_cavity(
        omega0: f64,
        omega_c_prime: f64,
        g0: f64,
        n_qubits: u32,
        chi: f64,
    ) -> Result<Self> {
        if !(omega0 > 0.0) {
            return Err(Error::Domain(format!("omega0 must be positive, got {omega0}")));
        }
        let g_a2 = chi * g0 * g0 / omega0;
        Self::new(omega0, omega_c_prime - 2.0 * g_a2, g0, n_qubits, chi)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.omega0 > 0.0
            && self.omega_c > 0.0
            && self.g0 >= 0.0
            && self.n_qubits >= 1
            && self.chi >= 0.0
            && self.omega0.is_finite()
            && self.omega_c.is_finite()
            && self.g0.is_finite()
            && self.chi.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "system parameters out of range: {self:?} (need omega0, omega_c > 0, g0, chi >= 0, N >= 1)"
            )))
        }
    }

    /// Amplitude of the two-photon term, `chi g0^2 / omega0`.
    pub fn g_a2(&self) -> f64 {
        self.chi * self.g0 * self.g0 / self.omega0
    }

    /// Cavity frequency dressed by the `A^2` term.
    pub fn omega_c_prime(&self) -> f64 {
        self.omega_c + 2.0 * self.g_a2()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulationParams {
    pub xi: f64,
    pub nu: f64,
}

impl ModulationParams {
    pub fn new(xi: f64, nu: f64) -> Result<Self> {
        if xi >= 0.0 && nu > 0.0 && xi.is_finite() && nu.is_finite() {
            Ok(Self { xi, nu })
        } else {
            Err(Error::Domain(format!(
                "modulation needs xi >= 0 and nu > 0, got xi = {xi}, nu = {nu}"
            )))
        }
    }
}

/// Selected sideband indices and their detunings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sidebands {
    pub n0: i32,
    pub m0: i32,
    /// `omega0 - omega_c' + n0 nu`
    pub delta_n0: f64,
    /// `omega0 + omega_c' + m0 nu`
    pub big_delta_m0: f64,
}

impl Sidebands {
    /// Sidebands with explicitly chosen indices.
    pub fn with_indices(sys: &SystemParams, modulation: &ModulationParams, n0: i32, m0: i32) -> Self {
        Self {
            n0,
            m0,
            delta_n0: rotating_detuning(sys, modulation, n0),
            big_delta_m0: counter_rotating_detuning(sys, modulation, m0),
        }
    }
}

/// Rotating-branch detuning `delta_n`.
pub fn rotating_detuning(sys: &SystemParams, modulation: &ModulationParams, n: i32) -> f64 {
    sys.omega0 - sys.omega_c_prime() + n as f64 * modulation.nu
}

/// Counter-rotating-branch detuning `Delta_m`.
pub fn counter_rotating_detuning(sys: &SystemParams, modulation: &ModulationParams, m: i32) -> f64 {
    sys.omega0 + sys.omega_c_prime() + m as f64 * modulation.nu
}

/// Integer `k` minimising `|offset + k * nu|`; exact ties go to smaller `|k|`.
fn nearest_index(offset: f64, nu: f64) -> i32 {
    let lo = (-offset / nu).floor();
    let hi = lo + 1.0;
    let d_lo = (offset + lo * nu).abs();
    let d_hi = (offset + hi * nu).abs();
    let scale = offset.abs().max(nu);
    let pick = if (d_lo - d_hi).abs() <= TIE_TOLERANCE * scale {
        if lo.abs() <= hi.abs() {
            lo
        } else {
            hi
        }
    } else if d_lo < d_hi {
        lo
    } else {
        hi
    };
    pick as i32
}

/// Picks the rotating and counter-rotating sidebands nearest to resonance.
pub fn sideband_select(sys: &SystemParams, modulation: &ModulationParams) -> Sidebands {
    let n0 = nearest_index(sys.omega0 - sys.omega_c_prime(), modulation.nu);
    let m0 = nearest_index(sys.omega0 + sys.omega_c_prime(), modulation.nu);
    Sidebands::with_indices(sys, modulation, n0, m0)
}

/// Sign structure of the effective frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Valid,
    /// At least one effective frequency is exactly zero (valley floor).
    ZeroFrequency,
    /// Both effective frequencies negative.
    NegativeFrequency,
    MixedSign,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Valid => "ok",
            Regime::ZeroFrequency => "zero_frequency",
            Regime::NegativeFrequency => "negative_frequency",
            Regime::MixedSign => "mixed_sign",
        }
    }
}

/// The anisotropic Dicke model
/// `w0~ J_z + wc~ a^dag a + N^{-1/2} [J_+ (lambda_r a + lambda_cr a^dag) + h.c.]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveModel {
    pub omega0_tilde: f64,
    pub omega_c_tilde: f64,
    pub lambda_r: f64,
    pub lambda_cr: f64,
    /// `sqrt(w0~ wc~)`, absent when the product is negative.
    pub lambda_crit: Option<f64>,
    pub sidebands: Option<Sidebands>,
}

impl EffectiveModel {
    /// A model specified directly by its frequencies and couplings.
    pub fn from_couplings(omega0_tilde: f64, omega_c_tilde: f64, lambda_r: f64, lambda_cr: f64) -> Self {
        let product = omega0_tilde * omega_c_tilde;
        Self {
            omega0_tilde,
            omega_c_tilde,
            lambda_r,
            lambda_cr,
            lambda_crit: (product >= 0.0).then(|| product.sqrt()),
            sidebands: None,
        }
    }

    /// Same frequencies, new couplings.
    pub fn with_couplings(&self, lambda_r: f64, lambda_cr: f64) -> Self {
        Self {
            lambda_r,
            lambda_cr,
            ..*self
        }
    }

    pub fn regime(&self) -> Regime {
        let (a, b) = (self.omega0_tilde, self.omega_c_tilde);
        if a > 0.0 && b > 0.0 {
            Regime::Valid
        } else if a == 0.0 || b == 0.0 {
            Regime::ZeroFrequency
        } else if a < 0.0 && b < 0.0 {
            Regime::NegativeFrequency
        } else {
            Regime::MixedSign
        }
    }

    /// Critical coupling, provided both effective frequencies are positive.
    pub fn require_valid(&self) -> Result<f64> {
        match (self.regime(), self.lambda_crit) {
            (Regime::Valid, Some(crit)) => Ok(crit),
            (regime, _) => Err(Error::InvalidRegime(format!(
                "effective frequencies ({}, {}) are {}; ground-state analysis needs both positive",
                self.omega0_tilde,
                self.omega_c_tilde,
                regime.as_str()
            ))),
        }
    }

    /// `(lambda_r / lambda_crit, lambda_cr / lambda_crit)`.
    pub fn coupling_ratios(&self) -> Option<(f64, f64)> {
        self.lambda_crit
            .map(|crit| (self.lambda_r / crit, self.lambda_cr / crit))
    }
}

/// Effective model for the given sideband choice.
///
/// Always returns the model; invalid regimes are reported by
/// [`EffectiveModel::regime`]. Fails only when the Bessel window is exceeded.
pub fn effective_model(
    sys: &SystemParams,
    modulation: &ModulationParams,
    sb: &Sidebands,
) -> Result<EffectiveModel> {
    let mut model = EffectiveModel::from_couplings(
        0.5 * (sb.delta_n0 + sb.big_delta_m0),
        0.5 * (sb.big_delta_m0 - sb.delta_n0),
        sys.g0 * bessel_j(sb.n0, modulation.xi)?,
        sys.g0 * bessel_j(sb.m0, modulation.xi)?,
    );
    model.sidebands = Some(*sb);
    Ok(model)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Rotating,
    CounterRotating,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SidebandId {
    pub branch: Branch,
    pub index: i32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RwaReport {
    pub worst_sideband_ratio: f64,
    pub worst_sideband_id: Option<SidebandId>,
    pub a2_ratio: f64,
    pub threshold: f64,
    /// Another sideband sits exactly as close to resonance as a selected one.
    pub tie: bool,
    pub pass: bool,
}

/// Checks that every neglected sideband is fast rotating.
pub fn rwa_report(
    sys: &SystemParams,
    modulation: &ModulationParams,
    sb: &Sidebands,
    threshold: f64,
    n_max: i32,
) -> Result<RwaReport> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::Domain(format!("threshold must lie in (0, 1), got {threshold}")));
    }
    if n_max < sb.n0.abs() + 2 || n_max < sb.m0.abs() + 2 || n_max > MAX_ORDER {
        return Err(Error::Domain(format!(
            "n_max = {n_max} must cover |n0| + 2 = {}, |m0| + 2 = {} and stay <= {MAX_ORDER}",
            sb.n0.abs() + 2,
            sb.m0.abs() + 2
        )));
    }

    let scale = sys.omega0.max(sys.omega_c_prime()).max(modulation.nu);
    let mut worst = 0.0f64;
    let mut worst_id = None;
    let mut tie = false;
    for (branch, selected, selected_detuning) in [
        (Branch::Rotating, sb.n0, sb.delta_n0),
        (Branch::CounterRotating, sb.m0, sb.big_delta_m0),
    ] {
        for index in -n_max..=n_max {
            if index == selected {
                continue;
            }
            let detuning = match branch {
                Branch::Rotating => rotating_detuning(sys, modulation, index),
                Branch::CounterRotating => counter_rotating_detuning(sys, modulation, index),
            };
            if (detuning.abs() - selected_detuning.abs()).abs() <= TIE_TOLERANCE * scale {
                tie = true;
            }
            let ratio = if detuning == 0.0 {
                f64::INFINITY
            } else {
                sys.g0 * bessel_j(index, modulation.xi)?.abs() / detuning.abs()
            };
            if ratio > worst || worst_id.is_none() {
                worst = ratio;
                worst_id = Some(SidebandId { branch, index });
            }
        }
    }

    let a2_ratio = sys.g_a2() / (2.0 * sys.omega_c_prime());
    let pass = !tie && worst.max(a2_ratio) <= threshold;
    Ok(RwaReport {
        worst_sideband_ratio: worst,
        worst_sideband_id: worst_id,
        a2_ratio,
        threshold,
        tie,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn resonant(g0: f64, chi: f64) -> SystemParams {
        SystemParams::with_dressed_cavity(1.0, 1.0, g0, 4, chi).unwrap()
    }

    #[test]
    fn derived_quantities() {
        let sys = SystemParams::new(1.0, 0.9, 0.1, 2, 2.0).unwrap();
        assert!((sys.g_a2() - 0.02).abs() < 1e-15);
        assert!((sys.omega_c_prime() - 0.94).abs() < 1e-15);
        let dressed = resonant(0.06, 1.0);
        assert!((dressed.omega_c_prime() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(SystemParams::new(0.0, 1.0, 0.1, 1, 0.0).is_err());
        assert!(SystemParams::new(1.0, 1.0, -0.1, 1, 0.0).is_err());
        assert!(SystemParams::new(1.0, 1.0, 0.1, 0, 0.0).is_err());
        assert!(SystemParams::new(1.0, 1.0, 0.1, 1, -1.0).is_err());
        assert!(ModulationParams::new(1.0, 0.0).is_err());
        assert!(ModulationParams::new(-1.0, 0.5).is_err());
    }

    #[test]
    fn sideband_indices_at_working_points() {
        let sys = resonant(0.06, 0.0);
        for (nu, m0) in [(0.49, -4), (0.66, -3), (5.0, 0), (4.2, 0)] {
            let sb = sideband_select(&sys, &ModulationParams::new(1.0, nu).unwrap());
            assert_eq!((sb.n0, sb.m0), (0, m0), "nu = {nu}");
        }
    }

    #[test]
    fn tie_prefers_smaller_index() {
        let sys = resonant(0.06, 0.0);
        // (omega0 + omega_c') / nu = 0.5 exactly
        let sb = sideband_select(&sys, &ModulationParams::new(1.0, 4.0).unwrap());
        assert_eq!(sb.m0, 0);
        let report = rwa_report(&sys, &ModulationParams::new(1.0, 4.0).unwrap(), &sb, 0.5, 32).unwrap();
        assert!(report.tie);
        assert!(!report.pass);
    }

    #[test]
    fn working_point_effective_model() {
        let sys = resonant(0.06, 0.0);
        let modulation = ModulationParams::new(0.0, 0.49).unwrap();
        let sb = sideband_select(&sys, &modulation);
        let model = effective_model(&sys, &modulation, &sb).unwrap();
        assert!((model.omega0_tilde - 0.02).abs() < 1e-14);
        assert!((model.omega_c_tilde - 0.02).abs() < 1e-14);
        let crit = model.require_valid().unwrap();
        assert!((crit - 0.02).abs() < 1e-14);
        let (r, cr) = model.coupling_ratios().unwrap();
        assert!((r - 3.0).abs() < 1e-12);
        assert_eq!(cr, 0.0);

        let modulation = ModulationParams::new(3.8317, 0.49).unwrap();
        let model = effective_model(&sys, &modulation, &sb).unwrap();
        let (r, _) = model.coupling_ratios().unwrap();
        assert!((r + 1.208).abs() < 5e-4, "{r}");
    }

    #[test]
    fn valley_floor_has_zero_critical_coupling() {
        let sys = resonant(0.06, 0.0);
        for xi in [0.0, 1.0, 2.5] {
            let modulation = ModulationParams::new(xi, 0.5).unwrap();
            let sb = sideband_select(&sys, &modulation);
            let model = effective_model(&sys, &modulation, &sb).unwrap();
            assert_eq!(sb.m0, -4);
            assert_eq!(model.lambda_crit, Some(0.0));
            assert_eq!(model.regime(), Regime::ZeroFrequency);
            assert!(model.require_valid().is_err());
        }
    }

    #[test]
    fn far_side_of_valley_is_flagged() {
        let sys = resonant(0.06, 0.0);
        let modulation = ModulationParams::new(1.0, 0.51).unwrap();
        let model = effective_model(&sys, &modulation, &sideband_select(&sys, &modulation)).unwrap();
        assert_eq!(model.regime(), Regime::NegativeFrequency);
        let sys = SystemParams::with_dressed_cavity(1.0, 1.2, 0.06, 4, 0.0).unwrap();
        let model = effective_model(&sys, &modulation, &Sidebands::with_indices(&sys, &modulation, 0, -4)).unwrap();
        assert_eq!(model.regime(), Regime::MixedSign);
        assert_eq!(model.lambda_crit, None);
    }

    #[test]
    fn rwa_uncoupled_passes() {
        let sys = resonant(0.0, 0.0);
        let modulation = ModulationParams::new(1.0, 0.49).unwrap();
        let sb = sideband_select(&sys, &modulation);
        let report = rwa_report(&sys, &modulation, &sb, 1e-6, 32).unwrap();
        assert_eq!(report.worst_sideband_ratio, 0.0);
        assert_eq!(report.a2_ratio, 0.0);
        assert!(report.pass);
    }

    /// Exhaustive enumeration over |n| <= 32, written independently.
    fn enumerate_worst(g0: f64, xi: f64, nu: f64, n0: i32, m0: i32) -> f64 {
        let mut worst = 0.0f64;
        for n in -32..=32 {
            let j = bessel_j(n, xi).unwrap().abs();
            if n != n0 {
                worst = worst.max(g0 * j / (n as f64 * nu).abs());
            }
            if n != m0 {
                worst = worst.max(g0 * j / (2.0 + n as f64 * nu).abs());
            }
        }
        worst
    }

    #[test]
    fn rwa_working_point() {
        let sys = resonant(0.06, 1.0);
        let modulation = ModulationParams::new(1.0, 0.49).unwrap();
        let sb = sideband_select(&sys, &modulation);
        let report = rwa_report(&sys, &modulation, &sb, 0.1, 12).unwrap();
        assert!((report.a2_ratio - 0.0036 / 2.0).abs() < 1e-15);
        let oracle = enumerate_worst(0.06, 1.0, 0.49, 0, -4);
        assert!((report.worst_sideband_ratio - oracle).abs() < 1e-15);
        assert_eq!(
            report.worst_sideband_id.unwrap().branch,
            Branch::Rotating
        );
        assert!(report.pass);
        assert!(rwa_report(&sys, &modulation, &sb, 0.15, 32).unwrap().pass);
        assert!(!rwa_report(&sys, &modulation, &sb, 0.01, 32).unwrap().pass);
    }

    #[test]
    fn resonant_neglected_sideband_fails() {
        let sys = resonant(0.06, 0.0);
        let modulation = ModulationParams::new(1.0, 0.49).unwrap();
        // force n0 = 1 so the resonant n = 0 sideband is neglected
        let sb = Sidebands::with_indices(&sys, &modulation, 1, -4);
        let report = rwa_report(&sys, &modulation, &sb, 0.5, 32).unwrap();
        assert!(report.worst_sideband_ratio.is_infinite());
        assert_eq!(
            report.worst_sideband_id,
            Some(SidebandId { branch: Branch::Rotating, index: 0 })
        );
        assert!(!report.pass);
    }

    #[test]
    fn rwa_rejects_bad_arguments() {
        let sys = resonant(0.06, 0.0);
        let modulation = ModulationParams::new(1.0, 0.49).unwrap();
        let sb = sideband_select(&sys, &modulation);
        assert!(rwa_report(&sys, &modulation, &sb, 1.0, 32).is_err());
        assert!(rwa_report(&sys, &modulation, &sb, 0.1, 5).is_err());
        assert!(rwa_report(&sys, &modulation, &sb, 0.1, 65).is_err());
    }

    #[test]
    fn critical_coupling_is_v_shaped() {
        let sys = resonant(0.06, 0.0);
        for m0 in 1..=4 {
            let nu = 2.0 / m0 as f64;
            let modulation = ModulationParams::new(1.0, nu).unwrap();
            let model = effective_model(&sys, &modulation, &sideband_select(&sys, &modulation)).unwrap();
            assert!(model.lambda_crit.unwrap() < 1e-12, "nu = {nu}");
            for h in [1e-3, 2e-3] {
                let left = ModulationParams::new(1.0, nu - h).unwrap();
                let l = effective_model(&sys, &left, &sideband_select(&sys, &left)).unwrap();
                let slope = l.lambda_crit.unwrap() / h;
                assert!((slope - m0 as f64 / 2.0).abs() < 1e-9);
            }
        }
    }

    proptest! {
        #[test]
        fn frame_identities(
            omega0 in 0.2f64..3.0, wc in 0.2f64..3.0, g0 in 0.0f64..0.3,
            chi in 0.0f64..2.0, nu in 0.2f64..6.0, xi in 0.0f64..10.0,
        ) {
            let sys = SystemParams::new(omega0, wc, g0, 3, chi).unwrap();
            let modulation = ModulationParams::new(xi, nu).unwrap();
            let sb = sideband_select(&sys, &modulation);
            let model = effective_model(&sys, &modulation, &sb).unwrap();
            let scale = omega0 + wc + nu * (sb.m0.abs() + sb.n0.abs()) as f64;
            prop_assert!((model.omega0_tilde + model.omega_c_tilde - sb.big_delta_m0).abs() <= 1e-15 * scale);
            prop_assert!((model.omega0_tilde - model.omega_c_tilde - sb.delta_n0).abs() <= 1e-15 * scale);
            if let Some(crit) = model.lambda_crit {
                let p = model.omega0_tilde * model.omega_c_tilde;
                prop_assert!((crit * crit - p).abs() <= 1e-14 * scale * scale);
            }
        }

        #[test]
        fn selection_is_minimal(
            omega0 in 0.2f64..3.0, wcp in 0.2f64..3.0, nu in 0.1f64..6.0,
        ) {
            let sys = SystemParams::with_dressed_cavity(omega0, wcp, 0.05, 2, 0.0).unwrap();
            let modulation = ModulationParams::new(1.0, nu).unwrap();
            let sb = sideband_select(&sys, &modulation);
            for k in -64..=64 {
                prop_assert!(sb.delta_n0.abs() <= rotating_detuning(&sys, &modulation, k).abs() + 1e-12);
                prop_assert!(sb.big_delta_m0.abs() <= counter_rotating_detuning(&sys, &modulation, k).abs() + 1e-12);
            }
        }
    }
}
