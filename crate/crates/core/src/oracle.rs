//! Brute-force minimisation of the mean-field energy.
//!
//! Exhaustive grid over `(Re alpha, Im alpha, Re beta, Im beta)` followed by
//! Nelder-Mead refinement. It shares nothing with the closed-form route in
//! [`crate::meanfield`] except the energy function itself.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::meanfield::energy_unchecked;
use crate::reduction::EffectiveModel;

pub const ALPHA_BOX: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleMinimum {
    pub alpha_scaled: Complex64,
    pub beta_scaled: Complex64,
    pub energy_per_qubit: f64,
    pub grid_energy: f64,
    pub evaluations: usize,
}

fn energy_at(model: &EffectiveModel, p: &[f64; 4]) -> f64 {
    let beta = Complex64::new(p[2], p[3]);
    if beta.norm_sqr() > 1.0 || p[0] * p[0] + p[1] * p[1] > ALPHA_BOX * ALPHA_BOX {
        return f64::INFINITY;
    }
    energy_unchecked(model, Complex64::new(p[0], p[1]), beta)
}

fn better(a: &(f64, [f64; 4]), b: &(f64, [f64; 4])) -> bool {
    match a.0.partial_cmp(&b.0) {
        Some(std::cmp::Ordering::Less) => true,
        Some(std::cmp::Ordering::Greater) => false,
        _ => a.1.iter().zip(&b.1).find(|(x, y)| x != y).is_some_and(|(x, y)| x < y),
    }
}

/// One global minimiser of the mean-field energy.
///
/// The grid covers `|alpha| <= 3`, `|beta| <= 1` with spacing `grid_step`;
/// the best grid point seeds a restarted simplex search.
pub fn minimize_energy_oracle(model: &EffectiveModel, grid_step: f64) -> Result<OracleMinimum> {
    if !(grid_step > 0.0 && grid_step <= 0.1) {
        return Err(Error::Domain(format!("grid_step must lie in (0, 0.1], got {grid_step}")));
    }
    model.require_valid()?;

    let alpha_pts = (ALPHA_BOX / grid_step).floor() as i64;
    let beta_pts = (1.0 / grid_step).floor() as i64;
    let axis = |k: i64| k as f64 * grid_step;

    let best = (-alpha_pts..=alpha_pts)
        .into_par_iter()
        .map(|i| {
            let mut local = (f64::INFINITY, [0.0; 4]);
            let x = axis(i);
            for j in -alpha_pts..=alpha_pts {
                let y = axis(j);
                if x * x + y * y > ALPHA_BOX * ALPHA_BOX {
                    continue;
                }
                for k in -beta_pts..=beta_pts {
                    let u = axis(k);
                    for l in -beta_pts..=beta_pts {
                        let v = axis(l);
                        if u * u + v * v > 1.0 {
                            continue;
                        }
                        let p = [x, y, u, v];
                        let cand = (energy_at(model, &p), p);
                        if better(&cand, &local) {
                            local = cand;
                        }
                    }
                }
            }
            local
        })
        .reduce(
            || (f64::INFINITY, [0.0; 4]),
            |a, b| if better(&b, &a) { b } else { a },
        );

    let side = 2 * alpha_pts as usize + 1;
    let mut evaluations = side * side * (2 * beta_pts as usize + 1).pow(2);
    let f = |p: &[f64; 4]| energy_at(model, p);
    let mut point = best.1;
    let mut value = best.0;
    let mut scale = grid_step;
    // restart until a fresh simplex no longer improves the energy
    for _ in 0..50 {
        let (p, v, evals) = nelder_mead(&f, point, scale, 1e-15, 20_000);
        evaluations += evals;
        let improved = value - v;
        if v < value {
            point = p;
            value = v;
        }
        if improved <= 1e-12 * value.abs().max(1e-300) && scale < grid_step {
            break;
        }
        scale = (scale * 0.1).max(1e-6);
    }

    Ok(OracleMinimum {
        alpha_scaled: Complex64::new(point[0], point[1]),
        beta_scaled: Complex64::new(point[2], point[3]),
        energy_per_qubit: value,
        grid_energy: best.0,
        evaluations,
    })
}

/// Nelder-Mead with the standard coefficients (1, 2, 1/2, 1/2).
pub fn nelder_mead<F>(f: &F, start: [f64; 4], scale: f64, ftol: f64, max_evals: usize) -> ([f64; 4], f64, usize)
where
    F: Fn(&[f64; 4]) -> f64,
{
    const N: usize = 4;
    let mut simplex: Vec<([f64; N], f64)> = Vec::with_capacity(N + 1);
    simplex.push((start, f(&start)));
    for i in 0..N {
        let mut p = start;
        p[i] += scale;
        let mut v = f(&p);
        if !v.is_finite() {
            p[i] = start[i] - scale;
            v = f(&p);
        }
        simplex.push((p, v));
    }
    let mut evals = N + 1;

    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (lo, hi) = (simplex[0].1, simplex[N].1);
        if (hi - lo).abs() <= ftol * (lo.abs() + hi.abs()).max(1e-300) {
            break;
        }
        let mut centroid = [0.0; N];
        for (p, _) in &simplex[..N] {
            for d in 0..N {
                centroid[d] += p[d] / N as f64;
            }
        }
        let along = |t: f64| -> [f64; N] {
            let mut q = [0.0; N];
            for d in 0..N {
                q[d] = centroid[d] + t * (simplex[N].0[d] - centroid[d]);
            }
            q
        };
        let reflected = along(-1.0);
        let fr = f(&reflected);
        evals += 1;
        if fr < simplex[0].1 {
            let expanded = along(-2.0);
            let fe = f(&expanded);
            evals += 1;
            simplex[N] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[N - 1].1 {
            simplex[N] = (reflected, fr);
        } else {
            let (contracted, fc) = if fr < simplex[N].1 {
                let q = along(-0.5);
                (q, f(&q))
            } else {
                let q = along(0.5);
                (q, f(&q))
            };
            evals += 1;
            if fc < simplex[N].1.min(fr) {
                simplex[N] = (contracted, fc);
            } else {
                let best = simplex[0].0;
                for (p, v) in simplex.iter_mut().skip(1) {
                    for d in 0..N {
                        p[d] = best[d] + 0.5 * (p[d] - best[d]);
                    }
                    *v = f(p);
                }
                evals += N;
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    (simplex[0].0, simplex[0].1, evals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meanfield::{classical_energy, ground_state};

    #[test]
    fn nelder_mead_on_quadratic() {
        let f = |p: &[f64; 4]| p.iter().enumerate().map(|(i, x)| (i as f64 + 1.0) * (x - 0.3).powi(2)).sum::<f64>();
        let (p, v, _) = nelder_mead(&f, [0.0; 4], 0.1, 1e-15, 50_000);
        assert!(v < 1e-12);
        for x in p {
            assert!((x - 0.3).abs() < 1e-5);
        }
    }

    #[test]
    fn normal_phase_minimum_is_origin() {
        let m = EffectiveModel::from_couplings(0.02, 0.02, 0.006, 0.004);
        let min = minimize_energy_oracle(&m, 0.1).unwrap();
        assert!(min.alpha_scaled.norm() < 0.1);
        assert!(min.beta_scaled.norm() < 0.1);
        assert!((min.energy_per_qubit + 0.01).abs() < 1e-14);
    }

    #[test]
    fn se_example_refined() {
        let m = EffectiveModel::from_couplings(0.02, 0.02, 0.02, 0.02);
        let min = minimize_energy_oracle(&m, 0.05).unwrap();
        // either Z2 partner
        let sign = min.beta_scaled.re.signum();
        assert!((sign * min.beta_scaled - Complex64::new(0.61237, 0.0)).norm() < 1e-4);
        assert!((sign * min.alpha_scaled - Complex64::new(-0.96825, 0.0)).norm() < 1e-4);
        let exact = ground_state(&m).unwrap().energy_per_qubit;
        assert!((min.energy_per_qubit - exact).abs() <= 1e-10 * exact.abs());
    }

    #[test]
    fn sema_minimiser_on_circle() {
        let m = EffectiveModel::from_couplings(0.02, 0.03, 0.0, 0.04);
        let min = minimize_energy_oracle(&m, 0.1).unwrap();
        for k in 0..16 {
            let t = Complex64::from_polar(1.0, k as f64 * std::f64::consts::TAU / 16.0);
            let e = classical_energy(&m, min.alpha_scaled * t.conj(), min.beta_scaled * t).unwrap();
            assert!((e - min.energy_per_qubit).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_bad_step() {
        let m = EffectiveModel::from_couplings(0.02, 0.02, 0.0, 0.0);
        assert!(minimize_energy_oracle(&m, 0.2).is_err());
        assert!(minimize_energy_oracle(&m, 0.0).is_err());
    }
}
