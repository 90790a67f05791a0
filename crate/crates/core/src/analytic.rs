//! Closed forms for infinite chains (`J = k = 1`).
//!
//! # Transverse Ising heat capacity
//!
//! The infinite transverse Ising ring maps to free fermions with one-particle
//! energies `±f(B, ω)`, `f = √(1 − 2B cos ω + B²)`. Each mode is a two-level
//! system, so the heat capacity per spin is
//!
//! ```text
//! C/N = 1/(πT²) ∫₀^π f² / cosh²(f/T) dω
//! ```
//!
//! Note the square on `f`. The variant with a single power of `f` in the
//! numerator is dimensionally inconsistent with `C = Var(H)/T²` and does not
//! converge to exact diagonalization of finite rings (its relative error
//! against N = 8, 10, 12 stays near 55 % at B = 1 and 129 % at B = 2, while
//! the `f²` form's error falls towards zero with N). See
//! `tests/katsura_vs_ed.rs` for the comparison.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::quadrature::{integrate, QuadOptions};
use crate::{Error, Result};

/// Field and quadrature settings for the Katsura integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionParams {
    pub field: f64,
    pub integration: QuadOptions,
}

impl DispersionParams {
    pub fn new(field: f64) -> Self {
        Self {
            field,
            integration: QuadOptions {
                abs_tol: 1e-10,
                rel_tol: 1e-8,
                max_subdivisions: 2000,
            },
        }
    }
}

/// Quasiparticle dispersion `f(B, ω) = √(1 − 2B cos ω + B²)`.
pub fn dispersion(field: f64, omega: f64) -> f64 {
    (1.0 - 2.0 * field * omega.cos() + field * field).max(0.0).sqrt()
}

/// `sech²(x)` without overflow for large `|x|`.
fn sech2(x: f64) -> f64 {
    let e = (-2.0 * x.abs()).exp();
    4.0 * e / ((1.0 + e) * (1.0 + e))
}

fn check_temperature(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveTemperature(t))
    }
}

/// Heat capacity per spin of the infinite transverse Ising ring.
pub fn katsura_heat_capacity(field: f64, t: f64) -> Result<f64> {
    katsura_heat_capacity_with(&DispersionParams::new(field), t)
}

pub fn katsura_heat_capacity_with(params: &DispersionParams, t: f64) -> Result<f64> {
    check_temperature(t)?;
    let b = params.field;
    let prefactor = 1.0 / (PI * t * t);
    let integrand = |w: f64| {
        let f = dispersion(b, w);
        prefactor * f * f * sech2(f / t)
    };
    Ok(integrate(integrand, 0.0, PI, &params.integration)?.value)
}

/// The single-power variant `1/(πT²) ∫ f / cosh²(f/T) dω`, kept only so the
/// two candidates can be compared against exact diagonalization.
pub fn katsura_heat_capacity_linear_f(field: f64, t: f64) -> Result<f64> {
    check_temperature(t)?;
    let params = DispersionParams::new(field);
    let prefactor = 1.0 / (PI * t * t);
    let integrand = |w: f64| {
        let f = dispersion(field, w);
        prefactor * f * sech2(f / t)
    };
    Ok(integrate(integrand, 0.0, PI, &params.integration)?.value)
}

/// Internal energy per spin of the infinite XX chain
/// `H = J Σ (σˣσˣ + σʸσʸ)`, evaluated as printed:
/// `U = −(4/π) ∫₀^{π/2} tanh((2/T) sin ω) sin ω dω`.
///
/// With `J > 0` this is the antiferromagnetic sign convention; the ground
/// energy is `−4/π` per spin.
pub fn xx_internal_energy(t: f64) -> Result<f64> {
    check_temperature(t)?;
    let opts = QuadOptions {
        abs_tol: 1e-13,
        rel_tol: 1e-12,
        max_subdivisions: 2000,
    };
    let integrand = |w: f64| {
        let s = w.sin();
        (2.0 * s / t).tanh() * s
    };
    Ok(-4.0 / PI * integrate(integrand, 0.0, FRAC_PI_2, &opts)?.value)
}

/// Upper end of the temperature window in which [`xx_low_t_energy`] is
/// treated as a usable approximation.
pub const XX_LOW_T_WINDOW: f64 = 0.3;

/// Value of a low-temperature expansion with its validity flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowTEstimate {
    pub value: f64,
    pub within_window: bool,
}

/// Low-temperature XX energy `−4/π + T²/(3π)`.
///
/// The form comes from a piecewise approximation of the `tanh` factor; the
/// exact quadratic coefficient of the integral is `π/24` rather than
/// `1/(3π)`, so the two drift apart as `≈ 0.0248·T²`. `within_window` is
/// false above [`XX_LOW_T_WINDOW`].
pub fn xx_low_t_energy(t: f64) -> LowTEstimate {
    LowTEstimate {
        value: -4.0 / PI + t * t / (3.0 * PI),
        within_window: t <= XX_LOW_T_WINDOW,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn katsura_limits() {
        assert!(katsura_heat_capacity(1.0, 1e3).unwrap() < 1e-3);
        assert!(katsura_heat_capacity(2.0, 0.05).unwrap() < 1e-6);
        assert!(matches!(katsura_heat_capacity(1.0, 0.0), Err(Error::NonPositiveTemperature(_))));
    }

    #[test]
    fn katsura_high_temperature_series() {
        // C ≈ Var_∞(H)/(N T²) = (1 + B²)/T² at leading order.
        for b in [0.0, 0.5, 2.0] {
            let t = 200.0;
            let c = katsura_heat_capacity(b, t).unwrap();
            assert!((c * t * t / (1.0 + b * b) - 1.0).abs() < 1e-3);
        }
    }

    #[test]
    fn katsura_zero_field_is_two_level() {
        // B = 0: f ≡ 1, so C = sech²(1/T)/T².
        for t in [0.2, 0.7, 3.0] {
            let expected = sech2(1.0 / t) / (t * t);
            assert_abs_diff_eq!(katsura_heat_capacity(0.0, t).unwrap(), expected, epsilon = 1e-9);
        }
    }

    #[test]
    fn katsura_even_in_field_and_nonnegative() {
        for i in 0..20 {
            let b = 4.0 * i as f64 / 19.0;
            for k in 0..20 {
                let t = 0.05 * (100f64).powf(k as f64 / 19.0);
                let c = katsura_heat_capacity(b, t).unwrap();
                assert!(c >= 0.0);
                if k % 5 == 0 {
                    let m = katsura_heat_capacity(-b, t).unwrap();
                    assert!((c - m).abs() <= 1e-9, "B={b} T={t}");
                }
            }
        }
    }

    #[test]
    fn xx_energy_limits() {
        assert_abs_diff_eq!(xx_internal_energy(1e-4).unwrap(), -4.0 / PI, epsilon = 1e-6);
        assert!(xx_internal_energy(1e4).unwrap().abs() < 1e-3);
        let u1 = xx_internal_energy(0.1).unwrap();
        assert!((u1 - xx_low_t_energy(0.1).value).abs() < 5e-4);
        // quadrature reference from an independent integrator: −1.271927693495618
        assert_abs_diff_eq!(u1, -1.271_927_693_495_618, epsilon = 1e-10);
    }

    #[test]
    fn xx_energy_increases_with_temperature() {
        let mut last = f64::NEG_INFINITY;
        for k in 0..40 {
            let t = 0.01 * 1.25f64.powi(k);
            let u = xx_internal_energy(t).unwrap();
            assert!(u >= last - 1e-12);
            last = u;
        }
    }

    #[test]
    fn low_t_form() {
        assert_eq!(xx_low_t_energy(0.0).value, -4.0 / PI);
        assert_abs_diff_eq!(xx_low_t_energy(0.1).value, -4.0 / PI + 0.01 / (3.0 * PI), epsilon = 1e-15);
        assert!(xx_low_t_energy(0.2).within_window);
        assert!(!xx_low_t_energy(0.5).within_window);
    }
}
