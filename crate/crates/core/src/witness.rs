//! Heat-capacity entanglement witnesses.
//!
//! Every witness has the shape `C_sep(T) ≥ constant / T^p`: no separable
//! state can have a heat capacity below the bound. A physical curve that
//! dips under it certifies entanglement. Three constants are supported:
//!
//! | kind       | constant          | p |
//! |------------|-------------------|---|
//! | `Variance` | min product-state variance per site | 2 |
//! | `Gapless`  | `γ (E_B − E₀)`    | 1 |
//! | `Gapped`   | `Δ (E_B − E₀)/k`  | 2 |
//!
//! Because the bound diverges as `T → 0` while any physical `C` vanishes,
//! curves cross it from above at low temperature; the largest crossing is
//! reported as the critical temperature.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{katsura_heat_capacity_with, DispersionParams};
use crate::sepbound::minimize_variance;
use crate::spin_model::ModelSpec;
use crate::thermo::{validate_grid, Spectrum, ThermoCurve};
use crate::{Error, Result};

/// Literature inputs for the worked examples.
pub mod constants {
    /// Ground energy per spin of the infinite spin-1/2 Heisenberg chain (J).
    pub const XXX_HALF_GROUND_ENERGY: f64 = -0.443;
    /// Ground energy per spin of the infinite spin-1 Heisenberg chain (J).
    pub const XXX_ONE_GROUND_ENERGY: f64 = -1.401;
    /// Haldane gap of the spin-1 Heisenberg chain (J).
    pub const XXX_ONE_GAP: f64 = 0.411;
    /// `γ` for 1+1-dimensional gapless chains, where `C ∝ T`.
    pub const GAPLESS_GAMMA: f64 = 2.0;
    /// Default upper temperature of the low-T approximations.
    pub const DEFAULT_VALIDITY_T_MAX: f64 = 0.1;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    Variance,
    Gapless,
    Gapped,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessInputs {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub e0_per_site: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub eb_per_site: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub gap: Option<f64>,
}

/// `constant / T^exponent`, the smallest heat capacity a separable state can have.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessBound {
    pub kind: WitnessKind,
    pub constant: f64,
    pub exponent: i32,
    pub inputs: WitnessInputs,
}

fn energy_gap(e0: f64, eb: f64) -> Result<f64> {
    if !(e0.is_finite() && eb.is_finite()) {
        return Err(Error::InvalidArgument("energies must be finite".into()));
    }
    if eb < e0 {
        return Err(Error::InvalidBound { e0, eb });
    }
    Ok(eb - e0)
}

impl WitnessBound {
    /// Bound from the minimal product-state variance per site.
    pub fn variance(min_variance: f64) -> Result<Self> {
        if !(min_variance >= 0.0 && min_variance.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "variance bound must be nonnegative, got {min_variance}"
            )));
        }
        Ok(Self {
            kind: WitnessKind::Variance,
            constant: min_variance,
            exponent: 2,
            inputs: WitnessInputs::default(),
        })
    }

    /// `C ≥ γ (E_B − E₀)/T` for gapless systems with `U − E₀ ∝ T^γ`.
    pub fn gapless(e0: f64, eb: f64, gamma: f64) -> Result<Self> {
        let de = energy_gap(e0, eb)?;
        if !(gamma > 1.0 && gamma.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "gamma must exceed 1 for C to vanish at T = 0, got {gamma}"
            )));
        }
        Ok(Self {
            kind: WitnessKind::Gapless,
            constant: gamma * de,
            exponent: 1,
            inputs: WitnessInputs {
                e0_per_site: Some(e0),
                eb_per_site: Some(eb),
                gamma: Some(gamma),
                gap: None,
            },
        })
    }

    /// `C ≥ Δ (E_B − E₀)/(k T²)` for gapped systems (`k = 1`).
    pub fn gapped(e0: f64, eb: f64, gap: f64) -> Result<Self> {
        let de = energy_gap(e0, eb)?;
        if !(gap > 0.0 && gap.is_finite()) {
            return Err(Error::InvalidArgument(format!("gap must be positive, got {gap}")));
        }
        Ok(Self {
            kind: WitnessKind::Gapped,
            constant: gap * de,
            exponent: 2,
            inputs: WitnessInputs {
                e0_per_site: Some(e0),
                eb_per_site: Some(eb),
                gamma: None,
                gap: Some(gap),
            },
        })
    }

    pub fn value_at(&self, t: f64) -> f64 {
        self.constant / t.powi(self.exponent)
    }

    /// A zero constant certifies nothing: `C → 0` is then allowed.
    pub fn is_vacuous(&self) -> bool {
        self.constant == 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveSource {
    ExactDiag,
    Katsura,
    UserData,
    Model,
}

/// Heat capacity per site as a function of temperature.
pub trait HeatCapacityCurve: Sync {
    fn heat_capacity(&self, t: f64) -> Result<f64>;
    fn source(&self) -> CurveSource;
}

impl HeatCapacityCurve for Spectrum {
    fn heat_capacity(&self, t: f64) -> Result<f64> {
        Ok(self.point(t)?.c_per_site)
    }

    fn source(&self) -> CurveSource {
        CurveSource::ExactDiag
    }
}

/// Infinite transverse Ising ring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KatsuraCurve {
    pub params: DispersionParams,
}

impl KatsuraCurve {
    pub fn new(field: f64) -> Self {
        Self {
            params: DispersionParams::new(field),
        }
    }
}

impl HeatCapacityCurve for KatsuraCurve {
    fn heat_capacity(&self, t: f64) -> Result<f64> {
        katsura_heat_capacity_with(&self.params, t)
    }

    fn source(&self) -> CurveSource {
        CurveSource::Katsura
    }
}

/// Closed-form model curve.
pub struct FnCurve<F>(pub F);

impl<F: Fn(f64) -> f64 + Sync> HeatCapacityCurve for FnCurve<F> {
    fn heat_capacity(&self, t: f64) -> Result<f64> {
        Ok((self.0)(t))
    }

    fn source(&self) -> CurveSource {
        CurveSource::Model
    }
}

/// Piecewise-linear interpolation of `(T, C)` samples; no extrapolation.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedCurve {
    temperatures: Vec<f64>,
    values: Vec<f64>,
}

impl TabulatedCurve {
    pub fn new(temperatures: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if temperatures.len() < 2 {
            return Err(Error::InvalidArgument(
                "a tabulated curve needs at least 2 points".into(),
            ));
        }
        if temperatures.len() != values.len() {
            return Err(Error::InvalidArgument("column lengths differ".into()));
        }
        validate_grid(&temperatures)?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("heat capacity values must be finite".into()));
        }
        Ok(Self {
            temperatures,
            values,
        })
    }

    pub fn temperatures(&self) -> &[f64] {
        &self.temperatures
    }
}

impl HeatCapacityCurve for TabulatedCurve {
    fn heat_capacity(&self, t: f64) -> Result<f64> {
        interpolate(&self.temperatures, &self.values, t)
    }

    fn source(&self) -> CurveSource {
        CurveSource::UserData
    }
}

impl HeatCapacityCurve for ThermoCurve {
    fn heat_capacity(&self, t: f64) -> Result<f64> {
        interpolate(&self.temperatures, &self.c_per_site, t)
    }

    fn source(&self) -> CurveSource {
        CurveSource::UserData
    }
}

fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> Result<f64> {
    let (first, last) = (xs[0], xs[xs.len() - 1]);
    if !(x >= first && x <= last) {
        return Err(Error::InvalidArgument(format!(
            "temperature {x} outside tabulated range [{first}, {last}]"
        )));
    }
    let hi = xs.partition_point(|v| *v < x).max(1).min(xs.len() - 1);
    let lo = hi - 1;
    let w = (x - xs[lo]) / (xs[hi] - xs[lo]);
    Ok(ys[lo] + w * (ys[hi] - ys[lo]))
}

/// Temperatures up to `t_max` where a low-temperature approximation holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidityWindow {
    pub t_max: f64,
}

impl Default for ValidityWindow {
    fn default() -> Self {
        Self {
            t_max: constants::DEFAULT_VALIDITY_T_MAX,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSample {
    pub temperature: f64,
    pub heat_capacity: f64,
    pub bound: f64,
    /// `bound − C`; positive means entangled.
    pub margin: f64,
    pub entangled: bool,
    pub within_validity: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessReport {
    pub bound: WitnessBound,
    /// Largest temperature at which the margin changes sign.
    pub critical_temperature: Option<f64>,
    /// Every refined sign change, ascending.
    pub crossings: Vec<f64>,
    pub curve_source: CurveSource,
    pub samples: Vec<RegionSample>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub validity: Option<ValidityWindow>,
    /// The critical temperature lies outside the validity window, so the
    /// verdict there rests on an extrapolated approximation.
    pub approximation_limited: bool,
    pub warnings: Vec<String>,
}

impl WitnessReport {
    /// Samples where the curve lies below the separable bound.
    pub fn entangled_region(&self) -> impl Iterator<Item = &RegionSample> {
        self.samples.iter().filter(|s| s.entangled)
    }

    /// Entangled samples that also fall inside the validity window.
    pub fn entangled_within_validity(&self) -> impl Iterator<Item = &RegionSample> {
        self.samples.iter().filter(|s| s.entangled && s.within_validity)
    }
}

/// Relative width at which bisection stops.
const BISECTION_REL_WIDTH: f64 = 1e-14;

fn bisect<F>(margin: F, mut lo: f64, mut hi: f64, lo_positive: bool) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= BISECTION_REL_WIDTH * hi {
            return Ok(mid);
        }
        let m = margin(mid)?;
        if m == 0.0 {
            return Ok(mid);
        }
        if (m > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Compares `curve` with `bound` on `grid` and refines every sign change of
/// the margin by bisection on the curve itself.
pub fn evaluate_witness(
    bound: &WitnessBound,
    curve: &dyn HeatCapacityCurve,
    grid: &[f64],
    validity: Option<ValidityWindow>,
) -> Result<WitnessReport> {
    validate_grid(grid)?;
    let mut samples = Vec::with_capacity(grid.len());
    for &t in grid {
        let c = curve.heat_capacity(t)?;
        let b = bound.value_at(t);
        let margin = b - c;
        samples.push(RegionSample {
            temperature: t,
            heat_capacity: c,
            bound: b,
            margin,
            entangled: margin > 0.0,
            within_validity: validity.map_or(true, |w| t <= w.t_max),
        });
    }

    let margin_at = |t: f64| -> Result<f64> { Ok(bound.value_at(t) - curve.heat_capacity(t)?) };
    let mut crossings = Vec::new();
    for pair in samples.windows(2) {
        if pair[0].entangled != pair[1].entangled {
            crossings.push(bisect(
                margin_at,
                pair[0].temperature,
                pair[1].temperature,
                pair[0].entangled,
            )?);
        }
    }
    let critical_temperature = crossings.last().copied();

    let mut warnings = Vec::new();
    if bound.is_vacuous() {
        warnings.push("vacuous bound: a zero constant certifies no entanglement".to_string());
    }
    if critical_temperature.is_none() {
        let (lo, hi) = (grid[0], grid[grid.len() - 1]);
        if samples.iter().all(|s| s.entangled) {
            warnings.push(format!(
                "curve lies below the bound on the whole grid [{lo}, {hi}]; no crossing found"
            ));
        } else {
            warnings.push(format!("no crossing of the bound within [{lo}, {hi}]"));
        }
    }
    let approximation_limited = match (validity, critical_temperature) {
        (Some(w), Some(tc)) => tc > w.t_max,
        (Some(w), None) => samples.iter().any(|s| s.entangled && s.temperature > w.t_max),
        _ => false,
    };
    if approximation_limited {
        warnings.push("entanglement verdict extends beyond the approximation's validity window".into());
    }

    Ok(WitnessReport {
        bound: *bound,
        critical_temperature,
        crossings,
        curve_source: curve.source(),
        samples,
        validity,
        approximation_limited,
        warnings,
    })
}

/// Variance witness `C < bound_value / T²`.
pub fn variance_witness(
    bound_value: f64,
    curve: &dyn HeatCapacityCurve,
    grid: &[f64],
) -> Result<WitnessReport> {
    evaluate_witness(&WitnessBound::variance(bound_value)?, curve, grid, None)
}

/// Gapless witness `C < γ (E_B − E₀)/T`.
pub fn gapless_witness(
    e0: f64,
    eb: f64,
    gamma: f64,
    curve: &dyn HeatCapacityCurve,
    grid: &[f64],
    validity: ValidityWindow,
) -> Result<WitnessReport> {
    evaluate_witness(&WitnessBound::gapless(e0, eb, gamma)?, curve, grid, Some(validity))
}

/// Gapped witness `C < Δ (E_B − E₀)/T²`.
pub fn gapped_witness(
    e0: f64,
    eb: f64,
    gap: f64,
    curve: &dyn HeatCapacityCurve,
    grid: &[f64],
    validity: ValidityWindow,
) -> Result<WitnessReport> {
    evaluate_witness(&WitnessBound::gapped(e0, eb, gap)?, curve, grid, Some(validity))
}

/// Low-temperature heat capacity of a gapped system, `c′ T^δ e^{−Δ/T}`.
pub fn gapped_heat_capacity(c_prime: f64, delta_exp: f64, gap: f64, t: f64) -> f64 {
    c_prime * t.powf(delta_exp) * (-gap / t).exp()
}

/// Asymptotic `U(T) − E₀ ≈ c′ T^{δ+2} e^{−Δ/T} / Δ` with a validity flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GappedEnergy {
    pub value: f64,
    /// `T ≤ Δ/5`; the neglected correction is of relative order `T/Δ`.
    pub within_window: bool,
}

pub fn gapped_energy_consistency(c_prime: f64, delta_exp: f64, gap: f64, t: f64) -> Result<GappedEnergy> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::NonPositiveTemperature(t));
    }
    if !(gap > 0.0) {
        return Err(Error::InvalidArgument(format!("gap must be positive, got {gap}")));
    }
    Ok(GappedEnergy {
        value: c_prime * t.powf(delta_exp + 2.0) * (-gap / t).exp() / gap,
        within_window: t <= gap / 5.0,
    })
}

/// One heat-capacity measurement with its standard uncertainty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub temperature: f64,
    pub heat_capacity: f64,
    #[serde(default)]
    pub sigma: f64,
}

/// Applies `bound` to measured data. A point counts as entangled only if
/// `C + σ` is still below the bound; crossings use piecewise-linear
/// interpolation of `C + σ`.
pub fn witness_from_measurements(
    data: &[Measurement],
    bound: &WitnessBound,
    validity: Option<ValidityWindow>,
) -> Result<WitnessReport> {
    if data.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 measurements, got {}",
            data.len()
        )));
    }
    if let Some(m) = data.iter().find(|m| !(m.temperature > 0.0)) {
        return Err(Error::NonPositiveTemperature(m.temperature));
    }
    if data.iter().any(|m| !(m.sigma >= 0.0)) {
        return Err(Error::InvalidArgument("uncertainties must be nonnegative".into()));
    }
    let temperatures: Vec<f64> = data.iter().map(|m| m.temperature).collect();
    let upper: Vec<f64> = data.iter().map(|m| m.heat_capacity + m.sigma).collect();
    let curve = TabulatedCurve::new(temperatures.clone(), upper)?;
    let mut report = evaluate_witness(bound, &curve, &temperatures, validity)?;
    // Report the measured values, not the shifted ones.
    for (s, m) in report.samples.iter_mut().zip(data) {
        s.heat_capacity = m.heat_capacity;
    }
    Ok(report)
}

/// Critical temperature of the variance witness for one field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionPoint {
    pub field: f64,
    pub bound: f64,
    pub critical_temperature: Option<f64>,
}

/// Default temperature grid for critical-temperature searches.
pub fn critical_search_grid() -> Vec<f64> {
    crate::thermo::geometric_grid(0.01, 20.0, 133).expect("static grid is valid")
}

/// `T_c(B)` of the infinite transverse Ising ring against the period-2
/// variance bound. Fields are processed in parallel; output order follows
/// `fields`.
pub fn critical_temperature_curve(fields: &[f64], grid: &[f64]) -> Result<Vec<RegionPoint>> {
    fields
        .par_iter()
        .map(|&b| {
            let bound = minimize_variance(&ModelSpec::ising(4, 1.0, b), 2, 8)?.value_per_site;
            let report = variance_witness(bound, &KatsuraCurve::new(b), grid)?;
            Ok(RegionPoint {
                field: b,
                bound,
                critical_temperature: report.critical_temperature,
            })
        })
        .collect()
}
