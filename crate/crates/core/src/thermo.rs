//! Canonical-ensemble thermodynamics of a finite spectrum.
//!
//! Heat capacity comes from the fluctuation identity `C = (⟨H²⟩ − ⟨H⟩²)/(kT²)`.
//! Boltzmann sums are shifted by the ground energy so they never overflow.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Sorted eigenvalues of a Hamiltonian on `n_sites` sites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    energies: Vec<f64>,
    n_sites: usize,
}

impl Spectrum {
    pub fn new(mut energies: Vec<f64>, n_sites: usize) -> Result<Self> {
        if energies.is_empty() {
            return Err(Error::EmptySpectrum);
        }
        if energies.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidArgument("non-finite energy in spectrum".into()));
        }
        if n_sites == 0 {
            return Err(Error::InvalidArgument("n_sites must be positive".into()));
        }
        energies.sort_by(f64::total_cmp);
        Ok(Self { energies, n_sites })
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn ground_energy(&self) -> f64 {
        self.energies[0]
    }

    pub fn width(&self) -> f64 {
        self.energies[self.energies.len() - 1] - self.energies[0]
    }

    /// Smallest nonzero level spacing above the ground state (`None` if all
    /// levels coincide within `tol`).
    pub fn gap(&self, tol: f64) -> Option<f64> {
        let e0 = self.ground_energy();
        self.energies
            .iter()
            .map(|e| e - e0)
            .find(|de| *de > tol)
    }

    /// Copy with every energy shifted by `offset`.
    pub fn shifted(&self, offset: f64) -> Self {
        Self {
            energies: self.energies.iter().map(|e| e + offset).collect(),
            n_sites: self.n_sites,
        }
    }

    /// Normalized Gibbs weights at temperature `t` (units of J/k).
    pub fn gibbs_weights(&self, t: f64) -> Result<Vec<f64>> {
        check_temperature(t)?;
        let e0 = self.ground_energy();
        let mut w: Vec<f64> = self.energies.iter().map(|e| (-(e - e0) / t).exp()).collect();
        let z: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= z);
        Ok(w)
    }

    /// Thermodynamic state at a single temperature, whole-system values.
    fn moments(&self, t: f64) -> Result<Moments> {
        check_temperature(t)?;
        let e0 = self.ground_energy();
        let mut z = 0.0;
        let mut first = 0.0;
        for e in &self.energies {
            let de = e - e0;
            let w = (-de / t).exp();
            z += w;
            first += w * de;
        }
        let mean = first / z;
        // Second pass about the mean keeps the variance accurate at high T.
        let variance = self
            .energies
            .iter()
            .map(|e| {
                let de = e - e0;
                (-de / t).exp() * (de - mean) * (de - mean)
            })
            .sum::<f64>()
            / z;
        Ok(Moments {
            mean: e0 + mean,
            variance,
            log_z: -e0 / t + z.ln(),
        })
    }

    pub fn point(&self, t: f64) -> Result<ThermoPoint> {
        let m = self.moments(t)?;
        let n = self.n_sites as f64;
        Ok(ThermoPoint {
            temperature: t,
            u_per_site: m.mean / n,
            c_per_site: m.variance / (t * t) / n,
            log_z_per_site: m.log_z / n,
        })
    }
}

struct Moments {
    mean: f64,
    variance: f64,
    log_z: f64,
}

fn check_temperature(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveTemperature(t))
    }
}

/// Per-site values at one temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermoPoint {
    pub temperature: f64,
    pub u_per_site: f64,
    pub c_per_site: f64,
    pub log_z_per_site: f64,
}

/// Per-site thermodynamic curves on a temperature grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermoCurve {
    pub temperatures: Vec<f64>,
    pub u_per_site: Vec<f64>,
    pub c_per_site: Vec<f64>,
    pub log_z_per_site: Vec<f64>,
}

impl ThermoCurve {
    pub fn len(&self) -> usize {
        self.temperatures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.temperatures.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = ThermoPoint> + '_ {
        (0..self.len()).map(|i| ThermoPoint {
            temperature: self.temperatures[i],
            u_per_site: self.u_per_site[i],
            c_per_site: self.c_per_site[i],
            log_z_per_site: self.log_z_per_site[i],
        })
    }

    /// Builds a curve from sampled heat capacities only (U and ln Z unknown).
    pub fn from_heat_capacity(temperatures: Vec<f64>, c_per_site: Vec<f64>) -> Result<Self> {
        if temperatures.len() != c_per_site.len() {
            return Err(Error::InvalidArgument(
                "temperature and heat-capacity columns differ in length".into(),
            ));
        }
        validate_grid(&temperatures)?;
        let n = temperatures.len();
        Ok(Self {
            temperatures,
            c_per_site,
            u_per_site: vec![f64::NAN; n],
            log_z_per_site: vec![f64::NAN; n],
        })
    }
}

/// Strictly increasing, positive, finite.
pub fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("temperature grid is empty".into()));
    }
    for &t in grid {
        check_temperature(t)?;
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "temperature grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// `U`, `C` and `ln Z` per site on `grid`.
pub fn thermo_from_spectrum(spectrum: &Spectrum, grid: &[f64]) -> Result<ThermoCurve> {
    validate_grid(grid)?;
    let mut curve = ThermoCurve {
        temperatures: grid.to_vec(),
        u_per_site: Vec::with_capacity(grid.len()),
        c_per_site: Vec::with_capacity(grid.len()),
        log_z_per_site: Vec::with_capacity(grid.len()),
    };
    for &t in grid {
        let p = spectrum.point(t)?;
        curve.u_per_site.push(p.u_per_site);
        curve.c_per_site.push(p.c_per_site);
        curve.log_z_per_site.push(p.log_z_per_site);
    }
    Ok(curve)
}

/// Gibbs variance `⟨H²⟩ − ⟨H⟩²` of the whole system (equals `kT²·C`).
pub fn thermal_variance(spectrum: &Spectrum, t: f64) -> Result<f64> {
    Ok(spectrum.moments(t)?.variance)
}

/// `points` temperatures spaced geometrically over `[tmin, tmax]`.
pub fn geometric_grid(tmin: f64, tmax: f64, points: usize) -> Result<Vec<f64>> {
    check_temperature(tmin)?;
    check_temperature(tmax)?;
    if points == 0 {
        return Err(Error::InvalidArgument("grid needs at least one point".into()));
    }
    if points == 1 {
        return Ok(vec![tmin]);
    }
    if tmax <= tmin {
        return Err(Error::InvalidArgument(format!(
            "tmax ({tmax}) must exceed tmin ({tmin})"
        )));
    }
    let ratio = (tmax / tmin).ln() / (points - 1) as f64;
    let mut grid: Vec<f64> = (0..points).map(|i| tmin * (ratio * i as f64).exp()).collect();
    grid[points - 1] = tmax;
    Ok(grid)
}

/// Points per decade used by [`default_grid`].
pub const POINTS_PER_DECADE: usize = 200;

/// Geometric grid with [`POINTS_PER_DECADE`] points per decade of `tmax/tmin`.
pub fn default_grid(tmin: f64, tmax: f64) -> Result<Vec<f64>> {
    check_temperature(tmin)?;
    check_temperature(tmax)?;
    let decades = (tmax / tmin).log10().max(0.0);
    let points = ((decades * POINTS_PER_DECADE as f64).ceil() as usize + 1).max(2);
    geometric_grid(tmin, tmax, points)
}
