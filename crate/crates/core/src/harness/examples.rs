//! Built-in initial data and closed-form solutions.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::InitialData;
use crate::spectral::{ComplexField, GridSpec, RealField};

fn sech(x: f64) -> f64 {
    1.0 / x.cosh()
}

/// Which `u(x, 0)`, `u_t(x, 0)` pair seeds the 1D soliton.
///
/// `Exact` samples the classical (α = β = 2) traveling-wave solution and its
/// time derivative at `t = 0`. `Printed` uses the alternative formulas
/// `u₀ = 3r / (4(1-r²)) sech²(z)` and `ũ₀ = 3 / (4(1-r²)^{3/2}) sech²(z) tanh(z)`,
/// which differ from the exact pair by a factor `r` in each function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum U0Variant {
    #[default]
    Exact,
    Printed,
}

impl fmt::Display for U0Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            U0Variant::Exact => "exact",
            U0Variant::Printed => "printed",
        })
    }
}

impl FromStr for U0Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(U0Variant::Exact),
            "printed" => Ok(U0Variant::Printed),
            other => Err(Error::Parse(format!("unknown u0 variant `{other}`"))),
        }
    }
}

/// The sech² soliton of the 1D system with velocity `r` and initial phase `x0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Soliton {
    pub r: f64,
    pub x0: f64,
}

impl Soliton {
    pub fn new(r: f64, x0: f64) -> Result<Self> {
        if !(r.is_finite() && r.abs() < 1.0) {
            return Err(Error::Domain(format!(
                "soliton velocity needs |r| < 1, got {r}"
            )));
        }
        if !x0.is_finite() {
            return Err(Error::Domain(format!(
                "initial phase must be finite, got {x0}"
            )));
        }
        Ok(Soliton { r, x0 })
    }

    fn gamma(&self) -> f64 {
        1.0 - self.r * self.r
    }

    fn z(&self, x: f64, t: f64) -> f64 {
        (x - self.r * t - self.x0) / (2.0 * self.gamma().sqrt())
    }

    /// Peak of `|φ|`.
    pub fn phi_amplitude(&self) -> f64 {
        3.0 * 2f64.sqrt() / (4.0 * self.gamma().sqrt())
    }

    /// Peak of `u`.
    pub fn u_amplitude(&self) -> f64 {
        3.0 / (4.0 * self.gamma())
    }

    /// Temporal phase rate of `φ`.
    pub fn frequency(&self) -> f64 {
        let r2 = self.r * self.r;
        (1.0 - r2 + r2 * r2) / (2.0 * self.gamma())
    }

    pub fn phi(&self, x: f64, t: f64) -> Complex64 {
        let env = self.phi_amplitude() * sech(self.z(x, t)).powi(2);
        Complex64::from_polar(env, self.r * x + self.frequency() * t)
    }

    pub fn u(&self, x: f64, t: f64) -> f64 {
        self.u_amplitude() * sech(self.z(x, t)).powi(2)
    }

    pub fn u_t(&self, x: f64, t: f64) -> f64 {
        let z = self.z(x, t);
        3.0 * self.r / (4.0 * self.gamma().powf(1.5)) * sech(z).powi(2) * z.tanh()
    }

    /// Initial data at `t = 0` with the chosen `u` pair.
    pub fn initial_data(&self, variant: U0Variant) -> InitialData {
        let s = *self;
        let phi0 = move |x: &[f64]| s.phi(x[0], 0.0);
        match variant {
            U0Variant::Exact => {
                InitialData::new(phi0, move |x| s.u(x[0], 0.0), move |x| s.u_t(x[0], 0.0))
            }
            U0Variant::Printed => {
                let g = s.gamma();
                InitialData::new(
                    phi0,
                    move |x| 3.0 * s.r / (4.0 * g) * sech(s.z(x[0], 0.0)).powi(2),
                    move |x| {
                        let z = s.z(x[0], 0.0);
                        3.0 / (4.0 * g.powf(1.5)) * sech(z).powi(2) * z.tanh()
                    },
                )
            }
        }
    }
}

/// Soliton initial data for the `ex41` preset (exact `u` pair).
pub fn example_41_initial(r: f64, x0: f64) -> Result<InitialData> {
    example_41_initial_with(r, x0, U0Variant::Exact)
}

pub fn example_41_initial_with(r: f64, x0: f64, variant: U0Variant) -> Result<InitialData> {
    Ok(Soliton::new(r, x0)?.initial_data(variant))
}

/// Nodal samples of the α = β = 2 soliton at time `t`.
pub fn exact_solution_alpha2_1d(
    grid: &GridSpec,
    r: f64,
    x0: f64,
    t: f64,
) -> Result<(ComplexField, RealField)> {
    if grid.dim() != 1 {
        return Err(Error::UnsupportedDimension(grid.dim()));
    }
    let s = Soliton::new(r, x0)?;
    Ok((
        ComplexField::from_fn(grid, |x| s.phi(x[0], t)),
        RealField::from_fn(grid, |x| s.u(x[0], t)),
    ))
}

/// Plane wave `φ = A exp(i(ω(x+y) - θt))`, `u = |φ|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWave {
    pub amplitude: f64,
    pub wavenumber: f64,
    pub theta: f64,
}

impl PlaneWave {
    /// Parameters of the 2D test problem: `A = 1`, `ω = 1`, `θ = -0.5`.
    pub const EXAMPLE_42: PlaneWave = PlaneWave {
        amplitude: 1.0,
        wavenumber: 1.0,
        theta: -0.5,
    };

    /// Phase rate that makes the plane wave an exact solution of the 2D system
    /// for order `alpha`: `θ = ½ (2ω²)^{α/2} - A`.
    pub fn dispersion_consistent(amplitude: f64, wavenumber: f64, alpha: f64) -> Self {
        let xi2 = 2.0 * wavenumber * wavenumber;
        PlaneWave {
            amplitude,
            wavenumber,
            theta: 0.5 * xi2.powf(0.5 * alpha) - amplitude,
        }
    }

    pub fn phi(&self, x: f64, y: f64, t: f64) -> Complex64 {
        Complex64::from_polar(self.amplitude, self.wavenumber * (x + y) - self.theta * t)
    }

    pub fn u(&self) -> f64 {
        self.amplitude.abs()
    }

    pub fn initial_data(&self) -> InitialData {
        let w = *self;
        InitialData::new(move |x| w.phi(x[0], x[1], 0.0), move |_| w.u(), |_| 0.0)
    }

    pub fn sample(&self, grid: &GridSpec, t: f64) -> Result<(ComplexField, RealField)> {
        if grid.dim() != 2 {
            return Err(Error::Config(format!(
                "plane wave needs a 2D grid, got dimension {}",
                grid.dim()
            )));
        }
        Ok((
            ComplexField::from_fn(grid, |x| self.phi(x[0], x[1], t)),
            RealField::constant(grid, self.u()),
        ))
    }
}

/// Closed form of the 2D test problem with its stated parameters.
pub fn exact_solution_alpha2_2d(grid: &GridSpec, t: f64) -> Result<(ComplexField, RealField)> {
    PlaneWave::EXAMPLE_42.sample(grid, t)
}

/// Gaussian pulse of the `ex43` preset:
/// `φ₀ = (1+i) e^{-|x|²}`, `u₀ = sech(|x|²)`, `ũ₀ = sin(x+y) sech(-2|x|²)`.
pub fn example_43_initial() -> InitialData {
    let r2 = |x: &[f64]| x.iter().map(|c| c * c).sum::<f64>();
    InitialData::new(
        move |x| Complex64::new(1.0, 1.0) * (-r2(x)).exp(),
        move |x| sech(r2(x)),
        move |x| {
            let s: f64 = x.iter().sum();
            s.sin() * sech(-2.0 * r2(x))
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::initialize;

    #[test]
    fn soliton_rejects_superluminal_velocity() {
        assert!(matches!(Soliton::new(1.0, 0.0), Err(Error::Domain(_))));
        assert!(matches!(Soliton::new(-1.2, 0.0), Err(Error::Domain(_))));
        assert!(example_41_initial(0.99, 0.0).is_ok());
    }

    #[test]
    fn u0_variants_at_rest() {
        let exact = example_41_initial_with(0.0, 0.0, U0Variant::Exact).unwrap();
        assert!(((exact.u0)(&[0.0]) - 0.75).abs() < 1e-15);
        let printed = example_41_initial_with(0.0, 0.0, U0Variant::Printed).unwrap();
        assert_eq!((printed.u0)(&[0.0]), 0.0);
    }

    #[test]
    fn soliton_peak_values() {
        let data = example_41_initial(-0.8, 0.0).unwrap();
        let peak = (data.phi0)(&[0.0]).norm();
        assert!((peak - 3.0 * 2f64.sqrt() / 2.4).abs() < 1e-14);
        assert!((peak - 1.767767).abs() < 1e-6);
        let s = Soliton::new(-0.8, 0.0).unwrap();
        assert!((s.u_amplitude() - 2.0833333333333335).abs() < 1e-14);
        // the peak of u travels along x = r t
        assert!((s.u(-0.8 * 3.0, 3.0) - s.u_amplitude()).abs() < 1e-14);
    }

    #[test]
    fn exact_solution_matches_initial_data() {
        let g = GridSpec::line(-20.0, 20.0, 64).unwrap();
        let (phi, u) = exact_solution_alpha2_1d(&g, -0.8, 1.0, 0.0).unwrap();
        let s = initialize(&g, &example_41_initial(-0.8, 1.0).unwrap()).unwrap();
        for j in 0..g.len() {
            assert_eq!(phi.values()[j].re, s.q.values()[j]);
            assert_eq!(phi.values()[j].im, s.p.values()[j]);
            assert_eq!(u.values()[j], s.u.values()[j]);
        }
    }

    #[test]
    fn soliton_travels() {
        let s = Soliton::new(-0.8, 0.0).unwrap();
        let dt = 0.37;
        for x in [-3.0, -0.5, 0.0, 1.25, 4.0] {
            let t = 2.0;
            assert!((s.u(x, t) - s.u(x - s.r * dt, t - dt)).abs() < 1e-14);
            // modulus is the sech² envelope, independent of the phase
            let env = s.phi_amplitude() * sech(s.z(x, t)).powi(2);
            assert!((s.phi(x, t).norm() - env).abs() < 1e-14);
        }
    }

    #[test]
    fn time_derivative_matches_finite_difference() {
        let s = Soliton::new(-0.8, 0.5).unwrap();
        let eps = 1e-6;
        for x in [-2.0, -0.3, 0.9, 3.0] {
            let fd = (s.u(x, eps) - s.u(x, -eps)) / (2.0 * eps);
            assert!((fd - s.u_t(x, 0.0)).abs() < 1e-8);
        }
    }

    #[test]
    fn plane_wave_values() {
        let g = GridSpec::square(0.0, 2.0 * std::f64::consts::PI, 8).unwrap();
        for t in [0.0, 0.3, 1.0] {
            let (phi, u) = exact_solution_alpha2_2d(&g, t).unwrap();
            assert!(u.values().iter().all(|&v| v == 1.0));
            assert!(phi.values().iter().all(|z| (z.norm() - 1.0).abs() < 1e-15));
        }
        let (phi, _) = exact_solution_alpha2_2d(&g, 0.0).unwrap();
        assert_eq!(phi.values()[0], Complex64::new(1.0, 0.0));
        assert!(exact_solution_alpha2_2d(&GridSpec::line(0.0, 1.0, 8).unwrap(), 0.0).is_err());
    }

    #[test]
    fn consistent_plane_wave_rate() {
        assert_eq!(PlaneWave::dispersion_consistent(1.0, 1.0, 2.0).theta, 0.0);
        let w = PlaneWave::dispersion_consistent(1.0, 1.0, 1.5);
        assert!((w.theta - (0.5 * 2f64.powf(0.75) - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn example_43_values() {
        let d = example_43_initial();
        assert_eq!((d.phi0)(&[0.0, 0.0]), Complex64::new(1.0, 1.0));
        assert_eq!((d.u0)(&[0.0, 0.0]), 1.0);
        let ut = (d.ut0)(&[0.5, 0.25]);
        let r2: f64 = 0.25 + 0.0625;
        assert!((ut - 0.75f64.sin() / (2.0 * r2).cosh()).abs() < 1e-15);
    }
}
