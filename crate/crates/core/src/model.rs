//! Discrete phase-space state, initial data, and the mass/energy functionals.
//!
//! The complex field is split as `φ = q + i p` and the wave velocity as
//! `v = u_t / 2`, giving the real first-order system
//!
//! ```text
//! U_t = 2V
//! V_t = ½ (D^β U - U + P² + Q²)
//! P_t =  ½ D^α Q + U·Q
//! Q_t = -½ D^α P - U·P
//! ```

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{
    max_abs, ComplexField, FourierWorkspace, GridSpec, RealField, SpectralMultiplier,
};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 200;

/// Orders, time stepping and implicit-solver settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    /// Order of the Schrödinger-part fractional Laplacian.
    pub alpha: f64,
    /// Order of the wave-part fractional Laplacian.
    pub beta: f64,
    pub tau: f64,
    pub t_final: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Params {
    pub fn new(
        alpha: f64,
        beta: f64,
        tau: f64,
        t_final: f64,
        tol: f64,
        max_iter: usize,
    ) -> Result<Self> {
        let p = Params {
            alpha,
            beta,
            tau,
            t_final,
            tol,
            max_iter,
        };
        p.validate()?;
        Ok(p)
    }

    /// Default solver tolerance and iteration cap.
    pub fn with_defaults(alpha: f64, beta: f64, tau: f64, t_final: f64) -> Result<Self> {
        Self::new(alpha, beta, tau, t_final, DEFAULT_TOL, DEFAULT_MAX_ITER)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, s) in [("alpha", self.alpha), ("beta", self.beta)] {
            if !(s.is_finite() && s > 1.0 && s <= 2.0) {
                return Err(Error::Domain(format!("{name} must lie in (1, 2], got {s}")));
            }
        }
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(Error::Config(format!(
                "tau must be positive, got {}",
                self.tau
            )));
        }
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            return Err(Error::Config(format!(
                "t_final must be positive, got {}",
                self.t_final
            )));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::Config(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::Config("max_iter must be at least 1".into()));
        }
        Ok(())
    }

    /// Both multipliers on `grid`.
    pub fn multipliers(&self, grid: &GridSpec) -> Result<(SpectralMultiplier, SpectralMultiplier)> {
        Ok((
            SpectralMultiplier::new(grid, self.alpha)?,
            SpectralMultiplier::new(grid, self.beta)?,
        ))
    }
}

/// `(U, V, P, Q)` at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub u: RealField,
    pub v: RealField,
    pub p: RealField,
    pub q: RealField,
    pub t: f64,
}

impl State {
    pub fn zeros(grid: &GridSpec) -> Self {
        State {
            u: RealField::zeros(grid),
            v: RealField::zeros(grid),
            p: RealField::zeros(grid),
            q: RealField::zeros(grid),
            t: 0.0,
        }
    }

    /// Bundles four fields; they must share one grid and be finite.
    pub fn from_fields(
        u: RealField,
        v: RealField,
        p: RealField,
        q: RealField,
        t: f64,
    ) -> Result<Self> {
        let grid = *u.grid();
        if [&v, &p, &q].iter().any(|f| *f.grid() != grid) {
            return Err(Error::Shape("state fields live on different grids".into()));
        }
        let s = State { u, v, p, q, t };
        if !s.is_finite() {
            return Err(Error::Input("state contains non-finite values".into()));
        }
        Ok(s)
    }

    pub fn grid(&self) -> &GridSpec {
        self.u.grid()
    }

    pub fn fields(&self) -> [&RealField; 4] {
        [&self.u, &self.v, &self.p, &self.q]
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite()
            && self
                .fields()
                .iter()
                .all(|f| f.values().iter().all(|x| x.is_finite()))
    }

    /// Largest absolute nodal value over all four fields.
    pub fn max_abs(&self) -> f64 {
        self.fields()
            .iter()
            .map(|f| max_abs(f.values()))
            .fold(0.0, f64::max)
    }

    /// `φ = Q + i P`.
    pub fn phi(&self) -> ComplexField {
        let data = self
            .q
            .values()
            .iter()
            .zip(self.p.values())
            .map(|(&q, &p)| Complex64::new(q, p))
            .collect();
        ComplexField::new(self.grid(), data).expect("state fields share a grid")
    }
}

type SpaceFn<T> = Box<dyn Fn(&[f64]) -> T + Send + Sync>;

/// Continuous initial data `φ₀`, `u₀` and `ũ₀ = u_t(·, 0)`.
///
/// The functions should be periodic on the box to within truncation; this is
/// not checked.
pub struct InitialData {
    pub phi0: SpaceFn<Complex64>,
    pub u0: SpaceFn<f64>,
    pub ut0: SpaceFn<f64>,
}

impl std::fmt::Debug for InitialData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("InitialData { .. }")
    }
}

impl InitialData {
    pub fn new(
        phi0: impl Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
        u0: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        ut0: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        InitialData {
            phi0: Box::new(phi0),
            u0: Box::new(u0),
            ut0: Box::new(ut0),
        }
    }
}

/// Samples initial data at the nodes: `Q = Re φ₀`, `P = Im φ₀`, `U = u₀`,
/// `V = ũ₀ / 2`.
pub fn initialize(grid: &GridSpec, data: &InitialData) -> Result<State> {
    let phi = ComplexField::from_fn(grid, &data.phi0);
    let u = RealField::from_fn(grid, &data.u0);
    let v = RealField::from_fn(grid, |x| 0.5 * (data.ut0)(x));
    let state = State {
        u,
        v,
        p: phi.im(),
        q: phi.re(),
        t: 0.0,
    };
    if !state.is_finite() {
        return Err(Error::Input(
            "initial data produced non-finite samples".into(),
        ));
    }
    Ok(state)
}

/// `M = ‖P‖² + ‖Q‖²` with the grid-weighted norm.
pub fn mass(state: &State) -> f64 {
    state.p.norm_sq() + state.q.norm_sq()
}

/// Discrete Hamiltonian
/// `H = (w/4)(-PᵀD^αP - UᵀD^βU - QᵀD^αQ + UᵀU + 4VᵀV - 2Uᵀ(P²+Q²))`,
/// `w` being the node weight of the grid.
pub fn energy(
    state: &State,
    m_alpha: &SpectralMultiplier,
    m_beta: &SpectralMultiplier,
) -> Result<f64> {
    let mut ws = FourierWorkspace::new(state.grid());
    energy_with(&mut ws, state, m_alpha, m_beta)
}

/// [`energy`] reusing a caller-owned transform workspace.
pub fn energy_with(
    ws: &mut FourierWorkspace,
    state: &State,
    m_alpha: &SpectralMultiplier,
    m_beta: &SpectralMultiplier,
) -> Result<f64> {
    let grid = state.grid();
    if m_alpha.grid() != grid || m_beta.grid() != grid || ws.grid() != grid {
        return Err(Error::Shape(
            "energy: multiplier or workspace grid differs from state".into(),
        ));
    }
    let n = grid.len();
    let (u, v, p, q) = (
        state.u.values(),
        state.v.values(),
        state.p.values(),
        state.q.values(),
    );

    // D^α acts on P and Q at once through w = P + iQ (real symbol).
    let w: Vec<Complex64> = p
        .iter()
        .zip(q)
        .map(|(&a, &b)| Complex64::new(a, b))
        .collect();
    let mut dw = vec![Complex64::default(); n];
    ws.filter_complex(&w, &mut dw, m_alpha.values(), |l| Complex64::new(-l, 0.0));
    let mut du = vec![0.0; n];
    ws.filter_real(u, &mut du, m_beta.values(), |l| -l);

    let mut sum = 0.0;
    for j in 0..n {
        let g = p[j] * p[j] + q[j] * q[j];
        sum += -p[j] * dw[j].re - q[j] * dw[j].im - u[j] * du[j] + u[j] * u[j] + 4.0 * v[j] * v[j]
            - 2.0 * u[j] * g;
    }
    Ok(0.25 * grid.weight() * sum)
}

/// `|φ| = √(P² + Q²)` at every node.
pub fn phi_magnitude(state: &State) -> RealField {
    let data = state
        .p
        .values()
        .iter()
        .zip(state.q.values())
        .map(|(p, q)| p.hypot(*q))
        .collect();
    RealField::new(state.grid(), data).expect("state fields share a grid")
}
