//! Fully discrete one-step maps for the semi-discrete Hamiltonian system.
//!
//! All five maps share two linear building blocks:
//!
//! * the wave block: given a source `G`, solve
//!   `U¹ - U⁰ = τ (V¹ + V⁰)`, `V¹ - V⁰ = (τ/2)(D^β - I) U^{½} + (τ/2) G`.
//!   Eliminating `U¹` leaves `((1 + τ²/4) I - (τ²/4) D^β) V¹ = rhs`, diagonal
//!   in Fourier space and solved exactly;
//! * the Schrödinger block: with `w = P + iQ`,
//!   `(I + iτD^α/4) w¹ = (I - iτD^α/4) w⁰ + c`, where the pointwise coupling
//!   `c` is lagged and updated by fixed-point sweeps.
//!
//! The schemes differ only in which time levels feed `G` and `c`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::avf::{bilinear_mean, quadratic_mean};
use crate::error::{Error, Result};
use crate::model::{Params, State};
use crate::spectral::{FourierWorkspace, GridSpec, RealField, SpectralMultiplier};

/// Available one-step maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    /// Fully implicit averaged vector field; conserves energy only.
    Favf,
    /// Partitioned AVF, first order.
    Fpavf,
    /// Adjoint of [`SchemeKind::Fpavf`].
    FpavfAdjoint,
    /// Half step of FPAVF followed by a half step of its adjoint.
    FpavfC,
    /// Averaged ("plus") partitioned scheme, fully coupled.
    FpavfP,
}

impl SchemeKind {
    /// The four schemes compared in convergence and efficiency studies.
    pub const MAIN: [SchemeKind; 4] = [
        SchemeKind::Favf,
        SchemeKind::Fpavf,
        SchemeKind::FpavfC,
        SchemeKind::FpavfP,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Favf => "favf",
            SchemeKind::Fpavf => "fpavf",
            SchemeKind::FpavfAdjoint => "fpavf-adj",
            SchemeKind::FpavfC => "fpavf-c",
            SchemeKind::FpavfP => "fpavf-p",
        }
    }

    /// Whether the scheme conserves the discrete mass.
    pub fn conserves_mass(self) -> bool {
        !matches!(self, SchemeKind::Favf)
    }

    /// Temporal order of accuracy.
    pub fn order(self) -> u32 {
        match self {
            SchemeKind::Fpavf | SchemeKind::FpavfAdjoint => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "favf" => Ok(SchemeKind::Favf),
            "fpavf" => Ok(SchemeKind::Fpavf),
            "fpavf-adj" | "fpavf-adjoint" => Ok(SchemeKind::FpavfAdjoint),
            "fpavf-c" => Ok(SchemeKind::FpavfC),
            "fpavf-p" => Ok(SchemeKind::FpavfP),
            other => Err(Error::Parse(format!("unknown scheme `{other}`"))),
        }
    }
}

/// Outcome of the fixed-point iteration inside one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    /// Outer fixed-point sweeps (summed over sub-steps).
    pub iterations: usize,
    /// Final scaled update norm (largest over sub-steps).
    pub residual: f64,
    pub converged: bool,
}

impl StepReport {
    fn merge(self, other: StepReport) -> StepReport {
        StepReport {
            iterations: self.iterations + other.iterations,
            residual: self.residual.max(other.residual),
            converged: self.converged && other.converged,
        }
    }
}

fn to_complex(p: &[f64], q: &[f64]) -> Vec<Complex64> {
    p.iter()
        .zip(q)
        .map(|(&a, &b)| Complex64::new(a, b))
        .collect()
}

fn complex_update(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| {
        m.max((x.re - y.re).abs()).max((x.im - y.im).abs())
    })
}

fn real_update(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Reusable stepping context: multipliers, solver settings and scratch space.
pub struct Stepper {
    grid: GridSpec,
    m_alpha: SpectralMultiplier,
    m_beta: SpectralMultiplier,
    tol: f64,
    max_iter: usize,
    ws: FourierWorkspace,
    hat_a: Vec<Complex64>,
    hat_b: Vec<Complex64>,
    lin_hat: Vec<Complex64>,
    real_tmp: Vec<f64>,
}

impl fmt::Debug for Stepper {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Stepper")
            .field("grid", &self.grid)
            .field("alpha", &self.m_alpha.order())
            .field("beta", &self.m_beta.order())
            .field("tol", &self.tol)
            .field("max_iter", &self.max_iter)
            .finish()
    }
}

impl Stepper {
    pub fn new(
        m_alpha: &SpectralMultiplier,
        m_beta: &SpectralMultiplier,
        tol: f64,
        max_iter: usize,
    ) -> Result<Self> {
        let grid = *m_alpha.grid();
        if *m_beta.grid() != grid {
            return Err(Error::Shape(
                "alpha and beta multipliers use different grids".into(),
            ));
        }
        if !(tol.is_finite() && tol > 0.0) || max_iter == 0 {
            return Err(Error::Config(format!(
                "solver needs tol > 0 and max_iter >= 1, got {tol:e} / {max_iter}"
            )));
        }
        let n = grid.len();
        Ok(Stepper {
            grid,
            m_alpha: m_alpha.clone(),
            m_beta: m_beta.clone(),
            tol,
            max_iter,
            ws: FourierWorkspace::new(&grid),
            hat_a: vec![Complex64::default(); n],
            hat_b: vec![Complex64::default(); n],
            lin_hat: vec![Complex64::default(); n],
            real_tmp: vec![0.0; n],
        })
    }

    /// Builds multipliers for `params` on `grid`.
    pub fn from_params(params: &Params, grid: &GridSpec) -> Result<Self> {
        let (ma, mb) = params.multipliers(grid)?;
        Self::new(&ma, &mb, params.tol, params.max_iter)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn multipliers(&self) -> (&SpectralMultiplier, &SpectralMultiplier) {
        (&self.m_alpha, &self.m_beta)
    }

    /// Advances `state` by `tau` (which may be negative) with `scheme`.
    pub fn step(
        &mut self,
        scheme: SchemeKind,
        state: &State,
        tau: f64,
    ) -> Result<(State, StepReport)> {
        if *state.grid() != self.grid {
            return Err(Error::Shape("state grid differs from stepper grid".into()));
        }
        if !(tau.is_finite() && tau != 0.0) {
            return Err(Error::Config(format!(
                "time step must be finite and nonzero, got {tau}"
            )));
        }
        let (mut next, report) = match scheme {
            SchemeKind::Fpavf => self.fpavf(state, tau)?,
            SchemeKind::FpavfAdjoint => self.fpavf_adjoint(state, tau, None)?,
            SchemeKind::FpavfC => {
                let (mid, r1) = self.fpavf(state, 0.5 * tau)?;
                // the second half starts from the linear extrapolation of the first
                let guess: Vec<Complex64> = mid
                    .p
                    .values()
                    .iter()
                    .zip(mid.q.values())
                    .zip(state.p.values().iter().zip(state.q.values()))
                    .map(|((p1, q1), (p0, q0))| Complex64::new(2.0 * p1 - p0, 2.0 * q1 - q0))
                    .collect();
                let (end, r2) = self.fpavf_adjoint(&mid, 0.5 * tau, Some(guess))?;
                (end, r1.merge(r2))
            }
            SchemeKind::FpavfP => self.fpavf_p(state, tau)?,
            SchemeKind::Favf => self.favf(state, tau)?,
        };
        next.t = state.t + tau;
        Ok((next, report))
    }

    fn scale(state: &State) -> f64 {
        1.0 + state.max_abs()
    }

    fn assemble(&self, u: Vec<f64>, v: Vec<f64>, w: &[Complex64], t: f64) -> State {
        let g = &self.grid;
        let field = |d: Vec<f64>| RealField::new(g, d).expect("buffer sized to grid");
        State {
            u: field(u),
            v: field(v),
            p: field(w.iter().map(|z| z.re).collect()),
            q: field(w.iter().map(|z| z.im).collect()),
            t,
        }
    }

    /// Wave block: returns `(U¹, V¹)` for the source `g`.
    fn wave_solve(&mut self, tau: f64, u0: &[f64], v0: &[f64], g: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let a = 1.0 + 0.25 * tau * tau;
        let b = 0.25 * tau * tau;
        // V¹ = (aI - bD^β)⁻¹ [ s + (D^β - I) r ],  r = (τ/2)U⁰ + (τ²/4)V⁰,  s = V⁰ + (τ/2)G
        for (j, r) in self.real_tmp.iter_mut().enumerate() {
            *r = 0.5 * tau * u0[j] + b * v0[j];
        }
        self.ws.forward_real(&self.real_tmp, &mut self.hat_a);
        for (j, s) in self.real_tmp.iter_mut().enumerate() {
            *s = v0[j] + 0.5 * tau * g[j];
        }
        self.ws.forward_real(&self.real_tmp, &mut self.hat_b);
        for ((za, zb), &l) in self
            .hat_a
            .iter_mut()
            .zip(&self.hat_b)
            .zip(self.m_beta.values())
        {
            *za = (*zb + *za * (-l - 1.0)) / (a + b * l);
        }
        self.ws.inverse(&mut self.hat_a);
        let v1: Vec<f64> = self.hat_a.iter().map(|z| z.re).collect();
        let u1 = u0
            .iter()
            .zip(v0)
            .zip(&v1)
            .map(|((u, v0), v1)| u + tau * (v0 + v1))
            .collect();
        (u1, v1)
    }

    /// Stores `F[(I - iτD^α/4) w⁰]` for the following Schrödinger sweeps.
    fn schrodinger_prepare(&mut self, tau: f64, w0: &[Complex64]) {
        self.lin_hat.copy_from_slice(w0);
        self.ws.forward(&mut self.lin_hat);
        for (z, &l) in self.lin_hat.iter_mut().zip(self.m_alpha.values()) {
            *z *= Complex64::new(1.0, 0.25 * tau * l);
        }
    }

    /// One sweep: `w = (I + iτD^α/4)⁻¹ [(I - iτD^α/4) w⁰ + c]`.
    fn schrodinger_sweep(&mut self, tau: f64, coupling: &[Complex64], out: &mut [Complex64]) {
        out.copy_from_slice(coupling);
        self.ws.forward(out);
        for ((z, lin), &l) in out.iter_mut().zip(&self.lin_hat).zip(self.m_alpha.values()) {
            *z = (*z + *lin) / Complex64::new(1.0, -0.25 * tau * l);
        }
        self.ws.inverse(out);
    }

    /// Cayley step `(I + iτA/2) w¹ = (I - iτA/2) w⁰` with
    /// `A = ½D^α + diag(pot)`, iterating on the diagonal part.
    fn schrodinger_frozen(
        &mut self,
        tau: f64,
        pot: &[f64],
        w0: &[Complex64],
        guess: Option<Vec<Complex64>>,
        scale: f64,
    ) -> Result<(Vec<Complex64>, StepReport)> {
        self.schrodinger_prepare(tau, w0);
        let n = w0.len();
        let mut w1 = guess.unwrap_or_else(|| w0.to_vec());
        let mut next = vec![Complex64::default(); n];
        let mut coupling = vec![Complex64::default(); n];
        let half_i_tau = Complex64::new(0.0, -0.5 * tau);
        for it in 1..=self.max_iter {
            for j in 0..n {
                coupling[j] = half_i_tau * pot[j] * (w0[j] + w1[j]);
            }
            self.schrodinger_sweep(tau, &coupling, &mut next);
            let residual = complex_update(&next, &w1) / scale;
            std::mem::swap(&mut w1, &mut next);
            if residual <= self.tol {
                return Ok((
                    w1,
                    StepReport {
                        iterations: it,
                        residual,
                        converged: true,
                    },
                ));
            }
            if it == self.max_iter {
                return Err(Error::NotConverged {
                    iterations: it,
                    residual,
                });
            }
        }
        unreachable!("max_iter >= 1")
    }

    fn fpavf(&mut self, s: &State, tau: f64) -> Result<(State, StepReport)> {
        let scale = Self::scale(s);
        let (u0, v0, p0, q0) = (s.u.values(), s.v.values(), s.p.values(), s.q.values());
        let g0: Vec<f64> = p0.iter().zip(q0).map(|(p, q)| p * p + q * q).collect();
        let (u1, v1) = self.wave_solve(tau, u0, v0, &g0);
        let w0 = to_complex(p0, q0);
        let (w1, report) = self.schrodinger_frozen(tau, &u1, &w0, None, scale)?;
        Ok((self.assemble(u1, v1, &w1, s.t), report))
    }

    fn fpavf_adjoint(
        &mut self,
        s: &State,
        tau: f64,
        guess: Option<Vec<Complex64>>,
    ) -> Result<(State, StepReport)> {
        let scale = Self::scale(s);
        let (u0, v0, p0, q0) = (s.u.values(), s.v.values(), s.p.values(), s.q.values());
        let w0 = to_complex(p0, q0);
        let (w1, report) = self.schrodinger_frozen(tau, u0, &w0, guess, scale)?;
        let g1: Vec<f64> = w1.iter().map(|z| z.norm_sqr()).collect();
        let (u1, v1) = self.wave_solve(tau, u0, v0, &g1);
        Ok((self.assemble(u1, v1, &w1, s.t), report))
    }

    /// Coupled scheme with `U^{½}` in the Schrödinger block and the averaged
    /// source `(G⁰ + G¹)/2` in the wave block.
    fn fpavf_p(&mut self, s: &State, tau: f64) -> Result<(State, StepReport)> {
        let scale = Self::scale(s);
        let (u0, v0, p0, q0) = (s.u.values(), s.v.values(), s.p.values(), s.q.values());
        let n = u0.len();
        let w0 = to_complex(p0, q0);
        self.schrodinger_prepare(tau, &w0);
        let g0: Vec<f64> = w0.iter().map(|z| z.norm_sqr()).collect();

        let mut u1 = u0.to_vec();
        let mut v1 = v0.to_vec();
        let mut w1 = w0.clone();
        let mut w_next = vec![Complex64::default(); n];
        let mut g = vec![0.0; n];
        let mut coupling = vec![Complex64::default(); n];
        let half_i_tau = Complex64::new(0.0, -0.5 * tau);
        for it in 1..=self.max_iter {
            for j in 0..n {
                g[j] = 0.5 * (g0[j] + w1[j].norm_sqr());
            }
            let (u_new, v_new) = self.wave_solve(tau, u0, v0, &g);
            for j in 0..n {
                let u_half = 0.5 * (u0[j] + u_new[j]);
                coupling[j] = half_i_tau * u_half * (w0[j] + w1[j]);
            }
            self.schrodinger_sweep(tau, &coupling, &mut w_next);
            let residual = real_update(&u_new, &u1)
                .max(real_update(&v_new, &v1))
                .max(complex_update(&w_next, &w1))
                / scale;
            u1 = u_new;
            v1 = v_new;
            std::mem::swap(&mut w1, &mut w_next);
            if residual <= self.tol {
                let report = StepReport {
                    iterations: it,
                    residual,
                    converged: true,
                };
                return Ok((self.assemble(u1, v1, &w1, s.t), report));
            }
            if it == self.max_iter {
                return Err(Error::NotConverged {
                    iterations: it,
                    residual,
                });
            }
        }
        unreachable!("max_iter >= 1")
    }

    /// Fully implicit AVF: quadratic and bilinear ε-averages of all four
    /// unknowns, lagged and swept to convergence.
    fn favf(&mut self, s: &State, tau: f64) -> Result<(State, StepReport)> {
        let scale = Self::scale(s);
        let (u0, v0, p0, q0) = (s.u.values(), s.v.values(), s.p.values(), s.q.values());
        let n = u0.len();
        let w0 = to_complex(p0, q0);
        self.schrodinger_prepare(tau, &w0);

        let mut u1 = u0.to_vec();
        let mut v1 = v0.to_vec();
        let mut w1 = w0.clone();
        let mut w_next = vec![Complex64::default(); n];
        let mut g = vec![0.0; n];
        let mut coupling = vec![Complex64::default(); n];
        for it in 1..=self.max_iter {
            for j in 0..n {
                g[j] = quadratic_mean(p0[j], w1[j].re) + quadratic_mean(q0[j], w1[j].im);
            }
            let (u_new, v_new) = self.wave_solve(tau, u0, v0, &g);
            for j in 0..n {
                // dP = τ(½D^αQ^{½} + b_Q), dQ = -τ(½D^αP^{½} + b_P)  ⇒  c = τ(b_Q - i b_P)
                let b_q = bilinear_mean(u0[j], u_new[j], q0[j], w1[j].im);
                let b_p = bilinear_mean(u0[j], u_new[j], p0[j], w1[j].re);
                coupling[j] = Complex64::new(tau * b_q, -tau * b_p);
            }
            self.schrodinger_sweep(tau, &coupling, &mut w_next);
            let residual = real_update(&u_new, &u1)
                .max(real_update(&v_new, &v1))
                .max(complex_update(&w_next, &w1))
                / scale;
            u1 = u_new;
            v1 = v_new;
            std::mem::swap(&mut w1, &mut w_next);
            if residual <= self.tol {
                let report = StepReport {
                    iterations: it,
                    residual,
                    converged: true,
                };
                return Ok((self.assemble(u1, v1, &w1, s.t), report));
            }
            if it == self.max_iter {
                return Err(Error::NotConverged {
                    iterations: it,
                    residual,
                });
            }
        }
        unreachable!("max_iter >= 1")
    }

    /// Right-hand side `f(Y)` of the semi-discrete system, packed as a
    /// [`State`] of time derivatives.
    pub fn semi_discrete_rhs(&mut self, s: &State) -> Result<State> {
        if *s.grid() != self.grid {
            return Err(Error::Shape("state grid differs from stepper grid".into()));
        }
        let n = self.grid.len();
        let (u, v, p, q) = (s.u.values(), s.v.values(), s.p.values(), s.q.values());
        let mut du = vec![0.0; n];
        self.ws
            .filter_real(u, &mut du, self.m_beta.values(), |l| -l);
        let w = to_complex(p, q);
        let mut dw = vec![Complex64::default(); n];
        self.ws
            .filter_complex(&w, &mut dw, self.m_alpha.values(), |l| {
                Complex64::new(-l, 0.0)
            });

        let mut out = State::zeros(&self.grid);
        out.t = s.t;
        {
            let ut = out.u.values_mut();
            for j in 0..n {
                ut[j] = 2.0 * v[j];
            }
        }
        {
            let vt = out.v.values_mut();
            for j in 0..n {
                vt[j] = 0.5 * (du[j] - u[j] + p[j] * p[j] + q[j] * q[j]);
            }
        }
        {
            let pt = out.p.values_mut();
            for j in 0..n {
                pt[j] = 0.5 * dw[j].im + u[j] * q[j];
            }
        }
        {
            let qt = out.q.values_mut();
            for j in 0..n {
                qt[j] = -0.5 * dw[j].re - u[j] * p[j];
            }
        }
        Ok(out)
    }
}

/// Semi-discrete right-hand side with fresh scratch space.
pub fn semi_discrete_rhs(
    state: &State,
    m_alpha: &SpectralMultiplier,
    m_beta: &SpectralMultiplier,
) -> Result<State> {
    Stepper::new(m_alpha, m_beta, 1.0, 1)?.semi_discrete_rhs(state)
}

/// One step of `scheme` with the settings in `params`.
pub fn step(
    scheme: SchemeKind,
    state: &State,
    params: &Params,
    m_alpha: &SpectralMultiplier,
    m_beta: &SpectralMultiplier,
) -> Result<(State, StepReport)> {
    Stepper::new(m_alpha, m_beta, params.tol, params.max_iter)?.step(scheme, state, params.tau)
}

pub fn step_fpavf(
    state: &State,
    params: &Params,
    m_alpha: &SpectralMultiplier,
    m_beta: &SpectralMultiplier,
) -> Result<(State, StepReport)> {
    step(SchemeKind::Fpavf, state, params, m_alpha, m_beta)
}

pub fn step_fpavf_adjoint(
    state: &State,
    params: &Params,
    m_alpha: &SpectralMultiplier,
    m_beta: &SpectralMultiplier,
) -> Result<(State, StepReport)> {
    step(SchemeKind::FpavfAdjoint, state, params, m_alpha, m_beta)
}

pub fn step_fpavf_c(
    state: &State,
    params: &Params,
    m_alpha: &SpectralMultiplier,
    m_beta: &SpectralMultiplier,
) -> Result<(State, StepReport)> {
    step(SchemeKind::FpavfC, state, params, m_alpha, m_beta)
}

pub fn step_fpavf_p(
    state: &State,
    params: &Params,
    m_alpha: &SpectralMultiplier,
    m_beta: &SpectralMultiplier,
) -> Result<(State, StepReport)> {
    step(SchemeKind::FpavfP, state, params, m_alpha, m_beta)
}

pub fn step_favf(
    state: &State,
    params: &Params,
    m_alpha: &SpectralMultiplier,
    m_beta: &SpectralMultiplier,
) -> Result<(State, StepReport)> {
    step(SchemeKind::Favf, state, params, m_alpha, m_beta)
}

/// Number of steps of size `tau` that fit in `[0, t_final]`.
pub fn step_count(t_final: f64, tau: f64) -> usize {
    let ratio = t_final / tau;
    (ratio * (1.0 + 1e-9)).floor().max(0.0) as usize
}

/// Advances `state` to the largest `t₀ + mτ ≤ T`, calling `observer` with the
/// step index, the new state and its report after every step.
pub fn evolve<F>(
    state: &State,
    params: &Params,
    scheme: SchemeKind,
    m_alpha: &SpectralMultiplier,
    m_beta: &SpectralMultiplier,
    observer: F,
) -> Result<State>
where
    F: FnMut(usize, &State, &StepReport),
{
    params.validate()?;
    let mut stepper = Stepper::new(m_alpha, m_beta, params.tol, params.max_iter)?;
    evolve_with(&mut stepper, state, params, scheme, observer)
}

/// [`evolve`] with a caller-owned [`Stepper`].
pub fn evolve_with<F>(
    stepper: &mut Stepper,
    state: &State,
    params: &Params,
    scheme: SchemeKind,
    mut observer: F,
) -> Result<State>
where
    F: FnMut(usize, &State, &StepReport),
{
    let steps = step_count(params.t_final, params.tau);
    let t0 = state.t;
    let mut current = state.clone();
    for m in 1..=steps {
        let (mut next, report) =
            stepper
                .step(scheme, &current, params.tau)
                .map_err(|e| Error::StepFailed {
                    step: m,
                    source: Box::new(e),
                })?;
        next.t = t0 + m as f64 * params.tau;
        observer(m, &next, &report);
        current = next;
    }
    Ok(current)
}

/// Largest ∞-norm difference over the four fields.
pub fn state_distance(a: &State, b: &State) -> f64 {
    a.fields()
        .iter()
        .zip(b.fields())
        .map(|(x, y)| real_update(x.values(), y.values()))
        .fold(0.0, f64::max)
}
