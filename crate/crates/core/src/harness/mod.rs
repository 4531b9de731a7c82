//! Numerical experiments: example presets, invariant series, refinement
//! tables, timing, CSV output and the command line.

pub mod cli;
pub mod examples;
pub mod output;

use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrators::{evolve_with, SchemeKind, StepReport, Stepper};
use crate::model::{energy_with, initialize, mass, Params, State, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::spectral::{FourierWorkspace, GridSpec, RealField};

pub use cli::run_cli;
pub use examples::{
    exact_solution_alpha2_1d, exact_solution_alpha2_2d, example_41_initial,
    example_41_initial_with, example_43_initial, PlaneWave, Soliton, U0Variant,
};

/// Built-in problem setups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExampleKind {
    /// 1D traveling soliton.
    Ex41,
    /// 2D plane wave on `[0, 2π]²`.
    Ex42,
    /// 2D Gaussian pulse.
    Ex43,
    /// Fields read from a `fields.csv` snapshot.
    Custom,
}

impl ExampleKind {
    pub fn name(self) -> &'static str {
        match self {
            ExampleKind::Ex41 => "ex41",
            ExampleKind::Ex42 => "ex42",
            ExampleKind::Ex43 => "ex43",
            ExampleKind::Custom => "custom",
        }
    }
}

impl std::fmt::Display for ExampleKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExampleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ex41" | "4.1" => Ok(ExampleKind::Ex41),
            "ex42" | "4.2" => Ok(ExampleKind::Ex42),
            "ex43" | "4.3" => Ok(ExampleKind::Ex43),
            "custom" => Ok(ExampleKind::Custom),
            other => Err(Error::Parse(format!("unknown example `{other}`"))),
        }
    }
}

/// Everything needed to reproduce one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub example: ExampleKind,
    #[serde(with = "scheme_name")]
    pub scheme: SchemeKind,
    pub alpha: f64,
    pub beta: f64,
    pub tau: f64,
    pub t_final: f64,
    /// Points per axis.
    pub n: Vec<usize>,
    /// `[lo, hi]` per axis.
    #[serde(rename = "box")]
    pub bounds: Vec<[f64; 2]>,
    pub tol: f64,
    pub max_iter: usize,
    /// Diagnostics stride in steps.
    pub sample_every: usize,
    pub output_dir: PathBuf,
    /// Soliton velocity (ex41).
    pub r: f64,
    /// Soliton phase (ex41).
    pub x0: f64,
    pub u0_variant: U0Variant,
    /// Snapshot to start from (custom).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init: Option<PathBuf>,
}

mod scheme_name {
    use super::SchemeKind;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(s: &SchemeKind, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(s.name())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<SchemeKind, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl RunConfig {
    /// Setup used for `example`: box, resolution, orders and time step.
    pub fn preset(example: ExampleKind) -> Self {
        let two_pi = 2.0 * std::f64::consts::PI;
        let base = RunConfig {
            example,
            scheme: SchemeKind::FpavfC,
            alpha: 2.0,
            beta: 2.0,
            tau: 0.001,
            t_final: 50.0,
            n: vec![128],
            bounds: vec![[-20.0, 20.0]],
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            sample_every: 1,
            output_dir: PathBuf::from("out"),
            r: -0.8,
            x0: 0.0,
            u0_variant: U0Variant::Exact,
            init: None,
        };
        match example {
            ExampleKind::Ex41 | ExampleKind::Custom => base,
            ExampleKind::Ex42 => RunConfig {
                n: vec![16, 16],
                bounds: vec![[0.0, two_pi]; 2],
                t_final: 1.0,
                ..base
            },
            ExampleKind::Ex43 => RunConfig {
                n: vec![256, 256],
                bounds: vec![[-10.0, 10.0]; 2],
                t_final: 1.0,
                ..base
            },
        }
    }

    pub fn grid(&self) -> Result<GridSpec> {
        let dim = self.bounds.len();
        let n: Vec<usize> = match self.n.len() {
            1 => vec![self.n[0]; dim],
            k if k == dim => self.n.clone(),
            k => {
                return Err(Error::Config(format!(
                    "{k} point counts given for a {dim}-dimensional box"
                )))
            }
        };
        let axes: Vec<(f64, f64, usize)> = self
            .bounds
            .iter()
            .zip(&n)
            .map(|(b, &n)| (b[0], b[1], n))
            .collect();
        GridSpec::new(&axes)
    }

    pub fn params(&self) -> Result<Params> {
        Params::new(
            self.alpha,
            self.beta,
            self.tau,
            self.t_final,
            self.tol,
            self.max_iter,
        )
    }

    /// Samples the example's initial data on the configured grid.
    pub fn initial_state(&self) -> Result<State> {
        let grid = self.grid()?;
        let needs = |d: usize| {
            if grid.dim() == d {
                Ok(())
            } else {
                Err(Error::Config(format!(
                    "{} needs a {d}D box, got {}D",
                    self.example,
                    grid.dim()
                )))
            }
        };
        match self.example {
            ExampleKind::Ex41 => {
                needs(1)?;
                initialize(
                    &grid,
                    &example_41_initial_with(self.r, self.x0, self.u0_variant)?,
                )
            }
            ExampleKind::Ex42 => {
                needs(2)?;
                initialize(&grid, &PlaneWave::EXAMPLE_42.initial_data())
            }
            ExampleKind::Ex43 => {
                needs(2)?;
                initialize(&grid, &example_43_initial())
            }
            ExampleKind::Custom => {
                let path = self
                    .init
                    .as_ref()
                    .ok_or_else(|| Error::Config("custom example needs an init file".into()))?;
                output::read_fields(path, &grid)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params()?;
        self.grid()?;
        if self.sample_every == 0 {
            return Err(Error::Config("sample_every must be at least 1".into()));
        }
        Ok(())
    }

    fn with_tau(&self, tau: f64) -> Self {
        RunConfig {
            tau,
            ..self.clone()
        }
    }

    fn with_points(&self, n: usize) -> Self {
        RunConfig {
            n: vec![n],
            ..self.clone()
        }
    }
}

/// Final state of a run plus solver statistics.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub state: State,
    pub steps: usize,
    pub iterations: usize,
    pub seconds: f64,
}

/// Runs `config` to its final time, calling `observer` after every step.
pub fn simulate<F>(config: &RunConfig, mut observer: F) -> Result<RunOutcome>
where
    F: FnMut(usize, &State, &StepReport),
{
    config.validate()?;
    let params = config.params()?;
    let init = config.initial_state()?;
    let (ma, mb) = params.multipliers(init.grid())?;
    let mut stepper = Stepper::new(&ma, &mb, params.tol, params.max_iter)?;
    let mut steps = 0;
    let mut iterations = 0;
    let start = Instant::now();
    let state = evolve_with(&mut stepper, &init, &params, config.scheme, |m, s, rep| {
        steps = m;
        iterations += rep.iterations;
        observer(m, s, rep);
    })?;
    Ok(RunOutcome {
        state,
        steps,
        iterations,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// One sample of the invariant series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRow {
    pub step: usize,
    pub t: f64,
    pub mass: f64,
    pub energy: f64,
    /// `|M^m - M⁰| / |M⁰|` (absolute drift if `M⁰ = 0`).
    pub rm: f64,
    /// `|H^m - H⁰| / |H⁰|` (absolute drift if `H⁰ = 0`).
    pub rh: f64,
    /// Fixed-point sweeps of this step.
    pub iters: usize,
}

fn relative_drift(x: f64, x0: f64) -> f64 {
    if x0 == 0.0 {
        (x - x0).abs()
    } else {
        ((x - x0) / x0).abs()
    }
}

/// Mass and energy every `sample_every` steps, starting with row 0.
pub fn invariant_series(config: &RunConfig) -> Result<Vec<DiagnosticsRow>> {
    Ok(run_with_diagnostics(config)?.0)
}

/// [`invariant_series`] that also returns the run outcome.
pub fn run_with_diagnostics(config: &RunConfig) -> Result<(Vec<DiagnosticsRow>, RunOutcome)> {
    config.validate()?;
    let params = config.params()?;
    let grid = config.grid()?;
    let (ma, mb) = params.multipliers(&grid)?;
    let mut ws = FourierWorkspace::new(&grid);
    let init = config.initial_state()?;
    let m0 = mass(&init);
    let h0 = energy_with(&mut ws, &init, &ma, &mb)?;
    let mut rows = vec![DiagnosticsRow {
        step: 0,
        t: init.t,
        mass: m0,
        energy: h0,
        rm: 0.0,
        rh: 0.0,
        iters: 0,
    }];
    let mut failure = None;
    let stride = config.sample_every;
    let outcome = simulate(config, |m, s, rep| {
        if m % stride != 0 || failure.is_some() {
            return;
        }
        match energy_with(&mut ws, s, &ma, &mb) {
            Ok(h) => {
                let mm = mass(s);
                rows.push(DiagnosticsRow {
                    step: m,
                    t: s.t,
                    mass: mm,
                    energy: h,
                    rm: relative_drift(mm, m0),
                    rh: relative_drift(h, h0),
                    iters: rep.iterations,
                });
            }
            Err(e) => failure = Some(e),
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok((rows, outcome))
}

/// Largest `rm` and `rh` over a series.
pub fn max_drifts(rows: &[DiagnosticsRow]) -> (f64, f64) {
    rows.iter().fold((0.0, 0.0), |(m, h), r| {
        (f64::max(m, r.rm), f64::max(h, r.rh))
    })
}

/// Which parameter a table refines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Refinement {
    Time,
    Space,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRow {
    /// `τ` or `N` of the coarser run of the compared pair.
    pub param: f64,
    pub error: f64,
    /// `log₂(E_prev / E)`; absent on the first row.
    pub order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorTable {
    pub refinement: Refinement,
    pub rows: Vec<ErrorRow>,
}

impl ErrorTable {
    fn from_errors(refinement: Refinement, params: &[f64], errors: &[f64]) -> Self {
        let rows = params
            .iter()
            .zip(errors)
            .enumerate()
            .map(|(i, (&param, &error))| ErrorRow {
                param,
                error,
                order: (i > 0).then(|| (errors[i - 1] / error).log2()),
            })
            .collect();
        ErrorTable { refinement, rows }
    }

    pub fn orders(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.order).collect()
    }

    pub fn errors(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.error).collect()
    }
}

/// `‖ΔU‖∞ + ‖ΔP‖∞ + ‖ΔQ‖∞`.
pub fn refinement_error(a: &State, b: &State) -> Result<f64> {
    if a.grid() != b.grid() {
        return Err(Error::Shape(
            "compared states live on different grids".into(),
        ));
    }
    let d = |x: &RealField, y: &RealField| {
        x.values()
            .iter()
            .zip(y.values())
            .fold(0.0f64, |m, (p, q)| m.max((p - q).abs()))
    };
    Ok(d(&a.u, &b.u) + d(&a.p, &b.p) + d(&a.q, &b.q))
}

/// Samples a state on the nodes of a coarser nested grid.
pub fn restrict(state: &State, coarse: &GridSpec) -> Result<State> {
    let fine = state.grid();
    if fine.dim() != coarse.dim() {
        return Err(Error::Shape(
            "restriction between grids of different dimension".into(),
        ));
    }
    let mut ratio = [1usize; 2];
    for (d, r) in ratio.iter_mut().enumerate().take(fine.dim()) {
        let (f, c) = (fine.axis(d), coarse.axis(d));
        if f.lo != c.lo || f.hi != c.hi || c.n == 0 || f.n % c.n != 0 {
            return Err(Error::Shape(format!(
                "grid with {} points is not nested in one with {}",
                c.n, f.n
            )));
        }
        *r = f.n / c.n;
    }
    let pick = |field: &RealField| {
        let data = (0..coarse.len())
            .map(|i| {
                let [ix, iy] = coarse.multi_index(i);
                field.values()[fine.flat_index(ix * ratio[0], iy * ratio[1])]
            })
            .collect();
        RealField::new(coarse, data)
    };
    State::from_fields(
        pick(&state.u)?,
        pick(&state.v)?,
        pick(&state.p)?,
        pick(&state.q)?,
        state.t,
    )
}

fn final_states<T: Sync>(items: &[T], make: impl Fn(&T) -> RunConfig + Sync) -> Result<Vec<State>> {
    items
        .par_iter()
        .map(|item| {
            let cfg = make(item);
            simulate(&cfg, |_, _, _| {}).map(|o| o.state)
        })
        .collect()
}

/// `E(τ)` between runs with `τ` and `τ/2` for each listed `τ`.
///
/// The list must descend by factors of two; every run (including the extra
/// one at half the last `τ`) is independent and runs in parallel.
pub fn temporal_error_table(config: &RunConfig, taus: &[f64]) -> Result<ErrorTable> {
    if taus.len() < 2 {
        return Err(Error::Config("need at least two time steps".into()));
    }
    for w in taus.windows(2) {
        if ((w[0] / w[1]) - 2.0).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "time steps must halve successively, got {} then {}",
                w[0], w[1]
            )));
        }
    }
    let mut all = taus.to_vec();
    all.push(taus[taus.len() - 1] / 2.0);
    let states = final_states(&all, |&tau| config.with_tau(tau))?;
    let errors = states
        .windows(2)
        .map(|w| refinement_error(&w[0], &w[1]))
        .collect::<Result<Vec<_>>>()?;
    Ok(ErrorTable::from_errors(Refinement::Time, taus, &errors))
}

/// `E(N)` between runs with `N` and `2N` points per axis, compared at the
/// coarse nodes.
pub fn spatial_error_table(config: &RunConfig, ns: &[usize]) -> Result<ErrorTable> {
    if ns.len() < 2 {
        return Err(Error::Config("need at least two resolutions".into()));
    }
    for w in ns.windows(2) {
        if w[1] != 2 * w[0] {
            return Err(Error::Config(format!(
                "resolutions must double successively, got {} then {}",
                w[0], w[1]
            )));
        }
    }
    let mut all = ns.to_vec();
    all.push(2 * ns[ns.len() - 1]);
    let states = final_states(&all, |&n| config.with_points(n))?;
    let errors = states
        .windows(2)
        .map(|w| refinement_error(&w[0], &restrict(&w[1], w[0].grid())?))
        .collect::<Result<Vec<_>>>()?;
    let params: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    Ok(ErrorTable::from_errors(Refinement::Space, &params, &errors))
}

/// Timing of one scheme on a fixed configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub scheme: SchemeKind,
    pub steps: usize,
    pub iterations: usize,
    pub seconds: f64,
}

/// Runs each scheme once, sequentially, and records wall time.
pub fn bench(config: &RunConfig, schemes: &[SchemeKind]) -> Result<Vec<BenchRow>> {
    schemes
        .iter()
        .map(|&scheme| {
            let cfg = RunConfig {
                scheme,
                ..config.clone()
            };
            let out = simulate(&cfg, |_, _, _| {})?;
            Ok(BenchRow {
                scheme,
                steps: out.steps,
                iterations: out.iterations,
                seconds: out.seconds,
            })
        })
        .collect()
}
