//! Periodic grids, fractional-Laplacian multipliers and Fourier-diagonal solves.
//!
//! Fields live on a periodic tensor grid of one or two axes. Nodes are
//! `x_j = x_a + j h` for `j = 0..N`, the right endpoint being identified with
//! the left one. In 2D the flat index is `ix * ny + iy`.
//!
//! The discrete operator `D^s` approximating `-(-Δ)^{s/2}` acts diagonally in
//! mode space with symbol `-λ_k`, where `λ_k = |k μ|^s` in 1D and
//! `λ_k = (μ_x² k_x² + μ_y² k_y²)^{s/2}` in 2D. Modes are stored in the usual
//! transform order, `k = 0, 1, .., N/2-1, -N/2, .., -1` per axis. The Nyquist
//! mode `k = -N/2` carries the full weight `|N μ / 2|^s`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Largest `N` accepted by [`dense_matrix`].
pub const DENSE_ORACLE_MAX_N: usize = 256;

/// One periodic axis `[lo, hi)` sampled at `n` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Axis {
    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    /// Mesh size `h = (x_b - x_a) / N`.
    pub fn h(&self) -> f64 {
        self.length() / self.n as f64
    }

    /// Base frequency `μ = 2π / (x_b - x_a)`.
    pub fn mu(&self) -> f64 {
        2.0 * PI / self.length()
    }

    pub fn node(&self, j: usize) -> f64 {
        self.lo + j as f64 * self.h()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.node(j)).collect()
    }
}

/// Signed wavenumber of storage slot `j` on an axis with `n` points.
pub fn wavenumber(j: usize, n: usize) -> i64 {
    if j < n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

/// Periodic tensor grid in one or two dimensions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    dim: usize,
    axes: [Axis; 2],
}

impl GridSpec {
    /// Builds a grid from per-axis `(x_a, x_b, N)` triples.
    pub fn new(axes: &[(f64, f64, usize)]) -> Result<Self> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(Error::Config(format!(
                "grid dimension must be 1 or 2, got {}",
                axes.len()
            )));
        }
        let mut out = [Axis {
            lo: 0.0,
            hi: 1.0,
            n: 4,
        }; 2];
        for (i, &(lo, hi, n)) in axes.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
                return Err(Error::Config(format!(
                    "axis {i}: degenerate box [{lo}, {hi}]"
                )));
            }
            if n < 4 || n % 2 != 0 {
                return Err(Error::Config(format!(
                    "axis {i}: point count must be even and at least 4, got {n}"
                )));
            }
            out[i] = Axis { lo, hi, n };
        }
        Ok(GridSpec {
            dim: axes.len(),
            axes: out,
        })
    }

    pub fn line(lo: f64, hi: f64, n: usize) -> Result<Self> {
        Self::new(&[(lo, hi, n)])
    }

    /// Square 2D grid with the same interval and count on both axes.
    pub fn square(lo: f64, hi: f64, n: usize) -> Result<Self> {
        Self::new(&[(lo, hi, n), (lo, hi, n)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes[..self.dim]
    }

    pub fn axis(&self, i: usize) -> &Axis {
        &self.axes()[i]
    }

    /// Number of nodes (product of the per-axis counts).
    pub fn len(&self) -> usize {
        self.axes().iter().map(|a| a.n).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Quadrature weight of one node: `h` in 1D, `h_x h_y` in 2D.
    pub fn weight(&self) -> f64 {
        self.axes().iter().map(Axis::h).product()
    }

    /// Coordinates of the node with flat index `idx`; unused slots are zero.
    pub fn coords(&self, idx: usize) -> [f64; 2] {
        match self.dim {
            1 => [self.axes[0].node(idx), 0.0],
            _ => {
                let ny = self.axes[1].n;
                [self.axes[0].node(idx / ny), self.axes[1].node(idx % ny)]
            }
        }
    }

    /// Per-axis node indices of flat index `idx`.
    pub fn multi_index(&self, idx: usize) -> [usize; 2] {
        match self.dim {
            1 => [idx, 0],
            _ => {
                let ny = self.axes[1].n;
                [idx / ny, idx % ny]
            }
        }
    }

    pub fn flat_index(&self, ix: usize, iy: usize) -> usize {
        match self.dim {
            1 => ix,
            _ => ix * self.axes[1].n + iy,
        }
    }

    /// Same box with every axis refined (or coarsened) to `n` points.
    pub fn with_points(&self, n: usize) -> Result<Self> {
        let axes: Vec<_> = self.axes().iter().map(|a| (a.lo, a.hi, n)).collect();
        Self::new(&axes)
    }
}

/// `make_grid` as a free function.
pub fn make_grid(axes: &[(f64, f64, usize)]) -> Result<GridSpec> {
    GridSpec::new(axes)
}

fn check_order(s: f64) -> Result<()> {
    if s.is_finite() && s > 1.0 && s <= 2.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "fractional order must satisfy 1 < s <= 2, got {s}"
        )))
    }
}

/// Per-mode symbol values `λ_k ≥ 0` of `(-Δ)^{s/2}` on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMultiplier {
    grid: GridSpec,
    order: f64,
    values: Vec<f64>,
}

impl SpectralMultiplier {
    /// Multiplier of order `1 < s <= 2`.
    pub fn new(grid: &GridSpec, s: f64) -> Result<Self> {
        check_order(s)?;
        Ok(Self::with_exponent(grid, s))
    }

    /// Symbol `|ξ|^e` for any positive exponent. Used for half-order factors.
    pub fn with_exponent(grid: &GridSpec, exponent: f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for idx in 0..grid.len() {
            let mi = grid.multi_index(idx);
            let xi2: f64 = grid
                .axes()
                .iter()
                .zip(mi)
                .map(|(axis, j)| {
                    let k = wavenumber(j, axis.n) as f64 * axis.mu();
                    k * k
                })
                .sum();
            values.push(if xi2 == 0.0 {
                0.0
            } else {
                xi2.powf(0.5 * exponent)
            });
        }
        SpectralMultiplier {
            grid: *grid,
            order: exponent,
            values,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    /// λ values in transform order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// λ at signed wavenumbers (`ky` ignored in 1D).
    pub fn at(&self, kx: i64, ky: i64) -> f64 {
        let slot = |k: i64, n: usize| -> usize {
            let n = n as i64;
            k.rem_euclid(n) as usize
        };
        let ix = slot(kx, self.grid.axes[0].n);
        let iy = if self.grid.dim == 2 {
            slot(ky, self.grid.axes[1].n)
        } else {
            0
        };
        self.values[self.grid.flat_index(ix, iy)]
    }
}

/// `make_multiplier` as a free function.
pub fn make_multiplier(grid: &GridSpec, s: f64) -> Result<SpectralMultiplier> {
    SpectralMultiplier::new(grid, s)
}

/// Nodal real values on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: GridSpec,
    data: Vec<f64>,
}

impl RealField {
    pub fn new(grid: &GridSpec, data: Vec<f64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::Shape(format!(
                "field has {} values, grid has {} nodes",
                data.len(),
                grid.len()
            )));
        }
        Ok(RealField { grid: *grid, data })
    }

    pub fn zeros(grid: &GridSpec) -> Self {
        RealField {
            grid: *grid,
            data: vec![0.0; grid.len()],
        }
    }

    pub fn constant(grid: &GridSpec, value: f64) -> Self {
        RealField {
            grid: *grid,
            data: vec![value; grid.len()],
        }
    }

    /// Samples `f` at every node; `f` receives `dim` coordinates.
    pub fn from_fn(grid: &GridSpec, f: impl Fn(&[f64]) -> f64) -> Self {
        let dim = grid.dim();
        let data = (0..grid.len()).map(|i| f(&grid.coords(i)[..dim])).collect();
        RealField { grid: *grid, data }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_values(self) -> Vec<f64> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Weighted inner product `w Σ f_j g_j`.
    pub fn inner(&self, other: &RealField) -> f64 {
        self.grid.weight() * dot(&self.data, &other.data)
    }

    pub fn norm_sq(&self) -> f64 {
        self.inner(self)
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.data)
    }
}

/// Nodal complex values on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: GridSpec,
    data: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(grid: &GridSpec, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::Shape(format!(
                "field has {} values, grid has {} nodes",
                data.len(),
                grid.len()
            )));
        }
        Ok(ComplexField { grid: *grid, data })
    }

    pub fn from_fn(grid: &GridSpec, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let dim = grid.dim();
        let data = (0..grid.len()).map(|i| f(&grid.coords(i)[..dim])).collect();
        ComplexField { grid: *grid, data }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.data
    }

    pub fn re(&self) -> RealField {
        RealField {
            grid: self.grid,
            data: self.data.iter().map(|z| z.re).collect(),
        }
    }

    pub fn im(&self) -> RealField {
        RealField {
            grid: self.grid,
            data: self.data.iter().map(|z| z.im).collect(),
        }
    }

    pub fn abs(&self) -> RealField {
        RealField {
            grid: self.grid,
            data: self.data.iter().map(|z| z.norm()).collect(),
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Forward/inverse DFT plans and scratch space for one grid.
///
/// The forward transform is unnormalized; the inverse carries `1/N` per axis.
/// Not shareable: each caller owns its workspace.
pub struct FourierWorkspace {
    grid: GridSpec,
    forward: Vec<Arc<dyn Fft<f64>>>,
    inverse: Vec<Arc<dyn Fft<f64>>>,
    scratch: Vec<Complex64>,
    column: Vec<Complex64>,
    buf: Vec<Complex64>,
}

impl std::fmt::Debug for FourierWorkspace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FourierWorkspace")
            .field("grid", &self.grid)
            .finish_non_exhaustive()
    }
}

impl FourierWorkspace {
    pub fn new(grid: &GridSpec) -> Self {
        let mut planner = FftPlanner::<f64>::new();
        let forward: Vec<_> = grid
            .axes()
            .iter()
            .map(|a| planner.plan_fft_forward(a.n))
            .collect();
        let inverse: Vec<_> = grid
            .axes()
            .iter()
            .map(|a| planner.plan_fft_inverse(a.n))
            .collect();
        let scratch_len = forward
            .iter()
            .chain(&inverse)
            .map(|p| p.get_inplace_scratch_len())
            .max()
            .unwrap_or(0);
        let longest = grid.axes().iter().map(|a| a.n).max().unwrap_or(0);
        FourierWorkspace {
            grid: *grid,
            forward,
            inverse,
            scratch: vec![Complex64::default(); scratch_len],
            column: vec![Complex64::default(); longest],
            buf: vec![Complex64::default(); grid.len()],
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    fn run(&mut self, data: &mut [Complex64], inverse: bool) {
        assert_eq!(data.len(), self.grid.len(), "transform length mismatch");
        let plans = if inverse {
            &self.inverse
        } else {
            &self.forward
        };
        match self.grid.dim() {
            1 => plans[0].process_with_scratch(data, &mut self.scratch),
            _ => {
                let nx = self.grid.axes[0].n;
                let ny = self.grid.axes[1].n;
                // rows along y are contiguous
                plans[1].process_with_scratch(data, &mut self.scratch);
                let col = &mut self.column[..nx];
                for iy in 0..ny {
                    for ix in 0..nx {
                        col[ix] = data[ix * ny + iy];
                    }
                    plans[0].process_with_scratch(col, &mut self.scratch);
                    for ix in 0..nx {
                        data[ix * ny + iy] = col[ix];
                    }
                }
            }
        }
        if inverse {
            let scale = 1.0 / self.grid.len() as f64;
            data.iter_mut().for_each(|z| *z *= scale);
        }
    }

    /// In-place unnormalized forward transform.
    pub fn forward(&mut self, data: &mut [Complex64]) {
        self.run(data, false);
    }

    /// In-place normalized inverse transform.
    pub fn inverse(&mut self, data: &mut [Complex64]) {
        self.run(data, true);
    }

    /// Transforms a real field into `out`.
    pub fn forward_real(&mut self, input: &[f64], out: &mut [Complex64]) {
        for (o, &x) in out.iter_mut().zip(input) {
            *o = Complex64::new(x, 0.0);
        }
        self.forward(out);
    }

    /// `out = F⁻¹[g(λ_k) F(input)]` for a real, even gain. The imaginary
    /// residue of the inverse transform is dropped.
    pub fn filter_real(
        &mut self,
        input: &[f64],
        output: &mut [f64],
        lambdas: &[f64],
        gain: impl Fn(f64) -> f64,
    ) {
        let mut buf = std::mem::take(&mut self.buf);
        self.forward_real(input, &mut buf);
        for (z, &l) in buf.iter_mut().zip(lambdas) {
            *z *= gain(l);
        }
        self.inverse(&mut buf);
        for (o, z) in output.iter_mut().zip(&buf) {
            *o = z.re;
        }
        self.buf = buf;
    }

    /// `out = F⁻¹[g(λ_k) F(input)]` for a complex gain.
    pub fn filter_complex(
        &mut self,
        input: &[Complex64],
        output: &mut [Complex64],
        lambdas: &[f64],
        gain: impl Fn(f64) -> Complex64,
    ) {
        output.copy_from_slice(input);
        self.forward(output);
        for (z, &l) in output.iter_mut().zip(lambdas) {
            *z *= gain(l);
        }
        self.inverse(output);
    }
}

fn check_grid(a: &GridSpec, b: &GridSpec, what: &str) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::Shape(format!("{what}: grids differ")))
    }
}

/// Applies `D^s`, the discrete `-(-Δ)^{s/2}`, to a real field.
pub fn apply_neg_frac_laplacian(f: &RealField, m: &SpectralMultiplier) -> Result<RealField> {
    check_grid(f.grid(), m.grid(), "apply_neg_frac_laplacian")?;
    let mut ws = FourierWorkspace::new(f.grid());
    let mut buf = vec![Complex64::default(); f.len()];
    ws.forward_real(f.values(), &mut buf);
    for (z, &l) in buf.iter_mut().zip(m.values()) {
        *z *= -l;
    }
    ws.inverse(&mut buf);
    let scale = 1.0f64.max(buf.iter().fold(0.0f64, |s, z| s.max(z.re.abs())));
    let residue = buf.iter().fold(0.0f64, |s, z| s.max(z.im.abs()));
    debug_assert!(
        residue <= 1e-12 * scale,
        "imaginary residue {residue:e} from a real symbol"
    );
    RealField::new(f.grid(), buf.into_iter().map(|z| z.re).collect())
}

/// Solves `(a I - b D^s) x = rhs` mode by mode, i.e. divides by `a + b λ_k`.
pub fn solve_shifted(a: f64, b: f64, m: &SpectralMultiplier, rhs: &RealField) -> Result<RealField> {
    check_grid(rhs.grid(), m.grid(), "solve_shifted")?;
    check_shift(a, b, m)?;
    let mut ws = FourierWorkspace::new(rhs.grid());
    let mut out = vec![0.0; rhs.len()];
    ws.filter_real(rhs.values(), &mut out, m.values(), |l| 1.0 / (a + b * l));
    RealField::new(rhs.grid(), out)
}

/// Fails when `a + b λ_k` vanishes (relative to its terms) at some mode.
pub fn check_shift(a: f64, b: f64, m: &SpectralMultiplier) -> Result<()> {
    for (mode, &l) in m.values().iter().enumerate() {
        let d = a + b * l;
        if d == 0.0 || d.abs() <= 4.0 * f64::EPSILON * (a.abs() + (b * l).abs()) {
            return Err(Error::Singular {
                mode,
                denominator: d,
            });
        }
    }
    Ok(())
}

/// Row-major dense square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.n + col]
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        self.data
            .chunks_exact(self.n)
            .map(|row| dot(row, v))
            .collect()
    }
}

/// Dense spectral differentiation matrix of `D^s` on a 1D grid, built from
/// the element formula
/// `(D^s)_{jl} = -Σ_{k=-N/2}^{N/2} |kμ|^s e^{-ikμ(x_j - x_l)} / (N c_k)`
/// with `c_{±N/2} = 2`. Independent of the transform route; for testing.
pub fn dense_matrix(grid: &GridSpec, s: f64) -> Result<DenseMatrix> {
    if grid.dim() != 1 {
        return Err(Error::UnsupportedDimension(grid.dim()));
    }
    check_order(s)?;
    let axis = grid.axis(0);
    let n = axis.n;
    if n > DENSE_ORACLE_MAX_N {
        return Err(Error::Config(format!(
            "dense oracle limited to N <= {DENSE_ORACLE_MAX_N}, got {n}"
        )));
    }
    let mu = axis.mu();
    let half = (n / 2) as i64;
    let mut data = vec![0.0; n * n];
    for j in 0..n {
        for l in 0..n {
            let dx = axis.node(j) - axis.node(l);
            let mut acc = Complex64::default();
            for k in -half..=half {
                let c = if k.abs() == half { 2.0 } else { 1.0 };
                let kmu = k as f64 * mu;
                let phase = Complex64::from_polar(1.0, -kmu * dx);
                acc += phase * (kmu.abs().powf(s) / (n as f64 * c));
            }
            data[j * n + l] = -acc.re;
        }
    }
    Ok(DenseMatrix { n, data })
}

#[cfg(test)]
mod tests {
    use super::*;

    macro_rules! assert_close {
        ($a:expr, $b:expr, $tol:expr) => {{
            let (a, b): (f64, f64) = ($a, $b);
            assert!(
                (a - b).abs() <= $tol,
                "{a} vs {b}: |diff| = {:e}",
                (a - b).abs()
            );
        }};
    }
    #[test]
    fn grid_example_41() {
        let g = GridSpec::line(-20.0, 20.0, 128).unwrap();
        assert_close!(g.axis(0).h(), 0.3125, 1e-15);
        assert_close!(g.axis(0).mu(), PI / 20.0, 1e-15);
        assert_eq!(g.len(), 128);
    }

    #[test]
    fn grid_example_42() {
        let g = GridSpec::square(0.0, 2.0 * PI, 16).unwrap();
        assert_close!(g.axis(0).h(), PI / 8.0, 1e-15);
        assert_close!(g.axis(1).mu(), 1.0, 1e-15);
        assert_eq!(g.len(), 256);
        assert_close!(g.weight(), (PI / 8.0).powi(2), 1e-15);
    }

    #[test]
    fn grid_nodes_exclude_endpoint() {
        let g = GridSpec::line(0.0, 1.0, 4).unwrap();
        assert_eq!(g.axis(0).nodes(), vec![0.0, 0.25, 0.5, 0.75]);
        let a = g.axis(0);
        assert_close!(a.h() * a.n as f64, a.length(), 1e-15);
    }

    #[test]
    fn grid_rejects_bad_input() {
        assert!(matches!(GridSpec::line(0.0, 1.0, 7), Err(Error::Config(_))));
        assert!(matches!(GridSpec::line(0.0, 1.0, 2), Err(Error::Config(_))));
        assert!(matches!(GridSpec::line(1.0, 1.0, 8), Err(Error::Config(_))));
        assert!(matches!(GridSpec::line(2.0, 1.0, 8), Err(Error::Config(_))));
        assert!(matches!(GridSpec::new(&[]), Err(Error::Config(_))));
    }

    #[test]
    fn flat_layout_2d() {
        let g = GridSpec::new(&[(0.0, 1.0, 4), (0.0, 2.0, 8)]).unwrap();
        let idx = g.flat_index(3, 5);
        assert_eq!(g.multi_index(idx), [3, 5]);
        assert_eq!(g.coords(idx), [0.75, 1.25]);
    }

    #[test]
    fn multiplier_examples() {
        let g = GridSpec::line(-20.0, 20.0, 128).unwrap();
        let m = SpectralMultiplier::new(&g, 2.0).unwrap();
        assert_eq!(m.at(0, 0), 0.0);
        assert_close!(m.at(1, 0), (PI / 20.0).powi(2), 1e-15);
        assert_close!(m.at(1, 0), 0.0246740, 1e-7);

        let g = GridSpec::line(0.0, 2.0 * PI, 16).unwrap();
        let m = SpectralMultiplier::new(&g, 1.4).unwrap();
        // 3^1.4 = exp(1.4 ln 3)
        let expected = (1.4 * 3.0f64.ln()).exp();
        assert_close!(m.at(3, 0), expected, 1e-13);
        assert_close!(m.at(3, 0), 4.6555, 1e-4);
        // Nyquist carries the full weight.
        assert_close!(m.at(-8, 0), 8.0f64.powf(1.4), 1e-12);
    }

    #[test]
    fn multiplier_is_even_and_nonnegative() {
        let g = GridSpec::new(&[(0.0, 3.0, 12), (-1.0, 1.0, 8)]).unwrap();
        let m = SpectralMultiplier::new(&g, 1.3).unwrap();
        assert!(m.values().iter().all(|&l| l >= 0.0));
        for kx in -5..=5 {
            for ky in -3..=3 {
                assert_close!(m.at(kx, ky), m.at(-kx, -ky), 1e-13);
            }
        }
        let (mx, my) = (2.0 * PI / 3.0, PI);
        let radial = ((2.0 * mx).powi(2) + (3.0 * my).powi(2)).powf(0.65);
        assert_close!(m.at(2, -3), radial, 1e-12);
    }

    #[test]
    fn multiplier_rejects_bad_order() {
        let g = GridSpec::line(0.0, 1.0, 8).unwrap();
        for s in [1.0, 0.5, 2.0001, f64::NAN] {
            assert!(matches!(
                SpectralMultiplier::new(&g, s),
                Err(Error::Domain(_))
            ));
        }
        assert!(SpectralMultiplier::new(&g, 2.0).is_ok());
    }

    #[test]
    fn constant_is_annihilated() {
        let g = GridSpec::line(-20.0, 20.0, 32).unwrap();
        let m = SpectralMultiplier::new(&g, 1.5).unwrap();
        let f = RealField::constant(&g, 3.7);
        let out = apply_neg_frac_laplacian(&f, &m).unwrap();
        assert!(out.max_abs() < 1e-13);
    }

    #[test]
    fn sine_is_an_eigenfunction() {
        let g = GridSpec::line(-20.0, 20.0, 64).unwrap();
        let mu = g.axis(0).mu();
        let f = RealField::from_fn(&g, |x| (mu * x[0]).sin());
        for s in [2.0, 1.4] {
            let m = SpectralMultiplier::new(&g, s).unwrap();
            let out = apply_neg_frac_laplacian(&f, &m).unwrap();
            let c = mu.powf(s);
            for (o, v) in out.values().iter().zip(f.values()) {
                assert_close!(*o, -c * v, 1e-14);
            }
        }
    }

    #[test]
    fn eigenfunction_2d() {
        let g = GridSpec::new(&[(0.0, 2.0 * PI, 16), (0.0, 4.0 * PI, 8)]).unwrap();
        let m = SpectralMultiplier::new(&g, 1.6).unwrap();
        // mode (kx, ky) = (2, 1) with μ = (1, 1/2)
        let f = RealField::from_fn(&g, |x| (2.0 * x[0] + 0.5 * x[1]).cos());
        let out = apply_neg_frac_laplacian(&f, &m).unwrap();
        let c = (4.0f64 + 0.25).powf(0.8);
        for (o, v) in out.values().iter().zip(f.values()) {
            assert_close!(*o, -c * v, 1e-13);
        }
    }

    #[test]
    fn grid_mismatch_is_shape_error() {
        let g1 = GridSpec::line(0.0, 1.0, 8).unwrap();
        let g2 = GridSpec::line(0.0, 1.0, 16).unwrap();
        let m = SpectralMultiplier::new(&g2, 1.5).unwrap();
        let f = RealField::zeros(&g1);
        assert!(matches!(
            apply_neg_frac_laplacian(&f, &m),
            Err(Error::Shape(_))
        ));
        assert!(matches!(
            solve_shifted(1.0, 1.0, &m, &f),
            Err(Error::Shape(_))
        ));
        assert!(RealField::new(&g1, vec![0.0; 3]).is_err());
    }

    #[test]
    fn shifted_solve_examples() {
        let g = GridSpec::line(0.0, 2.0 * PI, 32).unwrap();
        let m = SpectralMultiplier::new(&g, 2.0).unwrap();
        let zero = RealField::zeros(&g);
        assert!(solve_shifted(1.3, 0.7, &m, &zero).unwrap().max_abs() == 0.0);

        let rhs = RealField::from_fn(&g, |x| (3.0 * x[0]).cos() + x[0].sin());
        let same = solve_shifted(1.0, 0.0, &m, &rhs).unwrap();
        for (a, b) in same.values().iter().zip(rhs.values()) {
            assert_close!(*a, *b, 1e-14);
        }

        let tau: f64 = 0.1;
        let rhs = RealField::from_fn(&g, |x| x[0].sin());
        let x = solve_shifted(1.0, tau * tau / 4.0, &m, &rhs).unwrap();
        for (a, b) in x.values().iter().zip(rhs.values()) {
            assert_close!(*a, b / 1.0025, 1e-14);
        }
    }

    #[test]
    fn shifted_solve_detects_singular_mode() {
        let g = GridSpec::line(0.0, 2.0 * PI, 8).unwrap();
        let m = SpectralMultiplier::new(&g, 2.0).unwrap();
        let rhs = RealField::constant(&g, 1.0);
        // a + b λ_1 = 1 - 1 = 0
        let err = solve_shifted(1.0, -1.0, &m, &rhs).unwrap_err();
        assert!(matches!(err, Error::Singular { mode: 1, .. }));
        assert!(matches!(
            solve_shifted(0.0, 1.0, &m, &rhs),
            Err(Error::Singular { mode: 0, .. })
        ));
    }

    #[test]
    fn dense_matrix_rows_sum_to_zero_and_symmetric() {
        let g = GridSpec::line(-20.0, 20.0, 16).unwrap();
        let d = dense_matrix(&g, 1.7).unwrap();
        for j in 0..16 {
            let row: f64 = (0..16).map(|l| d.get(j, l)).sum();
            assert!(row.abs() < 1e-12, "row {j} sums to {row}");
            for l in 0..16 {
                assert_close!(d.get(j, l), d.get(l, j), 1e-14);
            }
        }
    }

    #[test]
    fn dense_matrix_rejects_2d() {
        let g = GridSpec::square(0.0, 1.0, 8).unwrap();
        assert!(matches!(
            dense_matrix(&g, 1.5),
            Err(Error::UnsupportedDimension(2))
        ));
    }

    #[test]
    fn roundtrip_transform() {
        let g = GridSpec::new(&[(0.0, 1.0, 12), (0.0, 1.0, 6)]).unwrap();
        let mut ws = FourierWorkspace::new(&g);
        let orig: Vec<Complex64> = (0..g.len())
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64).cos()))
            .collect();
        let mut buf = orig.clone();
        ws.forward(&mut buf);
        ws.inverse(&mut buf);
        for (a, b) in buf.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-14);
        }
    }
}
