#![allow(dead_code)]

use fkgs::{GridSpec, RealField, State};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent uniform nodal values in `[-amp, amp]`.
pub fn noise(grid: &GridSpec, rng: &mut ChaCha8Rng, amp: f64) -> RealField {
    let data = (0..grid.len())
        .map(|_| rng.random_range(-amp..=amp))
        .collect();
    RealField::new(grid, data).unwrap()
}

/// A few random low Fourier modes, scaled so the ∞-norm is at most `amp`.
pub fn smooth(grid: &GridSpec, rng: &mut ChaCha8Rng, amp: f64) -> RealField {
    let mut terms = Vec::new();
    for _ in 0..4 {
        let k: Vec<f64> = grid
            .axes()
            .iter()
            .map(|a| rng.random_range(0..=3) as f64 * a.mu())
            .collect();
        let lo: Vec<f64> = grid.axes().iter().map(|a| a.lo).collect();
        terms.push((
            k,
            lo,
            rng.random_range(-1.0..=1.0),
            rng.random_range(0.0..6.3),
        ));
    }
    RealField::from_fn(grid, |x| {
        let s: f64 = terms
            .iter()
            .map(|(k, lo, c, ph)| {
                let arg: f64 = k.iter().zip(lo).zip(x).map(|((k, l), x)| k * (x - l)).sum();
                c * (arg + ph).cos()
            })
            .sum();
        0.25 * amp * s
    })
}

pub fn smooth_state(grid: &GridSpec, rng: &mut ChaCha8Rng, amp: f64) -> State {
    State::from_fields(
        smooth(grid, rng, amp),
        smooth(grid, rng, amp),
        smooth(grid, rng, amp),
        smooth(grid, rng, amp),
        0.0,
    )
    .unwrap()
}

pub fn noisy_state(grid: &GridSpec, rng: &mut ChaCha8Rng, amp: f64) -> State {
    State::from_fields(
        noise(grid, rng, amp),
        noise(grid, rng, amp),
        noise(grid, rng, amp),
        noise(grid, rng, amp),
        0.0,
    )
    .unwrap()
}

/// Gauss-Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = 0.5 * (1.0 - x);
        weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}
