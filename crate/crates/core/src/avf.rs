//! Closed forms of the averaged-gradient integrals.
//!
//! With the straight line `a(ε) = ε a₁ + (1-ε) a₀`, every nonlinearity of the
//! schemes is a polynomial of degree at most two in `ε`, so its integral over
//! `[0, 1]` has an exact closed form.

/// `∫₀¹ (ε b + (1-ε) a) dε = (a + b) / 2`.
#[inline]
pub fn linear_midpoint(a: f64, b: f64) -> f64 {
    0.5 * (a + b)
}

/// `∫₀¹ (ε b + (1-ε) a)² dε = (a² + ab + b²) / 3`.
#[inline]
pub fn quadratic_mean(a: f64, b: f64) -> f64 {
    (a * a + a * b + b * b) / 3.0
}

/// `∫₀¹ (ε u₁ + (1-ε) u₀)(ε q₁ + (1-ε) q₀) dε`.
#[inline]
pub fn bilinear_mean(u0: f64, u1: f64, q0: f64, q1: f64) -> f64 {
    (2.0 * u1 * q1 + u1 * q0 + u0 * q1 + 2.0 * u0 * q0) / 6.0
}

/// Nodewise [`quadratic_mean`].
pub fn quadratic_mean_into(a: &[f64], b: &[f64], out: &mut [f64]) {
    for ((o, &x), &y) in out.iter_mut().zip(a).zip(b) {
        *o = quadratic_mean(x, y);
    }
}

/// Nodewise [`bilinear_mean`].
pub fn bilinear_mean_into(u0: &[f64], u1: &[f64], q0: &[f64], q1: &[f64], out: &mut [f64]) {
    for (i, o) in out.iter_mut().enumerate() {
        *o = bilinear_mean(u0[i], u1[i], q0[i], q1[i]);
    }
}
