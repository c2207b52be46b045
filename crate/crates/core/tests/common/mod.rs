//! Shared oracles for the integration suites: Gaussian-mixture quadrature,
//! an independent dense ODE integrator for the ensemble-average dynamics,
//! and small statistics helpers. Everything here is closed-form or textbook
//! numerics, independent of the library's update implementations.

/// Expectation of `f(r)` under a mixture of Gaussians with the given centers
/// and weights, all sharing standard deviation `sigma`. Trapezoid rule per
/// branch in standard-normal coordinates over ±12σ; the integrand is analytic
/// so the rule converges far below 1e-12.
pub fn mixture_expectation(
    centers: &[f64],
    weights: &[f64],
    sigma: f64,
    mut f: impl FnMut(f64) -> f64,
) -> f64 {
    let n = 4001;
    let lo = -12.0;
    let hi = 12.0;
    let h = (hi - lo) / (n - 1) as f64;
    let norm = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
    let mut total = 0.0;
    for (&center, &weight) in centers.iter().zip(weights) {
        if weight == 0.0 {
            continue;
        }
        let mut acc = 0.0;
        for i in 0..n {
            let u = lo + i as f64 * h;
            let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            acc += w * norm * (-0.5 * u * u).exp() * f(center + sigma * u);
        }
        total += weight * acc * h;
    }
    total
}

/// Dense RK4 integration of the ensemble-average Bloch dynamics
/// dx/dt = −Γ·x + Ω·z, dy/dt = −Γ·y, dz/dt = −Ω·x, reported on the uniform
/// grid t_k = k·dt with `substeps` internal RK4 steps per grid interval.
pub fn integrate_bloch_ode(
    initial: [f64; 3],
    gamma_ensemble: f64,
    omega: f64,
    dt: f64,
    n_steps: usize,
    substeps: usize,
) -> Vec<[f64; 3]> {
    let deriv = |q: [f64; 3]| {
        [
            -gamma_ensemble * q[0] + omega * q[2],
            -gamma_ensemble * q[1],
            -omega * q[0],
        ]
    };
    let mut out = Vec::with_capacity(n_steps + 1);
    let mut q = initial;
    out.push(q);
    let h = dt / substeps as f64;
    for _ in 0..n_steps {
        for _ in 0..substeps {
            let k1 = deriv(q);
            let k2 = deriv(std::array::from_fn(|i| q[i] + 0.5 * h * k1[i]));
            let k3 = deriv(std::array::from_fn(|i| q[i] + 0.5 * h * k2[i]));
            let k4 = deriv(std::array::from_fn(|i| q[i] + h * k3[i]));
            q = std::array::from_fn(|i| {
                q[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
            });
        }
        out.push(q);
    }
    out
}

/// Complementary error function, Abramowitz–Stegun 7.1.26 (|error| < 1.5e-7).
pub fn erfc(x: f64) -> f64 {
    let sign = x.signum();
    let x = x.abs();
    let t = 1.0 / (1.0 + 0.3275911 * x);
    let poly = t
        * (0.254829592
            + t * (-0.284496736 + t * (1.421413741 + t * (-1.453152027 + t * 1.061405429))));
    let val = poly * (-x * x).exp();
    if sign >= 0.0 {
        val
    } else {
        2.0 - val
    }
}

/// One-sided upper tail of the standard normal.
pub fn normal_upper_tail(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

/// 99% two-sided z value.
pub const Z_99: f64 = 2.5758293035489004;

/// χ² upper 1% critical value at 2 degrees of freedom.
pub const CHI2_99_DOF2: f64 = 9.21034037197618;
