//! Reference computations used only by the tests. None of these go through
//! the crate's implementation paths.

#![allow(dead_code)]

use std::f64::consts::PI;

/// J₀(z) = (1/π) ∫₀^π cos(z sin τ) dτ by composite Simpson.
pub fn bessel_j0(z: f64) -> f64 {
    let panels = 2000;
    let h = PI / panels as f64;
    let f = |t: f64| (z * t.sin()).cos();
    let mut sum = f(0.0) + f(PI);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(i as f64 * h);
    }
    sum * h / 3.0 / PI
}

/// Rice magnitude CDF tabulated on `[0, r_max]`.
///
/// The density is written as the angular average of a 2-D Gaussian,
/// f(x) = (x/σ²)(1/π)∫₀^π exp(−(x² + ν² − 2xν cos t)/(2σ²)) dt,
/// which stays finite for any K, then integrated with the trapezoid rule.
pub struct RiceCdf {
    grid: Vec<f64>,
    cdf: Vec<f64>,
}

impl RiceCdf {
    pub fn new(k: f64, omega: f64) -> Self {
        let nu = (omega * k / (k + 1.0)).sqrt();
        let s2 = omega / (2.0 * (k + 1.0));
        let r_max = nu + 12.0 * s2.sqrt();
        let points = 4000;
        let angles = 400;
        let dx = r_max / points as f64;
        let dt = PI / angles as f64;

        let pdf = |x: f64| {
            let mut acc = 0.0;
            for j in 0..=angles {
                let t = j as f64 * dt;
                let w = if j == 0 || j == angles { 0.5 } else { 1.0 };
                acc += w * (-(x * x + nu * nu - 2.0 * x * nu * t.cos()) / (2.0 * s2)).exp();
            }
            x / s2 * acc * dt / PI
        };

        let grid: Vec<f64> = (0..=points).map(|i| i as f64 * dx).collect();
        let dens: Vec<f64> = grid.iter().map(|&x| pdf(x)).collect();
        let mut cdf = vec![0.0; grid.len()];
        for i in 1..grid.len() {
            cdf[i] = cdf[i - 1] + 0.5 * (dens[i] + dens[i - 1]) * dx;
        }
        Self { grid, cdf }
    }

    pub fn at(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let dx = self.grid[1];
        let pos = r / dx;
        let i = pos.floor() as usize;
        if i + 1 >= self.grid.len() {
            return 1.0;
        }
        let frac = pos - i as f64;
        self.cdf[i] * (1.0 - frac) + self.cdf[i + 1] * frac
    }
}

/// Two-sided one-sample Kolmogorov–Smirnov statistic.
pub fn ks_statistic(mut samples: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Critical value of the KS statistic at significance 0.01 (large n).
pub fn ks_critical_001(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}

#[test]
fn j0_reference_points() {
    assert!((bessel_j0(0.0) - 1.0).abs() < 1e-12);
    assert!((bessel_j0(PI) - (-0.304_242_177_644_093_9)).abs() < 1e-10);
    assert!(bessel_j0(2.404_825_557_695_773).abs() < 1e-10);
}

#[test]
fn rice_cdf_reference_points() {
    // K = 0 is Rayleigh: F(r) = 1 − exp(−r²/Ω).
    let c = RiceCdf::new(0.0, 1.0);
    for &r in &[0.3f64, 1.0, 1.7] {
        let exact = 1.0 - (-(r * r)).exp();
        assert!((c.at(r) - exact).abs() < 1e-5);
    }
    let c = RiceCdf::new(3.0, 1.0);
    assert!((c.at(10.0) - 1.0).abs() < 1e-6);
}
