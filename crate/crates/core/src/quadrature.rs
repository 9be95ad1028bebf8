//! Composite Gauss–Legendre quadrature with panel doubling.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Nodes per panel.
pub const ORDER: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureOptions {
    /// Stop when two successive panel counts agree to this absolute level.
    pub tol: f64,
    pub max_panels: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            tol: 1e-9,
            max_panels: 1 << 12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub panels: usize,
    /// Difference from the estimate with half as many panels.
    pub change: f64,
}

/// Legendre polynomial `P_n(x)` and its derivative.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Nodes and weights on `[-1, 1]`, by Newton iteration from Chebyshev guesses.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = -(std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre(n, x);
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

fn rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(ORDER))
}

fn composite(f: &impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        let s: f64 = rule().iter().map(|&(x, w)| w * f(mid + 0.5 * h * x)).sum();
        total += 0.5 * h * s;
    }
    total
}

/// Integrate `f` over `[a, b]`, doubling the panel count until successive
/// estimates agree.
pub fn integrate(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    opts: &QuadratureOptions,
) -> Result<QuadratureResult> {
    let mut panels = 1;
    let mut prev = composite(&f, a, b, panels);
    loop {
        if panels * 2 > opts.max_panels {
            return Err(Error::QuadratureNotConverged {
                panels,
                change: f64::NAN,
            });
        }
        panels *= 2;
        let next = composite(&f, a, b, panels);
        let change = (next - prev).abs();
        if change < opts.tol {
            return Ok(QuadratureResult {
                value: next,
                panels,
                change,
            });
        }
        if panels * 2 > opts.max_panels {
            return Err(Error::QuadratureNotConverged { panels, change });
        }
        prev = next;
    }
}
