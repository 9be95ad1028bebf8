//! Maximum-entropy completion of a marginal family.
//!
//! The solver minimizes the convex dual
//!
//! ```text
//! F(M) = log Tr exp(Σ_A M_A ⊗ I) − Σ_A ⟨M_A, ρ_A⟩
//! ```
//!
//! whose gradient in `M_A` is `σ(M)_A − ρ_A`, with `σ(M)` the normalized
//! exponential. A stationary point is a state with the prescribed marginals
//! whose logarithm is a sum of local terms.

use serde::{Deserialize, Serialize};

use crate::eig::{self, CMatrix};
use crate::error::{Error, Result};
use crate::info::{entropy, relative_entropy};
use crate::layout::Site;
use crate::markov::MarginalFamily;
use crate::operator::{DensityOperator, Operator};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaxentOptions {
    pub max_iter: usize,
    /// Stop once every `‖σ_A − ρ_A‖_F` is at most this.
    pub tol: f64,
    /// Armijo sufficient-decrease constant.
    pub armijo: f64,
    /// Backtracking factor.
    pub shrink: f64,
}

impl Default for MaxentOptions {
    fn default() -> Self {
        MaxentOptions {
            max_iter: 10_000,
            tol: tol::MAXENT,
            armijo: 1e-4,
            shrink: 0.5,
        }
    }
}

/// `σ = exp(λ I + Σ_A M_A ⊗ I)` with `λ = −log Tr exp(Σ_A M_A ⊗ I)`.
#[derive(Debug, Clone, Serialize)]
pub struct DualParameters {
    pub family: Vec<Vec<String>>,
    #[serde(rename = "M")]
    pub m: Vec<Operator>,
    pub lambda: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MaxentResult {
    pub rho_hat: Option<DensityOperator>,
    pub dual: Option<DualParameters>,
    pub dual_value: f64,
    pub marginal_residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

struct Eval {
    value: f64,
    lambda: f64,
    sigma: CMatrix,
    grads: Vec<Operator>,
    residual: f64,
}

struct Problem<'a> {
    target: Vec<Site>,
    subsets: Vec<Vec<String>>,
    rhos: Vec<&'a DensityOperator>,
}

impl Problem<'_> {
    fn evaluate(&self, m: &[Operator]) -> Result<Eval> {
        let d: usize = self.target.iter().map(|s| s.dim).product();
        let mut h = CMatrix::zeros(d, d);
        for x in m {
            h += x.embed_into(&self.target)?.matrix();
        }
        let h = (&h + h.adjoint()).scale(0.5);
        let spec = eig::jacobi_eigh(&h)?;
        let top = spec.max();
        let lse = top
            + spec
                .eigenvalues
                .iter()
                .map(|&x| (x - top).exp())
                .sum::<f64>()
                .ln();
        let sigma = spec.map(|x| (x - lse).exp());
        let sigma_op = Operator::new(self.target.clone(), sigma.clone())?;
        let mut value = lse;
        let mut grads = Vec::with_capacity(m.len());
        let mut residual = 0.0f64;
        for ((x, sub), rho) in m.iter().zip(&self.subsets).zip(&self.rhos) {
            value -= x.matrix().dotc(rho.matrix()).re;
            let g = sigma_op.reduce_to(sub)?.sub(rho.op())?;
            residual = residual.max(g.frobenius());
            grads.push(g);
        }
        Ok(Eval {
            value,
            lambda: -lse,
            sigma,
            grads,
            residual,
        })
    }
}

fn step(m: &[Operator], g: &[Operator], alpha: f64) -> Result<Vec<Operator>> {
    m.iter()
        .zip(g)
        .map(|(x, y)| x.sub(&y.scale(alpha)))
        .collect()
}

fn sq_norm(g: &[Operator]) -> f64 {
    g.iter().map(|x| x.matrix().norm_squared()).sum()
}

fn inner(a: &[Operator], b: &[Operator]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.matrix().dotc(y.matrix()).re)
        .sum()
}

/// Dual gradient descent with Armijo backtracking, starting from
/// `M_A = log ρ_A`. Trial steps use the Barzilai–Borwein length.
///
/// On non-convergence the error carries the last iterate.
pub fn solve_maxent(family: &MarginalFamily, opts: &MaxentOptions) -> Result<MaxentResult> {
    let consistency = family.check_consistency();
    if !consistency.consistent {
        return Err(Error::Inconsistent {
            residual: consistency.max_residual,
        });
    }
    let entries: Vec<(&Vec<String>, &DensityOperator)> = family.entries().collect();
    let problem = Problem {
        target: family.union_sites(),
        subsets: entries.iter().map(|(k, _)| (*k).clone()).collect(),
        rhos: entries.iter().map(|(_, r)| *r).collect(),
    };
    let mut m: Vec<Operator> = problem.rhos.iter().map(|r| r.log()).collect();
    let mut cur = problem.evaluate(&m)?;
    let mut alpha = 1.0;
    let mut iterations = 0;
    let slack = |v: f64| 8.0 * f64::EPSILON * (1.0 + v.abs());
    while cur.residual > opts.tol && iterations < opts.max_iter {
        iterations += 1;
        let gg = sq_norm(&cur.grads);
        let mut a = alpha;
        let (next_m, next) = loop {
            let cand = step(&m, &cur.grads, a)?;
            let e = problem.evaluate(&cand)?;
            if e.value <= cur.value - opts.armijo * a * gg + slack(cur.value) {
                break (cand, e);
            }
            a *= opts.shrink;
            if a < 1e-30 {
                return Err(not_converged(&problem, m, cur, iterations));
            }
        };
        // Barzilai–Borwein length for the next trial step.
        let s: Vec<Operator> = cur.grads.iter().map(|g| g.scale(-a)).collect();
        let y: Vec<Operator> = next
            .grads
            .iter()
            .zip(&cur.grads)
            .map(|(n, c)| n.sub(c))
            .collect::<Result<_>>()?;
        let sy = inner(&s, &y);
        alpha = if sy > 0.0 {
            (sq_norm(&s) / sy).clamp(1e-6, 1e6)
        } else {
            a / opts.shrink
        };
        m = next_m;
        cur = next;
    }
    if cur.residual > opts.tol {
        return Err(not_converged(&problem, m, cur, iterations));
    }
    finish(&problem, m, cur, iterations, true)
}

fn finish(
    p: &Problem,
    m: Vec<Operator>,
    e: Eval,
    iterations: usize,
    converged: bool,
) -> Result<MaxentResult> {
    let sigma = Operator::new(p.target.clone(), e.sigma)?;
    let rho_hat = DensityOperator::new(sigma)?;
    Ok(MaxentResult {
        rho_hat: Some(rho_hat),
        dual: Some(DualParameters {
            family: p.subsets.clone(),
            m,
            lambda: e.lambda,
        }),
        dual_value: e.value,
        marginal_residual: e.residual,
        iterations,
        converged,
    })
}

fn not_converged(p: &Problem, m: Vec<Operator>, e: Eval, iterations: usize) -> Error {
    let (value, residual) = (e.value, e.residual);
    let result = finish(p, m, e, iterations, false).unwrap_or(MaxentResult {
        rho_hat: None,
        dual: None,
        dual_value: value,
        marginal_residual: residual,
        iterations,
        converged: false,
    });
    Error::NotConverged(Box::new(result))
}

/// Norm of the part of `log ρ̂` outside `span{I} + Σ_A {X_A ⊗ I}`.
///
/// The Hilbert–Schmidt projections `P_A(X) = Tr_{A^c}(X)/d_{A^c} ⊗ I`
/// commute, so the complement of their sum is `∏_A (1 − P_A)`.
pub fn verify_loglinear<S: AsRef<str>>(
    rho_hat: &DensityOperator,
    family: &[Vec<S>],
) -> Result<f64> {
    let mut r = rho_hat.log();
    let mut subsets: Vec<Vec<String>> = family
        .iter()
        .map(|a| a.iter().map(|x| x.as_ref().to_string()).collect())
        .collect();
    subsets.push(Vec::new());
    for a in &subsets {
        r = r.sub(&r.project_onto(a)?)?;
    }
    Ok(r.frobenius())
}

/// `|S(ρ̂) − S(ω) − D(ω‖ρ̂)|` after checking that `ω` and `ρ̂` agree on every
/// subset of `family` within `1e-9`.
pub fn entropy_gap<S: AsRef<str>>(
    omega: &DensityOperator,
    rho_hat: &DensityOperator,
    family: &[Vec<S>],
) -> Result<f64> {
    let omega_op = omega.op().embed_into(rho_hat.support())?;
    let mut residual = 0.0f64;
    for a in family {
        let d = omega_op
            .reduce_to(a)?
            .sub(&rho_hat.op().reduce_to(a)?)?
            .frobenius();
        residual = residual.max(d);
    }
    if residual > 1e-9 {
        return Err(Error::MarginalMismatch { residual });
    }
    let omega = DensityOperator::new(omega_op)?;
    Ok((entropy(rho_hat) - entropy(&omega) - relative_entropy(&omega, rho_hat)?).abs())
}
