//! Relative modular operator `Δ_{τ,ρ}(X) = τ X ρ^{-1}`, the resolvent
//! `X_t = (t + Δ)^{-1} I`, the integral form of the relative entropy, the
//! partial-trace equality criterion and the Petz recovery map.
//!
//! Superoperators are never formed as matrices. With `τ = U diag(μ) U†` and
//! `ρ = V diag(λ) V†`, `Δ` acts on `U X̃ V†` entrywise by `μ_i / λ_j`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eig::{CMatrix, MatFn};
use crate::error::{Error, Result};
use crate::info::{cmi, relative_entropy, InfoReport};
use crate::operator::{DensityOperator, Operator};
use crate::quadrature::{integrate, QuadratureOptions, QuadratureResult};
use crate::tol;

/// `⟨X, Y⟩_ρ = Tr(X† Y ρ)`.
pub fn weighted_inner(x: &Operator, y: &Operator, rho: &DensityOperator) -> Result<Complex64> {
    x.require_same_support(y)?;
    x.require_same_support(rho.op())?;
    Ok((x.matrix().adjoint() * y.matrix() * rho.matrix()).trace())
}

/// Two strictly positive states on a common support.
#[derive(Debug, Clone)]
pub struct ModularPair {
    rho: DensityOperator,
    tau: DensityOperator,
    /// `U† V`.
    w: CMatrix,
}

impl ModularPair {
    pub fn new(rho: DensityOperator, tau: DensityOperator) -> Result<Self> {
        rho.op().require_same_support(tau.op())?;
        let w = tau.spectrum().eigenvectors.adjoint() * &rho.spectrum().eigenvectors;
        Ok(ModularPair { rho, tau, w })
    }

    pub fn rho(&self) -> &DensityOperator {
        &self.rho
    }

    pub fn tau(&self) -> &DensityOperator {
        &self.tau
    }

    fn lambda(&self) -> &[f64] {
        &self.rho.spectrum().eigenvalues
    }

    fn mu(&self) -> &[f64] {
        &self.tau.spectrum().eigenvalues
    }

    /// Smallest and largest eigenvalue of `Δ`, i.e. of `μ_i / λ_j`.
    pub fn delta_range(&self) -> (f64, f64) {
        let (l, m) = (self.lambda(), self.mu());
        (m[0] / l[l.len() - 1], m[m.len() - 1] / l[0])
    }

    /// The pair of marginals on `retained`.
    pub fn marginal<S: AsRef<str>>(&self, retained: &[S]) -> Result<ModularPair> {
        ModularPair::new(self.rho.marginal(retained)?, self.tau.marginal(retained)?)
    }
}

/// `Δ_{τ,ρ}(X) = τ X ρ^{-1}`.
pub fn modular_apply(pair: &ModularPair, x: &Operator) -> Result<Operator> {
    x.require_same_support(pair.rho.op())?;
    let inv = pair.rho.func(MatFn::Inv);
    x.with_matrix(pair.tau.matrix() * x.matrix() * inv.matrix())
}

/// `Δ^k(I) = τ^k ρ^{-k}`.
pub fn modular_power_of_identity(pair: &ModularPair, k: i32) -> Operator {
    let tk = pair.tau.spectrum().map(|x| x.powi(k));
    let rk = pair.rho.spectrum().map(|x| x.powi(-k));
    pair.rho.op().with_matrix(tk * rk).expect("same support")
}

/// The unique solution of `t X ρ + τ X = ρ`, i.e. `(t + Δ)^{-1} I`.
pub fn resolvent_solve(pair: &ModularPair, t: f64) -> Result<Operator> {
    if t.is_nan() || t <= 0.0 {
        return Err(Error::BadParameter(format!(
            "resolvent parameter t = {t} must be positive"
        )));
    }
    let (l, m) = (pair.lambda(), pair.mu());
    let n = l.len();
    let xt = CMatrix::from_fn(n, n, |i, j| pair.w[(i, j)] * (l[j] / (t * l[j] + m[i])));
    let u = &pair.tau.spectrum().eigenvectors;
    let v = &pair.rho.spectrum().eigenvectors;
    pair.rho.op().with_matrix(u * xt * v.adjoint())
}

/// `‖t X ρ + τ X − ρ‖_F`.
pub fn resolvent_residual(pair: &ModularPair, t: f64, x: &Operator) -> f64 {
    let (r, tau) = (pair.rho.matrix(), pair.tau.matrix());
    (x.matrix() * r * Complex64::from(t) + tau * x.matrix() - r).norm()
}

/// `f_t(X) = Tr(X†ρ) + Tr(Xρ) − t Tr(X†Xρ) − Tr(X†τX)`.
pub fn f_t(pair: &ModularPair, t: f64, x: &Operator) -> f64 {
    let (r, tau, m) = (pair.rho.matrix(), pair.tau.matrix(), x.matrix());
    let xa = m.adjoint();
    ((&xa * r).trace() + (m * r).trace() - (&xa * m * r).trace() * t - (&xa * tau * m).trace()).re
}

/// `⟨I, (t + Δ)^{-1} I⟩_ρ = Σ |W_ij|² λ_j² / (t λ_j + μ_i)`, the maximum of `f_t`.
pub fn resolvent_value(pair: &ModularPair, t: f64) -> f64 {
    let (l, m) = (pair.lambda(), pair.mu());
    let mut s = 0.0;
    for (i, &mi) in m.iter().enumerate() {
        for (j, &lj) in l.iter().enumerate() {
            s += pair.w[(i, j)].norm_sqr() * lj * lj / (t * lj + mi);
        }
    }
    s
}

/// `∫_0^∞ (⟨I,(t+Δ)^{-1}I⟩_ρ − 1/(1+t)) dt` with `t = s/(1−s)`.
///
/// After the substitution the integrand is
/// `Σ |W_ij|² λ_j (λ_j − μ_i) / (s λ_j + (1−s) μ_i)`, bounded on `[0, 1]`.
pub fn divergence_via_integral(
    pair: &ModularPair,
    opts: &QuadratureOptions,
) -> Result<QuadratureResult> {
    let (l, m) = (pair.lambda(), pair.mu());
    let terms: Vec<(f64, f64, f64)> = (0..m.len())
        .flat_map(|i| (0..l.len()).map(move |j| (i, j)))
        .map(|(i, j)| (pair.w[(i, j)].norm_sqr() * l[j], l[j], m[i]))
        .filter(|&(c, _, _)| c != 0.0)
        .collect();
    let h = |s: f64| {
        terms
            .iter()
            .map(|&(c, lj, mi)| c * (lj - mi) / (s * lj + (1.0 - s) * mi))
            .sum::<f64>()
    };
    integrate(h, 0.0, 1.0, opts)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EqualityReport {
    pub holds: bool,
    /// Largest `‖X_t − P X_t‖_F / ‖X_t‖_F` over the grid, `P` the projection
    /// onto operators acting trivially off `retained`.
    pub max_off_subspace: f64,
    pub t_samples: Vec<f64>,
    pub off_subspace: Vec<f64>,
    pub tolerance: f64,
}

/// Default number of log-spaced resolvent parameters.
pub const EQUALITY_SAMPLES: usize = 25;

/// Sample `X_t` on a log grid over `[1e-3 λ_min(Δ), 1e3 λ_max(Δ)]` and
/// measure how far each lies from `{Y ⊗ I}`.
pub fn equality_criterion<S: AsRef<str>>(
    pair: &ModularPair,
    retained: &[S],
    samples: usize,
) -> Result<EqualityReport> {
    let keep: Vec<String> = retained.iter().map(|s| s.as_ref().to_string()).collect();
    for k in &keep {
        if !pair.rho.op().has_site(k) {
            return Err(Error::SupportMismatch(format!(
                "{k:?} is not in the support"
            )));
        }
    }
    let (lo, hi) = pair.delta_range();
    let (a, b) = ((1e-3 * lo).ln(), (1e3 * hi).ln());
    let n = samples.max(2);
    let t_samples: Vec<f64> = (0..n)
        .map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp())
        .collect();
    let mut off_subspace = Vec::with_capacity(n);
    for &t in &t_samples {
        let x = resolvent_solve(pair, t)?;
        let off = x.sub(&x.project_onto(&keep)?)?.frobenius();
        off_subspace.push(off / x.frobenius());
    }
    let max_off_subspace = off_subspace.iter().copied().fold(0.0, f64::max);
    Ok(EqualityReport {
        holds: max_off_subspace <= tol::OFF_SUBSPACE,
        max_off_subspace,
        t_samples,
        off_subspace,
        tolerance: tol::OFF_SUBSPACE,
    })
}

/// `R_τ(W) = τ^{1/2} (τ_A^{-1/2} W τ_A^{-1/2} ⊗ I) τ^{1/2}` with `A = retained`.
pub fn petz_recovery<S: AsRef<str>>(
    tau: &DensityOperator,
    retained: &[S],
    w: &Operator,
) -> Result<Operator> {
    let tau_a = tau.marginal(&retained.iter().map(|s| s.as_ref()).collect::<Vec<_>>())?;
    let (mut got, mut want) = (w.labels(), tau_a.labels());
    got.sort();
    want.sort();
    if got != want {
        return Err(Error::SupportMismatch(format!(
            "{got:?} is not the retained set {want:?}"
        )));
    }
    let w = w.embed_into(tau_a.support())?;
    let s = tau_a.inv_sqrt();
    let inner = s.mul(&w)?.mul(&s)?.embed_into(tau.support())?;
    let r = tau.sqrt();
    r.mul(&inner)?.mul(&r)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PetzReport {
    /// `D(ρ‖τ) − D(ρ_A‖τ_A)`.
    pub divergence_gap: f64,
    /// `‖ρ − R_τ(ρ_A)‖_F`.
    pub recovery_residual: f64,
    pub equal_divergences: bool,
    pub recovered: bool,
    /// Whether the two verdicts agree.
    pub consistent: bool,
}

pub fn petz_equality_check<S: AsRef<str>>(
    rho: &DensityOperator,
    tau: &DensityOperator,
    retained: &[S],
) -> Result<PetzReport> {
    rho.op().require_same_support(tau.op())?;
    let keep: Vec<&str> = retained.iter().map(|s| s.as_ref()).collect();
    let (ra, ta) = (rho.marginal(&keep)?, tau.marginal(&keep)?);
    let divergence_gap = relative_entropy(rho, tau)? - relative_entropy(&ra, &ta)?;
    let recovery_residual = petz_recovery(tau, &keep, ra.op())?
        .sub(rho.op())?
        .frobenius();
    let equal_divergences = divergence_gap.abs() <= tol::DIVERGENCE_GAP;
    let recovered = recovery_residual <= tol::RECOVERY;
    Ok(PetzReport {
        divergence_gap,
        recovery_residual,
        equal_divergences,
        recovered,
        consistent: equal_divergences == recovered,
    })
}

/// `‖τ^{-1/2} ρ^{1/2} − (τ_A^{-1/2} ρ_A^{1/2}) ⊗ I‖_F`.
pub fn amplitude_residual<S: AsRef<str>>(pair: &ModularPair, retained: &[S]) -> Result<f64> {
    let m = pair.marginal(retained)?;
    let full = pair.tau.inv_sqrt().mul(&pair.rho.sqrt())?;
    let local = m
        .tau
        .inv_sqrt()
        .mul(&m.rho.sqrt())?
        .embed_into(pair.rho.support())?;
    Ok(full.sub(&local)?.frobenius())
}

/// `max_{k ≤ kmax} ‖Δ^k I − (Δ_A^k I_A) ⊗ I‖_F / max(1, ‖Δ^k I‖_F)`.
pub fn power_intertwining_residual<S: AsRef<str>>(
    pair: &ModularPair,
    retained: &[S],
    kmax: i32,
) -> Result<f64> {
    let m = pair.marginal(retained)?;
    let mut worst = 0.0f64;
    for k in 0..=kmax {
        let full = modular_power_of_identity(pair, k);
        let local = modular_power_of_identity(&m, k).embed_into(pair.rho.support())?;
        worst = worst.max(full.sub(&local)?.frobenius() / full.frobenius().max(1.0));
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntersectionReport {
    /// `I(A:B|C∪D)`.
    pub premise_b: InfoReport,
    /// `I(A:D|B∪C)`.
    pub premise_d: InfoReport,
    /// `I(A:B∪D|C)`.
    pub conclusion: InfoReport,
    pub premises_hold: bool,
    pub conclusion_holds: bool,
    pub tolerance: f64,
}

/// Evaluate the premises and conclusion of the intersection property. No
/// quantitative bound is asserted when the premises hold only approximately.
pub fn intersection_check<S: AsRef<str>>(
    rho: &DensityOperator,
    a: &[S],
    b: &[S],
    c: &[S],
    d: &[S],
    tol: f64,
) -> Result<IntersectionReport> {
    let own = |x: &[S]| {
        x.iter()
            .map(|s| s.as_ref().to_string())
            .collect::<Vec<String>>()
    };
    let (a, b, c, d) = (own(a), own(b), own(c), own(d));
    let cd = [c.clone(), d.clone()].concat();
    let bc = [b.clone(), c.clone()].concat();
    let bd = [b.clone(), d.clone()].concat();
    let premise_b = cmi(rho, &a, &b, &cd)?;
    let premise_d = cmi(rho, &a, &d, &bc)?;
    let conclusion = cmi(rho, &a, &bd, &c)?;
    Ok(IntersectionReport {
        premises_hold: premise_b.value <= tol && premise_d.value <= tol,
        conclusion_holds: conclusion.value <= tol,
        premise_b,
        premise_d,
        conclusion,
        tolerance: tol,
    })
}
