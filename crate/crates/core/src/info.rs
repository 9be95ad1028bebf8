//! Entropy, divergence, conditional mutual information and the global
//! information functional of a chordal graph. All logarithms are natural.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::eig::{CMatrix, Spectrum};
use crate::error::{Error, Result};
use crate::graph::ChordalStructure;
use crate::markov::{t_chordal, MarginalFamily};
use crate::operator::{DensityOperator, Operator};
use crate::tol;

/// A scalar information quantity together with the terms it was built from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfoReport {
    pub value: f64,
    pub components: BTreeMap<String, f64>,
    pub tolerance: f64,
}

fn xlogx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}

/// Von Neumann entropy `-Tr ρ log ρ`.
pub fn entropy(rho: &DensityOperator) -> f64 {
    -rho.spectrum()
        .eigenvalues
        .iter()
        .map(|&l| xlogx(l))
        .sum::<f64>()
}

/// `-Tr X log X` for a strictly positive operator of any trace.
pub fn entropy_of(x: &Operator) -> Result<f64> {
    let s = x.spectrum()?;
    s.require_positive()?;
    Ok(-s.eigenvalues.iter().map(|&l| xlogx(l)).sum::<f64>())
}

fn divergence_spectral(xm: &CMatrix, xs: &Spectrum, ys: &Spectrum) -> f64 {
    let x_log_x: f64 = xs.eigenvalues.iter().map(|&l| xlogx(l)).sum();
    let log_y = ys.map(f64::ln);
    let x_log_y = (xm * log_y).trace().re;
    let tr_x: f64 = xs.eigenvalues.iter().sum();
    let tr_y: f64 = ys.eigenvalues.iter().sum();
    x_log_x - x_log_y - tr_x + tr_y
}

/// Divergence `Tr X log X − Tr X log Y − Tr X + Tr Y` of strictly positive
/// operators; reduces to the Umegaki relative entropy on states.
pub fn divergence(x: &Operator, y: &Operator) -> Result<f64> {
    x.require_same_support(y)?;
    let xs = x.spectrum()?;
    xs.require_positive()?;
    let ys = y.spectrum()?;
    ys.require_positive()?;
    Ok(divergence_spectral(x.matrix(), &xs, &ys))
}

/// Relative entropy of two certified states, reusing their spectra.
pub fn relative_entropy(rho: &DensityOperator, tau: &DensityOperator) -> Result<f64> {
    rho.op().require_same_support(tau.op())?;
    Ok(divergence_spectral(
        rho.matrix(),
        rho.spectrum(),
        tau.spectrum(),
    ))
}

fn check_disjoint(sets: &[&[String]]) -> Result<()> {
    for (i, a) in sets.iter().enumerate() {
        for b in &sets[i + 1..] {
            if let Some(x) = a.iter().find(|x| b.contains(x)) {
                return Err(Error::SupportMismatch(format!(
                    "site {x:?} appears in two parts"
                )));
            }
        }
    }
    Ok(())
}

pub(crate) fn owned<S: AsRef<str>>(s: &[S]) -> Vec<String> {
    s.iter().map(|x| x.as_ref().to_string()).collect()
}

fn joined(parts: &[&[String]]) -> Vec<String> {
    parts.iter().flat_map(|p| p.iter().cloned()).collect()
}

fn set_name(s: &[String]) -> String {
    format!("S({})", s.join(","))
}

/// `I(A:B|C) = S(AC) + S(BC) − S(C) − S(ABC)`; sites of `ρ` outside
/// `A ∪ B ∪ C` are traced out first.
pub fn cmi<S: AsRef<str>>(rho: &DensityOperator, a: &[S], b: &[S], c: &[S]) -> Result<InfoReport> {
    let (a, b, c) = (owned(a), owned(b), owned(c));
    check_disjoint(&[&a, &b, &c])?;
    let abc = rho.marginal(&joined(&[&a, &b, &c]))?;
    let s_ac = entropy(&abc.marginal(&joined(&[&a, &c]))?);
    let s_bc = entropy(&abc.marginal(&joined(&[&b, &c]))?);
    let s_c = entropy(&abc.marginal(&c)?);
    let s_abc = entropy(&abc);
    let mut components = BTreeMap::new();
    components.insert("S(AC)".to_string(), s_ac);
    components.insert("S(BC)".to_string(), s_bc);
    components.insert("S(C)".to_string(), s_c);
    components.insert("S(ABC)".to_string(), s_abc);
    Ok(InfoReport {
        value: s_ac + s_bc - s_c - s_abc,
        components,
        tolerance: tol::CI,
    })
}

/// Whether `A ⊥ B | C` holds for `ρ` within `tol`.
pub fn conditionally_independent<S: AsRef<str>>(
    rho: &DensityOperator,
    a: &[S],
    b: &[S],
    c: &[S],
    tol: f64,
) -> Result<bool> {
    Ok(cmi(rho, a, b, c)?.value < tol)
}

fn require_cover(rho: &DensityOperator, cs: &ChordalStructure) -> Result<()> {
    let labels = rho.labels();
    let covered = labels
        .iter()
        .all(|l| cs.cliques.iter().any(|c| c.contains(l)));
    let inside = cs.cliques.iter().flatten().all(|v| labels.contains(v));
    if covered && inside {
        Ok(())
    } else {
        Err(Error::SupportMismatch(format!(
            "cliques {:?} do not cover support {labels:?}",
            cs.cliques
        )))
    }
}

/// `gI = Σ_C S(ρ_C) − Σ_D ν(D) S(ρ_D) − S(ρ)`.
pub fn global_information(rho: &DensityOperator, cs: &ChordalStructure) -> Result<InfoReport> {
    require_cover(rho, cs)?;
    let mut components = BTreeMap::new();
    let mut value = 0.0;
    for c in &cs.cliques {
        let s = entropy(&rho.marginal(c)?);
        components.insert(format!("clique {}", set_name(c)), s);
        value += s;
    }
    for sep in &cs.separators {
        let s = entropy(&rho.marginal(&sep.subset)?);
        components.insert(
            format!("separator {} x{}", set_name(&sep.subset), sep.multiplicity),
            s,
        );
        value -= sep.multiplicity as f64 * s;
    }
    let s = entropy(rho);
    components.insert("S(rho)".to_string(), s);
    value -= s;
    Ok(InfoReport {
        value,
        components,
        tolerance: tol::CI,
    })
}

/// Both sides of `gI(G)_ρ = D(ρ‖T(R_ρ)) + 1 − Tr T(R_ρ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GiIdentity {
    pub global_information: f64,
    pub divergence: f64,
    pub trace_of_t: f64,
    pub residual: f64,
}

pub fn gi_divergence_identity(rho: &DensityOperator, cs: &ChordalStructure) -> Result<GiIdentity> {
    let gi = global_information(rho, cs)?.value;
    let family = MarginalFamily::from_state(rho, &cs.cliques)?;
    let t = t_chordal(&family, cs)?;
    let target = family.union_sites();
    let rho_op = rho.op().embed_into(&target)?;
    let d = divergence(&rho_op, &t)?;
    let tr = t.trace().re;
    let rhs = d + 1.0 - tr;
    Ok(GiIdentity {
        global_information: gi,
        divergence: d,
        trace_of_t: tr,
        residual: (gi - rhs).abs(),
    })
}

/// `|D(ρ‖τ) − D(ρ‖σ) − D(σ‖τ) − ⟨ρ−σ, log σ − log τ⟩|`.
pub fn three_point_residual(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    tau: &DensityOperator,
) -> Result<f64> {
    let lhs = relative_entropy(rho, tau)?;
    let pairing = (rho.matrix() - sigma.matrix())
        .dotc(&(sigma.log().matrix() - tau.log().matrix()))
        .re;
    let rhs = relative_entropy(rho, sigma)? + relative_entropy(sigma, tau)? + pairing;
    Ok((lhs - rhs).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{chordal_structure, Graph};
    use crate::layout::SystemLayout;
    use crate::random::{random_pmf, random_state, rng};
    use nalgebra::DVector;
    use num_complex::Complex64;

    fn diag_state(l: &SystemLayout, labels: &[&str], p: &[f64]) -> DensityOperator {
        let m = CMatrix::from_diagonal(&DVector::from_iterator(
            p.len(),
            p.iter().map(|&x| Complex64::new(x, 0.0)),
        ));
        DensityOperator::new(Operator::on(l, labels, m).unwrap()).unwrap()
    }

    fn binary_entropy(p: f64) -> f64 {
        -(p * p.ln() + (1.0 - p) * (1.0 - p).ln())
    }

    #[test]
    fn entropy_values() {
        let l = SystemLayout::with_dims(&[3]).unwrap();
        let mixed = diag_state(&l, &["1"], &[1.0 / 3.0; 3]);
        assert!((entropy(&mixed) - 3f64.ln()).abs() < 1e-14);
        let q = SystemLayout::qubits(1);
        let x = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.5, 0.0),
                Complex64::new(0.3, 0.0),
                Complex64::new(0.3, 0.0),
                Complex64::new(0.5, 0.0),
            ],
        );
        let rho = DensityOperator::new(Operator::on(&q, &["1"], x).unwrap()).unwrap();
        assert!((entropy(&rho) - binary_entropy(0.8)).abs() < 1e-14);
    }

    #[test]
    fn divergence_values() {
        let l = SystemLayout::qubits(1);
        let p = diag_state(&l, &["1"], &[0.7, 0.3]);
        let q = diag_state(&l, &["1"], &[0.5, 0.5]);
        assert!(divergence(p.op(), p.op()).unwrap().abs() < 1e-15);
        let kl = 0.7 * 1.4f64.ln() + 0.3 * 0.6f64.ln();
        assert!((divergence(p.op(), q.op()).unwrap() - kl).abs() < 1e-14);
        let i2 = Operator::identity(l.sites().to_vec());
        let two = i2.scale(2.0);
        assert!((divergence(&i2, &two).unwrap() - (2.0 - 2.0 * 2f64.ln())).abs() < 1e-14);
    }

    #[test]
    fn cmi_of_product_is_zero() {
        let l = SystemLayout::qubits(3);
        let mut g = rng(1);
        let parts: Vec<_> = (0..3)
            .map(|i| random_state(&mut g, &l.sites()[i..=i]).unwrap())
            .collect();
        let m = parts[0]
            .matrix()
            .kronecker(parts[1].matrix())
            .kronecker(parts[2].matrix());
        let rho = DensityOperator::new(Operator::on(&l, &["1", "2", "3"], m).unwrap()).unwrap();
        assert!(cmi(&rho, &["1"], &["2"], &["3"]).unwrap().value.abs() < 1e-12);
    }

    #[test]
    fn cmi_classical_oracle() {
        let l = SystemLayout::with_dims(&[2, 3, 2]).unwrap();
        let p = random_pmf(&mut rng(2), 12);
        let rho = diag_state(&l, &["1", "2", "3"], &p);
        // I(1:3|2) = Σ p(a,b,c) log( p(a,b,c) p(b) / (p(a,b) p(b,c)) )
        let idx = |a: usize, b: usize, c: usize| a * 6 + b * 2 + c;
        let mut oracle = 0.0;
        for a in 0..2 {
            for b in 0..3 {
                for c in 0..2 {
                    let pabc = p[idx(a, b, c)];
                    let pb: f64 = (0..2)
                        .flat_map(|x| (0..2).map(move |z| (x, z)))
                        .map(|(x, z)| p[idx(x, b, z)])
                        .sum();
                    let pab: f64 = (0..2).map(|z| p[idx(a, b, z)]).sum();
                    let pbc: f64 = (0..2).map(|x| p[idx(x, b, c)]).sum();
                    oracle += pabc * (pabc * pb / (pab * pbc)).ln();
                }
            }
        }
        let r = cmi(&rho, &["1"], &["3"], &["2"]).unwrap();
        assert!((r.value - oracle).abs() < 1e-13);
        let sum = r.components["S(AC)"] + r.components["S(BC)"]
            - r.components["S(C)"]
            - r.components["S(ABC)"];
        assert!((sum - r.value).abs() < 1e-12);
    }

    #[test]
    fn cmi_rejects_overlap() {
        let l = SystemLayout::qubits(2);
        let rho = random_state(&mut rng(3), l.sites()).unwrap();
        assert!(matches!(
            cmi(&rho, &["1"], &["1"], &["2"]),
            Err(Error::SupportMismatch(_))
        ));
    }

    #[test]
    fn global_information_special_graphs() {
        let l = SystemLayout::qubits(3);
        let rho = random_state(&mut rng(4), l.sites()).unwrap();
        let k3 = Graph::complete(&l.labels());
        let gi = global_information(&rho, &chordal_structure(&k3).unwrap()).unwrap();
        assert!(gi.value.abs() < 1e-12);

        let path = Graph::new(l.labels(), vec![("1", "2"), ("2", "3")]).unwrap();
        let gi = global_information(&rho, &chordal_structure(&path).unwrap()).unwrap();
        let c = cmi(&rho, &["1"], &["3"], &["2"]).unwrap();
        assert!((gi.value - c.value).abs() < 1e-12);

        let empty = Graph::new(l.labels(), Vec::<(&str, &str)>::new()).unwrap();
        let gi = global_information(&rho, &chordal_structure(&empty).unwrap()).unwrap();
        let total: f64 = ["1", "2", "3"]
            .iter()
            .map(|v| entropy(&rho.marginal(&[*v]).unwrap()))
            .sum::<f64>()
            - entropy(&rho);
        assert!((gi.value - total).abs() < 1e-12);
    }

    #[test]
    fn three_point_identity() {
        let l = SystemLayout::qubits(2);
        let mut g = rng(5);
        for _ in 0..20 {
            let r = random_state(&mut g, l.sites()).unwrap();
            let s = random_state(&mut g, l.sites()).unwrap();
            let t = random_state(&mut g, l.sites()).unwrap();
            assert!(three_point_residual(&r, &s, &t).unwrap() < 1e-10);
        }
    }
}
