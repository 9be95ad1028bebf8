//! Logarithmic completion `T(R)` of a family of marginals, the trace
//! criterion, the sandwich operator `K`, conditional densities and the
//! quantum Markov property on a graph.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::eig::{self, MatFn};
use crate::error::{Error, Result};
use crate::graph::{chordal_structure, separation_triples, ChordalStructure, Graph, Triple};
use crate::info::{cmi, entropy, entropy_of, relative_entropy};
use crate::layout::{Site, SystemLayout};
use crate::operator::{is_normal, DensityOperator, Normality, Operator};
use crate::tol;

fn canonical<S: AsRef<str>>(s: &[S]) -> Vec<String> {
    let mut v: Vec<String> = s.iter().map(|x| x.as_ref().to_string()).collect();
    v.sort();
    v
}

/// Reduced states on subsets of a layout, keyed by sorted label lists.
///
/// Each entry's support is kept in layout order.
#[derive(Debug, Clone)]
pub struct MarginalFamily {
    layout: SystemLayout,
    entries: BTreeMap<Vec<String>, DensityOperator>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapResidual {
    pub first: Vec<String>,
    pub second: Vec<String>,
    pub overlap: Vec<String>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub overlaps: Vec<OverlapResidual>,
    pub max_residual: f64,
    pub tolerance: f64,
    pub consistent: bool,
}

impl MarginalFamily {
    pub fn new(layout: SystemLayout, states: Vec<DensityOperator>) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for rho in states {
            let sites = layout.subset(&rho.labels())?;
            for s in rho.support() {
                if layout.site(&s.label)?.dim != s.dim {
                    return Err(Error::SupportMismatch(format!(
                        "site {:?} has the wrong dimension",
                        s.label
                    )));
                }
            }
            let rho = if sites.as_slice() == rho.support() {
                rho
            } else {
                DensityOperator::new(rho.op().embed_into(&sites)?)?
            };
            let key = canonical(&rho.labels());
            if entries.insert(key.clone(), rho).is_some() {
                return Err(Error::SupportMismatch(format!("two entries on {key:?}")));
            }
        }
        Ok(MarginalFamily { layout, entries })
    }

    /// Marginals of `rho` on each subset; the layout is `rho`'s support.
    pub fn from_state<S: AsRef<str>>(rho: &DensityOperator, subsets: &[Vec<S>]) -> Result<Self> {
        let layout = SystemLayout::new(rho.support().to_vec())?;
        let states = subsets
            .iter()
            .map(|s| rho.marginal(s))
            .collect::<Result<Vec<_>>>()?;
        Self::new(layout, states)
    }

    pub fn layout(&self) -> &SystemLayout {
        &self.layout
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn subsets(&self) -> Vec<Vec<String>> {
        self.entries.keys().cloned().collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<String>, &DensityOperator)> {
        self.entries.iter()
    }

    pub fn get<S: AsRef<str>>(&self, subset: &[S]) -> Option<&DensityOperator> {
        self.entries.get(&canonical(subset))
    }

    /// Sites covered by some entry, in layout order.
    pub fn union_sites(&self) -> Vec<Site> {
        self.layout
            .sites()
            .iter()
            .filter(|s| self.entries.keys().any(|k| k.contains(&s.label)))
            .cloned()
            .collect()
    }

    /// Marginal on `subset` taken from the lexicographically first entry
    /// containing it.
    pub fn derived_marginal<S: AsRef<str>>(&self, subset: &[S]) -> Result<DensityOperator> {
        let want = canonical(subset);
        let (_, rho) = self
            .entries
            .iter()
            .find(|(k, _)| want.iter().all(|x| k.contains(x)))
            .ok_or_else(|| Error::SupportMismatch(format!("no entry contains {want:?}")))?;
        rho.marginal(&want)
    }

    pub fn check_consistency(&self) -> ConsistencyReport {
        let mut overlaps = Vec::new();
        let keys: Vec<&Vec<String>> = self.entries.keys().collect();
        for (i, a) in keys.iter().enumerate() {
            for b in &keys[i + 1..] {
                let overlap: Vec<String> = a.iter().filter(|x| b.contains(x)).cloned().collect();
                if overlap.is_empty() {
                    continue;
                }
                let ra = self.entries[*a].op().reduce_to(&overlap);
                let rb = self.entries[*b].op().reduce_to(&overlap);
                let residual = match (ra, rb) {
                    (Ok(x), Ok(y)) => x.sub(&y).map(|d| d.frobenius()).unwrap_or(f64::INFINITY),
                    _ => f64::INFINITY,
                };
                overlaps.push(OverlapResidual {
                    first: (*a).clone(),
                    second: (*b).clone(),
                    overlap,
                    residual,
                });
            }
        }
        let max_residual = overlaps.iter().map(|o| o.residual).fold(0.0, f64::max);
        ConsistencyReport {
            overlaps,
            max_residual,
            tolerance: tol::CONSIST,
            consistent: max_residual <= tol::CONSIST,
        }
    }

    fn require_consistent(&self) -> Result<()> {
        let c = self.check_consistency();
        if c.consistent {
            Ok(())
        } else {
            Err(Error::Inconsistent {
                residual: c.max_residual,
            })
        }
    }

    /// `exp(Σ w_k log ρ_{S_k})` over the union of the family, with each
    /// `ρ_{S_k}` derived from the entries.
    fn log_combination(&self, terms: &[(Vec<String>, f64)]) -> Result<Operator> {
        let target = self.union_sites();
        let mut sum = Operator::identity(target.clone()).scale(0.0);
        for (subset, w) in terms {
            if subset.is_empty() {
                continue;
            }
            let rho = match self.get(subset) {
                Some(r) => r.clone(),
                None => self.derived_marginal(subset)?,
            };
            sum = sum.add(&rho.log().embed_into(&target)?.scale(*w))?;
        }
        let m = eig::apply(&symmetrize(sum.matrix()), MatFn::Exp)?;
        Operator::new(target, m)
    }

    fn two_keys(&self) -> Result<(Vec<String>, Vec<String>, Vec<String>)> {
        if self.len() != 2 {
            return Err(Error::SupportMismatch(format!(
                "expected two entries, found {}",
                self.len()
            )));
        }
        let keys = self.subsets();
        let c: Vec<String> = keys[0]
            .iter()
            .filter(|x| keys[1].contains(x))
            .cloned()
            .collect();
        Ok((keys[0].clone(), keys[1].clone(), c))
    }
}

fn symmetrize(m: &eig::CMatrix) -> eig::CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// `T(R) = exp(log ρ_{A∪C} + log ρ_{B∪C} − log ρ_C)` for a family of two
/// entries; `C` is their intersection.
pub fn t_two_clique(family: &MarginalFamily) -> Result<Operator> {
    let (ac, bc, c) = family.two_keys()?;
    family.require_consistent()?;
    family.log_combination(&[(ac, 1.0), (bc, 1.0), (c, -1.0)])
}

fn require_clique_keys(family: &MarginalFamily, cs: &ChordalStructure) -> Result<()> {
    let keys = family.subsets();
    let mut cliques: Vec<Vec<String>> = cs.cliques.iter().map(|c| canonical(c)).collect();
    cliques.sort();
    if keys == cliques {
        Ok(())
    } else {
        Err(Error::SupportMismatch(format!(
            "family subsets {keys:?} are not the cliques {cliques:?}"
        )))
    }
}

/// `T(R) = exp(Σ_C log ρ_C − Σ_S ν(S) log ρ_S)`; separator marginals are
/// taken from the first clique containing them.
pub fn t_chordal(family: &MarginalFamily, cs: &ChordalStructure) -> Result<Operator> {
    require_clique_keys(family, cs)?;
    family.require_consistent()?;
    let mut terms: Vec<(Vec<String>, f64)> = cs.cliques.iter().map(|c| (c.clone(), 1.0)).collect();
    terms.extend(
        cs.separators
            .iter()
            .map(|s| (s.subset.clone(), -(s.multiplicity as f64))),
    );
    family.log_combination(&terms)
}

/// Chordal structure whose cliques are exactly the family's subsets.
pub fn structure_of(family: &MarginalFamily) -> Result<ChordalStructure> {
    let verts: Vec<String> = family.union_sites().into_iter().map(|s| s.label).collect();
    let g = Graph::from_cliques(&verts, &family.subsets())?;
    let cs = chordal_structure(&g)?;
    require_clique_keys(family, &cs)?;
    Ok(cs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    MarkovFeasible,
    Boundary,
    NotMarkovFeasible,
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceCriterionReport {
    pub trace_of_t: f64,
    pub defect: f64,
    pub verdict: Verdict,
    #[serde(rename = "T")]
    pub t: Operator,
    /// Frobenius distance between each clique marginal of `T` and the
    /// prescribed one; filled when the verdict is feasible.
    pub marginal_residuals: BTreeMap<String, f64>,
    /// `|S(T) − Σ S(ρ_C) + Σ ν S(ρ_S)|`, when feasible.
    pub entropy_residual: Option<f64>,
}

/// Classify `1 − Tr T(R)` and, when feasible, check that `T` reproduces the
/// marginals. Without a structure, the family's subsets must be the cliques
/// of a chordal graph.
pub fn trace_criterion(
    family: &MarginalFamily,
    cs: Option<&ChordalStructure>,
) -> Result<TraceCriterionReport> {
    let owned;
    let cs = match cs {
        Some(cs) => cs,
        None => {
            owned = structure_of(family)?;
            &owned
        }
    };
    let t = t_chordal(family, cs)?;
    let trace_of_t = t.trace().re;
    let defect = 1.0 - trace_of_t;
    let verdict = if defect <= tol::TRACE_CRITERION {
        Verdict::MarkovFeasible
    } else if defect <= tol::TRACE_BOUNDARY {
        Verdict::Boundary
    } else {
        Verdict::NotMarkovFeasible
    };
    let mut marginal_residuals = BTreeMap::new();
    let mut entropy_residual = None;
    if verdict == Verdict::MarkovFeasible {
        for (key, rho) in family.entries() {
            let r = t.reduce_to(key)?.sub(rho.op())?.frobenius();
            marginal_residuals.insert(key.join(","), r);
        }
        let mut formula = 0.0;
        for c in &cs.cliques {
            formula += entropy(&family.derived_marginal(c)?);
        }
        for s in &cs.separators {
            formula -= s.multiplicity as f64 * entropy(&family.derived_marginal(&s.subset)?);
        }
        entropy_residual = Some((entropy_of(&t)? - formula).abs());
    }
    Ok(TraceCriterionReport {
        trace_of_t,
        defect,
        verdict,
        t,
        marginal_residuals,
        entropy_residual,
    })
}

/// Terms of `D(ω‖T) + 1 − Tr T = I(A:B|C)_ω + Δ_R(ω)` for a two-entry family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivergenceIdentity {
    pub lhs: f64,
    pub cmi: f64,
    pub delta: f64,
    pub residual: f64,
}

pub fn two_clique_divergence_identity(
    omega: &DensityOperator,
    family: &MarginalFamily,
) -> Result<DivergenceIdentity> {
    let (ac, bc, c) = family.two_keys()?;
    let t = t_two_clique(family)?;
    let omega_op = omega.op().embed_into(t.support())?;
    let lhs = crate::info::divergence(&omega_op, &t)? + 1.0 - t.trace().re;
    let a: Vec<String> = ac.iter().filter(|x| !c.contains(x)).cloned().collect();
    let b: Vec<String> = bc.iter().filter(|x| !c.contains(x)).cloned().collect();
    let i = cmi(omega, &a, &b, &c)?.value;
    let mut delta = relative_entropy(&omega.marginal(&ac)?, family.get(&ac).expect("key"))?
        + relative_entropy(&omega.marginal(&bc)?, family.get(&bc).expect("key"))?;
    if !c.is_empty() {
        delta -= relative_entropy(&omega.marginal(&c)?, &family.derived_marginal(&c)?)?;
    }
    Ok(DivergenceIdentity {
        lhs,
        cmi: i,
        delta,
        residual: (lhs - i - delta).abs(),
    })
}

/// Both sides of `D(ω‖T) + 1 − Tr T = Σ S(ρ_C) − Σ ν S(ρ_S) − S(ω)` for
/// `ω` with the family's clique marginals.
pub fn chordal_variational_residual(
    omega: &DensityOperator,
    family: &MarginalFamily,
    cs: &ChordalStructure,
) -> Result<f64> {
    let t = t_chordal(family, cs)?;
    let omega_op = omega.op().embed_into(t.support())?;
    let lhs = crate::info::divergence(&omega_op, &t)? + 1.0 - t.trace().re;
    let mut rhs = -entropy(omega);
    for c in &cs.cliques {
        rhs += entropy(&family.derived_marginal(c)?);
    }
    for s in &cs.separators {
        rhs -= s.multiplicity as f64 * entropy(&family.derived_marginal(&s.subset)?);
    }
    Ok((lhs - rhs).abs())
}

/// `K = ρ_{A∪C}^{1/2} ρ_C^{−1/2} ρ_{B∪C}^{1/2}` on `A∪B∪C`, where `A∪C` is
/// the lexicographically first entry.
pub fn sandwich_k(family: &MarginalFamily) -> Result<Operator> {
    let (ac, bc, c) = family.two_keys()?;
    family.require_consistent()?;
    let target = family.union_sites();
    let ac = family.get(&ac).expect("key").sqrt().embed_into(&target)?;
    let bc = family.get(&bc).expect("key").sqrt().embed_into(&target)?;
    let k = if c.is_empty() {
        ac.mul(&bc)?
    } else {
        let c = family
            .derived_marginal(&c)?
            .inv_sqrt()
            .embed_into(&target)?;
        ac.mul(&c)?.mul(&bc)?
    };
    Ok(k)
}

#[derive(Debug, Clone, Serialize)]
pub struct Compatibility {
    pub compatible: bool,
    pub normality: Normality,
    /// `KK† = K†K` when `K` is normal.
    pub omega: Option<Operator>,
}

/// Markov compatibility of a two-entry family: normality of `K`, and the
/// common state `ω = KK†` when it holds.
pub fn markov_compatible(family: &MarginalFamily) -> Result<Compatibility> {
    let k = sandwich_k(family)?;
    let normality = is_normal(&k, tol::NORMAL);
    let omega = if normality.normal {
        Some(k.mul(&k.adjoint())?)
    } else {
        None
    };
    Ok(Compatibility {
        compatible: normality.normal,
        normality,
        omega,
    })
}

/// Sites of `rho` whose labels are in `keep`, in `rho`'s order.
fn ordered(rho: &DensityOperator, keep: &[String]) -> Vec<String> {
    rho.labels()
        .into_iter()
        .filter(|l| keep.contains(l))
        .collect()
}

/// `ρ_{A|B} = ρ_B^{−1/2} ρ_{A∪B} ρ_B^{−1/2}` on `A∪B`.
pub fn conditional_density<S: AsRef<str>>(
    rho: &DensityOperator,
    a: &[S],
    b: &[S],
) -> Result<Operator> {
    let a = canonical(a);
    let b = canonical(b);
    if a.iter().any(|x| b.contains(x)) {
        return Err(Error::SupportMismatch("conditioned sets overlap".into()));
    }
    let ab: Vec<String> = ordered(rho, &[a, b.clone()].concat());
    let rho_ab = rho.marginal(&ab)?;
    let w = rho
        .marginal(&ordered(rho, &b))?
        .inv_sqrt()
        .embed_into(rho_ab.support())?;
    w.mul(rho_ab.op())?.mul(&w)
}

/// `ω = ρ_{B|C} ⋆ σ_{A∪C}`, where `C` is the overlap of the supports. The
/// result lives on `σ`'s sites followed by the remaining sites of `ρ`.
pub fn one_sided_reconstruction(
    rho_bc: &DensityOperator,
    sigma_ac: &DensityOperator,
) -> Result<DensityOperator> {
    let sig = sigma_ac.labels();
    let c: Vec<String> = rho_bc
        .labels()
        .into_iter()
        .filter(|x| sig.contains(x))
        .collect();
    let b: Vec<String> = rho_bc
        .labels()
        .into_iter()
        .filter(|x| !sig.contains(x))
        .collect();
    let mut target: Vec<Site> = sigma_ac.support().to_vec();
    target.extend(
        rho_bc
            .support()
            .iter()
            .filter(|s| b.contains(&s.label))
            .cloned(),
    );
    let cond = conditional_density(rho_bc, &b, &c)?.embed_into(&target)?;
    let s = sigma_ac.sqrt().embed_into(&target)?;
    let omega = s.mul(&cond)?.mul(&s)?;
    DensityOperator::new(omega.with_matrix(symmetrize(omega.matrix()))?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkovCheck {
    pub markov: bool,
    pub worst_cmi: f64,
    pub worst: Option<Triple>,
    pub checked: usize,
    pub tolerance: f64,
}

/// Largest vertex count for which every separation statement is checked.
pub const EXHAUSTIVE_LIMIT: usize = 5;

/// Check `A ⊥_G B | D ⇒ I(A:B|D) ≤ tol`. Small graphs are checked over all
/// separation statements; larger (chordal) graphs over the recursive
/// junction-tree decompositions, which suffices by the intersection property.
pub fn is_quantum_markov(rho: &DensityOperator, g: &Graph, tol: f64) -> Result<MarkovCheck> {
    let labels = canonical(&rho.labels());
    if canonical(g.vertices()) != labels {
        return Err(Error::SupportMismatch(format!(
            "graph vertices {:?} differ from support {:?}",
            g.vertices(),
            rho.labels()
        )));
    }
    let mut triples = if g.vertices().len() <= EXHAUSTIVE_LIMIT {
        separation_triples(g)
    } else {
        Vec::new()
    };
    match chordal_structure(g) {
        Ok(cs) => triples.extend(cs.recursive_decompositions()),
        Err(Error::NotChordal) if !triples.is_empty() || g.vertices().len() <= EXHAUSTIVE_LIMIT => {
        }
        Err(e) => return Err(e),
    }
    let mut worst_cmi = f64::NEG_INFINITY;
    let mut worst = None;
    for t in &triples {
        let v = cmi(rho, &t.a, &t.b, &t.d)?.value;
        if v > worst_cmi {
            worst_cmi = v;
            worst = Some(t.clone());
        }
    }
    if triples.is_empty() {
        worst_cmi = 0.0;
    }
    Ok(MarkovCheck {
        markov: worst_cmi <= tol,
        worst_cmi,
        worst,
        checked: triples.len(),
        tolerance: tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eig::CMatrix;
    use crate::random::{random_pmf, random_state, rng};
    use nalgebra::DVector;
    use num_complex::Complex64;

    fn diag(l: &SystemLayout, labels: &[&str], p: &[f64]) -> DensityOperator {
        let m = CMatrix::from_diagonal(&DVector::from_iterator(
            p.len(),
            p.iter().map(|&x| Complex64::new(x, 0.0)),
        ));
        DensityOperator::new(Operator::on(l, labels, m).unwrap()).unwrap()
    }

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn consistency_of_true_marginals() {
        let l = SystemLayout::qubits(3);
        let rho = random_state(&mut rng(1), l.sites()).unwrap();
        let f = MarginalFamily::from_state(&rho, &[s(&["1", "2"]), s(&["2", "3"])]).unwrap();
        let c = f.check_consistency();
        assert!(c.consistent && c.max_residual < 1e-12);
    }

    #[test]
    fn perturbed_entry_reports_its_residual() {
        let l = SystemLayout::qubits(3);
        let a = diag(&l, &["1", "2"], &[0.1, 0.2, 0.3, 0.4]);
        let b = diag(&l, &["2", "3"], &[0.2, 0.2, 0.3, 0.3]);
        let f = MarginalFamily::new(l, vec![a, b]).unwrap();
        // overlap marginals (0.4, 0.6) against (0.4, 0.6): consistent
        assert!(f.check_consistency().consistent);
        let l = SystemLayout::qubits(3);
        let a = diag(&l, &["1", "2"], &[0.1, 0.2, 0.3, 0.4]);
        let b = diag(&l, &["2", "3"], &[0.25, 0.2, 0.3, 0.25]);
        let f = MarginalFamily::new(l, vec![a, b]).unwrap();
        let c = f.check_consistency();
        // (0.4, 0.6) vs (0.45, 0.55)
        assert!((c.max_residual - (2.0f64 * 0.05 * 0.05).sqrt()).abs() < 1e-14);
        assert!(matches!(t_two_clique(&f), Err(Error::Inconsistent { .. })));
    }

    #[test]
    fn classical_t_matches_junction_formula() {
        let l = SystemLayout::qubits(3);
        let p = random_pmf(&mut rng(3), 8);
        let rho = diag(&l, &["1", "2", "3"], &p);
        let f = MarginalFamily::from_state(&rho, &[s(&["1", "2"]), s(&["2", "3"])]).unwrap();
        let t = t_two_clique(&f).unwrap();
        let pr = |a: usize, b: usize, c: usize| p[4 * a + 2 * b + c];
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    let pab = pr(a, b, 0) + pr(a, b, 1);
                    let pbc = pr(0, b, c) + pr(1, b, c);
                    let pb: f64 = (0..2)
                        .flat_map(|x| (0..2).map(move |y| (x, y)))
                        .map(|(x, y)| pr(x, b, y))
                        .sum();
                    let i = 4 * a + 2 * b + c;
                    assert!((t.matrix()[(i, i)].re - pab * pbc / pb).abs() < 1e-14);
                }
            }
        }
        assert!((t.trace().re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn chordal_reduces_to_two_clique_and_single_clique() {
        let l = SystemLayout::qubits(3);
        let rho = random_state(&mut rng(4), l.sites()).unwrap();
        let f = MarginalFamily::from_state(&rho, &[s(&["1", "2"]), s(&["2", "3"])]).unwrap();
        let cs = structure_of(&f).unwrap();
        let a = t_two_clique(&f).unwrap();
        let b = t_chordal(&f, &cs).unwrap();
        assert!(a.sub(&b).unwrap().frobenius() < 1e-12);
        assert!(a.trace().re <= 1.0 + 1e-9);

        let single = MarginalFamily::from_state(&rho, &[s(&["1", "2", "3"])]).unwrap();
        let t = t_chordal(&single, &structure_of(&single).unwrap()).unwrap();
        assert!(t.sub(rho.op()).unwrap().frobenius() < 1e-10);
    }

    #[test]
    fn product_family_is_feasible() {
        let l = SystemLayout::qubits(3);
        let mut r = rng(5);
        let a = random_state(&mut r, &l.subset(&["1"]).unwrap()).unwrap();
        let c = random_state(&mut r, &l.subset(&["2"]).unwrap()).unwrap();
        let b = random_state(&mut r, &l.subset(&["3"]).unwrap()).unwrap();
        let all = l.sites().to_vec();
        let prod = a
            .op()
            .embed_into(&all)
            .unwrap()
            .mul(&c.op().embed_into(&all).unwrap())
            .unwrap();
        let prod = prod.mul(&b.op().embed_into(&all).unwrap()).unwrap();
        let rho = DensityOperator::new(prod.clone()).unwrap();
        let f = MarginalFamily::from_state(&rho, &[s(&["1", "2"]), s(&["2", "3"])]).unwrap();
        let rep = trace_criterion(&f, None).unwrap();
        assert_eq!(rep.verdict, Verdict::MarkovFeasible);
        assert!(rep.t.sub(&prod).unwrap().frobenius() < 1e-10);
        assert!(rep.marginal_residuals.values().all(|&r| r < 1e-9));
        assert!(rep.entropy_residual.unwrap() < 1e-8);
        let k = sandwich_k(&f).unwrap();
        assert!(k.herm_defect() < 1e-10);
        let comp = markov_compatible(&f).unwrap();
        assert!(comp.compatible);
        assert!(comp.omega.unwrap().sub(&prod).unwrap().frobenius() < 1e-8);
    }

    #[test]
    fn conditional_density_traces_to_identity() {
        let l = SystemLayout::qubits(2);
        let rho = random_state(&mut rng(6), l.sites()).unwrap();
        let cond = conditional_density(&rho, &["1"], &["2"]).unwrap();
        let tr = cond.partial_trace(&["1"]).unwrap();
        assert!((tr.matrix() - CMatrix::identity(2, 2)).norm() < 1e-10);
        let rho_b = rho.marginal(&["2"]).unwrap();
        let back =
            crate::operator::star(&cond, &rho_b.op().embed_into(rho.support()).unwrap()).unwrap();
        assert!(back.sub(rho.op()).unwrap().frobenius() < 1e-10);
    }

    #[test]
    fn reconstruction_keeps_sigma_marginal() {
        let l = SystemLayout::qubits(3);
        let mut r = rng(7);
        let rho = random_state(&mut r, &l.subset(&["2", "3"]).unwrap()).unwrap();
        let sigma = random_state(&mut r, &l.subset(&["1", "2"]).unwrap()).unwrap();
        let w = one_sided_reconstruction(&rho, &sigma).unwrap();
        assert_eq!(w.labels(), s(&["1", "2", "3"]));
        assert!(
            w.op()
                .reduce_to(&["1", "2"])
                .unwrap()
                .sub(sigma.op())
                .unwrap()
                .frobenius()
                < 1e-10
        );
    }

    #[test]
    fn divergence_identity_random() {
        let l = SystemLayout::qubits(3);
        let mut r = rng(8);
        let rho = random_state(&mut r, l.sites()).unwrap();
        let omega = random_state(&mut r, l.sites()).unwrap();
        let f = MarginalFamily::from_state(&rho, &[s(&["1", "2"]), s(&["2", "3"])]).unwrap();
        let id = two_clique_divergence_identity(&omega, &f).unwrap();
        assert!(id.residual < 1e-9, "{id:?}");
        assert!(id.delta >= -1e-9);
        let cs = structure_of(&f).unwrap();
        assert!(chordal_variational_residual(&rho, &f, &cs).unwrap() < 1e-9);
    }

    #[test]
    fn markov_check_on_product_and_generic() {
        let l = SystemLayout::qubits(3);
        let g = Graph::new(s(&["1", "2", "3"]), [("1", "2"), ("2", "3")]).unwrap();
        let p: Vec<f64> = (0..8)
            .map(|i| [0.3, 0.7][i >> 2] * [0.4, 0.6][(i >> 1) & 1] * [0.2, 0.8][i & 1])
            .collect();
        let prod = diag(&l, &["1", "2", "3"], &p);
        assert!(is_quantum_markov(&prod, &g, tol::CI).unwrap().markov);
        let rho = random_state(&mut rng(9), l.sites()).unwrap();
        let chk = is_quantum_markov(&rho, &g, tol::CI).unwrap();
        assert!(!chk.markov);
        assert!(chk.worst.is_some());
    }
}
