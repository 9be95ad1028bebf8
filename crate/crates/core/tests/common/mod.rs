#![allow(dead_code)]

use std::collections::HashMap;

use nalgebra::DVector;
use num_complex::Complex64;
use qmarkov::eig::CMatrix;
use qmarkov::layout::{Site, SystemLayout};
use qmarkov::operator::{DensityOperator, Operator};
use qmarkov::random::{random_pmf, random_unitary, TestRng};
use rand::Rng;

pub fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Print one verdict line and fail the test when `ok` is false.
pub fn verdict(n: usize, name: &str, ok: bool, detail: &str) {
    let tag = if ok { "PASS" } else { "FAIL" };
    println!("criterion {n:>2} {tag} {name}: {detail}");
    assert!(ok, "criterion {n} ({name}) failed: {detail}");
}

pub fn certify(op: Operator) -> DensityOperator {
    let m = op.matrix();
    let h = (m + m.adjoint()) * c(0.5);
    DensityOperator::new(op.with_matrix(h).unwrap()).unwrap()
}

/// Tensor product of states on disjoint supports, reordered to `layout`.
pub fn product(layout: &SystemLayout, parts: &[&DensityOperator]) -> DensityOperator {
    let mut sites: Vec<Site> = Vec::new();
    let mut m = CMatrix::from_element(1, 1, c(1.0));
    for p in parts {
        sites.extend(p.support().iter().cloned());
        m = m.kronecker(p.matrix());
    }
    let labels: Vec<String> = sites.iter().map(|s| s.label.clone()).collect();
    let op = Operator::new(sites, m).unwrap();
    certify(op.embed_into(&layout.subset(&labels).unwrap()).unwrap())
}

/// `U ρ U†` with `U` acting on `labels`.
pub fn conjugate(rho: &DensityOperator, labels: &[&str], u: &CMatrix) -> DensityOperator {
    let sites: Vec<Site> = rho
        .support()
        .iter()
        .filter(|s| labels.contains(&s.label.as_str()))
        .cloned()
        .collect();
    let u = Operator::new(sites, u.clone())
        .unwrap()
        .embed_into(rho.support())
        .unwrap();
    certify(u.mul(rho.op()).unwrap().mul(&u.adjoint()).unwrap())
}

/// Independent random unitary on each site.
pub fn local_unitaries(rng: &mut TestRng, rho: &DensityOperator) -> DensityOperator {
    let mut out = rho.clone();
    for s in rho.support().to_vec() {
        let u = random_unitary(rng, s.dim);
        out = conjugate(&out, &[s.label.as_str()], &u);
    }
    out
}

pub fn diagonal_state(sites: &[Site], p: &[f64]) -> DensityOperator {
    let m = CMatrix::from_diagonal(&DVector::from_iterator(p.len(), p.iter().map(|&x| c(x))));
    DensityOperator::new(Operator::new(sites.to_vec(), m).unwrap()).unwrap()
}

/// Mixed-radix digits of `index`, leftmost most significant.
pub fn digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
    out
}

pub fn total(dims: &[usize]) -> usize {
    dims.iter().product()
}

/// Scalar marginal of a joint pmf onto the positions `keep`.
pub fn pmf_marginal(p: &[f64], dims: &[usize], keep: &[usize]) -> HashMap<Vec<usize>, f64> {
    let mut out = HashMap::new();
    for (i, &pi) in p.iter().enumerate() {
        let d = digits(i, dims);
        *out.entry(keep.iter().map(|&k| d[k]).collect())
            .or_insert(0.0) += pi;
    }
    out
}

pub fn shannon(m: &HashMap<Vec<usize>, f64>) -> f64 {
    -m.values()
        .filter(|&&x| x > 0.0)
        .map(|&x| x * x.ln())
        .sum::<f64>()
}

/// Classical `I(A:B|C) = H(AC) + H(BC) − H(C) − H(ABC)` by direct summation.
pub fn classical_cmi(p: &[f64], dims: &[usize], a: &[usize], b: &[usize], cc: &[usize]) -> f64 {
    let h = |s: Vec<usize>| shannon(&pmf_marginal(p, dims, &s));
    let ac = [a, cc].concat();
    let bc = [b, cc].concat();
    let abc = [a, b, cc].concat();
    h(ac) + h(bc) - h(cc.to_vec()) - h(abc)
}

/// Random dimension drawn from `{2, 3}`.
pub fn small_dim(rng: &mut TestRng) -> usize {
    if rng.random::<bool>() {
        2
    } else {
        3
    }
}

pub fn dims_layout(dims: &[usize]) -> SystemLayout {
    SystemLayout::with_dims(dims).unwrap()
}

pub fn random_joint(rng: &mut TestRng, dims: &[usize]) -> Vec<f64> {
    random_pmf(rng, total(dims))
}
