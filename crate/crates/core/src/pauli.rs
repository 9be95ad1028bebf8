//! Pauli words, states of the form `2^{-n}(I + Σ a_W W)`, and the two-word
//! three-qubit family with its scalar closed forms.
//!
//! Qubit sites are labeled `"1"`, `"2"`, ... in word order.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eig::CMatrix;
use crate::error::{Error, Result};
use crate::layout::SystemLayout;
use crate::markov::MarginalFamily;
use crate::operator::{DensityOperator, Operator};
use crate::tol;

/// A word over `{I, X, Y, Z}`, one letter per qubit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PauliWord(String);

impl PauliWord {
    pub fn new(letters: &str) -> Result<Self> {
        if let Some(c) = letters.chars().find(|c| !"IXYZ".contains(*c)) {
            return Err(Error::BadLetter(c));
        }
        Ok(PauliWord(letters.to_string()))
    }

    pub fn letters(&self) -> &str {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.chars().all(|c| c == 'I')
    }
}

impl TryFrom<String> for PauliWord {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        PauliWord::new(&s)
    }
}

impl From<PauliWord> for String {
    fn from(w: PauliWord) -> String {
        w.0
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn letter(c: char) -> CMatrix {
    let (o, l, i) = (
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::i(),
    );
    match c {
        'X' => CMatrix::from_row_slice(2, 2, &[o, l, l, o]),
        'Y' => CMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        'Z' => CMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
        _ => CMatrix::identity(2, 2),
    }
}

/// Tensor product of the letters, first letter most significant.
pub fn word_matrix(w: &PauliWord) -> CMatrix {
    w.0.chars()
        .fold(CMatrix::identity(1, 1), |acc, c| acc.kronecker(&letter(c)))
}

/// The word as an operator on `SystemLayout::qubits(n)`.
pub fn word_operator(w: &PauliWord) -> Operator {
    Operator::new(
        SystemLayout::qubits(w.len()).sites().to_vec(),
        word_matrix(w),
    )
    .expect("dimension 2^n")
}

/// Two words anticommute iff they differ on an odd number of sites where
/// both letters are non-identity.
pub fn anticommutes(a: &PauliWord, b: &PauliWord) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let clashes =
        a.0.chars()
            .zip(b.0.chars())
            .filter(|&(x, y)| x != 'I' && y != 'I' && x != y)
            .count();
    Ok(clashes % 2 == 1)
}

/// `2^{-n}(I + Σ a_W W)` over non-identity words.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliState {
    pub n: usize,
    pub coeffs: BTreeMap<PauliWord, f64>,
}

impl PauliState {
    pub fn new(n: usize, coeffs: impl IntoIterator<Item = (PauliWord, f64)>) -> Result<Self> {
        let coeffs: BTreeMap<PauliWord, f64> = coeffs.into_iter().collect();
        for w in coeffs.keys() {
            if w.len() != n {
                return Err(Error::LengthMismatch(w.len(), n));
            }
            if w.is_identity() {
                return Err(Error::BadParameter("the identity word is implicit".into()));
            }
        }
        Ok(PauliState { n, coeffs })
    }

    /// Euclidean norm of the coefficient vector.
    pub fn r(&self) -> f64 {
        self.coeffs.values().map(|a| a * a).sum::<f64>().sqrt()
    }

    /// `Σ a_W W`.
    pub fn generator(&self) -> CMatrix {
        let d = 1 << self.n;
        self.coeffs
            .iter()
            .fold(CMatrix::zeros(d, d), |acc, (w, &a)| {
                acc + word_matrix(w).scale(a)
            })
    }

    pub fn matrix(&self) -> CMatrix {
        let d = 1usize << self.n;
        (CMatrix::identity(d, d) + self.generator()).scale(1.0 / d as f64)
    }

    pub fn pairwise_anticommuting(&self) -> bool {
        let words: Vec<&PauliWord> = self.coeffs.keys().collect();
        words.iter().enumerate().all(|(i, a)| {
            words[i + 1..]
                .iter()
                .all(|b| anticommutes(a, b).unwrap_or(false))
        })
    }

    pub fn layout(&self) -> SystemLayout {
        SystemLayout::qubits(self.n)
    }
}

/// Certify the state. For pairwise anticommuting words the spectrum is
/// `2^{-n}(1 ± r)`, so `r ≥ 1 − pd_floor` is refused up front.
pub fn pauli_state(state: &PauliState) -> Result<(DensityOperator, f64)> {
    let r = state.r();
    if state.pairwise_anticommuting() && r >= 1.0 - tol::PD_FLOOR {
        return Err(Error::NotPositive {
            min_eig: (1.0 - r) / (1u64 << state.n) as f64,
        });
    }
    let op = Operator::new(state.layout().sites().to_vec(), state.matrix())?;
    Ok((DensityOperator::new(op)?, r))
}

/// `log ρ = (½ log(1−r²) − n log 2) I + (artanh r / r) T` for pairwise
/// anticommuting words. Returns `−n log 2 · I` when `r ≤ 1e-14`.
pub fn pauli_log_closed_form(state: &PauliState) -> Result<Operator> {
    if !state.pairwise_anticommuting() {
        return Err(Error::BadParameter(
            "closed-form logarithm needs pairwise anticommuting words".into(),
        ));
    }
    let r = state.r();
    if r >= 1.0 {
        return Err(Error::NotPositive {
            min_eig: (1.0 - r) / (1u64 << state.n) as f64,
        });
    }
    let d = 1usize << state.n;
    let n_log2 = state.n as f64 * std::f64::consts::LN_2;
    let m = if r <= 1e-14 {
        CMatrix::identity(d, d).scale(-n_log2)
    } else {
        CMatrix::identity(d, d).scale(0.5 * (1.0 - r * r).ln() - n_log2)
            + state.generator().scale(r.atanh() / r)
    };
    Operator::new(state.layout().sites().to_vec(), m)
}

/// The words `XXI` and `IZZ`.
pub fn basic_qubit_words() -> (PauliWord, PauliWord) {
    (
        PauliWord::new("XXI").expect("valid"),
        PauliWord::new("IZZ").expect("valid"),
    )
}

/// Scalar facts about the family `ρ₁₂ = (I + εXX)/4`, `ρ₂₃ = (I + δZZ)/4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedForms {
    pub eps: f64,
    pub delta: f64,
    /// `√(artanh²ε + artanh²δ)`.
    pub r: f64,
    /// `√((1−ε²)(1−δ²)) cosh r`.
    pub trace_of_t: f64,
    /// `cosh r / (cosh artanh ε · cosh artanh δ)`, the same value by another route.
    pub trace_of_t_alt: f64,
    pub defect: f64,
    /// A completion exists (`ε² + δ² ≤ 1`).
    pub feasible: bool,
    /// The completion is strictly positive (`ε² + δ² < 1 − 1e-10`).
    pub strictly_feasible: bool,
    /// A Markov completion exists (`εδ = 0`).
    pub markov_feasible: bool,
}

impl ClosedForms {
    pub fn new(eps: f64, delta: f64) -> Self {
        let (b, d) = (eps.atanh(), delta.atanh());
        let r = b.hypot(d);
        let trace_of_t = ((1.0 - eps * eps) * (1.0 - delta * delta)).sqrt() * r.cosh();
        let trace_of_t_alt = r.cosh() / (b.cosh() * d.cosh());
        let rr = eps * eps + delta * delta;
        ClosedForms {
            eps,
            delta,
            r,
            trace_of_t,
            trace_of_t_alt,
            defect: 1.0 - trace_of_t,
            feasible: rr <= 1.0,
            strictly_feasible: rr < 1.0 - tol::FEASIBILITY,
            markov_feasible: (eps * delta).abs() < tol::PRODUCT_ZERO,
        }
    }
}

fn check_param(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x.abs() < 1.0 {
        Ok(())
    } else {
        Err(Error::BadParameter(format!(
            "{name} = {x} must lie in (-1, 1)"
        )))
    }
}

/// The family on qubits `1, 2, 3` with entries on `{1,2}` and `{2,3}`.
pub fn basic_qubit_family(eps: f64, delta: f64) -> Result<(MarginalFamily, ClosedForms)> {
    check_param("eps", eps)?;
    check_param("delta", delta)?;
    let layout = SystemLayout::qubits(3);
    let two = |w: &str, a: f64, labels: [&str; 2]| -> Result<DensityOperator> {
        let s = PauliState::new(2, [(PauliWord::new(w)?, a)])?;
        DensityOperator::new(Operator::on(&layout, &labels, s.matrix())?)
    };
    let states = vec![two("XX", eps, ["1", "2"])?, two("ZZ", delta, ["2", "3"])?];
    Ok((
        MarginalFamily::new(layout.clone(), states)?,
        ClosedForms::new(eps, delta),
    ))
}

/// `σ = (I + ε XXI + δ IZZ)/8`, certified only while `ε² + δ² < 1 − 1e-10`.
pub fn basic_qubit_completion(eps: f64, delta: f64) -> Result<DensityOperator> {
    let (w1, w2) = basic_qubit_words();
    let rr = eps * eps + delta * delta;
    if rr >= 1.0 - tol::FEASIBILITY {
        return Err(Error::NotPositive {
            min_eig: (1.0 - rr.sqrt()) / 8.0,
        });
    }
    Ok(pauli_state(&PauliState::new(3, [(w1, eps), (w2, delta)])?)?.0)
}
