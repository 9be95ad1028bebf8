//! Operators on multipartite tensor spaces.
//!
//! An [`Operator`] carries its support: the ordered sites it acts on. Matrix
//! indices are mixed-radix over the support with the leftmost site as the
//! most significant digit. Embedding into a larger support tensors with the
//! identity on the added sites and reorders to the target order; the partial
//! trace removes sites and keeps the remaining order.

use num_complex::Complex64;

use crate::eig::{self, CMatrix, MatFn, Spectrum};
use crate::error::{Error, Result};
use crate::layout::{Site, SystemLayout};
use crate::tol;

#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    support: Vec<Site>,
    matrix: CMatrix,
}

fn dims_of(sites: &[Site]) -> Vec<usize> {
    sites.iter().map(|s| s.dim).collect()
}

/// Mixed-radix digits of every index in `0..∏dims`, most significant first.
fn all_digits(dims: &[usize]) -> Vec<Vec<usize>> {
    let total: usize = dims.iter().product();
    (0..total)
        .map(|mut idx| {
            let mut d = vec![0; dims.len()];
            for k in (0..dims.len()).rev() {
                d[k] = idx % dims[k];
                idx /= dims[k];
            }
            d
        })
        .collect()
}

fn compose(digits: impl Iterator<Item = (usize, usize)>) -> usize {
    digits.fold(0, |acc, (digit, dim)| acc * dim + digit)
}

impl Operator {
    pub fn new(support: Vec<Site>, matrix: CMatrix) -> Result<Self> {
        let d: usize = support.iter().map(|s| s.dim).product();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::SupportMismatch(format!(
                "matrix is {}x{} but support dimension is {d}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        for (i, s) in support.iter().enumerate() {
            if support[..i].iter().any(|t| t.label == s.label) {
                return Err(Error::SupportMismatch(format!(
                    "duplicate site {:?}",
                    s.label
                )));
            }
        }
        Ok(Operator { support, matrix })
    }

    /// Operator on the named layout sites; labels are put in layout order.
    pub fn on<S: AsRef<str>>(layout: &SystemLayout, labels: &[S], matrix: CMatrix) -> Result<Self> {
        Self::new(layout.subset(labels)?, matrix)
    }

    pub fn identity(support: Vec<Site>) -> Self {
        let d = support.iter().map(|s| s.dim).product();
        Operator {
            support,
            matrix: CMatrix::identity(d, d),
        }
    }

    /// `1×1` operator on the empty support.
    pub fn scalar(c: Complex64) -> Self {
        Operator {
            support: Vec::new(),
            matrix: CMatrix::from_element(1, 1, c),
        }
    }

    pub fn support(&self) -> &[Site] {
        &self.support
    }

    pub fn labels(&self) -> Vec<String> {
        self.support.iter().map(|s| s.label.clone()).collect()
    }

    pub fn has_site(&self, label: &str) -> bool {
        self.support.iter().any(|s| s.label == label)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn frobenius(&self) -> f64 {
        self.matrix.norm()
    }

    pub fn herm_defect(&self) -> f64 {
        eig::herm_defect(&self.matrix)
    }

    pub fn adjoint(&self) -> Operator {
        Operator {
            support: self.support.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    /// Same operator with a different matrix (same support).
    pub fn with_matrix(&self, matrix: CMatrix) -> Result<Operator> {
        Operator::new(self.support.clone(), matrix)
    }

    fn same_sites(&self, other: &Operator) -> bool {
        self.support == other.support
    }

    pub fn require_same_support(&self, other: &Operator) -> Result<()> {
        if self.same_sites(other) {
            Ok(())
        } else {
            Err(Error::SupportMismatch(format!(
                "{:?} vs {:?}",
                self.labels(),
                other.labels()
            )))
        }
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        self.require_same_support(other)?;
        self.with_matrix(&self.matrix + &other.matrix)
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator> {
        self.require_same_support(other)?;
        self.with_matrix(&self.matrix - &other.matrix)
    }

    pub fn mul(&self, other: &Operator) -> Result<Operator> {
        self.require_same_support(other)?;
        self.with_matrix(&self.matrix * &other.matrix)
    }

    pub fn scale(&self, c: f64) -> Operator {
        Operator {
            support: self.support.clone(),
            matrix: &self.matrix * Complex64::new(c, 0.0),
        }
    }

    /// Hilbert–Schmidt pairing `Tr(A† B)`.
    pub fn hs_inner(&self, other: &Operator) -> Result<Complex64> {
        self.require_same_support(other)?;
        Ok(self.matrix.dotc(&other.matrix))
    }

    pub fn spectrum(&self) -> Result<Spectrum> {
        eig::eigh(&self.matrix)
    }

    /// Lift a scalar function through the spectrum.
    pub fn func(&self, f: MatFn) -> Result<Operator> {
        self.with_matrix(eig::apply(&self.matrix, f)?)
    }

    /// Tensor with the identity on the sites of `target` not in the support,
    /// with the result indexed in `target` order.
    pub fn embed_into(&self, target: &[Site]) -> Result<Operator> {
        let mut pos = Vec::with_capacity(self.support.len());
        for s in &self.support {
            match target.iter().position(|t| t.label == s.label) {
                Some(p) if target[p].dim == s.dim => pos.push(p),
                Some(_) => {
                    return Err(Error::SupportMismatch(format!(
                        "site {:?} has a different dimension",
                        s.label
                    )))
                }
                None => {
                    return Err(Error::SupportMismatch(format!(
                        "{:?} is not contained in {:?}",
                        self.labels(),
                        target.iter().map(|t| &t.label).collect::<Vec<_>>()
                    )))
                }
            }
        }
        if pos.len() == target.len() && pos.iter().enumerate().all(|(i, &p)| i == p) {
            return Ok(self.clone());
        }
        let tdims = dims_of(target);
        let added: Vec<usize> = (0..target.len()).filter(|i| !pos.contains(i)).collect();
        let digits = all_digits(&tdims);
        let split: Vec<(usize, usize)> = digits
            .iter()
            .map(|d| {
                let inner = compose(pos.iter().map(|&p| (d[p], tdims[p])));
                let rest = compose(added.iter().map(|&p| (d[p], tdims[p])));
                (inner, rest)
            })
            .collect();
        let n = split.len();
        let m = &self.matrix;
        let out = CMatrix::from_fn(n, n, |i, j| {
            let (mi, ri) = split[i];
            let (mj, rj) = split[j];
            if ri == rj {
                m[(mi, mj)]
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Operator::new(target.to_vec(), out)
    }

    /// Embed into the sites `target` of `layout`, in layout order.
    pub fn embed<S: AsRef<str>>(&self, layout: &SystemLayout, target: &[S]) -> Result<Operator> {
        self.embed_into(&layout.subset(target)?)
    }

    /// Trace out the named sites; remaining sites keep their order.
    pub fn partial_trace<S: AsRef<str>>(&self, traced: &[S]) -> Result<Operator> {
        for t in traced {
            if !self.has_site(t.as_ref()) {
                return Err(Error::SupportMismatch(format!(
                    "cannot trace {:?}: not in support {:?}",
                    t.as_ref(),
                    self.labels()
                )));
            }
        }
        if traced.is_empty() {
            return Ok(self.clone());
        }
        let is_traced = |s: &Site| traced.iter().any(|t| t.as_ref() == s.label);
        let keep: Vec<usize> = (0..self.support.len())
            .filter(|&i| !is_traced(&self.support[i]))
            .collect();
        let gone: Vec<usize> = (0..self.support.len())
            .filter(|&i| is_traced(&self.support[i]))
            .collect();
        let dims = dims_of(&self.support);
        let split: Vec<(usize, usize)> = all_digits(&dims)
            .iter()
            .map(|d| {
                (
                    compose(keep.iter().map(|&p| (d[p], dims[p]))),
                    compose(gone.iter().map(|&p| (d[p], dims[p]))),
                )
            })
            .collect();
        let kept_sites: Vec<Site> = keep.iter().map(|&i| self.support[i].clone()).collect();
        let kd: usize = kept_sites.iter().map(|s| s.dim).product();
        let mut out = CMatrix::zeros(kd, kd);
        let n = self.dim();
        for j in 0..n {
            let (kj, tj) = split[j];
            for (i, &(ki, ti)) in split.iter().enumerate() {
                if ti == tj {
                    out[(ki, kj)] += self.matrix[(i, j)];
                }
            }
        }
        Operator::new(kept_sites, out)
    }

    /// Partial trace over every support site not in `keep`.
    pub fn reduce_to<S: AsRef<str>>(&self, keep: &[S]) -> Result<Operator> {
        for k in keep {
            if !self.has_site(k.as_ref()) {
                return Err(Error::SupportMismatch(format!(
                    "{:?} not in support {:?}",
                    k.as_ref(),
                    self.labels()
                )));
            }
        }
        let traced: Vec<String> = self
            .support
            .iter()
            .filter(|s| !keep.iter().any(|k| k.as_ref() == s.label))
            .map(|s| s.label.clone())
            .collect();
        self.partial_trace(&traced)
    }

    /// Hilbert–Schmidt projection onto `{Y ⊗ I}` with `Y` acting on `keep`.
    pub fn project_onto(&self, keep: &[String]) -> Result<Operator> {
        let reduced = self.reduce_to(keep)?;
        let traced_dim = self.dim() / reduced.dim();
        reduced
            .scale(1.0 / traced_dim as f64)
            .embed_into(&self.support)
    }
}

/// `exp(log M + log N)` for strictly positive `M`, `N` on a common support.
pub fn odot(m: &Operator, n: &Operator) -> Result<Operator> {
    m.require_same_support(n)?;
    let sum = m.func(MatFn::Log)?.add(&n.func(MatFn::Log)?)?;
    sum.func(MatFn::Exp)
}

/// `N^{1/2} M N^{1/2}` for Hermitian `M` and strictly positive `N`.
pub fn star(m: &Operator, n: &Operator) -> Result<Operator> {
    m.require_same_support(n)?;
    let defect = m.herm_defect();
    if defect > tol::HERM * m.frobenius().max(1.0) {
        return Err(Error::NotHermitian { defect });
    }
    let root = n.func(MatFn::Sqrt)?;
    m.with_matrix(root.matrix() * m.matrix() * root.matrix())
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Normality {
    /// `‖KK† − K†K‖_F`.
    pub defect: f64,
    pub normal: bool,
}

/// Normality test `‖KK† − K†K‖_F ≤ tol · ‖K‖_F²`.
pub fn is_normal(k: &Operator, tol: f64) -> Normality {
    let m = k.matrix();
    let defect = (m * m.adjoint() - m.adjoint() * m).norm();
    let scale = m.norm_squared();
    Normality {
        defect,
        normal: defect <= tol * scale,
    }
}

/// A certified strictly positive, unit-trace Hermitian operator.
///
/// The spectrum computed during certification is kept, so logarithms,
/// square roots and entropies do not repeat the eigendecomposition.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    op: Operator,
    spectrum: Spectrum,
    herm_defect: f64,
    trace_defect: f64,
}

impl DensityOperator {
    pub fn new(op: Operator) -> Result<Self> {
        let herm_defect = op.herm_defect();
        if herm_defect > tol::HERM {
            return Err(Error::NotHermitian {
                defect: herm_defect,
            });
        }
        let spectrum = eig::jacobi_eigh(op.matrix())?;
        spectrum.require_positive()?;
        let trace = op.trace().re;
        let trace_defect = (trace - 1.0).abs();
        if trace_defect > tol::TRACE {
            return Err(Error::NotNormalized { trace });
        }
        Ok(DensityOperator {
            op,
            spectrum,
            herm_defect,
            trace_defect,
        })
    }

    /// Certify `M / Tr M`.
    pub fn normalized(op: Operator) -> Result<Self> {
        let t = op.trace().re;
        if t.is_nan() || t <= 0.0 {
            return Err(Error::NotNormalized { trace: t });
        }
        Self::new(op.scale(1.0 / t))
    }

    pub fn op(&self) -> &Operator {
        &self.op
    }

    pub fn into_op(self) -> Operator {
        self.op
    }

    pub fn matrix(&self) -> &CMatrix {
        self.op.matrix()
    }

    pub fn support(&self) -> &[Site] {
        self.op.support()
    }

    pub fn labels(&self) -> Vec<String> {
        self.op.labels()
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn min_eig(&self) -> f64 {
        self.spectrum.min()
    }

    pub fn herm_defect(&self) -> f64 {
        self.herm_defect
    }

    pub fn trace_defect(&self) -> f64 {
        self.trace_defect
    }

    pub fn func(&self, f: MatFn) -> Operator {
        Operator {
            support: self.op.support.clone(),
            matrix: self.spectrum.map(|x| f.eval(x)),
        }
    }

    pub fn log(&self) -> Operator {
        self.func(MatFn::Log)
    }

    pub fn sqrt(&self) -> Operator {
        self.func(MatFn::Sqrt)
    }

    pub fn inv_sqrt(&self) -> Operator {
        self.func(MatFn::InvSqrt)
    }

    /// Reduced state on `keep`.
    pub fn marginal<S: AsRef<str>>(&self, keep: &[S]) -> Result<DensityOperator> {
        DensityOperator::new(self.op.reduce_to(keep)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_density_matrix, random_hermitian, random_state, rng};
    use nalgebra::DVector;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn pauli(ch: char) -> CMatrix {
        let i = Complex64::i();
        match ch {
            'X' => CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]),
            'Y' => CMatrix::from_row_slice(2, 2, &[c(0.0), -i, i, c(0.0)]),
            'Z' => CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]),
            _ => CMatrix::identity(2, 2),
        }
    }

    fn ab() -> SystemLayout {
        SystemLayout::qubits(2)
    }

    fn diag(v: &[f64]) -> CMatrix {
        CMatrix::from_diagonal(&DVector::from_iterator(v.len(), v.iter().map(|&x| c(x))))
    }

    #[test]
    fn embed_adds_identity_in_layout_order() {
        let l = ab();
        let x = Operator::on(&l, &["2"], pauli('X')).unwrap();
        let e = x.embed(&l, &["1", "2"]).unwrap();
        assert_eq!(e.matrix(), &CMatrix::identity(2, 2).kronecker(&pauli('X')));
        assert_eq!(x.embed(&l, &["2"]).unwrap(), x);
    }

    #[test]
    fn embed_reorders_support() {
        let l = SystemLayout::qubits(2);
        let m = pauli('X').kronecker(&pauli('Z'));
        // support listed as (2, 1): X acts on site 2, Z on site 1
        let op = Operator::new(vec![l.sites()[1].clone(), l.sites()[0].clone()], m).unwrap();
        let e = op.embed(&l, &["1", "2"]).unwrap();
        assert_eq!(e.matrix(), &pauli('Z').kronecker(&pauli('X')));
    }

    #[test]
    fn partial_trace_of_product() {
        let l = ab();
        let x = pauli('X') + CMatrix::identity(2, 2) * c(2.0);
        let y = pauli('Y');
        let op = Operator::on(&l, &["1", "2"], x.kronecker(&y)).unwrap();
        let r = op.partial_trace(&["1"]).unwrap();
        assert!((r.matrix() - &y * x.trace()).norm() < 1e-15);
        assert_eq!(op.partial_trace::<&str>(&[]).unwrap(), op);
        assert!(matches!(
            op.partial_trace(&["3"]),
            Err(Error::SupportMismatch(_))
        ));
    }

    #[test]
    fn embed_then_trace_scales_by_dimension() {
        let l = SystemLayout::with_dims(&[2, 3, 2]).unwrap();
        let mut g = rng(2);
        let m = Operator::on(&l, &["2"], random_hermitian(&mut g, 3)).unwrap();
        let e = m.embed(&l, &["1", "2", "3"]).unwrap();
        let back = e.partial_trace(&["1", "3"]).unwrap();
        assert!((back.matrix() - m.matrix() * c(4.0)).norm() < 1e-13);
    }

    #[test]
    fn iterated_partial_trace() {
        let l = SystemLayout::with_dims(&[2, 3, 2]).unwrap();
        let rho = random_state(&mut rng(4), l.sites()).unwrap();
        let two_step = rho
            .op()
            .partial_trace(&["3"])
            .unwrap()
            .partial_trace(&["2"])
            .unwrap();
        let one_step = rho.op().partial_trace(&["2", "3"]).unwrap();
        assert!((two_step.matrix() - one_step.matrix()).norm() < 1e-12);
    }

    #[test]
    fn partial_trace_duality_against_basis() {
        // Tr((I_A ⊗ M) ρ) = Tr(M Tr_A ρ) for every matrix unit M.
        let l = SystemLayout::with_dims(&[2, 3]).unwrap();
        let rho = Operator::on(&l, &["1", "2"], random_density_matrix(&mut rng(5), 6)).unwrap();
        let red = rho.partial_trace(&["1"]).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                let mut e = CMatrix::zeros(3, 3);
                e[(a, b)] = c(1.0);
                let m = Operator::on(&l, &["2"], e).unwrap();
                let lhs = (m.embed(&l, &["1", "2"]).unwrap().matrix() * rho.matrix()).trace();
                let rhs = (m.matrix() * red.matrix()).trace();
                assert!((lhs - rhs).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn odot_cases() {
        let l = SystemLayout::qubits(1);
        let n = Operator::on(&l, &["1"], random_density_matrix(&mut rng(6), 2)).unwrap();
        let id = Operator::identity(l.sites().to_vec());
        assert!((odot(&id, &n).unwrap().matrix() - n.matrix()).norm() < 1e-14);
        let a = Operator::on(&l, &["1"], diag(&[0.3, 2.0])).unwrap();
        let b = Operator::on(&l, &["1"], diag(&[1.5, 0.25])).unwrap();
        assert!((odot(&a, &b).unwrap().matrix() - diag(&[0.45, 0.5])).norm() < 1e-14);
    }

    /// exp of a traceless-plus-scalar 2×2 Hermitian `a I + v·σ`:
    /// `e^a (cosh|v| I + sinh|v|/|v| v·σ)`.
    fn exp2_closed(a: f64, v: [f64; 3]) -> CMatrix {
        let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        let k = if r > 0.0 { r.sinh() / r } else { 1.0 };
        (CMatrix::identity(2, 2) * c(r.cosh())
            + (pauli('X') * c(v[0]) + pauli('Y') * c(v[1]) + pauli('Z') * c(v[2])) * c(k))
            * c(a.exp())
    }

    /// log of `(I + v·σ)/2`: `½log((1-r²)/4) I + artanh(r)/r v·σ`.
    fn log2_closed(v: [f64; 3]) -> (f64, [f64; 3]) {
        let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        let k = r.atanh() / r;
        (
            0.5 * ((1.0 - r * r) / 4.0).ln(),
            [v[0] * k, v[1] * k, v[2] * k],
        )
    }

    #[test]
    fn odot_noncommuting_matches_bloch_formula() {
        let l = SystemLayout::qubits(1);
        let m = Operator::on(
            &l,
            &["1"],
            (CMatrix::identity(2, 2) + pauli('X') * c(0.5)) * c(0.5),
        )
        .unwrap();
        let n = Operator::on(
            &l,
            &["1"],
            (CMatrix::identity(2, 2) + pauli('Z') * c(0.5)) * c(0.5),
        )
        .unwrap();
        let got = odot(&m, &n).unwrap();
        let (a1, v1) = log2_closed([0.5, 0.0, 0.0]);
        let (a2, v2) = log2_closed([0.0, 0.0, 0.5]);
        let want = exp2_closed(a1 + a2, [v1[0] + v2[0], v1[1] + v2[1], v1[2] + v2[2]]);
        assert!((got.matrix() - &want).norm() < 1e-13);
        assert!((got.matrix() - m.matrix() * n.matrix()).norm() > 1e-3);
    }

    #[test]
    fn star_cases() {
        let l = SystemLayout::qubits(2);
        let mut g = rng(10);
        let m = Operator::on(&l, &["1", "2"], random_hermitian(&mut g, 4)).unwrap();
        let n = Operator::on(&l, &["1", "2"], random_density_matrix(&mut g, 4)).unwrap();
        let id = Operator::identity(l.sites().to_vec());
        assert!((star(&m, &id).unwrap().matrix() - m.matrix()).norm() < 1e-13);
        let s = star(&m, &n).unwrap();
        assert!(s.herm_defect() < 1e-13);
        assert!((s.trace() - (m.matrix() * n.matrix()).trace()).norm() < 1e-12);
        let d1 = Operator::on(&l, &["1", "2"], diag(&[1.0, -2.0, 0.5, 3.0])).unwrap();
        let d2 = Operator::on(&l, &["1", "2"], diag(&[0.1, 0.2, 0.3, 0.4])).unwrap();
        assert!((star(&d1, &d2).unwrap().matrix() - diag(&[0.1, -0.4, 0.15, 1.2])).norm() < 1e-14);
    }

    #[test]
    fn normality() {
        let l = SystemLayout::qubits(1);
        let h = Operator::on(&l, &["1"], pauli('X')).unwrap();
        let n = is_normal(&h, 1e-12);
        assert!(n.normal && n.defect == 0.0);
        let shift = Operator::on(
            &l,
            &["1"],
            CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]),
        )
        .unwrap();
        let n = is_normal(&shift, 1e-12);
        assert!(!n.normal);
        assert!((n.defect - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn density_certification() {
        let l = SystemLayout::qubits(1);
        let proj = Operator::on(&l, &["1"], diag(&[1.0, 0.0])).unwrap();
        assert!(matches!(
            DensityOperator::new(proj),
            Err(Error::NotPositive { .. })
        ));
        let unnorm = Operator::on(&l, &["1"], diag(&[1.0, 1.0])).unwrap();
        assert!(matches!(
            DensityOperator::new(unnorm.clone()),
            Err(Error::NotNormalized { .. })
        ));
        assert!(DensityOperator::normalized(unnorm).is_ok());
    }
}
