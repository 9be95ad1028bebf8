//! Cyclic Jacobi eigensolver for Hermitian matrices and the spectral
//! matrix functions built on it.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol;

pub type CMatrix = DMatrix<Complex64>;

/// Eigen-decomposition `H = U diag(λ) U†` with eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl Spectrum {
    pub fn min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// `U diag(f(λ)) U†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let u = &self.eigenvectors;
        let mut scaled = u.clone();
        for (j, &l) in self.eigenvalues.iter().enumerate() {
            let fl = f(l);
            scaled.column_mut(j).scale_mut(fl);
        }
        scaled * u.adjoint()
    }

    /// Fails unless every eigenvalue exceeds `PD_FLOOR` relative to the largest.
    pub fn require_positive(&self) -> Result<()> {
        let max = self.max();
        let min = self.min();
        if max <= 0.0 || min <= tol::PD_FLOOR * max {
            return Err(Error::NotPositive { min_eig: min });
        }
        Ok(())
    }

    /// `‖H U - U diag(λ)‖_F`.
    pub fn residual(&self, h: &CMatrix) -> f64 {
        let mut ul = self.eigenvectors.clone();
        for (j, &l) in self.eigenvalues.iter().enumerate() {
            ul.column_mut(j).scale_mut(l);
        }
        (h * &self.eigenvectors - ul).norm()
    }
}

/// Scalar functions that can be lifted to Hermitian matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatFn {
    Log,
    Exp,
    Sqrt,
    InvSqrt,
    Inv,
}

impl MatFn {
    pub fn needs_positive(self) -> bool {
        !matches!(self, MatFn::Exp)
    }

    pub fn eval(self, x: f64) -> f64 {
        match self {
            MatFn::Log => x.ln(),
            MatFn::Exp => x.exp(),
            MatFn::Sqrt => x.sqrt(),
            MatFn::InvSqrt => 1.0 / x.sqrt(),
            MatFn::Inv => 1.0 / x,
        }
    }
}

/// `‖H - H†‖_F`.
pub fn herm_defect(h: &CMatrix) -> f64 {
    (h - h.adjoint()).norm()
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for j in 0..n {
        for i in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// The input is symmetrized before rotating; callers are expected to have
/// checked the Hermiticity defect. Sweeps stop once the off-diagonal norm
/// drops below `tol::EIG * ‖H‖_F`.
pub fn jacobi_eigh(h: &CMatrix) -> Result<Spectrum> {
    let n = h.nrows();
    assert_eq!(n, h.ncols(), "jacobi_eigh needs a square matrix");
    let mut a = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let mut v = CMatrix::identity(n, n);
    let thresh = tol::EIG * a.norm();

    let mut converged = false;
    let mut sweeps = 0;
    while sweeps < tol::EIG_MAX_SWEEPS {
        if off_diagonal_norm(&a) <= thresh {
            converged = true;
            break;
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let g = apq.norm();
                if g == 0.0 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // Phase rotation makes the pivot real, then a real Givens
                // rotation annihilates it.
                let phase = (apq / g).conj();
                let theta = (aqq - app) / (2.0 * g);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let j_pp = Complex64::new(c, 0.0);
                let j_pq = Complex64::new(s, 0.0);
                let j_qp = phase * (-s);
                let j_qq = phase * c;

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * j_pp + akq * j_qp;
                    a[(k, q)] = akp * j_pq + akq * j_qq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = j_pp.conj() * apk + j_qp.conj() * aqk;
                    a[(q, k)] = j_pq.conj() * apk + j_qq.conj() * aqk;
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * j_pp + vkq * j_qp;
                    v[(k, q)] = vkp * j_pq + vkq * j_qq;
                }
            }
        }
    }
    if !converged {
        let off = off_diagonal_norm(&a);
        if off > thresh {
            return Err(Error::EigNotConverged { sweeps, off });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Checked Hermitian eigen-decomposition of a raw matrix.
pub fn eigh(h: &CMatrix) -> Result<Spectrum> {
    let defect = herm_defect(h);
    if defect > tol::HERM * h.norm().max(1.0) {
        return Err(Error::NotHermitian { defect });
    }
    jacobi_eigh(h)
}

/// Apply `f` to a Hermitian matrix through its spectrum.
pub fn apply(h: &CMatrix, f: MatFn) -> Result<CMatrix> {
    let spec = eigh(h)?;
    if f.needs_positive() {
        spec.require_positive()?;
    }
    Ok(spec.map(|x| f.eval(x)))
}
