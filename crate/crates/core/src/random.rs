//! Seedable generators for random states and operators.
//!
//! States are produced by conjugating a random positive diagonal spectrum
//! with a Haar-distributed unitary, so every draw is strictly positive.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::eig::CMatrix;
use crate::error::Result;
use crate::layout::Site;
use crate::operator::{DensityOperator, Operator};

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Complex Ginibre matrix with standard normal entries.
pub fn ginibre(rng: &mut impl Rng, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| gaussian(rng))
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> CMatrix {
    let g = ginibre(rng, n);
    (&g + g.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Haar-random unitary: QR of a Ginibre matrix with the phases of `R`'s
/// diagonal moved into `Q`.
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> CMatrix {
    let qr = ginibre(rng, n).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..n {
            q[(i, j)] *= ph;
        }
    }
    q
}

/// Positive spectrum in `[floor, floor + 1)`, normalized to unit sum.
pub fn random_spectrum(rng: &mut impl Rng, n: usize, floor: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| floor + rng.random::<f64>()).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / s).collect()
}

/// Random full-rank density matrix `U diag(p) U†`.
pub fn random_density_matrix(rng: &mut impl Rng, n: usize) -> CMatrix {
    let p = random_spectrum(rng, n, 0.05);
    let u = random_unitary(rng, n);
    let d = CMatrix::from_diagonal(&DVector::from_iterator(
        n,
        p.into_iter().map(|x| Complex64::new(x, 0.0)),
    ));
    let m = &u * d * u.adjoint();
    (&m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Random strictly positive state on the given sites.
pub fn random_state(rng: &mut impl Rng, sites: &[Site]) -> Result<DensityOperator> {
    let d = sites.iter().map(|s| s.dim).product();
    DensityOperator::new(Operator::new(
        sites.to_vec(),
        random_density_matrix(rng, d),
    )?)
}

/// Random probability vector with entries bounded away from zero.
pub fn random_pmf(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    random_spectrum(rng, n, 0.05)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unitary_is_unitary() {
        let mut g = rng(1);
        let u = random_unitary(&mut g, 6);
        assert!((u.adjoint() * &u - CMatrix::identity(6, 6)).norm() < 1e-13);
    }

    #[test]
    fn seeded_draws_repeat() {
        let a = random_density_matrix(&mut rng(3), 4);
        let b = random_density_matrix(&mut rng(3), 4);
        assert_eq!(a, b);
    }
}
