//! Seeded generators for the randomized suites.
//!
//! Every generator takes the RNG explicitly. Case `i` of a suite seeded with
//! `s` uses [`case_rng`]`(s, i)`, so cases are independent of evaluation order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{inner, vec_norm, ComplexMatrix, C64};

pub type SuiteRng = ChaCha8Rng;

/// Default seed for the command-line harness.
pub const DEFAULT_SEED: u64 = 20_240_611;

pub fn rng(seed: u64) -> SuiteRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream for case `index` of a suite.
pub fn case_rng(seed: u64, index: usize) -> SuiteRng {
    // splitmix64 finaliser decorrelates neighbouring indices
    let mut z = seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    ChaCha8Rng::seed_from_u64(z ^ (z >> 31))
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..n).map(|_| complex_gaussian(rng)).collect();
        let nrm = vec_norm(&v);
        if nrm > 1e-8 {
            return v.into_iter().map(|z| z / nrm).collect();
        }
    }
}

pub fn unit_phase<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
}

/// Haar-like unitary from Gram-Schmidt on a complex Gaussian matrix.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = gaussian_matrix(rng, n, n);
    let mut q: Vec<Vec<C64>> = Vec::with_capacity(n);
    for mut x in g.columns() {
        for _ in 0..2 {
            for b in &q {
                let p = inner(b, &x);
                for (xi, bi) in x.iter_mut().zip(b) {
                    *xi -= p * bi;
                }
            }
        }
        let nrm = vec_norm(&x);
        q.push(x.into_iter().map(|z| z / nrm).collect());
    }
    ComplexMatrix::from_columns(&q)
}

/// `I − 2vv*` for a random unit `v`.
pub fn householder<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let v = unit_vector(rng, n);
    ComplexMatrix::from_fn(n, n, |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        C64::new(delta, 0.0) - v[i] * v[j].conj() * 2.0
    })
}

/// `U diag(s) W*` with singular values drawn from `[smin, smax]`.
pub fn conditioned<R: Rng + ?Sized>(rng: &mut R, n: usize, smin: f64, smax: f64) -> ComplexMatrix {
    let u = unitary(rng, n);
    let w = unitary(rng, n);
    let s: Vec<f64> = (0..n).map(|_| rng.random_range(smin..=smax)).collect();
    &(&u * &ComplexMatrix::real_diag(&s)) * &w.adjoint()
}

/// Upper triangular with diagonal moduli in `[dmin, dmax]`, random phases and
/// Gaussian strict upper part scaled by `off`.
pub fn upper_triangular<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    dmin: f64,
    dmax: f64,
    off: f64,
) -> ComplexMatrix {
    let mut r = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        r[(i, i)] = unit_phase(rng) * rng.random_range(dmin..=dmax);
        for j in i + 1..n {
            r[(i, j)] = complex_gaussian(rng) * off;
        }
    }
    r
}

/// `T = Q R Q*` from a random Schur form; the leading `j` columns of `Q`
/// span a `T`-invariant subspace for every `j`.
pub fn schur_form<R: Rng + ?Sized>(rng: &mut R, n: usize) -> (ComplexMatrix, ComplexMatrix) {
    let q = unitary(rng, n);
    let r = upper_triangular(rng, n, 0.5, 1.5, 0.5);
    (&(&q * &r) * &q.adjoint(), q)
}

/// Unitarily rotated `[[A, B], [0, N]]` where `N` is strictly upper triangular
/// of size `nil_dim`, so `0` is an eigenvalue and every power of `T` is rank
/// deficient.
pub fn with_nilpotent_part<R: Rng + ?Sized>(rng: &mut R, n: usize, nil_dim: usize) -> ComplexMatrix {
    assert!(nil_dim >= 1 && nil_dim <= n);
    let mut core = upper_triangular(rng, n, 0.5, 1.5, 0.5);
    for i in n - nil_dim..n {
        core[(i, i)] = C64::new(0.0, 0.0);
    }
    let q = unitary(rng, n);
    &(&q * &core) * &q.adjoint()
}

/// Blockwise-commuting pair `(T, S)`: `T = Q (T₁ ⊕ T₂) Q*` and
/// `S = Q (α I ⊕ β I) Q*` with unimodular `α`, `β`.
pub fn commuting_unitary_pair<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
) -> (ComplexMatrix, ComplexMatrix) {
    let split = if n > 1 { rng.random_range(1..n) } else { 1 };
    let q = unitary(rng, n);
    let inner_t = conditioned(rng, n, 0.5, 1.5);
    let mut block = ComplexMatrix::zeros(n, n);
    let mut phases = vec![C64::new(0.0, 0.0); n];
    let (alpha, beta) = (unit_phase(rng), unit_phase(rng));
    for i in 0..n {
        phases[i] = if i < split { alpha } else { beta };
        for j in 0..n {
            if (i < split) == (j < split) {
                block[(i, j)] = inner_t[(i, j)];
            }
        }
    }
    let t = &(&q * &block) * &q.adjoint();
    let s = &(&q * &ComplexMatrix::diag(&phases)) * &q.adjoint();
    (t, s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unitary_is_unitary() {
        let mut r = rng(1);
        for n in 1..7 {
            let u = unitary(&mut r, n);
            let d = (&(&u.adjoint() * &u) - &ComplexMatrix::identity(n)).frobenius_norm();
            assert!(d < 1e-13);
            let h = householder(&mut r, n);
            assert!((&(&h * &h) - &ComplexMatrix::identity(n)).frobenius_norm() < 1e-13);
        }
    }

    #[test]
    fn case_streams_are_deterministic() {
        let a: f64 = case_rng(7, 3).random();
        let b: f64 = case_rng(7, 3).random();
        let c: f64 = case_rng(7, 4).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn commuting_pair_commutes() {
        let mut r = rng(5);
        let (t, s) = commuting_unitary_pair(&mut r, 5);
        assert!((&(&t * &s) - &(&s * &t)).frobenius_norm() < 1e-12);
    }
}
