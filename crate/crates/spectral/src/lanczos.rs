//! Lanczos iteration for the inverted pencil. The operator applied at each
//! step is C = (A + sigma M)^{-1} M, which is self adjoint in the inner
//! product weighted by M, so the recurrence runs entirely in that product.
//! Full reorthogonalization keeps the basis clean; the extra cost is small
//! at the sizes this crate meets.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::band::BandCholesky;
use crate::{SpectralError, SymSparse};

/// Hard cap on Lanczos steps before giving up.
pub const MAX_LANCZOS_STEPS: usize = 400;

const RITZ_TOL: f64 = 1e-10;

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Ritz values of the tridiagonal section together with the last component
/// of each eigenvector, which bounds the residual of the Ritz pair.
fn section_eigen(alphas: &[f64], betas: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let m = alphas.len();
    let mut t = DMatrix::zeros(m, m);
    for (i, &a) in alphas.iter().enumerate() {
        t[(i, i)] = a;
    }
    for (i, &b) in betas.iter().take(m - 1).enumerate() {
        t[(i, i + 1)] = b;
        t[(i + 1, i)] = b;
    }
    let eig = SymmetricEigen::new(t);
    let thetas: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let last: Vec<f64> = (0..m).map(|c| eig.eigenvectors[(m - 1, c)]).collect();
    (thetas, last)
}

/// Largest `k` eigenvalues of C in descending order. The start vector is
/// all ones, and a breakdown continues with the first coordinate vector not
/// yet spanned, so the whole run is deterministic.
pub fn largest_eigenvalues(
    factor: &BandCholesky,
    mass: &SymSparse,
    k: usize,
) -> Result<Vec<f64>, SpectralError> {
    let n = mass.n;
    let k = k.min(n);
    let max_steps = n.min(MAX_LANCZOS_STEPS.max(4 * k));

    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut mbasis: Vec<Vec<f64>> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();

    let mut v = vec![1.0; n];
    let nrm = m_norm(mass, &v);
    for vi in v.iter_mut() {
        *vi /= nrm;
    }
    let mut continuation = 0usize;

    loop {
        let mv = mass.matvec(&v);
        basis.push(v.clone());
        mbasis.push(mv.clone());

        let mut w = factor.solve(&mv);
        alphas.push(dot(&w, &mv));
        for _ in 0..2 {
            for (b, mb) in basis.iter().zip(mbasis.iter()) {
                let c = dot(&w, mb);
                axpy(&mut w, -c, b);
            }
        }
        let beta = m_norm(mass, &w);
        let m = alphas.len();

        if m >= k && (m <= 50 || m % 5 == 0 || m == n || m >= max_steps) {
            let (thetas, last) = section_eigen(&alphas, &betas);
            let mut order: Vec<usize> = (0..m).collect();
            order.sort_by(|&a, &b| thetas[b].partial_cmp(&thetas[a]).unwrap());
            let theta_max = thetas[order[0]].abs().max(f64::MIN_POSITIVE);
            let done = order
                .iter()
                .take(k)
                .all(|&i| beta * last[i].abs() <= RITZ_TOL * theta_max);
            if done || m == n {
                return Ok(order.iter().take(k).map(|&i| thetas[i]).collect());
            }
            if m >= max_steps {
                return Err(SpectralError::NoConvergence { iterations: m });
            }
        }

        let scale = alphas.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        if beta > 1e-13 * scale.max(f64::MIN_POSITIVE) {
            betas.push(beta);
            v = w;
            for vi in v.iter_mut() {
                *vi /= beta;
            }
        } else {
            // Invariant subspace found early. Continue with a fresh
            // direction so the remaining spectrum is still reachable.
            betas.push(0.0);
            let mut found = false;
            while continuation < n {
                let mut cand = vec![0.0; n];
                cand[continuation] = 1.0;
                continuation += 1;
                for _ in 0..2 {
                    for (b, mb) in basis.iter().zip(mbasis.iter()) {
                        let c = dot(&cand, mb);
                        axpy(&mut cand, -c, b);
                    }
                }
                let nrm = m_norm(mass, &cand);
                if nrm > 1e-8 {
                    for ci in cand.iter_mut() {
                        *ci /= nrm;
                    }
                    v = cand;
                    found = true;
                    break;
                }
            }
            if !found {
                // Basis spans the whole space; the section is exact.
                let (thetas, _) = section_eigen(&alphas, &betas);
                let mut sorted = thetas;
                sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
                sorted.truncate(k);
                return Ok(sorted);
            }
        }
    }
}

fn m_norm(mass: &SymSparse, x: &[f64]) -> f64 {
    dot(x, &mass.matvec(x)).max(0.0).sqrt()
}
