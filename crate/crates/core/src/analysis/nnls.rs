//! Active-set non-negative least squares (Lawson-Hanson).
//!
//! Minimizes `||E a - x||_2` subject to `a >= 0`. The passive-set
//! subproblem is solved through an SVD pseudo-inverse, so a rank-deficient
//! passive set yields the least-norm solution instead of failing. Pivot
//! ties go to the lowest index.

use nalgebra::{DMatrix, DVector};

use super::AnalysisError;
use crate::scene::EndmemberLibrary;

#[derive(Debug, Clone, PartialEq)]
pub struct Unmixing {
    pub abundances: Vec<f64>,
    /// `||E a - x||_2`.
    pub residual: f64,
    pub iterations: usize,
    /// More endmembers than bands: the fit is not unique.
    pub underdetermined: bool,
}

/// Solves NNLS for a dense `rows x cols` column-major matrix.
pub fn nnls(e: &DMatrix<f64>, x: &DVector<f64>) -> (DVector<f64>, usize) {
    let n = e.ncols();
    let mut a = DVector::zeros(n);
    let mut passive = vec![false; n];
    let mut blocked = vec![false; n];
    let scale = 1.0 + e.norm() * x.norm();
    let tol = 1e-12 * scale;
    let max_outer = 3 * n + 30;
    let mut iterations = 0;

    let gradient_dual = |a: &DVector<f64>| e.transpose() * (x - e * a);

    let mut w = gradient_dual(&a);
    while iterations < max_outer {
        let mut pick: Option<usize> = None;
        for j in 0..n {
            if passive[j] || blocked[j] || w[j] <= tol {
                continue;
            }
            if pick.is_none_or(|p| w[j] > w[p]) {
                pick = Some(j);
            }
        }
        let Some(j) = pick else { break };
        iterations += 1;
        passive[j] = true;

        let mut first_inner = true;
        loop {
            let s = solve_passive(e, x, &passive);
            let infeasible: Vec<usize> = (0..n).filter(|&i| passive[i] && s[i] <= 0.0).collect();
            if infeasible.is_empty() {
                a = s;
                break;
            }
            if first_inner && infeasible == [j] {
                // The entering column cannot improve the fit numerically;
                // park it until the iterate moves.
                passive[j] = false;
                blocked[j] = true;
                break;
            }
            first_inner = false;
            let mut alpha = f64::INFINITY;
            let mut leaving = infeasible[0];
            for &i in &infeasible {
                let denom = a[i] - s[i];
                let ratio = if denom > 0.0 { a[i] / denom } else { 0.0 };
                if ratio < alpha {
                    alpha = ratio;
                    leaving = i;
                }
            }
            a += (s - &a) * alpha;
            a[leaving] = 0.0;
            passive[leaving] = false;
            for i in 0..n {
                if passive[i] && a[i] <= 0.0 {
                    a[i] = 0.0;
                    passive[i] = false;
                }
            }
        }
        if !blocked[j] {
            blocked.fill(false);
        }
        for i in 0..n {
            if !passive[i] {
                a[i] = 0.0;
            }
        }
        w = gradient_dual(&a);
    }
    (a, iterations)
}

/// Least-squares fit restricted to the passive columns; inactive entries are
/// zero.
fn solve_passive(e: &DMatrix<f64>, x: &DVector<f64>, passive: &[bool]) -> DVector<f64> {
    let cols: Vec<usize> = (0..passive.len()).filter(|&i| passive[i]).collect();
    let mut out = DVector::zeros(passive.len());
    if cols.is_empty() {
        return out;
    }
    let sub = e.select_columns(&cols);
    let svd = sub.svd(true, true);
    let eps = 1e-12 * svd.singular_values.max().max(f64::MIN_POSITIVE);
    let sol = svd.solve(x, eps).expect("both singular bases were computed");
    for (k, &c) in cols.iter().enumerate() {
        out[c] = sol[k];
    }
    out
}

/// Non-negative abundances of `x` over the library endmembers.
pub fn unmix(x: &[f64], library: &EndmemberLibrary) -> Result<Unmixing, AnalysisError> {
    let bands = library.bands();
    if x.len() != bands {
        return Err(AnalysisError::LengthMismatch {
            expected: bands,
            found: x.len(),
        });
    }
    let k = library.len();
    let e = DMatrix::from_fn(bands, k, |r, c| library.spectra()[c][r]);
    let xv = DVector::from_column_slice(x);
    let (a, iterations) = nnls(&e, &xv);
    let residual = (&e * &a - &xv).norm();
    Ok(Unmixing {
        abundances: a.iter().copied().collect(),
        residual,
        iterations,
        underdetermined: k > bands,
    })
}
