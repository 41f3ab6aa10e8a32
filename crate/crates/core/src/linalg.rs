//! Dense complex linear algebra at desk scale: partially pivoted Gaussian
//! elimination for solves and determinants, generic over [`CScalar`].

use crate::scalar::CScalar;
use crate::{Error, Result};

/// Solve A x = b by Gaussian elimination with partial pivoting.
/// Returns the solution and a crude condition estimate (max/min pivot).
pub fn solve<S: CScalar>(a: &[Vec<S>], b: &[S]) -> Result<(Vec<S>, f64)> {
    let n = a.len();
    if n == 0 {
        return Ok((Vec::new(), 1.0));
    }
    let mut m: Vec<Vec<S>> = a.iter().map(|row| row.clone()).collect();
    let mut rhs = b.to_vec();
    let mut piv_max: f64 = 0.0;
    let mut piv_min = f64::INFINITY;
    for col in 0..n {
        let (pr, pmag) = (col..n)
            .map(|r| (r, m[r][col].mag()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        if pmag == 0.0 {
            return Err(Error::Numerical("singular linear system".into()));
        }
        piv_max = piv_max.max(pmag);
        piv_min = piv_min.min(pmag);
        m.swap(col, pr);
        rhs.swap(col, pr);
        let pivot = m[col][col];
        for r in col + 1..n {
            let factor = m[r][col] / pivot;
            for c in col..n {
                let v = m[col][c];
                m[r][c] = m[r][c] - factor * v;
            }
            let v = rhs[col];
            rhs[r] = rhs[r] - factor * v;
        }
    }
    let mut x = vec![S::zero(); n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for c in row + 1..n {
            acc = acc - m[row][c] * x[c];
        }
        x[row] = acc / m[row][row];
    }
    Ok((x, piv_max / piv_min))
}

/// Determinant by partially pivoted elimination.
/// Returns the value and the pivot ratio (cancellation indicator).
pub fn det<S: CScalar>(a: &[Vec<S>]) -> Result<(S, f64)> {
    let n = a.len();
    if n == 0 {
        return Ok((S::one(), 1.0));
    }
    let mut m: Vec<Vec<S>> = a.iter().map(|row| row.clone()).collect();
    let mut sign = S::one();
    let mut piv_max: f64 = 0.0;
    let mut piv_min = f64::INFINITY;
    for col in 0..n {
        let (pr, pmag) = (col..n)
            .map(|r| (r, m[r][col].mag()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        if pmag == 0.0 {
            return Ok((S::zero(), f64::INFINITY));
        }
        piv_max = piv_max.max(pmag);
        piv_min = piv_min.min(pmag);
        if pr != col {
            m.swap(col, pr);
            sign = -sign;
        }
        let pivot = m[col][col];
        for r in col + 1..n {
            let factor = m[r][col] / pivot;
            for c in col..n {
                let v = m[col][c];
                m[r][c] = m[r][c] - factor * v;
            }
        }
    }
    let mut d = sign;
    for i in 0..n {
        d = d * m[i][i];
    }
    Ok((d, piv_max / piv_min))
}
