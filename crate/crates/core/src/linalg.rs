//! Small dense linear algebra over a [`Scalar`]: row reduction and nullspaces.

use crate::scalar::Scalar;

/// Reduced row echelon form in place; returns the pivot columns.
///
/// Floats use partial pivoting and treat entries below `tol` times the
/// largest entry of the matrix as zero; rationals are exact.
pub fn rref<S: Scalar>(m: &mut [Vec<S>], tol: f64) -> Vec<usize> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let scale = m.iter().flatten().map(|x| x.to_f64().abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..cols {
        if r == rows {
            break;
        }
        let best = (r..rows)
            .filter(|&i| !m[i][col].is_negligible(scale, tol))
            .max_by(|&i, &j| m[i][col].to_f64().abs().total_cmp(&m[j][col].to_f64().abs()));
        let Some(p) = best else { continue };
        m.swap(r, p);
        let inv = S::one() / m[r][col].clone();
        for x in m[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for i in 0..rows {
            if i != r && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for k in 0..cols {
                    let sub = f.clone() * m[r][k].clone();
                    m[i][k] = m[i][k].clone() - sub;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    pivots
}


/// A basis of `{x : A x = 0}`.
pub fn nullspace<S: Scalar>(a: &[Vec<S>], cols: usize, tol: f64) -> Vec<Vec<S>> {
    let mut m = a.to_vec();
    let pivots = rref(&mut m, tol);
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut x = vec![S::zero(); cols];
            x[free] = S::one();
            for (row, &pc) in pivots.iter().enumerate() {
                x[pc] = -m[row][free].clone();
            }
            x
        })
        .collect()
}

/// Solves the square system `A x = b` by elimination, `None` if singular.
pub fn solve<S: Scalar>(a: &[Vec<S>], b: &[S], tol: f64) -> Option<Vec<S>> {
    let n = a.len();
    let mut m: Vec<Vec<S>> = a.iter().zip(b).map(|(row, bi)| row.iter().cloned().chain([bi.clone()]).collect()).collect();
    let pivots = rref(&mut m, tol);
    if pivots.len() < n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
        return None;
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

/// `det` of a 3x3 matrix.
pub fn det3<S: Scalar>(m: &[[S; 3]; 3]) -> S {
    let t = |a: usize, b: usize, c: usize| m[0][a].clone() * (m[1][b].clone() * m[2][c].clone() - m[1][c].clone() * m[2][b].clone());
    t(0, 1, 2) - t(1, 0, 2) + t(2, 0, 1)
}

/// Cramer's rule for a 3x3 system; `None` if the determinant is negligible.
pub fn cramer3<S: Scalar>(m: &[[S; 3]; 3], rhs: &[S; 3], tol: f64) -> Option<[S; 3]> {
    let d = det3(m);
    let scale = m.iter().flatten().map(|x| x.to_f64().abs()).fold(0.0, f64::max).powi(3);
    if d.is_negligible(scale, tol) {
        return None;
    }
    let col = |k: usize| {
        let mut mk = m.clone();
        for (row, r) in mk.iter_mut().zip(rhs) {
            row[k] = r.clone();
        }
        det3(&mk) / d.clone()
    };
    Some([col(0), col(1), col(2)])
}
