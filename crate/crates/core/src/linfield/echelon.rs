//! Dense Gaussian elimination over an exact field.

use crate::scalar::Field;

/// Reduced row echelon form. Returns the nonzero rows and their pivot columns.
pub fn rref<F: Field>(mut rows: Vec<Vec<F>>, ncols: usize) -> (Vec<Vec<F>>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = F::one() / rows[r][col].clone();
        for x in rows[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                let pivot_row = rows[r].clone();
                for (x, p) in rows[i][col..ncols].iter_mut().zip(&pivot_row[col..ncols]) {
                    *x = x.clone() - p.clone() * f.clone();
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    (rows, pivots)
}

pub fn rank<F: Field>(rows: &[Vec<F>], ncols: usize) -> usize {
    rref(rows.to_vec(), ncols).1.len()
}

/// Basis of `{x : A x = 0}` where `A` has the given rows.
pub fn nullspace<F: Field>(rows: &[Vec<F>], ncols: usize) -> Vec<Vec<F>> {
    let (r, pivots) = rref(rows.to_vec(), ncols);
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut x = vec![F::zero(); ncols];
        x[free] = F::one();
        for (row, &pc) in r.iter().zip(&pivots) {
            x[pc] = -row[free].clone();
        }
        basis.push(x);
    }
    basis
}

/// Solves `sum_i c_i rows[i] = target`; `None` if `target` is outside the row space.
pub fn solve_combination<F: Field>(rows: &[Vec<F>], target: &[F]) -> Option<Vec<F>> {
    let n = target.len();
    let m = rows.len();
    // Columns of the system are the given rows; augment with the target.
    let system: Vec<Vec<F>> = (0..n)
        .map(|j| {
            let mut eq: Vec<F> = rows.iter().map(|r| r[j].clone()).collect();
            eq.push(target[j].clone());
            eq
        })
        .collect();
    let (r, pivots) = rref(system, m + 1);
    if pivots.last() == Some(&m) {
        return None;
    }
    let mut x = vec![F::zero(); m];
    for (row, &pc) in r.iter().zip(&pivots) {
        x[pc] = row[m].clone();
    }
    Some(x)
}
