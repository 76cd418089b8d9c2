//! Small dense linear algebra over a generic field: reduced echelon forms
//! and nullspaces, used by the ansatz solver and the cyclic-vector
//! construction. The modular guessing kernels have their own specialized
//! elimination.

use crate::field::Field;

/// Reduced row echelon form in place; returns the pivot column of each
/// surviving row.
pub fn rref<F: Field>(f: &F, rows: &mut Vec<Vec<F::Elem>>) -> Vec<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(sel) = (r..rows.len()).find(|&i| !f.is_zero(&rows[i][c])) else {
            continue;
        };
        rows.swap(r, sel);
        let inv = f.inv(&rows[r][c]).unwrap();
        for x in rows[r].iter_mut() {
            *x = f.mul(x, &inv);
        }
        for i in 0..rows.len() {
            if i != r && !f.is_zero(&rows[i][c]) {
                let factor = rows[i][c].clone();
                for j in 0..ncols {
                    let t = f.mul(&factor, &rows[r][j]);
                    rows[i][j] = f.sub(&rows[i][j], &t);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

/// Basis of the right nullspace of the row system, one vector per free
/// column, deterministic order.
pub fn nullspace<F: Field>(f: &F, rows: &[Vec<F::Elem>], ncols: usize) -> Vec<Vec<F::Elem>> {
    let mut work: Vec<Vec<F::Elem>> = rows
        .iter()
        .filter(|r| r.iter().any(|x| !f.is_zero(x)))
        .cloned()
        .collect();
    let pivots = rref(f, &mut work);
    let mut is_pivot = vec![false; ncols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for free in 0..ncols {
        if is_pivot[free] {
            continue;
        }
        let mut v = vec![f.zero(); ncols];
        v[free] = f.one();
        for (row, &p) in work.iter().zip(&pivots) {
            v[p] = f.neg(&row[free]);
        }
        basis.push(v);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Fp;

    #[test]
    fn nullspace_of_rank_one_system() {
        let f = Fp::new(97).unwrap();
        // x + 2y + 3z = 0 twice
        let rows = vec![vec![1, 2, 3], vec![2, 4, 6]];
        let ns = nullspace(&f, &rows, 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            let s = f.0.add(f.0.add(v[0], f.0.mul(2, v[1])), f.0.mul(3, v[2]));
            assert_eq!(s, 0);
        }
    }

    #[test]
    fn full_rank_has_trivial_nullspace() {
        let f = Fp::new(97).unwrap();
        let rows = vec![vec![1, 0], vec![1, 1]];
        assert!(nullspace(&f, &rows, 2).is_empty());
    }
}
