//! Dense linear algebra over a finite field. Matrices are row lists of element
//! codes; all arithmetic goes through the tower, so entries from any subfield
//! may be mixed.

use crate::error::{Error, Result};
use crate::gf::FieldTower;

pub type Matrix = Vec<Vec<u32>>;

/// Reduces `m` in place to reduced row-echelon form, dropping zero rows.
/// Returns the pivot columns.
pub fn rref(f: &FieldTower, m: &mut Matrix) -> Vec<usize> {
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == m.len() {
            break;
        }
        let Some(sel) = (row..m.len()).find(|&i| m[i][col] != 0) else {
            continue;
        };
        m.swap(row, sel);
        let inv = f.inv(m[row][col]);
        if inv != 1 {
            for x in m[row][col..].iter_mut() {
                *x = f.mul(*x, inv);
            }
        }
        let pivot_row = m[row].clone();
        for (i, r) in m.iter_mut().enumerate() {
            if i == row || r[col] == 0 {
                continue;
            }
            let c = r[col];
            for (x, &y) in r[col..].iter_mut().zip(&pivot_row[col..]) {
                if y != 0 {
                    *x = f.sub(*x, f.mul(c, y));
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    m.truncate(row);
    pivots
}

pub fn rank(f: &FieldTower, m: &[Vec<u32>]) -> usize {
    let mut m = m.to_vec();
    rref(f, &mut m).len()
}

/// Basis of `{x : M x^T = 0}`, i.e. the vectors orthogonal to every row of `m`
/// under the standard dot product. `n` is the number of columns.
pub fn null_space(f: &FieldTower, m: &[Vec<u32>], n: usize) -> Matrix {
    let mut r = m.to_vec();
    let pivots = rref(f, &mut r);
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![0u32; n];
            v[fc] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(r[i][fc]);
            }
            v
        })
        .collect()
}

/// Some `x` with `A x = b`, free variables set to zero.
pub fn solve(f: &FieldTower, a: &[Vec<u32>], b: &[u32]) -> Option<Vec<u32>> {
    let cols = a.first().map_or(0, |r| r.len());
    let mut aug: Matrix = a
        .iter()
        .zip(b)
        .map(|(r, &y)| {
            let mut row = r.clone();
            row.push(y);
            row
        })
        .collect();
    let pivots = rref(f, &mut aug);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![0u32; cols];
    for (i, &p) in pivots.iter().enumerate() {
        x[p] = aug[i][cols];
    }
    Some(x)
}

/// Coefficients `c` with `c · basis = v` (row combination), if any.
pub fn combination(f: &FieldTower, basis: &[Vec<u32>], v: &[u32]) -> Option<Vec<u32>> {
    solve(f, &transpose(basis), v)
}

pub fn transpose(m: &[Vec<u32>]) -> Matrix {
    let cols = m.first().map_or(0, |r| r.len());
    (0..cols).map(|j| m.iter().map(|r| r[j]).collect()).collect()
}

pub fn mat_mul(f: &FieldTower, a: &[Vec<u32>], b: &[Vec<u32>]) -> Matrix {
    a.iter().map(|row| vec_mat(f, row, b)).collect()
}

/// Row vector times matrix.
pub fn vec_mat(f: &FieldTower, v: &[u32], m: &[Vec<u32>]) -> Vec<u32> {
    let cols = m.first().map_or(0, |r| r.len());
    let mut out = vec![0u32; cols];
    for (&c, row) in v.iter().zip(m) {
        if c == 0 {
            continue;
        }
        for (o, &x) in out.iter_mut().zip(row) {
            if x != 0 {
                *o = f.add(*o, f.mul(c, x));
            }
        }
    }
    out
}

pub fn dot(f: &FieldTower, a: &[u32], b: &[u32]) -> u32 {
    a.iter()
        .zip(b)
        .fold(0, |acc, (&x, &y)| f.add(acc, f.mul(x, y)))
}

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| u32::from(i == j)).collect())
        .collect()
}

pub fn inverse(f: &FieldTower, m: &[Vec<u32>]) -> Result<Matrix> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: m.first().map_or(0, |r| r.len()),
        });
    }
    let mut aug: Matrix = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| u32::from(i == j)));
            row
        })
        .collect();
    let pivots = rref(f, &mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return Err(Error::Singular);
    }
    Ok(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn determinant(f: &FieldTower, m: &[Vec<u32>]) -> u32 {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = 1;
    for col in 0..n {
        let Some(sel) = (col..n).find(|&i| a[i][col] != 0) else {
            return 0;
        };
        if sel != col {
            a.swap(sel, col);
            det = f.neg(det);
        }
        det = f.mul(det, a[col][col]);
        let inv = f.inv(a[col][col]);
        for i in col + 1..n {
            if a[i][col] == 0 {
                continue;
            }
            let c = f.mul(a[i][col], inv);
            for j in col..n {
                let v = f.mul(c, a[col][j]);
                a[i][j] = f.sub(a[i][j], v);
            }
        }
    }
    det
}

/// Applies `x -> x^{p^s}` to every entry.
pub fn frob_matrix(f: &FieldTower, m: &[Vec<u32>], s: u32) -> Matrix {
    m.iter()
        .map(|r| r.iter().map(|&x| f.frob(x, s)).collect())
        .collect()
}

pub fn scale(f: &FieldTower, v: &[u32], c: u32) -> Vec<u32> {
    v.iter().map(|&x| f.mul(x, c)).collect()
}

pub fn add_vec(f: &FieldTower, a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(&x, &y)| f.add(x, y)).collect()
}

/// Scales a nonzero vector so that its leftmost nonzero entry is 1.
pub fn normalize(f: &FieldTower, v: &mut [u32]) -> Result<()> {
    let lead = v.iter().copied().find(|&x| x != 0).ok_or(Error::ZeroVector)?;
    if lead != 1 {
        let inv = f.inv(lead);
        for x in v.iter_mut() {
            *x = f.mul(*x, inv);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_round_trip() {
        let f = FieldTower::new(3, 2, None).unwrap();
        let m = vec![vec![1, 2, 0], vec![0, 1, 5], vec![7, 0, 1]];
        if determinant(&f, &m) != 0 {
            let inv = inverse(&f, &m).unwrap();
            assert_eq!(mat_mul(&f, &m, &inv), identity(3));
        }
        let sing = vec![vec![1, 2], vec![2, f.mul(2, 2)]];
        assert_eq!(determinant(&f, &sing), 0);
        assert_eq!(inverse(&f, &sing).unwrap_err(), Error::Singular);
    }

    #[test]
    fn null_space_is_orthogonal() {
        let f = FieldTower::new(2, 2, None).unwrap();
        let m = vec![vec![1, 2, 3, 0], vec![0, 1, 1, 1]];
        let ns = null_space(&f, &m, 4);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            for r in &m {
                assert_eq!(dot(&f, v, r), 0);
            }
        }
    }

    #[test]
    fn rref_over_gf2() {
        let f = FieldTower::new(2, 1, None).unwrap();
        let mut m = vec![vec![0, 1, 1], vec![0, 1, 0]];
        let piv = rref(&f, &mut m);
        assert_eq!(piv, vec![1, 2]);
        assert_eq!(m, vec![vec![0, 1, 0], vec![0, 0, 1]]);
    }
}
