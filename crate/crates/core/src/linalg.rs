//! Small dense exact linear algebra over the rationals: row reduction,
//! rank, nullspaces, span membership. Deterministic pivoting (leftmost
//! column, first nonzero row) so every echelon form is canonical.

use crate::rational::Rational;
use num_traits::Zero;

pub type Vector = Vec<Rational>;
pub type Matrix = Vec<Vector>;

pub fn zeros(rows: usize, cols: usize) -> Matrix {
    vec![vec![Rational::zero(); cols]; rows]
}

pub fn identity(n: usize) -> Matrix {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Rational::from_integer(1.into());
    }
    m
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let rows = a.len();
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    let mut out = zeros(rows, cols);
    for i in 0..rows {
        for k in 0..inner {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..cols {
                if !b[k][j].is_zero() {
                    let prod = &a[i][k] * &b[k][j];
                    out[i][j] = &out[i][j] + &prod;
                }
            }
        }
    }
    out
}

pub fn mat_sub(a: &Matrix, b: &Matrix) -> Matrix {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x - y).collect())
        .collect()
}

pub fn mat_is_zero(a: &Matrix) -> bool {
    a.iter().all(|row| row.iter().all(|x| x.is_zero()))
}

/// Reduced row echelon form, in place. Returns the pivot columns.
pub fn rref(m: &mut Matrix) -> Vec<usize> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let delta = &f * &m[r][j];
                    m[i][j] = &m[i][j] - &delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &Matrix) -> usize {
    let mut copy = m.clone();
    rref(&mut copy).len()
}

/// Basis of `{x : m x = 0}`, echelonized over the free columns.
pub fn nullspace(m: &Matrix) -> Vec<Vector> {
    let cols = if m.is_empty() { 0 } else { m[0].len() };
    let mut red = m.clone();
    let pivots = rref(&mut red);
    let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![Rational::zero(); cols];
        v[free] = Rational::from_integer(1.into());
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -red[row][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Solves `basis^T λ = target` treating `basis` as row vectors; `None`
/// when `target` is outside the span.
pub fn express_in_span(basis: &[Vector], target: &Vector) -> Option<Vector> {
    let n = target.len();
    let k = basis.len();
    let mut aug = zeros(n, k + 1);
    for (j, b) in basis.iter().enumerate() {
        for i in 0..n {
            aug[i][j] = b[i].clone();
        }
    }
    for i in 0..n {
        aug[i][k] = target[i].clone();
    }
    let pivots = rref(&mut aug);
    if pivots.contains(&k) {
        return None;
    }
    let mut sol = vec![Rational::zero(); k];
    for (row, &pc) in pivots.iter().enumerate() {
        sol[pc] = aug[row][k].clone();
    }
    Some(sol)
}
