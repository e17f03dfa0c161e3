//! Dense exact linear algebra over Q for small systems.

use num_traits::{One, Zero};

use crate::series::rational::Rational;

pub type Matrix = Vec<Vec<Rational>>;

pub fn identity(size: usize) -> Matrix {
    (0..size)
        .map(|i| {
            (0..size)
                .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect()
}

pub fn mat_mul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Matrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut s = Rational::zero();
                    for (k, x) in row.iter().enumerate().take(inner) {
                        if !x.is_zero() {
                            s += x * &b[k][j];
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &[Vec<Rational>], v: &[Rational]) -> Vec<Rational> {
    a.iter()
        .map(|row| row.iter().zip(v).fold(Rational::zero(), |acc, (x, y)| acc + x * y))
        .collect()
}

/// Gauss–Jordan inverse; `None` when singular.
pub fn inverse(m: &[Vec<Rational>]) -> Option<Matrix> {
    let size = m.len();
    let mut aug: Matrix = m
        .iter()
        .zip(identity(size))
        .map(|(row, id)| {
            assert_eq!(row.len(), size, "inverse needs a square matrix");
            row.iter().cloned().chain(id).collect()
        })
        .collect();
    for col in 0..size {
        let pivot = (col..size).find(|&r| !aug[r][col].is_zero())?;
        aug.swap(col, pivot);
        let inv = aug[col][col].recip();
        for x in aug[col].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = aug[col].clone();
        for (r, row) in aug.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                *x -= &f * p;
            }
        }
    }
    Some(aug.into_iter().map(|row| row[size..].to_vec()).collect())
}

/// Rank by row reduction.
pub fn rank(m: &[Vec<Rational>]) -> usize {
    let mut rows: Matrix = m.to_vec();
    let cols = rows.first().map_or(0, Vec::len);
    reduce_limited(&mut rows, cols).len()
}

#[derive(Clone, Debug, PartialEq)]
pub enum Solution {
    Unique(Vec<Rational>),
    /// Consistent but rank-deficient; lists the unknowns left free.
    Underdetermined { rank: usize, free: Vec<usize> },
    /// Some equation (index into the input) cannot be satisfied.
    Inconsistent { equation: usize },
}

/// Solves `a x = b` exactly, classifying the outcome.
pub fn solve(a: &[Vec<Rational>], b: &[Rational], unknowns: usize) -> Solution {
    assert_eq!(a.len(), b.len());
    // Columns: the unknowns, then b, then one tag per equation so that an
    // inconsistent row can be traced back to an input equation.
    let eqs = a.len();
    let mut tagged: Matrix = a
        .iter()
        .zip(b)
        .enumerate()
        .map(|(i, (row, rhs))| {
            assert_eq!(row.len(), unknowns);
            let mut r = row.clone();
            r.push(rhs.clone());
            r.extend((0..eqs).map(|q| if q == i { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    let pivots = reduce_limited(&mut tagged, unknowns + 1);
    if let Some(pos) = pivots.iter().position(|&c| c == unknowns) {
        let witness = tagged[pos][unknowns + 1..]
            .iter()
            .rposition(|x| !x.is_zero())
            .unwrap_or(0);
        return Solution::Inconsistent { equation: witness };
    }
    if pivots.len() < unknowns {
        let free = (0..unknowns).filter(|c| !pivots.contains(c)).collect();
        return Solution::Underdetermined {
            rank: pivots.len(),
            free,
        };
    }
    let mut x = vec![Rational::zero(); unknowns];
    for (row, &c) in pivots.iter().enumerate() {
        x[c] = tagged[row][unknowns].clone();
    }
    Solution::Unique(x)
}

/// Row reduction that only pivots on the first `limit` columns but applies
/// the operations to every column.
fn reduce_limited(rows: &mut Matrix, limit: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..limit {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rational::{int, rat};

    fn m(rows: &[&[i64]]) -> Matrix {
        rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
    }

    #[test]
    fn inverse_round_trip() {
        let a = m(&[&[2, 1, 0], &[0, 3, 1], &[1, 0, 1]]);
        let inv = inverse(&a).unwrap();
        assert_eq!(mat_mul(&a, &inv), identity(3));
        assert!(inverse(&m(&[&[1, 2], &[2, 4]])).is_none());
    }

    #[test]
    fn ranks() {
        assert_eq!(rank(&m(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rank(&m(&[&[1, 2, 3], &[0, 1, 1], &[1, 3, 4]])), 2);
        assert_eq!(rank(&identity(4)), 4);
    }

    #[test]
    fn solve_classifies() {
        let a = m(&[&[1, 1], &[1, -1], &[2, 0]]);
        assert_eq!(
            solve(&a, &[int(3), int(1), int(4)], 2),
            Solution::Unique(vec![int(2), int(1)])
        );
        assert_eq!(
            solve(&a, &[int(3), int(1), int(5)], 2),
            Solution::Inconsistent { equation: 2 }
        );
        let b = m(&[&[1, 1], &[2, 2]]);
        assert_eq!(
            solve(&b, &[int(1), int(2)], 2),
            Solution::Underdetermined { rank: 1, free: vec![1] }
        );
        assert_eq!(
            solve(&m(&[&[3]]), &[int(1)], 1),
            Solution::Unique(vec![rat(1, 3)])
        );
    }
}
