//! Dense linear algebra over any exact field.

use super::Field;

/// Row-reduced echelon form in place; returns pivot columns.
pub fn rref<F: Field>(m: &mut [Vec<F>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
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
        let inv = m[r][c].inverse().expect("pivot is nonzero");
        for x in m[r].iter_mut() {
            *x = x.times(&inv);
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for k in c..cols {
                    let t = m[r][k].times(&f);
                    m[i][k] = m[i][k].minus(&t);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<F: Field>(m: &[Vec<F>]) -> usize {
    let mut work = m.to_vec();
    rref(&mut work).len()
}

/// Basis of `{v : M v = 0}`; `cols` is needed for an empty `m`.
pub fn nullspace<F: Field>(m: &[Vec<F>], cols: usize, zero: &F) -> Vec<Vec<F>> {
    let mut work = m.to_vec();
    let pivots = rref(&mut work);
    let one = zero.one_like();
    let mut out = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![zero.clone(); cols];
        v[free] = one.clone();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = work[r][free].negated();
        }
        out.push(v);
    }
    out
}

pub fn inverse<F: Field>(m: &[Vec<F>]) -> Option<Vec<Vec<F>>> {
    let n = m.len();
    if n == 0 {
        return Some(Vec::new());
    }
    let zero = m[0][0].zero_like();
    let one = zero.one_like();
    let mut aug: Vec<Vec<F>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { one.clone() } else { zero.clone() }));
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn determinant<F: Field>(m: &[Vec<F>]) -> F {
    let n = m.len();
    let zero = m[0][0].zero_like();
    let mut a = m.to_vec();
    let mut det = zero.one_like();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return zero;
        };
        if p != c {
            a.swap(p, c);
            det = det.negated();
        }
        det = det.times(&a[c][c]);
        let inv = a[c][c].inverse().unwrap();
        for i in (c + 1)..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].times(&inv);
            for k in c..n {
                let t = a[c][k].times(&f);
                a[i][k] = a[i][k].minus(&t);
            }
        }
    }
    det
}

pub fn mat_mul<F: Field>(a: &[Vec<F>], b: &[Vec<F>]) -> Vec<Vec<F>> {
    let zero = a[0][0].zero_like();
    a.iter()
        .map(|row| {
            (0..b[0].len())
                .map(|j| {
                    let mut acc = zero.clone();
                    for (k, x) in row.iter().enumerate() {
                        acc.add_product(x, &b[k][j]);
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// `true` if `v` lies in the row space of `m`.
pub fn in_row_span<F: Field>(m: &[Vec<F>], v: &[F]) -> bool {
    let base = rank(m);
    let mut ext = m.to_vec();
    ext.push(v.to_vec());
    rank(&ext) == base
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, Rational};

    fn m(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
    }

    #[test]
    fn rank_nullspace_inverse() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(rank(&a), 2);
        let ns = nullspace(&a, 3, &Rational::zero());
        assert_eq!(ns.len(), 1);
        for row in &a {
            let dot = row.iter().zip(&ns[0]).fold(Rational::zero(), |s, (x, y)| s + x * y);
            assert!(dot.is_zero());
        }
        let b = m(&[&[2, 1], &[1, 1]]);
        let inv = inverse(&b).unwrap();
        assert_eq!(mat_mul(&b, &inv), m(&[&[1, 0], &[0, 1]]));
        assert_eq!(determinant(&b), int(1));
        assert!(inverse(&m(&[&[1, 2], &[2, 4]])).is_none());
        assert!(in_row_span(&a, &[int(3), int(2), int(5)]));
        assert!(!in_row_span(&a, &[int(0), int(0), int(1)]));
    }
}
