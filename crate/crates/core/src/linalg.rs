//! Exact linear algebra over the rationals and over the integer lattice.
//!
//! Matrices are dense row-major `Vec<Vec<_>>`. Everything here is
//! deterministic: reduced echelon forms pick pivots left to right and the
//! Hermite form fixes a unique basis for any integer lattice, so identical
//! inputs always produce byte-identical downstream serializations.

use crate::rat::Q;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Reduces `rows` in place to reduced row echelon form and returns the
/// pivot column indices. Zero rows are removed.
pub fn rref(rows: &mut Vec<Vec<Q>>) -> Vec<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut pivot_row = 0;
    for col in 0..ncols {
        let Some(r) = (pivot_row..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(pivot_row, r);
        let inv = rows[pivot_row][col].recip();
        for x in rows[pivot_row].iter_mut() {
            *x *= &inv;
        }
        for r2 in 0..rows.len() {
            if r2 != pivot_row && !rows[r2][col].is_zero() {
                let factor = rows[r2][col].clone();
                for c in 0..ncols {
                    let sub = &factor * &rows[pivot_row][c];
                    rows[r2][c] -= sub;
                }
            }
        }
        pivots.push(col);
        pivot_row += 1;
        if pivot_row == rows.len() {
            break;
        }
    }
    rows.truncate(pivot_row);
    pivots
}

pub fn rank_q(rows: &[Vec<Q>]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m).len()
}

/// Basis of the right kernel {x : A x = 0}, one vector per free column.
pub fn kernel_q(rows: &[Vec<Q>], ncols: usize) -> Vec<Vec<Q>> {
    let mut m: Vec<Vec<Q>> = rows.iter().filter(|r| !r.is_empty()).cloned().collect();
    let pivots = rref(&mut m);
    let mut basis = Vec::new();
    for free in 0..ncols {
        if pivots.contains(&free) {
            continue;
        }
        let mut v = vec![Q::zero(); ncols];
        v[free] = Q::one();
        for (r, &p) in pivots.iter().enumerate() {
            v[p] = -m[r][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// One solution of A x = b with free variables set to 0, or None if the
/// system is inconsistent.
pub fn solve_q(rows: &[Vec<Q>], rhs: &[Q]) -> Option<Vec<Q>> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut aug: Vec<Vec<Q>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut row = r.clone();
            row.push(b.clone());
            row
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.contains(&ncols) {
        return None;
    }
    let mut x = vec![Q::zero(); ncols];
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = aug[r][ncols].clone();
    }
    Some(x)
}

/// Clears denominators and divides by the content, giving the primitive
/// integer vector spanning the same ray. Sign is preserved.
pub fn primitive(v: &[Q]) -> Vec<BigInt> {
    let mut lcm = BigInt::one();
    for x in v {
        lcm = lcm.lcm(x.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let mut gcd = BigInt::zero();
    for n in &ints {
        gcd = gcd.gcd(n);
    }
    if gcd.is_zero() {
        return ints;
    }
    ints.into_iter().map(|n| n / &gcd).collect()
}

pub fn primitive_q(v: &[Q]) -> Vec<Q> {
    primitive(v).into_iter().map(Q::from_integer).collect()
}

fn big_to_i64(v: Vec<Vec<BigInt>>) -> Vec<Vec<i64>> {
    v.into_iter()
        .map(|row| {
            row.into_iter()
                .map(|n| i64::try_from(&n).expect("lattice entry exceeds i64"))
                .collect()
        })
        .collect()
}

/// Combines columns `a` and `j` by the unimodular matrix [[x, -beta], [y, alpha]].
fn column_combine(
    cols: &mut [Vec<BigInt>],
    a: usize,
    j: usize,
    x: &BigInt,
    y: &BigInt,
    alpha: &BigInt,
    beta: &BigInt,
) {
    let n = cols[a].len();
    for i in 0..n {
        let pa = x * &cols[a][i] + y * &cols[j][i];
        let pj = alpha * &cols[j][i] - beta * &cols[a][i];
        cols[a][i] = pa;
        cols[j][i] = pj;
    }
}

/// Basis of {x in Z^n : A x = 0} via unimodular column reduction. The
/// kernel of an integer matrix is saturated, so the basis spans it exactly.
pub fn integer_kernel(rows: &[Vec<BigInt>], ncols: usize) -> Vec<Vec<BigInt>> {
    let nrows = rows.len();
    // b[j] is column j of A; v[j] the matching column of the transform.
    let mut b: Vec<Vec<BigInt>> = (0..ncols)
        .map(|j| (0..nrows).map(|i| rows[i][j].clone()).collect())
        .collect();
    let mut v: Vec<Vec<BigInt>> = (0..ncols)
        .map(|j| {
            let mut col = vec![BigInt::zero(); ncols];
            col[j] = BigInt::one();
            col
        })
        .collect();
    let mut used = 0;
    for r in 0..nrows {
        let Some(p) = (used..ncols).find(|&j| !b[j][r].is_zero()) else {
            continue;
        };
        b.swap(used, p);
        v.swap(used, p);
        for j in used + 1..ncols {
            if b[j][r].is_zero() {
                continue;
            }
            let g = b[used][r].extended_gcd(&b[j][r]);
            let alpha = &b[used][r] / &g.gcd;
            let beta = &b[j][r] / &g.gcd;
            column_combine(&mut b, used, j, &g.x, &g.y, &alpha, &beta);
            column_combine(&mut v, used, j, &g.x, &g.y, &alpha, &beta);
        }
        used += 1;
    }
    hnf_rows(v.split_off(used))
}

/// Row-style Hermite normal form: echelon with positive pivots and entries
/// above each pivot reduced into [0, pivot). Canonical basis of the row
/// lattice; zero rows are dropped.
pub fn hnf_rows(mut rows: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivot_row = 0;
    for col in 0..ncols {
        let Some(r) = (pivot_row..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(pivot_row, r);
        for r2 in pivot_row + 1..rows.len() {
            while !rows[r2][col].is_zero() {
                let q = &rows[pivot_row][col] / &rows[r2][col];
                for c in 0..ncols {
                    let sub = &q * &rows[r2][c];
                    rows[pivot_row][c] -= sub;
                }
                rows.swap(pivot_row, r2);
            }
        }
        if rows[pivot_row][col].is_negative() {
            for x in rows[pivot_row].iter_mut() {
                *x = -x.clone();
            }
        }
        for r2 in 0..pivot_row {
            let q = rows[r2][col].div_floor(&rows[pivot_row][col]);
            if !q.is_zero() {
                for c in 0..ncols {
                    let sub = &q * &rows[pivot_row][c];
                    rows[r2][c] -= sub;
                }
            }
        }
        pivot_row += 1;
        if pivot_row == rows.len() {
            break;
        }
    }
    rows.truncate(pivot_row);
    rows
}

fn to_big(vectors: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    vectors
        .iter()
        .map(|v| v.iter().map(|&n| BigInt::from(n)).collect())
        .collect()
}

/// Canonical basis of the saturation of span(vectors) inside Z^n.
pub fn saturation_basis(vectors: &[Vec<i64>], n: usize) -> Vec<Vec<i64>> {
    let rows: Vec<Vec<Q>> = vectors
        .iter()
        .map(|v| {
            v.iter()
                .map(|&x| Q::from_integer(BigInt::from(x)))
                .collect()
        })
        .collect();
    let complement = kernel_q(&rows, n);
    let comp_int: Vec<Vec<BigInt>> = complement.iter().map(|v| primitive(v)).collect();
    big_to_i64(hnf_rows(integer_kernel(&comp_int, n)))
}

/// Canonical basis of {m in Z^n : <m, v> = 0 for all input v}.
pub fn orthogonal_lattice(vectors: &[Vec<i64>], n: usize) -> Vec<Vec<i64>> {
    big_to_i64(hnf_rows(integer_kernel(&to_big(vectors), n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{qi, qq, qvec};

    #[test]
    fn rref_and_rank() {
        let mut m = vec![qvec(&[1, 2, 3]), qvec(&[2, 4, 6]), qvec(&[0, 1, 1])];
        let pivots = rref(&mut m);
        assert_eq!(pivots, vec![0, 1]);
        assert_eq!(m.len(), 2);
        assert_eq!(m[0], qvec(&[1, 0, 1]));
        assert_eq!(m[1], qvec(&[0, 1, 1]));
        assert_eq!(rank_q(&[qvec(&[1, 1]), qvec(&[1, -1])]), 2);
        assert_eq!(rank_q(&[]), 0);
    }

    #[test]
    fn kernel_of_rank_one_map() {
        let k = kernel_q(&[qvec(&[1, 1, 0])], 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!((v[0].clone() + v[1].clone()).is_zero() || v[2] == qi(1));
        }
        assert_eq!(kernel_q(&[], 2).len(), 2);
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let a = vec![qvec(&[1, 1]), qvec(&[1, -1])];
        let x = solve_q(&a, &qvec(&[3, 1])).unwrap();
        assert_eq!(x, qvec(&[2, 1]));
        let b = vec![qvec(&[1, 1]), qvec(&[2, 2])];
        assert!(solve_q(&b, &qvec(&[1, 3])).is_none());
        assert!(solve_q(&b, &qvec(&[1, 2])).is_some());
    }

    #[test]
    fn primitive_scaling() {
        let v = vec![qq(1, 2), qq(-3, 4), qi(0)];
        assert_eq!(
            primitive(&v),
            vec![BigInt::from(2), BigInt::from(-3), BigInt::from(0)]
        );
        assert_eq!(
            primitive(&qvec(&[4, 6])),
            vec![BigInt::from(2), BigInt::from(3)]
        );
        assert_eq!(
            primitive(&qvec(&[0, 0])),
            vec![BigInt::from(0), BigInt::from(0)]
        );
    }

    #[test]
    fn hermite_form_is_canonical() {
        let rows = vec![
            vec![BigInt::from(2), BigInt::from(4)],
            vec![BigInt::from(1), BigInt::from(3)],
        ];
        let h = hnf_rows(rows);
        assert_eq!(
            h,
            vec![
                vec![BigInt::from(1), BigInt::from(1)],
                vec![BigInt::from(0), BigInt::from(2)],
            ]
        );
    }

    #[test]
    fn saturation_examples() {
        assert_eq!(saturation_basis(&[vec![2, 0]], 2), vec![vec![1, 0]]);
        assert_eq!(saturation_basis(&[], 2), Vec::<Vec<i64>>::new());
        let b = saturation_basis(&[vec![1, 1, 0], vec![0, 2, 2]], 3);
        assert_eq!(b.len(), 2);
        assert!(b.contains(&vec![0, 1, 1]));
        // Every basis vector is orthogonal to the complement direction (1,-1,1).
        for v in &b {
            assert_eq!(v[0] - v[1] + v[2], 0);
        }
    }

    #[test]
    fn orthogonal_lattice_examples() {
        assert_eq!(orthogonal_lattice(&[vec![1, 1]], 2), vec![vec![1, -1]]);
        assert_eq!(orthogonal_lattice(&[], 2), vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(
            orthogonal_lattice(&[vec![1, 0], vec![0, 1]], 2),
            Vec::<Vec<i64>>::new()
        );
        assert_eq!(orthogonal_lattice(&[vec![2, 4]], 2), vec![vec![2, -1]]);
    }

    #[test]
    fn integer_kernel_saturated() {
        // Kernel of [2 2] over Z is generated by (1,-1), not (2,-2).
        let k = integer_kernel(&[vec![BigInt::from(2), BigInt::from(2)]], 2);
        assert_eq!(k, vec![vec![BigInt::from(1), BigInt::from(-1)]]);
    }
}
