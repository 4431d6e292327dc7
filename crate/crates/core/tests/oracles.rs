//! Cross-checks against oracles that share no machinery with the engine.
//!
//! Hull vertices are re-decided by enumerating convex combinations with
//! a local Gaussian solver, minimizing-term patterns by direct term
//! evaluation, and boundary strata by following explicit sequences to
//! infinity. Values frozen here were computed by hand first.

use std::collections::BTreeSet;
use trop_core::extended::Fan;
use trop_core::rat::{qi, qq, Q};
use trop_core::series::LaurentPolynomial;
use trop_core::trophyper::tropicalize;
use trop_core::valcoef::ValuedCoefficient;

fn tpow(g: i64) -> ValuedCoefficient {
    ValuedCoefficient::term(qi(g), qi(1))
}

fn poly(rank: usize, terms: &[(&[i64], i64)]) -> LaurentPolynomial {
    LaurentPolynomial::from_terms(
        rank,
        terms.iter().map(|&(u, g)| (u.to_vec(), tpow(g))).collect(),
    )
    .unwrap()
}

/// Solves A x = b when the columns are linearly independent; None when
/// the system is inconsistent or underdetermined.
fn solve_unique(mut a: Vec<Vec<Q>>, mut b: Vec<Q>) -> Option<Vec<Q>> {
    let m = a.len();
    let k = if m == 0 { 0 } else { a[0].len() };
    let mut pivot_row_of_col = vec![usize::MAX; k];
    let mut row = 0;
    for col in 0..k {
        let Some(p) = (row..m).find(|&r| a[r][col] != qi(0)) else {
            return None;
        };
        a.swap(row, p);
        b.swap(row, p);
        let inv = a[row][col].clone();
        for c in 0..k {
            a[row][c] = &a[row][c] / &inv;
        }
        b[row] = &b[row] / &inv;
        for r in 0..m {
            if r != row && a[r][col] != qi(0) {
                let f = a[r][col].clone();
                for c in 0..k {
                    let s = &a[row][c] * &f;
                    a[r][c] -= s;
                }
                let s = &b[row] * &f;
                b[r] -= s;
            }
        }
        pivot_row_of_col[col] = row;
        row += 1;
    }
    for r in row..m {
        if b[r] != qi(0) {
            return None;
        }
    }
    Some(pivot_row_of_col.iter().map(|&r| b[r].clone()).collect())
}

fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

/// A lifted point is a lower-hull vertex iff no convex combination of
/// the other points matches its exponent at equal or smaller height. A
/// minimizing combination can be taken over at most r + 1 affinely
/// independent points, so enumerating such subsets decides exactly.
fn oracle_hull_vertices(points: &[(Vec<i64>, Q)]) -> BTreeSet<Vec<i64>> {
    let r = points[0].0.len();
    let mut vertices = BTreeSet::new();
    for (i, (u, h)) in points.iter().enumerate() {
        let others: Vec<&(Vec<i64>, Q)> = points
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, p)| p)
            .collect();
        let mut dominated = false;
        'subsets: for size in 1..=(r + 1).min(others.len()) {
            for subset in subsets_of_size(others.len(), size) {
                let mut a = vec![vec![qi(0); size]; r + 1];
                let mut b = Vec::with_capacity(r + 1);
                for (col, &j) in subset.iter().enumerate() {
                    for (rowi, &coord) in others[j].0.iter().enumerate() {
                        a[rowi][col] = qi(coord);
                    }
                    a[r][col] = qi(1);
                }
                for &coord in u.iter() {
                    b.push(qi(coord));
                }
                b.push(qi(1));
                let Some(lambda) = solve_unique(a, b) else {
                    continue;
                };
                if lambda.iter().any(|l| l < &qi(0)) {
                    continue;
                }
                let lifted = subset
                    .iter()
                    .zip(&lambda)
                    .fold(qi(0), |acc, (&j, l)| acc + l * &others[j].1);
                if lifted <= *h {
                    dominated = true;
                    break 'subsets;
                }
            }
        }
        if !dominated {
            vertices.insert(u.clone());
        }
    }
    vertices
}

fn engine_hull_vertices(f: &LaurentPolynomial) -> BTreeSet<Vec<i64>> {
    tropicalize(f)
        .unwrap()
        .relevant_support()
        .unwrap()
        .into_iter()
        .collect()
}

fn lifted_points(f: &LaurentPolynomial) -> Vec<(Vec<i64>, Q)> {
    let trop = tropicalize(f).unwrap();
    trop.terms()
        .iter()
        .map(|t| (t.exponent.clone(), t.valuation.clone()))
        .collect()
}

#[test]
fn hull_oracle_drops_a_dominated_middle_term() {
    // 1 + t x + x^2: the middle lift (1,1) sits above the chord at 0.
    let f = poly(1, &[(&[0], 0), (&[1], 1), (&[2], 0)]);
    let expected: BTreeSet<Vec<i64>> = [vec![0], vec![2]].into_iter().collect();
    assert_eq!(oracle_hull_vertices(&lifted_points(&f)), expected);
    assert_eq!(engine_hull_vertices(&f), expected);
}

#[test]
fn hull_oracle_keeps_a_strictly_lower_middle_term() {
    let f = poly(1, &[(&[0], 0), (&[1], -1), (&[2], 0)]);
    let expected: BTreeSet<Vec<i64>> = [vec![0], vec![1], vec![2]].into_iter().collect();
    assert_eq!(oracle_hull_vertices(&lifted_points(&f)), expected);
    assert_eq!(engine_hull_vertices(&f), expected);
}

#[test]
fn hull_oracle_on_the_unit_square_lift() {
    let f = poly(2, &[(&[0, 0], 0), (&[1, 0], 0), (&[0, 1], 0), (&[1, 1], 1)]);
    let oracle = oracle_hull_vertices(&lifted_points(&f));
    assert_eq!(oracle.len(), 4, "box corners always survive");
    assert_eq!(engine_hull_vertices(&f), oracle);
}

#[test]
fn hull_oracle_rejects_positivity_without_convexity() {
    // Heights from i^2 + j^2 + 3ij: positive on the orthant, yet (1,1)
    // lifts to 5, above the chord between (2,0) and (0,2) at height 4.
    let f = poly(2, &[(&[2, 0], 4), (&[1, 1], 5), (&[0, 2], 4)]);
    let expected: BTreeSet<Vec<i64>> = [vec![2, 0], vec![0, 2]].into_iter().collect();
    assert_eq!(oracle_hull_vertices(&lifted_points(&f)), expected);
    assert_eq!(engine_hull_vertices(&f), expected);
}

#[test]
fn hull_oracle_confirms_strict_convexity_keeps_every_point() {
    // Heights i^2 + j^2 + ij - i - j on [0, s]^2 for s = 1, 2, 3.
    for s in 1..=3i64 {
        let mut terms = Vec::new();
        for i in 0..=s {
            for j in 0..=s {
                terms.push((vec![i, j], tpow(i * i + j * j + i * j - i - j)));
            }
        }
        let f = LaurentPolynomial::from_terms(2, terms).unwrap();
        let oracle = oracle_hull_vertices(&lifted_points(&f));
        assert_eq!(oracle.len() as i64, (s + 1) * (s + 1));
        assert_eq!(engine_hull_vertices(&f), oracle);
    }
}

/// The smallest cell containing a point must carry exactly the terms
/// that minimize there; checked on a rational grid with direct argmin.
#[test]
fn envelope_patterns_match_direct_argmin_on_a_grid() {
    let f = poly(2, &[(&[0, 0], 0), (&[1, 0], 0), (&[0, 1], 0), (&[1, 1], 1)]);
    let trop = tropicalize(&f).unwrap();
    let (complex, regions) = trop.domain_complex().unwrap();
    let pattern_of_cell: std::collections::BTreeMap<usize, Vec<usize>> = regions
        .iter()
        .map(|c| (c.cell_index, c.pattern.clone()))
        .collect();
    let mut checked = 0;
    for num_x in -12..=8i64 {
        for num_y in -12..=8i64 {
            let w = vec![qq(num_x, 4), qq(num_y, 4)];
            let direct: Vec<usize> = {
                let values: Vec<Q> = trop
                    .terms()
                    .iter()
                    .map(|t| {
                        &t.valuation
                            + t.exponent
                                .iter()
                                .zip(&w)
                                .fold(qi(0), |acc, (&e, wi)| acc + qi(e) * wi)
                    })
                    .collect();
                let min = values.iter().min().unwrap().clone();
                (0..values.len()).filter(|&i| values[i] == min).collect()
            };
            let cell = complex.find_cell(&w).expect("regions cover the plane");
            assert_eq!(
                pattern_of_cell[&cell], direct,
                "at w = ({num_x}/4, {num_y}/4)"
            );
            checked += 1;
        }
    }
    assert_eq!(checked, 21 * 21);
}

/// Follows each unbounded direction of the tropical line to infinity by
/// hand and compares the landing strata with the computed closure.
#[test]
fn sequence_limits_agree_with_the_closure_into_the_complete_fan() {
    let line = poly(2, &[(&[0, 0], 0), (&[1, 0], 0), (&[0, 1], 0)]);
    let curve = tropicalize(&line).unwrap().tropical_hypersurface().unwrap();
    let fan = Fan::from_generators(
        2,
        &[
            vec![vec![1, 0], vec![0, 1]],
            vec![vec![-1, 0], vec![0, 1]],
            vec![vec![-1, 0], vec![0, -1]],
            vec![vec![1, 0], vec![0, -1]],
        ],
    )
    .unwrap();
    assert_eq!(
        fan.cones().len(),
        9,
        "complete fan: 0-cone, 4 rays, 4 quadrants"
    );

    // Oracle side: the three rays of the line head in directions (1,0),
    // (0,1), (-1,-1). A point w + t d lands, as t grows, in the stratum
    // of the smallest cone containing d, at the coordinates of w that the
    // cone's span does not swallow.
    let rays: [(Vec<Q>, Vec<i64>); 3] = [
        (vec![qi(0), qi(0)], vec![1, 0]),
        (vec![qi(0), qi(0)], vec![0, 1]),
        (vec![qi(0), qi(0)], vec![-1, -1]),
    ];
    let ext = fan.extended_closure(&curve).unwrap();
    assert_eq!(ext.dense_stratum(), Some(0));
    let mut expected_boundary = 0;
    for (base, d) in &rays {
        let dq: Vec<Q> = d.iter().map(|&x| qi(x)).collect();
        // Smallest cone containing the direction.
        let cone = (0..fan.cones().len())
            .filter(|&i| fan.cones()[i].contains(&dq))
            .min_by_key(|&i| fan.cone_dim(i))
            .unwrap();
        let rows = fan.stratum_projection(cone);
        let limit: Vec<Q> = rows
            .iter()
            .map(|row| {
                row.iter()
                    .zip(base)
                    .fold(qi(0), |acc, (&a, b)| acc + qi(a) * b)
            })
            .collect();
        let comp = ext
            .components()
            .iter()
            .find(|c| c.cone == cone)
            .expect("closure reaches the stratum the sequence reaches");
        assert!(comp.complex.support_contains(&limit));
        assert_eq!(comp.complex.cells().len(), 1, "one boundary point each");
        assert_eq!(comp.complex.cells()[0].dimension().unwrap(), 0);
        expected_boundary += 1;
    }
    assert_eq!(expected_boundary, 3);
    // No other strata are met: 1 dense + 3 boundary components.
    let populated = ext
        .components()
        .iter()
        .filter(|c| !c.complex.is_empty())
        .count();
    assert_eq!(populated, 4);
}
