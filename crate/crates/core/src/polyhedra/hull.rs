//! Lower hulls of lifted lattice points and the dual min-envelope
//! subdivision.
//!
//! For lifted points (u, h(u)) the affine functions w -> h(u) + <w, u>
//! partition R^r by their pointwise argmin. Cells are identified with tie
//! patterns (the argmin index set on the cell's relative interior); the
//! complex is discovered by a breadth-first search that tightens one extra
//! tie at a time starting from the uniquely-minimal regions. Cell
//! H-representations are assembled from the tie data directly, so no
//! LP-based canonicalization is needed per cell.
//!
//! LPs use lazy constraint activation: solve against a small working set,
//! verify against all points, and only pull in violated rows. This keeps
//! the per-call cost low even with many lifted points.

use crate::error::{Error, Result};
use crate::linalg::rank_q;
use crate::par::{par_map, par_map_range};
use crate::polyhedra::complex::PolyhedralComplex;
use crate::polyhedra::lp::{maximize, Lp, LpOutcome};
use crate::polyhedra::polyhedron::{Constraint, Polyhedron};
use crate::rat::{dot_int, Q};
use num_traits::{One, Zero};
use std::collections::{BTreeMap, BTreeSet};

/// A lattice exponent with its lifted height.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedPoint {
    pub point: Vec<i64>,
    pub height: Q,
}

/// Combinatorial summary of the lower convex hull.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LowerHull {
    /// Indices of points that are vertices of the lower hull.
    pub vertices: Vec<usize>,
    /// Maximal tie patterns: vertex sets of the hull's maximal lower faces
    /// (including non-vertex points lying on them).
    pub facets: Vec<Vec<usize>>,
}

/// Links a tie pattern to its cell in the envelope complex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnvelopeCell {
    pub pattern: Vec<usize>,
    pub cell_index: usize,
}

fn validate(points: &[LiftedPoint]) -> Result<usize> {
    let Some(first) = points.first() else {
        return Err(Error::InvalidInput("no lifted points given".into()));
    };
    let r = first.point.len();
    let mut seen = BTreeSet::new();
    for p in points {
        if p.point.len() != r {
            return Err(Error::InvalidInput("inconsistent point dimensions".into()));
        }
        if !seen.insert(p.point.clone()) {
            return Err(Error::InvalidInput(format!(
                "duplicate lifted point {:?}",
                p.point
            )));
        }
    }
    Ok(r)
}

/// h_j + <w, u_j> - h_b - <w, u_b>, the slack of j against base b.
fn slack(points: &[LiftedPoint], j: usize, b: usize, w: &[Q]) -> Q {
    &points[j].height - &points[b].height + dot_int(w, &points[j].point)
        - dot_int(w, &points[b].point)
}

/// Constraint row <w, u_b - u_j> <= h_j - h_b expressing slack_j >= 0.
fn tie_row(points: &[LiftedPoint], b: usize, j: usize) -> (Vec<Q>, Q) {
    let a: Vec<Q> = points[b]
        .point
        .iter()
        .zip(&points[j].point)
        .map(|(&x, &y)| crate::rat::qi(x - y))
        .collect();
    let b_off = &points[j].height - &points[b].height;
    (a, b_off)
}

enum PatternSolve {
    /// No point of R^r attains its minimum on the whole starting pattern.
    Infeasible,
    /// The closed pattern of the cell plus a relative interior point.
    Cell { pattern: Vec<usize>, point: Vec<Q> },
}

/// Resolves the region {w : argmin(w) contains start} into its true cell:
/// ties forced everywhere on the region are absorbed into the pattern
/// until a point with strictly positive slack on the complement exists.
fn solve_pattern(points: &[LiftedPoint], start: &[usize]) -> PatternSolve {
    let n = points.len();
    let r = points[0].point.len();
    let mut pattern: Vec<usize> = start.to_vec();
    loop {
        let b = pattern[0];
        let in_pattern: Vec<bool> = {
            let mut mask = vec![false; n];
            for &k in &pattern {
                mask[k] = true;
            }
            mask
        };
        let complement: Vec<usize> = (0..n).filter(|&j| !in_pattern[j]).collect();
        let eq_rows: Vec<(Vec<Q>, Q)> = pattern[1..]
            .iter()
            .map(|&j| tie_row(points, b, j))
            .collect();
        // Working set: nearest complement points first.
        let mut order = complement.clone();
        order.sort_by_key(|&j| {
            let d: i64 = points[j]
                .point
                .iter()
                .zip(&points[b].point)
                .map(|(&x, &y)| (x - y).abs())
                .sum();
            (d, j)
        });
        let mut working: Vec<usize> = order.iter().copied().take(3 * r + 4).collect();
        let mut in_working = vec![false; n];
        for &j in &working {
            in_working[j] = true;
        }
        let solved = loop {
            let mut lp = Lp::new(r + 1);
            for (a, off) in &eq_rows {
                let mut row = a.clone();
                row.push(Q::zero());
                lp.eq(row, off.clone());
            }
            for &j in &working {
                let (a, off) = tie_row(points, b, j);
                let mut row = a;
                row.push(Q::one());
                lp.le(row, off);
            }
            let mut cap = vec![Q::zero(); r];
            cap.push(Q::one());
            lp.le(cap.clone(), Q::one());
            match maximize(&lp, &cap) {
                LpOutcome::Infeasible => return PatternSolve::Infeasible,
                LpOutcome::Unbounded => unreachable!("slack objective is capped"),
                LpOutcome::Optimal { mut point, value } => {
                    if value < Q::zero() {
                        // Even fewer constraints admit no nonnegative slack.
                        return PatternSolve::Infeasible;
                    }
                    point.pop();
                    let violated: Vec<usize> = complement
                        .iter()
                        .copied()
                        .filter(|&j| !in_working[j] && slack(points, j, b, &point) < value)
                        .collect();
                    if violated.is_empty() {
                        break (point, value);
                    }
                    for &j in violated.iter().take(16) {
                        working.push(j);
                        in_working[j] = true;
                    }
                }
            }
        };
        let (w, eps) = solved;
        if eps > Q::zero() {
            return PatternSolve::Cell { pattern, point: w };
        }
        // eps = 0: some complement slack vanishes identically on the
        // region. Absorb exactly those (checked by maximizing the slack
        // over the full region) and try again.
        let mut grew = false;
        for &j in &complement {
            if !slack(points, j, b, &w).is_zero() {
                continue;
            }
            let mut lp = Lp::new(r);
            for (a, off) in &eq_rows {
                lp.eq(a.clone(), off.clone());
            }
            for &i in &complement {
                let (a, off) = tie_row(points, b, i);
                lp.le(a, off);
            }
            let (obj_neg, off) = tie_row(points, b, j);
            let obj: Vec<Q> = obj_neg.iter().map(|x| -x.clone()).collect();
            let identically_tight = match maximize(&lp, &obj) {
                // max slack_j = max <u_j - u_b, w> + (h_j - h_b)
                LpOutcome::Optimal { value, .. } => value + off == Q::zero(),
                LpOutcome::Unbounded => false,
                LpOutcome::Infeasible => unreachable!("region verified nonempty"),
            };
            if identically_tight {
                pattern.push(j);
                grew = true;
            }
        }
        debug_assert!(grew, "zero slack optimum forces an identical tie");
        if !grew {
            return PatternSolve::Infeasible;
        }
        pattern.sort_unstable();
    }
}

/// Dimension of the cell with the given closed tie pattern.
fn pattern_dim(points: &[LiftedPoint], pattern: &[usize]) -> usize {
    let r = points[0].point.len();
    let b = pattern[0];
    let rows: Vec<Vec<Q>> = pattern[1..]
        .iter()
        .map(|&j| tie_row(points, b, j).0)
        .collect();
    r - rank_q(&rows)
}

/// All cells of the envelope subdivision, keyed by tie pattern, with a
/// relative interior point each.
fn envelope_nodes(points: &[LiftedPoint]) -> Result<BTreeMap<Vec<usize>, Vec<Q>>> {
    let n = points.len();
    validate(points)?;
    let mut nodes: BTreeMap<Vec<usize>, Vec<Q>> = BTreeMap::new();
    let mut attempted: BTreeSet<Vec<usize>> = BTreeSet::new();
    let seeds = par_map_range(n, |k| solve_pattern(points, &[k]));
    // Zero-dimensional cells have no proper faces, so they never join the
    // frontier.
    let mut frontier: Vec<Vec<usize>> = Vec::new();
    for (k, s) in seeds.into_iter().enumerate() {
        attempted.insert(vec![k]);
        if let PatternSolve::Cell { pattern, point } = s {
            if !nodes.contains_key(&pattern) {
                if pattern_dim(points, &pattern) > 0 {
                    frontier.push(pattern.clone());
                }
                nodes.insert(pattern, point);
            }
        }
    }
    while !frontier.is_empty() {
        let mut candidates: Vec<Vec<usize>> = Vec::new();
        for s in &frontier {
            for j in 0..n {
                if s.binary_search(&j).is_ok() {
                    continue;
                }
                let mut start = s.clone();
                let pos = start.binary_search(&j).unwrap_err();
                start.insert(pos, j);
                if attempted.insert(start.clone()) {
                    candidates.push(start);
                }
            }
        }
        let results = par_map(&candidates, |start| solve_pattern(points, start));
        frontier = Vec::new();
        for res in results {
            if let PatternSolve::Cell { pattern, point } = res {
                if !nodes.contains_key(&pattern) {
                    if pattern_dim(points, &pattern) > 0 {
                        frontier.push(pattern.clone());
                    }
                    nodes.insert(pattern, point);
                }
            }
        }
    }
    Ok(nodes)
}

/// Indices of lower hull vertices: points uniquely minimal somewhere.
pub fn hull_vertices(points: &[LiftedPoint]) -> Result<Vec<usize>> {
    let n = points.len();
    validate(points)?;
    let flags = par_map_range(n, |k| {
        matches!(
            solve_pattern(points, &[k]),
            PatternSolve::Cell { ref pattern, .. } if pattern.as_slice() == [k]
        )
    });
    Ok((0..n).filter(|&k| flags[k]).collect())
}

/// Vertex and facet structure of the lower hull.
pub fn lower_hull(points: &[LiftedPoint]) -> Result<LowerHull> {
    let nodes = envelope_nodes(points)?;
    let patterns: Vec<&Vec<usize>> = nodes.keys().collect();
    let vertices: Vec<usize> = patterns
        .iter()
        .filter(|p| p.len() == 1)
        .map(|p| p[0])
        .collect();
    let is_subset = |a: &[usize], b: &[usize]| a.iter().all(|x| b.binary_search(x).is_ok());
    let mut facets: Vec<Vec<usize>> = patterns
        .iter()
        .filter(|p| {
            !patterns
                .iter()
                .any(|q| q.len() > p.len() && is_subset(p, q))
        })
        .map(|p| (*p).clone())
        .collect();
    facets.sort();
    Ok(LowerHull { vertices, facets })
}

/// The envelope subdivision as a polyhedral complex together with the tie
/// pattern of every cell. Cells with singleton patterns are the maximal
/// regions of unique minimality; their union with the rest covers R^r.
pub fn envelope_complex(points: &[LiftedPoint]) -> Result<(PolyhedralComplex, Vec<EnvelopeCell>)> {
    let nodes = envelope_nodes(points)?;
    let r = points[0].point.len();
    let entries: Vec<(&Vec<usize>, &Vec<Q>)> = nodes.iter().collect();
    let dims: Vec<usize> = entries
        .iter()
        .map(|(pattern, _)| pattern_dim(points, pattern))
        .collect();
    let is_subset = |a: &[usize], b: &[usize]| a.iter().all(|x| b.binary_search(x).is_ok());
    let mut items: Vec<(Polyhedron, Vec<Q>)> = Vec::with_capacity(entries.len());
    let mut built: Vec<(Vec<usize>, Polyhedron)> = Vec::with_capacity(entries.len());
    for (i, (pattern, point)) in entries.iter().enumerate() {
        let b = pattern[0];
        let eqs: Vec<Constraint> = pattern[1..]
            .iter()
            .map(|&j| {
                let (a, off) = tie_row(points, b, j);
                Constraint::new(a, off)
            })
            .collect();
        // One inequality per facet: any fresh index of the facet's pattern
        // cuts exactly that facet out of this cell.
        let mut ineqs = Vec::new();
        for (k, (other, _)) in entries.iter().enumerate() {
            if dims[k] + 1 != dims[i] || other.len() <= pattern.len() {
                continue;
            }
            if !is_subset(pattern, other) {
                continue;
            }
            let j = *other
                .iter()
                .find(|x| pattern.binary_search(x).is_err())
                .expect("facet pattern strictly contains the cell pattern");
            let (a, off) = tie_row(points, b, j);
            ineqs.push(Constraint::new(a, off));
        }
        let cell = Polyhedron::from_known_facets(r, ineqs, eqs);
        built.push(((*pattern).clone(), cell.clone()));
        items.push((cell, (*point).clone()));
    }
    let complex = PolyhedralComplex::assemble(r, items);
    let index_of: BTreeMap<&Polyhedron, usize> = complex
        .cells()
        .iter()
        .enumerate()
        .map(|(i, c)| (c, i))
        .collect();
    let mut cells_out: Vec<EnvelopeCell> = built
        .into_iter()
        .map(|(pattern, cell)| EnvelopeCell {
            cell_index: *index_of
                .get(&cell)
                .expect("every pattern cell appears in the assembled complex"),
            pattern,
        })
        .collect();
    cells_out.sort_by_key(|c| c.cell_index);
    Ok((complex, cells_out))
}
