use crate::error::{Error, Result};
use crate::linalg::{kernel_q, primitive_q, rank_q};
use crate::polyhedra::lp::{feasible_point, maximize, Lp, LpOutcome};
use crate::rat::{fmt_q, parse_q, Q};
use num_traits::{One, Signed, Zero};
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::{BTreeMap, BTreeSet};

/// One linear condition <normal, x> <= offset (or = offset when used as an
/// equality row). Canonical rows have primitive integer entries.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Constraint {
    pub normal: Vec<Q>,
    pub offset: Q,
}

impl Constraint {
    pub fn new(normal: Vec<Q>, offset: Q) -> Self {
        Constraint { normal, offset }
    }

    pub fn from_ints(normal: &[i64], offset: i64) -> Self {
        Constraint {
            normal: crate::rat::qvec(normal),
            offset: crate::rat::qi(offset),
        }
    }

    fn augmented(&self) -> Vec<Q> {
        let mut row = self.normal.clone();
        row.push(self.offset.clone());
        row
    }

    fn from_augmented(mut row: Vec<Q>) -> Self {
        let offset = row.pop().expect("augmented row has an offset column");
        Constraint {
            normal: row,
            offset,
        }
    }

    /// Scales so entries are coprime integers; direction is preserved.
    fn primitive(&self) -> Self {
        Constraint::from_augmented(primitive_q(&self.augmented()))
    }

    pub fn eval(&self, w: &[Q]) -> Q {
        crate::rat::dot(&self.normal, w)
    }
}

#[derive(Serialize, Deserialize)]
struct ConstraintDto {
    normal: Vec<String>,
    offset: String,
}

impl Serialize for Constraint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ConstraintDto {
            normal: self.normal.iter().map(fmt_q).collect(),
            offset: fmt_q(&self.offset),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Constraint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let dto = ConstraintDto::deserialize(d)?;
        let normal = dto
            .normal
            .iter()
            .map(|s| parse_q(s))
            .collect::<Result<Vec<Q>>>()
            .map_err(|e| D::Error::custom(e.to_string()))?;
        let offset = parse_q(&dto.offset).map_err(|e| D::Error::custom(e.to_string()))?;
        Ok(Constraint { normal, offset })
    }
}

/// Vertices, rays, and lineality directions generating a polyhedron:
/// conv(vertices) + cone(rays) + span(lineality).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VRep {
    pub vertices: Vec<Vec<Q>>,
    pub rays: Vec<Vec<Q>>,
    pub lineality: Vec<Vec<Q>>,
}

/// Convex rational polyhedron in canonical H-representation.
///
/// Invariants after construction: equality rows are an integer echelon
/// basis of the affine hull's defining system, inequalities are primitive,
/// reduced modulo the equalities, facet-defining, and sorted. Two
/// polyhedra are equal as sets iff their representations are equal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Polyhedron {
    rank: usize,
    empty: bool,
    equalities: Vec<Constraint>,
    inequalities: Vec<Constraint>,
}

impl Polyhedron {
    pub fn new(rank: usize, inequalities: Vec<Constraint>, equalities: Vec<Constraint>) -> Self {
        canonicalize(rank, inequalities, equalities)
    }

    pub fn whole_space(rank: usize) -> Self {
        Polyhedron {
            rank,
            empty: false,
            equalities: Vec::new(),
            inequalities: Vec::new(),
        }
    }

    pub fn empty(rank: usize) -> Self {
        Polyhedron {
            rank,
            empty: true,
            equalities: Vec::new(),
            inequalities: Vec::new(),
        }
    }

    /// Builds directly from rows known to be a consistent tie system:
    /// `equalities` spanning the affine hull and `inequalities` exactly one
    /// per facet. Skips the LP-based canonicalization; rows are still
    /// echelonized, reduced, scaled, and sorted.
    pub(crate) fn from_known_facets(
        rank: usize,
        inequalities: Vec<Constraint>,
        equalities: Vec<Constraint>,
    ) -> Self {
        let eqs = echelonize_equalities(rank, equalities);
        let mut seen = BTreeSet::new();
        let mut ineqs = Vec::new();
        for c in inequalities {
            let r = reduce_mod_equalities(&c, &eqs, rank).primitive();
            if r.normal.iter().all(|x| x.is_zero()) {
                continue;
            }
            if seen.insert((r.normal.clone(), r.offset.clone())) {
                ineqs.push(r);
            }
        }
        ineqs.sort();
        Polyhedron {
            rank,
            empty: false,
            equalities: eqs,
            inequalities: ineqs,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_empty(&self) -> bool {
        self.empty
    }

    pub fn equalities(&self) -> &[Constraint] {
        &self.equalities
    }

    pub fn inequalities(&self) -> &[Constraint] {
        &self.inequalities
    }

    /// Dimension of the affine hull. The zero-rank space is a point.
    pub fn dimension(&self) -> Result<usize> {
        if self.empty {
            return Err(Error::EmptyPolyhedron);
        }
        Ok(self.rank - self.equalities.len())
    }

    pub fn contains(&self, w: &[Q]) -> bool {
        if self.empty {
            return false;
        }
        self.equalities.iter().all(|c| c.eval(w) == c.offset)
            && self.inequalities.iter().all(|c| c.eval(w) <= c.offset)
    }

    fn to_lp(&self) -> Lp {
        let mut lp = Lp::new(self.rank);
        for c in &self.inequalities {
            lp.le(c.normal.clone(), c.offset.clone());
        }
        for c in &self.equalities {
            lp.eq(c.normal.clone(), c.offset.clone());
        }
        lp
    }

    /// A point in the relative interior (all inequalities strict).
    pub fn relative_interior_point(&self) -> Result<Vec<Q>> {
        if self.empty {
            return Err(Error::EmptyPolyhedron);
        }
        match relint_lp(
            self.rank,
            &constraint_pairs(&self.inequalities),
            &constraint_pairs(&self.equalities),
        ) {
            Some((point, eps)) => {
                debug_assert!(eps > Q::zero(), "canonical form has no implicit equalities");
                Ok(point)
            }
            None => Err(Error::EmptyPolyhedron),
        }
    }

    /// Cone of directions d with x + t d staying inside for all t >= 0.
    pub fn recession_cone(&self) -> Result<Polyhedron> {
        if self.empty {
            return Err(Error::EmptyPolyhedron);
        }
        let zero_off = |cs: &[Constraint]| {
            cs.iter()
                .map(|c| Constraint::new(c.normal.clone(), Q::zero()))
                .collect::<Vec<_>>()
        };
        Ok(canonicalize(
            self.rank,
            zero_off(&self.inequalities),
            zero_off(&self.equalities),
        ))
    }

    pub fn is_bounded(&self) -> Result<bool> {
        if self.empty {
            return Ok(true);
        }
        Ok(self.recession_cone()?.dimension()? == 0)
    }

    pub fn intersect(&self, other: &Polyhedron) -> Polyhedron {
        debug_assert_eq!(self.rank, other.rank);
        if self.empty || other.empty {
            return Polyhedron::empty(self.rank);
        }
        let mut ineqs = self.inequalities.clone();
        ineqs.extend(other.inequalities.iter().cloned());
        let mut eqs = self.equalities.clone();
        eqs.extend(other.equalities.iter().cloned());
        canonicalize(self.rank, ineqs, eqs)
    }

    /// True when every point of `other` satisfies every constraint of self.
    pub fn contains_polyhedron(&self, other: &Polyhedron) -> bool {
        if other.empty {
            return true;
        }
        if self.empty {
            return false;
        }
        let lp = other.to_lp();
        let valid_le = |c: &Constraint| match maximize(&lp, &c.normal) {
            LpOutcome::Optimal { value, .. } => value <= c.offset,
            LpOutcome::Unbounded => false,
            LpOutcome::Infeasible => true,
        };
        let neg = |v: &[Q]| v.iter().map(|x| -x.clone()).collect::<Vec<Q>>();
        self.inequalities.iter().all(valid_le)
            && self.equalities.iter().all(|c| {
                valid_le(c) && valid_le(&Constraint::new(neg(&c.normal), -c.offset.clone()))
            })
    }

    /// True when self is a (not necessarily proper) face of `other`.
    pub fn is_face_of(&self, other: &Polyhedron) -> bool {
        if self.empty || other.empty {
            return false;
        }
        if !other.contains_polyhedron(self) {
            return false;
        }
        // Inequalities of `other` that are identically tight on self reduce
        // to the zero row modulo self's equality system.
        let mut eqs = other.equalities.clone();
        for c in &other.inequalities {
            let r = reduce_mod_equalities(c, &self.equalities, self.rank);
            if r.normal.iter().all(|x| x.is_zero()) && r.offset.is_zero() {
                eqs.push(Constraint::new(c.normal.clone(), c.offset.clone()));
            }
        }
        &canonicalize(self.rank, other.inequalities.clone(), eqs) == self
    }

    /// The facets (codimension-one faces).
    pub fn facets(&self) -> Result<Vec<Polyhedron>> {
        if self.empty {
            return Err(Error::EmptyPolyhedron);
        }
        Ok(self
            .inequalities
            .iter()
            .map(|c| {
                let mut eqs = self.equalities.clone();
                eqs.push(c.clone());
                canonicalize(self.rank, self.inequalities.clone(), eqs)
            })
            .collect())
    }

    /// All faces, self included, ordered by (dimension, representation).
    pub fn faces(&self) -> Result<Vec<Polyhedron>> {
        if self.empty {
            return Err(Error::EmptyPolyhedron);
        }
        let mut seen = BTreeSet::new();
        let mut queue = vec![self.clone()];
        seen.insert(self.clone());
        while let Some(p) = queue.pop() {
            for f in p.facets()? {
                debug_assert!(!f.is_empty());
                if seen.insert(f.clone()) {
                    queue.push(f);
                }
            }
        }
        let mut out: Vec<Polyhedron> = seen.into_iter().collect();
        out.sort_by_cached_key(|p| (p.rank - p.equalities.len(), p.clone()));
        Ok(out)
    }

    /// Basis of the linear space of directions parallel to the affine hull.
    pub fn direction_space(&self) -> Vec<Vec<Q>> {
        let rows: Vec<Vec<Q>> = self.equalities.iter().map(|c| c.normal.clone()).collect();
        kernel_q(&rows, self.rank)
    }

    /// Image under the linear map with the given rows (target dim = rows).
    pub fn linear_image(&self, rows: &[Vec<Q>]) -> Polyhedron {
        let m = rows.len();
        if self.empty {
            return Polyhedron::empty(m);
        }
        let n = self.rank;
        let total = m + n;
        let mut ineqs = Vec::new();
        let mut eqs = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            debug_assert_eq!(row.len(), n);
            let mut a = vec![Q::zero(); total];
            a[i] = Q::one();
            for (j, coef) in row.iter().enumerate() {
                a[m + j] = -coef.clone();
            }
            eqs.push((a, Q::zero()));
        }
        for c in &self.equalities {
            let mut a = vec![Q::zero(); total];
            a[m..].clone_from_slice(&c.normal);
            eqs.push((a, c.offset.clone()));
        }
        for c in &self.inequalities {
            let mut a = vec![Q::zero(); total];
            a[m..].clone_from_slice(&c.normal);
            ineqs.push((a, c.offset.clone()));
        }
        let eliminate: Vec<usize> = (m..total).collect();
        match fm_eliminate(total, ineqs, eqs, &eliminate) {
            Some((out_ineqs, out_eqs)) => canonicalize(
                m,
                pairs_to_constraints(out_ineqs),
                pairs_to_constraints(out_eqs),
            ),
            None => Polyhedron::empty(m),
        }
    }

    /// Preimage under the linear map with the given rows: pulls every
    /// constraint back along the map.
    pub fn linear_preimage(&self, rows: &[Vec<Q>], source_rank: usize) -> Polyhedron {
        if self.empty {
            return Polyhedron::empty(source_rank);
        }
        debug_assert_eq!(rows.len(), self.rank);
        let pull = |c: &Constraint| {
            let mut normal = vec![Q::zero(); source_rank];
            for (i, coef) in c.normal.iter().enumerate() {
                if coef.is_zero() {
                    continue;
                }
                for (j, a) in rows[i].iter().enumerate() {
                    normal[j] += coef * a;
                }
            }
            Constraint::new(normal, c.offset.clone())
        };
        canonicalize(
            source_rank,
            self.inequalities.iter().map(pull).collect(),
            self.equalities.iter().map(pull).collect(),
        )
    }

    /// V-representation: vertices and rays of the lineality-free slice plus
    /// a lineality basis. Intended for low dimensions (rendering, bounded
    /// certificates); enumeration is combinatorial in the facet count.
    pub fn generators(&self) -> Result<VRep> {
        if self.empty {
            return Err(Error::EmptyPolyhedron);
        }
        let mut all_normals: Vec<Vec<Q>> = self
            .equalities
            .iter()
            .chain(self.inequalities.iter())
            .map(|c| c.normal.clone())
            .collect();
        let lineality: Vec<Vec<Q>> = kernel_q(&all_normals, self.rank)
            .iter()
            .map(|v| primitive_q(v))
            .collect();
        let mut slice_eqs = self.equalities.clone();
        for l in &lineality {
            slice_eqs.push(Constraint::new(l.clone(), Q::zero()));
        }
        let sliced = canonicalize(self.rank, self.inequalities.clone(), slice_eqs);
        debug_assert!(!sliced.is_empty());
        let mut vertices = enumerate_vertices(&sliced);
        let cone = sliced.recession_cone()?;
        let mut rays = enumerate_extreme_rays(&cone);
        vertices.sort();
        vertices.dedup();
        rays.sort();
        rays.dedup();
        all_normals.clear();
        Ok(VRep {
            vertices,
            rays,
            lineality,
        })
    }
}

fn constraint_pairs(cs: &[Constraint]) -> Vec<(Vec<Q>, Q)> {
    cs.iter()
        .map(|c| (c.normal.clone(), c.offset.clone()))
        .collect()
}

fn pairs_to_constraints(pairs: Vec<(Vec<Q>, Q)>) -> Vec<Constraint> {
    pairs
        .into_iter()
        .map(|(a, b)| Constraint::new(a, b))
        .collect()
}

/// Maximizes slack eps with every inequality tightened by eps (capped at 1).
/// Returns a maximizing point and the optimal eps, or None when infeasible.
fn relint_lp(rank: usize, ineqs: &[(Vec<Q>, Q)], eqs: &[(Vec<Q>, Q)]) -> Option<(Vec<Q>, Q)> {
    let mut lp = Lp::new(rank + 1);
    for (a, b) in ineqs {
        let mut row = a.clone();
        row.push(Q::one());
        lp.le(row, b.clone());
    }
    for (a, b) in eqs {
        let mut row = a.clone();
        row.push(Q::zero());
        lp.eq(row, b.clone());
    }
    let mut cap = vec![Q::zero(); rank];
    cap.push(Q::one());
    lp.le(cap.clone(), Q::one());
    match maximize(&lp, &cap) {
        LpOutcome::Optimal { mut point, value } => {
            point.pop();
            Some((point, value))
        }
        LpOutcome::Unbounded => unreachable!("slack objective is capped"),
        LpOutcome::Infeasible => None,
    }
}

/// Row echelon over the augmented (normal | offset) rows, pivoting only on
/// normal columns, followed by primitive scaling. Assumes consistency.
fn echelonize_equalities(rank: usize, eqs: Vec<Constraint>) -> Vec<Constraint> {
    let mut rows: Vec<Vec<Q>> = eqs.iter().map(Constraint::augmented).collect();
    let mut pivot_row = 0;
    for col in 0..rank {
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
                let f = rows[r2][col].clone();
                for c in 0..=rank {
                    let sub = &f * &rows[pivot_row][c];
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
    debug_assert!(
        rows.iter().all(|r| r[..rank].iter().any(|x| !x.is_zero())),
        "inconsistent equality system reached echelonization"
    );
    rows.into_iter()
        .map(|r| Constraint::from_augmented(r).primitive())
        .collect()
}

/// Zeroes the pivot columns of the equality system out of a constraint row.
fn reduce_mod_equalities(c: &Constraint, eqs: &[Constraint], rank: usize) -> Constraint {
    let mut row = c.augmented();
    for eq in eqs {
        let pivot = eq
            .normal
            .iter()
            .position(|x| !x.is_zero())
            .expect("equality rows are nonzero");
        if row[pivot].is_zero() {
            continue;
        }
        let f = &row[pivot] / &eq.normal[pivot];
        let eq_row = eq.augmented();
        for i in 0..=rank {
            let sub = &f * &eq_row[i];
            row[i] -= sub;
        }
    }
    Constraint::from_augmented(row)
}

/// Full canonicalization: feasibility, implicit equality extraction,
/// echelon equalities, reduced primitive deduplicated irredundant sorted
/// inequalities.
fn canonicalize(
    rank: usize,
    inequalities: Vec<Constraint>,
    equalities: Vec<Constraint>,
) -> Polyhedron {
    let mut ineq_pairs = constraint_pairs(&inequalities);
    let mut eq_pairs = constraint_pairs(&equalities);
    if feasible_point(&{
        let mut lp = Lp::new(rank);
        for (a, b) in &ineq_pairs {
            lp.le(a.clone(), b.clone());
        }
        for (a, b) in &eq_pairs {
            lp.eq(a.clone(), b.clone());
        }
        lp
    })
    .is_none()
    {
        return Polyhedron::empty(rank);
    }
    // Implicit equalities: skip the per-row scan when some point has all
    // inequalities strictly slack.
    let needs_scan = match relint_lp(rank, &ineq_pairs, &eq_pairs) {
        Some((_, eps)) => eps.is_zero(),
        None => unreachable!("feasibility was just established"),
    };
    if needs_scan {
        let base_lp = {
            let mut lp = Lp::new(rank);
            for (a, b) in &ineq_pairs {
                lp.le(a.clone(), b.clone());
            }
            for (a, b) in &eq_pairs {
                lp.eq(a.clone(), b.clone());
            }
            lp
        };
        let mut still_ineq = Vec::new();
        for (a, b) in ineq_pairs {
            // The row is an implicit equality iff b - a.x cannot move off 0.
            let neg: Vec<Q> = a.iter().map(|x| -x.clone()).collect();
            let implicit = match maximize(&base_lp, &neg) {
                LpOutcome::Optimal { value, .. } => value == -b.clone(),
                LpOutcome::Unbounded => false,
                LpOutcome::Infeasible => unreachable!(),
            };
            if implicit {
                eq_pairs.push((a, b));
            } else {
                still_ineq.push((a, b));
            }
        }
        ineq_pairs = still_ineq;
    }
    let eqs = echelonize_equalities(rank, pairs_to_constraints(eq_pairs));
    // Reduce, scale, dedupe; for identical normals keep the tight offset.
    let mut best: BTreeMap<Vec<Q>, Q> = BTreeMap::new();
    for (a, b) in ineq_pairs {
        let r = reduce_mod_equalities(&Constraint::new(a, b), &eqs, rank).primitive();
        if r.normal.iter().all(|x| x.is_zero()) {
            debug_assert!(!r.offset.is_negative(), "feasible system, so 0 <= offset");
            continue;
        }
        match best.get_mut(&r.normal) {
            Some(b0) => {
                if r.offset < *b0 {
                    *b0 = r.offset;
                }
            }
            None => {
                best.insert(r.normal, r.offset);
            }
        }
    }
    let mut kept: Vec<Constraint> = best
        .into_iter()
        .map(|(a, b)| Constraint::new(a, b))
        .collect();
    // Redundancy: a row is kept iff dropping it changes the feasible set.
    let mut i = 0;
    while i < kept.len() {
        let mut lp = Lp::new(rank);
        for (j, c) in kept.iter().enumerate() {
            if j != i {
                lp.le(c.normal.clone(), c.offset.clone());
            }
        }
        for c in &eqs {
            lp.eq(c.normal.clone(), c.offset.clone());
        }
        let redundant = match maximize(&lp, &kept[i].normal) {
            LpOutcome::Optimal { value, .. } => value <= kept[i].offset,
            LpOutcome::Unbounded => false,
            LpOutcome::Infeasible => unreachable!("superset of a feasible system"),
        };
        if redundant {
            kept.remove(i);
        } else {
            i += 1;
        }
    }
    kept.sort();
    Polyhedron {
        rank,
        empty: false,
        equalities: eqs,
        inequalities: kept,
    }
}

/// Fourier-Motzkin elimination of the listed variables. Equalities are used
/// for substitution first. Returns None when a contradictory constant row
/// appears; otherwise constraints over the surviving columns in original
/// order.
#[allow(clippy::type_complexity)]
fn fm_eliminate(
    nvars: usize,
    ineqs: Vec<(Vec<Q>, Q)>,
    eqs: Vec<(Vec<Q>, Q)>,
    eliminate: &[usize],
) -> Option<(Vec<(Vec<Q>, Q)>, Vec<(Vec<Q>, Q)>)> {
    let mut dead = vec![false; nvars];
    for &j in eliminate {
        dead[j] = true;
    }
    let mut ineqs = ineqs;
    let mut eqs = eqs;
    // Substitute equalities that mention a doomed variable.
    loop {
        let Some((ei, j)) = eqs.iter().enumerate().find_map(|(ei, (a, _))| {
            (0..nvars)
                .find(|&j| dead[j] && !a[j].is_zero())
                .map(|j| (ei, j))
        }) else {
            break;
        };
        let (e_a, e_b) = eqs.remove(ei);
        let coef = e_a[j].clone();
        let subst = |(a, b): &mut (Vec<Q>, Q)| {
            if a[j].is_zero() {
                return;
            }
            let f = &a[j] / &coef;
            for i in 0..nvars {
                let sub = &f * &e_a[i];
                a[i] -= sub;
            }
            let sub = &f * &e_b;
            *b -= sub;
        };
        for row in ineqs.iter_mut() {
            subst(row);
        }
        for row in eqs.iter_mut() {
            subst(row);
        }
    }
    // Classic pairwise elimination for the remaining doomed variables.
    for j in 0..nvars {
        if !dead[j] {
            continue;
        }
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut rest = Vec::new();
        for row in ineqs.drain(..) {
            if row.0[j].is_positive() {
                pos.push(row);
            } else if row.0[j].is_negative() {
                neg.push(row);
            } else {
                rest.push(row);
            }
        }
        for (pa, pb) in &pos {
            for (na, nb) in &neg {
                let alpha = pa[j].clone();
                let beta = -na[j].clone();
                let mut a = vec![Q::zero(); nvars];
                for i in 0..nvars {
                    a[i] = &beta * &pa[i] + &alpha * &na[i];
                }
                let b = &beta * pb + &alpha * nb;
                rest.push((a, b));
            }
        }
        ineqs = prune_rows(rest)?;
        if ineqs.len() > 48 {
            ineqs = lp_prune(nvars, ineqs, &eqs);
        }
    }
    let keep: Vec<usize> = (0..nvars).filter(|&j| !dead[j]).collect();
    let compact = |rows: Vec<(Vec<Q>, Q)>| {
        rows.into_iter()
            .map(|(a, b)| (keep.iter().map(|&j| a[j].clone()).collect::<Vec<Q>>(), b))
            .collect::<Vec<_>>()
    };
    Some((compact(ineqs), compact(eqs)))
}

/// Primitive-scales rows, removes tautologies and duplicates, keeps the
/// tightest offset per normal, and reports contradictions as None.
fn prune_rows(rows: Vec<(Vec<Q>, Q)>) -> Option<Vec<(Vec<Q>, Q)>> {
    let mut best: BTreeMap<Vec<Q>, Q> = BTreeMap::new();
    for (a, b) in rows {
        let c = Constraint::new(a, b).primitive();
        if c.normal.iter().all(|x| x.is_zero()) {
            if c.offset.is_negative() {
                return None;
            }
            continue;
        }
        match best.get_mut(&c.normal) {
            Some(b0) => {
                if c.offset < *b0 {
                    *b0 = c.offset;
                }
            }
            None => {
                best.insert(c.normal, c.offset);
            }
        }
    }
    Some(best.into_iter().collect())
}

/// Drops rows implied by the rest; used to tame intermediate growth.
fn lp_prune(nvars: usize, mut rows: Vec<(Vec<Q>, Q)>, eqs: &[(Vec<Q>, Q)]) -> Vec<(Vec<Q>, Q)> {
    let mut i = 0;
    while i < rows.len() {
        let mut lp = Lp::new(nvars);
        for (j, (a, b)) in rows.iter().enumerate() {
            if j != i {
                lp.le(a.clone(), b.clone());
            }
        }
        for (a, b) in eqs {
            lp.eq(a.clone(), b.clone());
        }
        let redundant = match maximize(&lp, &rows[i].0) {
            LpOutcome::Optimal { value, .. } => value <= rows[i].1,
            _ => false,
        };
        if redundant {
            rows.remove(i);
        } else {
            i += 1;
        }
    }
    rows
}

/// Vertices of a pointed polyhedron by basis enumeration.
fn enumerate_vertices(p: &Polyhedron) -> Vec<Vec<Q>> {
    let dim = p.rank - p.equalities.len();
    let eq_rows: Vec<Vec<Q>> = p.equalities.iter().map(|c| c.normal.clone()).collect();
    let eq_rhs: Vec<Q> = p.equalities.iter().map(|c| c.offset.clone()).collect();
    let m = p.inequalities.len();
    let mut out = Vec::new();
    for subset in subsets_of_size(m, dim) {
        let mut rows = eq_rows.clone();
        let mut rhs = eq_rhs.clone();
        for &k in &subset {
            rows.push(p.inequalities[k].normal.clone());
            rhs.push(p.inequalities[k].offset.clone());
        }
        if rank_q(&rows) < p.rank {
            continue;
        }
        let Some(x) = crate::linalg::solve_q(&rows, &rhs) else {
            continue;
        };
        if p.contains(&x) {
            out.push(x);
        }
    }
    out
}

/// Extreme rays of a pointed cone (canonical, offsets all zero).
fn enumerate_extreme_rays(cone: &Polyhedron) -> Vec<Vec<Q>> {
    let dim = cone.rank - cone.equalities.len();
    if dim == 0 {
        return Vec::new();
    }
    let eq_rows: Vec<Vec<Q>> = cone.equalities.iter().map(|c| c.normal.clone()).collect();
    let m = cone.inequalities.len();
    let mut out: Vec<Vec<Q>> = Vec::new();
    for subset in subsets_of_size(m, dim.saturating_sub(1)) {
        let mut rows = eq_rows.clone();
        for &k in &subset {
            rows.push(cone.inequalities[k].normal.clone());
        }
        let kernel = kernel_q(&rows, cone.rank);
        if kernel.len() != 1 {
            continue;
        }
        let d = primitive_q(&kernel[0]);
        for cand in [d.clone(), d.iter().map(|x| -x.clone()).collect::<Vec<Q>>()] {
            if !cone.contains(&cand) {
                continue;
            }
            // Extremality: tight constraints at the ray span a hyperplane.
            let mut tight = eq_rows.clone();
            for c in &cone.inequalities {
                if c.eval(&cand).is_zero() {
                    tight.push(c.normal.clone());
                }
            }
            if rank_q(&tight) == cone.rank - 1 {
                out.push(cand);
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(start: usize, n: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..n {
            if n - i < k - current.len() {
                break;
            }
            current.push(i);
            rec(i + 1, n, k, current, out);
            current.pop();
        }
    }
    rec(0, n, k, &mut current, &mut out);
    out
}

/// H-representation of the cone generated by the given integer vectors:
/// the image of the nonnegative orthant under the matrix with those
/// columns.
pub fn cone_from_generators(rank: usize, generators: &[Vec<i64>]) -> Polyhedron {
    let k = generators.len();
    let orthant = Polyhedron::new(
        k,
        (0..k)
            .map(|i| {
                let mut a = vec![Q::zero(); k];
                a[i] = -Q::one();
                Constraint::new(a, Q::zero())
            })
            .collect(),
        Vec::new(),
    );
    let rows: Vec<Vec<Q>> = (0..rank)
        .map(|i| (0..k).map(|j| crate::rat::qi(generators[j][i])).collect())
        .collect();
    orthant.linear_image(&rows)
}

#[derive(Serialize, Deserialize)]
struct PolyhedronDto {
    rank: usize,
    #[serde(default)]
    empty: bool,
    equalities: Vec<Constraint>,
    inequalities: Vec<Constraint>,
}

impl Serialize for Polyhedron {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyhedronDto {
            rank: self.rank,
            empty: self.empty,
            equalities: self.equalities.clone(),
            inequalities: self.inequalities.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polyhedron {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let dto = PolyhedronDto::deserialize(d)?;
        if dto.empty {
            return Ok(Polyhedron::empty(dto.rank));
        }
        for c in dto.equalities.iter().chain(dto.inequalities.iter()) {
            if c.normal.len() != dto.rank {
                return Err(D::Error::custom("constraint length does not match rank"));
            }
        }
        Ok(Polyhedron::new(dto.rank, dto.inequalities, dto.equalities))
    }
}
