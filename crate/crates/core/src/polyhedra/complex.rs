//! Finite polyhedral complexes: collections of canonical cells closed
//! under taking faces, meeting pairwise in common faces.
//!
//! Cells are kept sorted by (dimension, representation), so identical
//! complexes serialize identically. Incidence lists every proper face pair
//! (face index, cell index), not just covering pairs.

use crate::error::{Error, Result};
use crate::polyhedra::polyhedron::{Constraint, Polyhedron};
use crate::rat::Q;
use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyhedralComplex {
    rank: usize,
    cells: Vec<Polyhedron>,
    incidence: Vec<(usize, usize)>,
}

impl PolyhedralComplex {
    pub fn empty(rank: usize) -> Self {
        PolyhedralComplex {
            rank,
            cells: Vec::new(),
            incidence: Vec::new(),
        }
    }

    /// The trivial complex whose only cell is all of R^rank.
    pub fn whole_space(rank: usize) -> Self {
        PolyhedralComplex {
            rank,
            cells: vec![Polyhedron::whole_space(rank)],
            incidence: Vec::new(),
        }
    }

    /// Builds from cells paired with a relative interior point each. The
    /// cell list must be closed under faces; duplicates are merged. The
    /// face relation is recovered by testing relative interior membership.
    pub(crate) fn assemble(rank: usize, items: Vec<(Polyhedron, Vec<Q>)>) -> Self {
        let mut items: Vec<(Polyhedron, Vec<Q>)> =
            items.into_iter().filter(|(p, _)| !p.is_empty()).collect();
        items.sort_by(|a, b| a.0.cmp(&b.0));
        items.dedup_by(|a, b| a.0 == b.0);
        items.sort_by_cached_key(|(p, _)| (p.dimension().expect("cells are nonempty"), p.clone()));
        let dims: Vec<usize> = items.iter().map(|(p, _)| p.dimension().unwrap()).collect();
        let mut incidence = Vec::new();
        for i in 0..items.len() {
            for j in 0..items.len() {
                if dims[i] < dims[j] && items[j].0.contains(&items[i].1) {
                    incidence.push((i, j));
                }
            }
        }
        PolyhedralComplex {
            rank,
            cells: items.into_iter().map(|(p, _)| p).collect(),
            incidence,
        }
    }

    /// Closure of the given cells under faces, assembled into a complex.
    /// The inputs must intersect pairwise in common faces.
    pub fn from_maximal_cells(rank: usize, maximal: Vec<Polyhedron>) -> Result<Self> {
        let mut all: BTreeSet<Polyhedron> = BTreeSet::new();
        for p in maximal {
            if p.is_empty() {
                continue;
            }
            if p.rank() != rank {
                return Err(Error::InvalidInput(
                    "cell rank does not match complex rank".into(),
                ));
            }
            for f in p.faces()? {
                all.insert(f);
            }
        }
        let items = all
            .into_iter()
            .map(|p| {
                let w = p.relative_interior_point()?;
                Ok((p, w))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::assemble(rank, items))
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn cells(&self) -> &[Polyhedron] {
        &self.cells
    }

    pub fn incidence(&self) -> &[(usize, usize)] {
        &self.incidence
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Largest cell dimension, or None for the empty complex.
    pub fn dimension(&self) -> Option<usize> {
        self.cells
            .iter()
            .map(|p| p.dimension().expect("cells are nonempty"))
            .max()
    }

    /// Indices of cells that are not proper faces of any other cell.
    pub fn maximal_cells(&self) -> Vec<usize> {
        let faces: BTreeSet<usize> = self.incidence.iter().map(|&(f, _)| f).collect();
        (0..self.cells.len())
            .filter(|i| !faces.contains(i))
            .collect()
    }

    /// Subcomplex of all cells of dimension at most k.
    pub fn skeleton(&self, k: usize) -> PolyhedralComplex {
        let keep: Vec<usize> = (0..self.cells.len())
            .filter(|&i| self.cells[i].dimension().unwrap() <= k)
            .collect();
        let mut index = vec![usize::MAX; self.cells.len()];
        for (new, &old) in keep.iter().enumerate() {
            index[old] = new;
        }
        let cells = keep.iter().map(|&i| self.cells[i].clone()).collect();
        let incidence = self
            .incidence
            .iter()
            .filter(|&&(f, c)| index[f] != usize::MAX && index[c] != usize::MAX)
            .map(|&(f, c)| (index[f], index[c]))
            .collect();
        PolyhedralComplex {
            rank: self.rank,
            cells,
            incidence,
        }
    }

    /// Whether the union of cells contains the point.
    pub fn support_contains(&self, w: &[Q]) -> bool {
        self.cells.iter().any(|p| p.contains(w))
    }

    /// Index of the smallest cell containing w (the one with w in its
    /// relative interior), or None when w is outside the support.
    pub fn find_cell(&self, w: &[Q]) -> Option<usize> {
        // Cells are sorted by dimension, so the first hit is smallest.
        (0..self.cells.len()).find(|&i| self.cells[i].contains(w))
    }

    /// Common refinement: cells are the pairwise intersections, supported
    /// on the intersection of the two supports.
    pub fn common_refinement(&self, other: &PolyhedralComplex) -> Result<PolyhedralComplex> {
        if self.rank != other.rank {
            return Err(Error::InvalidInput(
                "refinement requires equal ranks".into(),
            ));
        }
        let mut pieces: BTreeSet<Polyhedron> = BTreeSet::new();
        for &i in &self.maximal_cells() {
            for &j in &other.maximal_cells() {
                let inter = self.cells[i].intersect(&other.cells[j]);
                if !inter.is_empty() {
                    for f in inter.faces()? {
                        pieces.insert(f);
                    }
                }
            }
        }
        let items = pieces
            .into_iter()
            .map(|p| {
                let w = p.relative_interior_point()?;
                Ok((p, w))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::assemble(self.rank, items))
    }

    /// Complex structure on a union of polyhedra that need not meet
    /// facially: every input is split along every constraint hyperplane of
    /// every input, after which pieces meet in common faces.
    pub fn arrangement_union(rank: usize, polys: &[Polyhedron]) -> Result<PolyhedralComplex> {
        let mut hyperplanes: BTreeSet<(Vec<Q>, Q)> = BTreeSet::new();
        for p in polys {
            if p.is_empty() {
                continue;
            }
            if p.rank() != rank {
                return Err(Error::InvalidInput(
                    "polyhedron rank does not match arrangement rank".into(),
                ));
            }
            for c in p.equalities().iter().chain(p.inequalities().iter()) {
                hyperplanes.insert(oriented_hyperplane(c));
            }
        }
        let mut pieces: BTreeSet<Polyhedron> = BTreeSet::new();
        for p in polys {
            if p.is_empty() {
                continue;
            }
            let mut frontier = vec![p.clone()];
            for (a, b) in &hyperplanes {
                let le = Constraint::new(a.clone(), b.clone());
                let ge = Constraint::new(a.iter().map(|x| -x.clone()).collect(), -b.clone());
                let mut next = Vec::new();
                for piece in frontier {
                    let dim = piece.dimension().expect("pieces are nonempty");
                    let below = piece.intersect(&halfspace(rank, &le));
                    let above = piece.intersect(&halfspace(rank, &ge));
                    let proper = !below.is_empty()
                        && !above.is_empty()
                        && below.dimension().unwrap() == dim
                        && above.dimension().unwrap() == dim;
                    if proper {
                        next.push(below);
                        next.push(above);
                    } else {
                        next.push(piece);
                    }
                }
                frontier = next;
            }
            for piece in frontier {
                for f in piece.faces()? {
                    pieces.insert(f);
                }
            }
        }
        let items = pieces
            .into_iter()
            .map(|p| {
                let w = p.relative_interior_point()?;
                Ok((p, w))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::assemble(rank, items))
    }

    /// Exhaustive pairwise check that cells meet in common faces and all
    /// faces are present. Quadratic with LP calls; meant for tests.
    pub fn is_valid_complex(&self) -> bool {
        for p in &self.cells {
            let Ok(faces) = p.faces() else {
                return false;
            };
            for f in faces {
                if !self.cells.contains(&f) {
                    return false;
                }
            }
        }
        for i in 0..self.cells.len() {
            for j in i + 1..self.cells.len() {
                let inter = self.cells[i].intersect(&self.cells[j]);
                if inter.is_empty() {
                    continue;
                }
                if !inter.is_face_of(&self.cells[i]) || !inter.is_face_of(&self.cells[j]) {
                    return false;
                }
            }
        }
        true
    }
}

fn halfspace(rank: usize, c: &Constraint) -> Polyhedron {
    Polyhedron::new(rank, vec![c.clone()], Vec::new())
}

/// Canonical key for the hyperplane normal.x = offset: primitive with the
/// first nonzero coordinate positive.
fn oriented_hyperplane(c: &Constraint) -> (Vec<Q>, Q) {
    let p = {
        let mut row = c.normal.clone();
        row.push(c.offset.clone());
        crate::linalg::primitive_q(&row)
    };
    let flip = p
        .iter()
        .take(c.normal.len())
        .find(|x| !x.is_zero())
        .map(|x| x < &Q::zero())
        .unwrap_or(false);
    let mut row: Vec<Q> = if flip {
        p.iter().map(|x| -x.clone()).collect()
    } else {
        p
    };
    let offset = row.pop().unwrap();
    (row, offset)
}

#[derive(Serialize, Deserialize)]
struct ComplexDto {
    rank: usize,
    cells: Vec<Polyhedron>,
    incidence: Vec<(usize, usize)>,
}

impl Serialize for PolyhedralComplex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ComplexDto {
            rank: self.rank,
            cells: self.cells.clone(),
            incidence: self.incidence.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PolyhedralComplex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let dto = ComplexDto::deserialize(d)?;
        // Incidence is recomputed: inputs may list cells in any order.
        let items = dto
            .cells
            .into_iter()
            .map(|p| {
                if p.rank() != dto.rank {
                    return Err(D::Error::custom("cell rank does not match complex rank"));
                }
                let w = p
                    .relative_interior_point()
                    .map_err(|e| D::Error::custom(e.to_string()))?;
                Ok((p, w))
            })
            .collect::<std::result::Result<Vec<_>, D::Error>>()?;
        Ok(PolyhedralComplex::assemble(dto.rank, items))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{qi, qq, qvec};

    fn poly(rank: usize, ineqs: &[(&[i64], i64)], eqs: &[(&[i64], i64)]) -> Polyhedron {
        Polyhedron::new(
            rank,
            ineqs
                .iter()
                .map(|(a, b)| Constraint::from_ints(a, *b))
                .collect(),
            eqs.iter()
                .map(|(a, b)| Constraint::from_ints(a, *b))
                .collect(),
        )
    }

    #[test]
    fn closure_of_two_half_planes() {
        let left = poly(2, &[(&[1, 0], 0)], &[]);
        let right = poly(2, &[(&[-1, 0], 0)], &[]);
        let c = PolyhedralComplex::from_maximal_cells(2, vec![left, right]).unwrap();
        // Two half planes and their shared boundary line.
        assert_eq!(c.cells().len(), 3);
        assert_eq!(c.dimension(), Some(2));
        assert_eq!(c.maximal_cells().len(), 2);
        assert_eq!(c.incidence().len(), 2);
        assert!(c.is_valid_complex());
        assert!(c.support_contains(&qvec(&[5, -1])));
    }

    #[test]
    fn skeleton_drops_top_cells() {
        let left = poly(2, &[(&[1, 0], 0)], &[]);
        let right = poly(2, &[(&[-1, 0], 0)], &[]);
        let c = PolyhedralComplex::from_maximal_cells(2, vec![left, right]).unwrap();
        let sk = c.skeleton(1);
        assert_eq!(sk.cells().len(), 1);
        assert_eq!(sk.dimension(), Some(1));
        assert!(sk.support_contains(&qvec(&[0, 9])));
        assert!(!sk.support_contains(&qvec(&[1, 0])));
        // Skeleton of the trivial complex below top dimension is empty.
        let trivial = PolyhedralComplex::whole_space(2);
        assert!(trivial.skeleton(1).is_empty());
        assert_eq!(trivial.skeleton(2), trivial);
        // Skeleton is idempotent.
        assert_eq!(sk.skeleton(1), sk);
    }

    #[test]
    fn refinement_with_trivial_complex() {
        let left = poly(2, &[(&[1, 0], 0)], &[]);
        let right = poly(2, &[(&[-1, 0], 0)], &[]);
        let c = PolyhedralComplex::from_maximal_cells(2, vec![left, right]).unwrap();
        let trivial = PolyhedralComplex::whole_space(2);
        assert_eq!(c.common_refinement(&trivial).unwrap(), c);
        assert_eq!(c.common_refinement(&c).unwrap(), c);
    }

    #[test]
    fn refinement_of_transverse_lines() {
        let v =
            PolyhedralComplex::from_maximal_cells(2, vec![poly(2, &[], &[(&[1, 0], 0)])]).unwrap();
        let h =
            PolyhedralComplex::from_maximal_cells(2, vec![poly(2, &[], &[(&[0, 1], 0)])]).unwrap();
        let r = v.common_refinement(&h).unwrap();
        // The two lines cross in one point; refinement keeps only it.
        assert_eq!(r.cells().len(), 1);
        assert_eq!(r.dimension(), Some(0));
        assert!(r.support_contains(&qvec(&[0, 0])));
    }

    #[test]
    fn arrangement_of_crossing_segments() {
        let a = poly(2, &[(&[1, 0], 1), (&[-1, 0], 1)], &[(&[0, 1], 0)]);
        let b = poly(2, &[(&[0, 1], 1), (&[0, -1], 1)], &[(&[1, 0], 0)]);
        let c = PolyhedralComplex::arrangement_union(2, &[a, b]).unwrap();
        // Each segment splits at the crossing: 4 edges + 5 vertices.
        assert_eq!(c.dimension(), Some(1));
        assert_eq!(
            c.cells()
                .iter()
                .filter(|p| p.dimension().unwrap() == 1)
                .count(),
            4
        );
        assert_eq!(
            c.cells()
                .iter()
                .filter(|p| p.dimension().unwrap() == 0)
                .count(),
            5
        );
        assert!(c.is_valid_complex());
        assert!(c.support_contains(&qvec(&[0, 0])));
        assert!(c.support_contains(&[qq(1, 2), qi(0)]));
        assert!(!c.support_contains(&[qq(1, 2), qq(1, 2)]));
    }

    #[test]
    fn arrangement_with_overlap_dedupes() {
        let a = poly(2, &[(&[-1, 0], 0)], &[(&[0, 1], 0)]);
        let b = poly(2, &[(&[1, 0], 0)], &[(&[0, 1], 0)]);
        let c = PolyhedralComplex::arrangement_union(2, &[a.clone(), b, a]).unwrap();
        // Two opposite rays sharing the origin.
        assert_eq!(c.cells().len(), 3);
        assert_eq!(c.maximal_cells().len(), 2);
    }

    #[test]
    fn find_cell_prefers_smallest() {
        let left = poly(2, &[(&[1, 0], 0)], &[]);
        let right = poly(2, &[(&[-1, 0], 0)], &[]);
        let c = PolyhedralComplex::from_maximal_cells(2, vec![left, right]).unwrap();
        let at_wall = c.find_cell(&qvec(&[0, 3])).unwrap();
        assert_eq!(c.cells()[at_wall].dimension().unwrap(), 1);
        let inside = c.find_cell(&qvec(&[-2, 0])).unwrap();
        assert_eq!(c.cells()[inside].dimension().unwrap(), 2);
        assert_eq!(c.find_cell(&qvec(&[0, 0])), Some(at_wall));
    }

    #[test]
    fn json_round_trip() {
        let left = poly(2, &[(&[1, 0], 0)], &[]);
        let right = poly(2, &[(&[-1, 0], 0)], &[]);
        let c = PolyhedralComplex::from_maximal_cells(2, vec![left, right]).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        let c2: PolyhedralComplex = serde_json::from_str(&s).unwrap();
        assert_eq!(c, c2);
        assert_eq!(s, serde_json::to_string(&c2).unwrap());
    }

    #[test]
    fn empty_complex_behaviour() {
        let e = PolyhedralComplex::empty(3);
        assert!(e.is_empty());
        assert_eq!(e.dimension(), None);
        assert!(!e.support_contains(&qvec(&[0, 0, 0])));
        assert_eq!(e.skeleton(1), e);
    }
}
