//! Projection of tropical sets under monomial coordinate changes.
//!
//! An integer matrix A with full row rank defines a monomial map between
//! tori; its tropicalization is the linear map w -> A w. Images of a
//! polyhedral complex are computed cell by cell and reassembled through
//! the arrangement of the image cells, since images of distinct cells
//! need not meet along faces. Preimages pull constraint systems back
//! through A and stay complexes automatically.

use crate::error::{Error, Result};
use crate::linalg::rank_q;
use crate::par::par_map;
use crate::polyhedra::{Constraint, PolyhedralComplex, Polyhedron};
use crate::rat::{qvec, Q};
use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize};

/// Integer matrix with full row rank, acting on tropical coordinates as
/// w -> A w.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct MonomialMap {
    rows: Vec<Vec<i64>>,
}

impl MonomialMap {
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self> {
        let m = rows.len();
        if m == 0 {
            return Err(Error::InvalidInput("monomial map needs rows".into()));
        }
        let n = rows[0].len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("ragged monomial map matrix".into()));
        }
        if m > n {
            return Err(Error::InvalidInput(format!(
                "monomial map has {m} rows but only {n} columns"
            )));
        }
        let q_rows: Vec<Vec<Q>> = rows.iter().map(|r| qvec(r)).collect();
        if rank_q(&q_rows) != m {
            return Err(Error::InvalidInput(
                "monomial map rows are linearly dependent".into(),
            ));
        }
        Ok(MonomialMap { rows })
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn domain_rank(&self) -> usize {
        self.rows[0].len()
    }

    pub fn codomain_rank(&self) -> usize {
        self.rows.len()
    }

    pub fn matrix_q(&self) -> Vec<Vec<Q>> {
        self.rows.iter().map(|r| qvec(r)).collect()
    }

    pub fn apply(&self, w: &[Q]) -> Vec<Q> {
        self.rows
            .iter()
            .map(|r| crate::rat::dot_int(w, r))
            .collect()
    }

    /// Transposed action on exponents: u -> u A, so that monomials map to
    /// monomials.
    pub fn pull_exponent(&self, u: &[i64]) -> Vec<i64> {
        (0..self.domain_rank())
            .map(|j| u.iter().zip(&self.rows).map(|(&c, r)| c * r[j]).sum())
            .collect()
    }

    /// Whether w -> A w is injective on the cell: the kernel of A meets
    /// the cell's direction space only in 0.
    pub fn injective_on(&self, cell: &Polyhedron) -> bool {
        let mut stacked = self.matrix_q();
        stacked.extend(cell.equalities().iter().map(|c| c.normal.clone()));
        rank_q(&stacked) == self.domain_rank()
    }

    /// The kernel of A as a polyhedron (a linear subspace of the domain).
    fn kernel_polyhedron(&self) -> Polyhedron {
        let eqs = self
            .rows
            .iter()
            .map(|r| Constraint::new(qvec(r), Q::zero()))
            .collect();
        Polyhedron::new(self.domain_rank(), Vec::new(), eqs)
    }

    /// Image of the complex's support as a complex in the codomain.
    /// Requires injectivity on every maximal cell; without it the map is
    /// not generic for this support and the image may drop dimension.
    pub fn tropical_image(&self, complex: &PolyhedralComplex) -> Result<PolyhedralComplex> {
        if complex.rank() != self.domain_rank() {
            return Err(Error::InvalidInput(
                "complex rank does not match map domain".into(),
            ));
        }
        if complex.is_empty() {
            return Ok(PolyhedralComplex::empty(self.codomain_rank()));
        }
        let maximal: Vec<&Polyhedron> = complex
            .maximal_cells()
            .into_iter()
            .map(|i| &complex.cells()[i])
            .collect();
        if let Some(bad) = maximal.iter().position(|c| !self.injective_on(c)) {
            return Err(Error::NonGenericMap(format!(
                "map collapses directions of maximal cell {bad}"
            )));
        }
        let rows = self.matrix_q();
        let images: Vec<Polyhedron> = par_map(&maximal, |c| c.linear_image(&rows));
        PolyhedralComplex::arrangement_union(self.codomain_rank(), &images)
    }

    /// Preimage of the complex's support, one pulled-back cell per
    /// maximal cell downstairs.
    pub fn preimage(&self, complex: &PolyhedralComplex) -> Result<PolyhedralComplex> {
        if complex.rank() != self.codomain_rank() {
            return Err(Error::InvalidInput(
                "complex rank does not match map codomain".into(),
            ));
        }
        let rows = self.matrix_q();
        let n = self.domain_rank();
        let maximal: Vec<&Polyhedron> = complex
            .maximal_cells()
            .into_iter()
            .map(|i| &complex.cells()[i])
            .collect();
        let pulled: Vec<Polyhedron> = par_map(&maximal, |c| c.linear_preimage(&rows, n));
        PolyhedralComplex::from_maximal_cells(n, pulled)
    }

    /// Whether every fiber of the map meets the complex's support in a
    /// bounded set: no maximal cell's recession cone contains a nonzero
    /// kernel direction.
    pub fn fibers_bounded(&self, complex: &PolyhedralComplex) -> Result<bool> {
        if complex.rank() != self.domain_rank() {
            return Err(Error::InvalidInput(
                "complex rank does not match map domain".into(),
            ));
        }
        let kernel = self.kernel_polyhedron();
        for i in complex.maximal_cells() {
            let rec = complex.cells()[i].recession_cone()?;
            let meet = rec.intersect(&kernel);
            if meet.dimension()? > 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl<'de> Deserialize<'de> for MonomialMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<i64>>::deserialize(d)?;
        MonomialMap::new(rows).map_err(serde::de::Error::custom)
    }
}

/// Draws candidate matrices with entries in [-entry_bound, entry_bound]
/// from a seeded stream until one is injective on every maximal cell of
/// the complex. Candidates are generated in a fixed order and checked in
/// parallel batches, keeping the result independent of thread count.
/// Fails with `BudgetExhausted` after `budget` candidates.
pub fn sample_generic(
    codomain_rank: usize,
    complex: &PolyhedralComplex,
    entry_bound: i64,
    seed: u64,
    budget: usize,
) -> Result<MonomialMap> {
    let n = complex.rank();
    if codomain_rank == 0 || codomain_rank > n {
        return Err(Error::InvalidInput(format!(
            "cannot project rank {n} onto rank {codomain_rank}"
        )));
    }
    if entry_bound <= 0 {
        return Err(Error::InvalidInput("entry bound must be positive".into()));
    }
    let maximal: Vec<&Polyhedron> = complex
        .maximal_cells()
        .into_iter()
        .map(|i| &complex.cells()[i])
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    const BATCH: usize = 16;
    let mut tried = 0;
    while tried < budget {
        let take = BATCH.min(budget - tried);
        tried += take;
        let candidates: Vec<Vec<Vec<i64>>> = (0..take)
            .map(|_| {
                (0..codomain_rank)
                    .map(|_| {
                        (0..n)
                            .map(|_| rng.gen_range(-entry_bound..=entry_bound))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let hits: Vec<Option<MonomialMap>> = par_map(&candidates, |rows| {
            MonomialMap::new(rows.clone())
                .ok()
                .filter(|m| maximal.iter().all(|c| m.injective_on(c)))
        });
        if let Some(map) = hits.into_iter().flatten().next() {
            return Ok(map);
        }
    }
    Err(Error::BudgetExhausted(format!(
        "no generic map found among {budget} candidates"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::qi;
    use crate::series::LaurentPolynomial;
    use crate::trophyper::tropicalize;
    use crate::valcoef::ValuedCoefficient;

    fn plane_in_3d() -> PolyhedralComplex {
        // Trop of x + y + z + 1 in R^3; a 2-dimensional fan.
        let f = LaurentPolynomial::from_terms(
            3,
            vec![
                (vec![0, 0, 0], ValuedCoefficient::one()),
                (vec![1, 0, 0], ValuedCoefficient::one()),
                (vec![0, 1, 0], ValuedCoefficient::one()),
                (vec![0, 0, 1], ValuedCoefficient::one()),
            ],
        )
        .unwrap();
        tropicalize(&f).unwrap().tropical_hypersurface().unwrap()
    }

    #[test]
    fn validation() {
        assert!(MonomialMap::new(vec![]).is_err());
        assert!(MonomialMap::new(vec![vec![1, 0], vec![2, 0]]).is_err());
        assert!(MonomialMap::new(vec![vec![1], vec![0]]).is_err());
        let a = MonomialMap::new(vec![vec![1, 0, 2], vec![0, 1, -1]]).unwrap();
        assert_eq!(a.domain_rank(), 3);
        assert_eq!(a.codomain_rank(), 2);
    }

    #[test]
    fn apply_and_pull() {
        let a = MonomialMap::new(vec![vec![1, 2, 0], vec![0, -1, 3]]).unwrap();
        assert_eq!(
            a.apply(&crate::rat::qvec(&[1, 1, 1])),
            crate::rat::qvec(&[3, 2])
        );
        // (u A) . w = u . (A w) for exponent u = (1, 1).
        assert_eq!(a.pull_exponent(&[1, 1]), vec![1, 1, 3]);
    }

    #[test]
    fn image_of_a_line_in_the_plane() {
        // The diagonal w1 = w2 maps under (w1, w2) -> w1 + w2 onto R.
        let diag = Polyhedron::new(2, Vec::new(), vec![Constraint::from_ints(&[1, -1], 0)]);
        let complex = PolyhedralComplex::from_maximal_cells(2, vec![diag]).unwrap();
        let a = MonomialMap::new(vec![vec![1, 1]]).unwrap();
        let image = a.tropical_image(&complex).unwrap();
        assert_eq!(image.dimension(), Some(1));
        assert!(image.support_contains(&[qi(-17)]));

        // Projection onto the first coordinate kills the antidiagonal.
        let anti = Polyhedron::new(2, Vec::new(), vec![Constraint::from_ints(&[1, 1], 0)]);
        let complex = PolyhedralComplex::from_maximal_cells(2, vec![anti]).unwrap();
        let first = MonomialMap::new(vec![vec![1, 1]]).unwrap();
        assert!(matches!(
            first.tropical_image(&complex),
            Err(Error::NonGenericMap(_))
        ));
    }

    #[test]
    fn plane_projects_onto_the_whole_plane() {
        let h = plane_in_3d();
        // The coordinate projection is not generic here: several cones
        // contain the e3 kernel direction.
        let coord = MonomialMap::new(vec![vec![1, 0, 0], vec![0, 1, 0]]).unwrap();
        assert!(matches!(
            coord.tropical_image(&h),
            Err(Error::NonGenericMap(_))
        ));
        // Kernel span{(-2,-3,1)} misses all six cone directions, and every
        // line in that direction crosses the fan, so the image is R^2.
        let a = MonomialMap::new(vec![vec![1, 0, 2], vec![0, 1, 3]]).unwrap();
        let image = a.tropical_image(&h).unwrap();
        assert_eq!(image.dimension(), Some(2));
        for w in [[3, 5], [-2, 1], [0, 0], [-4, -9]] {
            assert!(image.support_contains(&crate::rat::qvec(&w)));
        }
    }

    #[test]
    fn preimage_pulls_back_membership() {
        // A diagonal segment sums to [0, 2]; its preimage is the strip
        // 0 <= w1 + w2 <= 2.
        let seg = Polyhedron::new(
            2,
            vec![
                Constraint::from_ints(&[1, 0], 1),
                Constraint::from_ints(&[-1, 0], 0),
            ],
            vec![Constraint::from_ints(&[1, -1], 0)],
        );
        let c = PolyhedralComplex::from_maximal_cells(2, vec![seg]).unwrap();
        let a = MonomialMap::new(vec![vec![1, 1]]).unwrap();
        let image = a.tropical_image(&c).unwrap();
        let back = a.preimage(&image).unwrap();
        assert_eq!(back.rank(), 2);
        for w in [[1, 0], [-1, 2], [5, -1], [3, 3], [0, 0], [2, 0]] {
            let wq = crate::rat::qvec(&w);
            assert_eq!(
                back.support_contains(&wq),
                image.support_contains(&a.apply(&wq)),
            );
        }
        assert!(back.support_contains(&crate::rat::qvec(&[1, 0])));
        assert!(!back.support_contains(&crate::rat::qvec(&[3, 3])));
    }

    #[test]
    fn fiber_boundedness() {
        let h = plane_in_3d();
        // Projecting out z leaves fibers parallel to e3, and the cone
        // spanned by -e3 lies in the fan, so fibers are unbounded.
        let a = MonomialMap::new(vec![vec![1, 0, 0], vec![0, 1, 0]]).unwrap();
        assert!(!a.fibers_bounded(&h).unwrap());

        // A bounded segment has bounded fibers under any map.
        let seg = Polyhedron::new(
            2,
            vec![
                Constraint::from_ints(&[1, 0], 1),
                Constraint::from_ints(&[-1, 0], 0),
            ],
            vec![Constraint::from_ints(&[0, 1], 0)],
        );
        let c = PolyhedralComplex::from_maximal_cells(2, vec![seg]).unwrap();
        let b = MonomialMap::new(vec![vec![0, 1]]).unwrap();
        assert!(b.fibers_bounded(&c).unwrap());
    }

    #[test]
    fn sampling_respects_seed_and_budget() {
        let h = plane_in_3d();
        let a = sample_generic(2, &h, 9, 11, 64).unwrap();
        let b = sample_generic(2, &h, 9, 11, 64).unwrap();
        assert_eq!(a, b, "same seed gives same map");
        for i in h.maximal_cells() {
            assert!(a.injective_on(&h.cells()[i]));
        }
        assert!(matches!(
            sample_generic(2, &h, 9, 0, 0),
            Err(Error::BudgetExhausted(_))
        ));
        assert!(sample_generic(4, &h, 9, 0, 8).is_err());
        assert!(sample_generic(2, &h, 0, 0, 8).is_err());
    }

    #[test]
    fn map_json_round_trip() {
        let a = MonomialMap::new(vec![vec![1, 0, 2], vec![0, 1, -1]]).unwrap();
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, "[[1,0,2],[0,1,-1]]");
        let back: MonomialMap = serde_json::from_str(&s).unwrap();
        assert_eq!(a, back);
        assert!(serde_json::from_str::<MonomialMap>("[[1,0],[2,0]]").is_err());
    }
}
