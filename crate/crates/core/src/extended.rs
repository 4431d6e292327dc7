//! Boundary behavior of tropical sets along a fan of directions.
//!
//! A pointed rational fan decomposes the directions at infinity. Each cone
//! sigma contributes a stratum with coordinate space R^n / span(sigma),
//! coordinatized by a canonical lattice basis of the orthogonal of sigma.
//! The closure of a polyhedral set meets the sigma-stratum in the
//! projection of those cells whose recession cone reaches the relative
//! interior of sigma; the zero cone recovers the set itself.

use crate::error::{Error, Result};
use crate::linalg::{orthogonal_lattice, primitive, rank_q};
use crate::par::par_map;
use crate::polyhedra::lp::{maximize, Lp, LpOutcome};
use crate::polyhedra::{cone_from_generators, PolyhedralComplex, Polyhedron};
use crate::rat::{qvec, Q};
use num_traits::{One, Zero};
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeSet;

/// A finite fan of pointed rational cones, closed under taking faces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fan {
    rank: usize,
    /// Sorted by (dimension, representation); the zero cone is first.
    cones: Vec<Polyhedron>,
}

impl Fan {
    /// Builds the fan generated by the given ray lists. The input cones
    /// are closed under faces; the result is rejected unless all cones
    /// are pointed and pairwise intersections are common faces.
    pub fn from_generators(rank: usize, generators: &[Vec<Vec<i64>>]) -> Result<Fan> {
        let mut input = Vec::with_capacity(generators.len().max(1));
        for rays in generators {
            if rays.iter().any(|r| r.len() != rank) {
                return Err(Error::InvalidInput("ray length does not match rank".into()));
            }
            input.push(cone_from_generators(rank, rays));
        }
        if input.is_empty() {
            input.push(cone_from_generators(rank, &[]));
        }
        for cone in &input {
            let normals: Vec<Vec<Q>> = cone
                .equalities()
                .iter()
                .chain(cone.inequalities())
                .map(|c| c.normal.clone())
                .collect();
            if rank_q(&normals) != rank {
                return Err(Error::InvalidInput(
                    "fan cone is not pointed: it contains a line".into(),
                ));
            }
        }
        let mut seen: BTreeSet<Polyhedron> = BTreeSet::new();
        let mut queue = input;
        while let Some(cone) = queue.pop() {
            if !seen.insert(cone.clone()) {
                continue;
            }
            for f in cone.facets()? {
                queue.push(f);
            }
        }
        let mut cones: Vec<Polyhedron> = seen.into_iter().collect();
        cones.sort_by_cached_key(|c| (c.dimension().unwrap(), c.clone()));
        for (i, a) in cones.iter().enumerate() {
            for b in cones.iter().skip(i + 1) {
                let meet = a.intersect(b);
                if !meet.is_face_of(a) || !meet.is_face_of(b) {
                    return Err(Error::InvalidInput(
                        "cone intersection is not a common face".into(),
                    ));
                }
            }
        }
        Ok(Fan { rank, cones })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn cones(&self) -> &[Polyhedron] {
        &self.cones
    }

    pub fn cone_dim(&self, i: usize) -> usize {
        self.cones[i].dimension().expect("fan cones are nonempty")
    }

    /// Indices of cones not properly contained in another cone.
    pub fn maximal_cones(&self) -> Vec<usize> {
        (0..self.cones.len())
            .filter(|&i| {
                !self
                    .cones
                    .iter()
                    .enumerate()
                    .any(|(j, c)| j != i && c.contains_polyhedron(&self.cones[i]))
            })
            .collect()
    }

    /// Canonical integer basis of the lattice orthogonal to cone i; its
    /// pairing rows coordinatize the stratum at infinity in direction i.
    pub fn stratum_projection(&self, i: usize) -> Vec<Vec<i64>> {
        let span: Vec<Vec<i64>> = self.cones[i]
            .direction_space()
            .iter()
            .map(|v| {
                primitive(v)
                    .into_iter()
                    .map(|b| i64::try_from(b).expect("cone data fits in i64"))
                    .collect()
            })
            .collect();
        orthogonal_lattice(&span, self.rank)
    }

    pub fn stratum_rank(&self, i: usize) -> usize {
        self.rank - self.cone_dim(i)
    }

    /// Closure of the complex's support across all strata of this fan.
    pub fn extended_closure(&self, complex: &PolyhedralComplex) -> Result<ExtendedComplex> {
        if complex.rank() != self.rank {
            return Err(Error::InvalidInput(
                "complex rank does not match fan rank".into(),
            ));
        }
        let maximal: Vec<&Polyhedron> = complex
            .maximal_cells()
            .into_iter()
            .map(|i| &complex.cells()[i])
            .collect();
        let recessions: Vec<Polyhedron> = maximal
            .iter()
            .map(|c| c.recession_cone())
            .collect::<Result<_>>()?;
        let mut components = Vec::with_capacity(self.cones.len());
        for (i, cone) in self.cones.iter().enumerate() {
            let m = self.stratum_rank(i);
            let piece = if self.cone_dim(i) == 0 {
                complex.clone()
            } else {
                let chosen: Vec<&Polyhedron> = maximal
                    .iter()
                    .zip(&recessions)
                    .filter(|(_, rec)| recession_meets_relint(rec, cone))
                    .map(|(c, _)| *c)
                    .collect();
                let rows: Vec<Vec<Q>> =
                    self.stratum_projection(i).iter().map(|r| qvec(r)).collect();
                let images: Vec<Polyhedron> = par_map(&chosen, |c| c.linear_image(&rows));
                PolyhedralComplex::arrangement_union(m, &images)?
            };
            components.push(StratumComponent {
                cone: i,
                stratum_rank: m,
                complex: piece,
            });
        }
        Ok(ExtendedComplex {
            ambient_rank: self.rank,
            components,
        })
    }
}

/// Whether the recession cone reaches relint(cone): some x in both with
/// strictly positive slack on every facet of the cone. Both sets are
/// cones, so scaling reduces the question to maximizing t with slacks at
/// least t and t capped at 1; a positive optimum decides.
fn recession_meets_relint(rec: &Polyhedron, cone: &Polyhedron) -> bool {
    let n = rec.rank();
    let pad = |normal: &[Q]| {
        let mut row = normal.to_vec();
        row.push(Q::zero());
        row
    };
    let mut ineqs: Vec<(Vec<Q>, Q)> = Vec::new();
    let mut eqs: Vec<(Vec<Q>, Q)> = Vec::new();
    for c in rec.equalities() {
        eqs.push((pad(&c.normal), c.offset.clone()));
    }
    for c in rec.inequalities() {
        ineqs.push((pad(&c.normal), c.offset.clone()));
    }
    for c in cone.equalities() {
        eqs.push((pad(&c.normal), c.offset.clone()));
    }
    for c in cone.inequalities() {
        // normal.x + t <= 0 keeps slack at least t.
        let mut row = pad(&c.normal);
        row[n] = Q::one();
        ineqs.push((row, c.offset.clone()));
    }
    let mut cap = vec![Q::zero(); n + 1];
    cap[n] = Q::one();
    ineqs.push((cap.clone(), Q::one()));
    let lp = Lp {
        nvars: n + 1,
        ineqs,
        eqs,
    };
    match maximize(&lp, &cap) {
        LpOutcome::Optimal { value, .. } => value > Q::zero(),
        LpOutcome::Unbounded => unreachable!("objective is capped"),
        LpOutcome::Infeasible => false,
    }
}

/// One stratum's slice of an extended closure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StratumComponent {
    /// Index of the cone in the fan.
    pub cone: usize,
    pub stratum_rank: usize,
    pub complex: PolyhedralComplex,
}

/// Closure of a tropical set across the strata of a fan. Component order
/// follows the fan's cone order; the zero cone's component is the
/// original set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedComplex {
    ambient_rank: usize,
    components: Vec<StratumComponent>,
}

impl ExtendedComplex {
    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn components(&self) -> &[StratumComponent] {
        &self.components
    }

    /// Cone index whose stratum carries the top-dimensional part of the
    /// closure. Ties prefer lower-dimensional cones (deeper strata lose),
    /// then lower cone index. None when every component is empty.
    pub fn dense_stratum(&self) -> Option<usize> {
        let mut best: Option<(usize, usize, usize)> = None;
        for comp in &self.components {
            let Some(d) = comp.complex.dimension() else {
                continue;
            };
            let cone_dim = self.ambient_rank - comp.stratum_rank;
            let better = match &best {
                None => true,
                Some((bd, bcd, _)) => d > *bd || (d == *bd && cone_dim < *bcd),
            };
            if better {
                best = Some((d, cone_dim, comp.cone));
            }
        }
        best.map(|(_, _, i)| i)
    }
}

impl Serialize for StratumComponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("StratumComponent", 3)?;
        st.serialize_field("cone", &self.cone)?;
        st.serialize_field("stratum_rank", &self.stratum_rank)?;
        st.serialize_field("complex", &self.complex)?;
        st.end()
    }
}

impl Serialize for ExtendedComplex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ExtendedComplex", 2)?;
        st.serialize_field("ambient_rank", &self.ambient_rank)?;
        st.serialize_field("components", &self.components)?;
        st.end()
    }
}

#[derive(Serialize, Deserialize)]
struct FanDto {
    rank: usize,
    cones: Vec<Vec<Vec<i64>>>,
}

impl Serialize for Fan {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let cones = self
            .maximal_cones()
            .into_iter()
            .map(|i| {
                let vrep = self.cones[i].generators().expect("fan cones are nonempty");
                vrep.rays
                    .iter()
                    .map(|r| {
                        primitive(r)
                            .into_iter()
                            .map(|b| i64::try_from(b).expect("ray fits in i64"))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        FanDto {
            rank: self.rank,
            cones,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Fan {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let dto = FanDto::deserialize(d)?;
        Fan::from_generators(dto.rank, &dto.cones).map_err(serde::de::Error::custom)
    }
}
