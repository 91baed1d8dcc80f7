//! The two integer tables attached to a refinement: the distance function
//! `d` and the intersection function `I`, together with the wall identity
//! that ties them together.
//!
//! `d(v', v) = r - c_v(v')` measures how far a refined vertex sits from a
//! base vertex in barycentric terms. `I(tau, v')` records the intersection
//! number of the toric curve of a relative wall with the divisor of a refined
//! vertex: +1 at the two opposite vertices, the wall-relation coefficients at
//! the shared vertices, 0 elsewhere. For every base vertex `v` and wall `tau`
//! the weighted sum `sum_{v'} (r - d(v', v)) I(tau, v')` vanishes exactly.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::complex::VertexId;
use crate::lattice::{wall_relation, LatticeError};
use crate::refinement::{Refinement, RelativeWall};
use crate::resolution::slice_vector;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ObstructionError {
    #[error("wall {wall}: {source}")]
    WallRelation {
        wall: String,
        #[source]
        source: LatticeError,
    },
}

/// `d(v', v)` for every refined vertex and base vertex.
#[derive(Clone, Debug)]
pub struct DistanceTable {
    r: i64,
    values: BTreeMap<(usize, VertexId), i64>,
}

impl DistanceTable {
    pub fn get(&self, vtilde: usize, v: &str) -> i64 {
        *self
            .values
            .get(&(vtilde, v.to_string()))
            .unwrap_or(&self.r)
    }

    /// `r - d(v', v)`: the barycentric weight of `v'` at `v`.
    pub fn weight(&self, vtilde: usize, v: &str) -> i64 {
        self.r - self.get(vtilde, v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(usize, VertexId), &i64)> {
        self.values.iter()
    }
}

/// Builds the distance table directly from the stored barycentric
/// coordinates.
pub fn distance_table(refinement: &Refinement) -> DistanceTable {
    let r = refinement.r();
    let mut values = BTreeMap::new();
    for i in 0..refinement.vertex_count() {
        for v in refinement.base().vertices() {
            values.insert((i, v.clone()), r - refinement.coord(i, v));
        }
    }
    DistanceTable { r, values }
}

/// `I(tau, v')` for every relative wall, stored sparsely on the flanking
/// vertices.
#[derive(Clone, Debug)]
pub struct IntersectionTable {
    walls: Vec<RelativeWall>,
    values: Vec<BTreeMap<usize, i64>>,
}

impl IntersectionTable {
    pub fn walls(&self) -> &[RelativeWall] {
        &self.walls
    }

    pub fn wall_count(&self) -> usize {
        self.walls.len()
    }

    pub fn get(&self, wall: usize, vtilde: usize) -> i64 {
        *self.values[wall].get(&vtilde).unwrap_or(&0)
    }

    pub fn column(&self, wall: usize) -> &BTreeMap<usize, i64> {
        &self.values[wall]
    }

    /// Index of the wall with the given stable key.
    pub fn wall_index(&self, refinement: &Refinement, key: &str) -> Option<usize> {
        self.walls.iter().position(|w| w.key(refinement) == key)
    }
}

/// Computes every wall's intersection column through the wall relation of
/// its flanking cells, in the lattice of the wall's base simplex.
pub fn intersection_table(
    refinement: &Refinement,
) -> Result<IntersectionTable, ObstructionError> {
    let walls = refinement.relative_walls();
    let mut values = Vec::with_capacity(walls.len());
    for wall in &walls {
        let carrier: Vec<VertexId> = wall.base.vertices().cloned().collect();
        let (flank_a, flank_b) = &wall.flanks;
        let opposite_a = *flank_a.iter().find(|i| !wall.wall.contains(i)).unwrap();
        let opposite_b = *flank_b.iter().find(|i| !wall.wall.contains(i)).unwrap();
        let mut order: Vec<usize> = Vec::with_capacity(wall.wall.len() + 2);
        order.push(opposite_a);
        order.extend(wall.wall.iter().copied());
        order.push(opposite_b);
        let rays: Vec<_> = order
            .iter()
            .map(|&i| slice_vector(&refinement.vertex(i).coords, &carrier))
            .collect();
        let shared: Vec<usize> = (1..=wall.wall.len()).collect();
        let relation =
            wall_relation(&rays, &shared).map_err(|source| ObstructionError::WallRelation {
                wall: wall.key(refinement),
                source,
            })?;
        let column: BTreeMap<usize, i64> = order
            .iter()
            .zip(&relation.coefficients)
            .filter(|(_, &c)| c != 0)
            .map(|(&i, &c)| (i, c))
            .collect();
        values.push(column);
    }
    Ok(IntersectionTable { walls, values })
}

/// Both tables of a refinement.
#[derive(Clone, Debug)]
pub struct ObstructionTables {
    pub d: DistanceTable,
    pub i: IntersectionTable,
}

pub fn tables(refinement: &Refinement) -> Result<ObstructionTables, ObstructionError> {
    Ok(ObstructionTables {
        d: distance_table(refinement),
        i: intersection_table(refinement)?,
    })
}

/// Outcome of checking `sum_{v'} (r - d(v', v)) I(tau, v') = 0` for every
/// base vertex and relative wall. Failures are reported, not thrown.
#[derive(Clone, Debug)]
pub struct WallIdentityReport {
    pub checked: usize,
    /// `(base vertex, wall key, nonzero sum)` triples.
    pub violations: Vec<(VertexId, String, i64)>,
}

impl WallIdentityReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn verify_wall_identity(
    refinement: &Refinement,
    tables: &ObstructionTables,
) -> WallIdentityReport {
    let mut checked = 0;
    let mut violations = Vec::new();
    for v in refinement.base().vertices() {
        for (w, wall) in tables.i.walls().iter().enumerate() {
            checked += 1;
            let sum: i64 = tables
                .i
                .column(w)
                .iter()
                .map(|(&vtilde, &value)| tables.d.weight(vtilde, v) * value)
                .sum();
            if sum != 0 {
                violations.push((v.clone(), wall.key(refinement), sum));
            }
        }
    }
    WallIdentityReport { checked, violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::DualComplex;
    use crate::resolution::LocalFanState;

    fn chain() -> DualComplex {
        DualComplex::build(
            ["1", "2", "3"].map(String::from),
            vec![vec!["1".into(), "2".into()], vec!["2".into(), "3".into()]],
        )
        .unwrap()
    }

    fn triangle() -> DualComplex {
        DualComplex::build(
            ["1", "2", "3"].map(String::from),
            vec![vec!["1".into(), "2".into(), "3".into()]],
        )
        .unwrap()
    }

    fn resolve(complex: &DualComplex, r: i64) -> Refinement {
        let mut state = LocalFanState::initial_state(complex, r).unwrap();
        state.default_schedule().unwrap();
        Refinement::from_state(&state).unwrap()
    }

    #[test]
    fn distances_read_off_the_coordinates() {
        let rf = resolve(&chain(), 4);
        let d = distance_table(&rf);
        for i in 0..rf.vertex_count() {
            let tuple: Vec<i64> = ["1", "2", "3"].iter().map(|v| rf.coord(i, v)).collect();
            assert_eq!(d.get(i, "1"), 4 - tuple[0]);
            assert_eq!(d.get(i, "2"), 4 - tuple[1]);
            assert_eq!(d.get(i, "3"), 4 - tuple[2]);
        }
        let far = rf.index_of_id("(0,2,2)").unwrap();
        assert_eq!(d.get(far, "1"), 4);
        for v in ["1", "2", "3"] {
            assert_eq!(d.get(rf.unit_vertex(v), v), 0);
        }
    }

    /// Each distance agrees with re-solving the barycentric expansion of the
    /// slice vector in the basis of the carrier's unit rays.
    #[test]
    fn distances_agree_with_the_linear_solve() {
        let rf = resolve(&triangle(), 3);
        let d = distance_table(&rf);
        for i in 0..rf.vertex_count() {
            // slice(v') = sum_i a_i * slice(w_i) with w_i the scaled unit
            // points; a_i = coord_i / r by construction.
            let sum: i64 = ["1", "2", "3"].iter().map(|v| rf.coord(i, v)).sum();
            assert_eq!(sum, 3);
            for v in ["1", "2", "3"] {
                assert_eq!(d.get(i, v), 3 - rf.coord(i, v));
            }
        }
    }

    #[test]
    fn intersection_column_of_an_interior_point() {
        let rf = resolve(&chain(), 4);
        let t = intersection_table(&rf).unwrap();
        let key = "1,2|(2,2,0)";
        let w = t.wall_index(&rf, key).unwrap();
        let at = |id: &str| t.get(w, rf.index_of_id(id).unwrap());
        assert_eq!(at("(1,3,0)"), 1);
        assert_eq!(at("(3,1,0)"), 1);
        assert_eq!(at("(2,2,0)"), -2);
        assert_eq!(at("(0,4,0)"), 0);
        assert_eq!(at("(4,0,0)"), 0);
    }

    #[test]
    fn intersection_column_for_r_two() {
        let two = DualComplex::build(
            ["1", "2"].map(String::from),
            vec![vec!["1".into(), "2".into()]],
        )
        .unwrap();
        let rf = resolve(&two, 2);
        let t = intersection_table(&rf).unwrap();
        assert_eq!(t.wall_count(), 1);
        let at = |id: &str| t.get(0, rf.index_of_id(id).unwrap());
        assert_eq!(at("(2,0)"), 1);
        assert_eq!(at("(0,2)"), 1);
        assert_eq!(at("(1,1)"), -2);
    }

    #[test]
    fn opposite_vertices_always_carry_one() {
        let rf = resolve(&triangle(), 3);
        let t = intersection_table(&rf).unwrap();
        for (w, wall) in t.walls().iter().enumerate() {
            let (a, b) = &wall.flanks;
            let opp_a = a.iter().find(|i| !wall.wall.contains(i)).unwrap();
            let opp_b = b.iter().find(|i| !wall.wall.contains(i)).unwrap();
            assert_eq!(t.get(w, *opp_a), 1);
            assert_eq!(t.get(w, *opp_b), 1);
        }
    }

    #[test]
    fn weights_sum_to_r_and_columns_annihilate_the_rays() {
        let rf = resolve(&triangle(), 3);
        let tb = tables(&rf).unwrap();
        for i in 0..rf.vertex_count() {
            let total: i64 = rf.base().vertices().map(|v| tb.d.weight(i, v)).sum();
            assert_eq!(total, rf.r());
        }
        for (w, wall) in tb.i.walls().iter().enumerate() {
            let carrier: Vec<VertexId> = wall.base.vertices().cloned().collect();
            let dim = carrier.len();
            for c in 0..dim {
                let sum: i64 = tb
                    .i
                    .column(w)
                    .iter()
                    .map(|(&vt, &val)| {
                        slice_vector(&rf.vertex(vt).coords, &carrier).0[c] * val
                    })
                    .sum();
                assert_eq!(sum, 0);
            }
        }
    }

    #[test]
    fn wall_identity_holds_on_resolved_complexes() {
        for r in 1..=4 {
            for complex in [chain(), triangle()] {
                let rf = resolve(&complex, r);
                let tb = tables(&rf).unwrap();
                let report = verify_wall_identity(&rf, &tb);
                assert!(report.pass(), "r={r}: {:?}", report.violations);
            }
        }
    }

    /// A single corrupted sign must surface as a nonzero sum at the matching
    /// (vertex, wall) pairs.
    #[test]
    fn corrupted_column_fails_the_identity() {
        let rf = resolve(&chain(), 4);
        let mut tb = tables(&rf).unwrap();
        let w = tb.i.wall_index(&rf, "1,2|(2,2,0)").unwrap();
        let target = rf.index_of_id("(3,1,0)").unwrap();
        tb.i.values[w].insert(target, -1);
        let report = verify_wall_identity(&rf, &tb);
        assert!(!report.pass());
        assert!(report
            .violations
            .iter()
            .any(|(v, key, _)| v == "1" && key == "1,2|(2,2,0)"));
    }
}
