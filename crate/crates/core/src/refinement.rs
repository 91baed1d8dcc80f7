//! The refinement `psi: C~ -> C` of a dual complex: refined vertices carry
//! integer barycentric coordinates summing to the ramification index, refined
//! facets triangulate each scaled maximal simplex into unimodular cells.
//!
//! A `Refinement` is either derived from a terminal [`LocalFanState`] or
//! imported directly; both paths run the full validation suite, so every
//! downstream table may assume regularity, exact cell counts, and canonical
//! edge subdivisions.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use thiserror::Error;

use crate::complex::{DualComplex, Simplex, VertexId};
use crate::lattice::is_regular;
use crate::resolution::{
    coords_sum, coords_support, coords_tuple, slice_vector, Coords, LocalFanState,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RefinementError {
    #[error("the fan state is not terminal: {0:?}")]
    NotTerminal(Vec<String>),
    #[error("refinement validation failed:\n{}", .0.join("\n"))]
    Validation(Vec<String>),
    #[error("unknown refined simplex {0}")]
    UnknownSimplex(String),
    #[error("unknown refined vertex {0}")]
    UnknownVertex(String),
}

/// A vertex of the refined complex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefinedVertex {
    /// Canonical id: the coordinate tuple over the sorted base vertices.
    pub id: String,
    /// A base simplex containing the coordinate support.
    pub carrier: Simplex,
    pub coords: Coords,
}

/// A wall of the subcomplex over a base simplex `sigma` with
/// `dim psi*(sigma) = dim sigma`: a codimension-one refined simplex flanked
/// by exactly two top-dimensional cells over `sigma`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelativeWall {
    pub base: Simplex,
    /// Vertex indices of the wall simplex, sorted.
    pub wall: Vec<usize>,
    /// The two flanking cells, each sorted, the pair sorted.
    pub flanks: (Vec<usize>, Vec<usize>),
    /// Fixed vertex of the wall (the lexicographically smallest).
    pub anchor: usize,
}

impl RelativeWall {
    /// Stable key: base vertices, then the wall's vertex ids.
    pub fn key(&self, refinement: &Refinement) -> String {
        format!(
            "{}|{}",
            self.base.vertices().map(|v| v.as_str()).collect::<Vec<_>>().join(","),
            self.wall
                .iter()
                .map(|&i| refinement.vertex(i).id.as_str())
                .collect::<Vec<_>>()
                .join("+")
        )
    }
}

#[derive(Clone, Debug)]
pub struct Refinement {
    base: DualComplex,
    r: i64,
    base_order: Vec<VertexId>,
    vertices: Vec<RefinedVertex>,
    index_by_coords: BTreeMap<Coords, usize>,
    facets: Vec<Vec<usize>>,
    /// Every simplex of the refined complex, as sorted index lists.
    simplices: BTreeSet<Vec<usize>>,
    /// Refined vertex over each base vertex.
    unit_vertex: BTreeMap<VertexId, usize>,
}

impl Refinement {
    /// Reads the refinement off a terminal fan state.
    pub fn from_state(state: &LocalFanState) -> Result<Self, RefinementError> {
        let terminal = state.check_terminal();
        if !terminal.regular {
            return Err(RefinementError::NotTerminal(terminal.offenders));
        }
        let mut points: BTreeSet<Coords> = BTreeSet::new();
        for rec in state.cones() {
            points.extend(rec.generators());
        }
        let vertices: Vec<(Coords, Simplex)> = points
            .into_iter()
            .map(|p| {
                let support = coords_support(&p);
                (p, support)
            })
            .collect();
        let facets: BTreeSet<BTreeSet<Coords>> =
            state.cones().map(|rec| rec.generators()).collect();
        Self::assemble(
            state.complex().clone(),
            state.r(),
            vertices,
            facets.into_iter().map(|f| f.into_iter().collect()).collect(),
        )
    }

    /// Builds a refinement from explicit vertex and facet data, rejecting
    /// anything that violates the refinement invariants.
    pub fn import_triangulation(
        base: DualComplex,
        r: i64,
        vertices: Vec<(Simplex, Coords)>,
        facets: Vec<Vec<Coords>>,
    ) -> Result<Self, RefinementError> {
        Self::assemble(base, r, vertices.into_iter().map(|(c, p)| (p, c)).collect(), facets)
    }

    fn assemble(
        base: DualComplex,
        r: i64,
        vertices: Vec<(Coords, Simplex)>,
        facets: Vec<Vec<Coords>>,
    ) -> Result<Self, RefinementError> {
        let mut violations: Vec<String> = Vec::new();
        if r < 1 {
            violations.push(format!("ramification index must be >= 1, got {r}"));
            return Err(RefinementError::Validation(violations));
        }
        let base_order: Vec<VertexId> = base.vertices().cloned().collect();

        let mut refined: Vec<RefinedVertex> = Vec::new();
        let mut index_by_coords: BTreeMap<Coords, usize> = BTreeMap::new();
        let mut sorted = vertices;
        sorted.sort_by_key(|(p, _)| coords_tuple(p, &base_order));
        for (p, carrier) in sorted {
            let id = tuple_id(&p, &base_order);
            if index_by_coords.contains_key(&p) {
                violations.push(format!("duplicate refined vertex {id}"));
                continue;
            }
            if p.values().any(|&c| c < 0) || p.is_empty() {
                violations.push(format!("vertex {id} has non-positive coordinates"));
                continue;
            }
            if coords_sum(&p) != r {
                violations.push(format!("vertex {id} coordinates do not sum to r = {r}"));
                continue;
            }
            let support = coords_support(&p);
            if !base.contains_simplex(&support) {
                violations.push(format!("vertex {id} is supported outside the base complex"));
                continue;
            }
            if !support.is_subset(&carrier) || !base.contains_simplex(&carrier) {
                violations.push(format!("vertex {id} has an invalid carrier"));
                continue;
            }
            index_by_coords.insert(p.clone(), refined.len());
            refined.push(RefinedVertex { id, carrier, coords: p });
        }

        // Unique refined vertex over each base vertex.
        let mut unit_vertex = BTreeMap::new();
        for v in base.vertices() {
            let unit: Coords = BTreeMap::from([(v.clone(), r)]);
            match index_by_coords.get(&unit) {
                Some(&i) => {
                    unit_vertex.insert(v.clone(), i);
                }
                None => violations.push(format!("no refined vertex over base vertex {v}")),
            }
        }

        // Facets: resolve, sort, reject junk.
        let mut facet_indices: Vec<Vec<usize>> = Vec::new();
        let mut seen = BTreeSet::new();
        for f in &facets {
            let mut idx = Vec::with_capacity(f.len());
            let mut ok = true;
            for p in f {
                match index_by_coords.get(p) {
                    Some(&i) => idx.push(i),
                    None => {
                        violations.push(format!(
                            "facet references unknown vertex {}",
                            tuple_id(p, &base_order)
                        ));
                        ok = false;
                    }
                }
            }
            if !ok {
                continue;
            }
            idx.sort_unstable();
            idx.dedup();
            if idx.len() != f.len() {
                violations.push("facet lists a repeated vertex".to_string());
                continue;
            }
            if !seen.insert(idx.clone()) {
                violations.push(format!("duplicate facet {idx:?}"));
                continue;
            }
            facet_indices.push(idx);
        }
        facet_indices.sort();

        let mut refinement = Refinement {
            base,
            r,
            base_order,
            vertices: refined,
            index_by_coords,
            facets: facet_indices,
            simplices: BTreeSet::new(),
            unit_vertex,
        };
        refinement.simplices = refinement
            .facets
            .iter()
            .flat_map(|f| subsets(f))
            .collect();
        refinement.validate(&mut violations);
        if violations.is_empty() {
            Ok(refinement)
        } else {
            Err(RefinementError::Validation(violations))
        }
    }

    fn validate(&self, violations: &mut Vec<String>) {
        let n_by_facet: Vec<Option<Simplex>> = self
            .facets
            .iter()
            .map(|f| {
                let sigma = self.support_union(f);
                if !self.base.contains_simplex(&sigma) {
                    violations.push(format!(
                        "facet {} lies over {} which is not a base simplex",
                        self.simplex_id(f),
                        sigma
                    ));
                    return None;
                }
                Some(sigma)
            })
            .collect();

        // Cell shape: |facet| = dim(sigma) + 1, sigma maximal, unimodular.
        let maximal: BTreeSet<Simplex> = self.base.facets().cloned().collect();
        for (f, sigma) in self.facets.iter().zip(&n_by_facet) {
            let Some(sigma) = sigma else { continue };
            if f.len() != sigma.len() {
                violations.push(format!(
                    "facet {} is not a top-dimensional cell over {}",
                    self.simplex_id(f),
                    sigma
                ));
                continue;
            }
            if !maximal.contains(sigma) {
                violations.push(format!(
                    "facet {} lies over the non-maximal simplex {}",
                    self.simplex_id(f),
                    sigma
                ));
                continue;
            }
            let carrier: Vec<VertexId> = sigma.vertices().cloned().collect();
            let rays: Vec<_> = f
                .iter()
                .map(|&i| slice_vector(&self.vertices[i].coords, &carrier))
                .collect();
            if !is_regular(&rays) {
                violations.push(format!(
                    "facet {} does not span a regular cone",
                    self.simplex_id(f)
                ));
            }
        }

        // Vertex coverage.
        let covered: BTreeSet<usize> = self.facets.iter().flatten().copied().collect();
        for (i, v) in self.vertices.iter().enumerate() {
            if !covered.contains(&i) {
                violations.push(format!("vertex {} appears in no facet", v.id));
            }
        }

        // Per maximal simplex: r^n cells with paired interior faces.
        for sigma in self.base.facets() {
            let n = sigma.dim();
            let cells: Vec<&Vec<usize>> = self
                .facets
                .iter()
                .zip(&n_by_facet)
                .filter(|(_, s)| s.as_ref() == Some(sigma))
                .map(|(f, _)| f)
                .collect();
            let expected = self.r.pow(n as u32);
            if cells.len() as i64 != expected {
                violations.push(format!(
                    "{} cells over {}, expected {}",
                    cells.len(),
                    sigma,
                    expected
                ));
                continue;
            }
            if n == 0 {
                continue;
            }
            let mut face_count: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
            for cell in &cells {
                for face in faces_of_codim_one(cell) {
                    *face_count.entry(face).or_insert(0) += 1;
                }
            }
            for (face, count) in face_count {
                let on_boundary = sigma.vertices().any(|s| {
                    face.iter().all(|&i| self.coord(i, s) == 0)
                });
                let expected = if on_boundary { 1 } else { 2 };
                if count != expected {
                    violations.push(format!(
                        "face {} of the cells over {} is shared by {} cells, expected {}",
                        self.simplex_id(&face),
                        sigma,
                        count,
                        expected
                    ));
                }
            }
        }

        // Canonical edge refinements: the r+1 points (r-k, k) and r segments.
        for edge in self.base.simplices_of_dim(1) {
            let pair: Vec<&VertexId> = edge.vertices().collect();
            let (v, w) = (pair[0], pair[1]);
            let on_edge: BTreeSet<usize> = (0..self.vertices.len())
                .filter(|&i| coords_support(&self.vertices[i].coords).is_subset(edge))
                .collect();
            if on_edge.len() as i64 != self.r + 1 {
                violations.push(format!(
                    "{} refined vertices over edge {}, expected {}",
                    on_edge.len(),
                    edge,
                    self.r + 1
                ));
                continue;
            }
            for k in 0..=self.r {
                let mut point = Coords::new();
                if self.r - k > 0 {
                    point.insert(v.clone(), self.r - k);
                }
                if k > 0 {
                    point.insert(w.clone(), k);
                }
                if !self.index_by_coords.contains_key(&point) {
                    violations.push(format!(
                        "edge {} is missing the point {}",
                        edge,
                        tuple_id(&point, &self.base_order)
                    ));
                }
            }
            let segments: Vec<&Vec<usize>> = self
                .simplices
                .iter()
                .filter(|s| s.len() == 2 && s.iter().all(|i| on_edge.contains(i)))
                .collect();
            if segments.len() as i64 != self.r {
                violations.push(format!(
                    "{} refined segments over edge {}, expected {}",
                    segments.len(),
                    edge,
                    self.r
                ));
            }
            // Exactly one refined neighbour of psi*(v) lies over the edge.
            for endpoint in [v, w] {
                if let Some(&unit) = self.unit_vertex.get(endpoint.as_str()) {
                    let neighbours = segments
                        .iter()
                        .filter(|s| s.contains(&unit))
                        .count();
                    if neighbours != 1 {
                        violations.push(format!(
                            "psi*({endpoint}) has {neighbours} neighbours over {edge}, expected 1"
                        ));
                    }
                }
            }
        }
    }

    pub fn base(&self) -> &DualComplex {
        &self.base
    }

    pub fn r(&self) -> i64 {
        self.r
    }

    /// Base vertices in their canonical (sorted) order; coordinate tuples
    /// follow this order.
    pub fn base_order(&self) -> &[VertexId] {
        &self.base_order
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex(&self, i: usize) -> &RefinedVertex {
        &self.vertices[i]
    }

    pub fn vertices(&self) -> impl Iterator<Item = &RefinedVertex> {
        self.vertices.iter()
    }

    pub fn facets(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.facets.iter()
    }

    pub fn index_of_id(&self, id: &str) -> Result<usize, RefinementError> {
        self.vertices
            .iter()
            .position(|v| v.id == id)
            .ok_or_else(|| RefinementError::UnknownVertex(id.to_string()))
    }

    pub fn index_of_coords(&self, coords: &Coords) -> Option<usize> {
        self.index_by_coords.get(coords).copied()
    }

    /// Barycentric coordinate of refined vertex `i` at base vertex `v`.
    pub fn coord(&self, i: usize, v: &str) -> i64 {
        *self.vertices[i].coords.get(v).unwrap_or(&0)
    }

    /// The unique refined vertex with full weight at `v`.
    pub fn unit_vertex(&self, v: &str) -> usize {
        self.unit_vertex[v]
    }

    pub fn contains_simplex(&self, s: &[usize]) -> bool {
        let mut sorted = s.to_vec();
        sorted.sort_unstable();
        self.simplices.contains(&sorted)
    }

    fn simplex_id(&self, s: &[usize]) -> String {
        s.iter().map(|&i| self.vertices[i].id.as_str()).join(" ")
    }

    fn support_union(&self, s: &[usize]) -> Simplex {
        Simplex::new(
            s.iter()
                .flat_map(|&i| self.vertices[i].coords.keys().cloned())
                .collect::<BTreeSet<_>>(),
        )
    }

    /// The image of a refined simplex: the smallest base simplex containing
    /// the coordinate supports of its vertices.
    pub fn psi(&self, s: &[usize]) -> Result<Simplex, RefinementError> {
        if !self.contains_simplex(s) {
            return Err(RefinementError::UnknownSimplex(self.simplex_id(s)));
        }
        Ok(self.support_union(s))
    }

    /// Relative adjacency: the base vertices adjacent to `psi(vtilde)` when
    /// that image is a vertex, empty otherwise.
    pub fn relative_adjacent(&self, vtilde: usize) -> BTreeSet<VertexId> {
        let support = coords_support(&self.vertices[vtilde].coords);
        if support.len() != 1 {
            return BTreeSet::new();
        }
        let v = support.vertices().next().unwrap().clone();
        self.base.adjacent_vertices(&v).expect("validated vertex")
    }

    /// Vertices sharing a refined edge with `i`.
    pub fn refined_adjacent(&self, i: usize) -> BTreeSet<usize> {
        self.simplices
            .iter()
            .filter(|s| s.len() == 2 && s.contains(&i))
            .flat_map(|s| s.iter().copied())
            .filter(|&j| j != i)
            .collect()
    }

    /// Top-dimensional simplices of `psi*(sigma)`: the refined
    /// `dim sigma`-cells supported inside `sigma`.
    pub fn cells_over(&self, sigma: &Simplex) -> Vec<Vec<usize>> {
        self.simplices
            .iter()
            .filter(|s| s.len() == sigma.len() && self.support_union(s).is_subset(sigma))
            .cloned()
            .collect()
    }

    /// All relative walls, over every base simplex of positive dimension,
    /// ordered by (base, wall).
    pub fn relative_walls(&self) -> Vec<RelativeWall> {
        let mut out = Vec::new();
        for sigma in self.base.simplices() {
            if sigma.dim() == 0 {
                continue;
            }
            let cells = self.cells_over(sigma);
            let mut by_face: BTreeMap<Vec<usize>, Vec<&Vec<usize>>> = BTreeMap::new();
            for cell in &cells {
                for face in faces_of_codim_one(cell) {
                    by_face.entry(face).or_default().push(cell);
                }
            }
            for (face, flanked) in by_face {
                if flanked.len() != 2 {
                    continue;
                }
                debug_assert_eq!(self.support_union(&face), *sigma, "wall support spans its base");
                let mut flanks = [flanked[0].clone(), flanked[1].clone()];
                flanks.sort();
                let [a, b] = flanks;
                out.push(RelativeWall {
                    base: sigma.clone(),
                    anchor: face[0],
                    wall: face,
                    flanks: (a, b),
                });
            }
        }
        out.sort_by(|x, y| (&x.base, &x.wall).cmp(&(&y.base, &y.wall)));
        out
    }
}

/// Canonical id of a slice point: its tuple over the sorted base vertices.
pub fn tuple_id(coords: &Coords, base_order: &[VertexId]) -> String {
    format!(
        "({})",
        coords_tuple(coords, base_order)
            .iter()
            .map(|x| x.to_string())
            .join(",")
    )
}

fn subsets(s: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 1u32..(1 << s.len()) {
        out.push(
            s.iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &v)| v)
                .collect(),
        );
    }
    out
}

fn faces_of_codim_one(cell: &[usize]) -> Vec<Vec<usize>> {
    (0..cell.len())
        .map(|skip| {
            cell.iter()
                .enumerate()
                .filter(|(i, _)| *i != skip)
                .map(|(_, &v)| v)
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
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

    fn coords(pairs: &[(&str, i64)]) -> Coords {
        pairs.iter().map(|(v, c)| (v.to_string(), *c)).collect()
    }

    #[test]
    fn chain_refinement_has_nine_vertices_and_eight_segments() {
        let r = resolve(&chain(), 4);
        assert_eq!(r.vertex_count(), 9);
        assert_eq!(r.facets().count(), 8);
        assert_eq!(r.relative_walls().len(), 6);
    }

    #[test]
    fn triangle_refinement_counts() {
        let r = resolve(&triangle(), 3);
        assert_eq!(r.vertex_count(), 10);
        assert_eq!(r.facets().count(), 9);
        // 6 interior edge points + 9 interior edges of the triangle.
        assert_eq!(r.relative_walls().len(), 15);
    }

    #[test]
    fn identity_refinement_for_r_equal_one() {
        let r = resolve(&chain(), 1);
        assert_eq!(r.vertex_count(), 3);
        assert_eq!(r.relative_walls().len(), 0);
        let state = LocalFanState::initial_state(&triangle(), 1).unwrap();
        let t = Refinement::from_state(&state).unwrap();
        assert_eq!(t.vertex_count(), 3);
        assert_eq!(t.facets().count(), 1);
    }

    #[test]
    fn from_state_requires_terminal_input() {
        let state = LocalFanState::initial_state(&chain(), 4).unwrap();
        assert!(matches!(
            Refinement::from_state(&state),
            Err(RefinementError::NotTerminal(_))
        ));
    }

    #[test]
    fn psi_of_points_and_segments() {
        let r = resolve(&chain(), 4);
        let i310 = r.index_of_id("(3,1,0)").unwrap();
        let i400 = r.index_of_id("(4,0,0)").unwrap();
        assert_eq!(r.psi(&[i310]).unwrap(), Simplex::from_strs(&["1", "2"]));
        assert_eq!(r.psi(&[i400]).unwrap(), Simplex::from_strs(&["1"]));
        assert_eq!(
            r.psi(&[i400, i310]).unwrap(),
            Simplex::from_strs(&["1", "2"])
        );
        let t = resolve(&triangle(), 3);
        let center = t.index_of_id("(1,1,1)").unwrap();
        assert_eq!(t.psi(&[center]).unwrap(), Simplex::from_strs(&["1", "2", "3"]));
        // Not a refined simplex: the two far corners are not adjacent.
        let far = [t.index_of_id("(3,0,0)").unwrap(), t.index_of_id("(0,3,0)").unwrap()];
        assert!(matches!(t.psi(&far), Err(RefinementError::UnknownSimplex(_))));
    }

    #[test]
    fn relative_adjacency_follows_the_base_complex() {
        let r = resolve(&chain(), 4);
        let i040 = r.index_of_id("(0,4,0)").unwrap();
        let i220 = r.index_of_id("(2,2,0)").unwrap();
        assert_eq!(
            r.relative_adjacent(i040),
            BTreeSet::from(["1".to_string(), "3".to_string()])
        );
        assert_eq!(r.relative_adjacent(i220), BTreeSet::new());
        let t = resolve(&triangle(), 3);
        let i300 = t.index_of_id("(3,0,0)").unwrap();
        assert_eq!(
            t.relative_adjacent(i300),
            BTreeSet::from(["2".to_string(), "3".to_string()])
        );
    }

    #[test]
    fn walls_of_the_chain_are_the_interior_points() {
        let r = resolve(&chain(), 4);
        let ids: BTreeSet<String> = r
            .relative_walls()
            .iter()
            .map(|w| r.vertex(w.wall[0]).id.clone())
            .collect();
        let expected: BTreeSet<String> = [
            "(3,1,0)",
            "(2,2,0)",
            "(1,3,0)",
            "(0,3,1)",
            "(0,2,2)",
            "(0,1,3)",
        ]
        .map(String::from)
        .into();
        assert_eq!(ids, expected);
    }

    #[test]
    fn import_accepts_the_standard_triangulation_and_rejects_an_extra_cell() {
        let base = triangle();
        let pts: Vec<Vec<i64>> = vec![
            vec![3, 0, 0],
            vec![0, 3, 0],
            vec![0, 0, 3],
            vec![2, 1, 0],
            vec![1, 2, 0],
            vec![2, 0, 1],
            vec![1, 0, 2],
            vec![0, 2, 1],
            vec![0, 1, 2],
            vec![1, 1, 1],
        ];
        let as_coords = |p: &Vec<i64>| -> Coords {
            let mut c = Coords::new();
            for (v, &x) in ["1", "2", "3"].iter().zip(p.iter()) {
                if x > 0 {
                    c.insert(v.to_string(), x);
                }
            }
            c
        };
        let vertices: Vec<(Simplex, Coords)> = pts
            .iter()
            .map(|p| {
                let c = as_coords(p);
                (coords_support(&c), c)
            })
            .collect();
        let cells: Vec<Vec<Vec<i64>>> = vec![
            vec![vec![3, 0, 0], vec![2, 1, 0], vec![2, 0, 1]],
            vec![vec![2, 1, 0], vec![1, 2, 0], vec![1, 1, 1]],
            vec![vec![2, 0, 1], vec![1, 1, 1], vec![1, 0, 2]],
            vec![vec![1, 2, 0], vec![0, 3, 0], vec![0, 2, 1]],
            vec![vec![1, 1, 1], vec![0, 2, 1], vec![0, 1, 2]],
            vec![vec![1, 0, 2], vec![0, 1, 2], vec![0, 0, 3]],
            vec![vec![1, 1, 1], vec![2, 0, 1], vec![2, 1, 0]],
            vec![vec![0, 2, 1], vec![1, 1, 1], vec![1, 2, 0]],
            vec![vec![0, 1, 2], vec![1, 0, 2], vec![1, 1, 1]],
        ];
        let facets: Vec<Vec<Coords>> = cells
            .iter()
            .map(|c| c.iter().map(&as_coords).collect())
            .collect();
        let ok = Refinement::import_triangulation(base.clone(), 3, vertices.clone(), facets.clone());
        assert!(ok.is_ok(), "{ok:?}");

        let mut bad = facets;
        bad.push(
            [vec![3, 0, 0], vec![0, 3, 0], vec![1, 1, 1]]
                .iter()
                .map(|p: &Vec<i64>| as_coords(p))
                .collect(),
        );
        let err = Refinement::import_triangulation(base, 3, vertices, bad);
        assert!(matches!(err, Err(RefinementError::Validation(_))));
    }

    #[test]
    fn import_of_a_single_base_vertex() {
        let base = DualComplex::build(["1".to_string()], vec![vec!["1".into()]]).unwrap();
        let c = coords(&[("1", 5)]);
        let r = Refinement::import_triangulation(
            base,
            5,
            vec![(coords_support(&c), c.clone())],
            vec![vec![c]],
        )
        .unwrap();
        assert_eq!(r.vertex_count(), 1);
        assert_eq!(r.relative_walls().len(), 0);
    }

    #[test]
    fn psi_star_counting_over_maximal_simplices() {
        for r in 1..=4 {
            let rf = resolve(&triangle(), r);
            let sigma = Simplex::from_strs(&["1", "2", "3"]);
            assert_eq!(rf.cells_over(&sigma).len() as i64, r * r);
            for edge in rf.base().simplices_of_dim(1) {
                let edge = edge.clone();
                assert_eq!(rf.cells_over(&edge).len() as i64, r);
            }
        }
    }
}
