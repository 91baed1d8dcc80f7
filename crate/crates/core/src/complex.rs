//! Abstract simplicial complexes modeling the dual complex of a special
//! fibre: one vertex per irreducible component, one simplex per non-empty
//! intersection.

use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Component label. Labels are opaque strings; their lexicographic order is
/// the tie-breaking order used everywhere downstream.
pub type VertexId = String;

/// A non-empty set of vertices belonging to the complex.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Simplex(BTreeSet<VertexId>);

impl Simplex {
    pub fn new(vertices: impl IntoIterator<Item = VertexId>) -> Self {
        Simplex(vertices.into_iter().collect())
    }

    pub fn from_strs(vertices: &[&str]) -> Self {
        Simplex(vertices.iter().map(|s| s.to_string()).collect())
    }

    pub fn vertices(&self) -> impl Iterator<Item = &VertexId> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Dimension: one less than the number of vertices.
    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn contains(&self, v: &str) -> bool {
        self.0.contains(v)
    }

    pub fn is_subset(&self, other: &Simplex) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn intersection(&self, other: &Simplex) -> BTreeSet<VertexId> {
        self.0.intersection(&other.0).cloned().collect()
    }

    /// All non-empty subsets.
    pub fn faces(&self) -> Vec<Simplex> {
        let verts: Vec<&VertexId> = self.0.iter().collect();
        let mut out = Vec::new();
        for mask in 1u32..(1 << verts.len()) {
            let face: BTreeSet<VertexId> = verts
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, v)| (*v).clone())
                .collect();
            out.push(Simplex(face));
        }
        out
    }
}

impl std::fmt::Display for Simplex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ComplexError {
    #[error("facet list contains an empty facet")]
    EmptyFacet,
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("facet list is empty and no vertices were given")]
    Empty,
}

/// An abstract simplicial complex given by its maximal simplices, closed
/// under faces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualComplex {
    vertices: BTreeSet<VertexId>,
    facets: BTreeSet<Simplex>,
    simplices: BTreeSet<Simplex>,
    simplices_by_dim: BTreeMap<usize, BTreeSet<Simplex>>,
}

impl DualComplex {
    /// Builds the complex from a vertex list and candidate facets.
    ///
    /// Non-maximal facets are absorbed silently; a vertex listed in no facet
    /// becomes a singleton facet of its own.
    pub fn build(
        vertices: impl IntoIterator<Item = VertexId>,
        facets: impl IntoIterator<Item = Vec<VertexId>>,
    ) -> Result<Self, ComplexError> {
        let vertices: BTreeSet<VertexId> = vertices.into_iter().collect();
        let mut candidates: BTreeSet<Simplex> = BTreeSet::new();
        for f in facets {
            if f.is_empty() {
                return Err(ComplexError::EmptyFacet);
            }
            for v in &f {
                if !vertices.contains(v) {
                    return Err(ComplexError::UnknownVertex(v.clone()));
                }
            }
            candidates.insert(Simplex::new(f));
        }
        for v in &vertices {
            if !candidates.iter().any(|f| f.contains(v)) {
                candidates.insert(Simplex::new([v.clone()]));
            }
        }
        if candidates.is_empty() {
            return Err(ComplexError::Empty);
        }

        let facets: BTreeSet<Simplex> = candidates
            .iter()
            .filter(|f| {
                !candidates
                    .iter()
                    .any(|g| g.len() > f.len() && f.is_subset(g))
            })
            .cloned()
            .collect();

        let mut simplices: BTreeSet<Simplex> = BTreeSet::new();
        for f in &facets {
            simplices.extend(f.faces());
        }
        let mut simplices_by_dim: BTreeMap<usize, BTreeSet<Simplex>> = BTreeMap::new();
        for s in &simplices {
            simplices_by_dim.entry(s.dim()).or_default().insert(s.clone());
        }
        Ok(DualComplex {
            vertices,
            facets,
            simplices,
            simplices_by_dim,
        })
    }

    pub fn vertices(&self) -> impl Iterator<Item = &VertexId> {
        self.vertices.iter()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn has_vertex(&self, v: &str) -> bool {
        self.vertices.contains(v)
    }

    pub fn facets(&self) -> impl Iterator<Item = &Simplex> {
        self.facets.iter()
    }

    pub fn simplices(&self) -> impl Iterator<Item = &Simplex> {
        self.simplices.iter()
    }

    pub fn simplices_of_dim(&self, d: usize) -> impl Iterator<Item = &Simplex> {
        self.simplices_by_dim.get(&d).into_iter().flatten()
    }

    pub fn contains_simplex(&self, s: &Simplex) -> bool {
        self.simplices.contains(s)
    }

    /// Dimension of the complex: the largest simplex dimension.
    pub fn dimension(&self) -> usize {
        *self.simplices_by_dim.keys().last().expect("non-empty complex")
    }

    /// Vertices sharing an edge with `v`.
    pub fn adjacent_vertices(&self, v: &str) -> Result<BTreeSet<VertexId>, ComplexError> {
        if !self.vertices.contains(v) {
            return Err(ComplexError::UnknownVertex(v.to_string()));
        }
        Ok(self
            .simplices_of_dim(1)
            .filter(|e| e.contains(v))
            .flat_map(|e| e.vertices())
            .filter(|w| w.as_str() != v)
            .cloned()
            .collect())
    }

    /// All (n-1)-simplices that are the set-theoretic intersection of two
    /// n-simplices, where n is the dimension of the complex.
    pub fn walls(&self) -> BTreeSet<Simplex> {
        let n = self.dimension();
        if n == 0 {
            return BTreeSet::new();
        }
        let top: Vec<&Simplex> = self.simplices_of_dim(n).collect();
        let mut walls = BTreeSet::new();
        for i in 0..top.len() {
            for j in i + 1..top.len() {
                let shared = top[i].intersection(top[j]);
                if shared.len() == n {
                    walls.insert(Simplex(shared));
                }
            }
        }
        walls
    }
}
