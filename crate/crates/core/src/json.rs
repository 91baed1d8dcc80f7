//! Serialization DTOs for the on-disk JSON schemas.
//!
//! Complex: `{"vertices": [..], "facets": [[..], ..]}`.
//! Refinement: `{"base": <complex>, "r": k, "vertices": [{"id", "carrier",
//! "coords"}], "facets": [["id", ..], ..]}`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::complex::{ComplexError, DualComplex, Simplex};
use crate::refinement::{Refinement, RefinementError};
use crate::resolution::Coords;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ComplexDto {
    pub vertices: Vec<String>,
    pub facets: Vec<Vec<String>>,
}

impl ComplexDto {
    pub fn to_complex(&self) -> Result<DualComplex, ComplexError> {
        DualComplex::build(self.vertices.iter().cloned(), self.facets.clone())
    }

    pub fn from_complex(complex: &DualComplex) -> Self {
        ComplexDto {
            vertices: complex.vertices().cloned().collect(),
            facets: complex
                .facets()
                .map(|f| f.vertices().cloned().collect())
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct RefinedVertexDto {
    pub id: String,
    pub carrier: Vec<String>,
    pub coords: BTreeMap<String, i64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct RefinementDto {
    pub base: ComplexDto,
    pub r: i64,
    pub vertices: Vec<RefinedVertexDto>,
    pub facets: Vec<Vec<String>>,
}

impl RefinementDto {
    pub fn to_refinement(&self) -> Result<Refinement, RefinementError> {
        let base = self
            .base
            .to_complex()
            .map_err(|e| RefinementError::Validation(vec![e.to_string()]))?;
        let mut by_id: BTreeMap<&str, Coords> = BTreeMap::new();
        let mut vertices = Vec::with_capacity(self.vertices.len());
        for v in &self.vertices {
            let coords: Coords = v
                .coords
                .iter()
                .filter(|(_, &c)| c != 0)
                .map(|(k, &c)| (k.clone(), c))
                .collect();
            by_id.insert(v.id.as_str(), coords.clone());
            vertices.push((Simplex::new(v.carrier.iter().cloned()), coords));
        }
        let mut facets = Vec::with_capacity(self.facets.len());
        for f in &self.facets {
            let mut cell = Vec::with_capacity(f.len());
            for id in f {
                let coords = by_id.get(id.as_str()).ok_or_else(|| {
                    RefinementError::Validation(vec![format!(
                        "facet references undeclared vertex id {id:?}"
                    )])
                })?;
                cell.push(coords.clone());
            }
            facets.push(cell);
        }
        Refinement::import_triangulation(base, self.r, vertices, facets)
    }

    pub fn from_refinement(refinement: &Refinement) -> Self {
        RefinementDto {
            base: ComplexDto::from_complex(refinement.base()),
            r: refinement.r(),
            vertices: refinement
                .vertices()
                .map(|v| RefinedVertexDto {
                    id: v.id.clone(),
                    carrier: v.carrier.vertices().cloned().collect(),
                    coords: v.coords.clone(),
                })
                .collect(),
            facets: refinement
                .facets()
                .map(|f| f.iter().map(|&i| refinement.vertex(i).id.clone()).collect())
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resolution::LocalFanState;

    #[test]
    fn complex_roundtrip() {
        let dto = ComplexDto {
            vertices: vec!["1".into(), "2".into(), "3".into()],
            facets: vec![vec!["1".into(), "2".into()], vec!["2".into(), "3".into()]],
        };
        let complex = dto.to_complex().unwrap();
        let back = ComplexDto::from_complex(&complex);
        assert_eq!(back.vertices, dto.vertices);
        assert_eq!(back.facets.len(), 2);
    }

    #[test]
    fn refinement_roundtrip_through_json() {
        let complex = ComplexDto {
            vertices: vec!["1".into(), "2".into()],
            facets: vec![vec!["1".into(), "2".into()]],
        }
        .to_complex()
        .unwrap();
        let mut state = LocalFanState::initial_state(&complex, 3).unwrap();
        state.default_schedule().unwrap();
        let refinement = Refinement::from_state(&state).unwrap();
        let dto = RefinementDto::from_refinement(&refinement);
        let text = serde_json::to_string(&dto).unwrap();
        let parsed: RefinementDto = serde_json::from_str(&text).unwrap();
        let back = parsed.to_refinement().unwrap();
        assert_eq!(back.vertex_count(), refinement.vertex_count());
        assert_eq!(back.facets().count(), refinement.facets().count());
        assert_eq!(RefinementDto::from_refinement(&back), dto);
    }
}
