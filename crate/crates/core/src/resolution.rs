//! The local toric model of a semistable family after ramified base change,
//! and the blow-up process that resolves it.
//!
//! Each maximal simplex of the base complex carries a cone of the family
//! `sigma_{n,r_1..r_m}`: generators `{e_i} ∪ {e_i + r_i f_j}` for member rays
//! `e_i` with multiplicities `r_i` and direction vectors `f_j`. All rays live
//! on the slice hyperplane `{first coordinate = 1}`, so a cone is stored
//! through its slice polytope: points with integer barycentric coordinates
//! summing to `r` over the carrier simplex.
//!
//! Blowing up the component of a ray `g = e_i + r_i f_j` (with `f_0 = 0`)
//! replaces the cone by two pieces: one keeps every generator away from the
//! `f_j` direction plus a new member `e_i + f_j` of multiplicity `r_i - 1`,
//! the other keeps every member other than `e_i` plus the new member. The
//! subdivision is independent of how the generator set is presented as a
//! family; a debug assertion cross-checks this on every split.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::complex::{DualComplex, Simplex, VertexId};
use crate::lattice::{is_regular, LatticeVector};

/// Component label: a base vertex label or a minted exceptional label.
pub type Label = String;

/// Barycentric coordinates of a slice point: base vertex -> weight, only
/// positive weights stored, weights summing to the ramification index.
pub type Coords = BTreeMap<VertexId, i64>;

/// A sum-zero displacement between slice points.
pub type Direction = BTreeMap<VertexId, i64>;

pub fn coords_sum(c: &Coords) -> i64 {
    c.values().sum()
}

pub fn coords_support(c: &Coords) -> Simplex {
    Simplex::new(c.keys().cloned())
}

/// The coordinate tuple of a point over a sorted vertex list.
pub fn coords_tuple(c: &Coords, vertices: &[VertexId]) -> Vec<i64> {
    vertices.iter().map(|v| *c.get(v).unwrap_or(&0)).collect()
}

/// `p + k * d`, dropping zero entries. Panics if a coordinate goes negative;
/// the blow-up construction never leaves the slice polytope.
pub fn translate(p: &Coords, d: &Direction, k: i64) -> Coords {
    let mut out = p.clone();
    for (v, delta) in d {
        let value = out.get(v).copied().unwrap_or(0) + k * delta;
        assert!(value >= 0, "slice point left the polytope at {v}");
        if value == 0 {
            out.remove(v);
        } else {
            out.insert(v.clone(), value);
        }
    }
    out
}

/// `(1, c_{s_1}, .., c_{s_n})` over the carrier's sorted vertices: the ray of
/// the point in the working lattice of the carrier's cone.
pub fn slice_vector(c: &Coords, carrier: &[VertexId]) -> LatticeVector {
    let mut entries = Vec::with_capacity(carrier.len());
    entries.push(1);
    entries.extend(carrier[1..].iter().map(|v| *c.get(v).unwrap_or(&0)));
    LatticeVector::new(entries)
}

fn patch_point(c: &Coords, carrier: &[VertexId]) -> Vec<i64> {
    carrier[1..].iter().map(|v| *c.get(v).unwrap_or(&0)).collect()
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ResolutionError {
    #[error("ramification index must be >= 1, got {0}")]
    InvalidRamification(i64),
    #[error("unknown component {0:?}")]
    UnknownComponent(String),
    #[error("center {center} is not a generator of cone {cone}")]
    CenterNotPresent { center: String, cone: String },
    #[error("shared-face subdivisions disagree: {0}")]
    ConsistencyViolation(String),
    #[error("no component blow-up properly subdivides a non-regular cone")]
    NoProgress,
    #[error("schedule execution supports carriers of dimension <= 2, got {0}")]
    UnsupportedDimension(usize),
    #[error("blow-up did not preserve the cone support: {0}")]
    SupportLost(String),
}

/// One cone of the family, over a fixed carrier simplex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeFamilyRecord {
    pub carrier: Vec<VertexId>,
    /// Member rays `(slice point, multiplicity)`.
    pub members: Vec<(Coords, i64)>,
    /// Direction vectors `f_j`.
    pub dirs: Vec<Direction>,
}

/// Result of blowing up one cone along a component ray.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BlowupOutcome {
    /// Proper subdivision into two cones.
    Split(Box<(ConeFamilyRecord, ConeFamilyRecord)>),
    /// The blow-up is trivial on this chart (Cartier center or a
    /// zero-multiplicity ray).
    Unchanged { zero_multiplicity: bool },
}

impl ConeFamilyRecord {
    /// Distinct generator points: member rays and their displaced copies.
    pub fn generators(&self) -> BTreeSet<Coords> {
        let mut out = BTreeSet::new();
        for (p, r) in &self.members {
            out.insert(p.clone());
            if *r > 0 {
                for d in &self.dirs {
                    out.insert(translate(p, d, *r));
                }
            }
        }
        out
    }

    pub fn generator_list(&self) -> Vec<Coords> {
        self.generators().into_iter().collect()
    }

    fn describe(&self) -> String {
        let gens: Vec<String> = self
            .generators()
            .iter()
            .map(|g| format!("({})", coords_tuple(g, &self.carrier).iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        format!("over {}: [{}]", Simplex::new(self.carrier.iter().cloned()), gens.join(" "))
    }

    /// Normalized lattice volume of the slice polytope (1 per unimodular
    /// cell). Supported for carriers of dimension <= 2.
    pub fn volume(&self) -> Result<i64, ResolutionError> {
        let pts: Vec<Vec<i64>> = self
            .generators()
            .iter()
            .map(|g| patch_point(g, &self.carrier))
            .collect();
        normalized_volume(&pts, self.carrier.len() - 1)
    }

    /// True iff the cone is simplicial and its slice vectors extend to a
    /// lattice basis.
    pub fn is_regular_cone(&self) -> bool {
        let gens = self.generator_list();
        if gens.len() != self.carrier.len() {
            return false;
        }
        let vectors: Vec<LatticeVector> = gens
            .iter()
            .map(|g| slice_vector(g, &self.carrier))
            .collect();
        is_regular(&vectors)
    }

    /// Applies the blow-up of the component whose ray sits at `center`.
    pub fn blowup(&self, center: &Coords) -> Result<BlowupOutcome, ResolutionError> {
        let n = self.carrier.len() - 1;
        if n > 2 {
            return Err(ResolutionError::UnsupportedDimension(n));
        }

        // Identify the center as e_i + r_i f_j, with j = None for the pure
        // member ray.
        let mut candidates: Vec<(usize, Option<usize>)> = Vec::new();
        for (i, (p, r)) in self.members.iter().enumerate() {
            if p == center {
                candidates.push((i, None));
            }
            if *r >= 1 {
                for (j, d) in self.dirs.iter().enumerate() {
                    if &translate(p, d, *r) == center {
                        candidates.push((i, Some(j)));
                    }
                }
            }
        }
        if candidates.is_empty() {
            return Err(ResolutionError::CenterNotPresent {
                center: format!("{:?}", coords_tuple(center, &self.carrier)),
                cone: self.describe(),
            });
        }
        let proper: Vec<_> = candidates
            .iter()
            .filter(|(i, _)| self.members[*i].1 >= 1)
            .cloned()
            .collect();
        if proper.is_empty() {
            return Ok(BlowupOutcome::Unchanged {
                zero_multiplicity: true,
            });
        }

        let outcome = self.blowup_at(proper[0])?;
        #[cfg(debug_assertions)]
        for &cand in &proper[1..] {
            debug_assert_eq!(
                outcome_generators(&self.blowup_at(cand)?),
                outcome_generators(&outcome),
                "blow-up must not depend on the family presentation"
            );
        }
        Ok(outcome)
    }

    fn blowup_at(&self, (ih, jh): (usize, Option<usize>)) -> Result<BlowupOutcome, ResolutionError> {
        let (p_hat, r_hat) = self.members[ih].clone();
        let new_point = match jh {
            Some(j) => translate(&p_hat, &self.dirs[j], 1),
            None => p_hat.clone(),
        };
        let new_member = (new_point, r_hat - 1);

        // Piece keeping every member except the blown one.
        let mut keep_others = self.clone();
        keep_others.members.remove(ih);
        keep_others.members.push(new_member.clone());

        // Piece keeping every generator away from the blown direction.
        let away = match jh {
            Some(j) => {
                let mut rec = self.clone();
                rec.members.push(new_member);
                rec.dirs.remove(j);
                rec
            }
            None => {
                if self.dirs.is_empty() {
                    return Ok(BlowupOutcome::Unchanged {
                        zero_multiplicity: false,
                    });
                }
                // Re-encode with members moved onto the first direction's
                // face: e_i' = e_i + r_i f_1, f_j' = f_j - f_1.
                let mut rec = self.clone();
                rec.members.push(new_member);
                let base_dir = rec.dirs[0].clone();
                for (p, r) in rec.members.iter_mut() {
                    let moved = translate(p, &base_dir, *r);
                    *p = moved;
                }
                let rebased: Vec<Direction> = rec.dirs[1..]
                    .iter()
                    .map(|d| {
                        let mut diff = d.clone();
                        for (v, delta) in &base_dir {
                            let value = diff.get(v).copied().unwrap_or(0) - delta;
                            if value == 0 {
                                diff.remove(v);
                            } else {
                                diff.insert(v.clone(), value);
                            }
                        }
                        diff
                    })
                    .collect();
                rec.dirs = rebased;
                rec
            }
        };

        let g_in = self.generators();
        let g_keep = keep_others.generators();
        let g_away = away.generators();
        let vol_in = self.volume()?;
        let vol_keep = keep_others.volume()?;
        let vol_away = away.volume()?;
        if g_keep == g_in || g_away == g_in || vol_keep == 0 || vol_away == 0 {
            return Ok(BlowupOutcome::Unchanged {
                zero_multiplicity: false,
            });
        }
        if vol_keep + vol_away != vol_in {
            return Err(ResolutionError::SupportLost(format!(
                "{} -> {} + {} (volumes {} -> {} + {})",
                self.describe(),
                keep_others.describe(),
                away.describe(),
                vol_in,
                vol_keep,
                vol_away
            )));
        }
        // Every output generator must stay inside the input polytope.
        let union: Vec<Vec<i64>> = g_in
            .iter()
            .chain(g_keep.iter())
            .chain(g_away.iter())
            .map(|g| patch_point(g, &self.carrier))
            .collect();
        if normalized_volume(&union, self.carrier.len() - 1)? != vol_in {
            return Err(ResolutionError::SupportLost(self.describe()));
        }

        let mut pieces = [away, keep_others];
        pieces.sort_by_key(|r| r.generator_list());
        let [a, b] = pieces;
        Ok(BlowupOutcome::Split(Box::new((a, b))))
    }
}

#[cfg(debug_assertions)]
fn outcome_generators(o: &BlowupOutcome) -> Option<(BTreeSet<Coords>, BTreeSet<Coords>)> {
    match o {
        BlowupOutcome::Split(pair) => Some((pair.0.generators(), pair.1.generators())),
        BlowupOutcome::Unchanged { .. } => None,
    }
}

/// Normalized lattice volume (`n!` times the Euclidean volume) of the convex
/// hull of integer points in dimension `n <= 2`.
pub fn normalized_volume(points: &[Vec<i64>], n: usize) -> Result<i64, ResolutionError> {
    match n {
        0 => Ok(if points.is_empty() { 0 } else { 1 }),
        1 => {
            let xs: Vec<i64> = points.iter().map(|p| p[0]).collect();
            Ok(xs.iter().max().unwrap() - xs.iter().min().unwrap())
        }
        2 => {
            let pts: Vec<(i64, i64)> = points.iter().map(|p| (p[0], p[1])).collect();
            let hull = convex_hull(&pts);
            if hull.len() < 3 {
                return Ok(0);
            }
            let mut twice_area = 0i128;
            for i in 0..hull.len() {
                let (x1, y1) = hull[i];
                let (x2, y2) = hull[(i + 1) % hull.len()];
                twice_area += x1 as i128 * y2 as i128 - x2 as i128 * y1 as i128;
            }
            Ok(i64::try_from(twice_area.abs()).expect("polytope volume fits i64"))
        }
        d => Err(ResolutionError::UnsupportedDimension(d)),
    }
}

/// Monotone-chain convex hull, counter-clockwise, no collinear points kept.
fn convex_hull(points: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let mut pts: Vec<(i64, i64)> = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let cross = |o: (i64, i64), a: (i64, i64), b: (i64, i64)| -> i128 {
        (a.0 - o.0) as i128 * (b.1 - o.1) as i128 - (a.1 - o.1) as i128 * (b.0 - o.0) as i128
    };
    let mut lower: Vec<(i64, i64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(i64, i64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Generators of the dual cone of `sigma_{n,r}` with one member: the
/// coordinate duals and `r e_1* - f_1* - .. - f_n*`. Serves as a self-check
/// of the family encoding.
pub fn sigma_dual_generators(n: usize, r: i64) -> Vec<LatticeVector> {
    let mut out = Vec::with_capacity(n + 2);
    for i in 0..=n {
        let mut v = vec![0i64; n + 1];
        v[i] = 1;
        out.push(LatticeVector::new(v));
    }
    let mut last = vec![-1i64; n + 1];
    last[0] = r;
    out.push(LatticeVector::new(last));
    out
}

/// Verdict of the regularity scan over all cones of a state.
#[derive(Clone, Debug)]
pub struct TerminalReport {
    pub regular: bool,
    pub offenders: Vec<String>,
}

/// The per-carrier fans of a partially resolved model, with the global
/// component registry.
#[derive(Clone, Debug)]
pub struct LocalFanState {
    complex: DualComplex,
    r: i64,
    cones: BTreeMap<Vec<VertexId>, Vec<ConeFamilyRecord>>,
    label_by_point: BTreeMap<Coords, Label>,
    point_by_label: BTreeMap<Label, Coords>,
    /// Zero-multiplicity centers encountered, surfaced in reports.
    pub notes: Vec<String>,
}

impl LocalFanState {
    /// One `sigma_{n,r}` cone per maximal simplex; original components sit at
    /// the scaled vertices.
    pub fn initial_state(complex: &DualComplex, r: i64) -> Result<Self, ResolutionError> {
        if r < 1 {
            return Err(ResolutionError::InvalidRamification(r));
        }
        let mut cones = BTreeMap::new();
        for facet in complex.facets() {
            let carrier: Vec<VertexId> = facet.vertices().cloned().collect();
            let apex: Coords = BTreeMap::from([(carrier[0].clone(), r)]);
            let dirs: Vec<Direction> = carrier[1..]
                .iter()
                .map(|v| {
                    BTreeMap::from([(carrier[0].clone(), -1), (v.clone(), 1)])
                })
                .collect();
            let record = ConeFamilyRecord {
                carrier: carrier.clone(),
                members: vec![(apex, r)],
                dirs,
            };
            cones.insert(carrier, vec![record]);
        }
        let mut state = LocalFanState {
            complex: complex.clone(),
            r,
            cones,
            label_by_point: BTreeMap::new(),
            point_by_label: BTreeMap::new(),
            notes: Vec::new(),
        };
        for v in complex.vertices() {
            let point: Coords = BTreeMap::from([(v.clone(), r)]);
            state.label_by_point.insert(point.clone(), v.clone());
            state.point_by_label.insert(v.clone(), point);
        }
        state.register_new_rays();
        state.validate_consistency()?;
        Ok(state)
    }

    pub fn r(&self) -> i64 {
        self.r
    }

    pub fn complex(&self) -> &DualComplex {
        &self.complex
    }

    pub fn cones(&self) -> impl Iterator<Item = &ConeFamilyRecord> {
        self.cones.values().flatten()
    }

    pub fn labels(&self) -> impl Iterator<Item = (&Label, &Coords)> {
        self.point_by_label.iter()
    }

    pub fn label_of(&self, point: &Coords) -> Option<&Label> {
        self.label_by_point.get(point)
    }

    fn register_new_rays(&mut self) {
        let mut fresh: BTreeSet<Coords> = BTreeSet::new();
        for rec in self.cones.values().flatten() {
            for g in rec.generators() {
                debug_assert_eq!(coords_sum(&g), self.r, "ray off the slice lattice");
                if !self.label_by_point.contains_key(&g) {
                    fresh.insert(g);
                }
            }
        }
        for point in fresh {
            let support: Vec<&VertexId> = point.keys().collect();
            let label = format!(
                "E:{}:{}",
                support.iter().map(|v| v.as_str()).collect::<Vec<_>>().join(","),
                support
                    .iter()
                    .map(|v| point[*v].to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            );
            self.label_by_point.insert(point.clone(), label.clone());
            self.point_by_label.insert(label, point);
        }
    }

    /// Blows up the named component in every cone whose generator set
    /// contains its ray. Returns whether any cone was properly subdivided.
    pub fn blow_up_component(&mut self, label: &str) -> Result<bool, ResolutionError> {
        let point = self
            .point_by_label
            .get(label)
            .cloned()
            .ok_or_else(|| ResolutionError::UnknownComponent(label.to_string()))?;
        let mut any_split = false;
        let mut zero_mult = false;
        for records in self.cones.values_mut() {
            let mut next: Vec<ConeFamilyRecord> = Vec::with_capacity(records.len() + 1);
            for rec in records.drain(..) {
                if !rec.generators().contains(&point) {
                    next.push(rec);
                    continue;
                }
                match rec.blowup(&point)? {
                    BlowupOutcome::Split(pair) => {
                        any_split = true;
                        next.push(pair.0);
                        next.push(pair.1);
                    }
                    BlowupOutcome::Unchanged { zero_multiplicity } => {
                        zero_mult |= zero_multiplicity;
                        next.push(rec);
                    }
                }
            }
            *records = next;
        }
        if zero_mult {
            self.notes
                .push(format!("blow-up of {label} met a zero-multiplicity ray; treated as trivial"));
        }
        self.register_new_rays();
        self.validate_consistency()?;
        Ok(any_split)
    }

    /// Applies the schedule entries in order.
    pub fn run_schedule(&mut self, schedule: &[Label]) -> Result<(), ResolutionError> {
        for label in schedule {
            self.blow_up_component(label)?;
        }
        Ok(())
    }

    /// Greedy resolution: repeatedly blow up the lexicographically smallest
    /// component that properly subdivides some cone.
    pub fn default_schedule(&mut self) -> Result<Vec<Label>, ResolutionError> {
        let mut schedule = Vec::new();
        loop {
            if self.check_terminal().regular {
                return Ok(schedule);
            }
            let labels: Vec<Label> = self.point_by_label.keys().cloned().collect();
            let mut progressed = false;
            for label in labels {
                let point = self.point_by_label[&label].clone();
                let splits = self.cones.values().flatten().any(|rec| {
                    rec.generators().contains(&point)
                        && matches!(rec.blowup(&point), Ok(BlowupOutcome::Split(_)))
                });
                if splits {
                    self.blow_up_component(&label)?;
                    schedule.push(label);
                    progressed = true;
                    break;
                }
            }
            if !progressed {
                return Err(ResolutionError::NoProgress);
            }
        }
    }

    /// Checks that every cone in every carrier is regular.
    pub fn check_terminal(&self) -> TerminalReport {
        let offenders: Vec<String> = self
            .cones()
            .filter(|rec| !rec.is_regular_cone())
            .map(|rec| rec.describe())
            .collect();
        TerminalReport {
            regular: offenders.is_empty(),
            offenders,
        }
    }

    /// The subdivisions induced on every shared face of two carriers must
    /// agree piece by piece.
    pub fn validate_consistency(&self) -> Result<(), ResolutionError> {
        let carriers: Vec<&Vec<VertexId>> = self.cones.keys().collect();
        for i in 0..carriers.len() {
            for j in i + 1..carriers.len() {
                let shared: Vec<VertexId> = carriers[i]
                    .iter()
                    .filter(|v| carriers[j].contains(v))
                    .cloned()
                    .collect();
                if shared.is_empty() {
                    continue;
                }
                let a = self.induced_subdivision(carriers[i], &shared)?;
                let b = self.induced_subdivision(carriers[j], &shared)?;
                if a != b {
                    return Err(ResolutionError::ConsistencyViolation(format!(
                        "carriers {} and {} disagree on their shared face {}",
                        Simplex::new(carriers[i].iter().cloned()),
                        Simplex::new(carriers[j].iter().cloned()),
                        Simplex::new(shared.into_iter()),
                    )));
                }
            }
        }
        Ok(())
    }

    fn induced_subdivision(
        &self,
        carrier: &Vec<VertexId>,
        face: &[VertexId],
    ) -> Result<BTreeSet<Vec<Coords>>, ResolutionError> {
        let face_simplex = Simplex::new(face.iter().cloned());
        let face_dim = face.len() - 1;
        let mut pieces = BTreeSet::new();
        for rec in &self.cones[carrier] {
            let on_face: Vec<Coords> = rec
                .generators()
                .into_iter()
                .filter(|g| coords_support(g).is_subset(&face_simplex))
                .collect();
            if on_face.is_empty() {
                continue;
            }
            let patch: Vec<Vec<i64>> = on_face.iter().map(|g| patch_point(g, face)).collect();
            if normalized_volume(&patch, face_dim)? > 0 || face_dim == 0 {
                pieces.insert(on_face);
            }
        }
        Ok(pieces)
    }
}
