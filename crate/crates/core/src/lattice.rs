//! Exact integer lattice computations: primitive vectors, cone
//! multiplicities, regularity tests, and wall relations.
//!
//! Vectors are stored with machine integers; every elimination and
//! determinant runs over `BigInt`, so intermediate swell can never wrap.
//! Results are converted back with checked casts.

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// A point or direction of the ambient lattice, with a fixed dimension per
/// computation context.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeVector(pub Vec<i64>);

impl LatticeVector {
    pub fn new(entries: Vec<i64>) -> Self {
        LatticeVector(entries)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }
}

impl std::fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({})", self.0.iter().join(","))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("the zero vector has no primitive representative")]
    ZeroVector,
    #[error("generators are linearly dependent; the cone is not simplicial")]
    NotSimplicial,
    #[error("rays are linearly independent; no wall relation exists")]
    NoRelation,
    #[error("relation space has dimension {0} > 1; wall relation is ambiguous")]
    AmbiguousRelation(usize),
    #[error("wall relation cannot be normalized to +1 on both outer rays (non-regular wall)")]
    NormalizationFailure,
    #[error("integer result does not fit in the machine word: {0}")]
    Overflow(String),
}

/// Divides a vector by the (positive) gcd of its entries.
pub fn primitive(v: &LatticeVector) -> Result<LatticeVector, LatticeError> {
    if v.is_zero() {
        return Err(LatticeError::ZeroVector);
    }
    let g = v.0.iter().fold(0i64, |acc, &x| acc.gcd(&x));
    Ok(LatticeVector(v.0.iter().map(|&x| x / g).collect()))
}

/// The index of the sublattice spanned by the generators inside the lattice
/// points of their linear span.
///
/// Computed as the gcd of all maximal minors of the generator matrix, which
/// equals the product of the elementary divisors.
pub fn cone_multiplicity(generators: &[LatticeVector]) -> Result<u64, LatticeError> {
    let k = generators.len();
    assert!(k > 0, "empty generator list");
    let n = generators[0].dim();
    assert!(
        generators.iter().all(|g| g.dim() == n),
        "mixed dimensions in generator list"
    );
    if k > n {
        return Err(LatticeError::NotSimplicial);
    }
    let rows: Vec<Vec<BigInt>> = generators
        .iter()
        .map(|g| g.0.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let mut g = BigInt::zero();
    for cols in (0..n).combinations(k) {
        let minor: Vec<Vec<BigInt>> = rows
            .iter()
            .map(|row| cols.iter().map(|&c| row[c].clone()).collect())
            .collect();
        g = g.gcd(&determinant(&minor));
        if g.is_one() {
            break;
        }
    }
    if g.is_zero() {
        return Err(LatticeError::NotSimplicial);
    }
    to_u64(&g)
}

/// True iff the generators can be extended to a basis of the ambient lattice:
/// they are independent and span a multiplicity-one sublattice.
pub fn is_regular(generators: &[LatticeVector]) -> bool {
    matches!(cone_multiplicity(generators), Ok(1))
}

/// The primitive integer dependence among the rays of two maximal cones
/// sharing a wall.
///
/// `rays` lists all d+2 rays; `shared` indexes the d rays of the wall itself.
/// The coefficients of the two non-shared rays are normalized to +1, which is
/// possible exactly when the wall is regular.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WallRelation {
    /// Coefficients aligned with the input ray order.
    pub coefficients: Vec<i64>,
}

pub fn wall_relation(
    rays: &[LatticeVector],
    shared: &[usize],
) -> Result<WallRelation, LatticeError> {
    let k = rays.len();
    assert!(k >= 2, "a wall relation needs at least two rays");
    let outer: Vec<usize> = (0..k).filter(|i| !shared.contains(i)).collect();
    assert_eq!(outer.len(), 2, "exactly two rays must be non-shared");

    let rows: Vec<Vec<BigInt>> = rays
        .iter()
        .map(|r| r.0.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let kernel = integer_kernel(&rows);
    if kernel.is_empty() {
        return Err(LatticeError::NoRelation);
    }
    if kernel.len() > 1 {
        return Err(LatticeError::AmbiguousRelation(kernel.len()));
    }
    let mut rel = kernel.into_iter().next().unwrap();
    let content = rel.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    for c in rel.iter_mut() {
        *c /= &content;
    }
    if rel[outer[0]].is_negative() {
        for c in rel.iter_mut() {
            *c = -&*c;
        }
    }
    if !rel[outer[0]].is_one() || !rel[outer[1]].is_one() {
        return Err(LatticeError::NormalizationFailure);
    }
    let coefficients: Result<Vec<i64>, _> = rel.iter().map(to_i64).collect();
    let relation = WallRelation {
        coefficients: coefficients?,
    };
    debug_assert!(relation_annihilates(&relation, rays));
    Ok(relation)
}

fn relation_annihilates(rel: &WallRelation, rays: &[LatticeVector]) -> bool {
    let n = rays[0].dim();
    (0..n).all(|c| {
        rays.iter()
            .zip(&rel.coefficients)
            .map(|(r, &b)| BigInt::from(r.0[c]) * b)
            .sum::<BigInt>()
            .is_zero()
    })
}

fn to_u64(x: &BigInt) -> Result<u64, LatticeError> {
    u64::try_from(x.magnitude().clone()).map_err(|_| LatticeError::Overflow(x.to_string()))
}

fn to_i64(x: &BigInt) -> Result<i64, LatticeError> {
    i64::try_from(x.clone()).map_err(|_| LatticeError::Overflow(x.to_string()))
}

/// Exact determinant of a square matrix via fraction-free Bareiss
/// elimination.
pub(crate) fn determinant(mat: &[Vec<BigInt>]) -> BigInt {
    let n = mat.len();
    if n == 0 {
        return BigInt::one();
    }
    debug_assert!(mat.iter().all(|r| r.len() == n));
    let mut m: Vec<Vec<BigInt>> = mat.to_vec();
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for p in 0..n - 1 {
        if m[p][p].is_zero() {
            match (p + 1..n).find(|&i| !m[i][p].is_zero()) {
                Some(i) => {
                    m.swap(p, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in p + 1..n {
            for j in p + 1..n {
                let num = &m[i][j] * &m[p][p] - &m[i][p] * &m[p][j];
                m[i][j] = num / &prev;
            }
            m[i][p] = BigInt::zero();
        }
        prev = m[p][p].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}

/// Basis of the left kernel of the row collection: all integer vectors `c`
/// with `sum c_i row_i = 0`, one primitive representative per dimension.
///
/// Row-reduces `[rows | I]` with integer combinations only; the identity part
/// of every row whose data part vanished is a kernel vector.
pub(crate) fn integer_kernel(rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let k = rows.len();
    let n = rows[0].len();
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..k).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
            row
        })
        .collect();

    let mut pivot_row = 0;
    for col in 0..n {
        let Some(best) = (pivot_row..k)
            .filter(|&i| !m[i][col].is_zero())
            .min_by_key(|&i| m[i][col].magnitude().clone())
        else {
            continue;
        };
        m.swap(pivot_row, best);
        for i in pivot_row + 1..k {
            if m[i][col].is_zero() {
                continue;
            }
            let g = m[pivot_row][col].gcd(&m[i][col]);
            let a = &m[i][col] / &g;
            let b = &m[pivot_row][col] / &g;
            for j in 0..n + k {
                m[i][j] = &m[i][j] * &b - &m[pivot_row][j] * &a;
            }
        }
        pivot_row += 1;
        if pivot_row == k {
            break;
        }
    }

    m.into_iter()
        .filter(|row| row[..n].iter().all(Zero::is_zero))
        .map(|row| {
            let mut v = row[n..].to_vec();
            let content = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
            if !content.is_zero() && !content.is_one() {
                for x in v.iter_mut() {
                    *x /= &content;
                }
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lv(entries: &[i64]) -> LatticeVector {
        LatticeVector::new(entries.to_vec())
    }

    /// Counts lattice points in the half-open fundamental parallelepiped
    /// { sum t_i g_i : t_i in [0,1) } of a full-rank square generator set.
    /// Membership is decided by Cramer's rule, so the count is exact.
    fn parallelepiped_count(generators: &[LatticeVector]) -> u64 {
        let k = generators.len();
        assert!(generators.iter().all(|g| g.dim() == k));
        let mat: Vec<Vec<BigInt>> = (0..k)
            .map(|row| (0..k).map(|i| BigInt::from(generators[i].0[row])).collect())
            .collect();
        let det = determinant(&mat);
        assert!(!det.is_zero());

        let bound: i64 = generators
            .iter()
            .map(|g| g.0.iter().map(|x| x.abs()).sum::<i64>())
            .sum();
        let mut count = 0u64;
        let mut point = vec![-bound; k];
        'outer: loop {
            let mut inside = true;
            for i in 0..k {
                // Cramer: t_i = det(mat with column i replaced by point) / det
                let mut replaced = mat.clone();
                for (row, rep) in replaced.iter_mut().enumerate() {
                    rep[i] = BigInt::from(point[row]);
                }
                let num = determinant(&replaced);
                let t_num = if det.is_negative() { -num } else { num };
                let t_den = det.abs();
                if t_num.is_negative() || t_num >= t_den {
                    inside = false;
                    break;
                }
            }
            if inside {
                count += 1;
            }
            for i in 0..k {
                point[i] += 1;
                if point[i] <= bound {
                    continue 'outer;
                }
                point[i] = -bound;
            }
            break;
        }
        count
    }

    /// Brute-force primitive nullspace search with bounded coefficients.
    fn bounded_nullspace(rays: &[LatticeVector], bound: i64) -> Vec<Vec<i64>> {
        let k = rays.len();
        let n = rays[0].dim();
        let mut found = Vec::new();
        let mut coeff = vec![-bound; k];
        'outer: loop {
            let nonzero = coeff.iter().any(|&c| c != 0);
            if nonzero {
                let annihilates = (0..n).all(|c| {
                    rays.iter()
                        .zip(&coeff)
                        .map(|(r, &b)| r.0[c] as i128 * b as i128)
                        .sum::<i128>()
                        == 0
                });
                let content = coeff.iter().fold(0i64, |acc, &x| acc.gcd(&x));
                if annihilates && content == 1 {
                    found.push(coeff.clone());
                }
            }
            for i in 0..k {
                coeff[i] += 1;
                if coeff[i] <= bound {
                    continue 'outer;
                }
                coeff[i] = -bound;
            }
            break;
        }
        found
    }

    #[test]
    fn primitive_divides_by_content() {
        assert_eq!(primitive(&lv(&[2, -4, 6])).unwrap(), lv(&[1, -2, 3]));
        assert_eq!(primitive(&lv(&[0, 5, 0])).unwrap(), lv(&[0, 1, 0]));
        assert_eq!(primitive(&lv(&[7, 7, 7, 7])).unwrap(), lv(&[1, 1, 1, 1]));
        assert_eq!(primitive(&lv(&[0, 0])), Err(LatticeError::ZeroVector));
    }

    #[test]
    fn multiplicity_of_standard_and_skew_cones() {
        assert_eq!(cone_multiplicity(&[lv(&[1, 0]), lv(&[0, 1])]).unwrap(), 1);
        // Frozen from the parallelepiped oracle below.
        assert_eq!(cone_multiplicity(&[lv(&[1, 0]), lv(&[1, 4])]).unwrap(), 4);
        assert_eq!(parallelepiped_count(&[lv(&[1, 0]), lv(&[1, 4])]), 4);
        assert_eq!(
            cone_multiplicity(&[lv(&[1, 0, 0]), lv(&[1, 3, 0]), lv(&[1, 0, 3])]).unwrap(),
            9
        );
        assert_eq!(
            parallelepiped_count(&[lv(&[1, 0, 0]), lv(&[1, 3, 0]), lv(&[1, 0, 3])]),
            9
        );
    }

    #[test]
    fn multiplicity_rejects_dependent_generators() {
        assert_eq!(
            cone_multiplicity(&[lv(&[1, 2]), lv(&[2, 4])]),
            Err(LatticeError::NotSimplicial)
        );
        assert_eq!(
            cone_multiplicity(&[lv(&[1, 0]), lv(&[0, 1]), lv(&[1, 1])]),
            Err(LatticeError::NotSimplicial)
        );
    }

    #[test]
    fn regularity_matches_multiplicity() {
        assert!(is_regular(&[lv(&[1, 0]), lv(&[0, 1])]));
        assert!(!is_regular(&[lv(&[1, 0]), lv(&[1, 4])]));
        assert!(is_regular(&[lv(&[1, 0, 0]), lv(&[1, 1, 0]), lv(&[1, 0, 1])]));
        assert!(!is_regular(&[lv(&[1, 2]), lv(&[2, 4])]));
    }

    #[test]
    fn wall_relation_on_a_segment() {
        let rel = wall_relation(&[lv(&[1, 3]), lv(&[1, 2]), lv(&[1, 1])], &[1]).unwrap();
        assert_eq!(rel.coefficients, vec![1, -2, 1]);
        let rel = wall_relation(&[lv(&[1, 0]), lv(&[1, 1]), lv(&[1, 2])], &[1]).unwrap();
        assert_eq!(rel.coefficients, vec![1, -2, 1]);
        // Frozen from the bounded nullspace oracle.
        let oracle = bounded_nullspace(&[lv(&[1, 0]), lv(&[1, 1]), lv(&[1, 2])], 3);
        assert!(oracle.contains(&vec![1, -2, 1]));
        assert!(oracle.contains(&vec![-1, 2, -1]));
        assert_eq!(oracle.len(), 2);
    }

    #[test]
    fn wall_relation_on_a_square_cone() {
        let rays = [
            lv(&[1, 0, 0]),
            lv(&[1, 1, 0]),
            lv(&[1, 0, 1]),
            lv(&[1, 1, 1]),
        ];
        let rel = wall_relation(&rays, &[1, 2]).unwrap();
        assert_eq!(rel.coefficients, vec![1, -1, -1, 1]);
    }

    #[test]
    fn wall_relation_error_cases() {
        assert_eq!(
            wall_relation(&[lv(&[1, 0]), lv(&[0, 1])], &[]),
            Err(LatticeError::NoRelation)
        );
        // Outer coefficients 1 and 2: a non-regular wall.
        assert_eq!(
            wall_relation(&[lv(&[1, 0]), lv(&[1, 1]), lv(&[1, 3])], &[1]),
            Err(LatticeError::NormalizationFailure)
        );
        // Outer rays on the same side of the shared ray.
        assert_eq!(
            wall_relation(&[lv(&[1, 2]), lv(&[1, 1]), lv(&[1, 3])], &[1]),
            Err(LatticeError::NormalizationFailure)
        );
    }

    proptest! {
        #[test]
        fn primitive_is_idempotent(entries in proptest::collection::vec(-50i64..=50, 1..6)) {
            prop_assume!(entries.iter().any(|&x| x != 0));
            let v = LatticeVector::new(entries);
            let p = primitive(&v).unwrap();
            prop_assert_eq!(primitive(&p).unwrap(), p.clone());
            let content = p.0.iter().fold(0i64, |acc, &x| acc.gcd(&x));
            prop_assert_eq!(content, 1);
        }

        #[test]
        fn multiplicity_matches_parallelepiped_count(
            entries in proptest::collection::vec(-6i64..=6, 4),
        ) {
            let g = [lv(&entries[..2]), lv(&entries[2..])];
            match cone_multiplicity(&g) {
                Ok(m) => prop_assert_eq!(m, parallelepiped_count(&g)),
                Err(LatticeError::NotSimplicial) => {
                    let det = entries[0] * entries[3] - entries[1] * entries[2];
                    prop_assert_eq!(det, 0);
                }
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
            }
        }

        #[test]
        fn multiplicity_invariant_under_permutation_and_basis_change(
            entries in proptest::collection::vec(-6i64..=6, 4),
            shear in -3i64..=3,
            swap in proptest::bool::ANY,
        ) {
            let g = vec![lv(&entries[..2]), lv(&entries[2..])];
            prop_assume!(cone_multiplicity(&g).is_ok());
            let m = cone_multiplicity(&g).unwrap();

            let permuted = vec![g[1].clone(), g[0].clone()];
            prop_assert_eq!(cone_multiplicity(&permuted).unwrap(), m);

            // Unimodular change of basis: shear then optional axis swap.
            let transform = |v: &LatticeVector| {
                let (x, y) = (v.0[0], v.0[1]);
                let (x, y) = (x + shear * y, y);
                if swap { lv(&[y, x]) } else { lv(&[x, y]) }
            };
            let transformed: Vec<_> = g.iter().map(transform).collect();
            prop_assert_eq!(cone_multiplicity(&transformed).unwrap(), m);
        }

        #[test]
        fn wall_relation_combination_is_zero(step in 1i64..=5, r in 2i64..=6) {
            // Collinear slice points a, a+step, a+2*step on the height-1 line
            // always carry the relation (1, -2, 1).
            let rays = [lv(&[1, 0]), lv(&[1, step]), lv(&[1, 2 * step])];
            prop_assume!(step <= r);
            let rel = wall_relation(&rays, &[1]).unwrap();
            prop_assert_eq!(&rel.coefficients, &vec![1, -2, 1]);
            for c in 0..2 {
                let s: i64 = rays.iter().zip(&rel.coefficients).map(|(v, &b)| v.0[c] * b).sum();
                prop_assert_eq!(s, 0);
            }
        }
    }
}
