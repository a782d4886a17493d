use serde::{Deserialize, Serialize};

use super::{dot, AlgebraError, Field, Scalar};

/// Reduced row echelon form of a matrix together with its pivot columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rref {
    pub rows: Vec<Vec<Scalar>>,
    pub pivots: Vec<usize>,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Gauss-Jordan elimination. The pivot in each column is the first row at or below
/// the current one with a nonzero entry. Zero rows are kept at the bottom.
pub fn row_reduce(field: Field, matrix: &[Vec<Scalar>]) -> Rref {
    let mut rows: Vec<Vec<Scalar>> = matrix.to_vec();
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(pr) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = rows[r][c].inv().expect("pivot is nonzero");
        for x in rows[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let factor = rows[i][c].clone();
                for j in 0..ncols {
                    let delta = &factor * &rows[r][j];
                    rows[i][j] = &rows[i][j] - &delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    debug_assert!(rows.iter().flatten().all(|x| field.contains(x)));
    Rref { rows, pivots }
}

/// Basis of `{x : M x = 0}` read off the reduced form, one vector per free column
/// in increasing order.
pub fn kernel_basis(field: Field, matrix: &[Vec<Scalar>], ncols: usize) -> Vec<Vec<Scalar>> {
    let rref = row_reduce(field, matrix);
    let free: Vec<usize> = (0..ncols).filter(|c| !rref.pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![field.zero(); ncols];
            v[fc] = field.one();
            for (row, &pc) in rref.pivots.iter().enumerate() {
                v[pc] = -&rref.rows[row][fc];
            }
            v
        })
        .collect()
}

/// A symmetric bilinear form on the span of basis vectors `e_0 .. e_{N-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawFragment")]
pub struct BilinearFragment {
    field: Field,
    dimension: usize,
    matrix: Vec<Vec<Scalar>>,
}

#[derive(Deserialize)]
struct RawFragment {
    field: Field,
    dimension: usize,
    matrix: Vec<Vec<Scalar>>,
}

impl TryFrom<RawFragment> for BilinearFragment {
    type Error = AlgebraError;
    fn try_from(raw: RawFragment) -> Result<Self, Self::Error> {
        let BilinearFragment { field, dimension, matrix } = BilinearFragment::new(raw.field, raw.matrix)?;
        if dimension != raw.dimension {
            return Err(AlgebraError::DimensionMismatch { expected: raw.dimension, got: dimension });
        }
        Ok(BilinearFragment { field, dimension, matrix })
    }
}

impl BilinearFragment {
    pub fn new(field: Field, matrix: Vec<Vec<Scalar>>) -> Result<Self, AlgebraError> {
        let n = matrix.len();
        for row in &matrix {
            if row.len() != n {
                return Err(AlgebraError::DimensionMismatch { expected: n, got: row.len() });
            }
            for x in row {
                field.check(x)?;
            }
        }
        for i in 0..n {
            for j in 0..i {
                if matrix[i][j] != matrix[j][i] {
                    return Err(AlgebraError::NotSymmetric(i, j));
                }
            }
        }
        Ok(BilinearFragment { field, dimension: n, matrix })
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let matrix = (0..n)
            .map(|i| (0..n).map(|j| if i == j { field.one() } else { field.zero() }).collect())
            .collect();
        BilinearFragment { field, dimension: n, matrix }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn matrix(&self) -> &[Vec<Scalar>] {
        &self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> &Scalar {
        &self.matrix[i][j]
    }

    fn check_vector(&self, v: &[Scalar]) -> Result<(), AlgebraError> {
        if v.len() != self.dimension {
            return Err(AlgebraError::DimensionMismatch { expected: self.dimension, got: v.len() });
        }
        v.iter().try_for_each(|x| self.field.check(x))
    }

    /// The row `u^T M`, so that `Phi(u, x)` is its dot product with `x`.
    pub fn gram_row(&self, u: &[Scalar]) -> Result<Vec<Scalar>, AlgebraError> {
        self.check_vector(u)?;
        Ok((0..self.dimension)
            .map(|j| {
                let col: Vec<Scalar> = self.matrix.iter().map(|r| r[j].clone()).collect();
                dot(self.field, u, &col)
            })
            .collect())
    }

    pub fn eval(&self, x: &[Scalar], y: &[Scalar]) -> Result<Scalar, AlgebraError> {
        let row = self.gram_row(x)?;
        self.check_vector(y)?;
        Ok(dot(self.field, &row, y))
    }
}

/// Basis of `U^perp = {x : Phi(u, x) = 0 for all u in U}` inside the fragment.
pub fn orthogonal_complement(phi: &BilinearFragment, u: &[Vec<Scalar>]) -> Result<Vec<Vec<Scalar>>, AlgebraError> {
    let gram = u.iter().map(|v| phi.gram_row(v)).collect::<Result<Vec<_>, _>>()?;
    Ok(kernel_basis(phi.field(), &gram, phi.dimension()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(field: Field, rows: &[&[i64]]) -> Vec<Vec<Scalar>> {
        rows.iter().map(|r| r.iter().map(|&v| field.from_i64(v)).collect()).collect()
    }

    #[test]
    fn small_reductions() {
        let f2 = Field::Prime(2);
        let id = m(f2, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        let r = row_reduce(f2, &id);
        assert_eq!(r.rows, id);
        assert_eq!(r.rank(), 3);
        assert_eq!(row_reduce(f2, &m(f2, &[&[1, 1], &[1, 1]])).rank(), 1);
        assert_eq!(row_reduce(f2, &m(f2, &[&[0, 0], &[0, 0]])).rank(), 0);
    }

    #[test]
    fn rational_reduction() {
        let q = Field::Rationals;
        let r = row_reduce(q, &m(q, &[&[2, 4, 1], &[1, 2, 3]]));
        assert_eq!(r.pivots, vec![0, 2]);
        assert_eq!(r.rows[0][1], q.from_i64(2));
    }

    #[test]
    fn complements() {
        let f2 = Field::Prime(2);
        let id = BilinearFragment::identity(f2, 3);
        let e0 = m(f2, &[&[1, 0, 0]]);
        assert_eq!(orthogonal_complement(&id, &e0).unwrap(), m(f2, &[&[0, 1, 0], &[0, 0, 1]]));
        let ones = BilinearFragment::new(f2, m(f2, &[&[1, 1, 1], &[1, 1, 1], &[1, 1, 1]])).unwrap();
        assert_eq!(orthogonal_complement(&ones, &m(f2, &[&[1, 1, 0]])).unwrap().len(), 3);
        assert_eq!(orthogonal_complement(&id, &[]).unwrap().len(), 3);
        assert!(orthogonal_complement(&id, &m(f2, &[&[1, 0]])).is_err());
    }

    #[test]
    fn asymmetric_rejected() {
        let q = Field::Rationals;
        assert_eq!(BilinearFragment::new(q, m(q, &[&[0, 1], &[2, 0]])), Err(AlgebraError::NotSymmetric(1, 0)));
    }

    #[test]
    fn fragment_json_roundtrip() {
        let q = Field::Rationals;
        let phi = BilinearFragment::new(q, m(q, &[&[1, -3], &[-3, 0]])).unwrap();
        let s = serde_json::to_string(&phi).unwrap();
        assert_eq!(serde_json::from_str::<BilinearFragment>(&s).unwrap(), phi);
        let bad = s.replace("q:-3\"],[\"q:-3", "q:-3\"],[\"q:4");
        assert!(serde_json::from_str::<BilinearFragment>(&bad).is_err());
    }

    fn fragment(p: u64, n: usize) -> impl Strategy<Value = (BilinearFragment, Vec<Vec<Scalar>>)> {
        let field = Field::Prime(p);
        (
            proptest::collection::vec(0..p as i64, n * n),
            proptest::collection::vec(proptest::collection::vec(0..p as i64, n), 0..=n + 1),
        )
            .prop_map(move |(raw, us)| {
                let mut mat = vec![vec![field.zero(); n]; n];
                for i in 0..n {
                    for j in 0..=i {
                        mat[i][j] = field.from_i64(raw[i * n + j]);
                        mat[j][i] = mat[i][j].clone();
                    }
                }
                let us = us.into_iter().map(|u| u.into_iter().map(|v| field.from_i64(v)).collect()).collect();
                (BilinearFragment::new(field, mat).unwrap(), us)
            })
    }

    fn any_fragment() -> impl Strategy<Value = (BilinearFragment, Vec<Vec<Scalar>>)> {
        (prop_oneof![Just(2u64), Just(3u64)], 1usize..=6).prop_flat_map(|(p, n)| fragment(p, n))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn rank_nullity((phi, us) in any_fragment()) {
            let gram: Vec<_> = us.iter().map(|u| phi.gram_row(u).unwrap()).collect();
            let rank = row_reduce(phi.field(), &gram).rank();
            let perp = orthogonal_complement(&phi, &us).unwrap();
            prop_assert_eq!(rank + perp.len(), phi.dimension());
            for x in &perp {
                for u in &us {
                    prop_assert!(phi.eval(u, x).unwrap().is_zero());
                }
            }
        }

        #[test]
        fn rref_idempotent((phi, _) in any_fragment()) {
            let once = row_reduce(phi.field(), phi.matrix());
            let twice = row_reduce(phi.field(), &once.rows);
            prop_assert_eq!(once, twice);
        }
    }
}
