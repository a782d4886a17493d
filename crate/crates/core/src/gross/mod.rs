//! Translations between symmetric bilinear fragments and families of words,
//! with the injection scaffolding that links them.
//!
//! Inside one finite fragment of dimension `N`, the basis vectors below
//! `split` stand for the countable part `e_n` and the rest for `e_alpha`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{orthogonal_complement, AlgebraError, BilinearFragment, Field, Scalar};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrossError {
    #[error("index {alpha} lies below the split {split}")]
    IndexOrder { alpha: usize, split: usize },
    #[error("index {index} outside a fragment of dimension {dimension}")]
    IndexOutOfRange { index: usize, dimension: usize },
    #[error("word {beta} has length {len}, needs {needed}")]
    HorizonTooShort { beta: usize, needed: usize, len: usize },
    #[error("{got} words given, {needed} needed")]
    TooFewWords { needed: usize, got: usize },
    #[error("h_{0} is not injective")]
    NotInjective(usize),
    #[error("h_{alpha} has {len} values, expected {alpha}")]
    InjectionLength { alpha: usize, len: usize },
    #[error("the range of h_{0} leaves no value free below the working horizon")]
    NoFreeValue(usize),
    #[error("vector index {index} is on the wrong side of the split {split}")]
    WrongSide { index: usize, split: usize },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "style", content = "seed")]
pub enum InjectionStyle {
    Canonical,
    Perturbed(u64),
}

/// Injections `h_alpha : [0, alpha) -> naturals` for `alpha < N`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<u64>>", into = "Vec<Vec<u64>>")]
pub struct CoherentInjections {
    maps: Vec<Vec<u64>>,
}

impl TryFrom<Vec<Vec<u64>>> for CoherentInjections {
    type Error = GrossError;
    fn try_from(maps: Vec<Vec<u64>>) -> Result<Self, GrossError> {
        CoherentInjections::new(maps)
    }
}

impl From<CoherentInjections> for Vec<Vec<u64>> {
    fn from(h: CoherentInjections) -> Self {
        h.maps
    }
}

impl CoherentInjections {
    /// `maps[alpha]` lists `h_alpha(0), ..., h_alpha(alpha - 1)`.
    pub fn new(maps: Vec<Vec<u64>>) -> Result<Self, GrossError> {
        let h = CoherentInjections { maps };
        h.validate()?;
        Ok(h)
    }

    fn validate(&self) -> Result<(), GrossError> {
        let horizon = self.working_horizon();
        for (alpha, m) in self.maps.iter().enumerate() {
            if m.len() != alpha {
                return Err(GrossError::InjectionLength { alpha, len: m.len() });
            }
            let mut seen = m.clone();
            seen.sort_unstable();
            seen.dedup();
            if seen.len() != m.len() {
                return Err(GrossError::NotInjective(alpha));
            }
            if seen.len() as u64 >= horizon {
                return Err(GrossError::NoFreeValue(alpha));
            }
        }
        Ok(())
    }

    /// One past the largest value used, plus one spare: the finite stand-in for
    /// the naturals when checking that ranges are co-infinite.
    pub fn working_horizon(&self) -> u64 {
        self.maps.iter().flatten().max().map_or(1, |&v| v + 2)
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn map(&self, alpha: usize) -> &[u64] {
        &self.maps[alpha]
    }

    pub fn h(&self, alpha: usize, gamma: usize) -> u64 {
        self.maps[alpha][gamma]
    }

    /// Number of `gamma < beta` with `h_beta(gamma) != h_alpha(gamma)`.
    pub fn disagreements(&self, beta: usize, alpha: usize) -> usize {
        (0..beta).filter(|&g| self.maps[beta][g] != self.maps[alpha][g]).count()
    }
}

/// Canonical: `h_alpha(gamma) = 2 gamma`. Perturbed: on each level a seeded
/// subset of points is sent, in increasing order, to `1, 3, 5, ...`; the rest
/// keep `2 gamma`.
pub fn make_coherent_injections(n: usize, style: InjectionStyle) -> CoherentInjections {
    let mut r = match style {
        InjectionStyle::Canonical => None,
        InjectionStyle::Perturbed(seed) => Some(rng::seeded(seed)),
    };
    let maps = (0..n)
        .map(|alpha| {
            let mut odd = 1;
            (0..alpha as u64)
                .map(|g| {
                    let reroute = r.as_mut().is_some_and(|r| rng::below(r, 2) == 1);
                    if reroute {
                        odd += 2;
                        odd - 2
                    } else {
                        2 * g
                    }
                })
                .collect()
        })
        .collect();
    CoherentInjections::new(maps).expect("even and odd values never collide")
}

/// `f_alpha(n) = Phi(e_n, e_alpha)` for `n < split`.
pub fn gross_to_luzin(phi: &BilinearFragment, alpha: usize, split: usize) -> Result<Vec<Scalar>, GrossError> {
    let dimension = phi.dimension();
    if alpha >= dimension {
        return Err(GrossError::IndexOutOfRange { index: alpha, dimension });
    }
    if alpha < split {
        return Err(GrossError::IndexOrder { alpha, split });
    }
    Ok((0..split).map(|n| phi.entry(n, alpha).clone()).collect())
}

/// `Phi(e_alpha, e_beta) = g_beta(h_beta(alpha))` for `alpha < beta`, mirrored,
/// with zero diagonal.
pub fn luzin_to_gross(field: Field, g: &[Vec<Scalar>], h: &CoherentInjections, n: usize) -> Result<BilinearFragment, GrossError> {
    if g.len() < n {
        return Err(GrossError::TooFewWords { needed: n, got: g.len() });
    }
    if h.len() < n {
        return Err(GrossError::TooFewWords { needed: n, got: h.len() });
    }
    let mut m = vec![vec![field.zero(); n]; n];
    for beta in 0..n {
        for alpha in 0..beta {
            let at = h.h(beta, alpha) as usize;
            let v = g[beta].get(at).ok_or(GrossError::HorizonTooShort { beta, needed: at + 1, len: g[beta].len() })?;
            field.check(v)?;
            m[alpha][beta] = v.clone();
            m[beta][alpha] = v.clone();
        }
    }
    Ok(BilinearFragment::new(field, m)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub beta: usize,
    pub n: usize,
    pub read: Scalar,
    pub expected: Scalar,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundtripReport {
    pub checked: usize,
    pub mismatches: Vec<Mismatch>,
}

/// Read each `f_beta` (for `split <= beta < N`) back out of `phi` and compare
/// with `g_beta(h_beta(n))` for `n < split`.
pub fn roundtrip_check_form(phi: &BilinearFragment, g: &[Vec<Scalar>], h: &CoherentInjections, split: usize) -> Result<RoundtripReport, GrossError> {
    let mut report = RoundtripReport { checked: 0, mismatches: Vec::new() };
    for beta in split..phi.dimension() {
        let f = gross_to_luzin(phi, beta, split)?;
        for (n, read) in f.into_iter().enumerate().take(beta) {
            let expected = g[beta][h.h(beta, n) as usize].clone();
            report.checked += 1;
            if read != expected {
                report.mismatches.push(Mismatch { beta, n, read, expected });
            }
        }
    }
    Ok(report)
}

/// Build the form from `(g, h)` and check the composition.
pub fn roundtrip_check(field: Field, g: &[Vec<Scalar>], h: &CoherentInjections, n: usize, split: usize) -> Result<RoundtripReport, GrossError> {
    let phi = luzin_to_gross(field, g, h, n)?;
    roundtrip_check_form(&phi, g, h, split)
}

/// `dim U_i^perp` for `U_i` spanned by the first `i + 1` chain vectors.
pub fn complement_growth_scan(phi: &BilinearFragment, chain: &[Vec<Scalar>]) -> Result<Vec<usize>, GrossError> {
    (1..=chain.len()).map(|i| Ok(orthogonal_complement(phi, &chain[..i])?.len())).collect()
}

/// `Phi(y, z)` for `y = sum a_j e_{A(j)}` below the split and
/// `z = sum b_i e_{B(i)}` at or above it, computed through the matrix and
/// through the expanded double sum of word values. Returns both.
pub fn bookkeeping_identity(
    phi: &BilinearFragment,
    g: &[Vec<Scalar>],
    h: &CoherentInjections,
    split: usize,
    y: &[(usize, Scalar)],
    z: &[(usize, Scalar)],
) -> Result<(Scalar, Scalar), GrossError> {
    let field = phi.field();
    let dimension = phi.dimension();
    let mut yv = vec![field.zero(); dimension];
    let mut zv = vec![field.zero(); dimension];
    for (index, a) in y {
        if *index >= split {
            return Err(GrossError::WrongSide { index: *index, split });
        }
        yv[*index] = &yv[*index] + a;
    }
    for (index, b) in z {
        if *index < split || *index >= dimension {
            return Err(GrossError::WrongSide { index: *index, split });
        }
        zv[*index] = &zv[*index] + b;
    }
    let matrix = phi.eval(&yv, &zv)?;
    let mut expanded = field.zero();
    for (aj_index, aj) in y {
        for (bi_index, bi) in z {
            let at = h.h(*bi_index, *aj_index) as usize;
            expanded = &expanded + &(&(bi * aj) * &g[*bi_index][at]);
        }
    }
    Ok((matrix, expanded))
}

/// A form together with the injections that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrossFragment {
    pub form: BilinearFragment,
    pub injections: CoherentInjections,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64) -> Field {
        Field::Prime(p)
    }

    #[test]
    fn read_off_examples() {
        let id = BilinearFragment::identity(gf(2), 4);
        assert_eq!(gross_to_luzin(&id, 3, 2).unwrap(), vec![gf(2).zero(), gf(2).zero()]);
        let f = gf(3);
        let mut m = vec![vec![f.zero(); 3]; 3];
        m[0][2] = f.from_i64(1);
        m[2][0] = f.from_i64(1);
        m[1][2] = f.from_i64(2);
        m[2][1] = f.from_i64(2);
        let phi = BilinearFragment::new(f, m).unwrap();
        assert_eq!(gross_to_luzin(&phi, 2, 2).unwrap(), vec![f.from_i64(1), f.from_i64(2)]);
        assert_eq!(gross_to_luzin(&id, 1, 2), Err(GrossError::IndexOrder { alpha: 1, split: 2 }));
    }

    #[test]
    fn injection_examples() {
        let h = make_coherent_injections(3, InjectionStyle::Canonical);
        assert_eq!(h.map(2), &[0, 2]);
        let h = make_coherent_injections(7, InjectionStyle::Canonical);
        assert!((0..7).all(|a| h.map(a).iter().all(|v| v % 2 == 0)));
        let p = make_coherent_injections(7, InjectionStyle::Perturbed(11));
        assert_eq!(p, make_coherent_injections(7, InjectionStyle::Perturbed(11)));
        assert!((0..7).any(|a| h.map(a) != p.map(a)));
        // finitely many disagreements between levels: bounded by the lower level's size
        assert!((0..7).all(|b| (b..7).all(|a| p.disagreements(b, a) <= b)));
        assert_eq!(CoherentInjections::new(vec![vec![], vec![0], vec![1, 1]]), Err(GrossError::NotInjective(2)));
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<CoherentInjections>(&s).unwrap(), p);
    }

    #[test]
    fn build_examples() {
        let q = Field::Rationals;
        let h = make_coherent_injections(2, InjectionStyle::Canonical);
        let g = vec![vec![], vec![q.from_i64(5)]];
        let phi = luzin_to_gross(q, &g, &h, 2).unwrap();
        assert_eq!(phi.entry(0, 1), &q.from_i64(5));
        assert_eq!(phi.entry(1, 0), &q.from_i64(5));
        assert!(phi.entry(0, 0).is_zero());
        let h3 = make_coherent_injections(3, InjectionStyle::Canonical);
        let short = vec![vec![], vec![q.one()], vec![q.one(), q.one()]];
        assert!(matches!(luzin_to_gross(q, &short, &h3, 3), Err(GrossError::HorizonTooShort { beta: 2, .. })));
    }

    fn words(field: Field, n: usize, len: usize, seed: u64) -> Vec<Vec<Scalar>> {
        let mut r = rng::seeded(seed);
        (0..n).map(|_| (0..len).map(|_| field.from_i64(rng::below(&mut r, 7) as i64 - 3)).collect()).collect()
    }

    #[test]
    fn roundtrip_and_negative_control() {
        let f = gf(3);
        let g = words(f, 5, 10, 1);
        for style in [InjectionStyle::Canonical, InjectionStyle::Perturbed(4)] {
            let h = make_coherent_injections(5, style);
            let r = roundtrip_check(f, &g, &h, 5, 2).unwrap();
            assert!(r.mismatches.is_empty());
            assert_eq!(r.checked, 6);
        }
        let canon = make_coherent_injections(5, InjectionStyle::Canonical);
        let other = CoherentInjections::new((0..5).map(|a| (0..a as u64).rev().map(|v| 2 * v).collect()).collect()).unwrap();
        let phi = luzin_to_gross(f, &g, &other, 5).unwrap();
        let r = roundtrip_check_form(&phi, &g, &canon, 2).unwrap();
        assert!(!r.mismatches.is_empty());
    }

    #[test]
    fn complement_examples() {
        let f = gf(5);
        let e = |i: usize| (0..4).map(|j| if i == j { f.one() } else { f.zero() }).collect::<Vec<_>>();
        let id = BilinearFragment::identity(f, 4);
        assert_eq!(complement_growth_scan(&id, &[e(0), e(1)]).unwrap(), vec![3, 2]);
        let zero = BilinearFragment::new(f, vec![vec![f.zero(); 4]; 4]).unwrap();
        assert_eq!(complement_growth_scan(&zero, &[e(0), e(1)]).unwrap(), vec![4, 4]);
        let dep: Vec<Scalar> = e(0).iter().map(|x| x * &f.from_i64(2)).collect();
        assert_eq!(complement_growth_scan(&id, &[e(0), dep, e(2)]).unwrap(), vec![3, 3, 2]);
    }

    #[test]
    fn bookkeeping_example() {
        let q = Field::Rationals;
        let g = words(q, 5, 10, 9);
        let h = make_coherent_injections(5, InjectionStyle::Perturbed(2));
        let phi = luzin_to_gross(q, &g, &h, 5).unwrap();
        let y = [(0, q.fraction(1, 2)), (1, q.from_i64(-3))];
        let z = [(3, q.from_i64(2)), (4, q.fraction(-1, 3))];
        let (a, b) = bookkeeping_identity(&phi, &g, &h, 2, &y, &z).unwrap();
        assert_eq!(a, b);
        assert!(bookkeeping_identity(&phi, &g, &h, 2, &[(3, q.one())], &z).is_err());
    }
}
