//! Prime-power encodings of words as integer sequences, and the divisibility
//! chains that force two encodings agreeing off one position to agree there too.
//!
//! A word `f` is sent to `x(n) = prod_{i<n} p_i^(f(i)+n-i-1)`. Given a block
//! `(k, l)` and the finite trace of a homomorphism (the tail value `a` and the
//! values `h(e_j)` for `k < j < l`), the chain `x_hat_{k+1}, ..., x_hat_l`
//! must consist of integers. For two words differing only at `k` the chain
//! differences lose exactly one factor of `p = p_k` per step, and the bound
//! `|a| < l - k` leaves no room for that, which is what the refuter confirms
//! by exhaustive search.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{p_adic_valuation, Scalar};
use crate::predict::{DeBlock, DeRule, GeneralizedPredictorDE, PredictError, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpeckerError {
    #[error("block ({k}, {l}) is degenerate: k must be below l")]
    DegenerateBlock { k: usize, l: usize },
    #[error("word has length {len}, at least {needed} is needed")]
    WordTooShort { len: usize, needed: usize },
    #[error("{needed} values of h are needed, {got} were given")]
    MissingHValues { needed: usize, got: usize },
    #[error("the tail value a must be nonzero")]
    ZeroTail,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("words {first} and {second} agree off k = {k} on block ({k}, {l}) and the refuter found a common chain")]
    AmbiguousValue { first: usize, second: usize, k: usize, l: usize },
    #[error(transparent)]
    Predict(#[from] PredictError),
}

/// The first `n` primes.
pub fn first_primes(n: usize) -> Vec<u64> {
    let mut ps: Vec<u64> = Vec::with_capacity(n);
    let mut c = 2u64;
    while ps.len() < n {
        if ps.iter().take_while(|&&p| p * p <= c).all(|&p| c % p != 0) {
            ps.push(c);
        }
        c += 1;
    }
    ps
}

/// Entries serialize as decimal strings, since they outgrow every fixed-width integer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpeckerVector {
    #[serde(with = "decimal")]
    pub entries: Vec<BigInt>,
    pub source: Word,
}

/// `x(0..n)` with `x(m) = prod_{i<m} p_i^(f(i)+m-i-1)`.
pub fn specker_encode(f: &[u64], n: usize) -> Result<SpeckerVector, SpeckerError> {
    let needed = n.saturating_sub(1);
    if f.len() < needed {
        return Err(SpeckerError::WordTooShort { len: f.len(), needed });
    }
    let primes = first_primes(needed);
    let entries = (0..n)
        .map(|m| {
            (0..m).fold(BigInt::one(), |acc, i| {
                acc * BigInt::from(primes[i]).pow((f[i] + (m - i - 1) as u64) as u32)
            })
        })
        .collect();
    Ok(SpeckerVector { entries, source: f[..needed].to_vec() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "at", rename_all = "snake_case")]
pub enum ChainVerdict {
    AllIntegral,
    BreaksAt(usize),
}

/// The chain `x_hat_{k+1} .. x_hat_l`; `values[i]` is `x_hat_{k+1+i}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainResult {
    pub k: usize,
    pub l: usize,
    pub values: Vec<Scalar>,
    pub integral: Vec<bool>,
    pub verdict: ChainVerdict,
}

impl ChainResult {
    pub fn value(&self, j: usize) -> &BigRational {
        self.values[j - self.k - 1].as_rational().expect("chain values are rational")
    }

    pub fn all_integral(&self) -> bool {
        self.verdict == ChainVerdict::AllIntegral
    }
}

fn big(p: u64) -> BigInt {
    BigInt::from(p)
}

/// `b_j = prod_{i<k or k<i<j} p_i^(f(i)+j-i-1)`.
pub fn chain_b(f: &[u64], k: usize, j: usize, primes: &[u64]) -> BigInt {
    (0..j)
        .filter(|&i| i != k)
        .fold(BigInt::one(), |acc, i| acc * big(primes[i]).pow((f[i] + (j - i - 1) as u64) as u32))
}

/// Solve the block recursion
///
/// ```text
/// x_hat_{k+1} * b_{k+1} * p^f(k) = a
/// x_hat_j * b_j * p^(f(k)+j-k-1) = h(e_j) * b_j * p^(f(k)+j-k-1) + x_hat_{j+1} * b_{j+1} * p^(f(k)+j-k)
/// ```
///
/// for `k < j < l`, with `p = p_k`. `h[i]` is `h(e_{k+1+i})`; the value `h(e_l)`
/// does not enter, so a trailing extra entry is ignored.
pub fn hat_chain(a: &BigInt, k: usize, l: usize, f: &[u64], h: &[i64]) -> Result<ChainResult, SpeckerError> {
    if k >= l {
        return Err(SpeckerError::DegenerateBlock { k, l });
    }
    if f.len() < l {
        return Err(SpeckerError::WordTooShort { len: f.len(), needed: l });
    }
    if h.len() + 1 < l - k {
        return Err(SpeckerError::MissingHValues { needed: l - k - 1, got: h.len() });
    }
    if a.is_zero() {
        return Err(SpeckerError::ZeroTail);
    }
    let primes = first_primes(l + 1);
    let p = big(primes[k]);
    let fk = f[k] as u32;
    let mut b = chain_b(f, k, k + 1, &primes);
    let mut x = BigRational::new(a.clone(), &b * p.pow(fk));
    let mut values = vec![x.clone()];
    for j in k + 1..l {
        let b_next = chain_b(f, k, j + 1, &primes);
        let scale = BigRational::from_integer(&b * p.pow(fk + (j - k - 1) as u32));
        let rest = (&x - BigRational::from_integer(BigInt::from(h[j - k - 1]))) * scale;
        x = rest / BigRational::from_integer(&b_next * p.pow(fk + (j - k) as u32));
        values.push(x.clone());
        b = b_next;
    }
    let integral: Vec<bool> = values.iter().map(|v| v.is_integer()).collect();
    let verdict = match integral.iter().position(|&i| !i) {
        Some(i) => ChainVerdict::BreaksAt(k + 1 + i),
        None => ChainVerdict::AllIntegral,
    };
    Ok(ChainResult { k, l, values: values.into_iter().map(Scalar::Rat).collect(), integral, verdict })
}

/// Check that consecutive chain differences lose exactly one factor of `p`:
/// `v_p(d_{j+1}) = v_p(d_j) - 1` with `d_j = x_hat^alpha_j - x_hat^beta_j != 0`.
/// Returns the first offending `j`, if any.
pub fn difference_decay_violation(alpha: &ChainResult, beta: &ChainResult, p: u64) -> Option<usize> {
    let mut prev: Option<i64> = None;
    for j in alpha.k + 1..=alpha.l {
        let d = alpha.value(j) - beta.value(j);
        let v = p_adic_valuation(&d, p)?;
        if prev.is_some_and(|pv| v != pv - 1) {
            return Some(j);
        }
        prev = Some(v);
    }
    None
}

/// Search ranges for the refuter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefuterBounds {
    /// Tail values `a` with `0 < |a| <= a_max`; must stay below `l - k`.
    pub a_max: u64,
    /// Grid `|h(e_j)| <= h_max` for `k < j < l`.
    pub h_max: u64,
    /// Declared bound on `|h(e_k)|`, which enters only the spacing condition `l - k > 2 w^2`.
    pub kn_weight: u64,
}

impl RefuterBounds {
    /// `a_max = l - k - 1`, `h_max = 1`, `kn_weight = 1`.
    pub fn default_for(k: usize, l: usize) -> Self {
        RefuterBounds { a_max: (l - k).saturating_sub(1) as u64, h_max: 1, kn_weight: 1 }
    }

    pub fn check(&self, k: usize, l: usize) -> Result<(), SpeckerError> {
        if k >= l {
            return Err(SpeckerError::DegenerateBlock { k, l });
        }
        let gap = (l - k) as u64;
        if gap <= 2 * self.kn_weight * self.kn_weight {
            return Err(SpeckerError::PreconditionViolated(format!(
                "spacing l - k = {gap} is not above 2 * {}^2",
                self.kn_weight
            )));
        }
        if self.a_max >= gap {
            return Err(SpeckerError::PreconditionViolated(format!("|a| <= {} is not below l - k = {gap}", self.a_max)));
        }
        if self.a_max == 0 {
            return Err(SpeckerError::PreconditionViolated("no nonzero tail value to search".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridPoint {
    pub a: i64,
    pub h: Vec<i64>,
    pub alpha: ChainVerdict,
    pub beta: ChainVerdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum RefuterVerdict {
    Refuted,
    CounterexampleFound { a: i64, h: Vec<i64> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefuterReport {
    pub verdict: RefuterVerdict,
    pub points: Vec<GridPoint>,
    /// Grid points where at least one of the two chains is integral.
    pub integral_chains: usize,
    /// Grid points where the factor-of-p decay of the differences failed.
    pub decay_violations: usize,
}

/// All vectors in `[-m, m]^len`, last coordinate fastest.
fn h_grid(len: usize, m: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out.into_iter().flat_map(|v| (-m..=m).map(move |x| [v.clone(), vec![x]].concat())).collect();
    }
    out
}

/// Exhaustive search for a tail value and block trace making both chains integral.
pub fn collision_refuter(
    f_alpha: &[u64],
    f_beta: &[u64],
    k: usize,
    l: usize,
    bounds: RefuterBounds,
) -> Result<RefuterReport, SpeckerError> {
    bounds.check(k, l)?;
    for f in [f_alpha, f_beta] {
        if f.len() < l {
            return Err(SpeckerError::WordTooShort { len: f.len(), needed: l });
        }
    }
    if f_alpha[k] == f_beta[k] {
        return Err(SpeckerError::PreconditionViolated(format!("the words agree at k = {k}")));
    }
    if (0..l).any(|i| i != k && f_alpha[i] != f_beta[i]) {
        return Err(SpeckerError::PreconditionViolated(format!("the words differ off k = {k} below l = {l}")));
    }
    let p = first_primes(k + 1)[k];
    let a_max = bounds.a_max as i64;
    let mut report =
        RefuterReport { verdict: RefuterVerdict::Refuted, points: Vec::new(), integral_chains: 0, decay_violations: 0 };
    for a in (-a_max..=a_max).filter(|&a| a != 0) {
        let a_big = BigInt::from(a);
        for h in h_grid(l - k - 1, bounds.h_max as i64) {
            let ca = hat_chain(&a_big, k, l, f_alpha, &h)?;
            let cb = hat_chain(&a_big, k, l, f_beta, &h)?;
            if ca.all_integral() || cb.all_integral() {
                report.integral_chains += 1;
            }
            if difference_decay_violation(&ca, &cb, p).is_some() {
                report.decay_violations += 1;
            }
            if ca.all_integral() && cb.all_integral() && report.verdict == RefuterVerdict::Refuted {
                report.verdict = RefuterVerdict::CounterexampleFound { a, h: h.clone() };
            }
            report.points.push(GridPoint { a, h, alpha: ca.verdict, beta: cb.verdict });
        }
    }
    Ok(report)
}

/// Two family members that agree off `k` on a block but differ at `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Collision {
    pub block: usize,
    pub kept: usize,
    pub dropped: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefuterPredictor {
    pub predictor: GeneralizedPredictorDE,
    pub collisions: Vec<Collision>,
}

/// Build the block predictor that, at block `(k, l)`, looks up the family member
/// matching the argument off `k` and returns its value at `k` (0 if none matches).
///
/// When two members match but differ at `k`, the refuter is run on them; a
/// `Refuted` answer keeps the first member's value and records the collision,
/// while a counterexample is reported as `AmbiguousValue`.
pub fn predictor_from_refuter(
    family: &[Word],
    schedule: &[(usize, usize)],
    bounds: RefuterBounds,
) -> Result<RefuterPredictor, SpeckerError> {
    let mut blocks = Vec::new();
    let mut collisions = Vec::new();
    if family.is_empty() {
        return Ok(RefuterPredictor { predictor: GeneralizedPredictorDE::new(blocks)?, collisions });
    }
    for (bi, &(k, l)) in schedule.iter().enumerate() {
        bounds.check(k, l)?;
        let mut table: BTreeMap<Word, (usize, u64)> = BTreeMap::new();
        for (idx, f) in family.iter().enumerate() {
            if f.len() < l {
                return Err(SpeckerError::WordTooShort { len: f.len(), needed: l });
            }
            let block = DeBlock { k, l, rule: DeRule::Const { value: 0 } };
            let key = block.argument(f);
            match table.get(&key) {
                None => {
                    table.insert(key, (idx, f[k]));
                }
                Some(&(first, v)) if v != f[k] => {
                    let r = collision_refuter(&family[first], f, k, l, bounds)?;
                    if r.verdict != RefuterVerdict::Refuted {
                        return Err(SpeckerError::AmbiguousValue { first, second: idx, k, l });
                    }
                    collisions.push(Collision { block: bi, kept: first, dropped: idx });
                }
                Some(_) => {}
            }
        }
        let entries = table.into_iter().map(|(w, (_, v))| (w, v)).collect();
        blocks.push(DeBlock { k, l, rule: DeRule::Table { entries, default: 0 } });
    }
    Ok(RefuterPredictor { predictor: GeneralizedPredictorDE::new(blocks)?, collisions })
}

/// One predictor per label `z`, built from the members carrying that label.
pub fn predictors_by_label(
    family: &[(i64, Word)],
    schedule: &[(usize, usize)],
    bounds: RefuterBounds,
) -> Result<BTreeMap<i64, RefuterPredictor>, SpeckerError> {
    let mut groups: BTreeMap<i64, Vec<Word>> = BTreeMap::new();
    for (z, w) in family {
        groups.entry(*z).or_default().push(w.clone());
    }
    groups.into_iter().map(|(z, ws)| Ok((z, predictor_from_refuter(&ws, schedule, bounds)?))).collect()
}

mod decimal {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|x| x.to_string()).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<String>::deserialize(d)?.iter().map(|x| x.parse().map_err(serde::de::Error::custom)).collect()
    }
}

/// Largest power of `p` dividing the nonzero integer `x`, by repeated division.
pub fn multiplicity(x: &BigInt, p: u64) -> u32 {
    let pb = big(p);
    let mut x = x.abs();
    let mut k = 0;
    while !x.is_zero() && (&x % &pb).is_zero() {
        x /= &pb;
        k += 1;
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predict::{check_prediction_de, Verdict};

    fn ints(v: &SpeckerVector) -> Vec<i64> {
        v.entries.iter().map(|x| x.try_into().unwrap()).collect()
    }

    #[test]
    fn primes() {
        assert_eq!(first_primes(6), vec![2, 3, 5, 7, 11, 13]);
    }

    #[test]
    fn encodings() {
        assert_eq!(ints(&specker_encode(&[0, 0, 0], 4).unwrap()), vec![1, 1, 2, 12]);
        assert_eq!(ints(&specker_encode(&[1, 1], 3).unwrap()), vec![1, 2, 12]);
        assert_eq!(ints(&specker_encode(&[0, 1], 3).unwrap()), vec![1, 1, 6]);
        assert!(specker_encode(&[0], 3).is_err());
    }

    #[test]
    fn vector_json_roundtrip() {
        let v = specker_encode(&[2; 30], 31).unwrap();
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(serde_json::from_str::<SpeckerVector>(&s).unwrap(), v);
    }

    #[test]
    fn encodings_are_exact_for_long_words() {
        let f = vec![3u64; 40];
        let v = specker_encode(&f, 41).unwrap();
        assert!(v.entries[40].bits() > 64);
        assert_eq!(multiplicity(&v.entries[40], 2), 3 + 39);
    }

    #[test]
    fn divisibility_ladder() {
        for w in crate::predict::WordIter::new(vec![3; 4]) {
            let v = specker_encode(&w, 5).unwrap();
            let ps = first_primes(4);
            for n in 0..5 {
                for (i, &p) in ps.iter().enumerate().take(n) {
                    assert_eq!(multiplicity(&v.entries[n], p) as u64, w[i] + (n - i - 1) as u64);
                }
            }
        }
    }

    fn q(s: &str) -> Scalar {
        s.parse().unwrap()
    }

    #[test]
    fn worked_chains() {
        let f = [1, 0];
        let c = hat_chain(&BigInt::from(6), 0, 2, &f, &[1]).unwrap();
        assert_eq!(c.values, vec![q("q:3"), q("q:1")]);
        assert_eq!(c.verdict, ChainVerdict::AllIntegral);
        let c = hat_chain(&BigInt::from(3), 0, 2, &f, &[1]).unwrap();
        assert_eq!(c.verdict, ChainVerdict::BreaksAt(1));
        let c = hat_chain(&BigInt::from(6), 0, 2, &f, &[2]).unwrap();
        assert_eq!(c.values[1], q("q:1/2"));
        assert_eq!(c.verdict, ChainVerdict::BreaksAt(2));
        assert!(matches!(hat_chain(&BigInt::from(6), 2, 2, &f, &[]), Err(SpeckerError::DegenerateBlock { .. })));
    }

    #[test]
    fn chain_is_linear_in_a() {
        let f = [2, 1, 0, 1, 2];
        let h = [1, -1, 2, 0];
        let base = hat_chain(&BigInt::from(5), 0, 5, &f, &h).unwrap();
        let zero_h = hat_chain(&BigInt::from(5), 0, 5, &f, &[0; 4]).unwrap();
        let scaled = hat_chain(&BigInt::from(15), 0, 5, &f, &[0; 4]).unwrap();
        for j in 1..=5 {
            assert_eq!(scaled.value(j), &(zero_h.value(j) * BigRational::from_integer(BigInt::from(3))));
        }
        assert_ne!(base, zero_h);
    }

    #[test]
    fn refuter_examples() {
        let fa = [0, 0, 0, 0];
        let fb = [1, 0, 0, 0];
        let bounds = RefuterBounds { a_max: 3, h_max: 1, kn_weight: 1 };
        let r = collision_refuter(&fa, &fb, 0, 4, bounds).unwrap();
        assert_eq!(r.verdict, RefuterVerdict::Refuted);
        assert_eq!(r.decay_violations, 0);
        assert_eq!(r.points.len(), 6 * 27);
        assert!(matches!(collision_refuter(&fa, &fa, 0, 4, bounds), Err(SpeckerError::PreconditionViolated(_))));
        let tight = RefuterBounds { a_max: 1, h_max: 1, kn_weight: 1 };
        assert!(matches!(collision_refuter(&fa[..2], &fb[..2], 0, 2, tight), Err(SpeckerError::PreconditionViolated(_))));
    }

    #[test]
    fn refuter_predictors() {
        let one = vec![vec![2, 1, 0, 1, 0, 0, 0, 1]];
        let schedule = [(0, 3), (4, 7)];
        let bounds = RefuterBounds { a_max: 2, h_max: 1, kn_weight: 1 };
        let rp = predictor_from_refuter(&one, &schedule, bounds).unwrap();
        assert_eq!(check_prediction_de(&rp.predictor, &one[0], 0).unwrap().verdict, Verdict::Predicted);
        let pair = vec![vec![0, 1, 1, 0, 0, 0, 0], vec![1, 1, 1, 0, 0, 0, 0]];
        let rp = predictor_from_refuter(&pair, &schedule, bounds).unwrap();
        assert_eq!(rp.collisions, vec![Collision { block: 0, kept: 0, dropped: 1 }]);
        let by_z = predictors_by_label(&[(0, pair[0].clone()), (1, pair[1].clone())], &schedule, bounds).unwrap();
        for (i, (_, rp)) in by_z.iter().enumerate() {
            assert!(rp.collisions.is_empty());
            assert_eq!(check_prediction_de(&rp.predictor, &pair[i], 0).unwrap().verdict, Verdict::Predicted);
        }
        let empty = predictor_from_refuter(&[], &schedule, bounds).unwrap();
        assert_eq!(check_prediction_de(&empty.predictor, &pair[0], 0).unwrap().verdict, Verdict::Inconclusive);
    }
}
