//! Sequence spaces, predictors and the finite-horizon prediction check.
//!
//! A predictor guesses `f(n)` from `f` restricted to `n` at every `n` in its
//! domain. At a finite horizon "all but finitely many" becomes an explicit
//! grace index: only domain indices `n` with `grace <= n < len(f)` are
//! checked. A check with nothing to look at is `Inconclusive`.

mod generalized;
mod linear;
mod rule;
mod space;

pub use generalized::{
    check_prediction_de, check_prediction_setvalued, check_slalom_evasion, DeBlock, DeRule, GeneralizedPredictorDE,
    SetBlock, SetRule, SetValuedPredictor, Slalom,
};
pub use linear::{check_linear_prediction, LinearPredictor};
pub use rule::IndexRule;
pub use space::{Bound, SpaceSpec, Word, WordIter};

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, Field, LinearForm};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PredictError {
    #[error("bound {0} is below 2")]
    BadBound(u64),
    #[error("space lists {bounds} bounds but declares horizon {horizon}")]
    HorizonMismatch { bounds: usize, horizon: usize },
    #[error("table at index {index} has no entry for {word:?}")]
    IncompleteTable { index: usize, word: Word },
    #[error("table at index {index} has {got} entries, expected {expected}")]
    TableSize { index: usize, expected: u128, got: usize },
    #[error("value {value} at index {index} is not below the bound {bound}")]
    OutOfBoundsValue { index: usize, value: u64, bound: Bound },
    #[error("index {index} is beyond the horizon {horizon}")]
    IndexBeyondHorizon { index: usize, horizon: usize },
    #[error("a table at index {index} would range over an unbounded coordinate")]
    UnboundedTable { index: usize },
    #[error("word {word:?} is not in the space")]
    WordOutsideSpace { word: Word },
    #[error("grace {grace} exceeds the word length {len}")]
    GraceBeyondWord { grace: usize, len: usize },
    #[error("rule at index {index} needs an argument of length {needs}")]
    RuleArity { index: usize, needs: usize },
    #[error("slalom set at index {index} has {size} elements")]
    SlalomTooWide { index: usize, size: usize },
    #[error("blocks are not interleaved at block {block}")]
    Interleaving { block: usize },
    #[error("block at {k} lists a position {l} below it")]
    BlockBelowIndex { k: usize, l: usize },
    #[error("predictor space does not match")]
    SpecMismatch,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// A predictor `(D, (pi_n)_{n in D})` attached to a space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPredictor")]
pub struct Predictor {
    spec: SpaceSpec,
    rules: BTreeMap<usize, IndexRule>,
}

#[derive(Deserialize)]
struct RawPredictor {
    spec: SpaceSpec,
    rules: BTreeMap<usize, IndexRule>,
}

impl TryFrom<RawPredictor> for Predictor {
    type Error = PredictError;
    fn try_from(raw: RawPredictor) -> Result<Self, Self::Error> {
        Predictor::new(raw.spec, raw.rules)
    }
}

impl Predictor {
    pub fn new(spec: SpaceSpec, rules: BTreeMap<usize, IndexRule>) -> Result<Self, PredictError> {
        for (&n, rule) in &rules {
            if n >= spec.horizon() {
                return Err(PredictError::IndexBeyondHorizon { index: n, horizon: spec.horizon() });
            }
            rule.validate(n, &spec)?;
        }
        Ok(Predictor { spec, rules })
    }

    /// Tabulate `rule` at every index of `domain` over the (bounded) space prefix.
    pub fn tabulate<F>(spec: SpaceSpec, domain: &[usize], mut rule: F) -> Result<Self, PredictError>
    where
        F: FnMut(usize, &[u64]) -> u64,
    {
        let mut rules = BTreeMap::new();
        for &n in domain {
            if n >= spec.horizon() {
                return Err(PredictError::IndexBeyondHorizon { index: n, horizon: spec.horizon() });
            }
            let words = spec.words(n).ok_or(PredictError::UnboundedTable { index: n })?;
            let values = words.map(|w| rule(n, &w)).collect();
            rules.insert(n, IndexRule::Table { values });
        }
        Predictor::new(spec, rules)
    }

    pub fn spec(&self) -> &SpaceSpec {
        &self.spec
    }

    pub fn rules(&self) -> &BTreeMap<usize, IndexRule> {
        &self.rules
    }

    pub fn rule(&self, n: usize) -> Option<&IndexRule> {
        self.rules.get(&n)
    }

    pub fn domain(&self) -> impl Iterator<Item = usize> + '_ {
        self.rules.keys().copied()
    }

    /// The guess `pi_n(sigma)`, where `n = len(sigma)`. `None` if `n` is not in the domain.
    pub fn predict(&self, sigma: &[u64]) -> Result<Option<u64>, PredictError> {
        let n = sigma.len();
        let Some(rule) = self.rules.get(&n) else { return Ok(None) };
        let v = rule.eval(sigma, &self.spec)?;
        let bound = self.spec.bound(n).expect("domain lies below the horizon");
        if !bound.admits(v) {
            return Err(PredictError::OutOfBoundsValue { index: n, value: v, bound });
        }
        Ok(Some(v))
    }

    /// Coefficients of the rule at `n`, viewed as a map `GF(p)^n -> GF(p)`.
    pub fn coefficients_at(&self, n: usize, p: u64) -> Result<LinearForm, PredictError> {
        let field = Field::prime(p)?;
        let mut failure = None;
        let form = crate::algebra::coefficients_of(field, n, |s| {
            let sigma: Word = s.iter().map(|x| x.residue().expect("prime field")).collect();
            match self.predict(&sigma) {
                Ok(Some(v)) => field.from_i64(v as i64),
                Ok(None) => field.zero(),
                Err(e) => {
                    failure.get_or_insert(e);
                    field.zero()
                }
            }
        });
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(form?)
    }
}

/// Build a predictor from explicit per-index maps `word -> value`.
pub fn make_table_predictor(
    spec: SpaceSpec,
    tables: &BTreeMap<usize, BTreeMap<Word, u64>>,
) -> Result<Predictor, PredictError> {
    let mut rules = BTreeMap::new();
    for (&n, table) in tables {
        if n >= spec.horizon() {
            return Err(PredictError::IndexBeyondHorizon { index: n, horizon: spec.horizon() });
        }
        let words = spec.words(n).ok_or(PredictError::UnboundedTable { index: n })?;
        let mut values = Vec::new();
        for w in words {
            let v = *table.get(&w).ok_or_else(|| PredictError::IncompleteTable { index: n, word: w.clone() })?;
            values.push(v);
        }
        rules.insert(n, IndexRule::Table { values });
    }
    Predictor::new(spec, rules)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Predicted,
    Evades,
    Inconclusive,
}

/// Outcome of checking one word against one predictor variant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionReport {
    pub checked: BTreeSet<usize>,
    pub hits: BTreeSet<usize>,
    pub misses: BTreeSet<usize>,
    pub verdict: Verdict,
}

impl PredictionReport {
    /// Assemble a report from per-index outcomes (`true` for a hit).
    pub fn from_outcomes(outcomes: impl IntoIterator<Item = (usize, bool)>) -> Self {
        let mut r = PredictionReport {
            checked: BTreeSet::new(),
            hits: BTreeSet::new(),
            misses: BTreeSet::new(),
            verdict: Verdict::Inconclusive,
        };
        for (n, hit) in outcomes {
            r.checked.insert(n);
            if hit {
                r.hits.insert(n);
            } else {
                r.misses.insert(n);
            }
        }
        r.verdict = if !r.misses.is_empty() {
            Verdict::Evades
        } else if r.checked.is_empty() {
            Verdict::Inconclusive
        } else {
            Verdict::Predicted
        };
        r
    }

    pub fn predicted(&self) -> bool {
        self.verdict == Verdict::Predicted
    }

    pub fn first_miss(&self) -> Option<usize> {
        self.misses.first().copied()
    }
}

pub(crate) fn check_grace(grace: usize, len: usize) -> Result<(), PredictError> {
    if grace > len {
        Err(PredictError::GraceBeyondWord { grace, len })
    } else {
        Ok(())
    }
}

/// Check the word `g` against `pi` at every domain index in `grace..len(g)`.
pub fn check_prediction(pi: &Predictor, g: &[u64], grace: usize) -> Result<PredictionReport, PredictError> {
    pi.spec.check_word(g)?;
    check_grace(grace, g.len())?;
    let outcomes = pi
        .rules
        .range(grace..g.len())
        .map(|(&n, _)| Ok((n, pi.predict(&g[..n])? == Some(g[n]))))
        .collect::<Result<Vec<_>, PredictError>>()?;
    Ok(PredictionReport::from_outcomes(outcomes))
}

/// A word of full horizon length missing every guess of `pi`.
///
/// Where a guess exists the smallest other legal value is taken, elsewhere 0.
/// Every coordinate in the domain needs a bound of at least 2, which the space
/// invariants provide.
pub fn evading_word(pi: &Predictor) -> Result<Word, PredictError> {
    let mut w = Vec::with_capacity(pi.spec.horizon());
    for _ in 0..pi.spec.horizon() {
        let v = match pi.predict(&w)? {
            Some(0) => 1,
            _ => 0,
        };
        w.push(v);
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn table(entries: &[(&[u64], u64)]) -> BTreeMap<Word, u64> {
        entries.iter().map(|(w, v)| (w.to_vec(), *v)).collect()
    }

    #[test]
    fn table_predictor_construction() {
        let spec = SpaceSpec::uniform(2, 3).unwrap();
        let ok = BTreeMap::from([(1, table(&[(&[0], 1), (&[1], 0)]))]);
        let p = make_table_predictor(spec.clone(), &ok).unwrap();
        assert_eq!(p.predict(&[0]).unwrap(), Some(1));
        assert_eq!(p.predict(&[1]).unwrap(), Some(0));
        assert_eq!(p.predict(&[1, 1]).unwrap(), None);

        let missing = BTreeMap::from([(1, table(&[(&[0], 1)]))]);
        assert_eq!(
            make_table_predictor(spec.clone(), &missing),
            Err(PredictError::IncompleteTable { index: 1, word: vec![1] })
        );
        let spec2 = SpaceSpec::uniform(2, 2).unwrap();
        let big = BTreeMap::from([(1, table(&[(&[0], 5), (&[1], 0)]))]);
        assert!(matches!(make_table_predictor(spec2, &big), Err(PredictError::OutOfBoundsValue { value: 5, .. })));
        let far = BTreeMap::from([(3, BTreeMap::new())]);
        assert!(matches!(make_table_predictor(spec, &far), Err(PredictError::IndexBeyondHorizon { .. })));
    }

    fn example_predictor() -> Predictor {
        let rules = BTreeMap::from([(0, IndexRule::Const { value: 5 }), (2, IndexRule::Copy { from: 0 })]);
        Predictor::new(SpaceSpec::unbounded(3), rules).unwrap()
    }

    #[test]
    fn worked_checks() {
        let p = example_predictor();
        let r = check_prediction(&p, &[5, 9, 5], 0).unwrap();
        assert_eq!(r.hits, BTreeSet::from([0, 2]));
        assert_eq!(r.verdict, Verdict::Predicted);
        // pi_2 copies position 0, so (4, 9, 5) misses at 2 as well as at 0
        let r = check_prediction(&p, &[4, 9, 5], 0).unwrap();
        assert_eq!(r.misses, BTreeSet::from([0, 2]));
        assert_eq!(r.verdict, Verdict::Evades);
        let r = check_prediction(&p, &[4, 9, 5], 1).unwrap();
        assert_eq!(r.checked, BTreeSet::from([2]));
        assert_eq!(r.verdict, Verdict::Evades);
        let r = check_prediction(&p, &[4, 9, 4], 1).unwrap();
        assert_eq!(r.hits, BTreeSet::from([2]));
        assert_eq!(r.verdict, Verdict::Predicted);
        let r = check_prediction(&p, &[4, 9, 5], 3).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert!(check_prediction(&p, &[4], 2).is_err());
    }

    #[test]
    fn empty_domain_is_inconclusive() {
        let p = Predictor::new(SpaceSpec::uniform(2, 2).unwrap(), BTreeMap::new()).unwrap();
        assert_eq!(check_prediction(&p, &[0, 1], 0).unwrap().verdict, Verdict::Inconclusive);
    }

    #[test]
    fn foreign_words_rejected() {
        let p = Predictor::new(SpaceSpec::uniform(2, 2).unwrap(), BTreeMap::new()).unwrap();
        assert!(matches!(check_prediction(&p, &[2], 0), Err(PredictError::WordOutsideSpace { .. })));
        assert!(matches!(check_prediction(&p, &[0, 0, 0], 0), Err(PredictError::WordOutsideSpace { .. })));
    }

    #[test]
    fn linear_rule_coefficients() {
        let rules = BTreeMap::from([(2, IndexRule::Linear { p: 3, coefficients: vec![1, 2] })]);
        let p = Predictor::new(SpaceSpec::uniform(3, 3).unwrap(), rules).unwrap();
        let f = p.coefficients_at(2, 3).unwrap();
        assert_eq!(f.coefficients().iter().map(|c| c.residue().unwrap()).collect::<Vec<_>>(), vec![1, 2]);
        let nonlinear = Predictor::tabulate(SpaceSpec::uniform(3, 3).unwrap(), &[2], |_, s| s[0] * s[1] % 3).unwrap();
        assert!(nonlinear.coefficients_at(2, 3).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let p = example_predictor();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<Predictor>(&s).unwrap(), p);
        let bad = r#"{"spec":{"bounds":[2,2],"horizon":2},"rules":{"1":{"rule":"table","values":[0,7]}}}"#;
        assert!(serde_json::from_str::<Predictor>(bad).is_err());
    }

    /// Random table predictor with bounds in 2..=3, horizon up to 5.
    fn table_predictor() -> impl Strategy<Value = Predictor> {
        (proptest::collection::vec(2u64..=3, 1..=5), any::<u64>(), proptest::collection::vec(any::<bool>(), 5))
            .prop_map(|(bounds, seed, in_d)| {
                let spec = SpaceSpec::bounded(&bounds).unwrap();
                let domain: Vec<usize> = (0..bounds.len()).filter(|&n| in_d[n]).collect();
                let mut state = seed;
                Predictor::tabulate(spec, &domain, |n, _| {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    (state >> 33) % bounds[n]
                })
                .unwrap()
            })
    }

    fn all_words(spec: &SpaceSpec) -> Vec<Word> {
        (0..=spec.horizon()).flat_map(|n| spec.words(n).unwrap()).collect()
    }

    proptest! {
        #[test]
        fn reports_partition_and_grace_monotone(p in table_predictor()) {
            for g in all_words(p.spec()) {
                let mut predicted_from = None;
                for grace in 0..=g.len() {
                    let r = check_prediction(&p, &g, grace).unwrap();
                    prop_assert!(r.hits.is_disjoint(&r.misses));
                    let union: BTreeSet<usize> = r.hits.union(&r.misses).copied().collect();
                    prop_assert_eq!(&union, &r.checked);
                    prop_assert_eq!(r.clone(), check_prediction(&p, &g, grace).unwrap());
                    if predicted_from.is_some() && !r.checked.is_empty() {
                        prop_assert_eq!(r.verdict, Verdict::Predicted);
                    }
                    if r.predicted() && predicted_from.is_none() {
                        predicted_from = Some(grace);
                    }
                }
            }
        }

        #[test]
        fn some_word_evades(p in table_predictor()) {
            let w = evading_word(&p).unwrap();
            let r = check_prediction(&p, &w, 0).unwrap();
            prop_assert_eq!(&r.misses, &r.checked);
            if p.domain().next().is_some() {
                prop_assert_eq!(r.verdict, Verdict::Evades);
                // the exhaustive search finds the same kind of witness
                let spec = p.spec().clone();
                let found = spec.words(spec.horizon()).unwrap()
                    .any(|g| check_prediction(&p, &g, 0).unwrap().verdict == Verdict::Evades);
                prop_assert!(found);
            }
        }
    }
}
