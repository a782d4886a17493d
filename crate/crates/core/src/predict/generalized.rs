//! Predictor variants that read or guess more than one position per step.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{check_grace, PredictError, PredictionReport, Word};

/// The rule of one block of a (D,E)-generalized predictor. Its argument is the
/// word `f` restricted to `0..l` with position `k` removed, in increasing order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum DeRule {
    Const { value: u64 },
    /// The entry at original position `from` (which must differ from `k`).
    Copy { from: usize },
    /// Lookup keyed on the argument word, with a fallback.
    Table { entries: Vec<(Word, u64)>, default: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeBlock {
    pub k: usize,
    pub l: usize,
    pub rule: DeRule,
}

impl DeBlock {
    /// `f` on `0..l` without position `k`.
    pub fn argument(&self, f: &[u64]) -> Word {
        f[..self.l].iter().enumerate().filter(|&(i, _)| i != self.k).map(|(_, &v)| v).collect()
    }

    pub fn eval(&self, f: &[u64]) -> Result<u64, PredictError> {
        match &self.rule {
            DeRule::Const { value } => Ok(*value),
            DeRule::Copy { from } => {
                if *from == self.k || *from >= self.l {
                    return Err(PredictError::RuleArity { index: self.k, needs: from + 1 });
                }
                Ok(f[*from])
            }
            DeRule::Table { entries, default } => {
                let arg = self.argument(f);
                Ok(entries.iter().find(|(w, _)| *w == arg).map_or(*default, |(_, v)| *v))
            }
        }
    }
}

/// Blocks `(k_n, l_n)` with `k_n <= l_n < k_{n+1}`; block `n` guesses `f(k_n)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawDe")]
pub struct GeneralizedPredictorDE {
    blocks: Vec<DeBlock>,
}

#[derive(Deserialize)]
struct RawDe {
    blocks: Vec<DeBlock>,
}

impl TryFrom<RawDe> for GeneralizedPredictorDE {
    type Error = PredictError;
    fn try_from(raw: RawDe) -> Result<Self, Self::Error> {
        GeneralizedPredictorDE::new(raw.blocks)
    }
}

impl GeneralizedPredictorDE {
    pub fn new(blocks: Vec<DeBlock>) -> Result<Self, PredictError> {
        for (i, b) in blocks.iter().enumerate() {
            if b.k > b.l || blocks.get(i + 1).is_some_and(|next| b.l >= next.k) {
                return Err(PredictError::Interleaving { block: i });
            }
        }
        Ok(GeneralizedPredictorDE { blocks })
    }

    pub fn blocks(&self) -> &[DeBlock] {
        &self.blocks
    }
}

/// Check `g` block by block: block `n` counts when `grace <= k_n` and `g` covers
/// both `k_n` and `0..l_n`.
pub fn check_prediction_de(
    pi: &GeneralizedPredictorDE,
    g: &[u64],
    grace: usize,
) -> Result<PredictionReport, PredictError> {
    check_grace(grace, g.len())?;
    let outcomes = pi
        .blocks
        .iter()
        .filter(|b| b.k >= grace && b.k < g.len() && b.l <= g.len())
        .map(|b| Ok((b.k, b.eval(g)? == g[b.k])))
        .collect::<Result<Vec<_>, PredictError>>()?;
    Ok(PredictionReport::from_outcomes(outcomes))
}

/// Finite guess sets for one position `l` of a set-valued block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum SetRule {
    Fixed { values: BTreeSet<u64> },
    Table { entries: Vec<(Word, BTreeSet<u64>)>, default: BTreeSet<u64> },
}

impl SetRule {
    pub fn eval(&self, sigma: &[u64]) -> &BTreeSet<u64> {
        match self {
            SetRule::Fixed { values } => values,
            SetRule::Table { entries, default } => {
                entries.iter().find(|(w, _)| w.as_slice() == sigma).map_or(default, |(_, s)| s)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetBlock {
    pub l: usize,
    pub rule: SetRule,
}

/// For each `k` a finite block `A_k` inside `[k, horizon)` of positions with guess sets.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "RawSetValued")]
pub struct SetValuedPredictor {
    blocks: BTreeMap<usize, Vec<SetBlock>>,
}

#[derive(Deserialize)]
struct RawSetValued {
    blocks: BTreeMap<usize, Vec<SetBlock>>,
}

impl TryFrom<RawSetValued> for SetValuedPredictor {
    type Error = PredictError;
    fn try_from(raw: RawSetValued) -> Result<Self, Self::Error> {
        SetValuedPredictor::new(raw.blocks)
    }
}

impl SetValuedPredictor {
    pub fn new(blocks: BTreeMap<usize, Vec<SetBlock>>) -> Result<Self, PredictError> {
        for (&k, bs) in &blocks {
            if let Some(b) = bs.iter().find(|b| b.l < k) {
                return Err(PredictError::BlockBelowIndex { k, l: b.l });
            }
        }
        Ok(SetValuedPredictor { blocks })
    }

    pub fn blocks(&self) -> &BTreeMap<usize, Vec<SetBlock>> {
        &self.blocks
    }
}

/// Index `k` counts when `grace <= k` and `g` covers every position of `A_k`; it is a
/// hit when some `l` in `A_k` has `g(l)` in its guess set.
pub fn check_prediction_setvalued(
    pi: &SetValuedPredictor,
    g: &[u64],
    grace: usize,
) -> Result<PredictionReport, PredictError> {
    check_grace(grace, g.len())?;
    let outcomes = pi
        .blocks
        .range(grace..)
        .filter(|(_, bs)| bs.iter().all(|b| b.l < g.len()))
        .map(|(&k, bs)| (k, bs.iter().any(|b| b.rule.eval(&g[..b.l]).contains(&g[b.l]))));
    Ok(PredictionReport::from_outcomes(outcomes))
}

/// A partial slalom: finite sets `phi(n)` with at most `n` elements.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<usize, BTreeSet<u64>>", into = "BTreeMap<usize, BTreeSet<u64>>")]
pub struct Slalom(BTreeMap<usize, BTreeSet<u64>>);

impl Slalom {
    pub fn new(sets: BTreeMap<usize, BTreeSet<u64>>) -> Result<Self, PredictError> {
        if let Some((&index, s)) = sets.iter().find(|(&n, s)| s.len() > n) {
            return Err(PredictError::SlalomTooWide { index, size: s.len() });
        }
        Ok(Slalom(sets))
    }

    pub fn sets(&self) -> &BTreeMap<usize, BTreeSet<u64>> {
        &self.0
    }
}

impl TryFrom<BTreeMap<usize, BTreeSet<u64>>> for Slalom {
    type Error = PredictError;
    fn try_from(m: BTreeMap<usize, BTreeSet<u64>>) -> Result<Self, Self::Error> {
        Slalom::new(m)
    }
}

impl From<Slalom> for BTreeMap<usize, BTreeSet<u64>> {
    fn from(s: Slalom) -> Self {
        s.0
    }
}

/// Check whether `x` escapes the slalom. Captured indices are reported as hits and
/// escapes as misses, so `Evades` means at least one escape at or after `grace`.
/// Indices where the slalom is undefined are not checked.
pub fn check_slalom_evasion(phi: &Slalom, x: &[u64], grace: usize) -> Result<PredictionReport, PredictError> {
    check_grace(grace, x.len())?;
    let outcomes = phi.0.range(grace..x.len()).map(|(&n, s)| (n, s.contains(&x[n])));
    Ok(PredictionReport::from_outcomes(outcomes))
}

#[cfg(test)]
mod tests {
    use super::super::Verdict;
    use super::*;

    #[test]
    fn de_examples() {
        let pi = GeneralizedPredictorDE::new(vec![DeBlock { k: 0, l: 2, rule: DeRule::Copy { from: 1 } }]).unwrap();
        assert_eq!(check_prediction_de(&pi, &[7, 7, 9], 0).unwrap().verdict, Verdict::Predicted);
        assert_eq!(check_prediction_de(&pi, &[3, 7, 9], 0).unwrap().verdict, Verdict::Evades);
        let empty = GeneralizedPredictorDE::new(vec![]).unwrap();
        assert_eq!(check_prediction_de(&empty, &[3, 7, 9], 0).unwrap().verdict, Verdict::Inconclusive);
    }

    #[test]
    fn de_interleaving_enforced() {
        let b = |k, l| DeBlock { k, l, rule: DeRule::Const { value: 0 } };
        assert!(GeneralizedPredictorDE::new(vec![b(0, 2), b(3, 3)]).is_ok());
        assert_eq!(GeneralizedPredictorDE::new(vec![b(0, 3), b(3, 4)]), Err(PredictError::Interleaving { block: 0 }));
        assert_eq!(GeneralizedPredictorDE::new(vec![b(2, 1)]), Err(PredictError::Interleaving { block: 0 }));
    }

    #[test]
    fn de_table_argument_skips_k() {
        let block = DeBlock {
            k: 1,
            l: 3,
            rule: DeRule::Table { entries: vec![(vec![4, 6], 5)], default: 0 },
        };
        assert_eq!(block.argument(&[4, 9, 6, 1]), vec![4, 6]);
        assert_eq!(block.eval(&[4, 9, 6]).unwrap(), 5);
        assert_eq!(block.eval(&[4, 9, 7]).unwrap(), 0);
    }

    fn fixed(v: &[u64]) -> SetRule {
        SetRule::Fixed { values: v.iter().copied().collect() }
    }

    #[test]
    fn set_valued_examples() {
        let one = SetValuedPredictor::new(BTreeMap::from([(0, vec![SetBlock { l: 1, rule: fixed(&[0, 3]) }])])).unwrap();
        assert_eq!(check_prediction_setvalued(&one, &[9, 3], 0).unwrap().verdict, Verdict::Predicted);
        assert_eq!(check_prediction_setvalued(&one, &[9, 4], 0).unwrap().verdict, Verdict::Evades);
        let two = SetValuedPredictor::new(BTreeMap::from([(
            0,
            vec![SetBlock { l: 1, rule: fixed(&[1]) }, SetBlock { l: 2, rule: fixed(&[4]) }],
        )]))
        .unwrap();
        assert_eq!(check_prediction_setvalued(&two, &[0, 0, 4], 0).unwrap().verdict, Verdict::Predicted);
        assert!(SetValuedPredictor::new(BTreeMap::from([(2, vec![SetBlock { l: 1, rule: fixed(&[]) }])])).is_err());
    }

    #[test]
    fn slalom_examples() {
        let phi = Slalom::new(BTreeMap::from([(1, BTreeSet::from([0])), (2, BTreeSet::from([0, 1]))])).unwrap();
        assert_eq!(check_slalom_evasion(&phi, &[9, 0, 1], 0).unwrap().verdict, Verdict::Predicted);
        let phi = Slalom::new(BTreeMap::from([(1, BTreeSet::from([0]))])).unwrap();
        assert_eq!(check_slalom_evasion(&phi, &[9, 1], 0).unwrap().verdict, Verdict::Evades);
        assert_eq!(
            Slalom::new(BTreeMap::from([(2, BTreeSet::from([0, 1, 2]))])),
            Err(PredictError::SlalomTooWide { index: 2, size: 3 })
        );
    }

    #[test]
    fn serde_roundtrips() {
        let pi = GeneralizedPredictorDE::new(vec![DeBlock {
            k: 0,
            l: 2,
            rule: DeRule::Table { entries: vec![(vec![1], 2)], default: 0 },
        }])
        .unwrap();
        let s = serde_json::to_string(&pi).unwrap();
        assert_eq!(serde_json::from_str::<GeneralizedPredictorDE>(&s).unwrap(), pi);
        let phi = Slalom::new(BTreeMap::from([(3, BTreeSet::from([0, 2]))])).unwrap();
        let s = serde_json::to_string(&phi).unwrap();
        assert_eq!(s, r#"{"3":[0,2]}"#);
        assert_eq!(serde_json::from_str::<Slalom>(&s).unwrap(), phi);
        assert!(serde_json::from_str::<Slalom>(r#"{"1":[0,2]}"#).is_err());
    }
}
