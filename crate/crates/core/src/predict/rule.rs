use serde::{Deserialize, Serialize};

use super::{PredictError, SpaceSpec, Word};

/// One prediction rule `pi_n`, mapping words of length `n` to a guess for position `n`.
///
/// Rules are plain data so that predictors can be stored and re-run. `Table`
/// is the explicit form; the other variants are named computable rules.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum IndexRule {
    /// Values listed in mixed-radix order of the argument word, first entry fastest.
    Table { values: Vec<u64> },
    Const { value: u64 },
    /// `sigma(from)`.
    Copy { from: usize },
    /// Dot product with the coefficients modulo the prime `p`.
    Linear { p: u64, coefficients: Vec<u64> },
    /// Apply `inner` after replacing every entry `sigma(i) >= bounds[i]` by 0.
    Clamp { bounds: Vec<u64>, inner: Box<IndexRule> },
    /// Merge an indicator predictor and a reduced predictor, see
    /// [`crate::transforms::combine_predictors`]. `ks` lists the indicator
    /// domain in increasing order and `m` is the position of this index in it.
    /// Words range over `bound^n`; the reduced rule reads words over `(bound - 1)^m`.
    Combine { bound: u64, ks: Vec<usize>, m: usize, indicator: Box<IndexRule>, reduced: Box<IndexRule> },
    /// Return `option[m - start]` of the first option agreeing with `sigma` on
    /// `start..m`, or 0 when none does.
    Slalom { start: usize, options: Vec<Word> },
}

impl IndexRule {
    /// Evaluate on a word whose length is the index the rule sits at.
    pub fn eval(&self, sigma: &[u64], spec: &SpaceSpec) -> Result<u64, PredictError> {
        let n = sigma.len();
        match self {
            IndexRule::Table { values } => {
                let i = spec.word_index(sigma).ok_or_else(|| PredictError::WordOutsideSpace { word: sigma.to_vec() })?;
                values.get(i).copied().ok_or(PredictError::IncompleteTable { index: n, word: sigma.to_vec() })
            }
            IndexRule::Const { value } => Ok(*value),
            IndexRule::Copy { from } => sigma.get(*from).copied().ok_or(PredictError::RuleArity { index: n, needs: from + 1 }),
            IndexRule::Linear { p, coefficients } => {
                if coefficients.len() != n {
                    return Err(PredictError::RuleArity { index: n, needs: coefficients.len() });
                }
                let p = *p as u128;
                let s = sigma.iter().zip(coefficients).fold(0u128, |acc, (&v, &c)| (acc + (v as u128 % p) * c as u128) % p);
                Ok(s as u64)
            }
            IndexRule::Clamp { bounds, inner } => {
                if bounds.len() < n {
                    return Err(PredictError::RuleArity { index: n, needs: bounds.len() });
                }
                let clamped: Word = sigma.iter().zip(bounds).map(|(&v, &b)| if v < b { v } else { 0 }).collect();
                let inner_spec = SpaceSpec::bounded(&bounds[..])?;
                inner.eval(&clamped, &inner_spec)
            }
            IndexRule::Combine { bound, ks, m, indicator, reduced } => {
                let km = *ks.get(*m).ok_or(PredictError::RuleArity { index: n, needs: m + 1 })?;
                if km != n {
                    return Err(PredictError::RuleArity { index: n, needs: km });
                }
                let g: Word = sigma.iter().map(|&v| u64::from(v == 1)).collect();
                let h: Word = ks[..*m].iter().map(|&k| if sigma[k] <= 1 { 0 } else { sigma[k] - 1 }).collect();
                let a = indicator.eval(&g, &SpaceSpec::uniform(2, n)?)?;
                let b = reduced.eval(&h, &SpaceSpec::uniform(bound - 1, *m)?)?;
                Ok(match (a, b) {
                    (1, 0) => 1,
                    (0, b) if b >= 1 => b + 1,
                    _ => 0,
                })
            }
            IndexRule::Slalom { start, options } => {
                if *start > n {
                    return Err(PredictError::RuleArity { index: n, needs: *start });
                }
                let off = n - start;
                Ok(options
                    .iter()
                    .find(|o| o.len() > off && o[..off] == sigma[*start..])
                    .map_or(0, |o| o[off]))
            }
        }
    }

    /// Structural checks that do not need evaluation.
    pub(crate) fn validate(&self, n: usize, spec: &SpaceSpec) -> Result<(), PredictError> {
        match self {
            IndexRule::Table { values } => {
                let count = spec.count_words(n).ok_or(PredictError::UnboundedTable { index: n })?;
                if (values.len() as u128) < count {
                    let missing = spec.words(n).and_then(|mut it| it.nth(values.len())).unwrap_or_default();
                    return Err(PredictError::IncompleteTable { index: n, word: missing });
                }
                if (values.len() as u128) > count {
                    return Err(PredictError::TableSize { index: n, expected: count, got: values.len() });
                }
                if let Some(b) = spec.bound(n) {
                    if let Some(&v) = values.iter().find(|&&v| !b.admits(v)) {
                        return Err(PredictError::OutOfBoundsValue { index: n, value: v, bound: b });
                    }
                }
                Ok(())
            }
            IndexRule::Copy { from } if *from >= n => Err(PredictError::RuleArity { index: n, needs: from + 1 }),
            IndexRule::Linear { p, coefficients } => {
                crate::algebra::Field::prime(*p).map_err(|_| PredictError::BadBound(*p))?;
                if coefficients.len() != n {
                    return Err(PredictError::RuleArity { index: n, needs: coefficients.len() });
                }
                Ok(())
            }
            IndexRule::Clamp { bounds, inner } => {
                let inner_spec = SpaceSpec::bounded(bounds)?;
                if bounds.len() < n {
                    return Err(PredictError::RuleArity { index: n, needs: bounds.len() });
                }
                inner.validate(n, &inner_spec)
            }
            _ => Ok(()),
        }
    }
}
