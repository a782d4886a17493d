use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{check_grace, IndexRule, PredictError, PredictionReport, Predictor, SpaceSpec};
use crate::algebra::{AlgebraError, Field, LinearForm, Scalar};

/// A predictor over `K^horizon` whose rule at `n` is a linear form of arity `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawLinear")]
pub struct LinearPredictor {
    field: Field,
    horizon: usize,
    forms: BTreeMap<usize, LinearForm>,
}

#[derive(Deserialize)]
struct RawLinear {
    field: Field,
    horizon: usize,
    forms: BTreeMap<usize, LinearForm>,
}

impl TryFrom<RawLinear> for LinearPredictor {
    type Error = PredictError;
    fn try_from(raw: RawLinear) -> Result<Self, Self::Error> {
        LinearPredictor::new(raw.field, raw.horizon, raw.forms)
    }
}

impl LinearPredictor {
    pub fn new(field: Field, horizon: usize, forms: BTreeMap<usize, LinearForm>) -> Result<Self, PredictError> {
        for (&n, form) in &forms {
            if n >= horizon {
                return Err(PredictError::IndexBeyondHorizon { index: n, horizon });
            }
            if form.arity() != n {
                return Err(PredictError::RuleArity { index: n, needs: form.arity() });
            }
            for c in form.coefficients() {
                field.check(c)?;
            }
        }
        Ok(LinearPredictor { field, horizon, forms })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn forms(&self) -> &BTreeMap<usize, LinearForm> {
        &self.forms
    }

    pub fn domain(&self) -> impl Iterator<Item = usize> + '_ {
        self.forms.keys().copied()
    }

    pub fn predict(&self, sigma: &[Scalar]) -> Result<Option<Scalar>, PredictError> {
        match self.forms.get(&sigma.len()) {
            Some(form) => Ok(Some(form.eval(sigma)?)),
            None => Ok(None),
        }
    }

    /// The same predictor as a natural-valued rule predictor over `p^horizon`.
    pub fn to_predictor(&self) -> Result<Predictor, PredictError> {
        let Field::Prime(p) = self.field else {
            return Err(PredictError::Algebra(AlgebraError::BadField(self.field.to_string())));
        };
        let rules = self
            .forms
            .iter()
            .map(|(&n, f)| {
                let coefficients = f.coefficients().iter().map(|c| c.residue().expect("prime field")).collect();
                (n, IndexRule::Linear { p, coefficients })
            })
            .collect();
        Predictor::new(SpaceSpec::uniform(p, self.horizon)?, rules)
    }
}

pub fn check_linear_prediction(
    pi: &LinearPredictor,
    g: &[Scalar],
    grace: usize,
) -> Result<PredictionReport, PredictError> {
    if g.len() > pi.horizon {
        return Err(PredictError::IndexBeyondHorizon { index: g.len(), horizon: pi.horizon });
    }
    for x in g {
        pi.field.check(x)?;
    }
    check_grace(grace, g.len())?;
    let outcomes = pi
        .forms
        .range(grace..g.len())
        .map(|(&n, f)| Ok((n, f.eval(&g[..n])? == g[n])))
        .collect::<Result<Vec<_>, PredictError>>()?;
    Ok(PredictionReport::from_outcomes(outcomes))
}

#[cfg(test)]
mod tests {
    use super::super::{check_prediction, Verdict};
    use super::*;

    #[test]
    fn agrees_with_rule_form() {
        let f = Field::Prime(3);
        let forms = BTreeMap::from([(2, LinearForm::new(f, vec![f.from_i64(1), f.from_i64(2)]))]);
        let lp = LinearPredictor::new(f, 3, forms).unwrap();
        let p = lp.to_predictor().unwrap();
        for w in p.spec().words(3).unwrap() {
            let s: Vec<Scalar> = w.iter().map(|&v| f.from_i64(v as i64)).collect();
            assert_eq!(check_linear_prediction(&lp, &s, 0).unwrap(), check_prediction(&p, &w, 0).unwrap());
        }
    }

    #[test]
    fn rationals_have_no_rule_form() {
        let lp = LinearPredictor::new(Field::Rationals, 2, BTreeMap::new()).unwrap();
        assert!(lp.to_predictor().is_err());
        let q = Field::Rationals;
        let r = check_linear_prediction(&lp, &[q.one()], 0).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn arity_must_match_index() {
        let f = Field::Prime(2);
        let forms = BTreeMap::from([(2, LinearForm::zero(f, 1))]);
        assert!(LinearPredictor::new(f, 3, forms).is_err());
    }
}
