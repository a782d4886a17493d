use serde::{Deserialize, Serialize};

use super::{LuzinError, LuzinFamily};
use crate::algebra::{row_reduce, FieldEnumeration, LinearForm, Scalar};
use crate::predict::WordIter;

/// Limits for the candidate predictors of a scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LuzinityBudget {
    /// Largest domain size `|D|` tried.
    pub max_domain: usize,
    /// Form coefficients are drawn from the first `coeff_count` field elements.
    pub coeff_count: usize,
    /// Cap on predictor-combination checks.
    pub max_steps: u64,
}

impl Default for LuzinityBudget {
    fn default() -> Self {
        LuzinityBudget { max_domain: 1, coeff_count: 2, max_steps: 10_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LuzinityRow {
    pub predictor_id: usize,
    pub domain: Vec<usize>,
    pub forms: Vec<LinearForm>,
    pub predicted_count: usize,
    /// Dimension of the span of the predicted combinations.
    pub predicted_rank: usize,
    /// Coefficients of the first predicted combination, if any.
    pub witness: Option<Vec<Scalar>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LuzinityTable {
    pub combinations: usize,
    pub rows: Vec<LuzinityRow>,
    pub max_count: usize,
    pub max_rank: usize,
}

fn mixed(radix: usize, len: usize, mut id: usize) -> Vec<usize> {
    (0..len)
        .map(|_| {
            let d = id % radix;
            id /= radix;
            d
        })
        .collect()
}

fn domains(horizon: usize, max: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, horizon: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for n in start..horizon {
            cur.push(n);
            rec(n + 1, horizon, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for size in 1..=max.min(horizon) {
        rec(0, horizon, size, &mut Vec::new(), &mut out);
    }
    out
}

/// Tabulate, for every candidate linear predictor within `budget`, which nonzero
/// combinations `sum b_i g_i` (coefficients among the first `coeff_bound` field
/// elements) it predicts from grace 0.
///
/// Candidates are taken in order of domain size, then domain, then form
/// coefficient indices (first position least significant). Combinations whose
/// vector is zero are skipped.
pub fn brute_force_luzinity(family: &LuzinFamily, coeff_bound: usize, budget: LuzinityBudget) -> Result<LuzinityTable, LuzinError> {
    let field = family.field();
    let horizon = family.horizon();
    let gens = family.generators();
    let mut en = FieldEnumeration::new(field);
    let coeffs = en.prefix(coeff_bound.max(budget.coeff_count));
    let zero = field.zero();

    let mut combos: Vec<(Vec<Scalar>, Vec<Scalar>)> = Vec::new();
    for idx in WordIter::new(vec![coeff_bound as u64; gens.len()]) {
        let b: Vec<Scalar> = idx.iter().map(|&i| coeffs[i as usize].clone()).collect();
        let mut v = vec![zero.clone(); horizon];
        for (bi, g) in b.iter().zip(gens) {
            for (vn, gn) in v.iter_mut().zip(&g.values) {
                *vn = &*vn + &(bi * gn);
            }
        }
        if v.iter().any(|x| !x.is_zero()) {
            combos.push((b, v));
        }
    }

    let doms = domains(horizon, budget.max_domain);
    let c = budget.coeff_count;
    let predictors: u64 = doms.iter().map(|d| d.iter().map(|&n| (c as u64).saturating_pow(n as u32)).product::<u64>()).sum();
    if predictors.saturating_mul(combos.len().max(1) as u64) > budget.max_steps {
        return Err(LuzinError::BudgetExceeded { budget: budget.max_steps });
    }

    let mut rows = Vec::new();
    for dom in &doms {
        let sizes: Vec<usize> = dom.iter().map(|&n| c.pow(n as u32)).collect();
        let total: usize = sizes.iter().product();
        for choice in 0..total {
            let mut rest = choice;
            let forms: Vec<LinearForm> = dom
                .iter()
                .zip(&sizes)
                .map(|(&n, &s)| {
                    let id = rest % s;
                    rest /= s;
                    LinearForm::new(field, mixed(c, n, id).into_iter().map(|i| coeffs[i].clone()).collect())
                })
                .collect();
            let predicted: Vec<&(Vec<Scalar>, Vec<Scalar>)> = combos
                .iter()
                .filter(|(_, v)| dom.iter().zip(&forms).all(|(&n, form)| form.eval(&v[..n]).expect("arity n") == v[n]))
                .collect();
            let rank = row_reduce(field, &predicted.iter().map(|(_, v)| v.clone()).collect::<Vec<_>>()).rank();
            rows.push(LuzinityRow {
                predictor_id: rows.len(),
                domain: dom.clone(),
                forms,
                predicted_count: predicted.len(),
                predicted_rank: rank,
                witness: predicted.first().map(|(b, _)| b.clone()),
            });
        }
    }
    let max_count = rows.iter().map(|r| r.predicted_count).max().unwrap_or(0);
    let max_rank = rows.iter().map(|r| r.predicted_rank).max().unwrap_or(0);
    Ok(LuzinityTable { combinations: combos.len(), rows, max_count, max_rank })
}
