use std::collections::BTreeMap;

use super::TransformError;
use crate::algebra::{Field, LinearForm};
use crate::predict::{Bound, IndexRule, LinearPredictor, Predictor, SpaceSpec, Word};

/// Replace every entry `sigma(n) >= x(n)` by 0.
pub fn clamp_word(sigma: &[u64], x: &[u64]) -> Result<Word, TransformError> {
    if sigma.len() > x.len() {
        return Err(TransformError::LengthMismatch { word: sigma.len(), bounds: x.len() });
    }
    Ok(sigma.iter().zip(x).map(|(&v, &b)| if v < b { v } else { 0 }).collect())
}

/// Extend a predictor for `prod x(n)` to unbounded words: same domain, and each
/// rule is applied to the clamped argument.
pub fn extend_predictor_to_omega(pi: &Predictor, x: &[u64]) -> Result<Predictor, TransformError> {
    let expected: Vec<Bound> = x.iter().map(|&b| Bound::Nat(b)).collect();
    if pi.spec().bounds() != expected.as_slice() {
        return Err(TransformError::SpecMismatch);
    }
    let rules = pi
        .rules()
        .iter()
        .map(|(&n, r)| (n, IndexRule::Clamp { bounds: x.to_vec(), inner: Box::new(r.clone()) }))
        .collect();
    Ok(Predictor::new(SpaceSpec::unbounded(x.len()), rules)?)
}

/// Split a word over `n^omega` into its indicator of the value 1 (at every
/// position) and its reduced values along `ks`: 0 where `f(k) <= 1`, else `f(k) - 1`.
pub fn indicator_split(f: &[u64], n: u64, ks: &[usize]) -> Result<(Word, Word), TransformError> {
    if let Some((position, &value)) = f.iter().enumerate().find(|(_, &v)| v >= n) {
        return Err(TransformError::ValueOutOfRange { position, value, bound: n });
    }
    if ks.windows(2).any(|w| w[0] >= w[1]) {
        return Err(TransformError::NotIncreasing);
    }
    let g = f.iter().map(|&v| u64::from(v == 1)).collect();
    let h = ks
        .iter()
        .map(|&k| {
            let v = *f.get(k).ok_or(TransformError::LengthMismatch { word: f.len(), bounds: k + 1 })?;
            Ok(if v <= 1 { 0 } else { v - 1 })
        })
        .collect::<Result<_, TransformError>>()?;
    Ok((g, h))
}

fn uniform_bound(spec: &SpaceSpec) -> Option<u64> {
    let first = spec.bound(0)?.as_nat()?;
    spec.bounds().iter().all(|b| *b == Bound::Nat(first)).then_some(first)
}

/// Combine a predictor over `2^omega` with domain `{k_0 < k_1 < ...}` and a predictor
/// over `(n-1)^omega` into a predictor over `n^omega` with domain `{k_m : m in D'}`.
///
/// The reduced predictor's index `m` refers to the `m`-th element of the indicator
/// domain. At `k_m` the answer is 1 when the indicator says 1 and the reduced
/// predictor says 0, `l >= 2` when they say 0 and `l - 1`, and 0 otherwise. The
/// indicator rule reads the indicator recoding of the argument.
pub fn combine_predictors(indicator: &Predictor, reduced: &Predictor) -> Result<Predictor, TransformError> {
    if uniform_bound(indicator.spec()) != Some(2) {
        return Err(TransformError::SpecMismatch);
    }
    let n = uniform_bound(reduced.spec()).ok_or(TransformError::SpecMismatch)? + 1;
    let ks: Vec<usize> = indicator.domain().collect();
    let mut rules = BTreeMap::new();
    for (&m, r) in reduced.rules() {
        let &km = ks.get(m).ok_or(TransformError::EnumerationMismatch { index: m, available: ks.len() })?;
        let rule = IndexRule::Combine {
            bound: n,
            ks: ks.clone(),
            m,
            indicator: Box::new(indicator.rule(km).expect("k_m is in the domain").clone()),
            reduced: Box::new(r.clone()),
        };
        rules.insert(km, rule);
    }
    Ok(Predictor::new(SpaceSpec::uniform(n, indicator.spec().horizon())?, rules)?)
}

/// The linear predictor with domain `{b_1, b_3, ...}` guessing `sigma(b_{2i})` at `b_{2i+1}`.
pub fn predictor_from_unsplit_set(b: &[usize], field: Field) -> Result<LinearPredictor, TransformError> {
    if b.len() < 2 {
        return Err(TransformError::SetTooSmall(b.len()));
    }
    if b.windows(2).any(|w| w[0] >= w[1]) {
        return Err(TransformError::NotIncreasing);
    }
    let forms = b
        .chunks_exact(2)
        .map(|pair| (pair[1], LinearForm::coordinate(field, pair[1], pair[0])))
        .collect();
    Ok(LinearPredictor::new(field, b[b.len() - 1] + 1, forms)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predict::{check_linear_prediction, check_prediction, Verdict};

    #[test]
    fn clamping() {
        assert_eq!(clamp_word(&[5, 1], &[2, 2]).unwrap(), vec![0, 1]);
        assert_eq!(clamp_word(&[0, 1], &[2, 2]).unwrap(), vec![0, 1]);
        assert_eq!(clamp_word(&[3], &[4]).unwrap(), vec![3]);
        assert!(clamp_word(&[3, 3], &[4]).is_err());
    }

    #[test]
    fn extension_examples() {
        let x = [2, 2, 2];
        let pi = Predictor::new(SpaceSpec::bounded(&x).unwrap(), BTreeMap::from([(2, IndexRule::Copy { from: 0 })])).unwrap();
        let star = extend_predictor_to_omega(&pi, &x).unwrap();
        assert_eq!(check_prediction(&pi, &[0, 0, 0], 0).unwrap().verdict, Verdict::Predicted);
        assert_eq!(check_prediction(&star, &[7, 0, 0], 0).unwrap().verdict, Verdict::Predicted);
        assert_eq!(check_prediction(&pi, &[0, 0, 1], 0).unwrap().verdict, Verdict::Evades);
        assert_eq!(check_prediction(&star, &[7, 0, 1], 0).unwrap().verdict, Verdict::Evades);
        for w in pi.spec().words(3).unwrap() {
            assert_eq!(check_prediction(&pi, &w, 0).unwrap(), check_prediction(&star, &w, 0).unwrap());
        }
        assert_eq!(extend_predictor_to_omega(&pi, &[2, 3, 2]), Err(TransformError::SpecMismatch));
    }

    #[test]
    fn split_examples() {
        assert_eq!(indicator_split(&[2, 1, 0], 3, &[0, 1, 2]).unwrap(), (vec![0, 1, 0], vec![1, 0, 0]));
        assert_eq!(indicator_split(&[1, 1, 1], 3, &[0, 2]).unwrap(), (vec![1, 1, 1], vec![0, 0]));
        assert_eq!(indicator_split(&[0, 0, 0], 3, &[1]).unwrap(), (vec![0, 0, 0], vec![0]));
        assert!(indicator_split(&[3], 3, &[0]).is_err());
    }

    fn consts(spec: SpaceSpec, entries: &[(usize, u64)]) -> Predictor {
        Predictor::new(spec, entries.iter().map(|&(n, v)| (n, IndexRule::Const { value: v })).collect()).unwrap()
    }

    #[test]
    fn combine_case_table() {
        let ind = |v| consts(SpaceSpec::uniform(2, 3).unwrap(), &[(0, 0), (2, v)]);
        let red = |v| consts(SpaceSpec::uniform(3, 2).unwrap(), &[(1, v)]);
        let answer = |a, b| combine_predictors(&ind(a), &red(b)).unwrap().predict(&[0, 0]).unwrap();
        assert_eq!(answer(1, 0), Some(1));
        assert_eq!(answer(0, 2), Some(3));
        assert_eq!(answer(1, 1), Some(0));
        assert_eq!(answer(0, 0), Some(0));
        let bad = consts(SpaceSpec::uniform(3, 3).unwrap(), &[(2, 0)]);
        assert!(matches!(combine_predictors(&ind(0), &bad), Err(TransformError::EnumerationMismatch { .. })));
    }

    #[test]
    fn unsplit_set_examples() {
        let f2 = Field::Prime(2);
        let pi = predictor_from_unsplit_set(&[0, 1, 2, 3], f2).unwrap();
        assert_eq!(pi.domain().collect::<Vec<_>>(), vec![1, 3]);
        let word = |v: &[i64]| v.iter().map(|&x| f2.from_i64(x)).collect::<Vec<_>>();
        assert_eq!(check_linear_prediction(&pi, &word(&[1, 1, 1, 1]), 0).unwrap().verdict, Verdict::Predicted);
        let r = check_linear_prediction(&pi, &word(&[0, 1, 0, 1]), 0).unwrap();
        assert_eq!(r.misses.into_iter().collect::<Vec<_>>(), vec![1, 3]);
        assert_eq!(predictor_from_unsplit_set(&[4], f2), Err(TransformError::SetTooSmall(1)));
    }
}
