//! Predictors from slalom block systems.
//!
//! The horizon is cut into consecutive blocks `I_n` of size `n^2`. Block `n`
//! carries at most `n` option words. Two options that differ do so first at
//! one position, so at most `n(n-1)/2 < n^2` positions of `I_n` are spoiled
//! and some position `m_n` is left where agreement so far forces agreement at
//! `m_n`. That position becomes a domain index of the predictor.

use std::collections::BTreeMap;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::TransformError;
use crate::algebra::{row_reduce, Field, LinearForm, Scalar};
use crate::predict::{IndexRule, LinearPredictor, Predictor, SpaceSpec, Word};

/// First position of block `n`: `0^2 + 1^2 + ... + (n-1)^2`.
pub fn block_start(n: usize) -> usize {
    n.saturating_sub(1) * n * (2 * n).saturating_sub(1) / 6
}

pub fn block_range(n: usize) -> Range<usize> {
    block_start(n)..block_start(n + 1)
}

fn check_options<T>(options: &[Vec<Vec<T>>]) -> Result<(), TransformError> {
    for (n, opts) in options.iter().enumerate() {
        if n < 2 && !opts.is_empty() {
            return Err(TransformError::DegenerateBlock { block: n });
        }
        if opts.len() > n {
            return Err(TransformError::TooManyOptions { block: n, count: opts.len() });
        }
        for (k, o) in opts.iter().enumerate() {
            if o.len() != n * n {
                return Err(TransformError::OptionLength { block: n, option: k, len: o.len(), expected: n * n });
            }
        }
    }
    Ok(())
}

/// Blocks `I_0 .. I_{N-1}` over a space of horizon `|I_0| + ... + |I_{N-1}|`, with
/// option words for each block given relative to the block start.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSystem")]
pub struct SlalomBlockSystem {
    spec: SpaceSpec,
    options: Vec<Vec<Word>>,
}

#[derive(Deserialize)]
struct RawSystem {
    spec: SpaceSpec,
    options: Vec<Vec<Word>>,
}

impl TryFrom<RawSystem> for SlalomBlockSystem {
    type Error = TransformError;
    fn try_from(raw: RawSystem) -> Result<Self, Self::Error> {
        SlalomBlockSystem::new(raw.spec, raw.options)
    }
}

impl SlalomBlockSystem {
    pub fn new(spec: SpaceSpec, options: Vec<Vec<Word>>) -> Result<Self, TransformError> {
        check_options(&options)?;
        let expected = block_start(options.len());
        if spec.horizon() != expected {
            return Err(TransformError::BlockHorizon { expected, got: spec.horizon() });
        }
        for (n, opts) in options.iter().enumerate() {
            let start = block_start(n);
            for (k, o) in opts.iter().enumerate() {
                let fits = o.iter().enumerate().all(|(j, &v)| spec.bound(start + j).is_some_and(|b| b.admits(v)));
                if !fits {
                    return Err(TransformError::OptionOutsideSpace { block: n, option: k });
                }
            }
        }
        Ok(SlalomBlockSystem { spec, options })
    }

    pub fn spec(&self) -> &SpaceSpec {
        &self.spec
    }

    pub fn block_count(&self) -> usize {
        self.options.len()
    }

    pub fn options(&self, n: usize) -> &[Word] {
        &self.options[n]
    }

    /// Every word of full horizon that follows some option on each block with
    /// options and is 0 elsewhere.
    pub fn branches(&self) -> Vec<Word> {
        let mut out = vec![vec![0; self.spec.horizon()]];
        for (n, opts) in self.options.iter().enumerate() {
            if opts.is_empty() {
                continue;
            }
            let r = block_range(n);
            out = out
                .into_iter()
                .flat_map(|w| {
                    let r = r.clone();
                    opts.iter().map(move |o| {
                        let mut w = w.clone();
                        w[r.clone()].copy_from_slice(o);
                        w
                    })
                })
                .collect();
        }
        out
    }
}

/// The least offset `j` into the block such that any two options agreeing before
/// `j` also agree at `j`. Offsets count from the block start.
///
/// A pair of options spoils exactly the offset of its first difference, so the
/// answer is the least offset that is no pair's first difference.
pub fn find_merge_point<T: PartialEq>(options: &[Vec<T>]) -> Option<usize> {
    let len = options.first().map_or(0, Vec::len);
    let mut spoiled = vec![false; len];
    for (i, a) in options.iter().enumerate() {
        for b in &options[i + 1..] {
            if let Some(j) = a.iter().zip(b).position(|(x, y)| x != y) {
                spoiled[j] = true;
            }
        }
    }
    spoiled.iter().position(|&s| !s)
}

fn merge_offset(n: usize, opts: &[Word]) -> usize {
    find_merge_point(opts).unwrap_or_else(|| panic!("block {n} with {} options has no merge point", opts.len()))
}

/// Predictor with domain `{m_n}`; at `m_n` it returns the value of the first option
/// agreeing with the argument on `I_n` below `m_n`, and 0 when no option does.
pub fn predictor_from_slalom(system: &SlalomBlockSystem) -> Result<Predictor, TransformError> {
    let mut rules = BTreeMap::new();
    for (n, opts) in system.options.iter().enumerate() {
        if opts.is_empty() {
            continue;
        }
        let start = block_start(n);
        let m = start + merge_offset(n, opts);
        rules.insert(m, IndexRule::Slalom { start, options: opts.clone() });
    }
    Ok(Predictor::new(system.spec.clone(), rules)?)
}

/// Field-valued block system for the linear construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawLinearSystem")]
pub struct LinearSlalomSystem {
    field: Field,
    options: Vec<Vec<Vec<Scalar>>>,
}

#[derive(Deserialize)]
struct RawLinearSystem {
    field: Field,
    options: Vec<Vec<Vec<Scalar>>>,
}

impl TryFrom<RawLinearSystem> for LinearSlalomSystem {
    type Error = TransformError;
    fn try_from(raw: RawLinearSystem) -> Result<Self, Self::Error> {
        LinearSlalomSystem::new(raw.field, raw.options)
    }
}

impl LinearSlalomSystem {
    pub fn new(field: Field, options: Vec<Vec<Vec<Scalar>>>) -> Result<Self, TransformError> {
        check_options(&options)?;
        for o in options.iter().flatten().flatten() {
            field.check(o)?;
        }
        Ok(LinearSlalomSystem { field, options })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn horizon(&self) -> usize {
        block_start(self.options.len())
    }

    pub fn block_count(&self) -> usize {
        self.options.len()
    }

    pub fn options(&self, n: usize) -> &[Vec<Scalar>] {
        &self.options[n]
    }
}

/// Greedy maximal independent subset, scanning options in index order.
fn independent_subset(field: Field, opts: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    let mut kept: Vec<Vec<Scalar>> = Vec::new();
    for o in opts {
        let mut trial = kept.clone();
        trial.push(o.clone());
        if row_reduce(field, &trial).rank() == trial.len() {
            kept = trial;
        }
    }
    kept
}

/// Merge point of the linear construction and the functional used there.
///
/// With a maximal independent subset `v_1..v_r` of the options, returns the least
/// offset `j` such that the column of values at `j` lies in the span of the
/// columns before it, together with coefficients `c` (free coordinates set to 0)
/// so that `sum_i c_i v(i) = v(j)` for every option `v`. Such a `j` exists because
/// the prefix rank can rise at most `r <= n` times over `n^2` offsets.
pub fn linear_merge_point(field: Field, opts: &[Vec<Scalar>]) -> Option<(usize, Vec<Scalar>)> {
    let basis = independent_subset(field, opts);
    let len = opts.first()?.len();
    if basis.is_empty() {
        return Some((0, Vec::new()));
    }
    for j in 0..len {
        // augmented system: columns 0..j of the basis rows, right-hand side column j
        let aug: Vec<Vec<Scalar>> = basis.iter().map(|v| v[..=j].to_vec()).collect();
        let rref = row_reduce(field, &aug);
        if rref.pivots.contains(&j) {
            continue;
        }
        let mut c = vec![field.zero(); j];
        for (row, &pc) in rref.pivots.iter().enumerate() {
            c[pc] = rref.rows[row][j].clone();
        }
        return Some((j, c));
    }
    None
}

/// Linear predictor with domain `{m_n}` where `m_n` is the linear merge point; the
/// rule at `m_n` is the functional agreeing with every option, hence with every
/// linear combination of options, on block `n`.
pub fn linear_predictor_from_slalom(system: &LinearSlalomSystem) -> Result<LinearPredictor, TransformError> {
    let field = system.field;
    let mut forms = BTreeMap::new();
    for (n, opts) in system.options.iter().enumerate() {
        if opts.is_empty() {
            continue;
        }
        let start = block_start(n);
        let (j, c) = linear_merge_point(field, opts)
            .unwrap_or_else(|| panic!("block {n} with {} options has no linear merge point", opts.len()));
        let mut coefficients = vec![field.zero(); start + j];
        coefficients[start..].clone_from_slice(&c);
        forms.insert(start + j, LinearForm::new(field, coefficients));
    }
    Ok(LinearPredictor::new(field, system.horizon(), forms)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predict::{check_linear_prediction, check_prediction, Verdict};

    #[test]
    fn block_layout() {
        let starts: Vec<usize> = (0..6).map(block_start).collect();
        assert_eq!(starts, vec![0, 0, 1, 5, 14, 30]);
        for n in 0..10 {
            assert_eq!(block_range(n).len(), n * n);
        }
    }

    #[test]
    fn merge_point_examples() {
        assert_eq!(find_merge_point(&[vec![0, 0, 0, 0], vec![0, 1, 0, 0]]), Some(0));
        assert_eq!(find_merge_point(&[vec![0, 0, 0, 0], vec![1, 0, 0, 0]]), Some(1));
        assert_eq!(find_merge_point(&[vec![1, 1, 0, 1]]), Some(0));
    }

    /// The defining condition, checked literally.
    fn is_merge_point(opts: &[Word], m: usize) -> bool {
        opts.iter().all(|a| opts.iter().all(|b| a[..m] != b[..m] || a[m] == b[m]))
    }

    #[test]
    fn merge_point_is_least_valid_offset() {
        let words: Vec<Word> = crate::predict::WordIter::new(vec![2; 4]).collect();
        for a in &words {
            for b in &words {
                let opts = vec![a.clone(), b.clone()];
                let m = find_merge_point(&opts).unwrap();
                assert!(is_merge_point(&opts, m));
                assert!((0..m).all(|j| !is_merge_point(&opts, j)));
            }
        }
    }

    fn system(options: Vec<Vec<Word>>) -> SlalomBlockSystem {
        let h = block_start(options.len());
        SlalomBlockSystem::new(SpaceSpec::uniform(2, h).unwrap(), options).unwrap()
    }

    #[test]
    fn slalom_predictor_examples() {
        let s = system(vec![vec![], vec![], vec![vec![0, 0, 0, 0], vec![0, 1, 0, 0]]]);
        let pi = predictor_from_slalom(&s).unwrap();
        assert_eq!(pi.domain().collect::<Vec<_>>(), vec![1]);
        for b in s.branches() {
            assert_eq!(check_prediction(&pi, &b, 0).unwrap().verdict, Verdict::Predicted);
        }
        let s = system(vec![vec![], vec![], vec![vec![1, 1, 0, 0], vec![1, 0, 1, 1]]]);
        let pi = predictor_from_slalom(&s).unwrap();
        assert_eq!(pi.domain().collect::<Vec<_>>(), vec![1]);
        assert_eq!(pi.rule(1).unwrap().eval(&[0], pi.spec()).unwrap(), 1);
        let s = system(vec![vec![], vec![], vec![vec![0, 0, 0, 0], vec![1, 0, 0, 0]]]);
        let pi = predictor_from_slalom(&s).unwrap();
        assert_eq!(pi.predict(&[0, 1]).unwrap(), Some(0));
    }

    #[test]
    fn system_validation() {
        let spec = SpaceSpec::uniform(2, 5).unwrap();
        assert_eq!(
            SlalomBlockSystem::new(spec.clone(), vec![vec![], vec![vec![0]], vec![]]),
            Err(TransformError::DegenerateBlock { block: 1 })
        );
        let three = vec![vec![0; 4]; 3];
        assert!(matches!(
            SlalomBlockSystem::new(spec.clone(), vec![vec![], vec![], three]),
            Err(TransformError::TooManyOptions { .. })
        ));
        assert!(matches!(
            SlalomBlockSystem::new(spec, vec![vec![], vec![], vec![vec![0, 2, 0, 0]]]),
            Err(TransformError::OptionOutsideSpace { .. })
        ));
    }

    fn lin(field: Field, opts: &[&[i64]]) -> Vec<Vec<Scalar>> {
        opts.iter().map(|o| o.iter().map(|&v| field.from_i64(v)).collect()).collect()
    }

    #[test]
    fn independent_subsets() {
        let f2 = Field::Prime(2);
        assert_eq!(independent_subset(f2, &lin(f2, &[&[1, 0, 0, 0], &[0, 1, 0, 0]])).len(), 2);
        assert_eq!(independent_subset(f2, &lin(f2, &[&[1, 0, 1, 0], &[1, 0, 1, 0]])).len(), 1);
        assert_eq!(independent_subset(f2, &lin(f2, &[&[1, 1, 0, 0], &[0, 0, 0, 0]])), lin(f2, &[&[1, 1, 0, 0]]));
    }

    #[test]
    fn linear_merge_examples() {
        let f2 = Field::Prime(2);
        // unit options: the pairwise merge point 1 admits no functional, offset 2 does
        let (j, c) = linear_merge_point(f2, &lin(f2, &[&[1, 0, 0, 0], &[0, 1, 0, 0]])).unwrap();
        assert_eq!((j, c), (2, lin(f2, &[&[0, 0]]).remove(0)));
        assert_eq!(find_merge_point(&lin(f2, &[&[1, 0, 0, 0], &[0, 1, 0, 0]])), Some(1));
        // a single surviving option (1,1,..): the functional copies position 0
        let (j, c) = linear_merge_point(f2, &lin(f2, &[&[1, 1, 0, 0], &[0, 0, 0, 0]])).unwrap();
        assert_eq!((j, c), (1, vec![f2.one()]));
    }

    #[test]
    fn linear_predictor_predicts_the_span() {
        let f3 = Field::Prime(3);
        let block2 = lin(f3, &[&[1, 2, 0, 1], &[2, 1, 1, 0]]);
        let block3 = lin(f3, &[&[1, 0, 0, 2, 0, 0, 0, 0, 1], &[0, 1, 0, 0, 0, 2, 0, 0, 0], &[1, 1, 0, 2, 0, 2, 0, 0, 1]]);
        let s = LinearSlalomSystem::new(f3, vec![vec![], vec![], block2.clone(), block3.clone()]).unwrap();
        let pi = linear_predictor_from_slalom(&s).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    for d in 0..3 {
                        let mut w = vec![f3.zero(); s.horizon()];
                        let (ca, cb, cc, cd) = (f3.from_i64(a), f3.from_i64(b), f3.from_i64(c), f3.from_i64(d));
                        for j in 0..4 {
                            w[1 + j] = &(&ca * &block2[0][j]) + &(&cb * &block2[1][j]);
                        }
                        for j in 0..9 {
                            w[5 + j] = &(&cc * &block3[0][j]) + &(&cd * &block3[1][j]);
                        }
                        assert_eq!(check_linear_prediction(&pi, &w, 0).unwrap().verdict, Verdict::Predicted);
                    }
                }
            }
        }
    }

    #[test]
    fn system_json_roundtrip() {
        let s = system(vec![vec![], vec![], vec![vec![0, 1, 1, 0]]]);
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(serde_json::from_str::<SlalomBlockSystem>(&j).unwrap(), s);
    }
}
