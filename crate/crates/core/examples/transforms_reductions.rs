//! Extend a predictor from `2^3` to the whole space and read the linear
//! predictor attached to an unsplit index set.

use std::collections::BTreeMap;

use evasion_lab::algebra::Field;
use evasion_lab::predict::{check_linear_prediction, check_prediction, IndexRule, Predictor, SpaceSpec};
use evasion_lab::transforms::{extend_predictor_to_omega, predictor_from_unsplit_set};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let x = [2, 2, 2];
    let pi = Predictor::new(SpaceSpec::bounded(&x)?, BTreeMap::from([(2, IndexRule::Copy { from: 0 })]))?;
    let star = extend_predictor_to_omega(&pi, &x)?;
    for w in [[0, 0, 0], [7, 0, 0], [7, 0, 1]] {
        println!("extended predictor on {w:?}: {:?}", check_prediction(&star, &w, 0)?.verdict);
    }

    let f2 = Field::Prime(2);
    let lin = predictor_from_unsplit_set(&[0, 1, 2, 3], f2)?;
    let word: Vec<_> = [1, 1, 0, 0].iter().map(|&v| f2.from_i64(v)).collect();
    println!("constant on pairs: {:?}", check_linear_prediction(&lin, &word, 0)?.verdict);
    Ok(())
}
