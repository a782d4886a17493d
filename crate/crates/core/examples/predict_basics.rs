//! Build a table predictor on `2^4`, check a few words against it and find
//! a word that evades it.

use std::collections::BTreeMap;

use evasion_lab::predict::{check_prediction, evading_word, IndexRule, Predictor, SpaceSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = SpaceSpec::uniform(2, 4)?;
    // guess that every entry from index 1 on repeats the previous one
    let rules = (1..4).map(|n| (n, IndexRule::Copy { from: n - 1 })).collect::<BTreeMap<_, _>>();
    let pi = Predictor::new(spec, rules)?;
    for w in [vec![0, 0, 0, 0], vec![1, 1, 1, 1], vec![0, 1, 1, 1], vec![0, 1, 0, 1]] {
        let r = check_prediction(&pi, &w, 0)?;
        println!("{w:?}: {:?}, misses at {:?}", r.verdict, r.misses);
    }
    println!("evading word: {:?}", evading_word(&pi)?);
    Ok(())
}
