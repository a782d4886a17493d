//! Turn a slalom block system into a predictor and check every branch.

use evasion_lab::predict::{check_prediction, SpaceSpec};
use evasion_lab::transforms::{block_start, find_merge_point, predictor_from_slalom, SlalomBlockSystem};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let options = vec![
        vec![],
        vec![],
        vec![vec![0, 1, 1, 0], vec![0, 1, 0, 0]],
        vec![vec![1, 0, 0, 1, 1, 0, 1, 0, 1], vec![1, 1, 0, 0, 0, 0, 1, 1, 1], vec![0, 0, 0, 0, 0, 0, 0, 0, 0]],
    ];
    for (n, o) in options.iter().enumerate().skip(2) {
        println!("block {n}: merge point at offset {:?}", find_merge_point(o));
    }
    let sys = SlalomBlockSystem::new(SpaceSpec::uniform(2, block_start(4))?, options)?;
    let pi = predictor_from_slalom(&sys)?;
    for b in sys.branches() {
        println!("{b:?}: {:?}", check_prediction(&pi, &b, 0)?.verdict);
    }
    Ok(())
}
