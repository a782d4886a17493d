//! Prime-power encoding of a word and an exhaustive collision search on one block.

use evasion_lab::specker::{collision_refuter, specker_encode, RefuterBounds};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let v = specker_encode(&[1, 0, 2], 4)?;
    let shown: Vec<String> = v.entries.iter().map(ToString::to_string).collect();
    println!("encoding of [1, 0, 2]: {}", shown.join(", "));

    let (k, l) = (0, 4);
    let report = collision_refuter(&[0, 0, 0, 0], &[1, 0, 0, 0], k, l, RefuterBounds::default_for(k, l))?;
    println!(
        "block ({k}, {l}): {:?} over {} grid points, {} decay violations",
        report.verdict,
        report.points.len(),
        report.decay_violations
    );
    Ok(())
}
