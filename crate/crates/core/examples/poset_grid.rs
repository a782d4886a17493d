//! Exhaustive order and softness checks on the horizon-2 grid of conditions.

use evasion_lab::poset::grid::Grid;
use evasion_lab::predict::SpaceSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = Grid::new(SpaceSpec::uniform(2, 2)?, 2);
    println!("{} conditions", grid.len());
    for row in [
        grid.check_partial_order(),
        grid.check_height_monotone(),
        grid.check_property_iii(),
        grid.check_softness_coverage(3),
    ] {
        println!("{:<20} checked {:>8}, failures {}", row.case, row.checked, row.failures);
    }
    Ok(())
}
