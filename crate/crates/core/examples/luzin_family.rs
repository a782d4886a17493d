//! Build three generators over the rationals, audit them and tabulate how
//! often small linear predictors hit their combinations.

use evasion_lab::algebra::Field;
use evasion_lab::luzin::{avoidance_audit, brute_force_luzinity, default_sources, LuzinFamily, LuzinityBudget, SigmaStarCache};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut cache = SigmaStarCache::new(Field::Rationals)?;
    let fam = LuzinFamily::build(&default_sources(3, 5), 5, &mut cache)?;
    for g in fam.generators() {
        let values: Vec<String> = g.values.iter().map(ToString::to_string).collect();
        let audit = avoidance_audit(&g.values, &g.source, &mut cache)?;
        println!("{:?} -> [{}], {} tuples audited", g.source, values.join(", "), audit.checked_tuples);
    }
    let table = brute_force_luzinity(&fam, 3, LuzinityBudget::default())?;
    println!("{} predictors, max predicted {} of {}, max rank {}", table.rows.len(), table.max_count, table.combinations, table.max_rank);
    Ok(())
}
