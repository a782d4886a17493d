//! Build a symmetric form from Luzin generators through coherent injections
//! and read the generators back out.

use evasion_lab::algebra::Field;
use evasion_lab::gross::{luzin_to_gross, make_coherent_injections, roundtrip_check_form, InjectionStyle};
use evasion_lab::luzin::{default_sources, LuzinFamily, SigmaStarCache};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 4;
    for style in [InjectionStyle::Canonical, InjectionStyle::Perturbed(7)] {
        let h = make_coherent_injections(n, style);
        let horizon = h.working_horizon() as usize;
        let mut cache = SigmaStarCache::new(Field::Rationals)?;
        let fam = LuzinFamily::build(&default_sources(n, horizon), horizon, &mut cache)?;
        let g: Vec<_> = fam.generators().iter().map(|g| g.values.clone()).collect();
        let phi = luzin_to_gross(Field::Rationals, &g, &h, n)?;
        let report = roundtrip_check_form(&phi, &g, &h, 2)?;
        println!("{style:?}: {} values checked, {} mismatches", report.checked, report.mismatches.len());
    }
    Ok(())
}
