//! Query the builtin inequality diagram.

use evasion_lab::diagram::load_builtin_diagram;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let d = load_builtin_diagram();
    for (a, b) in [("add_L", "add_M"), ("e", "b"), ("e_ubd", "e_fin"), ("cof_L", "e")] {
        let q = d.query(a, b)?;
        println!("{a} vs {b}: {:?}", q.verdict);
        for r in &q.path {
            println!("    {} <= {}  [{}]", r.from, r.to, r.citation);
        }
        for n in &q.consistency {
            println!("    consistent: {} < {}  [{}]", n.lower, n.upper, n.via.citation);
        }
    }
    Ok(())
}
