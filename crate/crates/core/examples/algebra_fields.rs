//! Exact arithmetic over GF(3) and the rationals: enumeration, rank and an
//! orthogonal complement.

use evasion_lab::algebra::{enumerate_field, orthogonal_complement, row_reduce, BilinearFragment, Field};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let q = Field::Rationals;
    let first: Vec<String> = (0..8).map(|i| enumerate_field(q, i).map(|s| s.to_string())).collect::<Result<_, _>>()?;
    println!("first rationals: {}", first.join(", "));

    let f = Field::Prime(3);
    let m = |rows: &[[i64; 3]]| rows.iter().map(|r| r.iter().map(|&v| f.from_i64(v)).collect::<Vec<_>>()).collect::<Vec<_>>();
    println!("rank over GF(3): {}", row_reduce(f, &m(&[[1, 2, 0], [2, 1, 0], [0, 0, 1]])).rank());

    let phi = BilinearFragment::identity(f, 3);
    let perp = orthogonal_complement(&phi, &m(&[[1, 1, 1]]))?;
    println!("complement of (1,1,1) under the standard form has dimension {}", perp.len());
    Ok(())
}
