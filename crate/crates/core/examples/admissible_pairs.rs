//! Exact-rational admissibility of exponent pairs and the gap relation.

use multiwave::strichartz::{
    beta_claim_contradicted, beta_exponent, classify_pair, endpoint_pair, standard_exponents, Exponent, GapRelation,
    Rational,
};

fn main() -> multiwave::Result<()> {
    let values = standard_exponents();
    for n in 2..=4u32 {
        println!("n = {n}");
        for &q in &values {
            let row: Vec<String> = values
                .iter()
                .map(|&r| {
                    let v = classify_pair(n, q, r).unwrap();
                    match (v.admissible, v.sharp) {
                        (true, true) => "S",
                        (true, false) => "a",
                        _ => ".",
                    }
                    .to_string()
                })
                .collect();
            println!("  q = {q:<4} {}", row.join(" "));
        }
    }
    for n in 4..=6 {
        let (q, r) = endpoint_pair(n)?;
        println!("endpoint n = {n}: ({q}, {r}) {:?}", classify_pair(n, q, r)?);
    }

    let gap = GapRelation::symmetric(3, (Exponent::int(4), Exponent::int(4)), Rational::new(0, 1))?;
    println!("n = 3, (4, 4): gamma = {}, verdict {:?}", gap.gamma, gap.verdict());
    println!("beta(4, 4) for n = 3: {}", beta_exponent(3, Exponent::int(4), Exponent::int(4)));
    println!("nonpositive beta claim contradicted for n = 3: {}", beta_claim_contradicted(3));
    Ok(())
}
