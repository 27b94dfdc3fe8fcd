//! Exact arithmetic in the four coefficient rings and the canonical square root.

use ucg::field::{field_sqrt, Field};

fn main() {
    for spec in ["rational", "cyclo:8", "fp:13", "ladic:5,3"] {
        let f = Field::parse(spec).unwrap();
        let x = f.from_int(-1);
        match field_sqrt(&x) {
            Ok(r) => println!("{:<10} sqrt(-1) = {r}", f.describe()),
            Err(e) => println!("{:<10} sqrt(-1): {e}", f.describe()),
        }
    }
    let f = Field::cyclo(8);
    let z = f.root_of_unity(8, 1).unwrap();
    let s = z.add(&z.inv().unwrap());
    println!("(zeta8 + zeta8^-1)^2 = {}", s.mul(&s));
}
