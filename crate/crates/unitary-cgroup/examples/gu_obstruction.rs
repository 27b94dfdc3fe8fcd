//! Two representations of (Z/4)^2 into CGU_4 that are conjugate element by
//! element but not simultaneously.

use ucg::gu::{build_witness_pair, check_global_conjugacy, check_local_conjugacy, GlobalVerdict};

fn main() {
    let p = build_witness_pair(4).unwrap();
    let local = check_local_conjugacy(&p);
    let found = local.iter().filter(|w| w.witness.is_some()).count();
    println!("local witnesses: {found}/16");
    match check_global_conjugacy(&p) {
        GlobalVerdict::NonConjugate { linear_dim, separator } => {
            println!("not conjugate; linear stage has dimension {linear_dim}");
            println!("{} at {:?}: {} vs {}", separator.invariant, separator.tuple, separator.v1, separator.v2);
        }
        v => println!("{v:?}"),
    }
}
