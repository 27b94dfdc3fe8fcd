//! Twisting elements exist exactly for odd n.

use ucg::algebraicity::{classify_algebraicity, pairing_symmetry_options, twisting_element, ArchParam, Twisting};

fn main() {
    for n in 1..=8 {
        match twisting_element(n) {
            Twisting::Exists(theta) => println!("n = {n}: theta = {theta:?}"),
            Twisting::NoneExists { doubled_first } => println!("n = {n}: none, theta_1 would be {doubled_first}/2"),
        }
    }
    for s in ["1/2,1/2,-1/2", "1,0,-1", "1/2,-1/2"] {
        let p: ArchParam = s.parse().unwrap();
        println!("({s}): {:?}, {:?}", classify_algebraicity(&p), pairing_symmetry_options(&p));
    }
}
