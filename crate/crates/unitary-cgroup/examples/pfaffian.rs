//! Pfaffians and their full polarisation.

use ucg::field::Field;
use ucg::gu::pfaffian_polarization;
use ucg::matrix::Matrix;

fn main() {
    let f = Field::Rational;
    let a = Matrix::from_ints(&f, &[&[0, 1, 2, 3], &[-1, 0, 4, 5], &[-2, -4, 0, 6], &[-3, -5, -6, 0]]);
    let pf = a.pfaffian().unwrap();
    println!("pf = {pf}, det = {}", a.det().unwrap());
    // P(B, B) = 2! pf(B - B^t)
    let b = Matrix::from_ints(&f, &[&[1, 1, 2, 3], &[0, 1, 4, 5], &[0, 0, 1, 6], &[0, 0, 0, 1]]);
    let p = pfaffian_polarization(&[b.clone(), b.clone()]).unwrap();
    println!("P(B, B) = {p}, 2 pf(B - B^t) = {}", b.sub(&b.transpose()).pfaffian().unwrap().mul(&f.from_int(2)));
    // four arguments on 4x4 matrices overshoot the degree
    println!("P(B, B, B, B) = {}", pfaffian_polarization(&[b.clone(), b.clone(), b.clone(), b]).unwrap());
}
