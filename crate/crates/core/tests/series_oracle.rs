//! Library series coefficients against the integer EGF oracle.

mod common;

use common::{egf_oracle, rat};
use dixon::series::SeriesPair;

#[test]
fn oracle_landmarks() {
    let (s, c) = egf_oracle(7);
    assert_eq!(s[4], rat(-1, 6));
    assert_eq!(s[7], rat(2, 63));
    assert_eq!(c[3], rat(-1, 3));
    assert_eq!(c[6], rat(1, 18));
}

#[test]
fn library_matches_oracle_through_order_64() {
    let (s, c) = egf_oracle(64);
    let pair = SeriesPair::generate(64).unwrap();
    for n in 0..=64 {
        assert_eq!(pair.s_coeffs()[n], s[n], "s_{n}");
        assert_eq!(pair.c_coeffs()[n], c[n], "c_{n}");
    }
}
