//! Independent coefficient oracle for the local power series.
//!
//! Works with the integer sequences S_n = n!·s_n and C_n = n!·c_n, for which
//! s' = c² and c' = -s² become binomial convolutions over the integers:
//!
//!   S_{n+1} =  Σ_k C(n,k) C_k C_{n-k}
//!   C_{n+1} = -Σ_k C(n,k) S_k S_{n-k}
//!
//! No rationals and no Cauchy products, so it shares nothing with the
//! library's generator beyond the differential equation itself.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

fn binomial_row(n: usize) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for k in 1..=n {
        let prev = row[k - 1].clone();
        row.push(prev * BigInt::from(n - k + 1) / BigInt::from(k));
    }
    row
}

pub fn egf_oracle(order: usize) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut s_int = vec![BigInt::zero(); order + 1];
    let mut c_int = vec![BigInt::zero(); order + 1];
    c_int[0] = BigInt::one();
    for n in 0..order {
        let binom = binomial_row(n);
        let mut ds = BigInt::zero();
        let mut dc = BigInt::zero();
        for k in 0..=n {
            ds += &binom[k] * &c_int[k] * &c_int[n - k];
            dc -= &binom[k] * &s_int[k] * &s_int[n - k];
        }
        s_int[n + 1] = ds;
        c_int[n + 1] = dc;
    }
    let mut fact = BigInt::one();
    let mut s = Vec::with_capacity(order + 1);
    let mut c = Vec::with_capacity(order + 1);
    for n in 0..=order {
        if n > 0 {
            fact *= BigInt::from(n);
        }
        s.push(BigRational::new(s_int[n].clone(), fact.clone()));
        c.push(BigRational::new(c_int[n].clone(), fact.clone()));
    }
    (s, c)
}

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
