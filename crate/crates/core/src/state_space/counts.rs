use alloc::vec::Vec;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

/// `0!, 1!, …, k!`.
fn factorials(k: usize) -> Vec<BigUint> {
    let mut out = Vec::with_capacity(k + 1);
    out.push(BigUint::one());
    for v in 1..=k {
        let next = &out[v - 1] * BigUint::from(v);
        out.push(next);
    }
    out
}

/// `A_n = ∏_{j=1}^{n} (3j−2)! / (n+j−1)!`, the number of `n×n` alternating
/// sign matrices. `A_0 = 1`.
pub fn a_n(n: usize) -> BigUint {
    let f = factorials(3 * n);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for j in 1..=n {
        num *= &f[3 * j - 2];
        den *= &f[n + j - 1];
    }
    exact_quotient(num, den)
}

/// `C_n = ∏_{j=1}^{n} (3j−1)(3j−3)! / (n+j−1)!`, the number of cyclically
/// symmetric plane partitions in an `n`-cube. `C_0 = 1`.
pub fn c_n(n: usize) -> BigUint {
    let f = factorials(3 * n);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for j in 1..=n {
        num *= BigUint::from(3 * j - 1) * &f[3 * j - 3];
        den *= &f[n + j - 1];
    }
    exact_quotient(num, den)
}

fn exact_quotient(num: BigUint, den: BigUint) -> BigUint {
    let (q, r) = num.div_rem(&den);
    assert!(r.is_zero(), "product formula did not divide exactly");
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        let a: alloc::vec::Vec<u64> = (0..=8).map(|n| a_n(n).try_into().unwrap()).collect();
        assert_eq!(a, [1, 1, 2, 7, 42, 429, 7436, 218348, 10850216]);
        let c: alloc::vec::Vec<u64> = (0..=6).map(|n| c_n(n).try_into().unwrap()).collect();
        assert_eq!(c, [1, 2, 5, 20, 132, 1452, 26741]);
    }

    #[test]
    fn ratio_is_shifted_pochhammer_quotient() {
        // C_n / A_n = ∏ (3j−1)/(3j−2)
        for n in 1..=15usize {
            let mut num = BigUint::one();
            let mut den = BigUint::one();
            for j in 1..=n as u64 {
                num *= 3 * j - 1;
                den *= 3 * j - 2;
            }
            assert_eq!(c_n(n) * den, a_n(n) * num);
        }
    }
}
