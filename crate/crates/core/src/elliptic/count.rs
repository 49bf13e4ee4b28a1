use num_bigint::BigInt;

use crate::field::nth_roots;

use super::Curve;

fn legendre(a: u64, p: u64) -> i64 {
    if a.is_multiple_of(p) {
        return 0;
    }
    let mut r = 1u64;
    let mut b = a % p;
    let mut e = (p - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    if r == 1 {
        1
    } else {
        -1
    }
}

/// `#E(F_{p^k})`: enumeration over `F_p`, then the zeta recurrence.
pub fn count_points(curve: &Curve, k: u32) -> BigInt {
    let p = curve.p();
    let (a, b) = curve.coefficients();
    let mut n1: i64 = 1;
    for x in 0..p {
        let r = (x * x % p * x + a * x + b) % p;
        n1 += 1 + legendre(r, p);
    }
    let q = BigInt::from(p);
    let t: BigInt = &q + 1 - BigInt::from(n1);
    // s_0 = 2, s_1 = t, s_k = t s_{k-1} - q s_{k-2}
    let (mut s0, mut s1) = (BigInt::from(2), t.clone());
    for _ in 1..k {
        let s2 = &t * &s1 - &q * &s0;
        s0 = s1;
        s1 = s2;
    }
    if k == 0 {
        return BigInt::from(0);
    }
    q.pow(k) + 1 - s1
}

/// Direct enumeration over the field of degree `k` (small fields only).
pub fn count_points_direct(curve: &Curve, k: usize) -> u64 {
    let f = curve.tower().field(k);
    let mut n = 1;
    for x in f.elements() {
        n += nth_roots(&curve.rhs(&x), 2).len() as u64;
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Tower;

    #[test]
    fn hasse_and_recurrence() {
        for p in [5u64, 7, 11, 13] {
            let t = Tower::new(p);
            for (a, b) in [(1, 1), (2, 3), (0, 1), (1, 0)] {
                let Ok(e) = Curve::new(&t, a, b) else { continue };
                let n1 = count_points(&e, 1);
                let trace = BigInt::from(p + 1) - &n1;
                assert!(&trace * &trace <= BigInt::from(4 * p));
                assert_eq!(n1, BigInt::from(count_points_direct(&e, 1)));
                assert_eq!(count_points(&e, 2), BigInt::from(count_points_direct(&e, 2)));
            }
        }
    }
}
