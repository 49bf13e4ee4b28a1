use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

pub(crate) type Coeffs = SmallVec<[u64; 8]>;

/// A finite field `F_p[g]/(f(g))`, represented over the prime field.
#[derive(Debug)]
pub struct FieldData {
    pub(crate) p: u64,
    pub(crate) degree: usize,
    /// Monic defining polynomial, little-endian, length `degree + 1`.
    pub(crate) modulus: Vec<u64>,
}

#[derive(Clone, Debug)]
pub struct Field(pub(crate) Arc<FieldData>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p
                && self.0.degree == other.0.degree
                && self.0.modulus == other.0.modulus)
    }
}
impl Eq for Field {}

/// Serialized form of a field: `{p, k, defining_poly}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct FieldSpec {
    pub p: u64,
    pub k: usize,
    pub defining_poly: Vec<u64>,
}

impl Field {
    pub fn prime(p: u64) -> Field {
        Field(Arc::new(FieldData {
            p,
            degree: 1,
            modulus: vec![0, 1],
        }))
    }

    /// Builds a field from a monic polynomial. Irreducibility is the caller's
    /// responsibility (the tower checks it).
    pub fn from_modulus(p: u64, modulus: Vec<u64>) -> Field {
        assert!(modulus.len() >= 2 && *modulus.last().unwrap() == 1);
        let degree = modulus.len() - 1;
        Field(Arc::new(FieldData { p, degree, modulus }))
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }

    pub fn degree(&self) -> usize {
        self.0.degree
    }

    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }

    pub fn order(&self) -> BigUint {
        BigUint::from(self.0.p).pow(self.0.degree as u32)
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec {
            p: self.p(),
            k: self.degree(),
            defining_poly: self.0.modulus.clone(),
        }
    }

    pub fn zero(&self) -> Fe {
        Fe {
            field: self.clone(),
            c: SmallVec::from_elem(0, self.0.degree),
        }
    }

    pub fn one(&self) -> Fe {
        self.from_u64(1)
    }

    pub fn from_u64(&self, v: u64) -> Fe {
        let mut e = self.zero();
        e.c[0] = v % self.0.p;
        e
    }

    pub fn from_i64(&self, v: i64) -> Fe {
        let p = self.0.p as i64;
        self.from_u64(v.rem_euclid(p) as u64)
    }

    /// The generator `g` of the field over the prime field.
    pub fn generator(&self) -> Fe {
        if self.0.degree == 1 {
            return self.from_u64(self.0.modulus[0].wrapping_neg() % self.0.p);
        }
        let mut e = self.zero();
        e.c[1] = 1;
        e
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> Fe {
        assert!(coeffs.len() <= self.0.degree, "too many coefficients");
        let mut e = self.zero();
        for (i, &v) in coeffs.iter().enumerate() {
            e.c[i] = v % self.0.p;
        }
        e
    }

    pub fn random<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        let mut e = self.zero();
        for c in e.c.iter_mut() {
            *c = rng.gen_range(0..self.0.p);
        }
        e
    }

    /// All elements, enumerated in lexicographic coefficient order.
    pub fn elements(&self) -> impl Iterator<Item = Fe> + '_ {
        let total = self.0.p.pow(self.0.degree as u32);
        (0..total).map(move |mut idx| {
            let mut e = self.zero();
            for c in e.c.iter_mut() {
                *c = idx % self.0.p;
                idx /= self.0.p;
            }
            e
        })
    }
}

/// An element of a [`Field`].
#[derive(Clone)]
pub struct Fe {
    pub(crate) field: Field,
    pub(crate) c: Coeffs,
}

impl PartialEq for Fe {
    fn eq(&self, other: &Self) -> bool {
        self.c == other.c && self.field == other.field
    }
}
impl Eq for Fe {}

impl Hash for Fe {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.field.0.degree.hash(state);
        self.c.hash(state);
    }
}

impl PartialOrd for Fe {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Fe {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.field.0.degree, self.c.iter().rev().collect::<Vec<_>>())
            .cmp(&(other.field.0.degree, other.c.iter().rev().collect::<Vec<_>>()))
    }
}

impl fmt::Debug for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.degree() == 1 {
            write!(f, "{}", self.c[0])
        } else {
            write!(f, "{:?}@{}", self.c.as_slice(), self.field.degree())
        }
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

fn check_same(a: &Fe, b: &Fe) {
    debug_assert!(
        a.field == b.field,
        "field mismatch: degree {} vs {}",
        a.field.degree(),
        b.field.degree()
    );
}

impl Fe {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }

    pub fn is_one(&self) -> bool {
        self.c[0] == 1 && self.c[1..].iter().all(|&x| x == 0)
    }

    /// True when the element lies in the prime field.
    pub fn is_prime_field_element(&self) -> bool {
        self.c[1..].iter().all(|&x| x == 0)
    }

    /// The constant coefficient; meaningful for prime-field elements.
    pub fn constant(&self) -> u64 {
        self.c[0]
    }

    pub fn add_ref(&self, o: &Fe) -> Fe {
        check_same(self, o);
        let p = self.field.0.p;
        let mut r = self.clone();
        for (x, y) in r.c.iter_mut().zip(o.c.iter()) {
            *x += y;
            if *x >= p {
                *x -= p;
            }
        }
        r
    }

    pub fn sub_ref(&self, o: &Fe) -> Fe {
        check_same(self, o);
        let p = self.field.0.p;
        let mut r = self.clone();
        for (x, y) in r.c.iter_mut().zip(o.c.iter()) {
            *x = if *x >= *y { *x - y } else { *x + p - y };
        }
        r
    }

    pub fn neg_ref(&self) -> Fe {
        let p = self.field.0.p;
        let mut r = self.clone();
        for x in r.c.iter_mut() {
            if *x != 0 {
                *x = p - *x;
            }
        }
        r
    }

    pub fn mul_ref(&self, o: &Fe) -> Fe {
        check_same(self, o);
        let fd = &self.field.0;
        let p = fd.p;
        let k = fd.degree;
        if k == 1 {
            let mut r = self.clone();
            r.c[0] = self.c[0] * o.c[0] % p;
            return r;
        }
        let mut tmp: SmallVec<[u64; 16]> = SmallVec::from_elem(0, 2 * k - 1);
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                tmp[i + j] = (tmp[i + j] + a * b) % p;
            }
        }
        reduce_in_place(&mut tmp, &fd.modulus, p);
        Fe {
            field: self.field.clone(),
            c: tmp[..k].iter().copied().collect(),
        }
    }

    pub fn scale(&self, s: u64) -> Fe {
        let p = self.field.0.p;
        let s = s % p;
        let mut r = self.clone();
        for x in r.c.iter_mut() {
            *x = *x * s % p;
        }
        r
    }

    pub fn square(&self) -> Fe {
        self.mul_ref(self)
    }

    pub fn pow_u64(&self, mut e: u64) -> Fe {
        let mut base = self.clone();
        let mut acc = self.field.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        acc
    }

    pub fn pow(&self, e: &BigUint) -> Fe {
        let mut acc = self.field.one();
        let bits = e.bits();
        for i in (0..bits).rev() {
            acc = acc.square();
            if e.bit(i) {
                acc = acc.mul_ref(self);
            }
        }
        acc
    }

    /// Signed integer power; negative exponents invert.
    pub fn powi(&self, e: i64) -> Fe {
        if e >= 0 {
            self.pow_u64(e as u64)
        } else {
            self.inv().expect("inverse of zero").pow_u64(e.unsigned_abs())
        }
    }

    /// `x -> x^p`.
    pub fn frobenius(&self) -> Fe {
        self.pow_u64(self.field.0.p)
    }

    pub fn frobenius_n(&self, times: usize) -> Fe {
        let k = self.field.degree();
        let mut r = self.clone();
        for _ in 0..(times % k) {
            r = r.frobenius();
        }
        r
    }

    pub fn inv(&self) -> Option<Fe> {
        if self.is_zero() {
            return None;
        }
        let fd = &self.field.0;
        let p = fd.p;
        if fd.degree == 1 {
            return Some(self.field.from_u64(inv_mod(self.c[0], p)));
        }
        let a: Vec<u64> = trim(self.c.to_vec());
        let inv = poly_inv_mod(&a, &fd.modulus, p)?;
        let mut r = self.field.zero();
        for (i, v) in inv.into_iter().enumerate() {
            r.c[i] = v;
        }
        Some(r)
    }

    pub fn div_ref(&self, o: &Fe) -> Option<Fe> {
        Some(self.mul_ref(&o.inv()?))
    }

    /// Multiplicative order for nonzero elements (by trial over divisors of q-1).
    pub fn multiplicative_order(&self) -> Option<BigUint> {
        if self.is_zero() {
            return None;
        }
        let q1 = self.field.order() - BigUint::one();
        let mut order = q1.clone();
        for (prime, _) in factor_biguint(&q1) {
            while (&order % &prime).is_zero() {
                let cand = &order / &prime;
                if self.pow(&cand).is_one() {
                    order = cand;
                } else {
                    break;
                }
            }
        }
        Some(order)
    }

    pub fn to_u64_vec(&self) -> Vec<u64> {
        self.c.to_vec()
    }
}

fn reduce_in_place(tmp: &mut [u64], modulus: &[u64], p: u64) {
    let k = modulus.len() - 1;
    for i in (k..tmp.len()).rev() {
        let t = tmp[i];
        if t == 0 {
            continue;
        }
        tmp[i] = 0;
        for j in 0..k {
            let sub = t * modulus[j] % p;
            let slot = &mut tmp[i - k + j];
            *slot = if *slot >= sub { *slot - sub } else { *slot + p - sub };
        }
    }
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (p as i128, (a % p) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    assert!(r == 1, "{a} not invertible mod {p}");
    t.rem_euclid(p as i128) as u64
}

fn trim(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn raw_divrem(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let mut r = a.to_vec();
    if r.len() < b.len() {
        return (vec![], trim(r));
    }
    let lead_inv = inv_mod(*b.last().unwrap(), p);
    let mut q = vec![0u64; r.len() - b.len() + 1];
    for i in (0..q.len()).rev() {
        let coef = r[i + b.len() - 1] * lead_inv % p;
        q[i] = coef;
        if coef == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            let sub = coef * bj % p;
            let slot = &mut r[i + j];
            *slot = (*slot + p - sub) % p;
        }
    }
    (trim(q), trim(r))
}

fn raw_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    trim(out)
}

fn raw_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out = vec![0u64; n];
    for (i, slot) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *slot = (x + p - y) % p;
    }
    trim(out)
}

/// Inverse of `a` modulo `m` over F_p by the extended Euclidean algorithm.
fn poly_inv_mod(a: &[u64], m: &[u64], p: u64) -> Option<Vec<u64>> {
    let (mut r0, mut r1) = (m.to_vec(), a.to_vec());
    let (mut s0, mut s1): (Vec<u64>, Vec<u64>) = (vec![], vec![1]);
    while !r1.is_empty() {
        let (q, r) = raw_divrem(&r0, &r1, p);
        let s2 = raw_sub(&s0, &raw_mul(&q, &s1, p), p);
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s2;
    }
    if r0.len() != 1 {
        return None;
    }
    let c = inv_mod(r0[0], p);
    let (_, rem) = raw_divrem(&s0.iter().map(|x| x * c % p).collect::<Vec<_>>(), m, p);
    Some(rem)
}

/// Trial-division factorization; adequate for the group orders seen at desk scale.
pub(crate) fn factor_biguint(n: &BigUint) -> Vec<(BigUint, u32)> {
    let mut out = Vec::new();
    let mut n = n.clone();
    let mut d = BigUint::from(2u32);
    while &d * &d <= n {
        let mut e = 0;
        while (&n % &d).is_zero() {
            n /= &d;
            e += 1;
        }
        if e > 0 {
            out.push((d.clone(), e));
        }
        d += 1u32;
    }
    if n > BigUint::one() {
        out.push((n, 1));
    }
    out
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $inner:ident) => {
        impl $tr<&Fe> for &Fe {
            type Output = Fe;
            fn $m(self, o: &Fe) -> Fe {
                self.$inner(o)
            }
        }
        impl $tr<Fe> for Fe {
            type Output = Fe;
            fn $m(self, o: Fe) -> Fe {
                self.$inner(&o)
            }
        }
        impl $tr<&Fe> for Fe {
            type Output = Fe;
            fn $m(self, o: &Fe) -> Fe {
                self.$inner(o)
            }
        }
        impl $tr<Fe> for &Fe {
            type Output = Fe;
            fn $m(self, o: Fe) -> Fe {
                self.$inner(&o)
            }
        }
    };
}
forward_binop!(Add, add, add_ref);
forward_binop!(Sub, sub, sub_ref);
forward_binop!(Mul, mul, mul_ref);

impl Neg for Fe {
    type Output = Fe;
    fn neg(self) -> Fe {
        self.neg_ref()
    }
}
impl Neg for &Fe {
    type Output = Fe;
    fn neg(self) -> Fe {
        self.neg_ref()
    }
}
impl AddAssign<&Fe> for Fe {
    fn add_assign(&mut self, o: &Fe) {
        *self = self.add_ref(o);
    }
}
impl SubAssign<&Fe> for Fe {
    fn sub_assign(&mut self, o: &Fe) {
        *self = self.sub_ref(o);
    }
}
impl MulAssign<&Fe> for Fe {
    fn mul_assign(&mut self, o: &Fe) {
        *self = self.mul_ref(o);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f49() -> Field {
        // x^2 + 1 is irreducible over F_7
        Field::from_modulus(7, vec![1, 0, 1])
    }

    #[test]
    fn prime_field_arithmetic() {
        let f = Field::prime(13);
        let a = f.from_u64(5);
        let b = f.from_u64(9);
        assert_eq!((&a * &b).constant(), 45 % 13);
        assert_eq!((&a - &b).constant(), 9);
        assert_eq!(a.inv().unwrap().mul_ref(&a), f.one());
        assert!(f.zero().inv().is_none());
    }

    #[test]
    fn extension_inverse_and_order() {
        let f = f49();
        for x in f.elements().filter(|x| !x.is_zero()) {
            assert!(x.mul_ref(&x.inv().unwrap()).is_one());
            let q1 = BigUint::from(48u32);
            assert!(x.pow(&q1).is_one());
            let ord = x.multiplicative_order().unwrap();
            assert!((BigUint::from(48u32) % ord).is_zero());
        }
        let g = f.generator();
        assert_eq!(g.square(), f.from_i64(-1));
    }

    #[test]
    fn frobenius_closes_orbit() {
        let f = f49();
        for x in f.elements() {
            assert_eq!(x.frobenius().frobenius(), x);
        }
    }
}
