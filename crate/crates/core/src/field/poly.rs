use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::fe::{Fe, Field};

/// Dense univariate polynomial over a [`Field`], little-endian, always trimmed.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    field: Field,
    c: Vec<Fe>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly{:?}", self.c)
    }
}

const FACTOR_SEED: u64 = 0x5eed_f00d;

impl Poly {
    pub fn new(field: &Field, mut c: Vec<Fe>) -> Poly {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly {
            field: field.clone(),
            c,
        }
    }

    pub fn from_u64(field: &Field, c: &[u64]) -> Poly {
        Poly::new(field, c.iter().map(|&v| field.from_u64(v)).collect())
    }

    pub fn from_i64(field: &Field, c: &[i64]) -> Poly {
        Poly::new(field, c.iter().map(|&v| field.from_i64(v)).collect())
    }

    pub fn zero(field: &Field) -> Poly {
        Poly::new(field, vec![])
    }

    pub fn one(field: &Field) -> Poly {
        Poly::constant(field.one())
    }

    pub fn constant(c: Fe) -> Poly {
        let f = c.field().clone();
        Poly::new(&f, vec![c])
    }

    /// The polynomial `x`.
    pub fn x(field: &Field) -> Poly {
        Poly::new(field, vec![field.zero(), field.one()])
    }

    /// `x - a`.
    pub fn linear(a: &Fe) -> Poly {
        let f = a.field().clone();
        Poly::new(&f, vec![a.neg_ref(), f.one()])
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> Fe {
        self.c.get(i).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn lead(&self) -> Fe {
        self.c.last().cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn is_monic(&self) -> bool {
        self.c.last().is_some_and(|x| x.is_one())
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.lead().inv().unwrap();
        self.scale(&inv)
    }

    pub fn scale(&self, s: &Fe) -> Poly {
        Poly::new(&self.field, self.c.iter().map(|x| x * s).collect())
    }

    pub fn eval(&self, x: &Fe) -> Fe {
        let mut acc = self.field.zero();
        for c in self.c.iter().rev() {
            acc = &acc * x + c;
        }
        acc
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::new(
            &self.field,
            (0..n).map(|i| self.coeff(i) + o.coeff(i)).collect(),
        )
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::new(
            &self.field,
            (0..n).map(|i| self.coeff(i) - o.coeff(i)).collect(),
        )
    }

    pub fn neg(&self) -> Poly {
        Poly::new(&self.field, self.c.iter().map(|x| x.neg_ref()).collect())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero(&self.field);
        }
        let mut out = vec![self.field.zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        Poly::new(&self.field, out)
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one(&self.field);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = vec![self.field.zero(); k];
        c.extend(self.c.iter().cloned());
        Poly::new(&self.field, c)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            &self.field,
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.scale(i as u64))
                .collect(),
        )
    }

    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.c.len() - 1;
        if self.c.len() <= dd {
            return (Poly::zero(&self.field), self.clone());
        }
        let inv = d.lead().inv().unwrap();
        let mut r = self.c.clone();
        let mut q = vec![self.field.zero(); r.len() - dd];
        for i in (0..q.len()).rev() {
            let coef = &r[i + dd] * &inv;
            if coef.is_zero() {
                continue;
            }
            for (j, dj) in d.c.iter().enumerate() {
                r[i + j] -= &(&coef * dj);
            }
            q[i] = coef;
        }
        r.truncate(dd);
        (Poly::new(&self.field, q), Poly::new(&self.field, r))
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        self.divrem(d).1
    }

    /// Exact division; panics if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Poly {
        let (q, r) = self.divrem(d);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn gcd(&self, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Returns `(g, s, t)` with `s*self + t*o = g` monic.
    pub fn xgcd(&self, o: &Poly) -> (Poly, Poly, Poly) {
        let f = &self.field;
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (Poly::one(f), Poly::zero(f));
        let (mut t0, mut t1) = (Poly::zero(f), Poly::one(f));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            let s2 = s0.sub(&q.mul(&s1));
            let t2 = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
            t0 = t1;
            t1 = t2;
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = r0.lead().inv().unwrap();
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    pub fn mulmod(&self, o: &Poly, m: &Poly) -> Poly {
        self.mul(o).rem(m)
    }

    pub fn powmod(&self, e: &BigUint, m: &Poly) -> Poly {
        let mut acc = Poly::one(&self.field).rem(m);
        let base = self.rem(m);
        for i in (0..e.bits()).rev() {
            acc = acc.mulmod(&acc, m);
            if e.bit(i) {
                acc = acc.mulmod(&base, m);
            }
        }
        acc
    }

    /// Composition `self(g(x))`.
    pub fn compose(&self, g: &Poly) -> Poly {
        let mut acc = Poly::zero(&self.field);
        for c in self.c.iter().rev() {
            acc = acc.mul(g).add(&Poly::constant(c.clone()));
        }
        acc
    }

    /// Maps every coefficient through `f`, landing in `target`.
    pub fn map_coeffs(&self, target: &Field, f: impl Fn(&Fe) -> Fe) -> Poly {
        Poly::new(target, self.c.iter().map(f).collect())
    }

    fn q(&self) -> BigUint {
        self.field.order()
    }

    /// Squarefree decomposition: list of `(g, e)` with `self = lead * prod g^e`.
    pub fn squarefree(&self) -> Vec<(Poly, usize)> {
        let p = self.field.p() as usize;
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let d = f.derivative();
        if d.is_zero() {
            // f = g^p
            let g = f.pth_root();
            for (h, e) in g.squarefree() {
                out.push((h, e * p));
            }
            return out;
        }
        let mut c = f.gcd(&d);
        let mut w = f.div_exact(&c);
        let mut i = 1;
        while w.degree().unwrap_or(0) > 0 {
            let y = w.gcd(&c);
            let z = w.div_exact(&y);
            if z.degree().unwrap_or(0) > 0 {
                out.push((z, i));
            }
            i += 1;
            w = y;
            c = c.div_exact(&w);
        }
        if c.degree().unwrap_or(0) > 0 {
            let g = c.pth_root();
            for (h, e) in g.squarefree() {
                out.push((h, e * p));
            }
        }
        out
    }

    /// For `f = g(x^p)`, returns `g` with coefficients replaced by p-th roots.
    fn pth_root(&self) -> Poly {
        let p = self.field.p() as usize;
        let k = self.field.degree();
        let c: Vec<Fe> = self
            .c
            .iter()
            .step_by(p)
            .map(|x| x.frobenius_n(k - 1))
            .collect();
        Poly::new(&self.field, c)
    }

    /// Distinct-degree factorization of a monic squarefree polynomial.
    pub fn distinct_degree(&self) -> Vec<(Poly, usize)> {
        let mut out = Vec::new();
        let mut f = self.monic();
        let x = Poly::x(&self.field);
        let q = self.q();
        let mut h = x.clone();
        let mut d = 0;
        while f.degree().unwrap_or(0) >= 2 * (d + 1) {
            d += 1;
            h = h.powmod(&q, &f);
            let g = h.sub(&x).gcd(&f);
            if g.degree().unwrap_or(0) > 0 {
                f = f.div_exact(&g);
                h = h.rem(&f);
                out.push((g, d));
            }
        }
        if let Some(deg) = f.degree() {
            if deg > 0 {
                out.push((f, deg));
            }
        }
        out
    }

    /// Equal-degree splitting (Cantor-Zassenhaus, odd characteristic).
    pub fn equal_degree(&self, d: usize, rng: &mut ChaCha8Rng) -> Vec<Poly> {
        let n = self.degree().unwrap_or(0);
        if n == d {
            return vec![self.monic()];
        }
        let e = (self.q().pow(d as u32) - BigUint::one()) / 2u32;
        loop {
            let a = Poly::new(
                &self.field,
                (0..n).map(|_| self.field.random(rng)).collect(),
            );
            if a.degree().unwrap_or(0) == 0 {
                continue;
            }
            let b = a.powmod(&e, self).sub(&Poly::one(&self.field));
            let g = b.gcd(self);
            let gd = g.degree().unwrap_or(0);
            if gd > 0 && gd < n {
                let mut out = g.equal_degree(d, rng);
                out.extend(self.div_exact(&g).equal_degree(d, rng));
                return out;
            }
        }
    }

    /// Full factorization into monic irreducibles with multiplicity, sorted.
    pub fn factor(&self) -> Vec<(Poly, usize)> {
        let mut rng = ChaCha8Rng::seed_from_u64(FACTOR_SEED);
        let mut out = Vec::new();
        for (sf, e) in self.squarefree() {
            for (g, d) in sf.distinct_degree() {
                for h in g.equal_degree(d, &mut rng) {
                    out.push((h, e));
                }
            }
        }
        out.sort_by_key(|a| poly_key(&a.0));
        out
    }

    /// Rabin irreducibility test.
    pub fn is_irreducible(&self) -> bool {
        let n = match self.degree() {
            None | Some(0) => return false,
            Some(n) => n,
        };
        let f = self.monic();
        let x = Poly::x(&self.field);
        let q = self.q();
        let xq_k = |k: usize| -> Poly {
            let mut h = x.clone();
            for _ in 0..k {
                h = h.powmod(&q, &f);
            }
            h
        };
        for (r, _) in super::fe::factor_biguint(&BigUint::from(n)) {
            let k = n / r.to_u64_digits()[0] as usize;
            let g = xq_k(k).sub(&x).gcd(&f);
            if g.degree() != Some(0) {
                return false;
            }
        }
        xq_k(n).sub(&x).rem(&f).is_zero()
    }

    /// Distinct roots in the coefficient field, sorted.
    pub fn roots(&self) -> Vec<Fe> {
        if self.degree().unwrap_or(0) == 0 {
            return vec![];
        }
        let f = self.monic();
        let x = Poly::x(&self.field);
        let g = x.powmod(&self.q(), &f).sub(&x).gcd(&f);
        if g.degree().unwrap_or(0) == 0 {
            return vec![];
        }
        let mut rng = ChaCha8Rng::seed_from_u64(FACTOR_SEED);
        let mut out: Vec<Fe> = g
            .equal_degree(1, &mut rng)
            .into_iter()
            .map(|l| l.coeff(0).neg_ref())
            .collect();
        out.sort();
        out
    }
}

fn poly_key(p: &Poly) -> (usize, Vec<Fe>) {
    (p.c.len(), p.c.iter().rev().cloned().collect())
}

/// All n-th roots of `a` in its field, sorted.
pub fn nth_roots(a: &Fe, n: u32) -> Vec<Fe> {
    let f = a.field().clone();
    let mut c = vec![f.zero(); n as usize + 1];
    c[0] = a.neg_ref();
    c[n as usize] = f.one();
    Poly::new(&f, c).roots()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_roots_of_irreducible_quadratic() {
        let f = Field::prime(7);
        let p = Poly::from_u64(&f, &[1, 0, 1]);
        assert!(p.is_irreducible());
        assert!(p.roots().is_empty());
        assert!(f.elements().all(|x| !p.eval(&x).is_zero()));
    }

    #[test]
    fn small_factorizations() {
        let f = Field::prime(7);
        let p = Poly::from_i64(&f, &[-1, 0, 1]);
        let fac = p.factor();
        assert_eq!(fac.len(), 2);
        assert_eq!(p.roots(), vec![f.from_u64(1), f.from_u64(6)]);
        let c = Poly::from_i64(&f, &[0, -1, 0, 1]);
        assert_eq!(c.roots().len(), 3);
        let sq = Poly::from_i64(&f, &[1, 2, 1]).mul(&Poly::from_i64(&f, &[1, 0, 1]));
        let fac = sq.factor();
        assert_eq!(fac.len(), 2);
        assert!(fac.iter().any(|(g, e)| *e == 2 && g.degree() == Some(1)));
        assert!(fac.iter().any(|(g, e)| *e == 1 && g.degree() == Some(2)));
    }

    #[test]
    fn pth_power_factorization() {
        let f = Field::prime(5);
        // (x + 1)^5 * (x + 2)
        let p = Poly::from_i64(&f, &[1, 1]).pow(5).mul(&Poly::from_i64(&f, &[2, 1]));
        let fac = p.factor();
        let total: usize = fac.iter().map(|(g, e)| g.degree().unwrap() * e).sum();
        assert_eq!(total, 6);
        assert!(fac.iter().any(|(_, e)| *e == 5));
    }

    #[test]
    fn nth_roots_over_prime_fields() {
        let f7 = Field::prime(7);
        // cube roots of 1 in F_7: 1, 2, 4
        let r = nth_roots(&f7.one(), 3);
        assert_eq!(r, vec![f7.from_u64(1), f7.from_u64(2), f7.from_u64(4)]);
        // 3 is not a cube in F_7
        assert!(nth_roots(&f7.from_u64(3), 3).is_empty());
        let f13 = Field::prime(13);
        let r = nth_roots(&f13.from_u64(12), 2);
        assert_eq!(r, vec![f13.from_u64(5), f13.from_u64(8)]);
    }

    #[test]
    fn xgcd_bezout() {
        let f = Field::prime(11);
        let a = Poly::from_i64(&f, &[3, 0, 2, 1]);
        let b = Poly::from_i64(&f, &[1, 5, 1]);
        let (g, s, t) = a.xgcd(&b);
        assert_eq!(s.mul(&a).add(&t.mul(&b)), g);
    }
}
