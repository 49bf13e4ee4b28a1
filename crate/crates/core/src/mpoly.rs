//! Sparse multivariate polynomials over a tower field.

use std::collections::BTreeMap;

use crate::field::{Fe, Field};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MPoly {
    field: Field,
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Fe>,
}

/// Exponent vectors of degree `deg` in `nvars` variables, in descending lex
/// order (for three variables: `x^3, x^2y, x^2z, xy^2, xyz, xz^2, y^3, ...`).
pub fn monomials(nvars: usize, deg: u32) -> Vec<Vec<u32>> {
    fn rec(nvars: usize, deg: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == nvars {
            prefix.push(deg);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=deg).rev() {
            prefix.push(e);
            rec(nvars, deg - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if nvars == 0 {
        if deg == 0 {
            out.push(vec![]);
        }
        return out;
    }
    rec(nvars, deg, &mut Vec::new(), &mut out);
    out
}

impl MPoly {
    pub fn zero(field: &Field, nvars: usize) -> MPoly {
        MPoly {
            field: field.clone(),
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: Fe, nvars: usize) -> MPoly {
        let mut p = MPoly::zero(c.field(), nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn var(field: &Field, nvars: usize, i: usize) -> MPoly {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = MPoly::zero(field, nvars);
        p.add_term(e, field.one());
        p
    }

    /// `sum_i c_i x_i`.
    pub fn linear(field: &Field, coeffs: &[Fe]) -> MPoly {
        let n = coeffs.len();
        let mut p = MPoly::zero(field, n);
        for (i, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 1;
            p.add_term(e, c.clone());
        }
        p
    }

    /// `sum_m c_m x^m` over the given monomials.
    pub fn from_coeffs(field: &Field, nvars: usize, mons: &[Vec<u32>], coeffs: &[Fe]) -> MPoly {
        let mut p = MPoly::zero(field, nvars);
        for (m, c) in mons.iter().zip(coeffs) {
            p.add_term(m.clone(), c.clone());
        }
        p
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Fe> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &[u32]) -> Fe {
        self.terms.get(m).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn coeffs_on(&self, mons: &[Vec<u32>]) -> Vec<Fe> {
        mons.iter().map(|m| self.coeff(m)).collect()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn add_term(&mut self, e: Vec<u32>, c: Fe) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                *v += &c;
                if v.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn add(&self, o: &MPoly) -> MPoly {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(e.clone(), c.clone());
        }
        r
    }

    pub fn neg(&self) -> MPoly {
        MPoly {
            field: self.field.clone(),
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.neg_ref())).collect(),
        }
    }

    pub fn sub(&self, o: &MPoly) -> MPoly {
        self.add(&o.neg())
    }

    pub fn scale(&self, s: &Fe) -> MPoly {
        let mut r = MPoly::zero(&self.field, self.nvars);
        for (e, c) in &self.terms {
            r.add_term(e.clone(), c * s);
        }
        r
    }

    pub fn mul(&self, o: &MPoly) -> MPoly {
        let mut r = MPoly::zero(&self.field, self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                r.add_term(e, c1 * c2);
            }
        }
        r
    }

    pub fn pow(&self, k: u32) -> MPoly {
        let mut acc = MPoly::constant(self.field.one(), self.nvars);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, x: &[Fe]) -> Fe {
        let mut acc = self.field.zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                if k > 0 {
                    t *= &xi.pow_u64(k as u64);
                }
            }
            acc += &t;
        }
        acc
    }

    /// `f(g_1, ..., g_n)`; the `g_i` share a variable count.
    pub fn compose(&self, subs: &[MPoly]) -> MPoly {
        let nv = subs[0].nvars;
        let mut r = MPoly::zero(&self.field, nv);
        let mut cache: BTreeMap<(usize, u32), MPoly> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut t = MPoly::constant(c.clone(), nv);
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    let pw = cache.entry((i, k)).or_insert_with(|| subs[i].pow(k)).clone();
                    t = t.mul(&pw);
                }
            }
            r = r.add(&t);
        }
        r
    }

    /// `f(M x)` for a square matrix given by rows.
    pub fn linear_change(&self, rows: &[Vec<Fe>]) -> MPoly {
        let subs: Vec<MPoly> = rows.iter().map(|r| MPoly::linear(&self.field, r)).collect();
        self.compose(&subs)
    }

    pub fn map_coeffs(&self, target: &Field, f: impl Fn(&Fe) -> Fe) -> MPoly {
        let mut r = MPoly::zero(target, self.nvars);
        for (e, c) in &self.terms {
            r.add_term(e.clone(), f(c));
        }
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_order_and_counts() {
        let m = monomials(3, 3);
        assert_eq!(m.len(), 10);
        assert_eq!(m[0], vec![3, 0, 0]);
        assert_eq!(m[1], vec![2, 1, 0]);
        assert_eq!(m[4], vec![1, 1, 1]);
        assert_eq!(m[9], vec![0, 0, 3]);
        assert_eq!(monomials(9, 2).len(), 45);
        assert_eq!(monomials(9, 3).len(), 165);
    }

    #[test]
    fn compose_matches_eval() {
        let k = Field::prime(11);
        let x = MPoly::var(&k, 2, 0);
        let y = MPoly::var(&k, 2, 1);
        let f = x.pow(2).mul(&y).add(&y.pow(3).scale(&k.from_u64(4)));
        let g = f.compose(&[x.add(&y), x.sub(&y)]);
        for (a, b) in [(1u64, 2u64), (3, 5), (7, 0)] {
            let (a, b) = (k.from_u64(a), k.from_u64(b));
            assert_eq!(g.eval(&[a.clone(), b.clone()]), f.eval(&[&a + &b, &a - &b]));
        }
    }
}
