use crate::error::{DescentError, Result};
use crate::field::{Fe, Field};

use super::laurent::{curve_expansion, Laurent};
use super::{Curve, Point};

/// A factor of a Miller function, monic in the uniformizer at `O`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LineFactor {
    /// `y - lambda x - nu`
    Line { lambda: Fe, nu: Fe },
    /// `x - c`
    Vertical { c: Fe },
}

impl LineFactor {
    /// Value at `(x, y)`; coefficients must already live in the field of `x`.
    fn eval(&self, x: &Fe, y: &Fe) -> Fe {
        match self {
            LineFactor::Line { lambda, nu } => y - &(lambda * x) - nu,
            LineFactor::Vertical { c } => x - c,
        }
    }

    fn laurent(&self, x: &Laurent, y: &Laurent, prec: usize) -> Laurent {
        match self {
            LineFactor::Line { lambda, nu } => y
                .sub(&x.scale(lambda))
                .sub(&Laurent::constant(nu.clone(), prec + 4)),
            LineFactor::Vertical { c } => x.sub(&Laurent::constant(c.clone(), prec + 4)),
        }
        .normalized()
    }
}

/// How the Miller loop combines multiples of `T`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Chain {
    /// `f_{i+1} = f_i l_{iT,T} / v_{(i+1)T}`.
    Sequential,
    /// Double-and-add on the binary expansion of `n`.
    Binary,
}

/// `F_T` with `div(F_T) = n(T) - n(O)`, stored as a product of line factors,
/// each with leading Laurent coefficient 1 at `O`.
#[derive(Clone, Debug)]
pub struct MillerFn {
    pub t: Point,
    pub n: usize,
    pub factors: Vec<(LineFactor, i32)>,
}

impl MillerFn {
    /// The constant function 1 (used for `T = O`).
    pub fn one(n: usize) -> MillerFn {
        MillerFn {
            t: Point::Infinity,
            n,
            factors: vec![],
        }
    }

    pub fn new(curve: &Curve, t: &Point, n: usize) -> Result<MillerFn> {
        Self::with_chain(curve, t, n, Chain::Binary)
    }

    pub fn with_chain(curve: &Curve, t: &Point, n: usize, chain: Chain) -> Result<MillerFn> {
        if t.is_infinity() {
            return Ok(MillerFn::one(n));
        }
        if !curve.mul(n as i64, t).is_infinity() {
            return Err(DescentError::InvalidInput("T is not n-torsion".into()));
        }
        let mut f = MillerFn {
            t: t.clone(),
            n,
            factors: vec![],
        };
        match chain {
            Chain::Sequential => {
                let mut r = t.clone();
                for _ in 1..n {
                    f.push_step(curve, &r, t);
                    r = curve.add(&r, t);
                }
            }
            Chain::Binary => {
                let bits: Vec<bool> = (0..usize::BITS - n.leading_zeros())
                    .rev()
                    .map(|i| (n >> i) & 1 == 1)
                    .collect();
                let mut r = t.clone();
                for &bit in &bits[1..] {
                    for fac in f.factors.iter_mut() {
                        fac.1 *= 2;
                    }
                    f.push_step(curve, &r, &r);
                    r = curve.double(&r);
                    if bit {
                        f.push_step(curve, &r, t);
                        r = curve.add(&r, t);
                    }
                }
            }
        }
        f.factors.retain(|(_, e)| *e != 0);
        Ok(f)
    }

    /// Multiplies by `l_{A,B} / v_{A+B}`.
    fn push_step(&mut self, curve: &Curve, a: &Point, b: &Point) {
        if a.is_infinity() || b.is_infinity() {
            return;
        }
        let s = curve.add(a, b);
        match curve.slope(a, b) {
            Err(_) => self.push(
                LineFactor::Vertical {
                    c: a.x().unwrap().clone(),
                },
                1,
            ),
            Ok(lambda) => {
                let nu = a.y().unwrap() - &(&lambda * a.x().unwrap());
                self.push(LineFactor::Line { lambda, nu }, 1);
                if let Some(x) = s.x() {
                    self.push(LineFactor::Vertical { c: x.clone() }, -1);
                }
            }
        }
    }

    fn push(&mut self, fac: LineFactor, e: i32) {
        if let Some(slot) = self.factors.iter_mut().find(|(f, _)| *f == fac) {
            slot.1 += e;
        } else {
            self.factors.push((fac, e));
        }
    }

    /// Value at an affine point off the support of every factor.
    pub fn eval(&self, curve: &Curve, p: &Point) -> Result<Fe> {
        let Point::Affine(x, y) = p else {
            return Err(DescentError::InSupport("O".into()));
        };
        let dx = x.field().degree();
        let d = match self.t.degree() {
            Some(dt) => dt / crate::field::gcd(dt, dx) * dx,
            None => dx,
        };
        let tw = curve.tower();
        let field = tw.field(d);
        let (x, y) = (tw.embed(x, d), tw.embed(y, d));
        let mut num = field.one();
        let mut den = field.one();
        for (fac, e) in &self.factors {
            let v = embed_factor(curve, fac, &field).eval(&x, &y);
            if v.is_zero() {
                return Err(DescentError::InSupport(format!("{p:?}")));
            }
            if *e > 0 {
                num = num * v.pow_u64(*e as u64);
            } else {
                den = den * v.pow_u64(e.unsigned_abs() as u64);
            }
        }
        Ok(num.div_ref(&den).unwrap())
    }

    /// Laurent expansion at `O` in `t = x/y`, over the field of `T`.
    pub fn laurent(&self, curve: &Curve, field: &Field, prec: usize) -> Result<Laurent> {
        let (x, y) = curve_expansion(curve, field, prec + 8);
        let mut acc = Laurent::constant(field.one(), prec);
        for (fac, e) in &self.factors {
            let fac = embed_factor(curve, fac, field);
            let s = fac.laurent(&x, &y, prec);
            acc = acc.mul(&s.powi(*e)?);
        }
        Ok(acc)
    }
}

fn embed_factor(curve: &Curve, fac: &LineFactor, field: &Field) -> LineFactor {
    let tw = curve.tower();
    let d = field.degree();
    match fac {
        LineFactor::Line { lambda, nu } => LineFactor::Line {
            lambda: tw.embed(lambda, d),
            nu: tw.embed(nu, d),
        },
        LineFactor::Vertical { c } => LineFactor::Vertical { c: tw.embed(c, d) },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::TorsionData;
    use crate::field::Tower;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_torsion_function_is_vertical() {
        // y^2 = x^3 - x over F_7 has full rational 2-torsion
        let e = Curve::new(&Tower::new(7), -1, 0).unwrap();
        let k = e.tower().prime();
        let t = e.point(k.from_u64(1), k.zero()).unwrap();
        let f = MillerFn::new(&e, &t, 2).unwrap();
        assert_eq!(f.factors, vec![(LineFactor::Vertical { c: k.one() }, 1)]);
        let l = f.laurent(&e, &k, 6).unwrap();
        assert_eq!(l.leading().unwrap(), (-2, k.one()));
    }

    #[test]
    fn chains_agree_and_are_normalized() {
        let e = Curve::new(&Tower::new(13), 2, 5).unwrap();
        for n in [3usize, 5] {
            let td = TorsionData::new(&e, n).unwrap();
            let l = td.field().clone();
            let big = e.tower().field(l.degree() * 2);
            let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
            for t in td.points().iter().skip(1) {
                let a = MillerFn::with_chain(&e, t, n, Chain::Binary).unwrap();
                let b = MillerFn::with_chain(&e, t, n, Chain::Sequential).unwrap();
                for _ in 0..3 {
                    let p = e.random_point(&big, &mut rng);
                    if let (Ok(va), Ok(vb)) = (a.eval(&e, &p), b.eval(&e, &p)) {
                        assert_eq!(va, vb);
                    }
                }
                let lau = a.laurent(&e, &l, 8).unwrap();
                assert_eq!(lau.leading().unwrap(), (-(n as i64), l.one()));
            }
        }
    }
}
