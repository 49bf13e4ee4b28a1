//! Plane cubics `F(x, y, z)` and their classical invariants.

mod tables;

use serde::{Deserialize, Serialize};

use crate::elliptic::Curve;
use crate::error::{DescentError, Result};
use crate::field::{nth_roots, Fe, Field, Poly, Tower};
use crate::linalg::Matrix;
use crate::mpoly::{monomials, MPoly};

use tables::{C4_TERMS, C6_TERMS};

/// Coefficients in the order `x^3, x^2y, x^2z, xy^2, xyz, xz^2, y^3, y^2z, yz^2, z^3`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TernaryCubic {
    field: Field,
    c: Vec<Fe>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Invariants {
    pub c4: Fe,
    pub c6: Fe,
    pub disc: Fe,
}

/// Coefficient rings the invariant tables can be evaluated in.
pub(crate) trait InvRing: Clone {
    fn r_int(&self, i: i64) -> Self;
    fn r_mul(&self, o: &Self) -> Self;
    fn r_add(&self, o: &Self) -> Self;
}

impl InvRing for Fe {
    fn r_int(&self, i: i64) -> Fe {
        self.field().from_i64(i)
    }
    fn r_mul(&self, o: &Fe) -> Fe {
        self * o
    }
    fn r_add(&self, o: &Fe) -> Fe {
        self + o
    }
}

impl InvRing for Poly {
    fn r_int(&self, i: i64) -> Poly {
        Poly::constant(self.field().from_i64(i))
    }
    fn r_mul(&self, o: &Poly) -> Poly {
        self.mul(o)
    }
    fn r_add(&self, o: &Poly) -> Poly {
        self.add(o)
    }
}

fn eval_table<T: InvRing, const K: usize>(terms: &[(i64, [u8; K])], c: &[T]) -> T {
    let mut acc = c[0].r_int(0);
    for (coef, idx) in terms {
        let mut t = c[0].r_int(*coef);
        for &i in idx {
            t = t.r_mul(&c[i as usize]);
        }
        acc = acc.r_add(&t);
    }
    acc
}

/// `(c4, c6)` normalized so that the Jacobian is `y^2 = x^3 - 27 c4 x - 54 c6`.
pub(crate) fn invariants_generic<T: InvRing>(c: &[T]) -> (T, T) {
    (eval_table(&C4_TERMS, c), eval_table(&C6_TERMS, c))
}

/// `(c4, c6)` of `E` under the same normalization: `(-a4 / 27, -a6 / 54)`.
pub fn curve_invariants(curve: &Curve) -> (Fe, Fe) {
    let k = curve.tower().prime();
    let c4 = curve.a4().neg_ref().div_ref(&k.from_u64(27)).unwrap();
    let c6 = curve.a6().neg_ref().div_ref(&k.from_u64(54)).unwrap();
    (c4, c6)
}

/// Some `u` with `c4 = u^4 c4e` and `c6 = u^6 c6e`.
pub fn twist_scale(c4: &Fe, c6: &Fe, c4e: &Fe, c6e: &Fe) -> Option<Fe> {
    let check = |u: &Fe| &u.pow_u64(4) * c4e == *c4 && &u.pow_u64(6) * c6e == *c6;
    let cands = if c4e.is_zero() {
        nth_roots(&c6.div_ref(c6e)?, 6)
    } else if c6e.is_zero() {
        nth_roots(&c4.div_ref(c4e)?, 4)
    } else {
        if c4.is_zero() {
            return None;
        }
        nth_roots(&(c6 * c4e).div_ref(&(c6e * c4))?, 2)
    };
    cands.into_iter().find(|u| !u.is_zero() && check(u))
}

impl TernaryCubic {
    pub fn new(field: &Field, c: Vec<Fe>) -> TernaryCubic {
        assert_eq!(c.len(), 10);
        TernaryCubic {
            field: field.clone(),
            c,
        }
    }

    pub fn from_i64(field: &Field, c: &[i64; 10]) -> TernaryCubic {
        TernaryCubic::new(field, c.iter().map(|&x| field.from_i64(x)).collect())
    }

    /// `y^2 z - x^3 - a4 x z^2 - a6 z^3`.
    pub fn weierstrass(curve: &Curve) -> TernaryCubic {
        let k = curve.tower().prime();
        let mut c = vec![k.zero(); 10];
        c[0] = k.one().neg_ref();
        c[5] = curve.a4().neg_ref();
        c[7] = k.one();
        c[9] = curve.a6().neg_ref();
        TernaryCubic::new(&k, c)
    }

    pub fn from_mpoly(p: &MPoly) -> TernaryCubic {
        TernaryCubic::new(p.field(), p.coeffs_on(&monomials(3, 3)))
    }

    pub fn to_mpoly(&self) -> MPoly {
        MPoly::from_coeffs(&self.field, 3, &monomials(3, 3), &self.c)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Fe::is_zero)
    }

    pub fn add(&self, o: &TernaryCubic) -> TernaryCubic {
        TernaryCubic::new(&self.field, self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, s: &Fe) -> TernaryCubic {
        TernaryCubic::new(&self.field, self.c.iter().map(|a| a * s).collect())
    }

    /// Scaled so the first nonzero coefficient is 1.
    pub fn normalized(&self) -> TernaryCubic {
        match self.c.iter().find(|x| !x.is_zero()) {
            Some(l) => self.scale(&l.inv().unwrap()),
            None => self.clone(),
        }
    }

    pub fn eval(&self, v: &[Fe]) -> Fe {
        self.to_mpoly().eval(v)
    }

    pub fn invariants(&self) -> Invariants {
        let (c4, c6) = invariants_generic(&self.c);
        let d = (c4.pow_u64(3) - c6.square())
            .div_ref(&self.field.from_u64(1728))
            .unwrap();
        Invariants { c4, c6, disc: d }
    }

    pub fn is_smooth(&self) -> bool {
        !self.invariants().disc.is_zero()
    }

    /// `F(M (x, y, z)^t)`, over the field of `M`.
    pub fn substitute(&self, tower: &Tower, m: &Matrix) -> TernaryCubic {
        let f = m.field().clone();
        let lifted = self.to_mpoly().map_coeffs(&f, |x| tower.embed(x, f.degree()));
        let rows: Vec<Vec<Fe>> = (0..3).map(|i| m.row(i)).collect();
        TernaryCubic::from_mpoly(&lifted.linear_change(&rows))
    }

    pub fn lift(&self, tower: &Tower, deg: usize) -> TernaryCubic {
        TernaryCubic::new(
            &tower.field(deg),
            self.c.iter().map(|x| tower.embed(x, deg)).collect(),
        )
    }

    pub fn restrict(&self, tower: &Tower, deg: usize) -> Option<TernaryCubic> {
        Some(TernaryCubic::new(
            &tower.field(deg),
            self.c
                .iter()
                .map(|x| tower.restrict(x, deg))
                .collect::<Option<_>>()?,
        ))
    }

    /// `s` with `self = s o`, if any.
    pub fn proportional(&self, o: &TernaryCubic) -> Option<Fe> {
        let k = o.c.iter().position(|x| !x.is_zero())?;
        let s = self.c[k].div_ref(&o.c[k])?;
        self.c
            .iter()
            .zip(&o.c)
            .all(|(a, b)| *a == &s * b)
            .then_some(s)
    }

    /// `F(M v)` is a multiple of `F` for every matrix.
    pub fn is_stabilized_by(&self, tower: &Tower, mats: &[Matrix]) -> bool {
        mats.iter().all(|m| {
            let f = self.lift(tower, m.field().degree());
            f.substitute(tower, m).proportional(&f).is_some()
        })
    }

    /// Number of projective points over the field of degree `k`.
    pub fn count_points(&self, tower: &Tower, k: usize) -> u64 {
        let f = self.lift(tower, k);
        let field = f.field.clone();
        let elems: Vec<Fe> = field.elements().collect();
        let (one, zero) = (field.one(), field.zero());
        let c = &f.c;
        let mut n = 0;
        // z = 1: F = c6 y^3 + (c3 x + c7) y^2 + (c1 x^2 + c4 x + c8) y + (c0 x^3 + c2 x^2 + c5 x + c9)
        for x in &elems {
            let x2 = x.square();
            let a3 = c[6].clone();
            let a2 = &(&c[3] * x) + &c[7];
            let a1 = &(&(&c[1] * &x2) + &(&c[4] * x)) + &c[8];
            let a0 = &(&(&(&c[0] * &(&x2 * x)) + &(&c[2] * &x2)) + &(&c[5] * x)) + &c[9];
            for y in &elems {
                let v = &(&(&(&(&a3 * y) + &a2) * y) + &a1) * y + &a0;
                if v.is_zero() {
                    n += 1;
                }
            }
        }
        // z = 0, y = 1: F = c0 x^3 + c1 x^2 + c3 x + c6
        for x in &elems {
            if f.eval(&[x.clone(), one.clone(), zero.clone()]).is_zero() {
                n += 1;
            }
        }
        if c[0].is_zero() {
            n += 1;
        }
        n
    }

    /// A point over `K`, searching `z = 1`, then `z = 0`.
    pub fn rational_point(&self) -> Option<[Fe; 3]> {
        let k = self.field.clone();
        let (one, zero) = (k.one(), k.zero());
        for x in k.elements() {
            for y in k.elements() {
                let v = [x.clone(), y, one.clone()];
                if self.eval(&v).is_zero() {
                    return Some(v);
                }
            }
        }
        for x in k.elements() {
            let v = [x, one.clone(), zero.clone()];
            if self.eval(&v).is_zero() {
                return Some(v);
            }
        }
        let v = [one, zero.clone(), zero];
        self.eval(&v).is_zero().then_some(v)
    }

    pub fn spec(&self) -> CubicSpec {
        CubicSpec {
            coefficients: self.c.iter().map(Fe::to_u64_vec).collect(),
        }
    }

    pub fn from_spec(field: &Field, s: &CubicSpec) -> Result<TernaryCubic> {
        if s.coefficients.len() != 10 || s.coefficients.iter().any(|c| c.len() != field.degree()) {
            return Err(DescentError::InvalidInput("cubic needs 10 coefficients".into()));
        }
        Ok(TernaryCubic::new(
            field,
            s.coefficients.iter().map(|c| field.from_coeffs(c)).collect(),
        ))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CubicSpec {
    pub coefficients: Vec<Vec<u64>>,
}
