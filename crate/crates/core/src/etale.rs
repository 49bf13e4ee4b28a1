//! The étale algebra `R = Map_K(E[n], Kbar)` and its tensor square.
//!
//! Elements are stored as value tables indexed by torsion indices (and pairs
//! of indices for `R (x) R`), with values in the splitting field `L` or an
//! extension of it.

use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::One;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::elliptic::{Curve, DivisionPolys, Point, PointSpec, TorsionData};
use crate::error::{verify, DescentError, Result};
use crate::field::{gcd, nth_roots, Fe, Field, Tower};
use crate::linalg::Matrix;

/// A map `E[n] -> F` for some tower field `F`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RElt {
    pub v: Vec<Fe>,
}

/// A map `E[n] x E[n] -> F`, entry `(a, b)` at `a * n^2 + b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct R2Elt {
    pub v: Vec<Fe>,
}

impl RElt {
    pub fn field(&self) -> &Field {
        self.v[0].field()
    }

    pub fn constant(c: &Fe, size: usize) -> RElt {
        RElt {
            v: vec![c.clone(); size],
        }
    }

    pub fn mul(&self, o: &RElt) -> RElt {
        RElt {
            v: self.v.iter().zip(&o.v).map(|(a, b)| a * b).collect(),
        }
    }

    pub fn add(&self, o: &RElt) -> RElt {
        RElt {
            v: self.v.iter().zip(&o.v).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, c: &Fe) -> RElt {
        RElt {
            v: self.v.iter().map(|a| a * c).collect(),
        }
    }

    pub fn is_invertible(&self) -> bool {
        self.v.iter().all(|x| !x.is_zero())
    }

    pub fn inv(&self) -> Result<RElt> {
        Ok(RElt {
            v: self
                .v
                .iter()
                .map(|x| x.inv().ok_or_else(|| DescentError::NotInvertible("zero value".into())))
                .collect::<Result<_>>()?,
        })
    }

    pub fn pow(&self, e: u64) -> RElt {
        RElt {
            v: self.v.iter().map(|x| x.pow_u64(e)).collect(),
        }
    }

    pub fn lift(&self, tower: &Tower, deg: usize) -> RElt {
        RElt {
            v: self.v.iter().map(|x| tower.embed(x, deg)).collect(),
        }
    }

    pub fn restrict(&self, tower: &Tower, deg: usize) -> Option<RElt> {
        Some(RElt {
            v: self
                .v
                .iter()
                .map(|x| tower.restrict(x, deg))
                .collect::<Option<_>>()?,
        })
    }
}

impl R2Elt {
    pub fn field(&self) -> &Field {
        self.v[0].field()
    }

    pub fn constant(c: &Fe, size: usize) -> R2Elt {
        R2Elt {
            v: vec![c.clone(); size * size],
        }
    }

    pub fn mul(&self, o: &R2Elt) -> R2Elt {
        R2Elt {
            v: self.v.iter().zip(&o.v).map(|(a, b)| a * b).collect(),
        }
    }

    pub fn inv(&self) -> Result<R2Elt> {
        Ok(R2Elt {
            v: self
                .v
                .iter()
                .map(|x| x.inv().ok_or_else(|| DescentError::NotInvertible("zero value".into())))
                .collect::<Result<_>>()?,
        })
    }

    pub fn pow(&self, e: u64) -> R2Elt {
        R2Elt {
            v: self.v.iter().map(|x| x.pow_u64(e)).collect(),
        }
    }

    pub fn is_invertible(&self) -> bool {
        self.v.iter().all(|x| !x.is_zero())
    }

    /// `rho^op(a, b) = rho(b, a)`.
    pub fn op(&self) -> R2Elt {
        let n2 = (self.v.len() as f64).sqrt() as usize;
        let mut v = self.v.clone();
        for a in 0..n2 {
            for b in 0..n2 {
                v[a * n2 + b] = self.v[b * n2 + a].clone();
            }
        }
        R2Elt { v }
    }

    pub fn lift(&self, tower: &Tower, deg: usize) -> R2Elt {
        R2Elt {
            v: self.v.iter().map(|x| tower.embed(x, deg)).collect(),
        }
    }

    pub fn restrict(&self, tower: &Tower, deg: usize) -> Option<R2Elt> {
        Some(R2Elt {
            v: self
                .v
                .iter()
                .map(|x| tower.restrict(x, deg))
                .collect::<Option<_>>()?,
        })
    }

    /// Values as coefficient lists, row-major over index pairs.
    pub fn table(&self) -> Vec<Vec<u64>> {
        self.v.iter().map(Fe::to_u64_vec).collect()
    }
}

/// The `n`-th power class of an element of `R^x`, one entry per Frobenius
/// orbit: `alpha(T0)^((q^d - 1) / gcd(n, q^d - 1))` in `F_{p^d}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerClass {
    pub components: Vec<Fe>,
}

impl PowerClass {
    pub fn is_trivial(&self) -> bool {
        self.components.iter().all(Fe::is_one)
    }
}

/// A cocycle for the cyclic group `Gal(L'/K)`, given by its value at Frobenius.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cocycle {
    pub xi: usize,
    pub order: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassSource {
    Point(PointSpec),
    Explicit,
}

/// `rho` in `H` with optional witnesses `gamma` (over an extension) and
/// `alpha = gamma^n`.
#[derive(Clone, Debug)]
pub struct DescentClass {
    pub rho: R2Elt,
    pub alpha: Option<RElt>,
    pub gamma: Option<RElt>,
    pub source: ClassSource,
}

/// Serialized class: the dense `rho` table plus provenance.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct DescentClassSpec {
    pub source: ClassSource,
    pub field_degree: usize,
    pub rho: Vec<Vec<u64>>,
}

/// The étale algebra of `E[n]` with a chosen `K`-basis and its trace dual.
#[derive(Clone, Debug)]
pub struct Etale {
    td: Arc<TorsionData>,
    orbits: Vec<Vec<usize>>,
    basis: Vec<RElt>,
    dual: Vec<RElt>,
}

impl Etale {
    pub fn new(td: Arc<TorsionData>) -> Result<Etale> {
        let tw = td.curve().tower().clone();
        let l = td.field().clone();
        let m = l.degree();
        let size = td.size();
        let orbits = td.orbits();
        let mut basis = Vec::with_capacity(size);
        for orbit in &orbits {
            let d = orbit.len();
            let g = tw.generator_image(d, m);
            let mut beta = l.one();
            for _ in 0..d {
                let mut v = vec![l.zero(); size];
                let mut val = beta.clone();
                for &t in orbit {
                    v[t] = val.clone();
                    val = val.frobenius();
                }
                basis.push(RElt { v });
                beta = &beta * &g;
            }
        }
        let k = tw.prime();
        let mut gram = Matrix::zeros(&k, size, size);
        for i in 0..size {
            for j in 0..size {
                let t = trace_values(&basis[i].mul(&basis[j]));
                let t = tw
                    .to_prime(&t)
                    .ok_or_else(|| DescentError::NotRational("trace form".into()))?;
                gram.set(i, j, t);
            }
        }
        let ginv = gram
            .inverse()
            .map_err(|_| DescentError::Linear("trace form is degenerate".into()))?;
        let dual = (0..size)
            .map(|i| {
                let mut acc = RElt::constant(&l.zero(), size);
                for j in 0..size {
                    let c = tw.embed(ginv.get(i, j), m);
                    acc = acc.add(&basis[j].scale(&c));
                }
                acc
            })
            .collect();
        Ok(Etale {
            td,
            orbits,
            basis,
            dual,
        })
    }

    pub fn torsion(&self) -> &TorsionData {
        &self.td
    }

    pub fn torsion_arc(&self) -> Arc<TorsionData> {
        self.td.clone()
    }

    pub fn curve(&self) -> &Curve {
        self.td.curve()
    }

    pub fn tower(&self) -> &Tower {
        self.td.curve().tower()
    }

    pub fn k(&self) -> Field {
        self.tower().prime()
    }

    pub fn l(&self) -> &Field {
        self.td.field()
    }

    pub fn n(&self) -> usize {
        self.td.n()
    }

    /// `n^2`, the dimension of `R`.
    pub fn dim(&self) -> usize {
        self.td.size()
    }

    pub fn orbits(&self) -> &[Vec<usize>] {
        &self.orbits
    }

    pub fn basis(&self) -> &[RElt] {
        &self.basis
    }

    pub fn dual(&self) -> &[RElt] {
        &self.dual
    }

    pub fn one(&self) -> RElt {
        RElt::constant(&self.l().one(), self.dim())
    }

    pub fn one2(&self) -> R2Elt {
        R2Elt::constant(&self.l().one(), self.dim())
    }

    /// Indicator function of a torsion point.
    pub fn delta(&self, t: usize) -> RElt {
        let mut v = vec![self.l().zero(); self.dim()];
        v[t] = self.l().one();
        RElt { v }
    }

    /// `sum_i r_i* (x) r_i`, as a tensor.
    pub fn delta_tensor(&self) -> R2Elt {
        let n2 = self.dim();
        let mut v = vec![self.l().zero(); n2 * n2];
        for (r, rs) in self.basis.iter().zip(&self.dual) {
            for a in 0..n2 {
                for b in 0..n2 {
                    v[a * n2 + b] += &(&rs.v[a] * &r.v[b]);
                }
            }
        }
        R2Elt { v }
    }

    /// `tr_{R/K}`, as an element of `K` (rational inputs only).
    pub fn trace(&self, a: &RElt) -> Result<Fe> {
        self.tower()
            .to_prime(&trace_values(a))
            .ok_or_else(|| DescentError::NotRational("trace".into()))
    }

    /// Coordinates over `K` in the basis `r_i`.
    pub fn coords(&self, a: &RElt) -> Result<Vec<Fe>> {
        self.dual.iter().map(|d| self.trace(&a.mul(d))).collect()
    }

    pub fn from_coords(&self, c: &[Fe]) -> RElt {
        let m = self.l().degree();
        let mut acc = RElt::constant(&self.l().zero(), self.dim());
        for (ci, r) in c.iter().zip(&self.basis) {
            if !ci.is_zero() {
                acc = acc.add(&r.scale(&self.tower().embed(ci, m)));
            }
        }
        acc
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> RElt {
        let k = self.k();
        let c: Vec<Fe> = (0..self.dim()).map(|_| k.random(rng)).collect();
        self.from_coords(&c)
    }

    pub fn random_unit<R: Rng + ?Sized>(&self, rng: &mut R) -> RElt {
        loop {
            let a = self.random(rng);
            if a.is_invertible() {
                return a;
            }
        }
    }

    /// Equivariance `a(Frob T) = Frob(a(T))`.
    pub fn is_rational(&self, a: &RElt) -> bool {
        (0..self.dim()).all(|t| a.v[self.td.frob(t)] == a.v[t].frobenius())
    }

    pub fn is_rational2(&self, a: &R2Elt) -> bool {
        let n2 = self.dim();
        (0..n2).all(|s| {
            (0..n2).all(|t| {
                a.v[self.td.frob(s) * n2 + self.td.frob(t)] == a.v[s * n2 + t].frobenius()
            })
        })
    }

    /// Galois action `(sigma a)(T) = sigma(a(sigma^-1 T))`.
    pub fn sigma(&self, a: &RElt) -> RElt {
        RElt {
            v: (0..self.dim())
                .map(|t| a.v[self.td.frob_inv(t)].frobenius())
                .collect(),
        }
    }

    /// `w(S)(T) = e_n(S, T)`.
    pub fn w(&self, s: usize) -> RElt {
        RElt {
            v: (0..self.dim()).map(|t| self.td.weil(s, t)).collect(),
        }
    }

    /// The Weil pairing as a tensor.
    pub fn weil_tensor(&self) -> R2Elt {
        let n2 = self.dim();
        R2Elt {
            v: (0..n2 * n2)
                .map(|i| self.td.weil(i / n2, i % n2))
                .collect(),
        }
    }

    /// `(d gamma)(T1, T2) = gamma(T1) gamma(T2) / gamma(T1 + T2)`.
    pub fn partial1(&self, g: &RElt) -> Result<R2Elt> {
        let inv = g.inv()?;
        let n2 = self.dim();
        Ok(R2Elt {
            v: (0..n2 * n2)
                .map(|i| {
                    let (a, b) = (i / n2, i % n2);
                    &(&g.v[a] * &g.v[b]) * &inv.v[self.td.add(a, b)]
                })
                .collect(),
        })
    }

    /// `(d rho)(T1,T2,T3) = rho(T1,T2) rho(T1+T2,T3) / (rho(T1,T2+T3) rho(T2,T3))`,
    /// entry `(a, b, c)` at `(a n^2 + b) n^2 + c`.
    pub fn partial2(&self, r: &R2Elt) -> Result<Vec<Fe>> {
        let inv = r.inv()?;
        let n2 = self.dim();
        let td = &self.td;
        let mut out = Vec::with_capacity(n2 * n2 * n2);
        for a in 0..n2 {
            for b in 0..n2 {
                for c in 0..n2 {
                    let num = &r.v[a * n2 + b] * &r.v[td.add(a, b) * n2 + c];
                    let den = &inv.v[a * n2 + td.add(b, c)] * &inv.v[b * n2 + c];
                    out.push(num * den);
                }
            }
        }
        Ok(out)
    }

    pub fn partial2_is_one(&self, r: &R2Elt) -> bool {
        self.partial2(r)
            .map(|v| v.iter().all(Fe::is_one))
            .unwrap_or(false)
    }

    /// `rho = rho^op` and `d rho = 1`.
    pub fn is_in_h(&self, r: &R2Elt) -> bool {
        *r == r.op() && self.partial2_is_one(r)
    }

    /// `rho / rho^op = e` and `d rho = 1`.
    pub fn is_in_theta_coset(&self, r: &R2Elt, e: &R2Elt) -> bool {
        let Ok(op_inv) = r.op().inv() else {
            return false;
        };
        r.mul(&op_inv) == *e && self.partial2_is_one(r)
    }

    /// `Tr(rho)(T) = sum_{T1 + T2 = T} rho(T1, T2)`.
    pub fn trace_r2(&self, r: &R2Elt) -> RElt {
        let n2 = self.dim();
        let f = r.field().clone();
        let mut v = vec![f.zero(); n2];
        for a in 0..n2 {
            for b in 0..n2 {
                let t = self.td.add(a, b);
                v[t] = &v[t] + &r.v[a * n2 + b];
            }
        }
        RElt { v }
    }

    /// `Delta(a)(T1, T2) = a(T1 + T2)`.
    pub fn comult(&self, a: &RElt) -> R2Elt {
        let n2 = self.dim();
        R2Elt {
            v: (0..n2 * n2)
                .map(|i| a.v[self.td.add(i / n2, i % n2)].clone())
                .collect(),
        }
    }

    /// `a (x) b` as a tensor.
    pub fn tensor(&self, a: &RElt, b: &RElt) -> R2Elt {
        let n2 = self.dim();
        R2Elt {
            v: (0..n2 * n2)
                .map(|i| &a.v[i / n2] * &b.v[i % n2])
                .collect(),
        }
    }

    /// `a *_rho b = Tr(rho . a (x) b)`.
    pub fn star(&self, rho: &R2Elt, a: &RElt, b: &RElt) -> RElt {
        self.trace_r2(&rho.mul(&self.tensor(a, b)))
    }

    /// `a^(S) = (1/n^2) sum_T e_n(S, T) a(T)`.
    pub fn fourier(&self, a: &RElt) -> RElt {
        let n2 = self.dim();
        let scale = self.l().from_u64(n2 as u64).inv().unwrap();
        let raw = self.fourier_ring_map(a);
        raw.scale(&scale)
    }

    /// `S -> sum_T e_n(S, T) a(T)`: the ring isomorphism `(R, +, *_1) -> R`.
    pub fn fourier_ring_map(&self, a: &RElt) -> RElt {
        let n2 = self.dim();
        RElt {
            v: (0..n2)
                .map(|s| {
                    let mut acc = self.l().zero();
                    for t in 0..n2 {
                        acc += &(&self.td.weil(s, t) * &a.v[t]);
                    }
                    acc
                })
                .collect(),
        }
    }

    /// Solves `sigma(gamma) / gamma = c` for a cocycle `c` of `Gal(L'/K)`,
    /// `L'` the field of the values of `c`.
    pub fn hilbert90(&self, c: &RElt, seed: u64) -> Result<RElt> {
        let lp = c.field().clone();
        let order = lp.degree();
        verify(order.is_multiple_of(self.l().degree()), || {
            "cocycle field does not contain L".into()
        })?;
        let mut norm = RElt::constant(&lp.one(), self.dim());
        let mut ci = c.clone();
        for _ in 0..order {
            norm = norm.mul(&ci);
            ci = self.sigma(&ci);
        }
        if norm != RElt::constant(&lp.one(), self.dim()) {
            return Err(DescentError::InvalidInput("cocycle condition fails".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..64 {
            let theta = RElt {
                v: (0..self.dim()).map(|_| lp.random(&mut rng)).collect(),
            };
            let mut acc = RElt::constant(&lp.zero(), self.dim());
            let mut coef = RElt::constant(&lp.one(), self.dim());
            let mut sig_theta = theta;
            let mut sig_c = c.clone();
            for _ in 0..order {
                acc = acc.add(&coef.mul(&sig_theta));
                coef = coef.mul(&sig_c);
                sig_c = self.sigma(&sig_c);
                sig_theta = self.sigma(&sig_theta);
            }
            if !acc.is_invertible() {
                continue;
            }
            // sigma(acc) = c^-1 acc, so invert to match sigma(gamma)/gamma = c.
            let gamma = acc.inv()?;
            verify(self.sigma(&gamma) == c.mul(&gamma), || {
                "resolvent does not split the cocycle".into()
            })?;
            return Ok(gamma);
        }
        Err(DescentError::RetryExhausted("Hilbert 90 resolvent".into()))
    }

    /// A point `Q` with `nQ = P`, over the smallest field found by factoring.
    pub fn divide_point(&self, p: &Point) -> Result<Point> {
        let curve = self.curve();
        let n = self.n();
        let Point::Affine(xp, _) = p else {
            return Ok(Point::Infinity);
        };
        let tw = self.tower();
        let xp = tw
            .to_prime(xp)
            .ok_or_else(|| DescentError::InvalidInput("point must be K-rational".into()))?;
        let div = DivisionPolys::new(curve, n);
        let (num, den) = div.mul_x(n);
        let poly = num.sub(&den.scale(&xp));
        let (g, _) = poly
            .factor()
            .into_iter()
            .min_by_key(|(g, _)| g.degree().unwrap())
            .ok_or_else(|| DescentError::Verification("no factor".into()))?;
        let d = g.degree().unwrap();
        let f = tw.field(d);
        let gx = g.map_coeffs(&f, |c| tw.embed(c, d));
        let xq = gx.roots()[0].clone();
        let rhs = curve.rhs(&xq);
        let (xq, ys) = match nth_roots(&rhs, 2) {
            r if !r.is_empty() => (xq, r),
            _ => {
                let x2 = tw.embed(&xq, 2 * d);
                let r = nth_roots(&curve.rhs(&x2), 2);
                (x2, r)
            }
        };
        let q = Point::Affine(xq, ys[0].clone());
        let nq = curve.mul(n as i64, &q);
        let target = curve.lift(p, q.degree().unwrap());
        if nq == target {
            Ok(q)
        } else if nq == curve.neg(&target) {
            Ok(curve.neg(&q))
        } else {
            Err(DescentError::Verification("division point mismatch".into()))
        }
    }

    /// The Kummer class of a `K`-rational point.
    pub fn class_from_point(&self, p: &Point, seed: u64) -> Result<DescentClass> {
        let tw = self.tower().clone();
        let curve = self.curve().clone();
        let m = self.l().degree();
        let spec = curve.point_spec(&curve.restrict(p, 1).ok_or_else(|| {
            DescentError::InvalidInput("point must be K-rational".into())
        })?);
        let q = self.divide_point(p)?;
        let dq = q.degree().unwrap_or(1);
        let mp = m / gcd(m, dq) * dq;
        let q = match q {
            Point::Infinity => Point::Infinity,
            _ => curve.lift(&q, mp),
        };
        let xi_pt = curve.sub(&q.frobenius(), &q);
        let xi = self
            .td
            .index_of(&xi_pt)
            .ok_or_else(|| DescentError::Verification("Frob(Q) - Q is not n-torsion".into()))?;
        let cocycle = Cocycle { xi, order: mp };
        verify(self.cocycle_closes(&cocycle), || "cocycle closure".into())?;
        let c = self.w(xi).lift(&tw, mp);
        let gamma = self.hilbert90(&c, seed)?;
        let rho = self
            .partial1(&gamma)?
            .restrict(&tw, m)
            .ok_or_else(|| DescentError::NotRational("d gamma".into()))?;
        let alpha = gamma
            .pow(self.n() as u64)
            .restrict(&tw, m)
            .ok_or_else(|| DescentError::NotRational("gamma^n".into()))?;
        verify(self.is_rational2(&rho) && self.is_rational(&alpha), || {
            "class is not K-rational".into()
        })?;
        Ok(DescentClass {
            rho,
            alpha: Some(alpha),
            gamma: Some(gamma),
            source: ClassSource::Point(spec),
        })
    }

    /// `sum_{i < order} Frob^i(xi) = O`.
    pub fn cocycle_closes(&self, c: &Cocycle) -> bool {
        let mut acc = 0;
        let mut x = c.xi;
        for _ in 0..c.order {
            acc = self.td.add(acc, x);
            x = self.td.frob(x);
        }
        acc == 0
    }

    /// `alpha(T) = prod_{i < n} rho(T, iT)`.
    pub fn alpha_of(&self, rho: &R2Elt) -> RElt {
        let n2 = self.dim();
        let f = rho.field().clone();
        RElt {
            v: (0..n2)
                .map(|t| {
                    let mut acc = f.one();
                    for i in 0..self.n() {
                        acc *= &rho.v[t * n2 + self.td.mul(i, t)];
                    }
                    acc
                })
                .collect(),
        }
    }

    /// `gamma` over an extension of `L` with `d gamma = rho` (requires `rho` in `H`).
    pub fn solve_partial(&self, rho: &R2Elt) -> Result<RElt> {
        verify(self.is_in_h(rho), || "rho is not in H".into())?;
        let tw = self.tower().clone();
        let n = self.n();
        let n2 = self.dim();
        let m = rho.field().degree();
        let td = &self.td;
        let (s, t) = (td.index(1, 0), td.index(0, 1));
        let alpha = self.alpha_of(rho);
        let mut found = None;
        for j in 1..=n {
            let d = m * j;
            let a_s = tw.embed(&alpha.v[s], d);
            let a_t = tw.embed(&alpha.v[t], d);
            let (rs, rt) = (nth_roots(&a_s, n as u32), nth_roots(&a_t, n as u32));
            if !rs.is_empty() && !rt.is_empty() {
                found = Some((d, rs[0].clone(), rt[0].clone()));
                break;
            }
        }
        let (d, gs, gt) =
            found.ok_or_else(|| DescentError::Verification("no n-th roots found".into()))?;
        let rho_d = rho.lift(&tw, d);
        let r = |a: usize, b: usize| rho_d.v[a * n2 + b].clone();
        let f = tw.field(d);
        let mut g = vec![f.zero(); n2];
        g[0] = r(0, 0);
        for i in 0..n {
            let idx = td.index(i, 0);
            if i > 0 {
                let prev = td.index(i - 1, 0);
                g[idx] = (&g[prev] * &gs).div_ref(&r(prev, s)).unwrap();
            }
            for j in 1..n {
                let prev = td.index(i, j - 1);
                let cur = td.index(i, j);
                g[cur] = (&g[prev] * &gt).div_ref(&r(prev, t)).unwrap();
            }
        }
        let gamma = RElt { v: g };
        verify(self.partial1(&gamma)? == rho_d, || {
            "solve_partial closure failure".into()
        })?;
        Ok(gamma)
    }

    /// A `K`-rational `eta` with `d eta = rho`, if one exists.
    pub fn boundary_witness(&self, rho: &R2Elt) -> Result<Option<RElt>> {
        let gamma = self.solve_partial(rho)?;
        let d = gamma.field().degree();
        let tw = self.tower();
        for u in 0..self.dim() {
            let cand = gamma.mul(&self.w(u).lift(tw, d));
            if self.is_rational(&cand) {
                let m = self.l().degree();
                return Ok(cand.restrict(tw, m));
            }
        }
        Ok(None)
    }

    pub fn in_boundary(&self, rho: &R2Elt) -> Result<bool> {
        Ok(self.boundary_witness(rho)?.is_some())
    }

    /// Power class of a rational unit of `R`.
    pub fn power_class(&self, a: &RElt) -> Result<PowerClass> {
        verify(self.is_rational(a) && a.is_invertible(), || {
            "power class needs a rational unit".into()
        })?;
        let tw = self.tower();
        let p = BigUint::from(tw.p());
        let n = BigUint::from(self.n());
        let comps = self
            .orbits
            .iter()
            .map(|orbit| {
                let d = orbit.len();
                let x = tw
                    .restrict(&a.v[orbit[0]], d)
                    .ok_or_else(|| DescentError::NotRational("orbit value".into()))?;
                let q1 = p.pow(d as u32) - BigUint::one();
                let g = num_integer_gcd(&q1, &n);
                Ok(x.pow(&(q1 / g)))
            })
            .collect::<Result<_>>()?;
        Ok(PowerClass { components: comps })
    }

    /// `kappa(rho)`: the power class of `alpha(T) = prod_i rho(T, iT)`.
    pub fn kappa(&self, rho: &R2Elt) -> Result<PowerClass> {
        verify(self.is_in_h(rho), || "rho is not in H".into())?;
        self.power_class(&self.alpha_of(rho))
    }

    pub fn class_spec(&self, c: &DescentClass) -> DescentClassSpec {
        DescentClassSpec {
            source: c.source.clone(),
            field_degree: c.rho.field().degree(),
            rho: c.rho.table(),
        }
    }

    pub fn class_from_spec(&self, s: &DescentClassSpec) -> Result<DescentClass> {
        let n2 = self.dim();
        let m = self.l().degree();
        if s.rho.len() != n2 * n2 {
            return Err(DescentError::InvalidInput("rho table size".into()));
        }
        let f = self.tower().field(s.field_degree);
        let rho = R2Elt {
            v: s.rho.iter().map(|c| f.from_coeffs(c)).collect(),
        };
        let rho = if s.field_degree == m {
            rho
        } else if m.is_multiple_of(s.field_degree) {
            rho.lift(self.tower(), m)
        } else {
            return Err(DescentError::InvalidInput("rho field must lie in L".into()));
        };
        if !self.is_rational2(&rho) || !self.is_in_h(&rho) {
            return Err(DescentError::InvalidInput("rho is not a rational element of H".into()));
        }
        Ok(DescentClass {
            rho,
            alpha: None,
            gamma: None,
            source: s.source.clone(),
        })
    }

    /// Trivial class `rho = 1`.
    pub fn trivial_class(&self) -> DescentClass {
        DescentClass {
            rho: self.one2(),
            alpha: Some(self.one()),
            gamma: Some(self.one()),
            source: ClassSource::Point(PointSpec::Infinity("infinity".into())),
        }
    }
}

fn trace_values(a: &RElt) -> Fe {
    let mut acc = a.field().zero();
    for x in &a.v {
        acc += x;
    }
    acc
}

fn num_integer_gcd(a: &BigUint, b: &BigUint) -> BigUint {
    let (mut a, mut b) = (a.clone(), b.clone());
    while b != BigUint::from(0u32) {
        let r = &a % &b;
        a = b;
        b = r;
    }
    a
}

/// Points of `E(K)` modulo `n E(K)`: one representative per class, by enumeration.
pub fn kummer_representatives(curve: &Curve, n: usize) -> Vec<Point> {
    let pts = curve.points_over(&curve.tower().prime());
    let multiples: std::collections::HashSet<Point> =
        pts.iter().map(|p| curve.mul(n as i64, p)).collect();
    let mut reps: Vec<Point> = Vec::new();
    let mut covered: std::collections::HashSet<Point> = std::collections::HashSet::new();
    for p in &pts {
        if covered.contains(p) {
            continue;
        }
        for m in &multiples {
            covered.insert(curve.add(p, m));
        }
        reps.push(p.clone());
    }
    reps
}
