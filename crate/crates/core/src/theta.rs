//! The theta group of `E[n]`: translation matrices, the invariant `epsilon`,
//! enveloping algebras and the split isomorphism `tau_1`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::AlgebraK;
use crate::elliptic::{Curve, MillerFn, Point, TorsionData};
use crate::error::{verify, DescentError, Result};
use crate::etale::{Etale, R2Elt, RElt};
use crate::field::{Fe, Field};
use crate::linalg::Matrix;

/// Exponents `(a, b)` of the coordinate monomials `x^a y^b` spanning `L(n.O)`,
/// by increasing pole order with the constant last. For `n = 3`: `(x, y, 1)`.
pub fn coordinate_monomials(n: usize) -> Vec<(u32, u32)> {
    let mut out: Vec<(u32, u32)> = (2..=n as u32)
        .map(|k| if k % 2 == 0 { (k / 2, 0) } else { ((k - 3) / 2, 1) })
        .collect();
    out.push((0, 0));
    out
}

/// Projective coordinates of an affine point under the embedding by `|n.O|`.
pub fn coordinates(p: &Point, n: usize) -> Option<Vec<Fe>> {
    let (x, y) = (p.x()?, p.y()?);
    Some(
        coordinate_monomials(n)
            .into_iter()
            .map(|(a, b)| {
                let xa = x.pow_u64(a as u64);
                if b == 1 {
                    xa * y
                } else {
                    xa
                }
            })
            .collect(),
    )
}

/// `[-1]` on `P^{n-1}`: `diag(+-1)` by the parity of `y`.
pub fn iota(field: &Field, n: usize) -> Matrix {
    let mut m = Matrix::zeros(field, n, n);
    for (i, (_, b)) in coordinate_monomials(n).into_iter().enumerate() {
        m.set(i, i, if b == 1 { field.one().neg_ref() } else { field.one() });
    }
    m
}

/// `T -> M_T` for every torsion index, over `L`.
#[derive(Clone, Debug)]
pub struct TranslationMatrices {
    n: usize,
    mats: Vec<Matrix>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TranslationMatricesSpec {
    pub n: usize,
    pub field_degree: usize,
    /// Row-major entries per torsion index.
    pub matrices: Vec<Vec<Vec<u64>>>,
}

impl TranslationMatrices {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, t: usize) -> &Matrix {
        &self.mats[t]
    }

    pub fn all(&self) -> &[Matrix] {
        &self.mats
    }

    /// The scalar `M_S M_T M_S^-1 M_T^-1`.
    pub fn commutator(&self, s: usize, t: usize) -> Result<Fe> {
        let (ms, mt) = (&self.mats[s], &self.mats[t]);
        ms.mul(mt)
            .mul(&ms.inverse()?)
            .mul(&mt.inverse()?)
            .as_scalar()
            .ok_or_else(|| DescentError::Verification("commutator is not scalar".into()))
    }

    pub fn spec(&self) -> TranslationMatricesSpec {
        TranslationMatricesSpec {
            n: self.n,
            field_degree: self.mats[0].field().degree(),
            matrices: self
                .mats
                .iter()
                .map(|m| m.entries().iter().map(Fe::to_u64_vec).collect())
                .collect(),
        }
    }
}

/// Rescales `M` so that `iota M iota M = I` and `M^n = I`.
fn normalize(m: &Matrix, iota: &Matrix, n: usize) -> Result<Matrix> {
    let c = iota
        .mul(m)
        .mul(iota)
        .mul(m)
        .as_scalar()
        .ok_or_else(|| DescentError::Verification("iota M iota M is not scalar".into()))?;
    let d = m
        .pow(n as u64)
        .as_scalar()
        .ok_or_else(|| DescentError::Verification("M^n is not scalar".into()))?;
    let lambda = c.pow_u64((n as u64 - 1) / 2).div_ref(&d).unwrap();
    Ok(m.scale(&lambda))
}

/// Degree of a multiple of `m` with at least `min` elements.
fn sampling_degree(p: u64, m: usize, min: u64) -> usize {
    let mut d = m;
    while (p as f64).powi(d as i32) < min as f64 {
        d += m;
    }
    d
}

/// Interpolates the projective matrix of translation by `s` on the embedded curve.
fn interpolate(curve: &Curve, s: &Point, n: usize, big: &Field, rng: &mut ChaCha8Rng) -> Result<Matrix> {
    let s = curve.lift(s, big.degree());
    let mut rows: Vec<Vec<Fe>> = Vec::new();
    let mut samples = 0;
    for _ in 0..8 {
        while samples < n * n + 4 {
            let p = curve.random_point(big, rng);
            let q = curve.add(&p, &s);
            let (Some(v), Some(w)) = (coordinates(&p, n), coordinates(&q, n)) else {
                continue;
            };
            for a in 0..n {
                for b in (a + 1)..n {
                    // w_a (Mv)_b - w_b (Mv)_a = 0
                    let mut row = vec![big.zero(); n * n];
                    for c in 0..n {
                        row[b * n + c] = &w[a] * &v[c];
                        row[a * n + c] = (&w[b] * &v[c]).neg_ref();
                    }
                    rows.push(row);
                }
            }
            samples += 1;
        }
        let ns = Matrix::from_rows(big, rows.clone()).nullspace();
        if ns.len() == 1 {
            return Ok(Matrix::from_vec(big, n, n, ns[0].clone()));
        }
        samples = 0;
    }
    Err(DescentError::RetryExhausted("translation matrix interpolation".into()))
}

/// Normalized translation matrices for odd `n`.
pub fn translation_matrices(td: &TorsionData, seed: u64) -> Result<TranslationMatrices> {
    let n = td.n();
    if n.is_multiple_of(2) {
        return Err(DescentError::Unsupported(
            "translation matrices are normalized for odd n only".into(),
        ));
    }
    let curve = td.curve();
    let tw = curve.tower();
    let m = td.m();
    let big = tw.field(sampling_degree(tw.p(), m, 500));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let iota_big = iota(&big, n);
    let (s, t) = (td.index(1, 0), td.index(0, 1));
    let ms = normalize(&interpolate(curve, td.point(s), n, &big, &mut rng)?, &iota_big, n)?;
    let mt = normalize(&interpolate(curve, td.point(t), n, &big, &mut rng)?, &iota_big, n)?;
    let l = td.field();
    let mut mats = vec![Matrix::identity(l, n); td.size()];
    let mut msi = Matrix::identity(&big, n);
    for i in 0..n {
        let mut acc = msi.clone();
        for j in 0..n {
            let norm = normalize(&acc, &iota_big, n)?;
            let entries = norm
                .entries()
                .iter()
                .map(|x| tw.restrict(x, m))
                .collect::<Option<Vec<Fe>>>()
                .ok_or_else(|| DescentError::NotRational("M_T is not defined over L".into()))?;
            mats[td.index(i, j)] = Matrix::from_vec(l, n, n, entries);
            acc = acc.mul(&mt);
        }
        msi = msi.mul(&ms);
    }
    Ok(TranslationMatrices { n, mats })
}

/// `+1` when `M_S M_T M_S^-1 M_T^-1 = e_n(S, T)`, `-1` for the inverse.
pub fn pairing_orientation(td: &TorsionData, tm: &TranslationMatrices) -> Result<i32> {
    let (s, t) = (td.index(1, 0), td.index(0, 1));
    let c = tm.commutator(s, t)?;
    let e = td.weil(s, t);
    if c == e {
        Ok(1)
    } else if c == e.inv().unwrap() {
        Ok(-1)
    } else {
        Err(DescentError::Verification("commutator is not the Weil pairing".into()))
    }
}

/// `M_{T1} M_{T2} = epsilon(T1, T2) M_{T1 + T2}`.
pub fn epsilon_from_m(td: &TorsionData, tm: &TranslationMatrices) -> Result<R2Elt> {
    let n2 = td.size();
    let mut v = Vec::with_capacity(n2 * n2);
    for a in 0..n2 {
        for b in 0..n2 {
            let lhs = tm.get(a).mul(tm.get(b));
            let rhs = tm.get(td.add(a, b));
            let e = proportionality(&lhs, rhs)
                .ok_or_else(|| DescentError::Verification("M products are not proportional".into()))?;
            v.push(e);
        }
    }
    Ok(R2Elt { v })
}

/// `c` with `a = c b`, if any.
fn proportionality(a: &Matrix, b: &Matrix) -> Option<Fe> {
    let (ae, be) = (a.entries(), b.entries());
    let k = be.iter().position(|x| !x.is_zero())?;
    let c = ae[k].div_ref(&be[k])?;
    ae.iter().zip(be).all(|(x, y)| *x == &c * y).then_some(c)
}

/// Normalized Miller functions `F_T`, indexed like the torsion points.
pub fn miller_functions(td: &TorsionData) -> Result<Vec<MillerFn>> {
    td.points()
        .iter()
        .map(|t| MillerFn::new(td.curve(), t, td.n()))
        .collect()
}

/// `epsilon(T1, T2) = F_{T1+T2}(P) / (F_{T1}(P) F_{T2}(P - T1))`, checked at two points.
pub fn epsilon_from_f(td: &TorsionData, seed: u64) -> Result<R2Elt> {
    let curve = td.curve();
    let tw = curve.tower();
    let m = td.m();
    let big = tw.field(sampling_degree(tw.p(), m, 500));
    let fs = miller_functions(td)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n2 = td.size();
    let mut v = Vec::with_capacity(n2 * n2);
    for a in 0..n2 {
        for b in 0..n2 {
            let ta = curve.lift(td.point(a), big.degree());
            let eval = |p: &Point| -> Result<Fe> {
                let num = fs[td.add(a, b)].eval(curve, p)?;
                let d1 = fs[a].eval(curve, p)?;
                let d2 = fs[b].eval(curve, &curve.sub(p, &ta))?;
                let f = num.field().degree().max(d1.field().degree()).max(d2.field().degree());
                let (num, d1, d2) = (tw.embed(&num, f), tw.embed(&d1, f), tw.embed(&d2, f));
                Ok(num.div_ref(&(d1 * d2)).unwrap())
            };
            let mut vals = Vec::new();
            for _ in 0..64 {
                let p = curve.random_point(&big, &mut rng);
                if let Ok(x) = eval(&p) {
                    vals.push(x);
                    if vals.len() == 2 {
                        break;
                    }
                }
            }
            verify(vals.len() == 2 && vals[0] == vals[1], || {
                "Miller quotient is not constant".into()
            })?;
            let e = tw
                .restrict(&vals[0], m)
                .ok_or_else(|| DescentError::NotRational("epsilon value".into()))?;
            v.push(e);
        }
    }
    Ok(R2Elt { v })
}

/// `(R, +, *_rho)`, associative when `d rho = 1`.
pub fn enveloping_algebra(et: &Etale, rho: &R2Elt) -> Result<AlgebraK> {
    verify(rho.is_invertible() && et.is_rational2(rho), || {
        "twist must be a rational unit".into()
    })?;
    verify(et.partial2_is_one(rho), || "d rho is not 1".into())?;
    AlgebraK::from_twisted_product(et, rho)
}

/// `tau_1(x)_{ij} = tr(x M_ij)`, stored as the images of the basis `r_k`.
#[derive(Clone, Debug)]
pub struct Tau1 {
    pub images: Vec<Matrix>,
}

impl Tau1 {
    pub fn apply(&self, coords: &[Fe]) -> Matrix {
        let f = self.images[0].field().clone();
        let n = self.images[0].rows();
        let mut acc = Matrix::zeros(&f, n, n);
        for (c, m) in coords.iter().zip(&self.images) {
            if !c.is_zero() {
                acc = acc.add(&m.scale(c));
            }
        }
        acc
    }

    /// Homomorphism check on all basis products, unit check and surjectivity.
    pub fn verify(&self, alg: &AlgebraK) -> Result<()> {
        let d = alg.dim();
        for i in 0..d {
            for j in 0..d {
                let prod = alg.mul(&alg.basis_vec(i), &alg.basis_vec(j));
                verify(self.apply(&prod) == self.images[i].mul(&self.images[j]), || {
                    format!("tau_1 fails on basis pair ({i}, {j})")
                })?;
            }
        }
        let n = self.images[0].rows();
        verify(self.apply(&alg.one()) == Matrix::identity(alg.field(), n), || {
            "tau_1 is not unital".into()
        })?;
        let stacked = Matrix::from_cols(
            alg.field(),
            &self.images.iter().map(Matrix::to_vec).collect::<Vec<_>>(),
        );
        verify(stacked.rank() == d, || "tau_1 is not bijective".into())
    }
}

pub fn tau1(et: &Etale, tm: &TranslationMatrices) -> Result<Tau1> {
    let n = tm.n();
    let n2 = et.dim();
    let entry_fns: Vec<RElt> = (0..n * n)
        .map(|ij| RElt {
            v: (0..n2).map(|t| tm.get(t).entries()[ij].clone()).collect(),
        })
        .collect();
    let k = et.k();
    let images = et
        .basis()
        .iter()
        .map(|r| {
            let entries = entry_fns
                .iter()
                .map(|mij| et.trace(&r.mul(mij)))
                .collect::<Result<Vec<_>>>()?;
            Ok(Matrix::from_vec(&k, n, n, entries))
        })
        .collect::<Result<_>>()?;
    Ok(Tau1 { images })
}

/// The `K`-linear map `z -> gamma z` from `A_{rho1}` to `A_{rho2}` (matrix on
/// coordinates), for `rho1 = rho2 d(gamma)`; verified on basis products.
pub fn gauge_transform(
    et: &Etale,
    a1: &AlgebraK,
    a2: &AlgebraK,
    rho1: &R2Elt,
    rho2: &R2Elt,
    gamma: &RElt,
) -> Result<Matrix> {
    verify(et.is_rational(gamma) && gamma.is_invertible(), || {
        "gauge must be a rational unit".into()
    })?;
    verify(*rho1 == rho2.mul(&et.partial1(gamma)?), || {
        "rho1 != rho2 d(gamma)".into()
    })?;
    let cols = et
        .basis()
        .iter()
        .map(|r| et.coords(&gamma.mul(r)))
        .collect::<Result<Vec<_>>>()?;
    let g = Matrix::from_cols(&et.k(), &cols);
    let d = a1.dim();
    for i in 0..d {
        for j in 0..d {
            let lhs = g.mul_vec(&a1.mul(&a1.basis_vec(i), &a1.basis_vec(j)));
            let rhs = a2.mul(&g.col(i), &g.col(j));
            verify(lhs == rhs, || "gauge map is not multiplicative".into())?;
        }
    }
    verify(g.rank() == d, || "gauge map is not bijective".into())?;
    Ok(g)
}

/// Recovers `rho'` from `delta_{T1} * delta_{T2} = rho'(T1, T2) delta_{T1+T2}` in `A (x) L`.
pub fn verify_inv2(et: &Etale, alg: &AlgebraK) -> R2Elt {
    let n2 = et.dim();
    let l = et.l().clone();
    let m = l.degree();
    let tw = et.tower();
    let c: Vec<Fe> = alg.structure_constants().iter().map(|x| tw.embed(x, m)).collect();
    let (basis, dual) = (et.basis(), et.dual());
    let mut v = Vec::with_capacity(n2 * n2);
    for a in 0..n2 {
        for b in 0..n2 {
            let s = et.torsion().add(a, b);
            let mut acc = l.zero();
            for i in 0..n2 {
                let di = &dual[i].v[a];
                if di.is_zero() {
                    continue;
                }
                for j in 0..n2 {
                    let dj = &dual[j].v[b];
                    if dj.is_zero() {
                        continue;
                    }
                    let w = di * dj;
                    for k in 0..n2 {
                        let ck = &c[(i * n2 + j) * n2 + k];
                        if !ck.is_zero() {
                            acc += &(&w * &(ck * &basis[k].v[s]));
                        }
                    }
                }
            }
            v.push(acc);
        }
    }
    R2Elt { v }
}

/// `prod_{i < n} rho(T, iT)`, the first invariant of a theta group.
pub fn inv1(et: &Etale, rho: &R2Elt) -> RElt {
    et.alpha_of(rho)
}
