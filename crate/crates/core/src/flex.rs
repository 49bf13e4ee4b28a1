//! The flex algebra method: a change of coordinates over `F = (R, +, *_rho)`
//! carrying `E` to the covering curve.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::AlgebraK;
use crate::blackbox::{trivialize, SplitIsomorphism, RETRY_BUDGET};
use crate::cubic::TernaryCubic;
use crate::elliptic::Curve;
use crate::error::{verify, DescentError, Result};
use crate::etale::{Etale, R2Elt};
use crate::field::Fe;
use crate::linalg::Matrix;
use crate::mpoly::MPoly;
use crate::theta::{enveloping_algebra, Tau1};

/// `n x n` matrix with entries in a commutative `K`-algebra, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgMatrix {
    pub n: usize,
    pub entries: Vec<Vec<Fe>>,
}

impl AlgMatrix {
    pub fn get(&self, i: usize, j: usize) -> &[Fe] {
        &self.entries[i * self.n + j]
    }

    pub fn mul(&self, alg: &AlgebraK, o: &AlgMatrix) -> AlgMatrix {
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = alg.zero();
                for k in 0..n {
                    acc = alg.add(&acc, &alg.mul(self.get(i, k), o.get(k, j)));
                }
                entries.push(acc);
            }
        }
        AlgMatrix { n, entries }
    }

    /// A `K`-matrix viewed over the algebra.
    pub fn from_k(alg: &AlgebraK, m: &Matrix) -> AlgMatrix {
        let one = alg.one();
        AlgMatrix {
            n: m.rows(),
            entries: m.entries().iter().map(|c| alg.scale(&one, c)).collect(),
        }
    }

    /// Determinant for `n <= 3` (cofactor expansion, commutative algebra).
    pub fn det(&self, alg: &AlgebraK) -> Vec<Fe> {
        let m = |i: usize, j: usize| self.get(i, j).to_vec();
        match self.n {
            1 => m(0, 0),
            2 => alg.sub(&alg.mul(&m(0, 0), &m(1, 1)), &alg.mul(&m(0, 1), &m(1, 0))),
            3 => {
                let minor = |a: usize, b: usize, c: usize, d: usize| {
                    alg.sub(&alg.mul(&m(1, a), &m(2, b)), &alg.mul(&m(1, c), &m(2, d)))
                };
                let t1 = alg.mul(&m(0, 0), &minor(1, 2, 2, 1));
                let t2 = alg.mul(&m(0, 1), &minor(0, 2, 2, 0));
                let t3 = alg.mul(&m(0, 2), &minor(0, 1, 1, 0));
                alg.add(&alg.sub(&t1, &t2), &t3)
            }
            _ => unimplemented!("determinants over F for n > 3"),
        }
    }
}

pub fn is_unit(alg: &AlgebraK, x: &[Fe]) -> bool {
    alg.left_matrix(x).rank() == alg.dim()
}

/// The flex algebra `F = (R, +, *_rho)`, commutative for `rho` in `H`.
pub fn flex_algebra(et: &Etale, rho: &R2Elt) -> Result<AlgebraK> {
    verify(*rho == rho.op(), || "rho is not symmetric".into())?;
    let f = enveloping_algebra(et, rho)?;
    verify(f.is_commutative(), || "flex algebra is not commutative".into())?;
    Ok(f)
}

/// The primitive idempotents of a commutative semisimple algebra, split off by
/// the minimal polynomials of random elements until every corner is a field.
pub fn primitive_idempotents(f: &AlgebraK, seed: u64) -> Result<Vec<Vec<Fe>>> {
    let k = f.field().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pending = vec![f.one()];
    let mut fields = Vec::new();
    for _ in 0..RETRY_BUDGET {
        let Some(e) = pending.pop() else {
            break;
        };
        let (c, basis) = f.corner(&e)?;
        let bm = Matrix::from_cols(&k, &basis);
        let x = c.random(&mut rng);
        let mp = c.min_poly(&x);
        let factors = mp.factor();
        if factors.len() == 1 && factors[0].1 == 1 && mp.degree() == Some(c.dim()) {
            fields.push(e);
            continue;
        }
        if factors.len() == 1 {
            pending.push(e);
            continue;
        }
        for (g, m) in &factors {
            let q1 = g.pow(*m as u32);
            let q2 = mp.div_exact(&q1);
            let (_, _, t) = q1.xgcd(&q2);
            let h = t.mul(&q2).rem(&mp);
            pending.push(bm.mul_vec(&c.poly_eval(&h, &x)));
        }
    }
    verify(pending.is_empty(), || "flex algebra did not split into fields".into())?;
    fields.sort();
    Ok(fields)
}

/// `tau'(x) = sum_i tau_1(r_i* x) (x) w_i`, for `x` given as an element of `R`.
pub fn tau_prime(et: &Etale, tau1: &Tau1, x_coords: &[Fe]) -> Result<AlgMatrix> {
    let x = et.from_coords(x_coords);
    let n = tau1.images[0].rows();
    let d = et.dim();
    let k = et.k();
    let mut entries = vec![vec![k.zero(); d]; n * n];
    for (i, rs) in et.dual().iter().enumerate() {
        let m = tau1.apply(&et.coords(&rs.mul(&x))?);
        for (e, c) in entries.iter_mut().zip(m.entries()) {
            e[i] = c.clone();
        }
    }
    Ok(AlgMatrix { n, entries })
}

/// All `X` over `alg` with `X tau(r_i) = tau'(r_i) X`, as a `K`-basis.
pub fn intertwiner_space(alg: &AlgebraK, tau_p: &[AlgMatrix], tau: &[Matrix]) -> Vec<AlgMatrix> {
    let k = alg.field().clone();
    let n = tau[0].rows();
    let d = alg.dim();
    let var = |a: usize, c: usize, s: usize| (a * n + c) * d + s;
    let nv = n * n * d;
    let mut rows = Vec::new();
    for (tp, t) in tau_p.iter().zip(tau) {
        let lm: Vec<Matrix> = tp.entries.iter().map(|e| alg.left_matrix(e)).collect();
        for a in 0..n {
            for b in 0..n {
                // sum_c X_ac t_cb - sum_c tp_ac X_cb = 0, per coordinate s
                for s in 0..d {
                    let mut row = vec![k.zero(); nv];
                    for c in 0..n {
                        row[var(a, c, s)] += t.get(c, b);
                        let l = &lm[a * n + c];
                        for u in 0..d {
                            row[var(c, b, u)] -= l.get(s, u);
                        }
                    }
                    rows.push(row);
                }
            }
        }
    }
    Matrix::from_rows(&k, rows)
        .nullspace()
        .into_iter()
        .map(|v| AlgMatrix {
            n,
            entries: v.chunks(d).map(<[Fe]>::to_vec).collect(),
        })
        .collect()
}

/// A polynomial with coefficients in `alg`, stored as one `K`-polynomial per basis vector.
#[derive(Clone, Debug)]
struct AlgPoly {
    comps: Vec<MPoly>,
}

impl AlgPoly {
    fn mul(&self, alg: &AlgebraK, o: &AlgPoly) -> AlgPoly {
        let d = alg.dim();
        let k = alg.field();
        let nv = self.comps[0].nvars();
        let mut comps = vec![MPoly::zero(k, nv); d];
        for i in 0..d {
            if self.comps[i].is_zero() {
                continue;
            }
            for j in 0..d {
                if o.comps[j].is_zero() {
                    continue;
                }
                let pq = self.comps[i].mul(&o.comps[j]);
                for (l, comp) in comps.iter_mut().enumerate() {
                    let c = alg.constant(i, j, l);
                    if !c.is_zero() {
                        *comp = comp.add(&pq.scale(c));
                    }
                }
            }
        }
        AlgPoly { comps }
    }

    fn add(&self, o: &AlgPoly) -> AlgPoly {
        AlgPoly {
            comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a.add(b)).collect(),
        }
    }

    fn scale(&self, s: &Fe) -> AlgPoly {
        AlgPoly {
            comps: self.comps.iter().map(|a| a.scale(s)).collect(),
        }
    }
}

/// `f(B v)` for the Weierstrass cubic `f`, expanded over the basis of `alg`;
/// returns the common cubic (all components are proportional).
pub fn transform_equations(alg: &AlgebraK, curve: &Curve, b: &AlgMatrix) -> Result<TernaryCubic> {
    verify(b.n == 3, || "plane cubic output needs n = 3".into())?;
    let k = alg.field().clone();
    let d = alg.dim();
    let forms: Vec<AlgPoly> = (0..3)
        .map(|r| AlgPoly {
            comps: (0..d)
                .map(|s| {
                    let coeffs: Vec<Fe> = (0..3).map(|c| b.get(r, c)[s].clone()).collect();
                    MPoly::linear(&k, &coeffs)
                })
                .collect(),
        })
        .collect();
    let (x, y, z) = (&forms[0], &forms[1], &forms[2]);
    let z2 = z.mul(alg, z);
    let f = y
        .mul(alg, y)
        .mul(alg, z)
        .add(&x.mul(alg, x).mul(alg, x).scale(&k.one().neg_ref()))
        .add(&x.mul(alg, &z2).scale(&curve.a4().neg_ref()))
        .add(&z2.mul(alg, z).scale(&curve.a6().neg_ref()));
    let cubics: Vec<TernaryCubic> = f
        .comps
        .iter()
        .map(TernaryCubic::from_mpoly)
        .filter(|c| !c.is_zero())
        .collect();
    let first = cubics
        .first()
        .ok_or_else(|| DescentError::Verification("f(Bv) vanishes".into()))?;
    verify(cubics.iter().all(|c| c.proportional(first).is_some()), || {
        "components of f(Bv) are not proportional".into()
    })?;
    Ok(first.normalized())
}

/// Output of the flex method.
#[derive(Clone, Debug)]
pub struct FlexOutput {
    pub algebra: AlgebraK,
    pub tau: SplitIsomorphism,
    pub b: AlgMatrix,
    pub cubic: TernaryCubic,
}

/// Solves for `B` with `tau'(x) = B tau(x) B^-1` and a unit determinant.
pub fn solve_b(
    alg: &AlgebraK,
    tau_p: &[AlgMatrix],
    tau: &[Matrix],
    rng: &mut ChaCha8Rng,
) -> Result<AlgMatrix> {
    let space = intertwiner_space(alg, tau_p, tau);
    verify(space.len() == alg.dim(), || {
        format!(
            "intertwiner space has K-dimension {}, expected {}",
            space.len(),
            alg.dim()
        )
    })?;
    let k = alg.field().clone();
    let n = tau[0].rows();
    for _ in 0..64 {
        let coeffs: Vec<Fe> = space.iter().map(|_| k.random(rng)).collect();
        let mut entries = vec![alg.zero(); n * n];
        for (c, x) in coeffs.iter().zip(&space) {
            for (e, xe) in entries.iter_mut().zip(&x.entries) {
                *e = alg.add(e, &alg.scale(xe, c));
            }
        }
        let b = AlgMatrix { n, entries };
        if is_unit(alg, &b.det(alg)) {
            for (tp, t) in tau_p.iter().zip(tau) {
                let lhs = b.mul(alg, &AlgMatrix::from_k(alg, t));
                verify(lhs == tp.mul(alg, &b), || "B does not intertwine".into())?;
            }
            return Ok(b);
        }
    }
    Err(DescentError::RetryExhausted("no invertible intertwiner".into()))
}

/// Steps of the flex method for `rho` in `H` (with `epsilon` from the same `M` as `tau1`).
pub fn flex(et: &Etale, eps: &R2Elt, tau1: &Tau1, rho: &R2Elt, seed: u64) -> Result<FlexOutput> {
    let f = flex_algebra(et, rho)?;
    let a = enveloping_algebra(et, &eps.mul(rho))?;
    let tau = trivialize(&a, seed)?;
    let d = et.dim();
    let tau_p = (0..d)
        .map(|i| tau_prime(et, tau1, &a.basis_vec(i)))
        .collect::<Result<Vec<_>>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let b = solve_b(&f, &tau_p, &tau.images, &mut rng)?;
    let cubic = transform_equations(&f, et.curve(), &b)?;
    Ok(FlexOutput {
        algebra: f,
        tau,
        b,
        cubic,
    })
}

/// The same computation over the component `eF` of a primitive idempotent `e`.
pub fn flex_component(
    et: &Etale,
    out: &FlexOutput,
    tau1: &Tau1,
    e: &[Fe],
    seed: u64,
) -> Result<TernaryCubic> {
    let f = &out.algebra;
    let (c, basis) = f.corner(e)?;
    let k = f.field().clone();
    let bm = Matrix::from_cols(&k, &basis);
    let project = |x: &[Fe]| -> Result<Vec<Fe>> {
        bm.solve(&f.mul(e, x))
            .ok_or_else(|| DescentError::Linear("projection onto component".into()))
    };
    let d = et.dim();
    let tau_p = (0..d)
        .map(|i| {
            let t = tau_prime(et, tau1, &f.basis_vec(i))?;
            Ok(AlgMatrix {
                n: t.n,
                entries: t.entries.iter().map(|x| project(x)).collect::<Result<_>>()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = solve_b(&c, &tau_p, &out.tau.images, &mut rng)?;
    transform_equations(&c, et.curve(), &b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::etale::kummer_representatives;
    use crate::pipeline::Setup;
    use crate::theta::tau1;

    #[test]
    fn each_component_gives_the_same_cubic() {
        for (p, a4, a6) in [(7, 3, 2), (13, 2, 5), (11, 1, 3)] {
            let s = Setup::new(p, a4, a6, 3, 1).unwrap();
            let et = &s.etale;
            let t1 = tau1(et, s.translations.as_ref().unwrap()).unwrap();
            for pt in kummer_representatives(&s.curve, 3) {
                let rho = et.class_from_point(&pt, 0).unwrap().rho;
                let out = flex(et, &s.epsilon, &t1, &rho, 0).unwrap();
                let idems = primitive_idempotents(&out.algebra, 5).unwrap();
                let one = idems
                    .iter()
                    .fold(out.algebra.zero(), |acc, e| out.algebra.add(&acc, e));
                assert_eq!(one, out.algebra.one());
                for e in &idems {
                    let c = flex_component(et, &out, &t1, e, 2).unwrap();
                    assert!(c.proportional(&out.cubic).is_some(), "p={p}");
                }
            }
        }
    }

    #[test]
    fn component_degrees_follow_the_divided_point() {
        let s = Setup::new(13, 2, 5, 3, 1).unwrap();
        let et = &s.etale;
        let curve = &s.curve;
        let tw = curve.tower();
        for pt in kummer_representatives(curve, 3) {
            let rho = et.class_from_point(&pt, 0).unwrap().rho;
            let f = flex_algebra(et, &rho).unwrap();
            let mut degrees: Vec<usize> = primitive_idempotents(&f, 1)
                .unwrap()
                .iter()
                .map(|e| f.corner(e).unwrap().0.dim())
                .collect();
            degrees.sort();
            // Oracle: Frobenius orbit sizes on the points Q + T with 3Q = P.
            let q = et.divide_point(&pt).unwrap();
            let dq = q.degree().unwrap_or(1);
            let m = et.l().degree();
            let big = dq * m / crate::field::gcd(dq, m);
            let ql = curve.lift(&q, big);
            assert_eq!(curve.mul(3, &ql), curve.lift(&pt, big));
            let lcm = |a: usize, b: usize| a * b / crate::field::gcd(a, b);
            let mut counts = std::collections::BTreeMap::new();
            for t in et.torsion().points() {
                let r = curve.add(&ql, &curve.lift(t, big));
                let d = match &r {
                    crate::elliptic::Point::Infinity => 1,
                    crate::elliptic::Point::Affine(x, y) => lcm(tw.min_degree(x), tw.min_degree(y)),
                };
                *counts.entry(d).or_insert(0usize) += 1;
            }
            let mut orbit_degrees: Vec<usize> = counts
                .iter()
                .flat_map(|(&d, &c)| std::iter::repeat_n(d, c / d))
                .collect();
            orbit_degrees.sort();
            assert_eq!(degrees, orbit_degrees);
        }
    }
}
