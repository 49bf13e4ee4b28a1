//! The Hesse pencil method for `n = 3`.

use crate::blackbox::{trivialize, SplitIsomorphism};
use crate::cubic::{curve_invariants, invariants_generic, twist_scale, TernaryCubic};
use crate::elliptic::{Curve, TorsionData};
use crate::error::{verify, DescentError, Result};
use crate::etale::{Etale, PowerClass, R2Elt, RElt};
use crate::field::{Fe, Poly};
use crate::linalg::{span_basis, Matrix};
use crate::mpoly::MPoly;
use crate::theta::enveloping_algebra;

/// `M_T = sum_i r_i*(T) tau(r_i)`, over `L`, with the theta-group checks.
pub fn matrices_from_tau(et: &Etale, tau: &SplitIsomorphism) -> Result<Vec<Matrix>> {
    let tw = et.tower();
    let l = et.l().clone();
    let m = l.degree();
    let n = tau.n();
    let imgs: Vec<Matrix> = tau
        .images
        .iter()
        .map(|x| x.map(&l, |c| tw.embed(c, m)))
        .collect();
    let mats: Vec<Matrix> = (0..et.dim())
        .map(|t| {
            let mut acc = Matrix::zeros(&l, n, n);
            for (rs, img) in et.dual().iter().zip(&imgs) {
                if !rs.v[t].is_zero() {
                    acc = acc.add(&img.scale(&rs.v[t]));
                }
            }
            acc
        })
        .collect();
    check_theta_matrices(et.torsion(), &mats)?;
    Ok(mats)
}

/// `T -> [M_T]` is a homomorphism to `PGL_n` with commutators given by `e_n`.
pub fn check_theta_matrices(td: &TorsionData, mats: &[Matrix]) -> Result<()> {
    let n2 = td.size();
    let inv = mats
        .iter()
        .map(Matrix::inverse)
        .collect::<Result<Vec<_>>>()?;
    for a in 0..n2 {
        for b in 0..n2 {
            let prod = mats[a].mul(&mats[b]);
            let target = &mats[td.add(a, b)];
            verify(is_proportional(&prod, target), || {
                format!("M_{a} M_{b} is not proportional to M_(a+b)")
            })?;
            let comm = prod.mul(&inv[a]).mul(&inv[b]).as_scalar();
            verify(comm == Some(td.weil(a, b)), || {
                format!("commutator of M_{a}, M_{b} is not e_n")
            })?;
        }
    }
    Ok(())
}

fn is_proportional(a: &Matrix, b: &Matrix) -> bool {
    let (ae, be) = (a.entries(), b.entries());
    let Some(k) = be.iter().position(|x| !x.is_zero()) else {
        return a.is_zero();
    };
    let Some(c) = ae[k].div_ref(&be[k]) else {
        return false;
    };
    ae.iter().zip(be).all(|(x, y)| *x == &c * y)
}

/// `det [v, M v, M^2 v]` for `v = (x, y, z)`.
fn det_cubic(m: &Matrix) -> MPoly {
    let f = m.field().clone();
    let v: Vec<MPoly> = (0..3).map(|i| MPoly::var(&f, 3, i)).collect();
    let apply = |mat: &Matrix, w: &[MPoly]| -> Vec<MPoly> {
        (0..3)
            .map(|i| {
                let mut acc = MPoly::zero(&f, 3);
                for (j, wj) in w.iter().enumerate() {
                    acc = acc.add(&wj.scale(mat.get(i, j)));
                }
                acc
            })
            .collect()
    };
    let c1 = apply(m, &v);
    let c2 = apply(m, &c1);
    let cols = [v, c1, c2];
    let e = |r: usize, c: usize| &cols[c][r];
    let t1 = e(0, 0).mul(&e(1, 1).mul(e(2, 2)).sub(&e(1, 2).mul(e(2, 1))));
    let t2 = e(0, 1).mul(&e(1, 0).mul(e(2, 2)).sub(&e(1, 2).mul(e(2, 0))));
    let t3 = e(0, 2).mul(&e(1, 0).mul(e(2, 1)).sub(&e(1, 1).mul(e(2, 0))));
    t1.sub(&t2).add(&t3)
}

/// The nine cubics `F_i = sum_T r_i*(T) det[v, M_T v, M_T^2 v]` over `K`.
pub fn determinant_cubics(et: &Etale, mats: &[Matrix]) -> Result<Vec<TernaryCubic>> {
    let tw = et.tower();
    let l = et.l().clone();
    let dets: Vec<TernaryCubic> = mats
        .iter()
        .map(|m| TernaryCubic::from_mpoly(&det_cubic(m)))
        .collect();
    et.dual()
        .iter()
        .map(|rs| {
            let mut acc = TernaryCubic::new(&l, vec![l.zero(); 10]);
            for (t, d) in dets.iter().enumerate() {
                if !rs.v[t].is_zero() {
                    acc = acc.add(&d.scale(&rs.v[t]));
                }
            }
            acc.restrict(tw, 1)
                .ok_or_else(|| DescentError::NotRational("determinant cubic".into()))
        })
        .collect()
}

/// A basis of the span of the determinant cubics (dimension 2).
pub fn pencil_from_m(et: &Etale, mats: &[Matrix]) -> Result<[TernaryCubic; 2]> {
    let k = et.k();
    let fs = determinant_cubics(et, mats)?;
    let vecs: Vec<Vec<Fe>> = fs.iter().map(|f| f.coeffs().to_vec()).collect();
    let basis = span_basis(&k, &vecs);
    if basis.len() != 2 {
        return Err(DescentError::Verification(format!(
            "pencil has dimension {}",
            basis.len()
        )));
    }
    Ok([
        TernaryCubic::new(&k, basis[0].clone()),
        TernaryCubic::new(&k, basis[1].clone()),
    ])
}

/// `|Aut_K(E)|`.
pub fn aut_order(curve: &Curve) -> usize {
    let p = curve.p();
    if curve.a4().is_zero() && p % 3 == 1 {
        6
    } else if curve.a6().is_zero() && p % 4 == 1 {
        4
    } else {
        2
    }
}

/// Centralizer of the Frobenius matrix in `SL_2(Z/n)`.
pub fn centralizer_order(frob: &[[usize; 2]; 2], n: usize) -> usize {
    let mul = |a: &[[usize; 2]; 2], b: &[[usize; 2]; 2]| {
        let mut c = [[0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                c[i][j] = (a[i][0] * b[0][j] + a[i][1] * b[1][j]) % n;
            }
        }
        c
    };
    let mut count = 0;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let g = [[a, b], [c, d]];
                    if (a * d + n * n - (b * c) % n) % n == 1 % n && mul(&g, frob) == mul(frob, &g) {
                        count += 1;
                    }
                }
            }
        }
    }
    count
}

/// `nu_{E,n} = [Aut_K(E[n]) : Aut_K(E)]`.
pub fn nu(td: &TorsionData) -> usize {
    centralizer_order(&td.frobenius_matrix(), td.n()) / aut_order(td.curve())
}

/// Pencil members `a G1 + b G2` over `K` that are smooth, have Jacobian `E`
/// and are stabilized by every `M_T`.
pub fn select_member(
    et: &Etale,
    pencil: &[TernaryCubic; 2],
    mats: &[Matrix],
) -> Result<Vec<TernaryCubic>> {
    let k = et.k();
    let curve = et.curve();
    let (c4e, c6e) = curve_invariants(curve);
    // F_t = t G1 + G2 with coefficients in K[t]; the point (1:0) is G1.
    let coeffs: Vec<Poly> = pencil[0]
        .coeffs()
        .iter()
        .zip(pencil[1].coeffs())
        .map(|(a, b)| Poly::new(&k, vec![b.clone(), a.clone()]))
        .collect();
    let (c4, c6) = invariants_generic(&coeffs);
    let sel = c6.mul(&c6).scale(&c4e.pow_u64(3)).sub(&c4.pow(3).scale(&c6e.square()));
    let mut params: Vec<Option<Fe>> = if sel.is_zero() {
        k.elements().map(Some).collect()
    } else {
        sel.roots().into_iter().map(Some).collect()
    };
    params.push(None);
    let mut out = Vec::new();
    for t in params {
        let f = match &t {
            Some(t) => pencil[0].scale(t).add(&pencil[1]),
            None => pencil[0].clone(),
        };
        if f.is_zero() {
            continue;
        }
        let inv = f.invariants();
        if inv.disc.is_zero() || twist_scale(&inv.c4, &inv.c6, &c4e, &c6e).is_none() {
            continue;
        }
        if f.is_stabilized_by(et.tower(), mats) {
            out.push(f.normalized());
        }
    }
    out.sort_by(|a, b| a.coeffs().cmp(b.coeffs()));
    out.dedup();
    Ok(out)
}

/// Result of the Hesse method for one class.
#[derive(Clone, Debug)]
pub struct HesseOutput {
    pub tau: SplitIsomorphism,
    pub matrices: Vec<Matrix>,
    pub pencil: [TernaryCubic; 2],
    pub candidates: Vec<TernaryCubic>,
    pub nu: usize,
    pub det_class: PowerClass,
}

/// `T -> det M_T`, a rational unit of `R`.
pub fn det_element(mats: &[Matrix]) -> Result<RElt> {
    Ok(RElt {
        v: mats.iter().map(Matrix::det).collect(),
    })
}

/// Runs the Hesse method on `A_{eps rho}`.
pub fn hesse(et: &Etale, eps: &R2Elt, rho: &R2Elt, seed: u64) -> Result<HesseOutput> {
    verify(et.n() == 3, || "the Hesse method needs n = 3".into())?;
    let alg = enveloping_algebra(et, &eps.mul(rho))?;
    let tau = trivialize(&alg, seed)?;
    let matrices = matrices_from_tau(et, &tau)?;
    let pencil = pencil_from_m(et, &matrices)?;
    let candidates = select_member(et, &pencil, &matrices)?;
    let nu = nu(et.torsion());
    if candidates.len() != nu {
        return Err(DescentError::Verification(format!(
            "found {} pencil members, expected nu = {nu}",
            candidates.len()
        )));
    }
    let det_class = et.power_class(&det_element(&matrices)?)?;
    Ok(HesseOutput {
        tau,
        matrices,
        pencil,
        candidates,
        nu,
        det_class,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;

    #[test]
    fn standard_matrices_give_the_hesse_pencil() {
        // K = F_7 contains a primitive cube root of unity.
        let k = Field::prime(7);
        let z = k.from_u64(2);
        let m1 = Matrix::from_rows(
            &k,
            vec![
                vec![k.one(), k.zero(), k.zero()],
                vec![k.zero(), z.clone(), k.zero()],
                vec![k.zero(), k.zero(), z.square()],
            ],
        );
        let m2 = Matrix::from_i64(&k, &[&[0, 0, 1], &[1, 0, 0], &[0, 1, 0]]);
        let mut vecs = Vec::new();
        for i in 0..3u64 {
            for j in 0..3u64 {
                let m = m1.pow(i).mul(&m2.pow(j));
                vecs.push(TernaryCubic::from_mpoly(&det_cubic(&m)).coeffs().to_vec());
            }
        }
        let span = span_basis(&k, &vecs);
        assert_eq!(span.len(), 2);
        let fermat = vec![1u64, 0, 0, 0, 0, 0, 1, 0, 0, 1];
        let xyz = vec![0u64, 0, 0, 0, 1, 0, 0, 0, 0, 0];
        let mut all = span.clone();
        for v in [fermat, xyz] {
            all.push(v.iter().map(|&x| k.from_u64(x)).collect());
        }
        assert_eq!(span_basis(&k, &all).len(), 2);
    }

    #[test]
    fn nu_bounds() {
        assert_eq!(centralizer_order(&[[1, 0], [0, 1]], 3), 24);
        assert_eq!(centralizer_order(&[[1, 1], [0, 1]], 3), 6);
    }
}
