//! The Segre embedding method: quadrics of types 1 and 2 cutting out the
//! covering curve in `P^{n^2 - 1}`, and the projection to a plane cubic (`n = 3`).

use serde::{Deserialize, Serialize};

use crate::blackbox::{trivialize, SplitIsomorphism};
use crate::cubic::TernaryCubic;
use crate::error::{verify, DescentError, Result};
use crate::etale::{Etale, R2Elt, RElt};
use crate::field::{Fe, Field, Tower};
use crate::hesse::matrices_from_tau;
use crate::linalg::{span_basis, Matrix};
use crate::mpoly::{monomials, MPoly};
use crate::theta::enveloping_algebra;

/// Quadratic forms in `n^2` variables, as coefficient vectors on `monomials(n^2, 2)`.
#[derive(Clone, Debug)]
pub struct QuadricSystem {
    pub nvars: usize,
    pub type1: Vec<Vec<Fe>>,
    pub type2: Vec<Vec<Fe>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct QuadricSystemSpec {
    pub nvars: usize,
    /// Symmetric coefficient matrices (off-diagonal entries hold half the cross term).
    pub type1: Vec<Vec<Vec<u64>>>,
    pub type2: Vec<Vec<Vec<u64>>>,
}

/// `(d1, d2)` predicted for `n`.
pub fn expected_dims(n: usize) -> (usize, usize) {
    let n2 = n * n;
    if n % 2 == 1 {
        ((n2 - 3) / 2, (n2 - 1) * (n2 - 3) / 2)
    } else {
        (n2 / 2, n2 * (n2 - 4) / 2)
    }
}

impl QuadricSystem {
    pub fn all(&self) -> Vec<Vec<Fe>> {
        self.type1.iter().chain(&self.type2).cloned().collect()
    }

    pub fn polys(&self) -> Vec<MPoly> {
        let mons = monomials(self.nvars, 2);
        self.all()
            .iter()
            .map(|c| MPoly::from_coeffs(c[0].field(), self.nvars, &mons, c))
            .collect()
    }

    pub fn spec(&self) -> QuadricSystemSpec {
        let mons = monomials(self.nvars, 2);
        let sym = |c: &Vec<Fe>| -> Vec<Vec<u64>> {
            let k = c[0].field();
            let half = k.from_u64(2).inv().unwrap();
            let mut m = vec![vec![0u64; self.nvars]; self.nvars];
            for (mon, v) in mons.iter().zip(c) {
                let idx: Vec<usize> = mon
                    .iter()
                    .enumerate()
                    .flat_map(|(i, &e)| std::iter::repeat_n(i, e as usize))
                    .collect();
                let (i, j) = (idx[0], idx[1]);
                if i == j {
                    m[i][i] = v.constant();
                } else {
                    let h = (v * &half).constant();
                    m[i][j] = h;
                    m[j][i] = h;
                }
            }
            m
        };
        QuadricSystemSpec {
            nvars: self.nvars,
            type1: self.type1.iter().map(sym).collect(),
            type2: self.type2.iter().map(sym).collect(),
        }
    }
}

/// `z(T) = sum_i r_i(T) z_i`, as coefficient vectors over `L`.
fn z_forms(et: &Etale) -> Vec<Vec<Fe>> {
    (0..et.dim())
        .map(|t| et.basis().iter().map(|r| r.v[t].clone()).collect())
        .collect()
}

fn product(l: &Field, a: &[Fe], b: &[Fe], mons: &[Vec<u32>]) -> Vec<Fe> {
    MPoly::linear(l, a).mul(&MPoly::linear(l, b)).coeffs_on(mons)
}

fn lin(a: &[Fe], ca: &Fe, b: &[Fe], cb: &Fe) -> Vec<Fe> {
    a.iter().zip(b).map(|(x, y)| &(x * ca) + &(y * cb)).collect()
}

/// A `K`-basis of a Galois-stable span over `L` (the reduced echelon basis is rational).
fn descend(tower: &Tower, gens: &[Vec<Fe>], k: &Field) -> Result<Vec<Vec<Fe>>> {
    if gens.is_empty() {
        return Ok(vec![]);
    }
    let l = gens[0][0].field().clone();
    let (r, piv) = Matrix::from_rows(&l, gens.to_vec()).rref();
    (0..piv.len())
        .map(|i| {
            r.row(i)
                .iter()
                .map(|x| tower.restrict(x, k.degree()))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| DescentError::NotRational("quadric span is not Galois stable".into()))
        })
        .collect()
}

/// Differences of `(x - x(T)) z(0)^2 - rho(T, -T) z(T) z(-T)` over `T != O`.
pub fn type1_quadrics(et: &Etale, rho: &R2Elt) -> Result<Vec<Vec<Fe>>> {
    let td = et.torsion();
    let l = et.l().clone();
    let n2 = et.dim();
    let mons = monomials(n2, 2);
    let z = z_forms(et);
    let z00 = product(&l, &z[0], &z[0], &mons);
    let q = |t: usize| -> Vec<Fe> {
        let x = td.point(t).x().unwrap().clone();
        let zz = product(&l, &z[t], &z[td.neg(t)], &mons);
        lin(&z00, &x.neg_ref(), &zz, &rho.v[t * n2 + td.neg(t)].neg_ref())
    };
    let q0 = q(1);
    let gens: Vec<Vec<Fe>> = (2..n2)
        .map(|t| lin(&q(t), &l.one(), &q0, &l.one().neg_ref()))
        .collect();
    let out = descend(et.tower(), &gens, &et.k())?;
    let d1 = expected_dims(et.n()).0;
    verify(out.len() == d1, || format!("type 1 span has dimension {}, expected {d1}", out.len()))?;
    Ok(out)
}

/// Differences of `(lambda_T - lambda(T1, T2)) z(0) z(T) - rho(T1, T2) z(T1) z(T2)`
/// over pairs with the same `T = T1 + T2`.
pub fn type2_quadrics(et: &Etale, rho: &R2Elt) -> Result<Vec<Vec<Fe>>> {
    let td = et.torsion();
    let curve = et.curve();
    let l = et.l().clone();
    let n2 = et.dim();
    let mons = monomials(n2, 2);
    let z = z_forms(et);
    let mut gens = Vec::new();
    for t in 1..n2 {
        let z0t = product(&l, &z[0], &z[t], &mons);
        let mut qs = Vec::new();
        for t1 in 1..n2 {
            let t2 = td.sub(t, t1);
            if t2 == 0 || t2 < t1 {
                continue;
            }
            let lambda = curve.slope(td.point(t1), td.point(t2))?;
            let zz = product(&l, &z[t1], &z[t2], &mons);
            qs.push(lin(&z0t, &lambda.neg_ref(), &zz, &rho.v[t1 * n2 + t2].neg_ref()));
        }
        for q in qs.iter().skip(1) {
            gens.push(lin(q, &l.one(), &qs[0], &l.one().neg_ref()));
        }
    }
    let out = descend(et.tower(), &gens, &et.k())?;
    let d2 = expected_dims(et.n()).1;
    verify(out.len() == d2, || format!("type 2 span has dimension {}, expected {d2}", out.len()))?;
    Ok(out)
}

/// `rho` rescaled so that `rho(O, O) = 1` (same class).
pub fn normalize_twist(rho: &R2Elt) -> R2Elt {
    let c = rho.v[0].inv().expect("rho is a unit");
    R2Elt {
        v: rho.v.iter().map(|x| x * &c).collect(),
    }
}

/// Quadrics for a class `rho` in `H` (symmetric; `epsilon` does not enter).
pub fn quadric_system(et: &Etale, rho: &R2Elt) -> Result<QuadricSystem> {
    verify(et.is_in_h(rho), || "rho is not in H".into())?;
    let rho = normalize_twist(rho);
    Ok(QuadricSystem {
        nvars: et.dim(),
        type1: type1_quadrics(et, &rho)?,
        type2: type2_quadrics(et, &rho)?,
    })
}

/// Rows of the matrix of `z -> eta z` on `R` in the coordinates `z_i`.
pub fn multiplication_rows(et: &Etale, eta: &RElt) -> Result<Vec<Vec<Fe>>> {
    let k = et.k();
    let cols = et
        .basis()
        .iter()
        .map(|r| et.coords(&eta.mul(r)))
        .collect::<Result<Vec<_>>>()?;
    let m = Matrix::from_cols(&k, &cols);
    Ok((0..m.rows()).map(|i| m.row(i)).collect())
}

/// The quadric space of `rho d(eta)` predicted from that of `rho`:
/// `Q -> Q(eta z)`.
pub fn gauge_quadrics(et: &Etale, sys: &QuadricSystem, eta: &RElt) -> Result<Vec<MPoly>> {
    let rows = multiplication_rows(et, eta)?;
    Ok(sys.polys().iter().map(|q| q.linear_change(&rows)).collect())
}

/// Whether two families of quadrics span the same space.
pub fn same_span(a: &[MPoly], b: &[MPoly]) -> bool {
    let Some(q) = a.first().or(b.first()) else {
        return true;
    };
    let (k, nv) = (q.field().clone(), q.nvars());
    let mons = monomials(nv, 2);
    let va: Vec<Vec<Fe>> = a.iter().map(|q| q.coeffs_on(&mons)).collect();
    let vb: Vec<Vec<Fe>> = b.iter().map(|q| q.coeffs_on(&mons)).collect();
    let ra = span_basis(&k, &va).len();
    ra == span_basis(&k, &vb).len() && ra == span_basis(&k, &[va, vb].concat()).len()
}

/// The quadrics in the entries of `X = sum_i z_i tau(r_i)` (row-major).
pub fn to_matrix_coordinates(sys: &QuadricSystem, tau: &SplitIsomorphism) -> Result<Vec<MPoly>> {
    let k = tau.images[0].field().clone();
    let cols: Vec<Vec<Fe>> = tau.images.iter().map(Matrix::to_vec).collect();
    let pinv = Matrix::from_cols(&k, &cols).inverse()?;
    let rows: Vec<Vec<Fe>> = (0..pinv.rows()).map(|i| pinv.row(i)).collect();
    Ok(sys.polys().iter().map(|q| q.linear_change(&rows)).collect())
}

/// A plane cubic `G` with `G(l(X))` in the cubic part of the ideal, where
/// `l` is column `j` (or row `j`) of `X - tr(X)/3 I`.
pub fn project_to_plane(quadrics: &[MPoly]) -> Result<TernaryCubic> {
    let k = quadrics[0].field().clone();
    let nv = 9;
    let cubic_mons = monomials(nv, 3);
    let mut ideal = Vec::new();
    for q in quadrics {
        for v in 0..nv {
            ideal.push(q.mul(&MPoly::var(&k, nv, v)).coeffs_on(&cubic_mons));
        }
    }
    let ideal = span_basis(&k, &ideal);
    let third = k.from_u64(3).inv().unwrap();
    let trace_part = |a: usize, b: usize| -> MPoly {
        let mut f = MPoly::var(&k, nv, a * 3 + b);
        if a == b {
            for i in 0..3 {
                f = f.sub(&MPoly::var(&k, nv, i * 3 + i).scale(&third));
            }
        }
        f
    };
    let plane_mons = monomials(3, 3);
    let choices: Vec<Vec<MPoly>> = (0..3)
        .map(|j| (0..3).map(|a| trace_part(a, j)).collect())
        .chain((0..3).map(|i| (0..3).map(|b| trace_part(i, b)).collect()))
        .collect();
    for ell in choices {
        let mut cols: Vec<Vec<Fe>> = plane_mons
            .iter()
            .map(|m| {
                let mut t = MPoly::constant(k.one(), nv);
                for (i, &e) in m.iter().enumerate() {
                    t = t.mul(&ell[i].pow(e));
                }
                t.coeffs_on(&cubic_mons)
            })
            .collect();
        cols.extend(ideal.iter().cloned());
        let ns = Matrix::from_cols(&k, &cols).nullspace();
        let gs = span_basis(&k, &ns.iter().map(|v| v[..10].to_vec()).collect::<Vec<_>>());
        if gs.len() == 1 {
            return Ok(TernaryCubic::new(&k, gs[0].clone()).normalized());
        }
    }
    Err(DescentError::Verification("no projection gives a unique cubic".into()))
}

/// Projective points over `K` on the common zero locus of the quadrics,
/// by coordinate-wise backtracking with pruning.
pub fn count_common_zeros(sys: &QuadricSystem) -> u64 {
    let nv = sys.nvars;
    let k = sys.all()[0][0].field().clone();
    let mons = monomials(nv, 2);
    // Reorder monomials so that those with a larger top variable come first;
    // the echelon form then exposes quadrics in the leading variables.
    let top = |m: &Vec<u32>| m.iter().rposition(|&e| e > 0).unwrap();
    let mut order: Vec<usize> = (0..mons.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(top(&mons[i])));
    let rows: Vec<Vec<Fe>> = sys
        .all()
        .iter()
        .map(|c| order.iter().map(|&i| c[i].clone()).collect())
        .collect();
    let (r, piv) = Matrix::from_rows(&k, rows).rref();
    let mut by_level: Vec<Vec<MPoly>> = vec![vec![]; nv];
    for (i, &p) in piv.iter().enumerate() {
        let coeffs: Vec<Fe> = r.row(i);
        let mut f = MPoly::zero(&k, nv);
        for (c, &oi) in coeffs.iter().zip(&order) {
            f.add_term(mons[oi].clone(), c.clone());
        }
        by_level[top(&mons[order[p]])].push(f);
    }
    let elems: Vec<Fe> = k.elements().collect();
    let mut point = vec![k.zero(); nv];
    fn rec(
        level: usize,
        started: bool,
        point: &mut Vec<Fe>,
        elems: &[Fe],
        by_level: &[Vec<MPoly>],
        k: &Field,
    ) -> u64 {
        if level == point.len() {
            return u64::from(started);
        }
        let choices: Vec<Fe> = if started {
            elems.to_vec()
        } else {
            vec![k.zero(), k.one()]
        };
        let mut count = 0;
        for v in choices {
            let now = started || !v.is_zero();
            point[level] = v;
            if by_level[level].iter().all(|q| q.eval(point).is_zero()) {
                count += rec(level + 1, now, point, elems, by_level, k);
            }
        }
        point[level] = k.zero();
        count
    }
    rec(0, false, &mut point, &elems, &by_level, &k)
}

#[derive(Clone, Debug)]
pub struct SegreOutput {
    pub system: QuadricSystem,
    pub tau: Option<SplitIsomorphism>,
    pub cubic: Option<TernaryCubic>,
    pub matrices: Vec<Matrix>,
}

/// The Segre method for `rho` in `H`: quadrics from `rho`, coordinates from a
/// trivialization of `A_{eps rho}` with `eps` from Miller functions.
/// For `n = 2` only the two type-1 quadrics are produced.
pub fn segre(et: &Etale, eps_f: &R2Elt, rho: &R2Elt, seed: u64) -> Result<SegreOutput> {
    let total = eps_f.mul(rho);
    let system = quadric_system(et, rho)?;
    if et.n() != 3 {
        return Ok(SegreOutput {
            system,
            tau: None,
            cubic: None,
            matrices: vec![],
        });
    }
    let alg = enveloping_algebra(et, &total)?;
    let tau = trivialize(&alg, seed)?;
    let matrices = matrices_from_tau(et, &tau)?;
    let quads = to_matrix_coordinates(&system, &tau)?;
    let cubic = project_to_plane(&quads)?;
    Ok(SegreOutput {
        system,
        tau: Some(tau),
        cubic: Some(cubic),
        matrices,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn predicted_dimensions() {
        assert_eq!(expected_dims(3), (3, 24));
        assert_eq!(expected_dims(2), (2, 0));
        for n in 2..8 {
            let (d1, d2) = expected_dims(n);
            assert_eq!(d1 + d2, n * n * (n * n - 3) / 2);
        }
    }

    use crate::elliptic::count_points;
    use crate::etale::kummer_representatives;
    use crate::pipeline::Setup;
    use num_bigint::BigInt;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn quadric_locus_has_the_right_number_of_points() {
        for (p, a4, a6, n) in [(7, 3, 2, 3), (7, 3, 2, 2), (13, 2, 5, 2)] {
            let s = Setup::new(p, a4, a6, n, 1).unwrap();
            let ne = count_points(&s.curve, 1);
            for pt in kummer_representatives(&s.curve, n) {
                let c = s.etale.class_from_point(&pt, 0).unwrap();
                let sys = quadric_system(&s.etale, &c.rho).unwrap();
                assert_eq!((sys.type1.len(), sys.type2.len()), expected_dims(n));
                assert_eq!(BigInt::from(count_common_zeros(&sys)), ne, "p={p} n={n}");
            }
        }
    }

    #[test]
    fn quadrics_move_by_the_gauge_substitution() {
        let s = Setup::new(11, 1, 3, 3, 2).unwrap();
        let et = &s.etale;
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for pt in kummer_representatives(&s.curve, 3) {
            let rho = et.class_from_point(&pt, 1).unwrap().rho;
            let sys = quadric_system(et, &rho).unwrap();
            let eta = et.random_unit(&mut rng);
            let moved = quadric_system(et, &rho.mul(&et.partial1(&eta).unwrap())).unwrap();
            let predicted = gauge_quadrics(et, &sys, &eta).unwrap();
            assert!(same_span(&moved.polys(), &predicted));
            assert!(!same_span(&moved.polys(), &sys.polys()) || eta.v.iter().all(|x| *x == eta.v[0]));
        }
    }
}
