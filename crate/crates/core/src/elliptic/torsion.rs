use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{DescentError, Result};
use crate::field::{gcd, nth_roots, Fe, Field, Poly};

use super::division::DivisionPolys;
use super::miller::MillerFn;
use super::{Curve, Point, PointSpec};

const PAIRING_SEED: u64 = 0x7e11_9a17;

/// `E[n]` over its splitting field, indexed by coordinates in a basis:
/// index `i*n + j` is the point `iS + jT`.
#[derive(Clone, Debug)]
pub struct TorsionData {
    curve: Curve,
    n: usize,
    field: Field,
    points: Vec<Point>,
    lookup: HashMap<Point, usize>,
    frob: Vec<usize>,
    frob_inv: Vec<usize>,
    frob_matrix: [[usize; 2]; 2],
    zeta: Fe,
}

/// JSON dump of a [`TorsionData`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TorsionDump {
    pub n: usize,
    pub m: usize,
    pub points: Vec<PointSpec>,
    pub frobenius_permutation: Vec<usize>,
    pub frobenius_matrix: [[usize; 2]; 2],
    pub basis: [usize; 2],
    pub zeta: Vec<u64>,
}

/// Weil pairing by Miller's algorithm with a random auxiliary offset.
pub fn weil_pairing(curve: &Curve, p: &Point, q: &Point, n: usize) -> Result<Fe> {
    let mut rng = ChaCha8Rng::seed_from_u64(PAIRING_SEED);
    weil_pairing_with(curve, p, q, n, &mut rng)
}

pub(crate) fn weil_pairing_with(
    curve: &Curve,
    p: &Point,
    q: &Point,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Fe> {
    let tw = curve.tower();
    let d = match (p.degree(), q.degree()) {
        (Some(a), Some(b)) => a / gcd(a, b) * b,
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => 1,
    };
    let home = tw.field(d);
    if p.is_infinity() || q.is_infinity() || p == q {
        return Ok(home.one());
    }
    let fp = MillerFn::new(curve, p, n)?;
    let fq = MillerFn::new(curve, q, n)?;
    let big = tw.field(2 * d);
    for _ in 0..32 {
        let u = curve.random_point(&big, rng);
        if curve.mul(n as i64, &u).is_infinity() {
            continue;
        }
        let vals = (|| -> Result<(Fe, Fe, Fe, Fe)> {
            Ok((
                fp.eval(curve, &curve.add(q, &u))?,
                fq.eval(curve, &curve.neg(&u))?,
                fp.eval(curve, &u)?,
                fq.eval(curve, &curve.sub(p, &u))?,
            ))
        })();
        let Ok((a, b, c, e)) = vals else { continue };
        let v = (a * b).div_ref(&(c * e)).unwrap();
        return tw
            .restrict(&v, d)
            .ok_or_else(|| DescentError::Verification("pairing value outside its field".into()));
    }
    Err(DescentError::RetryExhausted("weil pairing offsets".into()))
}

fn mat_mul(a: &[[usize; 2]; 2], b: &[[usize; 2]; 2], n: usize) -> [[usize; 2]; 2] {
    let mut r = [[0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            r[i][j] = (a[i][0] * b[0][j] + a[i][1] * b[1][j]) % n;
        }
    }
    r
}

/// Multiplicative order of a matrix in `GL_2(Z/n)`.
pub fn gl2_order(m: &[[usize; 2]; 2], n: usize) -> usize {
    let id = [[1, 0], [0, 1]];
    let mut acc = *m;
    let mut k = 1;
    while acc != id {
        acc = mat_mul(&acc, m, n);
        k += 1;
        assert!(k <= n * n * n * n, "matrix is not invertible");
    }
    k
}

impl TorsionData {
    pub fn new(curve: &Curve, n: usize) -> Result<TorsionData> {
        let p = curve.p() as usize;
        if n < 2 || p.is_multiple_of(n) {
            return Err(DescentError::InvalidInput(format!("n = {n} not prime to p")));
        }
        let tw = curve.tower();
        let div = DivisionPolys::new(curve, n);
        let xpoly = div.torsion_x_poly(n);
        let degs: Vec<usize> = xpoly
            .factor()
            .iter()
            .map(|(g, _)| g.degree().unwrap())
            .collect();
        let dx = degs.iter().fold(1, |a, &b| a / gcd(a, b) * b);
        let fx = tw.field(dx);
        let embed_poly = |f: &Field| xpoly.map_coeffs(f, |c| tw.embed(c, f.degree()));
        let all_square = embed_poly(&fx)
            .roots()
            .iter()
            .all(|x| !nth_roots(&curve.rhs(x), 2).is_empty());
        let m = if all_square { dx } else { 2 * dx };
        let field = tw.field(m);

        let mut affine = Vec::new();
        for x in embed_poly(&field).roots() {
            for y in nth_roots(&curve.rhs(&x), 2) {
                affine.push(Point::Affine(x.clone(), y));
            }
        }
        if affine.len() + 1 != n * n {
            return Err(DescentError::Verification(format!(
                "found {} torsion points, expected {}",
                affine.len() + 1,
                n * n
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(PAIRING_SEED);
        let mut basis = None;
        'outer: for (i, s) in affine.iter().enumerate() {
            for t in &affine[i + 1..] {
                let e = weil_pairing_with(curve, s, t, n, &mut rng)?;
                if !e.is_one() {
                    basis = Some((s.clone(), t.clone(), e));
                    break 'outer;
                }
            }
        }
        let (s, t, zeta) =
            basis.ok_or_else(|| DescentError::Verification("pairing is degenerate".into()))?;
        if zeta.pow_u64(n as u64) != field.one() {
            return Err(DescentError::Verification("pairing value not in mu_n".into()));
        }

        let mut points = Vec::with_capacity(n * n);
        for i in 0..n {
            let is = curve.mul(i as i64, &s);
            for j in 0..n {
                points.push(curve.add(&is, &curve.mul(j as i64, &t)));
            }
        }
        let points: Vec<Point> = points.iter().map(|q| lift_or_inf(curve, q, m)).collect();
        let lookup: HashMap<Point, usize> =
            points.iter().cloned().enumerate().map(|(i, q)| (q, i)).collect();
        if lookup.len() != n * n {
            return Err(DescentError::Verification("basis does not span E[n]".into()));
        }
        let frob: Vec<usize> = points.iter().map(|q| lookup[&q.frobenius()]).collect();
        let mut frob_inv = vec![0; n * n];
        for (i, &j) in frob.iter().enumerate() {
            frob_inv[j] = i;
        }
        let (a, c) = (frob[n] / n, frob[n] % n);
        let (b, d) = (frob[1] / n, frob[1] % n);
        let frob_matrix = [[a, b], [c, d]];
        let td = TorsionData {
            curve: curve.clone(),
            n,
            field,
            points,
            lookup,
            frob,
            frob_inv,
            frob_matrix,
            zeta,
        };
        if gl2_order(&td.frob_matrix, n) != m {
            return Err(DescentError::Verification(
                "splitting degree differs from the Frobenius order".into(),
            ));
        }
        Ok(td)
    }

    pub fn curve(&self) -> &Curve {
        &self.curve
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of torsion points, `n^2`.
    pub fn size(&self) -> usize {
        self.n * self.n
    }

    /// The splitting field `L`.
    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Degree `m` of `L` over `K`.
    pub fn m(&self) -> usize {
        self.field.degree()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, idx: usize) -> &Point {
        &self.points[idx]
    }

    pub fn index_of(&self, p: &Point) -> Option<usize> {
        let q = match p.degree() {
            Some(d) if d != self.m() => {
                if d % self.m() == 0 {
                    self.curve.restrict(p, self.m())?
                } else {
                    self.curve.lift(p, self.m())
                }
            }
            _ => p.clone(),
        };
        self.lookup.get(&q).copied()
    }

    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx / self.n, idx % self.n)
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        (i % self.n) * self.n + (j % self.n)
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        let (i, j) = self.coords(a);
        let (k, l) = self.coords(b);
        self.index(i + k, j + l)
    }

    pub fn neg(&self, a: usize) -> usize {
        let (i, j) = self.coords(a);
        self.index(self.n - i, self.n - j)
    }

    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, k: usize, a: usize) -> usize {
        let (i, j) = self.coords(a);
        self.index(k * i, k * j)
    }

    /// `Frob(T)`, as an index.
    pub fn frob(&self, a: usize) -> usize {
        self.frob[a]
    }

    pub fn frob_inv(&self, a: usize) -> usize {
        self.frob_inv[a]
    }

    pub fn frob_pow(&self, a: usize, k: usize) -> usize {
        (0..k % self.m().max(1)).fold(a, |x, _| self.frob[x])
    }

    pub fn frobenius_matrix(&self) -> [[usize; 2]; 2] {
        self.frob_matrix
    }

    /// `zeta = e_n(S, T)` in `L`.
    pub fn zeta(&self) -> &Fe {
        &self.zeta
    }

    /// Exponent `k` with `e_n(a, b) = zeta^k`.
    pub fn pairing_exponent(&self, a: usize, b: usize) -> usize {
        let (i, j) = self.coords(a);
        let (k, l) = self.coords(b);
        let n = self.n;
        (i * l + n * n - (j * k) % n) % n
    }

    pub fn weil(&self, a: usize, b: usize) -> Fe {
        self.zeta.pow_u64(self.pairing_exponent(a, b) as u64)
    }

    /// Replaces the pairing by its inverse (orientation fix).
    pub fn reorient(&mut self) {
        self.zeta = self.zeta.inv().unwrap();
    }

    /// Frobenius orbits, each starting at its smallest index, sorted.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.size()];
        let mut out = Vec::new();
        for start in 0..self.size() {
            if seen[start] {
                continue;
            }
            let mut orbit = vec![start];
            seen[start] = true;
            let mut x = self.frob[start];
            while x != start {
                seen[x] = true;
                orbit.push(x);
                x = self.frob[x];
            }
            out.push(orbit);
        }
        out
    }

    pub fn dump(&self) -> TorsionDump {
        TorsionDump {
            n: self.n,
            m: self.m(),
            points: self.points.iter().map(|p| self.curve.point_spec(p)).collect(),
            frobenius_permutation: self.frob.clone(),
            frobenius_matrix: self.frob_matrix,
            basis: [self.n, 1],
            zeta: self.zeta.to_u64_vec(),
        }
    }

    pub fn poly_roots_check(&self) -> bool {
        let div = DivisionPolys::new(&self.curve, self.n);
        let xp: Poly = div.torsion_x_poly(self.n);
        let tw = self.curve.tower();
        self.points.iter().skip(1).all(|p| {
            let x = p.x().unwrap();
            xp.map_coeffs(x.field(), |c| tw.embed(c, x.field().degree()))
                .eval(x)
                .is_zero()
        })
    }
}

fn lift_or_inf(curve: &Curve, p: &Point, m: usize) -> Point {
    match p.degree() {
        Some(d) if d != m => curve.lift(p, m),
        _ => p.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::count_points;
    use crate::field::Tower;

    #[test]
    fn three_torsion_over_f13() {
        let e = Curve::new(&Tower::new(13), 2, 5).unwrap();
        let td = TorsionData::new(&e, 3).unwrap();
        assert_eq!(td.points().len(), 9);
        assert!(td.poly_roots_check());
        for p in td.points() {
            assert!(e.mul(3, p).is_infinity());
        }
        assert!([1, 2, 3, 4, 6, 8].contains(&td.m()));
        let det = (td.frob_matrix[0][0] * td.frob_matrix[1][1] + 9
            - (td.frob_matrix[0][1] * td.frob_matrix[1][0]) % 3)
            % 3;
        assert_eq!(det, 13 % 3);
        for a in 0..9 {
            assert_eq!(td.frob(td.frob_inv(a)), a);
            assert_eq!(e.lift(&td.point(a).frobenius(), td.m()), *td.point(td.frob(a)));
        }
    }

    #[test]
    fn y2_x3_plus_1_over_f7_splits_in_degree_three() {
        // #E(F_7) = 12 and #E(F_49) = 48, so E[3] is not defined over F_49.
        let e = Curve::new(&Tower::new(7), 0, 1).unwrap();
        assert_eq!(count_points(&e, 1), 12.into());
        assert_eq!(count_points(&e, 2), 48.into());
        assert!(count_points(&e, 3) % 9u32 == 0.into());
        let td = TorsionData::new(&e, 3).unwrap();
        assert_eq!(td.m(), 3);
        for p in td.points() {
            assert_eq!(p.frobenius().frobenius().frobenius(), *p);
        }
    }

    #[test]
    fn pairing_is_bilinear_alternating_and_equivariant() {
        let e = Curve::new(&Tower::new(11), 1, 3).unwrap();
        let td = TorsionData::new(&e, 3).unwrap();
        let pts = td.points();
        let mut vals = vec![vec![td.field().one(); 9]; 9];
        for a in 0..9 {
            for b in 0..9 {
                let v = weil_pairing(&e, &pts[a], &pts[b], 3).unwrap();
                vals[a][b] = e.tower().embed(&v, td.m());
            }
        }
        for a in 0..9 {
            assert!(vals[a][a].is_one());
            for b in 0..9 {
                assert!((&vals[a][b] * &vals[b][a]).is_one());
                assert_eq!(vals[a][b], td.weil(a, b));
                assert_eq!(vals[td.frob(a)][td.frob(b)], vals[a][b].frobenius());
                for c in 0..9 {
                    assert_eq!(vals[td.add(a, b)][c], &vals[a][c] * &vals[b][c]);
                }
            }
        }
        assert_ne!(*td.zeta(), td.field().one());
    }

    #[test]
    fn gl2_orders_bounded_by_exponent() {
        // exponent of GL_2(Z/3) is 24; every order divides it
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    for d in 0..3 {
                        if (a * d + 9 - (b * c) % 3) % 3 == 0 {
                            continue;
                        }
                        let o = gl2_order(&[[a, b], [c, d]], 3);
                        assert!([1, 2, 3, 4, 6, 8].contains(&o));
                    }
                }
            }
        }
    }
}
