//! Short Weierstrass curves over tower fields.

mod count;
mod division;
mod laurent;
mod miller;
mod torsion;

pub use count::{count_points, count_points_direct};
pub use division::DivisionPolys;
pub use laurent::Laurent;
pub use miller::{Chain, LineFactor, MillerFn};
pub use torsion::{gl2_order, weil_pairing, TorsionData, TorsionDump};

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{DescentError, Result};
use crate::field::{nth_roots, Fe, Field, Poly, Tower};

/// A point on a curve, either at infinity or affine over some tower field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Point {
    Infinity,
    Affine(Fe, Fe),
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Infinity => write!(f, "O"),
            Point::Affine(x, y) => write!(f, "({x:?}, {y:?})"),
        }
    }
}

impl Point {
    pub fn is_infinity(&self) -> bool {
        matches!(self, Point::Infinity)
    }

    pub fn x(&self) -> Option<&Fe> {
        match self {
            Point::Affine(x, _) => Some(x),
            Point::Infinity => None,
        }
    }

    pub fn y(&self) -> Option<&Fe> {
        match self {
            Point::Affine(_, y) => Some(y),
            Point::Infinity => None,
        }
    }

    /// Degree of the coordinate field (`None` at infinity).
    pub fn degree(&self) -> Option<usize> {
        self.x().map(|x| x.field().degree())
    }

    /// Coordinate-wise `p`-power map.
    pub fn frobenius(&self) -> Point {
        match self {
            Point::Infinity => Point::Infinity,
            Point::Affine(x, y) => Point::Affine(x.frobenius(), y.frobenius()),
        }
    }
}

/// Serialized point: `{field_degree, x, y}` or the string `"infinity"`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum PointSpec {
    Infinity(String),
    Affine {
        field_degree: usize,
        x: Vec<u64>,
        y: Vec<u64>,
    },
}

/// `y^2 = x^3 + a4 x + a6` over the prime field of a tower.
#[derive(Clone, Debug)]
pub struct Curve {
    tower: Tower,
    a4: Fe,
    a6: Fe,
}

impl Curve {
    pub fn new(tower: &Tower, a4: i64, a6: i64) -> Result<Curve> {
        let k = tower.prime();
        let (a4, a6) = (k.from_i64(a4), k.from_i64(a6));
        let disc = (a4.pow_u64(3).scale(4) + a6.square().scale(27)).scale(16);
        if disc.is_zero() {
            return Err(DescentError::InvalidInput("singular curve".into()));
        }
        Ok(Curve {
            tower: tower.clone(),
            a4,
            a6,
        })
    }

    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    pub fn p(&self) -> u64 {
        self.tower.p()
    }

    pub fn a4(&self) -> &Fe {
        &self.a4
    }

    pub fn a6(&self) -> &Fe {
        &self.a6
    }

    /// `(a4, a6)` as integers in `[0, p)`.
    pub fn coefficients(&self) -> (u64, u64) {
        (self.a4.constant(), self.a6.constant())
    }

    pub fn j_invariant(&self) -> Fe {
        let a3 = self.a4.pow_u64(3).scale(4);
        let d = &a3 + &self.a6.square().scale(27);
        (a3.scale(1728)).div_ref(&d).unwrap()
    }

    pub fn a4_in(&self, f: &Field) -> Fe {
        self.tower.embed(&self.a4, f.degree())
    }

    pub fn a6_in(&self, f: &Field) -> Fe {
        self.tower.embed(&self.a6, f.degree())
    }

    /// `x^3 + a4 x + a6` evaluated at `x`.
    pub fn rhs(&self, x: &Fe) -> Fe {
        let f = x.field();
        x.pow_u64(3) + self.a4_in(f) * x + self.a6_in(f)
    }

    /// `x^3 + a4 x + a6` as a polynomial over the prime field.
    pub fn rhs_poly(&self) -> Poly {
        let k = self.tower.prime();
        Poly::new(&k, vec![self.a6.clone(), self.a4.clone(), k.zero(), k.one()])
    }

    pub fn contains(&self, p: &Point) -> bool {
        match p {
            Point::Infinity => true,
            Point::Affine(x, y) => y.square() == self.rhs(x),
        }
    }

    pub fn point(&self, x: Fe, y: Fe) -> Result<Point> {
        let p = Point::Affine(x, y);
        if self.contains(&p) {
            Ok(p)
        } else {
            Err(DescentError::InvalidInput(format!("{p:?} is not on the curve")))
        }
    }

    /// The point as an element of the field of degree `deg`.
    pub fn lift(&self, p: &Point, deg: usize) -> Point {
        match p {
            Point::Infinity => Point::Infinity,
            Point::Affine(x, y) => {
                Point::Affine(self.tower.embed(x, deg), self.tower.embed(y, deg))
            }
        }
    }

    /// Restriction to a smaller field, if the coordinates lie there.
    pub fn restrict(&self, p: &Point, deg: usize) -> Option<Point> {
        match p {
            Point::Infinity => Some(Point::Infinity),
            Point::Affine(x, y) => Some(Point::Affine(
                self.tower.restrict(x, deg)?,
                self.tower.restrict(y, deg)?,
            )),
        }
    }

    fn common(&self, a: &Point, b: &Point) -> (Point, Point) {
        match (a.degree(), b.degree()) {
            (Some(da), Some(db)) if da != db => {
                let l = da / crate::field::gcd(da, db) * db;
                (self.lift(a, l), self.lift(b, l))
            }
            _ => (a.clone(), b.clone()),
        }
    }

    pub fn neg(&self, p: &Point) -> Point {
        match p {
            Point::Infinity => Point::Infinity,
            Point::Affine(x, y) => Point::Affine(x.clone(), y.neg_ref()),
        }
    }

    /// Chord or tangent slope; errors when `P1 + P2 = O` or either is `O`.
    pub fn slope(&self, p1: &Point, p2: &Point) -> Result<Fe> {
        let (p1, p2) = self.common(p1, p2);
        let (Point::Affine(x1, y1), Point::Affine(x2, y2)) = (&p1, &p2) else {
            return Err(DescentError::InvalidInput("slope at the origin".into()));
        };
        if x1 != x2 {
            return Ok((y2 - y1).div_ref(&(x2 - x1)).unwrap());
        }
        if y1 == y2 && !y1.is_zero() {
            let num = x1.square().scale(3) + self.a4_in(x1.field());
            return Ok(num.div_ref(&y1.scale(2)).unwrap());
        }
        Err(DescentError::InvalidInput("vertical line: P1 + P2 = O".into()))
    }

    pub fn add(&self, a: &Point, b: &Point) -> Point {
        let (a, b) = self.common(a, b);
        match (&a, &b) {
            (Point::Infinity, _) => b,
            (_, Point::Infinity) => a,
            (Point::Affine(x1, _), Point::Affine(x2, _)) => match self.slope(&a, &b) {
                Err(_) => Point::Infinity,
                Ok(l) => {
                    let x3 = l.square() - x1 - x2;
                    let y3 = &l * &(x1 - &x3) - a.y().unwrap();
                    Point::Affine(x3, y3)
                }
            },
        }
    }

    pub fn sub(&self, a: &Point, b: &Point) -> Point {
        self.add(a, &self.neg(b))
    }

    pub fn double(&self, a: &Point) -> Point {
        self.add(a, a)
    }

    pub fn mul(&self, k: i64, p: &Point) -> Point {
        let base = if k < 0 { self.neg(p) } else { p.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Point::Infinity;
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.add(&acc, &b);
            }
            e >>= 1;
            if e > 0 {
                b = self.double(&b);
            }
        }
        acc
    }

    /// A uniformly random affine point over the field `f`.
    pub fn random_point<R: Rng + ?Sized>(&self, f: &Field, rng: &mut R) -> Point {
        loop {
            let x = f.random(rng);
            let r = self.rhs(&x);
            let ys = nth_roots(&r, 2);
            if ys.is_empty() {
                continue;
            }
            let y = ys[rng.gen_range(0..ys.len())].clone();
            return Point::Affine(x, y);
        }
    }

    /// All points with coordinates in the field `f` (enumeration).
    pub fn points_over(&self, f: &Field) -> Vec<Point> {
        let mut out = vec![Point::Infinity];
        for x in f.elements() {
            for y in nth_roots(&self.rhs(&x), 2) {
                out.push(Point::Affine(x.clone(), y));
            }
        }
        out
    }

    pub fn point_spec(&self, p: &Point) -> PointSpec {
        match p {
            Point::Infinity => PointSpec::Infinity("infinity".into()),
            Point::Affine(x, y) => PointSpec::Affine {
                field_degree: x.field().degree(),
                x: x.to_u64_vec(),
                y: y.to_u64_vec(),
            },
        }
    }

    pub fn point_from_spec(&self, s: &PointSpec) -> Result<Point> {
        match s {
            PointSpec::Infinity(tag) if tag == "infinity" => Ok(Point::Infinity),
            PointSpec::Infinity(tag) => {
                Err(DescentError::InvalidInput(format!("unknown point tag {tag}")))
            }
            PointSpec::Affine { field_degree, x, y } => {
                let f = self.tower.field(*field_degree);
                if x.len() != f.degree() || y.len() != f.degree() {
                    return Err(DescentError::InvalidInput("coordinate length".into()));
                }
                self.point(f.from_coeffs(x), f.from_coeffs(y))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn curve() -> Curve {
        Curve::new(&Tower::new(13), 2, 5).unwrap()
    }

    #[test]
    fn rejects_singular() {
        assert!(Curve::new(&Tower::new(7), 0, 0).is_err());
    }

    #[test]
    fn group_axioms_on_random_triples() {
        let e = curve();
        let f = e.tower().field(2);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let a = e.random_point(&f, &mut rng);
            let b = e.random_point(&f, &mut rng);
            let c = e.random_point(&f, &mut rng);
            assert_eq!(e.add(&a, &b), e.add(&b, &a));
            assert_eq!(e.add(&e.add(&a, &b), &c), e.add(&a, &e.add(&b, &c)));
            assert!(e.add(&a, &e.neg(&a)).is_infinity());
            assert_eq!(e.add(&a, &Point::Infinity), a);
            assert!(e.contains(&e.add(&a, &b)));
        }
    }

    #[test]
    fn lagrange_on_base_points() {
        let e = curve();
        let n = i64::try_from(&count_points(&e, 1)).unwrap();
        for p in e.points_over(&e.tower().prime()) {
            assert!(e.mul(n, &p).is_infinity());
        }
    }

    #[test]
    fn slope_formulas() {
        let e = curve();
        let f = e.tower().field(2);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let a = e.random_point(&f, &mut rng);
            let b = e.random_point(&f, &mut rng);
            if let Ok(l) = e.slope(&a, &b) {
                let s = e.add(&a, &b);
                assert_eq!(*s.x().unwrap(), l.square() - a.x().unwrap() - b.x().unwrap());
                assert_eq!(e.slope(&a.frobenius(), &b.frobenius()).unwrap(), l.frobenius());
            }
        }
    }

    #[test]
    fn point_spec_round_trip() {
        let e = curve();
        let f = e.tower().field(2);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = e.random_point(&f, &mut rng);
        let s = serde_json::to_string(&e.point_spec(&p)).unwrap();
        let back: PointSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(e.point_from_spec(&back).unwrap(), p);
        let inf = serde_json::to_string(&e.point_spec(&Point::Infinity)).unwrap();
        assert_eq!(inf, "\"infinity\"");
    }
}
