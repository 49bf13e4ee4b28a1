use crate::field::{Field, Poly};

use super::Curve;

/// Division polynomials in the `f_n` normalization: `psi_n = f_n` for odd `n`
/// and `psi_n = 2y f_n` for even `n`, all polynomials in `x` alone.
#[derive(Clone, Debug)]
pub struct DivisionPolys {
    field: Field,
    rhs: Poly,
    f: Vec<Poly>,
}

impl DivisionPolys {
    pub fn new(curve: &Curve, up_to: usize) -> DivisionPolys {
        let k = curve.tower().prime();
        let (a, b) = (curve.a4().clone(), curve.a6().clone());
        let c = |v: i64| k.from_i64(v);
        let f3 = Poly::new(
            &k,
            vec![
                -a.square(),
                b.scale(12),
                a.scale(6),
                k.zero(),
                c(3),
            ],
        );
        let a2 = a.square();
        let f4 = Poly::new(
            &k,
            vec![
                -(b.square().scale(8) + a2.mul_ref(&a)),
                -(a.mul_ref(&b).scale(4)),
                -a2.scale(5),
                b.scale(20),
                a.scale(5),
                k.zero(),
                k.one(),
            ],
        )
        .scale(&c(2));
        let mut d = DivisionPolys {
            field: k.clone(),
            rhs: curve.rhs_poly(),
            f: vec![Poly::zero(&k), Poly::one(&k), Poly::one(&k), f3, f4],
        };
        d.extend(up_to + 2);
        d
    }

    fn extend(&mut self, n: usize) {
        let ff16 = self.rhs.mul(&self.rhs).scale(&self.field.from_u64(16));
        while self.f.len() <= n {
            let k = self.f.len();
            let m = k / 2;
            let f = &self.f;
            let next = if k % 2 == 1 {
                // k = 2m + 1
                let a = f[m + 2].mul(&f[m].pow(3));
                let b = f[m - 1].mul(&f[m + 1].pow(3));
                if m.is_multiple_of(2) {
                    ff16.mul(&a).sub(&b)
                } else {
                    a.sub(&ff16.mul(&b))
                }
            } else {
                let inner = f[m + 2]
                    .mul(&f[m - 1].pow(2))
                    .sub(&f[m - 2].mul(&f[m + 1].pow(2)));
                f[m].mul(&inner)
            };
            self.f.push(next);
        }
    }

    pub fn f(&self, n: usize) -> &Poly {
        &self.f[n]
    }

    /// Polynomial whose roots are the x-coordinates of nonzero n-torsion
    /// (for prime n).
    pub fn torsion_x_poly(&self, n: usize) -> Poly {
        if n == 2 {
            self.rhs.clone()
        } else {
            self.f[n].clone()
        }
    }

    /// `(num, den)` with `x([n]P) = num(x) / den(x)`.
    pub fn mul_x(&self, n: usize) -> (Poly, Poly) {
        let x = Poly::x(&self.field);
        let four_f = self.rhs.scale(&self.field.from_u64(4));
        let (fm, fn_, fp) = (&self.f[n - 1], &self.f[n], &self.f[n + 1]);
        if n % 2 == 1 {
            let den = fn_.mul(fn_);
            let num = x.mul(&den).sub(&four_f.mul(&fm.mul(fp)));
            (num, den)
        } else {
            let den = four_f.mul(&fn_.mul(fn_));
            let num = x.mul(&den).sub(&fm.mul(fp));
            (num, den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::Point;
    use crate::field::Tower;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn psi3_matches_closed_form() {
        let e = Curve::new(&Tower::new(11), 3, 7).unwrap();
        let d = DivisionPolys::new(&e, 5);
        assert_eq!(*d.f(3), Poly::from_i64(&e.tower().prime(), &[-9, 12 * 7, 6 * 3, 0, 3]));
    }

    #[test]
    fn multiplication_map_on_x() {
        let e = Curve::new(&Tower::new(13), 1, 6).unwrap();
        let d = DivisionPolys::new(&e, 6);
        let f = e.tower().field(3);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 2..=5 {
            let (num, den) = d.mul_x(n);
            for _ in 0..5 {
                let p = e.random_point(&f, &mut rng);
                let q = e.mul(n as i64, &p);
                let x = p.x().unwrap();
                let dv = den.map_coeffs(&f, |c| e.tower().embed(c, 3)).eval(x);
                match q {
                    Point::Infinity => assert!(dv.is_zero()),
                    Point::Affine(qx, _) => {
                        let nv = num.map_coeffs(&f, |c| e.tower().embed(c, 3)).eval(x);
                        assert_eq!(nv, &qx * &dv);
                    }
                }
            }
        }
    }
}
