use crate::error::{DescentError, Result};
use crate::field::{Fe, Field};

use super::Curve;

/// Truncated Laurent series `sum_i c[i] t^(val + i)`, known up to (excluding)
/// `t^(val + c.len())`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Laurent {
    field: Field,
    val: i64,
    c: Vec<Fe>,
}

impl Laurent {
    pub fn new(field: &Field, val: i64, c: Vec<Fe>) -> Laurent {
        Laurent {
            field: field.clone(),
            val,
            c,
        }
    }

    /// The monomial `coef * t^val` known to `prec` terms.
    pub fn monomial(coef: Fe, val: i64, prec: usize) -> Laurent {
        let f = coef.field().clone();
        let mut c = vec![f.zero(); prec];
        c[0] = coef;
        Laurent { field: f, val, c }
    }

    pub fn constant(c: Fe, prec: usize) -> Laurent {
        Laurent::monomial(c, 0, prec)
    }

    /// Absolute order up to which the series is known.
    pub fn bound(&self) -> i64 {
        self.val + self.c.len() as i64
    }

    /// Removes leading zero coefficients.
    pub fn normalized(&self) -> Laurent {
        let skip = self.c.iter().take_while(|x| x.is_zero()).count();
        Laurent {
            field: self.field.clone(),
            val: self.val + skip as i64,
            c: self.c[skip..].to_vec(),
        }
    }

    /// Valuation and leading coefficient, if determined.
    pub fn leading(&self) -> Result<(i64, Fe)> {
        let n = self.normalized();
        n.c.first()
            .map(|c| (n.val, c.clone()))
            .ok_or_else(|| DescentError::InvalidInput("precision too low for leading term".into()))
    }

    pub fn coeff(&self, e: i64) -> Fe {
        let i = e - self.val;
        if i < 0 || i >= self.c.len() as i64 {
            self.field.zero()
        } else {
            self.c[i as usize].clone()
        }
    }

    pub fn is_zero_to_precision(&self) -> bool {
        self.c.iter().all(Fe::is_zero)
    }

    pub fn add(&self, o: &Laurent) -> Laurent {
        let val = self.val.min(o.val);
        let bound = self.bound().min(o.bound());
        let c = (val..bound).map(|e| self.coeff(e) + o.coeff(e)).collect();
        Laurent::new(&self.field, val, c)
    }

    pub fn sub(&self, o: &Laurent) -> Laurent {
        self.add(&o.scale(&self.field.from_i64(-1)))
    }

    pub fn scale(&self, s: &Fe) -> Laurent {
        Laurent::new(&self.field, self.val, self.c.iter().map(|x| x * s).collect())
    }

    pub fn mul(&self, o: &Laurent) -> Laurent {
        let a = self.normalized();
        let b = o.normalized();
        let prec = a.c.len().min(b.c.len());
        let mut c = vec![self.field.zero(); prec];
        for i in 0..prec {
            if a.c[i].is_zero() {
                continue;
            }
            for j in 0..prec - i {
                c[i + j] += &(&a.c[i] * &b.c[j]);
            }
        }
        Laurent::new(&self.field, a.val + b.val, c)
    }

    pub fn inv(&self) -> Result<Laurent> {
        let a = self.normalized();
        let Some(l) = a.c.first() else {
            return Err(DescentError::NotInvertible("series with no known terms".into()));
        };
        let li = l.inv().unwrap();
        let prec = a.c.len();
        let mut c: Vec<Fe> = Vec::with_capacity(prec);
        c.push(li.clone());
        for k in 1..prec {
            let mut s = self.field.zero();
            for j in 1..=k {
                s += &(&a.c[j] * &c[k - j]);
            }
            c.push(-(s * &li));
        }
        Ok(Laurent::new(&self.field, -a.val, c))
    }

    pub fn powi(&self, e: i32) -> Result<Laurent> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let prec = self.normalized().c.len();
        let mut acc = Laurent::constant(self.field.one(), prec);
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }
}

/// Expansions of `x` and `y` in the uniformizer `t = x/y` at `O`, with
/// `x = t^-2 + ...` and `y = t^-3 + ...`, each known to `prec` terms.
pub fn curve_expansion(curve: &Curve, field: &Field, prec: usize) -> (Laurent, Laurent) {
    let a = curve.a4_in(field);
    let b = curve.a6_in(field);
    // u = 1/y solves u = t^3 + a t u^2 + b u^3.
    let t3 = Laurent::monomial(field.one(), 3, prec);
    let t1 = Laurent::monomial(a, 1, prec);
    let mut u = t3.clone();
    for _ in 0..prec {
        let u2 = u.mul(&u);
        let u3 = u2.mul(&u);
        u = t3.add(&t1.mul(&u2)).add(&u3.scale(&b));
        u = Laurent::new(field, 3, (3..3 + prec as i64).map(|e| u.coeff(e)).collect());
    }
    let y = u.inv().unwrap();
    let x = y.mul(&Laurent::monomial(field.one(), 1, prec));
    (x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Tower;

    #[test]
    fn expansions_satisfy_curve() {
        let e = Curve::new(&Tower::new(11), 3, 5).unwrap();
        let f = e.tower().prime();
        let (x, y) = curve_expansion(&e, &f, 12);
        assert_eq!(x.leading().unwrap(), (-2, f.one()));
        assert_eq!(y.leading().unwrap(), (-3, f.one()));
        let lhs = y.mul(&y);
        let prec = 12;
        let rhs = x
            .mul(&x)
            .mul(&x)
            .add(&x.scale(e.a4()))
            .add(&Laurent::constant(e.a6().clone(), prec + 6));
        assert!(lhs.sub(&rhs).is_zero_to_precision());
        // x / y is the uniformizer itself
        let t = x.mul(&y.inv().unwrap());
        assert_eq!(t.leading().unwrap(), (1, f.one()));
        assert!(t.sub(&Laurent::monomial(f.one(), 1, 10)).is_zero_to_precision());
        assert!(t.mul(&y).sub(&x).is_zero_to_precision());
    }
}
