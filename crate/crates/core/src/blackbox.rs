//! Explicit isomorphisms `A -> Mat_n(K)` for split central simple algebras.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::AlgebraK;
use crate::error::{verify, DescentError, Result};
use crate::field::{Fe, Field, Poly};
use crate::linalg::{span_basis, Matrix};

/// Random draws allowed per refinement level.
pub const RETRY_BUDGET: usize = 64;

/// `tau(b_i)` for each basis vector `b_i` of the source algebra.
#[derive(Clone, Debug)]
pub struct SplitIsomorphism {
    pub images: Vec<Matrix>,
    /// The primitive idempotent whose left ideal carries the representation.
    pub idempotent: Vec<Fe>,
    /// Random draws used over all levels.
    pub draws: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SplitIsomorphismSpec {
    pub n: usize,
    /// One row-major matrix per basis element.
    pub images: Vec<Vec<u64>>,
}

impl SplitIsomorphism {
    pub fn n(&self) -> usize {
        self.images[0].rows()
    }

    pub fn apply(&self, coords: &[Fe]) -> Matrix {
        let f = self.images[0].field().clone();
        let n = self.n();
        let mut acc = Matrix::zeros(&f, n, n);
        for (c, m) in coords.iter().zip(&self.images) {
            if !c.is_zero() {
                acc = acc.add(&m.scale(c));
            }
        }
        acc
    }

    /// Coordinates of the preimage of a matrix.
    pub fn preimage(&self, m: &Matrix) -> Result<Vec<Fe>> {
        let f = self.images[0].field().clone();
        let cols: Vec<Vec<Fe>> = self.images.iter().map(Matrix::to_vec).collect();
        Matrix::from_cols(&f, &cols)
            .solve(&m.to_vec())
            .ok_or_else(|| DescentError::Linear("matrix outside the image".into()))
    }

    /// Multiplicativity on all basis pairs, `tau(1) = I`, and bijectivity.
    pub fn verify(&self, a: &AlgebraK) -> Result<()> {
        let d = a.dim();
        verify(self.images.len() == d, || "image count".into())?;
        for i in 0..d {
            for j in 0..d {
                let prod = self.apply(&a.mul(&a.basis_vec(i), &a.basis_vec(j)));
                verify(prod == self.images[i].mul(&self.images[j]), || {
                    format!("tau is not multiplicative on ({i}, {j})")
                })?;
            }
        }
        let n = self.n();
        verify(self.apply(&a.one()) == Matrix::identity(a.field(), n), || {
            "tau(1) != I".into()
        })?;
        let cols: Vec<Vec<Fe>> = self.images.iter().map(Matrix::to_vec).collect();
        verify(Matrix::from_cols(a.field(), &cols).rank() == d, || {
            "tau is not bijective".into()
        })
    }

    pub fn spec(&self) -> SplitIsomorphismSpec {
        SplitIsomorphismSpec {
            n: self.n(),
            images: self
                .images
                .iter()
                .map(|m| m.entries().iter().map(Fe::constant).collect())
                .collect(),
        }
    }

    pub fn from_spec(field: &Field, s: &SplitIsomorphismSpec) -> SplitIsomorphism {
        SplitIsomorphism {
            images: s
                .images
                .iter()
                .map(|e| {
                    let data = e.iter().map(|&x| field.from_u64(x)).collect();
                    Matrix::from_vec(field, s.n, s.n, data)
                })
                .collect(),
            idempotent: vec![],
            draws: 0,
        }
    }
}

fn isqrt(d: usize) -> Option<usize> {
    let n = (d as f64).sqrt().round() as usize;
    (n * n == d).then_some(n)
}

/// An idempotent `h(b)` with `h = 1 mod q` and `h = 0 mod f / q`, or `None` if
/// the minimal polynomial of `b` is a power of an irreducible.
fn split_idempotent(a: &AlgebraK, b: &[Fe]) -> Option<Vec<Fe>> {
    let f = a.min_poly(b);
    let factors = f.factor();
    if factors.len() < 2 {
        return None;
    }
    let (g, e) = &factors[0];
    let q1 = g.pow(*e as u32);
    let q2 = f.div_exact(&q1);
    let (one, _s, t) = q1.xgcd(&q2);
    debug_assert_eq!(one, Poly::one(a.field()));
    let h = t.mul(&q2).rem(&f);
    Some(a.poly_eval(&h, b))
}

/// Finds a primitive idempotent of `A` (a rank-one idempotent when `A = Mat_n(K)`).
fn primitive_idempotent(a: &AlgebraK, rng: &mut ChaCha8Rng, draws: &mut usize) -> Result<Vec<Fe>> {
    let k = a.field().clone();
    // Current corner algebra and its basis in the coordinates of `a`.
    let mut cur = a.clone();
    let mut emb = Matrix::identity(&k, a.dim());
    while cur.dim() > 1 {
        let mut found = None;
        for _ in 0..RETRY_BUDGET {
            *draws += 1;
            let b = cur.random(rng);
            if let Some(e) = split_idempotent(&cur, &b) {
                let comp = cur.sub(&cur.one(), &e);
                let (c1, b1) = cur.corner(&e)?;
                let (c2, b2) = cur.corner(&comp)?;
                found = Some(if c1.dim() <= c2.dim() { (c1, b1) } else { (c2, b2) });
                break;
            }
        }
        let (next, basis) = found.ok_or_else(|| {
            DescentError::RetryExhausted(format!(
                "no splitting element in a corner of dimension {}",
                cur.dim()
            ))
        })?;
        verify(isqrt(next.dim()).is_some(), || {
            DescentError::NotSplit("corner dimension is not a square".into()).to_string()
        })?;
        emb = emb.mul(&Matrix::from_cols(&k, &basis));
        cur = next;
    }
    Ok(emb.mul_vec(&cur.one()))
}

/// The Black Box: an explicit isomorphism `A -> Mat_n(K)`, verified.
pub fn trivialize(a: &AlgebraK, seed: u64) -> Result<SplitIsomorphism> {
    let n = isqrt(a.dim())
        .ok_or_else(|| DescentError::NotSplit("dimension is not a square".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draws = 0;
    let e = primitive_idempotent(a, &mut rng, &mut draws)?;
    verify(a.mul(&e, &e) == e, || "idempotent check".into())?;
    let k = a.field().clone();
    let gens: Vec<Vec<Fe>> = (0..a.dim()).map(|i| a.mul(&a.basis_vec(i), &e)).collect();
    let ideal = span_basis(&k, &gens);
    if ideal.len() != n {
        return Err(DescentError::NotSplit(format!(
            "left ideal has dimension {} instead of {n}",
            ideal.len()
        )));
    }
    let u = Matrix::from_cols(&k, &ideal);
    let images = (0..a.dim())
        .map(|i| {
            let bi = a.basis_vec(i);
            let cols = ideal
                .iter()
                .map(|uj| {
                    u.solve(&a.mul(&bi, uj))
                        .ok_or_else(|| DescentError::Linear("left ideal not stable".into()))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Matrix::from_cols(&k, &cols))
        })
        .collect::<Result<Vec<_>>>()?;
    let iso = SplitIsomorphism {
        images,
        idempotent: e,
        draws,
    };
    iso.verify(a)
        .map_err(|err| DescentError::NotSplit(format!("output failed verification: {err}")))?;
    Ok(iso)
}

/// Matrices `B` with `B f(x) = g(x) B` for all `x`; for two isomorphisms onto
/// `Mat_n(K)` this is a one-dimensional space spanned by an invertible matrix.
pub fn intertwiners(f: &[Matrix], g: &[Matrix]) -> Vec<Matrix> {
    let k = f[0].field().clone();
    let n = f[0].rows();
    let mut rows = Vec::new();
    for (fm, gm) in f.iter().zip(g) {
        // (B F - G B)_{ij} = sum_l B_il F_lj - G_il B_lj
        for i in 0..n {
            for j in 0..n {
                let mut row = vec![k.zero(); n * n];
                for l in 0..n {
                    row[i * n + l] += fm.get(l, j);
                    row[l * n + j] -= gm.get(i, l);
                }
                rows.push(row);
            }
        }
    }
    Matrix::from_rows(&k, rows)
        .nullspace()
        .into_iter()
        .map(|v| Matrix::from_vec(&k, n, n, v))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_algebra_round_trip() {
        let k = Field::prime(7);
        let a = AlgebraK::matrix_algebra(&k, 3);
        for seed in 0..5 {
            let t = trivialize(&a, seed).unwrap();
            t.verify(&a).unwrap();
            let units: Vec<Matrix> = (0..9)
                .map(|i| {
                    let mut m = Matrix::zeros(&k, 3, 3);
                    m.set(i / 3, i % 3, k.one());
                    m
                })
                .collect();
            let b = intertwiners(&units, &t.images);
            assert_eq!(b.len(), 1);
            assert!(b[0].inverse().is_ok());
        }
    }

    #[test]
    fn rejects_non_square_dimension() {
        let k = Field::prime(5);
        let c = vec![k.one()];
        let a = AlgebraK::new(&k, 1, c).unwrap();
        let t = trivialize(&a, 0).unwrap();
        assert_eq!(t.n(), 1);
        let two = AlgebraK::new(
            &k,
            2,
            vec![k.one(), k.zero(), k.zero(), k.zero(), k.zero(), k.zero(), k.zero(), k.one()],
        )
        .unwrap();
        assert!(matches!(trivialize(&two, 0), Err(DescentError::NotSplit(_))));
    }
}
