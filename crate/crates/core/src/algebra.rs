//! Finite-dimensional associative algebras over `K`, by structure constants.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{verify, DescentError, Result};
use crate::etale::{Etale, R2Elt};
use crate::field::{Fe, Field, Poly};
use crate::linalg::Matrix;

/// `b_i b_j = sum_k c[(i * dim + j) * dim + k] b_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraK {
    field: Field,
    dim: usize,
    c: Vec<Fe>,
    one: Vec<Fe>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct AlgebraSpec {
    pub p: u64,
    pub dim: usize,
    pub structure_constants: Vec<u64>,
    pub identity: Vec<u64>,
}

impl AlgebraK {
    /// Builds the algebra and locates its two-sided identity.
    pub fn new(field: &Field, dim: usize, c: Vec<Fe>) -> Result<AlgebraK> {
        verify(c.len() == dim * dim * dim, || "structure constant count".into())?;
        // Unknowns e_i: sum_i e_i c_ijk = delta_jk and sum_i e_i c_jik = delta_jk.
        let mut rows = Vec::with_capacity(2 * dim * dim);
        let mut rhs = Vec::with_capacity(2 * dim * dim);
        for j in 0..dim {
            for k in 0..dim {
                rows.push((0..dim).map(|i| c[(i * dim + j) * dim + k].clone()).collect());
                rows.push((0..dim).map(|i| c[(j * dim + i) * dim + k].clone()).collect());
                let d = if j == k { field.one() } else { field.zero() };
                rhs.push(d.clone());
                rhs.push(d);
            }
        }
        let m = Matrix::from_rows(field, rows);
        let one = m
            .solve(&rhs)
            .ok_or_else(|| DescentError::InvalidInput("algebra has no identity".into()))?;
        Ok(AlgebraK {
            field: field.clone(),
            dim,
            c,
            one,
        })
    }

    /// `(R, *_rho)` in the basis `r_i`: `c_ijk = tr((r_i *_rho r_j) r_k*)`.
    pub fn from_twisted_product(et: &Etale, rho: &R2Elt) -> Result<AlgebraK> {
        verify(et.is_rational2(rho), || "twist is not K-rational".into())?;
        let dim = et.dim();
        let mut c = Vec::with_capacity(dim * dim * dim);
        for ri in et.basis() {
            for rj in et.basis() {
                let prod = et.star(rho, ri, rj);
                c.extend(et.coords(&prod)?);
            }
        }
        AlgebraK::new(&et.k(), dim, c)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn structure_constants(&self) -> &[Fe] {
        &self.c
    }

    pub fn constant(&self, i: usize, j: usize, k: usize) -> &Fe {
        &self.c[(i * self.dim + j) * self.dim + k]
    }

    pub fn one(&self) -> Vec<Fe> {
        self.one.clone()
    }

    pub fn zero(&self) -> Vec<Fe> {
        vec![self.field.zero(); self.dim]
    }

    pub fn basis_vec(&self, i: usize) -> Vec<Fe> {
        let mut v = self.zero();
        v[i] = self.field.one();
        v
    }

    pub fn add(&self, x: &[Fe], y: &[Fe]) -> Vec<Fe> {
        x.iter().zip(y).map(|(a, b)| a + b).collect()
    }

    pub fn sub(&self, x: &[Fe], y: &[Fe]) -> Vec<Fe> {
        x.iter().zip(y).map(|(a, b)| a - b).collect()
    }

    pub fn scale(&self, x: &[Fe], s: &Fe) -> Vec<Fe> {
        x.iter().map(|a| a * s).collect()
    }

    pub fn mul(&self, x: &[Fe], y: &[Fe]) -> Vec<Fe> {
        let d = self.dim;
        let mut out = self.zero();
        for i in 0..d {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..d {
                if y[j].is_zero() {
                    continue;
                }
                let xy = &x[i] * &y[j];
                let base = (i * d + j) * d;
                for (k, o) in out.iter_mut().enumerate() {
                    let c = &self.c[base + k];
                    if !c.is_zero() {
                        *o += &(&xy * c);
                    }
                }
            }
        }
        out
    }

    /// Matrix of `y -> x y` (columns are images of basis vectors).
    pub fn left_matrix(&self, x: &[Fe]) -> Matrix {
        let cols: Vec<Vec<Fe>> = (0..self.dim).map(|j| self.mul(x, &self.basis_vec(j))).collect();
        Matrix::from_cols(&self.field, &cols)
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Fe> {
        (0..self.dim).map(|_| self.field.random(rng)).collect()
    }

    pub fn pow(&self, x: &[Fe], e: usize) -> Vec<Fe> {
        let mut acc = self.one();
        for _ in 0..e {
            acc = self.mul(&acc, x);
        }
        acc
    }

    /// Minimal polynomial of `x` over `K`, from linear relations among powers.
    pub fn min_poly(&self, x: &[Fe]) -> Poly {
        let mut powers = vec![self.one()];
        loop {
            let k = powers.len();
            let next = self.mul(&powers[k - 1], x);
            let mut cols = powers.clone();
            cols.push(next.clone());
            let m = Matrix::from_cols(&self.field, &cols);
            let ns = m.nullspace();
            if let Some(v) = ns.first() {
                let lead = v[k].inv().expect("lower powers are independent");
                let coeffs = v.iter().map(|c| c * &lead).collect();
                return Poly::new(&self.field, coeffs);
            }
            powers.push(next);
        }
    }

    pub fn poly_eval(&self, f: &Poly, x: &[Fe]) -> Vec<Fe> {
        let mut acc = self.zero();
        for i in (0..=f.degree().unwrap_or(0)).rev() {
            acc = self.mul(&acc, x);
            acc = self.add(&acc, &self.scale(&self.one, &f.coeff(i)));
        }
        acc
    }

    pub fn is_associative(&self) -> bool {
        let d = self.dim;
        (0..d).all(|i| {
            (0..d).all(|j| {
                let bij = self.mul(&self.basis_vec(i), &self.basis_vec(j));
                (0..d).all(|k| {
                    let bk = self.basis_vec(k);
                    self.mul(&bij, &bk)
                        == self.mul(&self.basis_vec(i), &self.mul(&self.basis_vec(j), &bk))
                })
            })
        })
    }

    pub fn is_commutative(&self) -> bool {
        let d = self.dim;
        (0..d).all(|i| (0..d).all(|j| (0..d).all(|k| self.constant(i, j, k) == self.constant(j, i, k))))
    }

    /// Dimension of the center.
    pub fn center_dim(&self) -> usize {
        let d = self.dim;
        let mut rows = Vec::new();
        for j in 0..d {
            for k in 0..d {
                rows.push(
                    (0..d)
                        .map(|i| self.constant(i, j, k) - self.constant(j, i, k))
                        .collect(),
                );
            }
        }
        d - Matrix::from_rows(&self.field, rows).rank()
    }

    /// The corner algebra `eAe` of an idempotent, with its basis as vectors of `A`.
    pub fn corner(&self, e: &[Fe]) -> Result<(AlgebraK, Vec<Vec<Fe>>)> {
        verify(self.mul(e, e) == e, || "not an idempotent".into())?;
        let gens: Vec<Vec<Fe>> = (0..self.dim)
            .map(|i| self.mul(&self.mul(e, &self.basis_vec(i)), e))
            .collect();
        let basis = crate::linalg::span_basis(&self.field, &gens);
        let k = basis.len();
        let bm = Matrix::from_cols(&self.field, &basis);
        let mut c = Vec::with_capacity(k * k * k);
        for bi in &basis {
            for bj in &basis {
                let prod = self.mul(bi, bj);
                let co = bm
                    .solve(&prod)
                    .ok_or_else(|| DescentError::Linear("corner not closed".into()))?;
                c.extend(co);
            }
        }
        Ok((AlgebraK::new(&self.field, k, c)?, basis))
    }

    pub fn spec(&self) -> AlgebraSpec {
        AlgebraSpec {
            p: self.field.p(),
            dim: self.dim,
            structure_constants: self.c.iter().map(Fe::constant).collect(),
            identity: self.one.iter().map(Fe::constant).collect(),
        }
    }

    pub fn from_spec(s: &AlgebraSpec) -> Result<AlgebraK> {
        let f = Field::prime(s.p);
        let c = s.structure_constants.iter().map(|&x| f.from_u64(x)).collect();
        let a = AlgebraK::new(&f, s.dim, c)?;
        verify(a.one.iter().map(Fe::constant).eq(s.identity.iter().copied()), || {
            "identity mismatch".into()
        })?;
        Ok(a)
    }

    /// `Mat_n(K)` in the basis of matrix units `E_ij` (index `i * n + j`).
    pub fn matrix_algebra(field: &Field, n: usize) -> AlgebraK {
        let d = n * n;
        let mut c = vec![field.zero(); d * d * d];
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    c[((i * n + j) * d + (j * n + l)) * d + (i * n + l)] = field.one();
                }
            }
        }
        AlgebraK::new(field, d, c).expect("matrix algebra has an identity")
    }
}
