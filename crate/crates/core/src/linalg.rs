//! Dense matrices over a [`Field`].

use std::fmt;

use crate::error::{DescentError, Result};
use crate::field::{Fe, Field, Poly};

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Fe>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[r * self.cols..(r + 1) * self.cols])?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Matrix {
        Matrix {
            field: field.clone(),
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: &Field, n: usize) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn scalar(c: &Fe, n: usize) -> Matrix {
        let mut m = Matrix::zeros(c.field(), n, n);
        for i in 0..n {
            m.set(i, i, c.clone());
        }
        m
    }

    pub fn from_rows(field: &Field, rows: Vec<Vec<Fe>>) -> Matrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Matrix {
            field: field.clone(),
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_i64(field: &Field, rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(
            field,
            rows.iter()
                .map(|r| r.iter().map(|&v| field.from_i64(v)).collect())
                .collect(),
        )
    }

    pub fn from_cols(field: &Field, cols: &[Vec<Fe>]) -> Matrix {
        let c = cols.len();
        let r = cols.first().map_or(0, |x| x.len());
        let mut m = Matrix::zeros(field, r, c);
        for (j, col) in cols.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Fe {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Fe) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> Vec<Fe> {
        self.data[r * self.cols..(r + 1) * self.cols].to_vec()
    }

    pub fn col(&self, c: usize) -> Vec<Fe> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn entries(&self) -> &[Fe] {
        &self.data
    }

    pub fn map(&self, target: &Field, f: impl Fn(&Fe) -> Fe) -> Matrix {
        Matrix {
            field: target.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(&self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Fe::is_zero)
    }

    pub fn add(&self, o: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let mut m = self.clone();
        for (x, y) in m.data.iter_mut().zip(o.data.iter()) {
            *x += y;
        }
        m
    }

    pub fn sub(&self, o: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let mut m = self.clone();
        for (x, y) in m.data.iter_mut().zip(o.data.iter()) {
            *x -= y;
        }
        m
    }

    pub fn scale(&self, s: &Fe) -> Matrix {
        let mut m = self.clone();
        for x in m.data.iter_mut() {
            *x = &*x * s;
        }
        m
    }

    pub fn mul(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.cols, o.rows, "dimension mismatch in product");
        let mut m = Matrix::zeros(&self.field, self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * o.cols + j;
                    m.data[idx] = &m.data[idx] + &(a * b);
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[Fe]) -> Vec<Fe> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = self.field.zero();
                for (a, b) in self.data[i * self.cols..(i + 1) * self.cols].iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += &(a * b);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn pow(&self, e: u64) -> Matrix {
        assert!(self.is_square());
        let mut acc = Matrix::identity(&self.field, self.rows);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn trace(&self) -> Fe {
        assert!(self.is_square());
        let mut acc = self.field.zero();
        for i in 0..self.rows {
            acc += self.get(i, i);
        }
        acc
    }

    /// Scalar matrix test; returns the scalar.
    pub fn as_scalar(&self) -> Option<Fe> {
        if !self.is_square() || self.rows == 0 {
            return None;
        }
        let c = self.get(0, 0).clone();
        for r in 0..self.rows {
            for s in 0..self.cols {
                let v = self.get(r, s);
                if (r == s && *v != c) || (r != s && !v.is_zero()) {
                    return None;
                }
            }
        }
        Some(c)
    }

    /// Reduced row echelon form, returning the pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, pr);
            let inv = m.get(r, c).inv().unwrap();
            for j in c..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let rj = m.get(r, j);
                    if rj.is_zero() {
                        continue;
                    }
                    let v = m.get(i, j) - &(&f * rj);
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel `{v : M v = 0}`.
    pub fn nullspace(&self) -> Vec<Vec<Fe>> {
        let (m, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![self.field.zero(); self.cols];
                v[f] = self.field.one();
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = m.get(r, f).neg_ref();
                }
                v
            })
            .collect()
    }

    /// Basis of the left kernel `{v : v M = 0}`.
    pub fn left_nullspace(&self) -> Vec<Vec<Fe>> {
        self.transpose().nullspace()
    }

    /// One solution of `M x = b`, if any.
    pub fn solve(&self, b: &[Fe]) -> Option<Vec<Fe>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Matrix::zeros(&self.field, self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c).clone());
            }
            aug.set(r, self.cols, b[r].clone());
        }
        let (m, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![self.field.zero(); self.cols];
        for (r, &pc) in pivots.iter().enumerate() {
            x[pc] = m.get(r, self.cols).clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(DescentError::Linear("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(&self.field, n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.get(r, c).clone());
            }
            aug.set(r, n + r, self.field.one());
        }
        let (m, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(DescentError::Linear("singular matrix".into()));
        }
        let mut inv = Matrix::zeros(&self.field, n, n);
        for r in 0..n {
            for c in 0..n {
                inv.set(r, c, m.get(r, n + c).clone());
            }
        }
        Ok(inv)
    }

    pub fn det(&self) -> Fe {
        assert!(self.is_square());
        let mut m = self.clone();
        let n = self.rows;
        let mut det = self.field.one();
        for c in 0..n {
            let Some(pr) = (c..n).find(|&i| !m.get(i, c).is_zero()) else {
                return self.field.zero();
            };
            if pr != c {
                m.swap_rows(pr, c);
                det = det.neg_ref();
            }
            let piv = m.get(c, c).clone();
            det = &det * &piv;
            let inv = piv.inv().unwrap();
            for i in c + 1..n {
                let f = m.get(i, c) * &inv;
                if f.is_zero() {
                    continue;
                }
                for j in c..n {
                    let v = m.get(i, j) - &(&f * m.get(c, j));
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    /// Characteristic polynomial `det(xI - M)`, assembled from Krylov blocks.
    pub fn charpoly(&self) -> Poly {
        assert!(self.is_square());
        let n = self.rows;
        let f = &self.field;
        let mut result = Poly::one(f);
        let mut basis: Vec<Vec<Fe>> = Vec::new();
        let mut covered = 0;
        let mut e = 0;
        while covered < n {
            // pick the next unit vector not in the span
            let mut v = vec![f.zero(); n];
            v[e] = f.one();
            e += 1;
            let mut chain = vec![v.clone()];
            loop {
                let mut all = basis.clone();
                all.extend(chain.iter().cloned());
                let mat = Matrix::from_cols(f, &all);
                if mat.rank() < all.len() {
                    chain.pop();
                    break;
                }
                let next = self.mul_vec(chain.last().unwrap());
                chain.push(next);
            }
            if chain.is_empty() {
                continue;
            }
            // The chain spans a subspace invariant modulo the previous basis.
            // Express M * last in terms of basis + chain to read off the
            // relative polynomial.
            let k = chain.len();
            let mut all = basis.clone();
            all.extend(chain.iter().cloned());
            let mat = Matrix::from_cols(f, &all);
            let target = self.mul_vec(chain.last().unwrap());
            let coeffs = mat.solve(&target).expect("Krylov relation");
            let off = basis.len();
            let mut pc: Vec<Fe> = (0..k).map(|i| coeffs[off + i].neg_ref()).collect();
            pc.push(f.one());
            result = result.mul(&Poly::new(f, pc));
            covered += k;
            basis.extend(chain);
        }
        result
    }

    /// Kronecker product.
    pub fn kron(&self, o: &Matrix) -> Matrix {
        let mut m = Matrix::zeros(&self.field, self.rows * o.rows, self.cols * o.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..o.rows {
                    for l in 0..o.cols {
                        m.set(i * o.rows + k, j * o.cols + l, a * o.get(k, l));
                    }
                }
            }
        }
        m
    }

    /// Row-major flattening.
    pub fn to_vec(&self) -> Vec<Fe> {
        self.data.clone()
    }

    pub fn from_vec(field: &Field, rows: usize, cols: usize, data: Vec<Fe>) -> Matrix {
        assert_eq!(data.len(), rows * cols);
        Matrix {
            field: field.clone(),
            rows,
            cols,
            data,
        }
    }
}

/// Row span basis (RREF rows) of a list of vectors.
pub fn span_basis(field: &Field, vecs: &[Vec<Fe>]) -> Vec<Vec<Fe>> {
    if vecs.is_empty() {
        return vec![];
    }
    let m = Matrix::from_rows(field, vecs.to_vec());
    let (r, piv) = m.rref();
    (0..piv.len()).map(|i| r.row(i)).collect()
}
