use std::collections::BTreeMap;
use std::sync::{Arc, RwLock};

use super::fe::{inv_mod, Fe, Field};
use super::poly::Poly;

/// Linear embedding `F_{p^d} -> F_{p^e}`, stored as the images of `g^i`.
#[derive(Debug, Clone)]
struct Embedding {
    /// `cols[i]` = image of `g_d^i` as coefficients in `F_{p^e}`.
    cols: Vec<Vec<u64>>,
    /// Row indices selecting an invertible `d x d` submatrix.
    pivots: Vec<usize>,
    /// Inverse of that submatrix, row major.
    pivot_inv: Vec<Vec<u64>>,
    /// Image of the generator of the smaller field.
    image: Fe,
}

#[derive(Debug, Default)]
struct Inner {
    fields: BTreeMap<usize, Field>,
    embeddings: BTreeMap<(usize, usize), Embedding>,
}

/// A divisor-closed family of extensions of `F_p` with compatible embeddings.
///
/// Each degree `d` gets one field; for `d | e` the embedding `F_{p^d} -> F_{p^e}`
/// is chosen so that all embeddings commute.
#[derive(Debug, Clone)]
pub struct Tower {
    p: u64,
    inner: Arc<RwLock<Inner>>,
}

impl Tower {
    pub fn new(p: u64) -> Tower {
        assert!(p > 3 && p < (1 << 31), "characteristic must be a prime in (3, 2^31)");
        let t = Tower {
            p,
            inner: Arc::new(RwLock::new(Inner::default())),
        };
        t.inner.write().unwrap().fields.insert(1, Field::prime(p));
        t
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn prime(&self) -> Field {
        self.field(1)
    }

    /// The field of degree `d`, creating it (and every divisor) on first use.
    pub fn field(&self, d: usize) -> Field {
        assert!(d >= 1);
        if let Some(f) = self.inner.read().unwrap().fields.get(&d) {
            return f.clone();
        }
        self.extend(d);
        self.inner.read().unwrap().fields[&d].clone()
    }

    /// Degrees currently present.
    pub fn degrees(&self) -> Vec<usize> {
        self.inner.read().unwrap().fields.keys().copied().collect()
    }

    /// Makes sure fields of every degree dividing `e` exist.
    pub fn extend(&self, e: usize) {
        for d in divisors(e) {
            if self.inner.read().unwrap().fields.contains_key(&d) {
                continue;
            }
            self.create(d);
        }
    }

    fn create(&self, e: usize) {
        let modulus = first_irreducible(self.p, e);
        let big = Field::from_modulus(self.p, modulus);
        let mut inner = self.inner.write().unwrap();
        let mut proper: Vec<usize> = divisors(e).into_iter().filter(|&d| d < e).collect();
        proper.reverse();
        let mut chosen: BTreeMap<usize, Embedding> = BTreeMap::new();
        for d in proper {
            if d == 1 {
                chosen.insert(1, prime_embedding(&big));
                continue;
            }
            // Forced through an already chosen intermediate field?
            if let Some((&m, emb_m)) = chosen.iter().find(|(&m, _)| m % d == 0) {
                let inner_emb = &inner.embeddings[&(d, m)];
                let img = embed_with(emb_m, &big, &inner_emb.image);
                chosen.insert(d, make_embedding(&inner.fields[&d], &big, img));
                continue;
            }
            let small = inner.fields[&d].clone();
            let lifted = Poly::new(
                &big,
                small.modulus().iter().map(|&c| big.from_u64(c)).collect(),
            );
            let mut found = None;
            for r in lifted.roots() {
                let cand = make_embedding(&small, &big, r);
                let ok = chosen.iter().all(|(&d2, emb2)| {
                    let g = gcd(d, d2);
                    if g == 1 {
                        return true;
                    }
                    let gen_g = inner.fields[&g].generator();
                    let via_d = if g == d {
                        gen_g.clone()
                    } else {
                        embed_with(&inner.embeddings[&(g, d)], &inner.fields[&d], &gen_g)
                    };
                    let via_d2 = if g == d2 {
                        gen_g.clone()
                    } else {
                        embed_with(&inner.embeddings[&(g, d2)], &inner.fields[&d2], &gen_g)
                    };
                    embed_with(&cand, &big, &via_d) == embed_with(emb2, &big, &via_d2)
                });
                if ok {
                    found = Some(cand);
                    break;
                }
            }
            chosen.insert(d, found.expect("no compatible embedding exists"));
        }
        for (d, emb) in chosen {
            inner.embeddings.insert((d, e), emb);
        }
        inner.fields.insert(e, big);
    }

    /// Image of `x` in the field of degree `deg` (which must be a multiple).
    pub fn embed(&self, x: &Fe, deg: usize) -> Fe {
        let d = x.field().degree();
        assert!(deg.is_multiple_of(d), "cannot embed degree {d} into degree {deg}");
        if d == deg {
            return x.clone();
        }
        let target = self.field(deg);
        let inner = self.inner.read().unwrap();
        embed_with(&inner.embeddings[&(d, deg)], &target, x)
    }

    /// Preimage of `x` in the field of degree `deg`, if it lies there.
    pub fn restrict(&self, x: &Fe, deg: usize) -> Option<Fe> {
        let e = x.field().degree();
        if !e.is_multiple_of(deg) {
            return None;
        }
        if deg == e {
            return Some(x.clone());
        }
        let small = self.field(deg);
        let inner = self.inner.read().unwrap();
        let emb = &inner.embeddings[&(deg, e)];
        let p = self.p;
        let coords: Vec<u64> = emb
            .pivot_inv
            .iter()
            .map(|row| {
                row.iter()
                    .zip(emb.pivots.iter())
                    .fold(0u64, |acc, (&a, &r)| (acc + a * x.coeffs()[r]) % p)
            })
            .collect();
        let y = small.from_coeffs(&coords);
        if embed_with(emb, x.field(), &y) == *x {
            Some(y)
        } else {
            None
        }
    }

    /// Restriction to the prime field.
    pub fn to_prime(&self, x: &Fe) -> Option<Fe> {
        self.restrict(x, 1)
    }

    /// Smallest degree of a subfield containing `x`.
    pub fn min_degree(&self, x: &Fe) -> usize {
        let k = x.field().degree();
        divisors(k)
            .into_iter()
            .find(|&d| x.frobenius_n(d) == *x)
            .unwrap_or(k)
    }

    /// Brings two elements into a common field (degree = lcm).
    pub fn common(&self, a: &Fe, b: &Fe) -> (Fe, Fe) {
        let (da, db) = (a.field().degree(), b.field().degree());
        let l = da / gcd(da, db) * db;
        (self.embed(a, l), self.embed(b, l))
    }

    /// The image of the generator of `F_{p^d}` in `F_{p^e}`.
    pub fn generator_image(&self, d: usize, e: usize) -> Fe {
        let small = self.field(d);
        self.embed(&small.generator(), e)
    }
}

fn embed_with(emb: &Embedding, target: &Field, x: &Fe) -> Fe {
    let p = target.p();
    let mut out = vec![0u64; target.degree()];
    for (xi, col) in x.coeffs().iter().zip(emb.cols.iter()) {
        if *xi == 0 {
            continue;
        }
        for (o, c) in out.iter_mut().zip(col.iter()) {
            *o = (*o + xi * c) % p;
        }
    }
    target.from_coeffs(&out)
}

fn prime_embedding(big: &Field) -> Embedding {
    make_embedding(&Field::prime(big.p()), big, big.one())
}

fn make_embedding(small: &Field, big: &Field, image: Fe) -> Embedding {
    let d = small.degree();
    let e = big.degree();
    let p = big.p();
    let mut cols = Vec::with_capacity(d);
    let mut pw = big.one();
    for _ in 0..d {
        cols.push(pw.to_u64_vec());
        pw = &pw * &image;
    }
    // Choose pivot rows by elimination on the transpose.
    let mut rows: Vec<Vec<u64>> = (0..e).map(|r| cols.iter().map(|c| c[r]).collect()).collect();
    let mut pivots = Vec::new();
    let mut basis: Vec<(usize, Vec<u64>)> = Vec::new();
    for (r, row) in rows.iter_mut().enumerate() {
        let mut v = row.clone();
        for (col, b) in &basis {
            if v[*col] != 0 {
                let f = v[*col];
                for (x, y) in v.iter_mut().zip(b.iter()) {
                    *x = (*x + p - f * y % p) % p;
                }
            }
        }
        if let Some(col) = v.iter().position(|&x| x != 0) {
            let inv = inv_mod(v[col], p);
            for x in v.iter_mut() {
                *x = *x * inv % p;
            }
            basis.push((col, v));
            pivots.push(r);
            if pivots.len() == d {
                break;
            }
        }
    }
    assert_eq!(pivots.len(), d, "embedding is not injective");
    let sub: Vec<Vec<u64>> = pivots.iter().map(|&r| cols.iter().map(|c| c[r]).collect()).collect();
    let pivot_inv = invert_mod_p(&sub, p);
    Embedding {
        cols,
        pivots,
        pivot_inv,
        image,
    }
}

fn invert_mod_p(m: &[Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    let n = m.len();
    let mut a: Vec<Vec<u64>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| u64::from(i == j)));
            r
        })
        .collect();
    for c in 0..n {
        let piv = (c..n).find(|&r| a[r][c] != 0).expect("singular pivot block");
        a.swap(c, piv);
        let inv = inv_mod(a[c][c], p);
        for x in a[c].iter_mut() {
            *x = *x * inv % p;
        }
        for r in 0..n {
            if r != c && a[r][c] != 0 {
                let f = a[r][c];
                let pivot_row = a[c].clone();
                for (x, y) in a[r].iter_mut().zip(pivot_row.iter()) {
                    *x = (*x + p - f * y % p) % p;
                }
            }
        }
    }
    a.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// First monic irreducible of degree `e` in lexicographic order of the
/// lower coefficients read as a base-p integer.
fn first_irreducible(p: u64, e: usize) -> Vec<u64> {
    let fp = Field::prime(p);
    let mut idx: u64 = 0;
    loop {
        let mut c = Vec::with_capacity(e + 1);
        let mut t = idx;
        for _ in 0..e {
            c.push(t % p);
            t /= p;
        }
        c.push(1);
        if c[0] != 0 && Poly::from_u64(&fp, &c).is_irreducible() {
            return c;
        }
        idx += 1;
    }
}

pub(crate) fn divisors(n: usize) -> Vec<usize> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

pub(crate) fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f49_has_no_root_of_x2_plus_1_below() {
        let t = Tower::new(7);
        let f = t.field(2);
        assert_eq!(f.degree(), 2);
        let m = Poly::from_u64(&f, &[1, 0, 1]);
        assert_eq!(m.roots().len(), 2);
        let base = Poly::from_u64(&t.prime(), &[1, 0, 1]);
        assert!(base.roots().is_empty());
    }

    #[test]
    fn degree_four_contains_degree_two() {
        let t = Tower::new(13);
        let f4 = t.field(4);
        let f2 = t.field(2);
        for x in f2.elements() {
            let y = t.embed(&x, 4);
            assert_eq!(t.restrict(&y, 2), Some(x.clone()));
            assert_eq!(y.field().degree(), 4);
        }
        let g = f4.generator();
        assert!(t.restrict(&g, 2).is_none());
        assert_eq!(t.min_degree(&g), 4);
    }

    #[test]
    fn embeddings_commute() {
        let t = Tower::new(5);
        t.extend(12);
        for (d, m) in [(1, 2), (2, 4), (2, 6), (3, 6), (4, 12), (6, 12), (3, 12)] {
            for x in t.field(d).elements().take(40) {
                let direct = t.embed(&x, 12);
                let via = t.embed(&t.embed(&x, m), 12);
                assert_eq!(direct, via, "d={d} m={m}");
            }
        }
    }

    #[test]
    fn embedding_is_a_ring_map() {
        let t = Tower::new(7);
        let f3 = t.field(3);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        use rand::SeedableRng;
        for _ in 0..20 {
            let a = f3.random(&mut rng);
            let b = f3.random(&mut rng);
            assert_eq!(t.embed(&(&a * &b), 6), t.embed(&a, 6) * t.embed(&b, 6));
            assert_eq!(t.embed(&a.frobenius(), 6), t.embed(&a, 6).frobenius());
        }
    }
}
