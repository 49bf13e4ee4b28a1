//! Finite fields `F_{p^k}`, polynomials over them, and a compatible tower.

mod fe;
mod poly;
mod tower;

pub use fe::{Fe, Field, FieldSpec};
pub use poly::{nth_roots, Poly};
pub use tower::Tower;

pub(crate) use tower::gcd;

/// Deterministic primality by trial division (characteristics here are small).
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}
