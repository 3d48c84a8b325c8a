//! Definite quaternion algebras ramified at a single prime, their maximal
//! orders and left ideal classes.

mod classes;
mod enumerate;
mod lattice;
mod order;

pub use classes::{
    expected_shape, ideal_norm, is_equivalent, left_ideal_classes, neighbors, IdealClassData,
};
pub use enumerate::{lll_reduce, theta_counts, visit_short_vectors, IntGram};
pub use lattice::Lattice;
pub use order::{
    is_order, maximal_order, reduced_discriminant, right_order, short_vectors, unit_half_count,
};

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{check_level, is_prime, kronecker, Rational};
use crate::error::{Error, Result};

/// The algebra `(a, b)_Q` with basis `1, i, j, k`, `i^2 = a`, `j^2 = b`, `k = ij = -ji`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuaternionAlgebra {
    pub a: i64,
    pub b: i64,
    pub level: u64,
}

impl QuaternionAlgebra {
    /// Product of integer coordinate vectors.
    pub(crate) fn mul_int(&self, x: &[BigInt; 4], y: &[BigInt; 4]) -> [BigInt; 4] {
        let a = BigInt::from(self.a);
        let b = BigInt::from(self.b);
        let ab = &a * &b;
        [
            &x[0] * &y[0] + &a * &x[1] * &y[1] + &b * &x[2] * &y[2] - &ab * &x[3] * &y[3],
            &x[0] * &y[1] + &x[1] * &y[0] - &b * &x[2] * &y[3] + &b * &x[3] * &y[2],
            &x[0] * &y[2] + &x[2] * &y[0] + &a * &x[1] * &y[3] - &a * &x[3] * &y[1],
            &x[0] * &y[3] + &x[3] * &y[0] + &x[1] * &y[2] - &x[2] * &y[1],
        ]
    }

    /// `trd(x * conj(y))` on integer coordinate vectors.
    pub(crate) fn trace_pairing_int(&self, x: &[BigInt; 4], y: &[BigInt; 4]) -> BigInt {
        let a = BigInt::from(self.a);
        let b = BigInt::from(self.b);
        (&x[0] * &y[0] - &a * &x[1] * &y[1] - &b * &x[2] * &y[2] + &a * &b * &x[3] * &y[3]) * 2
    }

    /// Ramified places other than infinity, among the primes dividing `2abN`.
    pub fn finite_ramification(&self) -> Vec<u64> {
        let mut candidates = vec![2u64, self.level];
        for v in [self.a.unsigned_abs(), self.b.unsigned_abs()] {
            for (p, _) in crate::arith::factorize(v) {
                candidates.push(p);
            }
        }
        candidates.sort_unstable();
        candidates.dedup();
        candidates
            .into_iter()
            .filter(|&p| hilbert_symbol(self.a, self.b, p) == -1)
            .collect()
    }

    pub fn is_definite(&self) -> bool {
        self.a < 0 && self.b < 0
    }
}

fn split_power(mut x: i64, p: i64) -> (u32, i64) {
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    (v, x)
}

/// Local Hilbert symbol `(a, b)_p` for a prime `p`.
pub fn hilbert_symbol(a: i64, b: i64, p: u64) -> i32 {
    assert!(a != 0 && b != 0);
    let p_i = p as i64;
    let (alpha, u) = split_power(a, p_i);
    let (beta, v) = split_power(b, p_i);
    if p == 2 {
        let eps = |x: i64| ((x.rem_euclid(4) - 1) / 2) as u32 & 1;
        let omega = |x: i64| {
            let r = x.rem_euclid(8);
            if r == 3 || r == 5 {
                1
            } else {
                0
            }
        };
        let e = eps(u) * eps(v) + alpha * omega(v) + beta * omega(u);
        if e % 2 == 0 {
            1
        } else {
            -1
        }
    } else {
        // (-1)^{alpha beta eps(p)} (u|p)^beta (v|p)^alpha
        let mut s = if (alpha * beta) % 2 == 1 && p % 4 == 3 {
            -1
        } else {
            1
        };
        if beta % 2 == 1 {
            s *= kronecker(u, p_i);
        }
        if alpha % 2 == 1 {
            s *= kronecker(v, p_i);
        }
        s
    }
}

/// A presentation of the definite algebra ramified exactly at `{N, oo}`.
pub fn build_algebra(level: u64) -> Result<QuaternionAlgebra> {
    check_level(level)?;
    let n = level as i64;
    let a = if level % 4 == 3 {
        -1
    } else if level % 8 == 5 {
        -2
    } else {
        let q = (3..)
            .step_by(4)
            .find(|&q: &u64| is_prime(q) && kronecker(q as i64, n) == -1)
            .expect("a non-residue prime 3 mod 4 exists");
        -(q as i64)
    };
    let alg = QuaternionAlgebra { a, b: -n, level };
    if !alg.is_definite() || alg.finite_ramification() != vec![level] {
        return Err(Error::Verification(format!(
            "({a}, {}) is not ramified exactly at {{{level}, oo}}",
            -n
        )));
    }
    Ok(alg)
}

/// An element of the algebra with rational coordinates on `1, i, j, k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuaternionElement {
    pub coords: [Rational; 4],
}

impl QuaternionElement {
    pub fn new(coords: [Rational; 4]) -> Self {
        QuaternionElement { coords }
    }

    pub fn from_ints(c: [i64; 4]) -> Self {
        QuaternionElement {
            coords: c.map(|x| Rational::from_integer(BigInt::from(x))),
        }
    }

    pub fn one() -> Self {
        Self::from_ints([1, 0, 0, 0])
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn conj(&self) -> Self {
        let c = &self.coords;
        QuaternionElement {
            coords: [c[0].clone(), -c[1].clone(), -c[2].clone(), -c[3].clone()],
        }
    }

    pub fn reduced_trace(&self) -> Rational {
        &self.coords[0] * Rational::from_integer(BigInt::from(2))
    }

    pub fn reduced_norm(&self, alg: &QuaternionAlgebra) -> Rational {
        let c = &self.coords;
        let a = Rational::from_integer(BigInt::from(alg.a));
        let b = Rational::from_integer(BigInt::from(alg.b));
        &c[0] * &c[0] - &a * &c[1] * &c[1] - &b * &c[2] * &c[2] + &a * &b * &c[3] * &c[3]
    }

    pub fn mul(&self, other: &Self, alg: &QuaternionAlgebra) -> Self {
        let (x, dx) = self.to_int();
        let (y, dy) = other.to_int();
        let z = alg.mul_int(&x, &y);
        let den = dx * dy;
        QuaternionElement {
            coords: z.map(|v| Rational::new(v, den.clone())),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        QuaternionElement {
            coords: std::array::from_fn(|t| &self.coords[t] + &other.coords[t]),
        }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        QuaternionElement {
            coords: std::array::from_fn(|t| &self.coords[t] * r),
        }
    }

    /// Integer coordinates over a common positive denominator.
    pub(crate) fn to_int(&self) -> ([BigInt; 4], BigInt) {
        let mut den = BigInt::one();
        for c in &self.coords {
            den = num_integer::lcm(den, c.denom().clone());
        }
        let coords = std::array::from_fn(|t| {
            (&self.coords[t] * Rational::from_integer(den.clone())).to_integer()
        });
        (coords, den.abs())
    }
}

impl fmt::Display for QuaternionElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.coords;
        write!(f, "{} + {}i + {}j + {}k", c[0], c[1], c[2], c[3])
    }
}
