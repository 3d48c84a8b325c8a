use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{QuaternionAlgebra, QuaternionElement};
use crate::arith::Rational;
use crate::error::{Error, Result};

/// A full-rank Z-lattice in the algebra, stored as `(1/den) * rows` with the
/// integer rows in Hermite normal form. Equal lattices have equal
/// representations.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Lattice {
    den: BigInt,
    rows: [[BigInt; 4]; 4],
}

impl PartialOrd for Lattice {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Lattice {
    fn cmp(&self, other: &Self) -> Ordering {
        self.den
            .cmp(&other.den)
            .then_with(|| self.rows.cmp(&other.rows))
    }
}

/// Upper triangular row HNF of a rank 4 integer generating set.
fn hnf(gens: Vec<[BigInt; 4]>) -> Option<[[BigInt; 4]; 4]> {
    let mut pool: Vec<[BigInt; 4]> = gens
        .into_iter()
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .collect();
    let mut out: Vec<[BigInt; 4]> = Vec::with_capacity(4);
    for col in 0..4 {
        loop {
            let pivot = pool
                .iter()
                .enumerate()
                .filter(|(_, r)| !r[col].is_zero())
                .min_by(|(_, x), (_, y)| x[col].abs().cmp(&y[col].abs()))
                .map(|(idx, _)| idx)?;
            let p = pool[pivot].clone();
            let mut clean = true;
            for (idx, r) in pool.iter_mut().enumerate() {
                if idx == pivot || r[col].is_zero() {
                    continue;
                }
                let q = r[col].div_floor(&p[col]);
                for t in col..4 {
                    r[t] -= &q * &p[t];
                }
                if !r[col].is_zero() {
                    clean = false;
                }
            }
            if clean {
                let mut p = pool.swap_remove(pivot);
                if p[col].is_negative() {
                    for x in p.iter_mut() {
                        *x = -x.clone();
                    }
                }
                out.push(p);
                pool.retain(|r| r.iter().any(|x| !x.is_zero()));
                break;
            }
        }
    }
    if !pool.is_empty() {
        // Cannot happen for generators of a rank 4 lattice in Q^4.
        return None;
    }
    for k in 0..4 {
        for r in 0..k {
            let q = out[r][k].div_floor(&out[k][k]);
            if !q.is_zero() {
                let pk = out[k].clone();
                for t in k..4 {
                    out[r][t] -= &q * &pk[t];
                }
            }
        }
    }
    Some([
        out[0].clone(),
        out[1].clone(),
        out[2].clone(),
        out[3].clone(),
    ])
}

impl Lattice {
    /// Lattice spanned by `gens / den`.
    pub fn from_int_generators(gens: Vec<[BigInt; 4]>, den: BigInt) -> Result<Lattice> {
        if den.is_zero() {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        let rows = hnf(gens).ok_or_else(|| {
            Error::InvalidArgument("generators do not span a rank 4 lattice".into())
        })?;
        let mut g = den.abs();
        for r in &rows {
            for x in r {
                g = g.gcd(x);
            }
        }
        let den = den.abs() / &g;
        let rows = rows.map(|r| r.map(|x| x / &g));
        Ok(Lattice { den, rows })
    }

    pub fn from_elements(gens: &[QuaternionElement]) -> Result<Lattice> {
        let mut den = BigInt::one();
        for g in gens {
            den = den.lcm(&g.to_int().1);
        }
        let ints = gens
            .iter()
            .map(|g| {
                std::array::from_fn(|t| {
                    (&g.coords[t] * Rational::from_integer(den.clone())).to_integer()
                })
            })
            .collect();
        Self::from_int_generators(ints, den)
    }

    /// `Z<1, i, j, k>`.
    pub fn standard() -> Lattice {
        Self::from_elements(&[
            QuaternionElement::from_ints([1, 0, 0, 0]),
            QuaternionElement::from_ints([0, 1, 0, 0]),
            QuaternionElement::from_ints([0, 0, 1, 0]),
            QuaternionElement::from_ints([0, 0, 0, 1]),
        ])
        .expect("standard lattice")
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn int_rows(&self) -> &[[BigInt; 4]; 4] {
        &self.rows
    }

    pub fn basis(&self) -> Vec<QuaternionElement> {
        self.rows
            .iter()
            .map(|r| QuaternionElement::new(r.clone().map(|x| Rational::new(x, self.den.clone()))))
            .collect()
    }

    /// Coordinates of `v / vden` in this basis, if the vector lies in the lattice.
    pub(crate) fn int_coords(&self, v: &[BigInt; 4], vden: &BigInt) -> Option<[BigInt; 4]> {
        let mut t: [BigInt; 4] = std::array::from_fn(|i| &v[i] * &self.den);
        for x in t.iter_mut() {
            if !(x.clone() % vden).is_zero() {
                return None;
            }
            *x = x.clone() / vden;
        }
        let mut c: [BigInt; 4] = Default::default();
        for k in 0..4 {
            let (q, r) = t[k].div_rem(&self.rows[k][k]);
            if !r.is_zero() {
                return None;
            }
            for s in k..4 {
                t[s] -= &q * &self.rows[k][s];
            }
            c[k] = q;
        }
        Some(c)
    }

    pub fn contains(&self, x: &QuaternionElement) -> bool {
        let (v, d) = x.to_int();
        self.int_coords(&v, &d).is_some()
    }

    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        other
            .rows
            .iter()
            .all(|r| self.int_coords(r, &other.den).is_some())
    }

    /// The lattice spanned by all products `x * y`.
    pub fn product(&self, other: &Lattice, alg: &QuaternionAlgebra) -> Lattice {
        let mut gens = Vec::with_capacity(16);
        for x in &self.rows {
            for y in &other.rows {
                gens.push(alg.mul_int(x, y));
            }
        }
        Self::from_int_generators(gens, &self.den * &other.den).expect("product of full lattices")
    }

    pub fn conj(&self) -> Lattice {
        let gens = self
            .rows
            .iter()
            .map(|r| [r[0].clone(), -r[1].clone(), -r[2].clone(), -r[3].clone()])
            .collect();
        Self::from_int_generators(gens, self.den.clone()).expect("conjugate lattice")
    }

    pub fn scale(&self, r: &Rational) -> Lattice {
        let gens = self
            .rows
            .iter()
            .map(|row| row.clone().map(|x| x * r.numer()))
            .collect();
        Self::from_int_generators(gens, &self.den * r.denom()).expect("nonzero scaling")
    }

    pub fn sum(&self, other: &Lattice) -> Lattice {
        let den = self.den.lcm(&other.den);
        let a = &den / &self.den;
        let b = &den / &other.den;
        let gens = self
            .rows
            .iter()
            .map(|r| r.clone().map(|x| x * &a))
            .chain(other.rows.iter().map(|r| r.clone().map(|x| x * &b)))
            .collect();
        Self::from_int_generators(gens, den).expect("sum of full lattices")
    }

    /// Volume of a fundamental domain in the coordinates `1, i, j, k`.
    pub fn covolume(&self) -> Rational {
        let det: BigInt = (0..4).map(|k| self.rows[k][k].clone()).product();
        let den4 = self.den.pow(4);
        Rational::new(det, den4)
    }

    /// Gram matrix of the pairing `trd(x conj(y))`.
    pub fn trace_gram(&self, alg: &QuaternionAlgebra) -> [[Rational; 4]; 4] {
        let d2 = &self.den * &self.den;
        std::array::from_fn(|r| {
            std::array::from_fn(|s| {
                Rational::new(
                    alg.trace_pairing_int(&self.rows[r], &self.rows[s]),
                    d2.clone(),
                )
            })
        })
    }

    /// Integer Gram matrix of the form `2 Nr(x) / scale`; `None` unless the
    /// form is even integral on this lattice.
    pub fn norm_gram(&self, alg: &QuaternionAlgebra, scale: &Rational) -> Option<[[i64; 4]; 4]> {
        let g = self.trace_gram(alg);
        let mut out = [[0i64; 4]; 4];
        for r in 0..4 {
            for s in 0..4 {
                let v = &g[r][s] / scale;
                if !v.is_integer() {
                    return None;
                }
                out[r][s] = i64::try_from(v.to_integer()).ok()?;
            }
            if out[r][r] % 2 != 0 {
                return None;
            }
        }
        Some(out)
    }

    /// Integer Gram matrix of `2 c Nr(x)` for the smallest positive rational
    /// `c` making the form even integral, together with `c`.
    pub fn integral_norm_gram(&self, alg: &QuaternionAlgebra) -> ([[i64; 4]; 4], Rational) {
        let g = self.trace_gram(alg);
        let mut den = BigInt::one();
        let mut num = BigInt::zero();
        for row in &g {
            for v in row {
                den = den.lcm(v.denom());
                num = num.gcd(v.numer());
            }
        }
        // Scale so entries are coprime integers; then double if a diagonal entry is odd.
        let mut c = Rational::new(den, num);
        let odd_diag = (0..4).any(|r| {
            let v = &g[r][r] * &c;
            v.to_integer().is_odd()
        });
        if odd_diag {
            c *= Rational::from_integer(BigInt::from(2));
        }
        let gram = self
            .norm_gram(alg, &(Rational::one() / &c))
            .expect("scaled to integral");
        (gram, c)
    }

    /// Element with integer coordinates `c` in this basis.
    pub fn element(&self, c: &[i64; 4]) -> QuaternionElement {
        let v: [BigInt; 4] =
            std::array::from_fn(|t| (0..4).map(|r| &self.rows[r][t] * c[r]).sum::<BigInt>());
        QuaternionElement::new(v.map(|x| Rational::new(x, self.den.clone())))
    }
}
