use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::enumerate::{lll_reduce, theta_counts, visit_short_vectors};
use super::{Lattice, QuaternionAlgebra, QuaternionElement};
use crate::arith::{factorize, Rational};
use crate::error::{Error, Result};

fn det4(m: &[[Rational; 4]; 4]) -> Rational {
    // Fraction-free enough for 4x4: plain Gaussian elimination over Q.
    let mut a = m.clone();
    let mut det = Rational::one();
    for c in 0..4 {
        let Some(p) = (c..4).find(|&r| !a[r][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= &a[c][c];
        for r in c + 1..4 {
            let f = &a[r][c] / &a[c][c];
            for s in c..4 {
                let v = &f * &a[c][s];
                a[r][s] -= v;
            }
        }
    }
    det
}

/// Reduced discriminant of an order: the positive square root of
/// `det(trd(x_r conj(x_s)))`. `None` if that determinant is not the square of
/// an integer.
pub fn reduced_discriminant(order: &Lattice, alg: &QuaternionAlgebra) -> Option<BigInt> {
    let det = det4(&order.trace_gram(alg));
    if !det.is_integer() || det.is_negative() {
        return None;
    }
    let d = det.to_integer();
    let r = d.sqrt();
    (&r * &r == d).then_some(r)
}

pub fn is_order(lat: &Lattice, alg: &QuaternionAlgebra) -> bool {
    lat.contains(&QuaternionElement::one()) && lat.contains_lattice(&lat.product(lat, alg))
}

fn trace_form_integral(lat: &Lattice, alg: &QuaternionAlgebra) -> bool {
    lat.trace_gram(alg).iter().flatten().all(|v| v.is_integer())
        && lat
            .basis()
            .iter()
            .all(|x| x.reduced_norm(alg).is_integer() && x.reduced_trace().is_integer())
}

/// Smallest order containing `lat`, if every intermediate lattice stays
/// integral (which bounds the process).
fn ring_closure(lat: &Lattice, alg: &QuaternionAlgebra) -> Option<Lattice> {
    let mut cur = lat.sum(&Lattice::standard());
    loop {
        if !trace_form_integral(&cur, alg) {
            return None;
        }
        let next = cur.sum(&cur.product(&cur, alg));
        if next == cur {
            return Some(cur);
        }
        cur = next;
    }
}

/// A maximal order of reduced discriminant `N`, found by saturating
/// `Z<1, i, j, k>` one prime at a time.
pub fn maximal_order(alg: &QuaternionAlgebra) -> Result<Lattice> {
    let target = BigInt::from(alg.level);
    let mut order = Lattice::standard();
    loop {
        let disc = reduced_discriminant(&order, alg)
            .ok_or_else(|| Error::Verification("order discriminant is not a square".into()))?;
        if disc == target {
            break;
        }
        if !(&disc % &target).is_zero() {
            return Err(Error::Verification(format!(
                "discriminant {disc} is not a multiple of {target}"
            )));
        }
        let excess: u64 = (&disc / &target)
            .try_into()
            .map_err(|_| Error::Verification("discriminant too large".into()))?;
        let p = factorize(excess)[0].0 as i64;
        order = enlarge_at(&order, alg, p)
            .ok_or_else(|| Error::Verification(format!("no overorder of index {p} found")))?;
    }
    if !is_order(&order, alg) {
        return Err(Error::Verification(
            "saturated lattice is not a ring".into(),
        ));
    }
    Ok(order)
}

fn enlarge_at(order: &Lattice, alg: &QuaternionAlgebra, p: i64) -> Option<Lattice> {
    let basis = order.basis();
    let p_inv = Rational::new(BigInt::one(), BigInt::from(p));
    for code in 1..p.pow(4) {
        let mut c = [0i64; 4];
        let mut rest = code;
        for slot in c.iter_mut().rev() {
            *slot = rest % p;
            rest /= p;
        }
        let mut x = QuaternionElement::from_ints([0, 0, 0, 0]);
        for (coef, b) in c.iter().zip(&basis) {
            x = x.add(&b.scale(&Rational::from_integer(BigInt::from(*coef))));
        }
        let x = x.scale(&p_inv);
        if !x.reduced_norm(alg).is_integer() || !x.reduced_trace().is_integer() {
            continue;
        }
        let mut gens = basis.clone();
        gens.push(x);
        let candidate = Lattice::from_elements(&gens).ok()?;
        if let Some(bigger) = ring_closure(&candidate, alg) {
            if bigger != *order && bigger.contains_lattice(order) {
                return Some(bigger);
            }
        }
    }
    None
}

/// Right order `{x : I x in I}` of a left ideal of a maximal order.
pub fn right_order(ideal: &Lattice, norm: &Rational, alg: &QuaternionAlgebra) -> Lattice {
    ideal
        .conj()
        .product(ideal, alg)
        .scale(&(Rational::one() / norm))
}

/// Half the number of units of an order in a definite algebra.
pub fn unit_half_count(order: &Lattice, alg: &QuaternionAlgebra) -> u32 {
    let g = order
        .norm_gram(alg, &Rational::one())
        .expect("norm form of an order is integral");
    (theta_counts(&g, 1)[1] / 2) as u32
}

/// All nonzero `x` in `lat` with `Nr(x) <= bound`, sorted by norm and then
/// coordinates. With `full = false` only one of each pair `+-x` is kept.
pub fn short_vectors(
    lat: &Lattice,
    alg: &QuaternionAlgebra,
    bound: &Rational,
    full: bool,
) -> Vec<QuaternionElement> {
    if !bound.is_positive() {
        return Vec::new();
    }
    let (gram, c) = lat.integral_norm_gram(alg);
    let scaled = (bound * &c).floor().to_integer();
    let Ok(scaled) = u64::try_from(scaled) else {
        return Vec::new();
    };
    let (reduced, t) = lll_reduce(&gram);
    let mut found: Vec<(u64, [i64; 4])> = Vec::new();
    visit_short_vectors(&reduced, scaled, |x, v| {
        let mut orig = [0i64; 4];
        for (r, xr) in x.iter().enumerate() {
            for s in 0..4 {
                orig[s] += xr * t[r][s];
            }
        }
        if !full {
            let first = orig.iter().find(|&&v| v != 0).copied().unwrap_or(0);
            if first < 0 {
                return;
            }
        }
        found.push((v, orig));
    });
    found.sort();
    found.into_iter().map(|(_, c)| lat.element(&c)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, is_prime, rat};
    use crate::quaternion::build_algebra;

    #[test]
    fn maximal_order_for_11() {
        let alg = build_algebra(11).unwrap();
        let o = maximal_order(&alg).unwrap();
        assert_eq!(reduced_discriminant(&o, &alg).unwrap(), BigInt::from(11));
        assert!(o.contains(&QuaternionElement::one()));
        let q = |c: [(i64, i64); 4]| QuaternionElement::new(c.map(|(n, d)| rat(n, d)));
        let textbook = Lattice::from_elements(&[
            q([(1, 1), (0, 1), (0, 1), (0, 1)]),
            q([(0, 1), (1, 1), (0, 1), (0, 1)]),
            q([(0, 1), (1, 2), (1, 2), (0, 1)]),
            q([(1, 2), (0, 1), (0, 1), (1, 2)]),
        ])
        .unwrap();
        assert!(is_order(&textbook, &alg));
        assert_eq!(
            reduced_discriminant(&textbook, &alg).unwrap(),
            BigInt::from(11)
        );
    }

    #[test]
    fn maximal_orders_have_prime_discriminant() {
        for n in (5..200).filter(|&p| is_prime(p)) {
            let alg = build_algebra(n).unwrap();
            let o = maximal_order(&alg).unwrap();
            assert_eq!(reduced_discriminant(&o, &alg).unwrap(), BigInt::from(n));
            assert!(is_order(&o, &alg));
        }
    }

    #[test]
    fn unit_counts() {
        let alg = build_algebra(37).unwrap();
        let o = maximal_order(&alg).unwrap();
        // w = 1: only +-1 have norm one.
        assert_eq!(unit_half_count(&o, &alg), 1);
        let units = short_vectors(&o, &alg, &int(1), true);
        assert_eq!(units.len(), 2);
        assert!(short_vectors(&o, &alg, &int(0), true).is_empty());

        let alg = build_algebra(5).unwrap();
        let o = maximal_order(&alg).unwrap();
        assert_eq!(unit_half_count(&o, &alg), 3);

        let alg = build_algebra(11).unwrap();
        let o = maximal_order(&alg).unwrap();
        let units = short_vectors(&o, &alg, &int(1), true);
        assert_eq!(units.len() as u32, 2 * unit_half_count(&o, &alg));
        let halves = short_vectors(&o, &alg, &int(1), false);
        assert_eq!(halves.len() * 2, units.len());
        for u in &units {
            assert_eq!(u.reduced_norm(&alg), int(1));
            assert!(o.contains(u));
        }
    }

    #[test]
    fn short_vectors_are_sorted_and_bounded() {
        let alg = build_algebra(23).unwrap();
        let o = maximal_order(&alg).unwrap();
        let v = short_vectors(&o, &alg, &rat(7, 2), true);
        let norms: Vec<_> = v.iter().map(|x| x.reduced_norm(&alg)).collect();
        assert!(norms.windows(2).all(|w| w[0] <= w[1]));
        assert!(norms.iter().all(|n| *n <= rat(7, 2) && *n > int(0)));
    }
}
