//! Exact arithmetic functions on the classical side: quadratic characters,
//! divisor sums away from the level, class numbers of binary quadratic forms,
//! Hurwitz class numbers and the closed form for Brandt matrix traces.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Exact rational number, always kept in lowest terms with positive denominator.
pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Rejects anything that is not a prime `N >= 5`.
pub fn check_level(level: u64) -> Result<()> {
    if level >= 5 && is_prime(level) {
        Ok(())
    } else {
        Err(Error::InvalidLevel(level))
    }
}

pub fn divisors(m: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= m {
        if m.is_multiple_of(d) {
            small.push(d);
            if d * d != m {
                large.push(m / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Kronecker symbol `(a | n)`.
pub fn kronecker(a: i64, n: i64) -> i32 {
    let mut a = a as i128;
    let mut n = n as i128;
    if n == 0 {
        return if a.abs() == 1 { 1 } else { 0 };
    }
    let mut result = 1;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    let twos = n.trailing_zeros();
    n >>= twos;
    if twos > 0 {
        if a % 2 == 0 {
            return 0;
        }
        let r = a.rem_euclid(8);
        if twos % 2 == 1 && (r == 3 || r == 5) {
            result = -result;
        }
    }
    // Jacobi symbol for odd positive n.
    a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Sum of the divisors of `m` that are coprime to the prime `level`.
pub fn sigma_n(m: u64, level: u64) -> Result<u64> {
    if m < 1 {
        return Err(Error::InvalidArgument("sigma_N needs m >= 1".into()));
    }
    Ok(divisors(m).into_iter().filter(|d| d % level != 0).sum())
}

/// A negative discriminant `D = d_K f^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Discriminant {
    value: i64,
    fundamental: i64,
    conductor: u64,
}

fn is_disc_residue(d: i64) -> bool {
    matches!(d.rem_euclid(4), 0 | 1)
}

impl Discriminant {
    pub fn new(value: i64) -> Result<Self> {
        if value >= 0 || !is_disc_residue(value) {
            return Err(Error::NotADiscriminant(value));
        }
        let mut fundamental = value;
        let mut conductor = 1u64;
        let mut p = 2i64;
        while p * p <= fundamental.abs() {
            while fundamental % (p * p) == 0 && is_disc_residue(fundamental / (p * p)) {
                fundamental /= p * p;
                conductor *= p as u64;
            }
            p += 1;
        }
        Ok(Discriminant {
            value,
            fundamental,
            conductor,
        })
    }

    pub fn value(&self) -> i64 {
        self.value
    }

    pub fn fundamental(&self) -> i64 {
        self.fundamental
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }
}

/// Number of reduced primitive positive definite forms `(a, b, c)` with `b^2 - 4ac = D`.
pub fn class_number(disc: Discriminant) -> u64 {
    let d = disc.value();
    let abs = -d;
    let mut count = 0;
    let mut a = 1i64;
    while 3 * a * a <= abs {
        for b in -a + 1..=a {
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (c == a && b < 0) {
                continue;
            }
            if a.gcd(&b).gcd(&c) == 1 {
                count += 1;
            }
        }
        a += 1;
    }
    count
}

/// Half the number of units in the order of discriminant `d`.
fn unit_weight(d: i64) -> i64 {
    match d {
        -3 => 3,
        -4 => 2,
        _ => 1,
    }
}

/// Hurwitz class number `H(D)` for `D > 0`: the sum of `h(d)/u(d)` over all
/// discriminants `d` with `d f^2 = -D`. Returns zero when `-D` is not a
/// discriminant.
pub fn hurwitz(d: i64) -> Result<Rational> {
    if d <= 0 {
        return Err(Error::InvalidArgument(format!(
            "hurwitz needs D > 0, got {d}"
        )));
    }
    let mut total = Rational::zero();
    let mut f = 1i64;
    while f * f <= d {
        if d % (f * f) == 0 {
            let sub = -(d / (f * f));
            if is_disc_residue(sub) {
                let h = class_number(Discriminant::new(sub)?) as i64;
                total += rat(h, unit_weight(sub));
            }
        }
        f += 1;
    }
    Ok(total)
}

/// The level-modified Hurwitz number `H_N(D)`.
pub fn hurwitz_n(d: i64, level: u64) -> Result<Rational> {
    if d < 0 {
        return Err(Error::InvalidArgument(format!(
            "hurwitz_N needs D >= 0, got {d}"
        )));
    }
    if d == 0 {
        return Ok(rat(level as i64 - 1, 24));
    }
    if !is_disc_residue(-d) {
        return Ok(Rational::zero());
    }
    let n = level as i64;
    let mut d = d;
    // Peel off factors of N from the conductor first.
    while Discriminant::new(-d)?.conductor() % level == 0 {
        d /= n * n;
    }
    match kronecker(-d, n) {
        1 => Ok(Rational::zero()),
        -1 => hurwitz(d),
        _ => Ok(hurwitz(d)? / int(2)),
    }
}

/// Number of ideals of norm `m` in the ring of integers of `Q(sqrt(-d))`, `d` in {3, 4}.
pub fn ideal_count(d: u64, m: u64) -> Result<u64> {
    if d != 3 && d != 4 {
        return Err(Error::InvalidArgument(format!(
            "ideal_count only supports d = 3 or 4, got {d}"
        )));
    }
    if m < 1 {
        return Err(Error::InvalidArgument("ideal_count needs m >= 1".into()));
    }
    let total: i64 = divisors(m)
        .into_iter()
        .map(|c| kronecker(-(d as i64), c as i64) as i64)
        .sum();
    Ok(total as u64)
}

/// Number of normalized weight 2 newforms of prime level `N >= 5`.
pub fn dim_newforms(level: u64) -> Result<u64> {
    check_level(level)?;
    let base = rat(level as i64 - 1, 12);
    let correction = match level % 12 {
        1 => rat(-1, 1),
        5 => rat(-1, 3),
        7 => rat(-1, 2),
        11 => rat(1, 6),
        _ => unreachable!("primes >= 5 are units mod 12"),
    };
    let dim = base + correction;
    debug_assert!(dim.is_integer());
    Ok(dim.to_integer().try_into().expect("small dimension"))
}

/// `sum_{s^2 <= 4m} H_N(4m - s^2)`, the trace of `B(m)`.
pub fn trace_brandt_closed_form(level: u64, m: u64) -> Result<Rational> {
    check_level(level)?;
    if m < 1 {
        return Err(Error::InvalidArgument("trace needs m >= 1".into()));
    }
    let four_m = 4 * m as i64;
    let mut total = Rational::zero();
    let mut s = 0i64;
    while s * s <= four_m {
        let term = hurwitz_n(four_m - s * s, level)?;
        if s == 0 {
            total += term;
        } else {
            total += term * int(2);
        }
        s += 1;
    }
    Ok(total)
}

/// Factor a positive integer into `(prime, exponent)` pairs.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    // Euler's criterion / direct square enumeration for odd prime moduli.
    fn legendre_by_squares(a: i64, p: i64) -> i32 {
        let a = a.rem_euclid(p);
        if a == 0 {
            return 0;
        }
        if (1..p).any(|x| (x * x) % p == a) {
            1
        } else {
            -1
        }
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(-4, 7), -1);
        assert_eq!(kronecker(-3, 11), -1);
        for a in -20..20 {
            assert_eq!(kronecker(a, 1), 1);
        }
    }

    #[test]
    fn kronecker_matches_square_enumeration() {
        for p in (3..200).filter(|&p| is_prime(p)) {
            for a in -30..30 {
                assert_eq!(
                    kronecker(a, p as i64),
                    legendre_by_squares(a, p as i64),
                    "({a}|{p})"
                );
            }
        }
    }

    #[test]
    fn kronecker_is_multiplicative_in_n() {
        for a in [-4i64, -3, -7, 5, 12] {
            for n in 1..60i64 {
                for n2 in 1..20i64 {
                    assert_eq!(kronecker(a, n * n2), kronecker(a, n) * kronecker(a, n2));
                }
            }
        }
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma_n(1, 11).unwrap(), 1);
        assert_eq!(sigma_n(11, 11).unwrap(), 1);
        assert_eq!(sigma_n(6, 5).unwrap(), 12);
        assert!(sigma_n(0, 5).is_err());
    }

    #[test]
    fn class_number_examples() {
        let h = |d| class_number(Discriminant::new(d).unwrap());
        assert_eq!(h(-3), 1);
        assert_eq!(h(-4), 1);
        assert_eq!(h(-23), 3);
        assert_eq!(h(-148), 2);
        assert_eq!(h(-244), 6);
        assert_eq!(h(-12), 1);
        assert!(Discriminant::new(-5).is_err());
        assert!(Discriminant::new(4).is_err());
    }

    #[test]
    fn discriminant_factorization() {
        let d = Discriminant::new(-363).unwrap();
        assert_eq!((d.fundamental(), d.conductor()), (-3, 11));
        let d = Discriminant::new(-16).unwrap();
        assert_eq!((d.fundamental(), d.conductor()), (-4, 2));
        let d = Discriminant::new(-4 * 37).unwrap();
        assert_eq!((d.fundamental(), d.conductor()), (-148, 1));
    }

    #[test]
    fn hurwitz_examples() {
        assert_eq!(hurwitz(3).unwrap(), rat(1, 3));
        assert_eq!(hurwitz(4).unwrap(), rat(1, 2));
        assert_eq!(hurwitz(12).unwrap(), rat(4, 3));
        assert_eq!(hurwitz(7).unwrap(), int(1));
        assert_eq!(hurwitz(5).unwrap(), int(0));
        assert!(hurwitz(-1).is_err());
    }

    #[test]
    fn six_hurwitz_is_integral() {
        for d in 1..2000 {
            assert!((hurwitz(d).unwrap() * int(6)).is_integer(), "D = {d}");
        }
    }

    #[test]
    fn hurwitz_n_examples() {
        assert_eq!(hurwitz_n(0, 11).unwrap(), rat(5, 12));
        assert_eq!(hurwitz_n(3, 11).unwrap(), rat(1, 3));
        assert_eq!(hurwitz_n(8, 11).unwrap(), int(0));
        assert_eq!(hurwitz_n(363, 11).unwrap(), rat(1, 3));
        assert!(hurwitz_n(-3, 11).is_err());
    }

    #[test]
    fn ideal_count_examples() {
        assert_eq!(ideal_count(4, 1).unwrap(), 1);
        assert_eq!(ideal_count(4, 5).unwrap(), 2);
        assert_eq!(ideal_count(3, 2).unwrap(), 0);
        assert_eq!(ideal_count(3, 3).unwrap(), 1);
        assert!(ideal_count(7, 3).is_err());
    }

    // Brute force: count Gaussian / Eisenstein integers of norm m, divided by the unit count.
    fn ideal_count_brute(d: u64, m: u64) -> u64 {
        let m = m as i64;
        let mut count = 0;
        for x in -2 * m..=2 * m {
            for y in -2 * m..=2 * m {
                let norm = if d == 4 {
                    x * x + y * y
                } else {
                    x * x + x * y + y * y
                };
                if norm == m {
                    count += 1;
                }
            }
        }
        count / if d == 4 { 4 } else { 6 }
    }

    #[test]
    fn ideal_count_matches_element_enumeration() {
        for d in [3, 4] {
            for m in 1..40 {
                assert_eq!(
                    ideal_count(d, m).unwrap(),
                    ideal_count_brute(d, m),
                    "d={d} m={m}"
                );
            }
        }
    }

    #[test]
    fn dim_newforms_examples() {
        assert_eq!(dim_newforms(11).unwrap(), 1);
        assert_eq!(dim_newforms(37).unwrap(), 2);
        assert_eq!(dim_newforms(13).unwrap(), 0);
        assert_eq!(dim_newforms(17).unwrap(), 1);
        assert_eq!(dim_newforms(19).unwrap(), 1);
        assert!(dim_newforms(3).is_err());
        assert!(dim_newforms(2).is_err());
        assert!(dim_newforms(15).is_err());
    }

    #[test]
    fn trace_closed_form_examples() {
        assert_eq!(trace_brandt_closed_form(11, 1).unwrap(), int(2));
        assert_eq!(trace_brandt_closed_form(11, 2).unwrap(), int(1));
        assert_eq!(trace_brandt_closed_form(37, 1).unwrap(), int(3));
    }

    #[test]
    fn trace_at_one_is_class_number() {
        // tr B(1) = n, the class count from the weight table.
        for n in (5..200).filter(|&p| is_prime(p)) {
            let t = trace_brandt_closed_form(n, 1).unwrap();
            let expected = match n % 12 {
                1 => (n - 1) / 12,
                5 => (n + 7) / 12,
                7 => (n + 5) / 12,
                _ => (n + 13) / 12,
            };
            assert_eq!(t, int(expected as i64));
            assert_eq!(dim_newforms(n).unwrap() + 1, expected);
        }
    }

    proptest::proptest! {
        #[test]
        fn ideal_count_multiplicative(m1 in 1u64..200, m2 in 1u64..200, d in 3u64..=4) {
            proptest::prop_assume!(m1.gcd(&m2) == 1);
            proptest::prop_assert_eq!(
                ideal_count(d, m1 * m2).unwrap(),
                ideal_count(d, m1).unwrap() * ideal_count(d, m2).unwrap()
            );
        }

        #[test]
        fn sigma_multiplicative(m1 in 1u64..500, m2 in 1u64..500) {
            proptest::prop_assume!(m1.gcd(&m2) == 1);
            proptest::prop_assert_eq!(
                sigma_n(m1 * m2, 7).unwrap(),
                sigma_n(m1, 7).unwrap() * sigma_n(m2, 7).unwrap()
            );
        }
    }
}
