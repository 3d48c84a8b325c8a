//! Average identities: eigen-side sums of triple values against their closed
//! forms, plus the exact rationals those sums must land on.

use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith::{
    check_level, class_number, factorize, hurwitz_n, ideal_count, int, rat, sigma_n, Discriminant,
    Rational,
};
use crate::brandt::BrandtFamily;
use crate::eigen::{eigenbasis, Eigenform};
use crate::error::{Error, Result};
use crate::quaternion::IdealClassData;
use crate::report::{ReportRow, Status, Value, VerificationReport};

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Smallest-denominator rational within `tol` of `x`, with denominator at
/// most `max_den`.
pub fn reconstruct(x: f64, max_den: u64, tol: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    (1..=max_den.max(1)).find_map(|q| {
        let p = (x * q as f64).round();
        ((x - p / q as f64).abs() <= tol).then(|| rat(p as i64, q as i64))
    })
}

/// Running sum kept both naively and with Neumaier compensation; agreement of
/// the two after reconstruction is our stability check.
#[derive(Debug, Clone, Copy, Default)]
pub struct Accumulator {
    naive: f64,
    sum: f64,
    comp: f64,
}

impl Accumulator {
    pub fn add(&mut self, x: f64) {
        self.naive += x;
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    pub fn naive(&self) -> f64 {
        self.naive
    }

    /// Reconstructs both the compensated and the naive sum; `None` unless
    /// they agree.
    pub fn reconstruct(&self, max_den: u64, tol: f64) -> Option<Rational> {
        let a = reconstruct(self.value(), max_den, tol)?;
        let b = reconstruct(self.naive, max_den, tol)?;
        (a == b).then_some(a)
    }
}

impl FromIterator<f64> for Accumulator {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Accumulator::default();
        iter.into_iter().for_each(|x| acc.add(x));
        acc
    }
}

/// The identities below need `N = 11` or `N > 13`.
pub fn is_applicable(level: u64) -> bool {
    level == 11 || level > 13
}

fn require_applicable(level: u64) -> Result<()> {
    check_level(level)?;
    if !is_applicable(level) {
        return Err(Error::Precondition(format!(
            "level {level} has no cusp forms (need N = 11 or N > 13)"
        )));
    }
    Ok(())
}

fn same_level(forms: &[&Eigenform], level: u64) -> Result<()> {
    match forms.iter().find(|f| f.level != level) {
        Some(f) => Err(Error::LevelMismatch(f.level, level)),
        None => Ok(()),
    }
}

/// `sum_i w_i^3 lambda_i(g)^2 lambda_i(h)^2 - 12/(N-1) [g = h]`.
pub fn lemma41_rhs(g: &Eigenform, h: &Eigenform, classes: &IdealClassData) -> Result<f64> {
    same_level(&[g, h], classes.level)?;
    let s: f64 = classes
        .weights
        .iter()
        .enumerate()
        .map(|(i, &w)| (w as f64).powi(3) * (g.lambda[i] * h.lambda[i]).powi(2))
        .sum();
    let delta = if g.label == h.label { 1.0 } else { 0.0 };
    Ok(s - 12.0 * delta / (classes.level as f64 - 1.0))
}

/// `sum_i w_i^2 B_ii(m) lambda_i(h)^2 - 12 sigma(m)_N/(N-1) - 12 a_m(h)/(N-1)`.
pub fn thm42_rhs(h: &Eigenform, m: u64, family: &BrandtFamily) -> Result<f64> {
    let level = family.level();
    require_applicable(level)?;
    same_level(&[h], level)?;
    let b = family.matrix(m)?;
    let s: f64 = family
        .classes
        .weights
        .iter()
        .enumerate()
        .map(|(i, &w)| (w as f64).powi(2) * b.entries[i][i] as f64 * h.lambda[i].powi(2))
        .sum();
    let nm1 = level as f64 - 1.0;
    Ok(s - 12.0 * sigma_n(m, level)? as f64 / nm1 - 12.0 * h.a(m)? / nm1)
}

/// `1 - 24/(N-1) + sum_i (w_i^2 - w_i) lambda_i(h)^2`.
pub fn cor44_rhs(h: &Eigenform, classes: &IdealClassData) -> Result<f64> {
    require_applicable(classes.level)?;
    same_level(&[h], classes.level)?;
    let extra: f64 = classes
        .weights
        .iter()
        .enumerate()
        .map(|(i, &w)| ((w * w - w) as f64) * h.lambda[i].powi(2))
        .sum();
    Ok(1.0 - 24.0 / (classes.level as f64 - 1.0) + extra)
}

/// Closed form of `sum_{f,g,h} L^alg(f,g,h) a_m(h)` from class numbers alone.
pub fn prop45_rhs(level: u64, m: u64) -> Result<Rational> {
    require_applicable(level)?;
    if m == 0 {
        return Err(Error::InvalidArgument("m must be >= 1".into()));
    }
    let nm1 = level as i64 - 1;
    let factor = rat(nm1 - 24, nm1);
    let trace = trace_term(level, m)?;
    let sigma = int(sigma_n(m, level)? as i64);
    let r3 = int(ideal_count(3, m)? as i64);
    let r4 = int(ideal_count(4, m)? as i64);
    let extra = match level % 12 {
        1 => Rational::zero(),
        5 => r3 * int(2) - rat(8, nm1) * &sigma,
        7 => r4 - rat(6, nm1) * &sigma,
        11 => r3 * int(2) + r4 - rat(14, nm1) * &sigma,
        _ => unreachable!("primes > 3 are 1, 5, 7 or 11 mod 12"),
    };
    Ok(factor * (trace - sigma) + extra)
}

fn trace_term(level: u64, m: u64) -> Result<Rational> {
    let mut trace = Rational::zero();
    let mut s: i64 = 0;
    while (s * s) as u64 <= 4 * m {
        let term = hurwitz_n(4 * m as i64 - s * s, level)?;
        trace += if s == 0 { term } else { term * int(2) };
        s += 1;
    }
    Ok(trace)
}

/// The discriminants `d` in `{3, 4}` whose correction terms enter the closed
/// form at this level.
pub fn correction_discriminants(level: u64) -> Vec<u64> {
    let mut out = Vec::new();
    if level % 3 == 2 {
        out.push(3);
    }
    if level % 4 == 3 {
        out.push(4);
    }
    out
}

/// Whether the class-number closed form can hold at `m`: the diagonal entry
/// of `B(m)` at the class with extra units counts only elements of the
/// quadratic order when `d m < N`.
pub fn prop45_in_range(level: u64, m: u64) -> bool {
    correction_discriminants(level)
        .iter()
        .all(|d| d * m < level)
}

/// The same sum with each `R_{-d}(m)` replaced by the diagonal Brandt entry
/// at the class of weight 2 (d = 4) or 3 (d = 3). Equal to [`prop45_rhs`]
/// whenever [`prop45_in_range`] holds, and correct for every `m`.
pub fn prop45_brandt_rhs(family: &BrandtFamily, m: u64) -> Result<Rational> {
    let level = family.level();
    require_applicable(level)?;
    let nm1 = level as i64 - 1;
    let b = family.matrix(m)?;
    let sigma = int(sigma_n(m, level)? as i64);
    let mut total = rat(nm1 - 24, nm1) * (trace_term(level, m)? - &sigma);
    for (k, &w) in family.classes.weights.iter().enumerate() {
        if w > 1 {
            let w = w as i64;
            // (w^2 - w)/w^2 * (w B_kk(m) - 12 sigma/(N-1))
            total += rat(w - 1, w) * (int(w * b.entries[k][k]) - rat(12, nm1) * &sigma);
        }
    }
    Ok(total)
}

/// The unweighted triple sum, as derived from the closed form at `m = 1`,
/// next to the case formula usually quoted for it.
#[derive(Debug, Clone, PartialEq)]
pub struct TripleSumValue {
    pub derived: Rational,
    pub case_formula: Rational,
    pub discrepant: bool,
}

pub fn cor46_value(level: u64) -> Result<TripleSumValue> {
    let derived = prop45_rhs(level, 1)?;
    let n = level as i64;
    let case_formula = match level % 12 {
        1 => rat(n - 25, 12),
        5 => rat(n - 5, 12),
        7 => rat((n - 7) * (n - 13), 12 * (n - 1)),
        _ => rat(n * n + 12 * n - 229, 12 * (n - 1)),
    };
    let discrepant = derived != case_formula;
    Ok(TripleSumValue {
        derived,
        case_formula,
        discrepant,
    })
}

/// `(1 - 24/(N-1)) (h(-4N)/2 - 1)` for `N = 1 mod 12`.
pub fn cor47_value(level: u64) -> Result<Rational> {
    check_level(level)?;
    if level % 12 != 1 {
        return Err(Error::Precondition(format!(
            "level {level} is not 1 mod 12"
        )));
    }
    let h = class_number(Discriminant::new(-4 * level as i64)?) as i64;
    let nm1 = level as i64 - 1;
    Ok(rat(nm1 - 24, nm1) * (rat(h, 2) - int(1)))
}

/// Everything computed once per level.
#[derive(Debug, Clone)]
pub struct LevelData {
    pub family: BrandtFamily,
    pub forms: Vec<Eigenform>,
    /// `periods[a][b][c] = P(f_a, f_b, f_c)`.
    pub periods: Vec<Vec<Vec<f64>>>,
}

impl LevelData {
    /// Brandt matrices are computed up to `max(m_max, N)` so that `a_N` is
    /// available.
    pub fn compute(level: u64, m_max: u64, tol: f64) -> Result<Self> {
        check_level(level)?;
        let classes = IdealClassData::compute(level)?;
        let family = BrandtFamily::compute(classes, m_max.max(level))?;
        Self::from_family(family, tol)
    }

    pub fn from_family(family: BrandtFamily, tol: f64) -> Result<Self> {
        let forms = eigenbasis(&family, tol)?;
        Self::from_parts(family, forms)
    }

    pub fn from_parts(family: BrandtFamily, forms: Vec<Eigenform>) -> Result<Self> {
        let classes = &family.classes;
        let k = forms.len();
        let periods = (0..k)
            .into_par_iter()
            .map(|a| {
                (0..k)
                    .map(|b| {
                        (0..k)
                            .map(|c| {
                                crate::special::period_sum(&forms[a], &forms[b], &forms[c], classes)
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LevelData {
            family,
            forms,
            periods,
        })
    }

    pub fn level(&self) -> u64 {
        self.family.level()
    }

    pub fn classes(&self) -> &IdealClassData {
        &self.family.classes
    }

    pub fn lalg(&self, a: usize, b: usize, c: usize) -> f64 {
        self.periods[a][b][c].powi(2)
    }

    /// `sum_f L^alg(f, g, h)`.
    fn single_sum(&self, g: usize, h: usize) -> Accumulator {
        (0..self.forms.len()).map(|f| self.lalg(f, g, h)).collect()
    }

    /// `sum_{f,g} L^alg(f, g, h) a_m(g)`.
    fn double_sum(&self, h: usize, m: Option<u64>) -> Result<Accumulator> {
        let mut acc = Accumulator::default();
        for g in 0..self.forms.len() {
            let am = match m {
                Some(m) => self.forms[g].a(m)?,
                None => 1.0,
            };
            for f in 0..self.forms.len() {
                acc.add(self.lalg(f, g, h) * am);
            }
        }
        Ok(acc)
    }

    /// `sum_{f,g,h} L^alg(f, g, h) a_m(h)`.
    fn triple_sum(&self, m: Option<u64>) -> Result<Accumulator> {
        let k = self.forms.len();
        let mut acc = Accumulator::default();
        for h in 0..k {
            let am = match m {
                Some(m) => self.forms[h].a(m)?,
                None => 1.0,
            };
            for g in 0..k {
                for f in 0..k {
                    let v = self.lalg(f, g, h);
                    debug_assert!(v >= 0.0);
                    acc.add(v * am);
                }
            }
        }
        Ok(acc)
    }

    fn max_den(&self) -> u64 {
        12 * (self.level() - 1)
    }
}

fn approx_row(identity: &str, lhs: f64, rhs: f64, bound: f64) -> ReportRow {
    let residual = (lhs - rhs).abs();
    ReportRow::new(
        identity,
        Value::Approx(lhs),
        Value::Approx(rhs),
        Some(residual),
        Status::from_bool(residual <= bound),
    )
}

/// Compares a reconstructed sum with an exact target.
fn exact_row(
    identity: &str,
    acc: &Accumulator,
    rhs: &Rational,
    max_den: u64,
    tol: f64,
) -> ReportRow {
    let residual = (acc.value() - rational_to_f64(rhs)).abs();
    match acc.reconstruct(max_den, tol) {
        Some(r) => {
            let ok = &r == rhs;
            let row = ReportRow::new(
                identity,
                Value::Exact(r),
                Value::Exact(rhs.clone()),
                Some(residual),
                Status::from_bool(ok),
            );
            if ok {
                row
            } else {
                row.with_note(format!(
                    "float sum {}",
                    crate::report::format_float(acc.value())
                ))
            }
        }
        None => ReportRow::new(
            identity,
            Value::Approx(acc.value()),
            Value::Exact(rhs.clone()),
            Some(residual),
            Status::Fail,
        )
        .with_note("no stable rational reconstruction"),
    }
}

const NOT_APPLICABLE: &str = "needs N = 11 or N > 13";

/// Checks every average identity at one level.
pub fn verify_level(data: &LevelData, m_max: u64, tol: f64) -> Result<VerificationReport> {
    let level = data.level();
    let mut rep = VerificationReport::new(level);
    let names = [
        "lemma41",
        "thm42",
        "cor44",
        "prop45",
        "prop45_brandt",
        "cor46",
        "cor47",
        "sec5_double",
        "epsilon_vanishing",
        "triple_sum",
    ];
    if !is_applicable(level) {
        for name in names {
            rep.push(ReportRow::not_applicable(name, NOT_APPLICABLE));
        }
        return Ok(rep);
    }
    let forms = &data.forms;
    let classes = data.classes();
    let k = forms.len();
    let bound = tol * (k as f64).powi(3).max(1.0);
    let max_den = data.max_den();
    let m_max = m_max.min(data.family.max_m());

    for g in 0..k {
        for h in 0..k {
            let lhs = data.single_sum(g, h).value();
            let rhs = lemma41_rhs(&forms[g], &forms[h], classes)?;
            rep.push(
                approx_row("lemma41", lhs, rhs, bound)
                    .param("g", &forms[g].label)
                    .param("h", &forms[h].label),
            );
        }
    }
    for h in 0..k {
        for m in 1..=m_max {
            let lhs = data.double_sum(h, Some(m))?.value();
            let rhs = thm42_rhs(&forms[h], m, &data.family)?;
            rep.push(
                approx_row("thm42", lhs, rhs, bound)
                    .param("h", &forms[h].label)
                    .param("m", m),
            );
        }
    }
    for h in 0..k {
        let lhs = data.double_sum(h, None)?.value();
        let rhs = cor44_rhs(&forms[h], classes)?;
        rep.push(approx_row("cor44", lhs, rhs, bound).param("h", &forms[h].label));
    }
    for m in 1..=m_max {
        let acc = data.triple_sum(Some(m))?;
        let rhs = prop45_rhs(level, m)?;
        let mut row = exact_row("prop45", &acc, &rhs, max_den, bound).param("m", m);
        if !prop45_in_range(level, m) {
            row = row.with_note(format!(
                "d*m >= N for d in {:?}: the unit-class diagonal of B(m) is no longer R_-d(m)",
                correction_discriminants(level)
            ));
        }
        rep.push(row);
        let rhs = prop45_brandt_rhs(&data.family, m)?;
        rep.push(exact_row("prop45_brandt", &acc, &rhs, max_den, bound).param("m", m));
    }

    let total = data.triple_sum(None)?;
    let c46 = cor46_value(level)?;
    let mut row = exact_row("cor46", &total, &c46.derived, max_den, bound);
    if c46.discrepant {
        row = row.with_note(format!(
            "derived {} differs from the case formula {}",
            c46.derived, c46.case_formula
        ));
    }
    rep.push(row);

    if level % 12 == 1 {
        let acc = data.triple_sum(Some(level))?;
        rep.push(exact_row("cor47", &acc, &cor47_value(level)?, max_den, bound).param("m", level));
        let target = rat(level as i64 - 25, level as i64 - 1);
        for h in 0..k {
            let acc = data.double_sum(h, None)?;
            rep.push(
                exact_row("sec5_double", &acc, &target, max_den, bound).param("h", &forms[h].label),
            );
        }
    } else {
        rep.push(ReportRow::not_applicable("cor47", "needs N = 1 mod 12"));
        rep.push(ReportRow::not_applicable(
            "sec5_double",
            "needs N = 1 mod 12",
        ));
    }

    let mut worst: f64 = 0.0;
    let mut count = 0usize;
    let mut unknown = 0usize;
    for a in 0..k {
        for b in a..k {
            for c in b..k {
                let t = crate::special::lalg_triple(&forms[a], &forms[b], &forms[c], classes)?;
                match t.epsilon {
                    Some(-1) => {
                        count += 1;
                        worst = worst.max(t.period_sum.abs());
                    }
                    None => unknown += 1,
                    _ => {}
                }
            }
        }
    }
    let eps_bound = 100.0 * tol;
    rep.push(
        ReportRow::new(
            "epsilon_vanishing",
            Value::Approx(worst),
            Value::Approx(0.0),
            Some(worst),
            Status::from_bool(worst <= eps_bound && unknown == 0),
        )
        .with_note(format!(
            "{count} triples with sign -1, {unknown} with unknown sign"
        )),
    );

    let row = match total.reconstruct(max_den, bound) {
        Some(r) => ReportRow::new(
            "triple_sum",
            Value::Approx(total.value()),
            Value::Exact(r.clone()),
            Some((total.value() - rational_to_f64(&r)).abs()),
            Status::Pass,
        ),
        None => ReportRow::new(
            "triple_sum",
            Value::Approx(total.value()),
            Value::Missing,
            None,
            Status::Fail,
        )
        .with_note("no stable rational reconstruction"),
    };
    rep.push(row);
    Ok(rep)
}

/// Per-form count of pairs `(f, g)` with a nonzero triple value.
#[derive(Debug, Clone, PartialEq)]
pub struct NonvanishingEntry {
    pub label: String,
    pub nonzero_pairs: usize,
    pub double_sum: f64,
}

/// Prime factorization as `(p, e)` pairs.
pub type Factorization = Vec<(u64, u32)>;

#[derive(Debug, Clone, PartialEq)]
pub struct NonvanishingReport {
    pub level: u64,
    pub entries: Vec<NonvanishingEntry>,
    /// For `N = 1 mod 12`: the common double sum `(N-25)/(N-1)` and the
    /// factorizations of `N - 25` and `N - 1`.
    pub double_sum: Option<(Rational, Factorization, Factorization)>,
}

pub fn nonvanishing_report(data: &LevelData, tol: f64) -> Result<NonvanishingReport> {
    let k = data.forms.len();
    let threshold = 100.0 * tol;
    let mut entries = Vec::with_capacity(k);
    for h in 0..k {
        let mut nonzero = 0;
        for f in 0..k {
            for g in 0..k {
                if data.lalg(f, g, h) > threshold {
                    nonzero += 1;
                }
            }
        }
        entries.push(NonvanishingEntry {
            label: data.forms[h].label.clone(),
            nonzero_pairs: nonzero,
            double_sum: data.double_sum(h, None)?.value(),
        });
    }
    let level = data.level();
    let double_sum = (level % 12 == 1 && is_applicable(level)).then(|| {
        let r = rat(level as i64 - 25, level as i64 - 1);
        (r, factorize(level - 25), factorize(level - 1))
    });
    Ok(NonvanishingReport {
        level,
        entries,
        double_sum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn closed_forms() {
        assert_eq!(prop45_rhs(11, 1).unwrap(), rat(1, 5));
        assert_eq!(prop45_rhs(11, 2).unwrap(), rat(-2, 5));
        assert_eq!(prop45_rhs(37, 37).unwrap(), int(0));
        assert_eq!(cor46_value(11).unwrap().derived, rat(1, 5));
        assert_eq!(cor46_value(17).unwrap().derived, int(1));
        assert_eq!(cor46_value(19).unwrap().derived, rat(1, 3));
        let c = cor46_value(37).unwrap();
        assert_eq!(c.derived, rat(2, 3));
        assert_eq!(c.case_formula, int(1));
        assert!(c.discrepant);
        assert!(!cor46_value(29).unwrap().discrepant);
        assert_eq!(cor47_value(37).unwrap(), int(0));
        assert_eq!(cor47_value(61).unwrap(), rat(6, 5));
        assert_eq!(cor47_value(13).unwrap(), int(0));
        assert!(cor47_value(11).is_err());
        assert!(prop45_rhs(13, 1).is_err());
        assert!(prop45_in_range(11, 2) && !prop45_in_range(11, 3));
        assert!(prop45_in_range(37, 1000));
        assert_eq!(correction_discriminants(23), vec![3, 4]);
    }

    #[test]
    fn reconstruction() {
        assert_eq!(reconstruct(0.2 + 1e-12, 120, 1e-9), Some(rat(1, 5)));
        assert_eq!(reconstruct(2.0 / 3.0, 432, 1e-9), Some(rat(2, 3)));
        assert_eq!(reconstruct(-0.4, 120, 1e-9), Some(rat(-2, 5)));
        assert_eq!(reconstruct(std::f64::consts::PI, 100, 1e-9), None);
        let acc: Accumulator = [1e16, 1.0, -1e16].into_iter().collect();
        assert_eq!(acc.value(), 1.0);
    }

    #[test]
    fn level_11() {
        let data = LevelData::compute(11, 20, 1e-9).unwrap();
        let f = &data.forms[0];
        assert!((lemma41_rhs(f, f, data.classes()).unwrap() - 0.2).abs() < 1e-12);
        assert!((thm42_rhs(f, 2, &data.family).unwrap() + 0.4).abs() < 1e-12);
        assert!((thm42_rhs(f, 1, &data.family).unwrap() - 0.2).abs() < 1e-12);
        assert!((cor44_rhs(f, data.classes()).unwrap() - 0.2).abs() < 1e-12);
        let rep = verify_level(&data, 20, 1e-9).unwrap();
        for r in &rep.rows {
            // The class-number closed form is only claimed where d*m < N.
            let out_of_range =
                r.identity == "prop45" && !prop45_in_range(11, r.params["m"].parse().unwrap());
            assert_eq!(r.status == Status::Fail, out_of_range, "{r:?}");
        }
        for m in 1..=20 {
            if prop45_in_range(11, m) {
                assert_eq!(
                    prop45_brandt_rhs(&data.family, m).unwrap(),
                    prop45_rhs(11, m).unwrap()
                );
            }
        }
        let nv = nonvanishing_report(&data, 1e-9).unwrap();
        assert_eq!(nv.entries[0].nonzero_pairs, 1);
    }

    #[test]
    fn level_37() {
        let data = LevelData::compute(37, 20, 1e-9).unwrap();
        let rep = verify_level(&data, 20, 1e-9).unwrap();
        for r in &rep.rows {
            assert_ne!(r.status, Status::Fail, "{r:?}");
        }
        let c46 = rep.rows_named("cor46").next().unwrap();
        assert_eq!(c46.lhs, Value::Exact(rat(2, 3)));
        assert!(c46.note.as_deref().unwrap().contains("1"));
        for r in rep.rows_named("sec5_double") {
            assert_eq!(r.lhs, Value::Exact(rat(1, 3)));
        }
        let (f1, f2) = (&data.forms[0], &data.forms[1]);
        let v = lemma41_rhs(f1, f2, data.classes()).unwrap();
        assert!((v - 1.0 / 6.0).abs() < 1e-12);
        let nv = nonvanishing_report(&data, 1e-9).unwrap();
        let mut counts: Vec<usize> = nv.entries.iter().map(|e| e.nonzero_pairs).collect();
        counts.sort();
        assert_eq!(counts, vec![2, 2]);
        let (r, num, den) = nv.double_sum.unwrap();
        assert_eq!(r, rat(1, 3));
        assert_eq!((num, den), (vec![(2, 2), (3, 1)], vec![(2, 2), (3, 2)]));
    }

    #[test]
    fn small_levels_not_applicable() {
        for n in [5, 7, 13] {
            let data = LevelData::compute(n, 5, 1e-9).unwrap();
            assert!(data.forms.is_empty());
            let rep = verify_level(&data, 5, 1e-9).unwrap();
            assert!(rep.rows.iter().all(|r| r.status == Status::NotApplicable));
        }
    }

    proptest! {
        #[test]
        fn reconstruct_roundtrip(p in -500i64..500, q in 1i64..400) {
            let x = p as f64 / q as f64 + 1e-11;
            let r = reconstruct(x, 400, 1e-9).unwrap();
            prop_assert_eq!(r, rat(p, q));
        }

        #[test]
        fn prop45_at_one_matches_case_formula_off_one_mod_12(idx in 0usize..20) {
            let primes: Vec<u64> = (14..400).filter(|&p| crate::arith::is_prime(p) && p % 12 != 1).collect();
            let n = primes[idx % primes.len()];
            let c = cor46_value(n).unwrap();
            prop_assert!(!c.discrepant);
        }

        #[test]
        fn prop45_at_one_one_mod_12(idx in 0usize..20) {
            let primes: Vec<u64> = (14..600).filter(|&p| crate::arith::is_prime(p) && p % 12 == 1).collect();
            let n = primes[idx % primes.len()] as i64;
            prop_assert_eq!(cor46_value(n as u64).unwrap().derived, rat((n - 25) * (n - 13), 12 * (n - 1)));
        }
    }
}
