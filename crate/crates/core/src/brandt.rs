//! Brandt matrices `B(m)` from lattice point counts on products of ideal
//! class representatives.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, rat, sigma_n, trace_brandt_closed_form, Rational};
use crate::error::{Error, Result};
use crate::quaternion::{theta_counts, IdealClassData, Lattice, QuaternionAlgebra};
use crate::report::{ReportRow, Status, Value, VerificationReport};

pub type IntMatrix = Vec<Vec<i64>>;

pub fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

fn transpose(a: &IntMatrix) -> IntMatrix {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| a[j][i]).collect()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BrandtMatrix {
    pub level: u64,
    pub index: u64,
    pub entries: IntMatrix,
}

impl BrandtMatrix {
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn trace(&self) -> i64 {
        (0..self.size()).map(|i| self.entries[i][i]).sum()
    }

    pub fn row_sums(&self) -> Vec<i64> {
        self.entries.iter().map(|r| r.iter().sum()).collect()
    }

    /// `w_j B_ij = w_i B_ji` for all `i, j`.
    pub fn is_weight_adjoint(&self, weights: &[u32]) -> bool {
        let n = self.size();
        (0..n).all(|i| {
            (0..n).all(|j| {
                weights[j] as i64 * self.entries[i][j] == weights[i] as i64 * self.entries[j][i]
            })
        })
    }
}

/// Number of `x` in `J^{-1} I` with `Nr(x) * norm_ratio = m`, for every
/// `0 <= m <= max_m` (the zero vector is never counted).
pub fn theta_count(
    alg: &QuaternionAlgebra,
    i: &Lattice,
    j: &Lattice,
    norm_j: u64,
    norm_ratio: &Rational,
    max_m: u64,
) -> Result<Vec<u64>> {
    // J^{-1} = conj(J) / Nr(J) for a locally principal J.
    let quotient = j.conj().product(i, alg).scale(&rat(1, norm_j as i64));
    let gram = quotient
        .norm_gram(alg, &(Rational::from_integer(1.into()) / norm_ratio))
        .ok_or_else(|| Error::Verification("normalized norm form is not integral".into()))?;
    Ok(theta_counts(&gram, max_m))
}

/// The Brandt matrices `B(1), ..., B(max_m)` over one set of ideal classes.
#[derive(Debug, Clone, PartialEq)]
pub struct BrandtFamily {
    pub classes: IdealClassData,
    matrices: Vec<BrandtMatrix>,
}

impl BrandtFamily {
    pub fn compute(classes: IdealClassData, max_m: u64) -> Result<Self> {
        let matrices = compute_matrices(&classes, max_m)?;
        Ok(BrandtFamily { classes, matrices })
    }

    /// Rebuilds a family from stored matrices, re-checking the cheap invariants.
    pub fn from_parts(classes: IdealClassData, matrices: Vec<BrandtMatrix>) -> Result<Self> {
        for (k, b) in matrices.iter().enumerate() {
            if b.index != k as u64 + 1 || b.level != classes.level {
                return Err(Error::Verification("stored matrices out of order".into()));
            }
            check_orientation(b, &classes.weights)?;
        }
        Ok(BrandtFamily { classes, matrices })
    }

    pub fn level(&self) -> u64 {
        self.classes.level
    }

    pub fn max_m(&self) -> u64 {
        self.matrices.len() as u64
    }

    pub fn matrix(&self, m: u64) -> Result<&BrandtMatrix> {
        if m == 0 {
            return Err(Error::InvalidArgument("Brandt index must be >= 1".into()));
        }
        self.matrices
            .get(m as usize - 1)
            .ok_or(Error::MissingMatrix(m))
    }

    pub fn matrices(&self) -> &[BrandtMatrix] {
        &self.matrices
    }
}

fn check_orientation(b: &BrandtMatrix, weights: &[u32]) -> Result<()> {
    let sigma = sigma_n(b.index, b.level)? as i64;
    if b.row_sums().iter().any(|&s| s != sigma) || !b.is_weight_adjoint(weights) {
        return Err(Error::Verification(format!(
            "B({}) fails row sums or weight adjointness",
            b.index
        )));
    }
    Ok(())
}

fn compute_matrices(classes: &IdealClassData, max_m: u64) -> Result<Vec<BrandtMatrix>> {
    let n = classes.class_count();
    let alg = &classes.algebra;
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    // counts[(i, j)][m] = #{x in I_j^{-1} I_i : Nr(x) Nr(I_j)/Nr(I_i) = m}
    let counts: Vec<Vec<u64>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let ratio = rat(classes.norms[j] as i64, classes.norms[i] as i64);
            theta_count(
                alg,
                &classes.reps[i],
                &classes.reps[j],
                classes.norms[j],
                &ratio,
                max_m,
            )
        })
        .collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(max_m as usize);
    for m in 1..=max_m {
        let mut entries = vec![vec![0i64; n]; n];
        for (&(i, j), c) in pairs.iter().zip(&counts) {
            let units = 2 * classes.weights[j] as u64;
            let cnt = c[m as usize];
            if cnt % units != 0 {
                return Err(Error::Verification(format!(
                    "count {cnt} for B_{i}{j}({m}) is not divisible by {units}"
                )));
            }
            entries[i][j] = (cnt / units) as i64;
        }
        let mut b = BrandtMatrix {
            level: classes.level,
            index: m,
            entries,
        };
        let sigma = sigma_n(m, classes.level)? as i64;
        if b.row_sums().iter().any(|&s| s != sigma) {
            b.entries = transpose(&b.entries);
        }
        check_orientation(&b, &classes.weights)?;
        out.push(b);
    }
    Ok(out)
}

/// `B(m)` for one index.
pub fn brandt_matrix(classes: &IdealClassData, m: u64) -> Result<BrandtMatrix> {
    if m == 0 {
        return Err(Error::InvalidArgument("Brandt index must be >= 1".into()));
    }
    Ok(compute_matrices(classes, m)?.pop().expect("m >= 1"))
}

fn count_row(identity: &str, m: Option<u64>, bad: usize, checked: usize) -> ReportRow {
    let row = ReportRow::new(
        identity,
        Value::Exact(Rational::from_integer(bad.into())),
        Value::Exact(Rational::from_integer(0.into())),
        Some(bad as f64),
        Status::from_bool(bad == 0),
    );
    let row = match m {
        Some(m) => row.param("m", m),
        None => row,
    };
    row.with_note(format!("{bad} of {checked} instances fail"))
}

/// Checks every Brandt matrix invariant and the trace formula for `m <= m_max`.
pub fn verify_brandt_family(family: &BrandtFamily, m_max: u64) -> Result<VerificationReport> {
    let level = family.level();
    let w = &family.classes.weights;
    let n = family.classes.class_count();
    let mut rep = VerificationReport::new(level);
    let m_max = m_max.min(family.max_m());

    let b1 = family.matrix(1)?;
    let identity_ok = (0..n).all(|i| (0..n).all(|j| b1.entries[i][j] == (i == j) as i64));
    rep.push(count_row(
        "brandt.identity",
        Some(1),
        (!identity_ok) as usize,
        1,
    ));

    for m in 1..=m_max {
        let b = family.matrix(m)?;
        let sigma = sigma_n(m, level)? as i64;
        let bad_rows = b.row_sums().iter().filter(|&&s| s != sigma).count();
        rep.push(count_row("brandt.row_sums", Some(m), bad_rows, n));
        rep.push(count_row(
            "brandt.adjoint",
            Some(m),
            (!b.is_weight_adjoint(w)) as usize,
            1,
        ));
        // sum_i B_ij / w_i = sigma / w_j, checked as sum_i B_ij L/w_i = sigma L/w_j.
        let lcm: i64 = 6;
        let bad_cols = (0..n)
            .filter(|&j| {
                let lhs: i64 = (0..n).map(|i| b.entries[i][j] * lcm / w[i] as i64).sum();
                lhs != sigma * lcm / w[j] as i64
            })
            .count();
        rep.push(count_row("brandt.weighted_columns", Some(m), bad_cols, n));

        let closed = trace_brandt_closed_form(level, m)?;
        let tr = Rational::from_integer(b.trace().into());
        let ok = closed == tr;
        rep.push(
            ReportRow::new(
                "trace_formula",
                Value::Exact(tr.clone()),
                Value::Exact(closed.clone()),
                Some(crate::averages::rational_to_f64(&(tr - closed)).abs()),
                Status::from_bool(ok),
            )
            .param("m", m),
        );
    }

    let mats: Vec<&IntMatrix> = (1..=m_max)
        .map(|m| &family.matrix(m).unwrap().entries)
        .collect();
    let mut checked = 0;
    let mut bad = 0;
    for a in 0..mats.len() {
        for b in a + 1..mats.len() {
            checked += 1;
            if mat_mul(mats[a], mats[b]) != mat_mul(mats[b], mats[a]) {
                bad += 1;
            }
        }
    }
    rep.push(count_row("brandt.commute", None, bad, checked));

    let (mut checked, mut bad) = (0, 0);
    for m1 in 2..=m_max {
        for m2 in m1 + 1..=m_max / m1 {
            if num_integer::gcd(m1, m2) == 1 && m1 * m2 <= m_max {
                checked += 1;
                if mat_mul(mats[m1 as usize - 1], mats[m2 as usize - 1])
                    != *mats[(m1 * m2) as usize - 1]
                {
                    bad += 1;
                }
            }
        }
    }
    rep.push(count_row("brandt.multiplicative", None, bad, checked));

    for p in (2..=m_max).filter(|&p| is_prime(p) && p != level) {
        let (mut checked, mut bad) = (0, 0);
        let mut pk = p;
        while pk * p <= m_max {
            checked += 1;
            let lhs = mat_mul(mats[p as usize - 1], mats[pk as usize - 1]);
            let next = &mats[(pk * p) as usize - 1];
            let prev: IntMatrix = if pk == p {
                (0..n)
                    .map(|i| (0..n).map(|j| (i == j) as i64).collect())
                    .collect()
            } else {
                mats[(pk / p) as usize - 1].clone()
            };
            let rhs: IntMatrix = (0..n)
                .map(|i| (0..n).map(|j| next[i][j] + p as i64 * prev[i][j]).collect())
                .collect();
            if lhs != rhs {
                bad += 1;
            }
            pk *= p;
        }
        if checked > 0 {
            rep.push(count_row("brandt.hecke_recursion", None, bad, checked).param("p", p));
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_11_matrices() {
        let classes = IdealClassData::compute(11).unwrap();
        assert_eq!(classes.weights, vec![3, 2]);
        let fam = BrandtFamily::compute(classes.clone(), 20).unwrap();
        assert_eq!(fam.matrix(1).unwrap().entries, vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(fam.matrix(2).unwrap().entries, vec![vec![0, 3], vec![2, 1]]);
        assert_eq!(brandt_matrix(&classes, 2).unwrap(), *fam.matrix(2).unwrap());
        let rep = verify_brandt_family(&fam, 20).unwrap();
        assert!(rep.all_pass(), "{}", rep.to_table());
        assert_eq!(
            Rational::from_integer(fam.matrix(11).unwrap().trace().into()),
            trace_brandt_closed_form(11, 11).unwrap()
        );
    }

    #[test]
    fn raw_counts() {
        let c = IdealClassData::compute(11).unwrap();
        let ratio = rat(c.norms[1] as i64, c.norms[0] as i64);
        let counts =
            theta_count(&c.algebra, &c.reps[0], &c.reps[1], c.norms[1], &ratio, 2).unwrap();
        assert_eq!(counts[0], 0);
        assert_eq!(counts[2], 12);

        let c = IdealClassData::compute(37).unwrap();
        for i in 0..3 {
            let counts = theta_count(
                &c.algebra,
                &c.reps[i],
                &c.reps[i],
                c.norms[i],
                &rat(1, 1),
                1,
            )
            .unwrap();
            assert_eq!(counts[1], 2);
        }
    }

    #[test]
    fn level_37_family() {
        let fam = BrandtFamily::compute(IdealClassData::compute(37).unwrap(), 12).unwrap();
        assert_eq!(fam.matrix(1).unwrap().trace(), 3);
        let b2 = &fam.matrix(2).unwrap().entries;
        let b3 = &fam.matrix(3).unwrap().entries;
        assert_eq!(mat_mul(b2, b3), mat_mul(b3, b2));
        assert!(verify_brandt_family(&fam, 12).unwrap().all_pass());
        assert!(matches!(fam.matrix(13), Err(Error::MissingMatrix(13))));
    }
}
