//! Hecke eigenforms on the weighted space of functions on ideal classes.
//!
//! The Brandt matrices are self-adjoint for `<x, y> = sum_i w_i x_i y_i`, so
//! `W^{-1/2} B(m) W^{1/2}` is symmetric. We diagonalize a fixed integer
//! combination of those for a few primes, drop the Eisenstein line and
//! certify each eigenvector against every computed `B(m)`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::arith::{dim_newforms, is_prime, rat, sigma_n, Rational};
use crate::brandt::BrandtFamily;
use crate::error::{Error, Result};
use crate::quaternion::IdealClassData;

/// The inner product `<x, y> = sum_i w_i x_i y_i`.
#[derive(Debug, Clone, Copy)]
pub struct WeightedSpace<'a> {
    pub weights: &'a [u32],
}

impl<'a> WeightedSpace<'a> {
    pub fn new(classes: &'a IdealClassData) -> Self {
        WeightedSpace {
            weights: &classes.weights,
        }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn inner(&self, x: &[f64], y: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(x.iter().zip(y))
            .map(|(&w, (a, b))| w as f64 * a * b)
            .sum()
    }

    pub fn norm(&self, x: &[f64]) -> f64 {
        self.inner(x, x).sqrt()
    }
}

/// `e = sum_i e_i / w_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct EisensteinVector {
    pub coords: Vec<Rational>,
}

impl EisensteinVector {
    pub fn new(classes: &IdealClassData) -> Self {
        EisensteinVector {
            coords: classes.weights.iter().map(|&w| rat(1, w as i64)).collect(),
        }
    }

    /// `<e, e>`, exactly.
    pub fn self_inner(&self, weights: &[u32]) -> Rational {
        self.coords
            .iter()
            .zip(weights)
            .map(|(c, &w)| c * c * rat(w as i64, 1))
            .sum()
    }

    /// Whether `e B(m) = sigma(m)_N e` holds exactly, i.e. `e` is an eigenvector
    /// of the action `f -> B^T f`.
    pub fn is_eigenvector(&self, family: &BrandtFamily, m: u64) -> Result<bool> {
        let b = family.matrix(m)?;
        let sigma = rat(sigma_n(m, family.level())? as i64, 1);
        let n = self.coords.len();
        Ok((0..n).all(|j| {
            let s: Rational = (0..n)
                .map(|i| rat(b.entries[i][j], 1) * &self.coords[i])
                .sum();
            s == &sigma * &self.coords[j]
        }))
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.coords
            .iter()
            .map(crate::averages::rational_to_f64)
            .collect()
    }
}

/// A normalized eigenform `f' = sum_i lambda_i e_i` with `<f', f'> = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenform {
    pub label: String,
    pub level: u64,
    pub lambda: Vec<f64>,
    /// Bound on the coordinate error of `lambda`.
    pub lambda_error: f64,
    /// `m -> a_m`, integers snapped exactly.
    pub eigenvalues: BTreeMap<u64, f64>,
    /// `m -> ||B(m) f' - a_m f'||`.
    pub residuals: BTreeMap<u64, f64>,
}

impl Eigenform {
    pub fn a(&self, m: u64) -> Result<f64> {
        self.eigenvalues
            .get(&m)
            .copied()
            .ok_or(Error::MissingMatrix(m))
    }

    /// `a_N` as a sign, when it snapped to `+-1`.
    pub fn atkin_lehner_sign(&self) -> Option<i8> {
        match self.eigenvalues.get(&self.level) {
            Some(1.0) => Some(1),
            Some(-1.0) => Some(-1),
            _ => None,
        }
    }
}

fn tolerance_for(m: u64, level: u64, tol: f64) -> f64 {
    tol * (1.0 + sigma_n(m, level).unwrap_or(1) as f64)
}

fn snap(x: f64, tol: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= tol {
        r
    } else {
        x
    }
}

/// `(a_m, residual)` for the action `lambda -> B(m)^T lambda`.
fn rayleigh(family: &BrandtFamily, lambda: &[f64], m: u64) -> Result<(f64, f64)> {
    let b = family.matrix(m)?;
    let space = WeightedSpace::new(&family.classes);
    let n = lambda.len();
    let image: Vec<f64> = (0..n)
        .map(|j| (0..n).map(|i| b.entries[i][j] as f64 * lambda[i]).sum())
        .collect();
    let a = space.inner(&image, lambda) / space.inner(lambda, lambda);
    let diff: Vec<f64> = image.iter().zip(lambda).map(|(x, l)| x - a * l).collect();
    Ok((a, space.norm(&diff)))
}

/// Eigenvalue of `T_m` on `f`, certified by its residual.
pub fn hecke_eigenvalue(f: &Eigenform, m: u64, family: &BrandtFamily, tol: f64) -> Result<f64> {
    if f.level != family.level() {
        return Err(Error::LevelMismatch(f.level, family.level()));
    }
    let (a, residual) = rayleigh(family, &f.lambda, m)?;
    let bound = tolerance_for(m, family.level(), tol);
    if residual > bound {
        return Err(Error::ResidualTooLarge { m, residual });
    }
    Ok(snap(a, bound))
}

fn symmetrized(family: &BrandtFamily, m: u64) -> Result<DMatrix<f64>> {
    let b = family.matrix(m)?;
    let w = &family.classes.weights;
    let n = w.len();
    Ok(DMatrix::from_fn(n, n, |i, j| {
        b.entries[i][j] as f64 * (w[j] as f64).sqrt() / (w[i] as f64).sqrt()
    }))
}

fn min_gap(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.windows(2)
        .map(|p| p[1] - p[0])
        .fold(f64::INFINITY, f64::min)
}

/// One step of shifted inverse iteration.
fn refine(c: &DMatrix<f64>, v: &DVector<f64>, mu: f64) -> DVector<f64> {
    let n = c.nrows();
    let shift = mu + 1e-9 * (1.0 + mu.abs());
    let shifted = c - DMatrix::identity(n, n) * shift;
    match shifted.lu().solve(v) {
        Some(y) if y.iter().all(|x| x.is_finite()) && y.norm() > 0.0 => {
            let y = y.normalize();
            if y.dot(v) < 0.0 {
                -y
            } else {
                y
            }
        }
        _ => v.clone(),
    }
}

/// All normalized cuspidal eigenforms, labelled `N.k` in order of
/// `(a_2, a_3, a_5, ...)`.
pub fn eigenbasis(family: &BrandtFamily, tol: f64) -> Result<Vec<Eigenform>> {
    let level = family.level();
    let expected = dim_newforms(level)? as usize;
    if expected == 0 {
        return Ok(Vec::new());
    }
    let w = &family.classes.weights;
    let n = w.len();
    let primes: Vec<u64> = (2..=family.max_m().min(50))
        .filter(|&p| is_prime(p) && p != level)
        .collect();
    if primes.is_empty() {
        return Err(Error::Precondition(
            "family has no Hecke operators to separate with".into(),
        ));
    }
    let e_dir = DVector::from_iterator(n, w.iter().map(|&x| 1.0 / (x as f64).sqrt())).normalize();

    let wanted_gap = tol.sqrt();
    let mut used = primes.len().min(3);
    let (comb, cusp_vecs, cusp_vals) = loop {
        let mut comb = DMatrix::<f64>::zeros(n, n);
        let mut scale = 0.0;
        for (k, &p) in primes[..used].iter().enumerate() {
            let c = 3f64.powi(k as i32);
            comb += symmetrized(family, p)? * c;
            scale += c * 2.0 * (p as f64).sqrt();
        }
        comb /= scale;
        let eig = SymmetricEigen::new(comb.clone());
        let overlaps: Vec<f64> = (0..n)
            .map(|c| eig.eigenvectors.column(c).dot(&e_dir).abs())
            .collect();
        let e_col = (0..n)
            .max_by(|&a, &b| overlaps[a].total_cmp(&overlaps[b]))
            .expect("nonempty");
        if (overlaps[e_col] - 1.0).abs() > 1e-8 {
            return Err(Error::Verification(
                "Eisenstein line not found in the spectrum".into(),
            ));
        }
        let cols: Vec<usize> = (0..n).filter(|&c| c != e_col).collect();
        let vals: Vec<f64> = cols.iter().map(|&c| eig.eigenvalues[c]).collect();
        let vecs: Vec<DVector<f64>> = cols
            .iter()
            .map(|&c| eig.eigenvectors.column(c).into_owned())
            .collect();
        let gap = min_gap(&vals);
        if gap >= wanted_gap {
            break (comb, vecs, vals);
        }
        if used == primes.len() {
            if gap >= tol {
                break (comb, vecs, vals);
            }
            return Err(Error::DegenerateSpectrum {
                gap,
                max_prime: primes[used - 1],
            });
        }
        used += 1;
    };
    if cusp_vecs.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: cusp_vecs.len(),
        });
    }
    let gap = min_gap(&cusp_vals).min(
        cusp_vals
            .iter()
            .map(|v| (v - 1.0).abs())
            .fold(f64::INFINITY, f64::min),
    );

    let mut forms = Vec::with_capacity(expected);
    for (v, mu) in cusp_vecs.iter().zip(&cusp_vals) {
        let mut v = refine(&comb, v, *mu);
        // Keep exactly orthogonal to the Eisenstein line.
        let proj = v.dot(&e_dir);
        v -= &e_dir * proj;
        let v = v.normalize();
        let comb_res = (&comb * &v - &v * v.dot(&(&comb * &v))).norm();
        let mut lambda: Vec<f64> = (0..n).map(|i| v[i] / (w[i] as f64).sqrt()).collect();
        let first = lambda.iter().copied().find(|x| x.abs() > tol.max(1e-12));
        if matches!(first, Some(x) if x < 0.0) {
            lambda.iter_mut().for_each(|x| *x = -*x);
        }
        let mut form = Eigenform {
            label: String::new(),
            level,
            lambda,
            lambda_error: comb_res / gap.max(f64::EPSILON) + 4.0 * f64::EPSILON,
            eigenvalues: BTreeMap::new(),
            residuals: BTreeMap::new(),
        };
        for m in 1..=family.max_m() {
            let (a, residual) = rayleigh(family, &form.lambda, m)?;
            let bound = tolerance_for(m, level, tol);
            if residual > bound {
                return Err(Error::ResidualTooLarge { m, residual });
            }
            form.eigenvalues.insert(m, snap(a, bound));
            form.residuals.insert(m, residual);
        }
        forms.push(form);
    }

    let key_primes: Vec<u64> = (2..=family.max_m())
        .filter(|&p| is_prime(p) && p != level)
        .collect();
    forms.sort_by(|f, g| {
        for p in &key_primes {
            let (a, b) = (f.eigenvalues[p], g.eigenvalues[p]);
            if (a - b).abs() > tolerance_for(*p, level, tol) {
                return a.total_cmp(&b);
            }
        }
        std::cmp::Ordering::Equal
    });
    for (k, f) in forms.iter_mut().enumerate() {
        f.label = format!("{level}.{}", k + 1);
    }
    Ok(forms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::trace_brandt_closed_form;
    use crate::averages::rational_to_f64;

    fn family(n: u64, m: u64) -> BrandtFamily {
        BrandtFamily::compute(IdealClassData::compute(n).unwrap(), m).unwrap()
    }

    #[test]
    fn eisenstein_vector() {
        for n in [11, 37, 41, 43] {
            let fam = family(n, 10);
            let e = EisensteinVector::new(&fam.classes);
            assert_eq!(e.self_inner(&fam.classes.weights), rat(n as i64 - 1, 12));
            for m in 1..=10 {
                assert!(e.is_eigenvector(&fam, m).unwrap());
            }
        }
    }

    #[test]
    fn level_11_form() {
        let fam = family(11, 20);
        let forms = eigenbasis(&fam, 1e-9).unwrap();
        assert_eq!(forms.len(), 1);
        let f = &forms[0];
        let s = 1.0 / 5f64.sqrt();
        assert!((f.lambda[0] - s).abs() < 1e-12 && (f.lambda[1] + s).abs() < 1e-12);
        assert_eq!(f.a(1).unwrap(), 1.0);
        assert_eq!(f.a(2).unwrap(), -2.0);
        assert_eq!(f.a(11).unwrap(), 1.0);
        assert_eq!(hecke_eigenvalue(f, 2, &fam, 1e-9).unwrap(), -2.0);
        assert_eq!(f.label, "11.1");
    }

    #[test]
    fn level_13_is_empty() {
        assert!(eigenbasis(&family(13, 20), 1e-9).unwrap().is_empty());
    }

    #[test]
    fn level_37_forms() {
        let fam = family(37, 40);
        let forms = eigenbasis(&fam, 1e-9).unwrap();
        assert_eq!(forms.len(), 2);
        let mut shapes: Vec<Vec<f64>> = forms
            .iter()
            .map(|f| {
                let mut v: Vec<f64> = f.lambda.iter().map(|x| x.abs()).collect();
                v.sort_by(f64::total_cmp);
                v
            })
            .collect();
        shapes.sort_by(|a, b| a[0].total_cmp(&b[0]));
        let s2 = 1.0 / 2f64.sqrt();
        let s6 = 1.0 / 6f64.sqrt();
        for (got, want) in shapes[0].iter().zip([0.0, s2, s2]) {
            assert!((got - want).abs() < 1e-9);
        }
        for (got, want) in shapes[1].iter().zip([s6, s6, 2.0 * s6]) {
            assert!((got - want).abs() < 1e-9);
        }
        for f in &forms {
            assert!(f.atkin_lehner_sign().is_some());
        }
    }

    #[test]
    fn orthonormal_and_complete() {
        for n in [23, 29, 31, 43, 61] {
            let fam = family(n, 30);
            let tol = 1e-9;
            let forms = eigenbasis(&fam, tol).unwrap();
            let space = WeightedSpace::new(&fam.classes);
            let e = EisensteinVector::new(&fam.classes).as_f64();
            for (a, f) in forms.iter().enumerate() {
                assert!(space.inner(&f.lambda, &e).abs() <= 10.0 * tol);
                for (b, g) in forms.iter().enumerate() {
                    let d = if a == b { 1.0 } else { 0.0 };
                    assert!((space.inner(&f.lambda, &g.lambda) - d).abs() <= 10.0 * tol);
                }
            }
            // sum_f f' (x) f' + e (x) e / <e, e> = W^{-1}
            let w = &fam.classes.weights;
            let ee = 12.0 / (n as f64 - 1.0);
            for i in 0..w.len() {
                for j in 0..w.len() {
                    let s: f64 = forms.iter().map(|f| f.lambda[i] * f.lambda[j]).sum::<f64>()
                        + e[i] * e[j] * ee;
                    let want = if i == j { 1.0 / w[i] as f64 } else { 0.0 };
                    assert!((s - want).abs() <= 10.0 * tol, "N={n} ({i},{j})");
                }
            }
            for m in 1..=30 {
                let sum: f64 = forms.iter().map(|f| f.a(m).unwrap()).sum();
                let closed = rational_to_f64(&trace_brandt_closed_form(n, m).unwrap())
                    - sigma_n(m, n).unwrap() as f64;
                assert!((sum - closed).abs() <= forms.len() as f64 * tol);
            }
            for f in &forms {
                let an = f.a(n).unwrap_or(f64::NAN);
                if n <= 30 {
                    assert!((an * an - 1.0).abs() <= tol);
                }
                for p in [2u64, 3, 5] {
                    let mut pk = p;
                    while pk * p <= 30 {
                        let prev = if pk == p { 1.0 } else { f.a(pk / p).unwrap() };
                        let lhs = f.a(p).unwrap() * f.a(pk).unwrap();
                        let rhs = f.a(pk * p).unwrap() + p as f64 * prev;
                        assert!((lhs - rhs).abs() <= 1e-8);
                        pk *= p;
                    }
                }
            }
        }
    }
}
