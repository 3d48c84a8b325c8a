//! Central values from periods: triple products and the weight-one values at
//! the classes with extra units.

use crate::eigen::Eigenform;
use crate::error::{Error, Result};
use crate::quaternion::IdealClassData;

#[derive(Debug, Clone, PartialEq)]
pub struct TripleCentralValue {
    pub labels: [String; 3],
    /// `P = sum_i w_i^2 lambda_i(f) lambda_i(g) lambda_i(h)`.
    pub period_sum: f64,
    /// `P^2`.
    pub lalg: f64,
    /// Product of the three snapped `a_N`, when all three snapped.
    pub epsilon: Option<i8>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrossValue {
    pub label: String,
    pub d: u32,
    /// `lambda_k(f)^2` at the class with `w_k = 2` (d = 4) or `w_k = 3` (d = 3).
    pub value: f64,
    pub class_index: usize,
}

fn check_level(forms: &[&Eigenform], classes: &IdealClassData) -> Result<()> {
    for f in forms {
        if f.level != classes.level {
            return Err(Error::LevelMismatch(f.level, classes.level));
        }
        if f.lambda.len() != classes.class_count() {
            return Err(Error::DimensionMismatch {
                expected: classes.class_count(),
                found: f.lambda.len(),
            });
        }
    }
    Ok(())
}

pub fn period_sum(
    f: &Eigenform,
    g: &Eigenform,
    h: &Eigenform,
    classes: &IdealClassData,
) -> Result<f64> {
    check_level(&[f, g, h], classes)?;
    Ok(classes
        .weights
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            let w = w as f64;
            w * w * f.lambda[i] * g.lambda[i] * h.lambda[i]
        })
        .sum())
}

pub fn lalg_triple(
    f: &Eigenform,
    g: &Eigenform,
    h: &Eigenform,
    classes: &IdealClassData,
) -> Result<TripleCentralValue> {
    let p = period_sum(f, g, h, classes)?;
    let epsilon = match (
        f.atkin_lehner_sign(),
        g.atkin_lehner_sign(),
        h.atkin_lehner_sign(),
    ) {
        (Some(a), Some(b), Some(c)) => Some(a * b * c),
        _ => None,
    };
    Ok(TripleCentralValue {
        labels: [f.label.clone(), g.label.clone(), h.label.clone()],
        period_sum: p,
        lalg: p * p,
        epsilon,
    })
}

/// Every unordered triple `f <= g <= h` (in the given order) with the number
/// of ordered triples it stands for.
pub fn unordered_triples(
    forms: &[Eigenform],
    classes: &IdealClassData,
) -> Result<Vec<(TripleCentralValue, u32)>> {
    let mut out = Vec::new();
    for a in 0..forms.len() {
        for b in a..forms.len() {
            for c in b..forms.len() {
                let mult = if a == c {
                    1
                } else if a == b || b == c {
                    3
                } else {
                    6
                };
                out.push((lalg_triple(&forms[a], &forms[b], &forms[c], classes)?, mult));
            }
        }
    }
    Ok(out)
}

pub fn gross_value(f: &Eigenform, d: u32, classes: &IdealClassData) -> Result<GrossValue> {
    check_level(&[f], classes)?;
    let weight = match d {
        4 => 2,
        3 => 3,
        _ => return Err(Error::InvalidArgument(format!("d must be 3 or 4, got {d}"))),
    };
    let mut hits = classes
        .weights
        .iter()
        .enumerate()
        .filter(|(_, &w)| w == weight)
        .map(|(i, _)| i);
    let (Some(k), None) = (hits.next(), hits.next()) else {
        return Err(Error::NoSuchClass {
            level: classes.level,
            weight,
        });
    };
    Ok(GrossValue {
        label: f.label.clone(),
        d,
        value: f.lambda[k] * f.lambda[k],
        class_index: k,
    })
}
