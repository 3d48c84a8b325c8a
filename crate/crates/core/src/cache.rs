//! On-disk cache: one JSON file per level holding the class data, Brandt
//! matrices and eigenforms. Everything is re-validated on load.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::brandt::{BrandtFamily, BrandtMatrix};
use crate::eigen::{hecke_eigenvalue, Eigenform};
use crate::error::{Error, Result};
use crate::quaternion::{IdealClassData, Lattice, QuaternionAlgebra};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct LatticeRecord {
    den: String,
    rows: Vec<[String; 4]>,
}

impl LatticeRecord {
    fn from_lattice(l: &Lattice) -> Self {
        LatticeRecord {
            den: l.den().to_string(),
            rows: l
                .int_rows()
                .iter()
                .map(|r| r.clone().map(|x| x.to_string()))
                .collect(),
        }
    }

    fn to_lattice(&self) -> Result<Lattice> {
        let parse = |s: &str| {
            s.parse::<BigInt>()
                .map_err(|_| Error::Cache(format!("bad integer {s:?}")))
        };
        let rows = self
            .rows
            .iter()
            .map(|r| Ok([parse(&r[0])?, parse(&r[1])?, parse(&r[2])?, parse(&r[3])?]))
            .collect::<Result<Vec<_>>>()?;
        Lattice::from_int_generators(rows, parse(&self.den)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ClassRecord {
    algebra: QuaternionAlgebra,
    maximal_order: LatticeRecord,
    reps: Vec<LatticeRecord>,
    norms: Vec<u64>,
    right_orders: Vec<LatticeRecord>,
    weights: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct FormRecord {
    label: String,
    lambda: Vec<String>,
    lambda_error: String,
    eigenvalues: BTreeMap<u64, String>,
    residuals: BTreeMap<u64, String>,
}

fn fmt_real(x: f64) -> String {
    format!("{x:.29e}")
}

fn parse_real(s: &str) -> Result<f64> {
    s.parse()
        .map_err(|_| Error::Cache(format!("bad real {s:?}")))
}

impl FormRecord {
    fn from_form(f: &Eigenform) -> Self {
        FormRecord {
            label: f.label.clone(),
            lambda: f.lambda.iter().map(|&x| fmt_real(x)).collect(),
            lambda_error: fmt_real(f.lambda_error),
            eigenvalues: f
                .eigenvalues
                .iter()
                .map(|(&m, &a)| (m, fmt_real(a)))
                .collect(),
            residuals: f
                .residuals
                .iter()
                .map(|(&m, &r)| (m, fmt_real(r)))
                .collect(),
        }
    }

    fn to_form(&self, level: u64) -> Result<Eigenform> {
        let map = |m: &BTreeMap<u64, String>| {
            m.iter()
                .map(|(&k, v)| Ok((k, parse_real(v)?)))
                .collect::<Result<BTreeMap<_, _>>>()
        };
        Ok(Eigenform {
            label: self.label.clone(),
            level,
            lambda: self
                .lambda
                .iter()
                .map(|s| parse_real(s))
                .collect::<Result<_>>()?,
            lambda_error: parse_real(&self.lambda_error)?,
            eigenvalues: map(&self.eigenvalues)?,
            residuals: map(&self.residuals)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct CacheFile {
    schema_version: u32,
    level: u64,
    m_max: u64,
    tol: String,
    classes: ClassRecord,
    matrices: Vec<BrandtMatrix>,
    eigenforms: Vec<FormRecord>,
}

/// What a cache file holds once loaded and checked.
#[derive(Debug, Clone)]
pub struct CacheEntry {
    pub family: BrandtFamily,
    pub forms: Vec<Eigenform>,
    pub tol: f64,
}

pub fn default_cache_dir() -> Option<PathBuf> {
    dirs::cache_dir().map(|d| d.join("triple-avg"))
}

pub fn cache_path(dir: &Path, level: u64) -> PathBuf {
    dir.join(format!("level_{level}.json"))
}

fn class_record(c: &IdealClassData) -> ClassRecord {
    ClassRecord {
        algebra: c.algebra,
        maximal_order: LatticeRecord::from_lattice(&c.maximal_order),
        reps: c.reps.iter().map(LatticeRecord::from_lattice).collect(),
        norms: c.norms.clone(),
        right_orders: c
            .right_orders
            .iter()
            .map(LatticeRecord::from_lattice)
            .collect(),
        weights: c.weights.clone(),
    }
}

fn classes_from_record(level: u64, r: &ClassRecord) -> Result<IdealClassData> {
    if r.algebra.level != level {
        return Err(Error::LevelMismatch(r.algebra.level, level));
    }
    let data = IdealClassData {
        level,
        algebra: r.algebra,
        maximal_order: r.maximal_order.to_lattice()?,
        reps: r
            .reps
            .iter()
            .map(LatticeRecord::to_lattice)
            .collect::<Result<_>>()?,
        norms: r.norms.clone(),
        right_orders: r
            .right_orders
            .iter()
            .map(LatticeRecord::to_lattice)
            .collect::<Result<_>>()?,
        weights: r.weights.clone(),
    };
    data.validate()?;
    Ok(data)
}

/// Writes atomically: a temporary file in the same directory, then a rename.
pub fn store(dir: &Path, family: &BrandtFamily, forms: &[Eigenform], tol: f64) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let level = family.level();
    let file = CacheFile {
        schema_version: SCHEMA_VERSION,
        level,
        m_max: family.max_m(),
        tol: format!("{tol:e}"),
        classes: class_record(&family.classes),
        matrices: family.matrices().to_vec(),
        eigenforms: forms.iter().map(FormRecord::from_form).collect(),
    };
    let path = cache_path(dir, level);
    let tmp = dir.join(format!(".level_{level}.json.{}.tmp", std::process::id()));
    {
        let mut out = fs::File::create(&tmp)?;
        out.write_all(serde_json::to_string_pretty(&file)?.as_bytes())?;
        out.sync_all()?;
    }
    fs::rename(&tmp, &path)?;
    Ok(path)
}

/// Loads the entry for `level`, or `None` if there is no file. A file that
/// exists but fails validation is an error.
pub fn load(dir: &Path, level: u64) -> Result<Option<CacheEntry>> {
    let path = cache_path(dir, level);
    let text = match fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let file: CacheFile = serde_json::from_str(&text)?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(Error::Cache(format!(
            "{}: schema version {} (expected {SCHEMA_VERSION})",
            path.display(),
            file.schema_version
        )));
    }
    if file.level != level {
        return Err(Error::LevelMismatch(file.level, level));
    }
    let tol = parse_real(&file.tol)?;
    let classes = classes_from_record(level, &file.classes)?;
    let family = BrandtFamily::from_parts(classes, file.matrices)?;
    if family.max_m() != file.m_max {
        return Err(Error::Cache("matrix count differs from m_max".into()));
    }
    let forms = file
        .eigenforms
        .iter()
        .map(|r| r.to_form(level))
        .collect::<Result<Vec<_>>>()?;
    for f in &forms {
        for (&m, &a) in &f.eigenvalues {
            let again = hecke_eigenvalue(f, m, &family, tol)?;
            if (again - a).abs() > tol * (1.0 + a.abs()) {
                return Err(Error::Cache(format!(
                    "{}: a_{m} does not reproduce",
                    f.label
                )));
            }
        }
    }
    Ok(Some(CacheEntry { family, forms, tol }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::eigenbasis;

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let fam = BrandtFamily::compute(IdealClassData::compute(43).unwrap(), 43).unwrap();
        let forms = eigenbasis(&fam, 1e-9).unwrap();
        store(dir.path(), &fam, &forms, 1e-9).unwrap();
        let back = load(dir.path(), 43).unwrap().unwrap();
        assert_eq!(back.family, fam);
        assert_eq!(back.forms, forms);
        assert_eq!(back.tol, 1e-9);
        assert!(load(dir.path(), 47).unwrap().is_none());
    }

    #[test]
    fn rejects_tampering() {
        let dir = tempfile::tempdir().unwrap();
        let fam = BrandtFamily::compute(IdealClassData::compute(11).unwrap(), 11).unwrap();
        let forms = eigenbasis(&fam, 1e-9).unwrap();
        let path = store(dir.path(), &fam, &forms, 1e-9).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let mut json: serde_json::Value = serde_json::from_str(&text).unwrap();
        json["classes"]["weights"][0] = 1.into();
        fs::write(&path, json.to_string()).unwrap();
        assert!(load(dir.path(), 11).is_err());
        json["schema_version"] = 99.into();
        fs::write(&path, json.to_string()).unwrap();
        assert!(matches!(load(dir.path(), 11), Err(Error::Cache(_))));
    }
}
