//! Command-line front end. `main` only parses arguments and forwards here.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};

use crate::arith::{check_level, is_prime, rat, trace_brandt_closed_form, Rational};
use crate::averages::{nonvanishing_report, reconstruct, verify_level, LevelData};
use crate::brandt::{verify_brandt_family, BrandtFamily};
use crate::cache;
use crate::eigen::eigenbasis;
use crate::error::{Error, Result};
use crate::quaternion::{expected_shape, IdealClassData};
use crate::report::{format_float, VerificationReport};
use crate::special::{gross_value, unordered_triples};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Parser)]
#[command(
    name = "triple-avg",
    version,
    about = "Brandt matrices, quaternionic eigenforms and exact averages of triple product values"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Prime level N >= 5.
    #[arg(long)]
    pub level: u64,
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Cache directory (defaults to the platform cache directory).
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
    #[arg(long)]
    pub no_cache: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ideal classes: count, weights and the mass check.
    Classes(Common),
    /// Check every identity at one level.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 20)]
        m_max: u64,
    },
    /// All unordered triples with their central values.
    Triple(Common),
    /// One Brandt matrix.
    Brandt {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        m: u64,
    },
    /// Eigenforms and their Hecke eigenvalues at small primes.
    Eigen(Common),
    /// Weight-one values at the classes with extra units.
    Gross(Common),
    /// Traces of B(m) against the class number formula.
    TraceCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 20)]
        m_max: u64,
    },
}

/// Exit code for an error: 2 for bad input, 1 otherwise.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidArgument(_)
        | Error::InvalidLevel(_)
        | Error::NotADiscriminant(_)
        | Error::Precondition(_)
        | Error::NoSuchClass { .. } => 2,
        _ => 1,
    }
}

impl Common {
    fn check(&self) -> Result<()> {
        check_level(self.level)?;
        if !(self.tol > 0.0 && self.tol < 1e-3) {
            return Err(Error::InvalidArgument(format!(
                "tolerance {} out of range",
                self.tol
            )));
        }
        Ok(())
    }

    fn cache_dir(&self) -> Option<PathBuf> {
        if self.no_cache {
            None
        } else {
            self.cache_dir.clone().or_else(cache::default_cache_dir)
        }
    }

    /// Level data with matrices up to at least `m_max`, from the cache when
    /// it is deep enough and built with the same tolerance.
    fn level_data(&self, m_max: u64) -> Result<LevelData> {
        let need = m_max.max(self.level);
        let dir = self.cache_dir();
        if let Some(dir) = &dir {
            if let Some(entry) = cache::load(dir, self.level)? {
                if entry.family.max_m() >= need && entry.tol == self.tol {
                    return LevelData::from_parts(entry.family, entry.forms);
                }
            }
        }
        let classes = IdealClassData::compute(self.level)?;
        let family = BrandtFamily::compute(classes, need)?;
        let forms = eigenbasis(&family, self.tol)?;
        if let Some(dir) = &dir {
            cache::store(dir, &family, &forms, self.tol)?;
        }
        LevelData::from_parts(family, forms)
    }

    fn classes(&self) -> Result<IdealClassData> {
        if let Some(dir) = self.cache_dir() {
            if let Some(entry) = cache::load(&dir, self.level)? {
                return Ok(entry.family.classes);
            }
        }
        IdealClassData::compute(self.level)
    }
}

/// A rectangular result with a JSON rendering alongside.
struct Output {
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
    json: Json,
}

impl Output {
    fn render(&self, format: Format) -> String {
        match format {
            Format::Json => format!(
                "{}\n",
                serde_json::to_string_pretty(&self.json).expect("json")
            ),
            Format::Csv => {
                let mut s = self.headers.join(",");
                s.push('\n');
                for r in &self.rows {
                    let cells: Vec<String> = r
                        .iter()
                        .map(|c| {
                            if c.contains(',') {
                                format!("\"{c}\"")
                            } else {
                                c.clone()
                            }
                        })
                        .collect();
                    s.push_str(&cells.join(","));
                    s.push('\n');
                }
                s
            }
            Format::Table => {
                let widths: Vec<usize> = (0..self.headers.len())
                    .map(|c| {
                        self.rows
                            .iter()
                            .map(|r| r[c].len())
                            .chain([self.headers[c].len()])
                            .max()
                            .unwrap_or(0)
                    })
                    .collect();
                let mut s = String::new();
                let line = |cells: Vec<&str>| {
                    cells
                        .iter()
                        .zip(&widths)
                        .map(|(c, w)| format!("{c:<w$}"))
                        .collect::<Vec<_>>()
                        .join("  ")
                        .trim_end()
                        .to_string()
                };
                let _ = writeln!(
                    s,
                    "{}",
                    line(self.headers.iter().map(String::as_str).collect())
                );
                for r in &self.rows {
                    let _ = writeln!(s, "{}", line(r.iter().map(String::as_str).collect()));
                }
                s
            }
        }
    }
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn classes_json(c: &IdealClassData) -> Json {
    json!({
        "n": c.class_count(),
        "weights": c.weights,
        "norms": c.norms,
        "mass": c.mass().to_string(),
    })
}

fn cmd_classes(common: &Common) -> Result<(String, i32)> {
    let c = common.classes()?;
    let mass_ok = c.mass() == rat(common.level as i64 - 1, 12);
    let (n, weights) = expected_shape(common.level);
    let shape_ok = n == c.class_count() && weights == c.weights;
    let mut js = classes_json(&c);
    js["level"] = json!(common.level);
    js["mass_ok"] = json!(mass_ok);
    js["shape_ok"] = json!(shape_ok);
    let ok = if mass_ok && shape_ok { "ok" } else { "FAIL" };
    let out = Output {
        headers: strings(&["level", "n", "weights", "mass", "check"]),
        rows: vec![vec![
            common.level.to_string(),
            c.class_count().to_string(),
            format!("{:?}", c.weights),
            c.mass().to_string(),
            ok.to_string(),
        ]],
        json: js,
    };
    Ok((out.render(common.format), if ok == "ok" { 0 } else { 1 }))
}

fn render_report(rep: &VerificationReport, classes: &IdealClassData, format: Format) -> String {
    match format {
        Format::Json => {
            let js = json!({
                "level": rep.level,
                "identities": rep.identities_json(),
                "classes": classes_json(classes),
            });
            format!("{}\n", serde_json::to_string_pretty(&js).expect("json"))
        }
        Format::Csv => rep.to_csv(),
        Format::Table => rep.to_table(),
    }
}

fn cmd_verify(common: &Common, m_max: u64) -> Result<(String, i32)> {
    if m_max == 0 {
        return Err(Error::InvalidArgument("--m-max must be >= 1".into()));
    }
    let data = common.level_data(m_max)?;
    let mut rep = verify_brandt_family(&data.family, m_max)?;
    rep.extend(verify_level(&data, m_max, common.tol)?);
    let code = if rep.all_pass() { 0 } else { 1 };
    let nonvanishing = nonvanishing_json(&data, common.tol)?;
    let text = match common.format {
        Format::Json => {
            let js = json!({
                "level": rep.level,
                "identities": rep.identities_json(),
                "classes": classes_json(data.classes()),
                "nonvanishing": nonvanishing,
            });
            format!("{}\n", serde_json::to_string_pretty(&js).expect("json"))
        }
        Format::Csv => rep.to_csv(),
        Format::Table => {
            let mut s = rep.to_table();
            let nv = nonvanishing_report(&data, common.tol)?;
            for e in &nv.entries {
                let _ = writeln!(
                    s,
                    "form {}: {} nonzero pairs, double sum {}",
                    e.label,
                    e.nonzero_pairs,
                    format_float(e.double_sum)
                );
            }
            if let Some((r, num, den)) = &nv.double_sum {
                let _ = writeln!(
                    s,
                    "double sum for every form: {r} (N-25 = {num:?}, N-1 = {den:?})"
                );
            }
            let failed = rep.failures().count();
            let _ = writeln!(s, "{} rows, {failed} failed", rep.rows.len());
            s
        }
    };
    Ok((text, code))
}

fn cmd_triple(common: &Common) -> Result<(String, i32)> {
    let data = common.level_data(1)?;
    let triples = unordered_triples(&data.forms, data.classes())?;
    let max_den = 12 * (common.level - 1);
    let mut rows = Vec::new();
    let mut items = Vec::new();
    for (t, mult) in &triples {
        let exact = reconstruct(t.lalg, max_den, 100.0 * common.tol);
        let eps = t
            .epsilon
            .map(|e| e.to_string())
            .unwrap_or_else(|| "?".into());
        rows.push(vec![
            t.labels.join(" "),
            mult.to_string(),
            format_float(t.period_sum),
            format_float(t.lalg),
            exact
                .as_ref()
                .map(Rational::to_string)
                .unwrap_or_else(|| "-".into()),
            eps.clone(),
        ]);
        items.push(json!({
            "labels": t.labels,
            "multiplicity": mult,
            "period_sum": format_float(t.period_sum),
            "lalg": format_float(t.lalg),
            "lalg_rational": exact.map(|r| r.to_string()),
            "epsilon": t.epsilon,
        }));
    }
    let out = Output {
        headers: strings(&["forms", "mult", "period_sum", "lalg", "rational", "epsilon"]),
        rows,
        json: json!({"level": common.level, "triples": items}),
    };
    Ok((out.render(common.format), 0))
}

fn cmd_brandt(common: &Common, m: u64) -> Result<(String, i32)> {
    if m == 0 {
        return Err(Error::InvalidArgument("--m must be >= 1".into()));
    }
    let family = if common.no_cache {
        BrandtFamily::compute(IdealClassData::compute(common.level)?, m)?
    } else {
        common.level_data(m)?.family
    };
    let b = family.matrix(m)?;
    let rows: Vec<Vec<String>> = b
        .entries
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = vec![(i + 1).to_string()];
            row.extend(r.iter().map(|x| x.to_string()));
            row
        })
        .collect();
    let mut headers = vec!["row".to_string()];
    headers.extend((1..=b.size()).map(|j| j.to_string()));
    let out = Output {
        headers,
        rows,
        json: json!({"level": common.level, "m": m, "entries": b.entries, "weights": family.classes.weights}),
    };
    Ok((out.render(common.format), 0))
}

fn cmd_eigen(common: &Common) -> Result<(String, i32)> {
    let data = common.level_data(1)?;
    let primes: Vec<u64> = (2..=data.family.max_m().min(13))
        .filter(|&p| is_prime(p))
        .collect();
    let mut rows = Vec::new();
    let mut items = Vec::new();
    for f in &data.forms {
        let aps: Vec<String> = primes
            .iter()
            .map(|&p| format!("a{p}={}", fmt_eigenvalue(f.eigenvalues[&p])))
            .collect();
        rows.push(vec![
            f.label.clone(),
            f.lambda
                .iter()
                .map(|&x| format!("{x:.12}"))
                .collect::<Vec<_>>()
                .join(" "),
            aps.join(" "),
            fmt_eigenvalue(f.eigenvalues[&common.level]),
        ]);
        items.push(json!({
            "label": f.label,
            "lambda": f.lambda.iter().map(|&x| format_float(x)).collect::<Vec<_>>(),
            "eigenvalues": f.eigenvalues.iter().map(|(m, a)| (m.to_string(), Json::String(format_float(*a)))).collect::<serde_json::Map<_, _>>(),
        }));
    }
    let out = Output {
        headers: strings(&["label", "lambda", "hecke", "a_N"]),
        rows,
        json: json!({"level": common.level, "weights": data.classes().weights, "eigenforms": items}),
    };
    Ok((out.render(common.format), 0))
}

fn fmt_eigenvalue(a: f64) -> String {
    if a == a.round() {
        format!("{a:.0}")
    } else {
        format!("{a:.9}")
    }
}

fn cmd_gross(common: &Common) -> Result<(String, i32)> {
    let data = common.level_data(1)?;
    let max_den = 12 * (common.level - 1);
    let mut rows = Vec::new();
    let mut items = Vec::new();
    for f in &data.forms {
        for d in [3, 4] {
            match gross_value(f, d, data.classes()) {
                Ok(g) => {
                    let exact = reconstruct(g.value, max_den, 100.0 * common.tol);
                    rows.push(vec![
                        f.label.clone(),
                        d.to_string(),
                        (g.class_index + 1).to_string(),
                        format_float(g.value),
                        exact
                            .as_ref()
                            .map(Rational::to_string)
                            .unwrap_or_else(|| "-".into()),
                    ]);
                    items.push(json!({
                        "label": f.label, "d": d, "class": g.class_index + 1,
                        "value": format_float(g.value),
                        "rational": exact.map(|r| r.to_string()),
                    }));
                }
                Err(Error::NoSuchClass { .. }) => {}
                Err(e) => return Err(e),
            }
        }
    }
    let out = Output {
        headers: strings(&["form", "d", "class", "value", "rational"]),
        rows,
        json: json!({"level": common.level, "values": items}),
    };
    Ok((out.render(common.format), 0))
}

fn cmd_trace_check(common: &Common, m_max: u64) -> Result<(String, i32)> {
    if m_max == 0 {
        return Err(Error::InvalidArgument("--m-max must be >= 1".into()));
    }
    let family = if common.no_cache {
        BrandtFamily::compute(IdealClassData::compute(common.level)?, m_max)?
    } else {
        common.level_data(m_max)?.family
    };
    let mut rep = VerificationReport::new(common.level);
    for m in 1..=m_max {
        let tr = family.matrix(m)?.trace();
        let closed = trace_brandt_closed_form(common.level, m)?;
        let ok = closed == Rational::from_integer(tr.into());
        rep.push(
            crate::report::ReportRow::new(
                "trace_formula",
                crate::report::Value::Exact(Rational::from_integer(tr.into())),
                crate::report::Value::Exact(closed),
                None,
                crate::report::Status::from_bool(ok),
            )
            .param("m", m),
        );
    }
    let code = if rep.all_pass() { 0 } else { 1 };
    Ok((render_report(&rep, &family.classes, common.format), code))
}

/// Runs one command, returning what to print and the exit code.
pub fn run(cli: &Cli) -> Result<(String, i32)> {
    let common = match &cli.command {
        Command::Classes(c) | Command::Triple(c) | Command::Eigen(c) | Command::Gross(c) => c,
        Command::Verify { common, .. }
        | Command::Brandt { common, .. }
        | Command::TraceCheck { common, .. } => common,
    };
    common.check()?;
    match &cli.command {
        Command::Classes(c) => cmd_classes(c),
        Command::Verify { common, m_max } => cmd_verify(common, *m_max),
        Command::Triple(c) => cmd_triple(c),
        Command::Brandt { common, m } => cmd_brandt(common, *m),
        Command::Eigen(c) => cmd_eigen(c),
        Command::Gross(c) => cmd_gross(c),
        Command::TraceCheck { common, m_max } => cmd_trace_check(common, *m_max),
    }
}

/// Per-form counts of nonzero pairs, plus the common double sum when it is
/// known exactly.
pub fn nonvanishing_json(data: &LevelData, tol: f64) -> Result<Json> {
    let nv = nonvanishing_report(data, tol)?;
    Ok(json!({
        "level": nv.level,
        "forms": nv.entries.iter().map(|e| json!({
            "label": e.label,
            "nonzero_pairs": e.nonzero_pairs,
            "double_sum": format_float(e.double_sum),
        })).collect::<Vec<_>>(),
        "double_sum": nv.double_sum.map(|(r, num, den)| json!({
            "value": r.to_string(),
            "numerator_factors": num,
            "denominator_factors": den,
        })),
    }))
}
