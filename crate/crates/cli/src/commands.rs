use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use qprod_core::arith::KloostermanTable;
use qprod_core::asymptotics::{check_bound, growth_fit, json_number};
use qprod_core::forms::{self, build, builtin_specs, eta_newform, level_data};
use qprod_core::io::{format_coefficients, format_exponents, read_coefficients, read_exponents};
use qprod_core::prodexp::{extract, vanishing_indices, zero_coefficient_primes};
use qprod_core::{ExponentSeries, FormSpec, QSeries};

use crate::{Command, ExponentInput, Format, Output};

#[derive(Debug)]
pub enum Failure {
    /// Bad arguments, invalid input files or a failed computation; exit 2.
    Usage(String),
    /// A bound check ran and its verdict was fail; exit 1.
    BoundFailed,
}

impl From<qprod_core::Error> for Failure {
    fn from(e: qprod_core::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Result<T> = std::result::Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Failure::Usage(msg.into()))
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Expand { source, terms, output } => {
            let form = FormSource::new(source.spec, source.coeffs);
            expand(&form, terms, &output)
        }
        Command::Exponents { source, terms, output, jobs } => {
            let forms: Vec<FormSource> = source
                .spec
                .into_iter()
                .map(FormSource::Spec)
                .chain(source.coeffs.into_iter().map(FormSource::Coeffs))
                .collect();
            exponents(&forms, terms, &output, jobs)
        }
        Command::Fit { exponents, window, output } => {
            let e = load_exponents(&exponents, window.1)?;
            let fit = growth_fit(&e, window)?;
            let text = match output_format(&output, Format::Json) {
                Format::Json => fit.to_json(),
                Format::Csv => format!(
                    "y_hat,slope,intercept,m0,m1,residual_rms,points_used\n{},{},{},{},{},{},{}\n",
                    json_number(fit.y_hat),
                    json_number(fit.slope),
                    json_number(fit.intercept),
                    fit.window.0,
                    fit.window.1,
                    json_number(fit.residual_rms),
                    fit.points_used
                ),
            };
            emit(&output, &text)
        }
        Command::Check { exponents, kind, window, y_r, slope_tol, output } => {
            let e = load_exponents(&exponents, window.1)?;
            let report = check_bound(&e, kind, y_r, window, slope_tol)?;
            let text = match output_format(&output, Format::Json) {
                Format::Json => report.to_json(),
                Format::Csv => {
                    let mut s = String::from("m,ratio\n");
                    for (m, r) in &report.ratios {
                        writeln!(s, "{m},{}", json_number(*r)).unwrap();
                    }
                    s
                }
            };
            emit(&output, &text)?;
            if report.verdict.passed() {
                Ok(())
            } else {
                Err(Failure::BoundFailed)
            }
        }
        Command::Level { level, output } => {
            let d = level_data(level)?;
            let text = match output_format(&output, Format::Json) {
                Format::Json => serde_json::to_string_pretty(&d).expect("serializes") + "\n",
                Format::Csv => format!(
                    "level,index,nu2,nu3,nu_inf,genus\n{},{},{},{},{},{}\n",
                    d.level, d.index, d.nu2, d.nu3, d.nu_inf, d.genus
                ),
            };
            emit(&output, &text)
        }
        Command::Kloosterman { a, b, c_max, level, output, jobs } => {
            require_csv(&output, "kloosterman")?;
            kloosterman(a, b, c_max, level, &output, jobs)
        }
        Command::Vanishing { level, bound, source, output } => {
            let form = match (source.spec, source.coeffs) {
                (None, None) => None,
                (spec, coeffs) => Some(FormSource::new(spec, coeffs)),
            };
            vanishing(level, bound, form, &output)
        }
        Command::Builtins { dir } => {
            fs::create_dir_all(&dir).map_err(|e| io_failure(&dir, e))?;
            for (name, spec) in builtin_specs() {
                let path = dir.join(format!("{name}.json"));
                fs::write(&path, spec.to_json() + "\n").map_err(|e| io_failure(&path, e))?;
            }
            Ok(())
        }
    }
}

#[derive(Debug, Clone)]
enum FormSource {
    Spec(PathBuf),
    Coeffs(PathBuf),
}

impl FormSource {
    fn new(spec: Option<PathBuf>, coeffs: Option<PathBuf>) -> Self {
        match (spec, coeffs) {
            (Some(p), _) => FormSource::Spec(p),
            (None, Some(p)) => FormSource::Coeffs(p),
            (None, None) => unreachable!("clap requires one source"),
        }
    }

    fn path(&self) -> &Path {
        match self {
            FormSource::Spec(p) | FormSource::Coeffs(p) => p,
        }
    }

    /// The expansion to relative order `m`, and the level when a spec names it.
    fn load(&self, m: usize) -> Result<(QSeries, Option<u64>)> {
        match self {
            FormSource::Spec(p) => {
                let spec = FormSpec::load(p)?;
                Ok((build(&spec, m)?, Some(spec.level)))
            }
            FormSource::Coeffs(p) => Ok((read_coefficients(p, m)?, None)),
        }
    }

    /// The expansion through the absolute exponent `n_max`.
    fn load_through(&self, n_max: usize) -> Result<QSeries> {
        let (probe, _) = self.load(1)?;
        let h = probe
            .integer_lead()
            .ok_or_else(|| Failure::Usage(format!("form has fractional lead {}", probe.lead())))?;
        let m = n_max as i64 - h;
        if m < 1 {
            return usage(format!("--terms {n_max} does not reach past the lead q^{h}"));
        }
        Ok(self.load(m as usize)?.0)
    }

    /// Exponents `c(1..terms-1)`, tagged with the level when known.
    fn exponents(&self, terms: usize) -> Result<ExponentSeries> {
        let (f, level) = self.load(terms)?;
        let h = f
            .integer_lead()
            .ok_or_else(|| Failure::Usage(format!("form has fractional lead {}", f.lead())))?;
        let e = extract(&f, h)?;
        Ok(match level {
            Some(n) => e.with_level(n),
            None => e,
        })
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Usage(format!("{}: {e}", path.display()))
}

fn output_format(output: &Output, default: Format) -> Format {
    output.format.unwrap_or(default)
}

fn require_csv(output: &Output, command: &str) -> Result<()> {
    if output.format == Some(Format::Json) {
        return usage(format!("{command} writes csv only"));
    }
    Ok(())
}

fn emit(output: &Output, text: &str) -> Result<()> {
    match &output.out {
        Some(path) => fs::write(path, text).map_err(|e| io_failure(path, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn expand(form: &FormSource, terms: usize, output: &Output) -> Result<()> {
    require_csv(output, "expand")?;
    if terms == 0 {
        return usage("--terms must be positive");
    }
    let f = form.load_through(terms)?;
    emit(output, &format_coefficients(&f)?)
}

fn exponents(forms: &[FormSource], terms: usize, output: &Output, jobs: usize) -> Result<()> {
    require_csv(output, "exponents")?;
    if terms < 2 {
        return usage("--terms must be at least 2");
    }
    if jobs == 0 {
        return usage("--jobs must be positive");
    }
    if forms.len() == 1 {
        return emit(output, &format_exponents(&forms[0].exponents(terms)?));
    }
    let Some(dir) = &output.out else {
        return usage("several forms need --out naming a directory");
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let tables: Vec<Result<String>> = pool.install(|| {
        forms
            .par_iter()
            .map(|f| f.exponents(terms).map(|e| format_exponents(&e)))
            .collect()
    });
    fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
    for (form, table) in forms.iter().zip(tables) {
        let stem = form
            .path()
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "form".into());
        let path = dir.join(format!("{stem}.exponents.csv"));
        fs::write(&path, table?).map_err(|e| io_failure(&path, e))?;
    }
    Ok(())
}

fn load_exponents(input: &ExponentInput, window_end: usize) -> Result<ExponentSeries> {
    if let Some(path) = &input.exponents {
        if input.terms.is_some() {
            return usage("--terms applies only when computing from --spec or --coeffs");
        }
        let e = read_exponents(path, 0)?;
        return Ok(match input.level {
            Some(n) => e.with_level(n),
            None => e,
        });
    }
    let form = FormSource::new(input.spec.clone(), input.coeffs.clone());
    let terms = input.terms.unwrap_or(window_end + 1);
    if terms <= window_end {
        return usage(format!(
            "--terms {terms} yields exponents only through m = {}, window ends at {window_end}",
            terms.saturating_sub(1)
        ));
    }
    let e = form.exponents(terms)?;
    Ok(match (e.level(), input.level) {
        (None, Some(n)) => e.with_level(n),
        _ => e,
    })
}

fn kloosterman(a: i64, b: i64, c_max: u64, level: u64, output: &Output, jobs: usize) -> Result<()> {
    if level == 0 || jobs == 0 {
        return usage("--level and --jobs must be positive");
    }
    let moduli: Vec<u64> = (level..=c_max).step_by(level as usize).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let sums = pool.install(|| {
        moduli
            .par_iter()
            .map(|&c| KloostermanTable::new(c).map(|t| t.sum(a, b)))
            .collect::<qprod_core::Result<Vec<_>>>()
    })?;
    let mut text = String::from("c,K,weil_bound\n");
    for k in &sums {
        writeln!(text, "{},{},{}", k.c, json_number(k.value.re), json_number(k.weil_bound())).unwrap();
    }
    emit(output, &text)
}

fn vanishing(level: u64, bound: u64, form: Option<FormSource>, output: &Output) -> Result<()> {
    let m = bound.max(2) as usize;
    let f = match form {
        Some(src) => src.load_through(m)?,
        None => match eta_newform(level) {
            Some(spec) => forms::build(&spec, m - 1)?,
            None => {
                return usage(format!(
                    "no built-in eta-quotient newform at level {level}; pass --spec or --coeffs"
                ))
            }
        },
    };
    let primes = zero_coefficient_primes(&f, bound)?;
    let indices = vanishing_indices(&f, bound)?;
    let text = match output_format(output, Format::Csv) {
        Format::Csv => {
            let mut s = String::from("m\n");
            for m in &indices {
                writeln!(s, "{m}").unwrap();
            }
            s
        }
        Format::Json => {
            serde_json::to_string_pretty(&serde_json::json!({
                "level": level,
                "bound": bound,
                "zero_primes": primes,
                "indices": indices,
            }))
            .expect("serializes")
                + "\n"
        }
    };
    emit(output, &text)
}
