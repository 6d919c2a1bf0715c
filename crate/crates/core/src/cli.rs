//! Command-line front end. `main.rs` only forwards to [`run`].

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::energetics::{family_energy, second_variation, Perturbation, TildeOperator};
use crate::error::{Error, Result};
use crate::exact_algebra::{format_rational, parse_rational, rat_int, to_f64, Rational};
use crate::geometry::{TorusShape, DEFAULT_GRID};
use crate::h_calculus::{identity_checks, ExactTorus};
use crate::report::{render_text, CheckJson, EnergyJson, Inputs, Report, ScanRow};
use crate::shape_equation::Term;
use crate::solver::{
    default_gauss_terms, solve_constrained, solve_pure_h, solve_with_gauss, verify_solution,
    SolutionReport,
};

/// Relative tolerance for grid residuals and identity checks.
const NUMERIC_TOLERANCE: f64 = 1e-8;
const IDENTITY_TOLERANCE: f64 = 1e-9;

#[derive(Parser, Debug)]
#[command(
    name = "torus-crit",
    version,
    about = "Critical tori of polynomial curvature energies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve for the radius constraint and coefficient family.
    Solve(Common),
    /// Check a family's residual exactly and on a grid.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Re-verify a JSON report written by `solve`.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Curvature energy of the zero-pressure family with a1 = 1.
    Energy(Common),
    /// Second variation of the zero-pressure family along a perturbation.
    SecondVariation {
        #[command(flatten)]
        common: Common,
        /// Poloidal modes, e.g. `c1:1.0,s2:0.5`.
        #[arg(long, default_value = "c1:1")]
        modes: String,
        /// Toroidal wavenumber of the perturbation.
        #[arg(long, default_value_t = 0)]
        v_mode: u32,
        #[arg(long, value_enum, default_value_t = Tilde::Bar)]
        tilde: Tilde,
    },
    /// Compare every closed-form operator identity with the grid operators.
    Identities(Common),
    /// Energy of the zero-pressure family over a range of ratios.
    Scan {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "1.05")]
        from: f64,
        #[arg(long, default_value = "3")]
        to: f64,
        #[arg(long, default_value_t = 20)]
        steps: usize,
    },
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Polynomial degree n of the density.
    #[arg(long)]
    degree: Option<u32>,
    /// Squared large radius, as p/q.
    #[arg(long)]
    a2: Option<String>,
    /// Small radius, as p/q.
    #[arg(long, default_value = "1")]
    r: String,
    /// Ratio a²/r², as p/q.
    #[arg(long)]
    ratio: Option<String>,
    /// Add K-terms and solve at fixed radii.
    #[arg(long)]
    with_gauss: bool,
    /// K-terms as `k:m` pairs for H^k K^m, e.g. `0:2,1:1,2:1`.
    #[arg(long)]
    terms: Option<String>,
    #[arg(long, default_value_t = DEFAULT_GRID)]
    grid: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the output to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Tilde {
    Bar,
    Metric,
}

impl Common {
    fn degree(&self) -> Result<u32> {
        let n = self
            .degree
            .ok_or_else(|| Error::BadInput("--degree is required".into()))?;
        if n < 1 {
            return Err(Error::BadInput("--degree must be at least 1".into()));
        }
        Ok(n)
    }

    fn r(&self) -> Result<Rational> {
        let r = parse_rational(&self.r)?;
        if r <= rat_int(0) {
            return Err(Error::BadInput(format!(
                "--r must be positive, got {}",
                self.r
            )));
        }
        Ok(r)
    }

    /// `a²` from `--a2`, or from `--ratio` times `r²`.
    fn a2(&self) -> Result<Option<Rational>> {
        if let Some(a2) = &self.a2 {
            return Ok(Some(parse_rational(a2)?));
        }
        if let Some(rho) = &self.ratio {
            let r = self.r()?;
            return Ok(Some(parse_rational(rho)? * &r * &r));
        }
        Ok(None)
    }

    fn exact_torus(&self) -> Result<Option<ExactTorus>> {
        self.a2()?
            .map(|a2| ExactTorus::new(a2, self.r()?))
            .transpose()
    }

    fn terms(&self, n: u32) -> Result<Vec<Term>> {
        match &self.terms {
            Some(s) => parse_terms(s),
            None if self.with_gauss => Ok(default_gauss_terms(n)),
            None => Ok(Vec::new()),
        }
    }

    fn inputs(&self) -> Inputs {
        Inputs {
            degree: self.degree,
            a2: self.a2.clone(),
            r: Some(self.r.clone()),
            ratio: self.ratio.clone(),
            terms: Vec::new(),
            with_gauss: self.with_gauss,
            grid: self.grid,
        }
    }
}

fn parse_terms(s: &str) -> Result<Vec<Term>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            let bad = || Error::BadInput(format!("bad term {t:?}, expected k:m"));
            let (k, m) = t.split_once(':').ok_or_else(bad)?;
            Ok((
                k.trim().parse().map_err(|_| bad())?,
                m.trim().parse().map_err(|_| bad())?,
            ))
        })
        .collect()
}

fn solve_from(common: &Common) -> Result<SolutionReport> {
    let n = common.degree()?;
    let r = common.r()?;
    let terms = common.terms(n)?;
    if common.with_gauss {
        let a2 = common
            .a2()?
            .ok_or_else(|| Error::BadInput("--with-gauss needs --a2 or --ratio".into()))?;
        solve_with_gauss(n, &a2, &r, &terms)
    } else if terms.is_empty() {
        solve_pure_h(n, &r)
    } else {
        solve_constrained(n, &r, &terms)
    }
}

fn solution_inputs(common: &Common, s: &SolutionReport) -> Inputs {
    let mut inputs = common.inputs();
    inputs.terms = s.gauss_terms.iter().map(|&(k, m)| [k, m]).collect();
    if let Some(a2) = &s.a2 {
        inputs.a2 = Some(format_rational(a2));
    }
    inputs
}

/// Residual check on the family's own torus; radius-free families are
/// checked on `a² = 3r²`.
fn self_check(s: &SolutionReport, grid: usize) -> Result<Option<crate::solver::Verification>> {
    if !s.consistent {
        return Ok(None);
    }
    let t = match s.torus() {
        Some(t) => t,
        None => ExactTorus::from_ratio(&rat_int(3), s.r.clone())?,
    };
    verify_solution(&t, s, &s.sample_free_values(), grid).map(Some)
}

fn cmd_solve(common: &Common) -> Result<(Report, i32)> {
    let s = solve_from(common)?;
    let mut rep = Report::new("solve", solution_inputs(common, &s)).with_solution(&s);
    if let Some(v) = self_check(&s, common.grid)? {
        rep = rep.with_verification(&v);
    }
    let code = if s.consistent { 0 } else { 2 };
    Ok((rep, code))
}

fn cmd_verify(common: &Common, report: Option<&PathBuf>) -> Result<(Report, i32)> {
    let (s, inputs) = match report {
        Some(path) => {
            let persisted = Report::from_json(&std::fs::read_to_string(path)?)?;
            (persisted.to_solution()?, persisted.inputs)
        }
        None => {
            let s = solve_from(common)?;
            let inputs = solution_inputs(common, &s);
            (s, inputs)
        }
    };
    let mut rep = Report::new("verify", inputs).with_solution(&s);
    if !s.consistent {
        return Ok((rep, 2));
    }
    // an explicit ratio overrides the family's own torus
    let t = match (report, common.with_gauss, common.exact_torus()?) {
        (None, false, Some(t)) => t,
        _ => s
            .torus()
            .map_or_else(|| ExactTorus::from_ratio(&rat_int(3), s.r.clone()), Ok)?,
    };
    let v = verify_solution(&t, &s, &s.sample_free_values(), common.grid)?;
    rep = rep.with_verification(&v);
    let ok = v.exact && v.numeric_max_residual < NUMERIC_TOLERANCE;
    Ok((rep, if ok { 0 } else { 3 }))
}

/// Shape for energy-type commands: the given ratio, else the degree's
/// critical ratio.
fn energy_shape(common: &Common, n: u32) -> Result<TorusShape> {
    let r = common.r()?;
    let a2 = match common.a2()? {
        Some(a2) => a2,
        None => {
            let s = solve_pure_h(n, &r)?;
            let rho = s.constraint.ok_or_else(|| {
                Error::BadInput("degree 1 has no critical ratio; give --ratio or --a2".into())
            })?;
            rho * &r * &r
        }
    };
    TorusShape::from_exact(&a2, &(&r * &r))
}

fn cmd_energy(common: &Common) -> Result<(Report, i32)> {
    let n = common.degree()?;
    let t = energy_shape(common, n)?;
    let e = family_energy(n, &t, common.grid)?;
    let mut rep = Report::new("energy", common.inputs());
    rep.energy = Some(EnergyJson {
        area_term: crate::report::round_sig(e.area_term),
        pressure_term: crate::report::round_sig(e.pressure_term),
        total: crate::report::round_sig(e.total),
    });
    Ok((rep, 0))
}

fn cmd_second_variation(
    common: &Common,
    modes: &str,
    v_mode: u32,
    tilde: Tilde,
) -> Result<(Report, i32)> {
    let n = common.degree()?;
    let t = energy_shape(common, n)?;
    let family = solve_pure_h(n, &Rational::from_float(t.r()).expect("finite"))?;
    let l = family.instantiate(&family.zero_pressure_values(&rat_int(1)))?;
    let omega = Perturbation::parse(modes, v_mode)?;
    let tilde = match tilde {
        Tilde::Bar => TildeOperator::Bar,
        Tilde::Metric => TildeOperator::Metric,
    };
    let value = second_variation(&t, &l, &omega, tilde, common.grid)?;
    let mut rep = Report::new("second-variation", common.inputs());
    rep.second_variation = Some(crate::report::round_sig(value));
    Ok((rep, 0))
}

fn cmd_identities(common: &Common) -> Result<(Report, i32)> {
    let t = common
        .exact_torus()?
        .ok_or_else(|| Error::BadInput("identities needs --a2 or --ratio".into()))?;
    let checks = identity_checks(&t, common.grid)?;
    let mut rep = Report::new("identities", common.inputs());
    rep.checks = checks
        .into_iter()
        .map(|c| CheckJson {
            pass: c.max_error < IDENTITY_TOLERANCE,
            max_error: crate::report::round_sig(c.max_error),
            name: c.name,
        })
        .collect();
    let ok = rep.checks.iter().all(|c| c.pass);
    Ok((rep, if ok { 0 } else { 3 }))
}

fn cmd_scan(common: &Common, from: f64, to: f64, steps: usize) -> Result<(Report, i32)> {
    let n = common.degree.unwrap_or(2);
    if !(from > 1.0 && to >= from && steps >= 1) {
        return Err(Error::BadInput(
            "scan needs 1 < --from <= --to and --steps >= 1".into(),
        ));
    }
    let r = to_f64(&common.r()?);
    let mut rep = Report::new("scan", common.inputs());
    for i in 0..=steps {
        let rho = from + (to - from) * i as f64 / steps as f64;
        let t = TorusShape::new(rho.sqrt() * r, r)?;
        let e = family_energy(n, &t, common.grid)?;
        rep.scan.push(ScanRow {
            ratio: crate::report::round_sig(rho),
            energy: crate::report::round_sig(e.total),
        });
    }
    Ok((rep, 0))
}

fn emit(rep: &Report, common: &Common) -> Result<()> {
    let body = match common.format {
        Format::Json => rep.to_json()?,
        Format::Text => render_text(rep),
    };
    match &common.out {
        Some(path) => std::fs::write(path, body)?,
        None => print!("{body}"),
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<i32> {
    let (rep, code, common) = match &cli.command {
        Command::Solve(c) => {
            let (r, code) = cmd_solve(c)?;
            (r, code, c)
        }
        Command::Verify { common, report } => {
            let (r, code) = cmd_verify(common, report.as_ref())?;
            (r, code, common)
        }
        Command::Energy(c) => {
            let (r, code) = cmd_energy(c)?;
            (r, code, c)
        }
        Command::SecondVariation {
            common,
            modes,
            v_mode,
            tilde,
        } => {
            let (r, code) = cmd_second_variation(common, modes, *v_mode, *tilde)?;
            (r, code, common)
        }
        Command::Identities(c) => {
            let (r, code) = cmd_identities(c)?;
            (r, code, c)
        }
        Command::Scan {
            common,
            from,
            to,
            steps,
        } => {
            let (r, code) = cmd_scan(common, *from, *to, *steps)?;
            (r, code, common)
        }
    };
    emit(&rep, common)?;
    Ok(code)
}

/// Parses arguments, runs one command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 4 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
