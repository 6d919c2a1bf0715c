//! Machine-readable run reports and their text rendering.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_algebra::{format_rational, parse_rational, HPoly, LinearForm, Rational, Unknown};
use crate::shape_equation::unknown_sort_key;
use crate::solver::{Degeneracy, SolutionReport, Verification};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Key used for the constant part of a coefficient form.
pub const CONSTANT_KEY: &str = "1";

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Inputs {
    pub degree: Option<u32>,
    pub a2: Option<String>,
    pub r: Option<String>,
    pub ratio: Option<String>,
    #[serde(default)]
    pub terms: Vec<[u32; 2]>,
    #[serde(default)]
    pub with_gauss: bool,
    pub grid: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyJson {
    /// `Δ(ρ)`, highest power first.
    pub polynomial: String,
    /// Integer coefficients of `Δ(ρ)`, ascending.
    pub coefficients: Vec<String>,
    pub value: String,
    pub degenerate: bool,
    pub vanished_factor: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyJson {
    pub area_term: f64,
    pub pressure_term: f64,
    pub total: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualsJson {
    pub exact: bool,
    pub numeric_max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckJson {
    pub name: String,
    pub max_error: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub ratio: f64,
    pub energy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub inputs: Inputs,
    pub constraint: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub consistent: Option<bool>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub free_parameters: Vec<String>,
    #[serde(default)]
    pub coefficients: BTreeMap<String, BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub offending_rows: Vec<usize>,
    pub degeneracy: Option<DegeneracyJson>,
    pub energy: Option<EnergyJson>,
    pub residuals: Option<ResidualsJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second_variation: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub scan: Vec<ScanRow>,
    pub version: String,
}

impl Report {
    pub fn new(command: &str, inputs: Inputs) -> Self {
        Self {
            command: command.to_string(),
            inputs,
            constraint: None,
            consistent: None,
            free_parameters: Vec::new(),
            coefficients: BTreeMap::new(),
            offending_rows: Vec::new(),
            degeneracy: None,
            energy: None,
            residuals: None,
            second_variation: None,
            checks: Vec::new(),
            scan: Vec::new(),
            version: VERSION.to_string(),
        }
    }

    pub fn with_solution(mut self, s: &SolutionReport) -> Self {
        self.constraint = s.constraint.as_ref().map(format_rational);
        self.consistent = Some(s.consistent);
        self.free_parameters = s.free_parameters.iter().map(|u| u.to_string()).collect();
        self.coefficients = s
            .assignments
            .iter()
            .map(|(u, f)| (u.to_string(), form_to_map(f)))
            .collect();
        self.offending_rows = s.offending_rows.clone();
        self.degeneracy = s.degeneracy.as_ref().map(degeneracy_json);
        self
    }

    pub fn with_verification(mut self, v: &Verification) -> Self {
        self.residuals = Some(ResidualsJson {
            exact: v.exact,
            numeric_max: round_sig(v.numeric_max_residual),
        });
        self
    }

    /// Rebuilds the solution family from a persisted `solve` report.
    pub fn to_solution(&self) -> Result<SolutionReport> {
        let degree = self
            .inputs
            .degree
            .ok_or_else(|| Error::BadInput("report has no degree".into()))?;
        let r = parse_rational(self.inputs.r.as_deref().unwrap_or("1"))?;
        let a2 = if self.inputs.with_gauss {
            Some(parse_rational(self.inputs.a2.as_deref().ok_or_else(
                || Error::BadInput("report with fixed radii has no a2".into()),
            )?)?)
        } else {
            None
        };
        let mut assignments = BTreeMap::new();
        for (name, map) in &self.coefficients {
            assignments.insert(Unknown(name.clone()), map_to_form(map)?);
        }
        let degeneracy = match &self.degeneracy {
            None => None,
            Some(d) => Some(Degeneracy {
                polynomial: HPoly::from_coeffs(
                    d.coefficients
                        .iter()
                        .map(|c| parse_rational(c))
                        .collect::<Result<_>>()?,
                ),
                value: parse_rational(&d.value)?,
                vanished_root: None,
            }),
        };
        let mut free: Vec<Unknown> = self
            .free_parameters
            .iter()
            .map(|s| Unknown(s.clone()))
            .collect();
        free.sort_by_key(unknown_sort_key);
        Ok(SolutionReport {
            degree,
            gauss_terms: self.inputs.terms.iter().map(|t| (t[0], t[1])).collect(),
            r,
            a2,
            constraint: self.constraint.as_deref().map(parse_rational).transpose()?,
            free_parameters: free,
            assignments,
            degeneracy,
            consistent: self.consistent.unwrap_or(true),
            offending_rows: self.offending_rows.clone(),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

fn degeneracy_json(d: &Degeneracy) -> DegeneracyJson {
    DegeneracyJson {
        polynomial: d.polynomial_string(),
        coefficients: d.polynomial.coeffs().iter().map(format_rational).collect(),
        value: format_rational(&d.value),
        degenerate: d.is_degenerate(),
        vanished_factor: d.vanished_factor(),
    }
}

fn form_to_map(f: &LinearForm) -> BTreeMap<String, String> {
    let mut out: BTreeMap<String, String> = f
        .terms()
        .map(|(u, c)| (u.to_string(), format_rational(c)))
        .collect();
    if !f.constant_term().is_zero() {
        out.insert(CONSTANT_KEY.into(), format_rational(f.constant_term()));
    }
    out
}

fn map_to_form(map: &BTreeMap<String, String>) -> Result<LinearForm> {
    let mut f = LinearForm::zero();
    for (k, v) in map {
        let c = parse_rational(v)?;
        if k == CONSTANT_KEY {
            f.add_constant(&c);
        } else {
            f.add_term(Unknown(k.clone()), c);
        }
    }
    Ok(f)
}

/// Rounds to 15 significant digits so reports are byte-stable.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

/// `%.15g`-style rendering.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..15).contains(&exp) {
        let decimals = (14 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let s = format!("{x:.14e}");
        let (mant, e) = s.split_once('e').unwrap_or((&s, "0"));
        let mant = if mant.contains('.') {
            mant.trim_end_matches('0').trim_end_matches('.')
        } else {
            mant
        };
        format!("{mant}e{e}")
    }
}

/// Renders a linear form as `23 a1 - a4 + 1/2`.
pub fn render_form(f: &LinearForm) -> String {
    let mut terms: Vec<(&Unknown, &Rational)> = f.terms().collect();
    terms.sort_by_key(|(u, _)| unknown_sort_key(u));
    let mut out = String::new();
    let mut push = |neg: bool, body: String| {
        if out.is_empty() {
            out = if neg { format!("-{body}") } else { body };
        } else {
            out.push_str(if neg { " - " } else { " + " });
            out.push_str(&body);
        }
    };
    for (u, c) in terms {
        let mag = c.abs();
        let body = if mag.is_one() {
            u.to_string()
        } else {
            format!("{} {u}", format_rational(&mag))
        };
        push(c.is_negative(), body);
    }
    let k = f.constant_term();
    if !k.is_zero() {
        push(k.is_negative(), format_rational(&k.abs()));
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Plain-text rendering of a report.
pub fn render_text(rep: &Report) -> String {
    let mut out = String::new();
    let mut line = |s: String| {
        out.push_str(&s);
        out.push('\n');
    };
    line(format!("command: {}", rep.command));
    if let Some(n) = rep.inputs.degree {
        line(format!("degree: {n}"));
    }
    if let Some(c) = &rep.constraint {
        line(format!("constraint: a^2/r^2 = {c}"));
    } else if rep.consistent.is_some() && !rep.inputs.with_gauss {
        line("constraint: none".into());
    }
    if let Some(ok) = rep.consistent {
        line(format!("consistent: {ok}"));
    }
    if !rep.free_parameters.is_empty() {
        line(format!(
            "free parameters: {}",
            rep.free_parameters.join(", ")
        ));
    }
    let mut names: Vec<&String> = rep.coefficients.keys().collect();
    names.sort_by_key(|n| unknown_sort_key(&Unknown((*n).clone())));
    for name in names {
        if rep.free_parameters.contains(name) {
            continue;
        }
        if let Ok(f) = map_to_form(&rep.coefficients[name]) {
            line(format!("  {name} = {}", render_form(&f)));
        }
    }
    if !rep.offending_rows.is_empty() {
        let rows: Vec<String> = rep
            .offending_rows
            .iter()
            .map(|r| format!("H^{r}"))
            .collect();
        line(format!("offending rows: {}", rows.join(", ")));
    }
    if let Some(d) = &rep.degeneracy {
        line(format!("degeneracy polynomial: {}", d.polynomial));
        line(format!("degeneracy value: {}", d.value));
        match &d.vanished_factor {
            Some(f) => line(format!("degenerate: yes, factor {f} vanishes")),
            None => line("degenerate: no".into()),
        }
    }
    if let Some(e) = &rep.energy {
        line(format!("area term: {}", fmt_sig(e.area_term)));
        line(format!("pressure term: {}", fmt_sig(e.pressure_term)));
        line(format!("energy: {}", fmt_sig(e.total)));
    }
    if let Some(v) = rep.second_variation {
        line(format!("second variation: {}", fmt_sig(v)));
    }
    if let Some(r) = &rep.residuals {
        line(format!("exact residual zero: {}", r.exact));
        line(format!("numeric residual: {}", fmt_sig(r.numeric_max)));
    }
    if !rep.checks.is_empty() {
        let width = rep.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &rep.checks {
            line(format!(
                "  {:width$}  {:>22}  {}",
                c.name,
                fmt_sig(c.max_error),
                if c.pass { "ok" } else { "FAIL" }
            ));
        }
    }
    if !rep.scan.is_empty() {
        line(format!("{:>22}  {:>22}", "ratio", "energy"));
        for row in &rep.scan {
            line(format!(
                "{:>22}  {:>22}",
                fmt_sig(row.ratio),
                fmt_sig(row.energy)
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_algebra::rat_int;
    use crate::solver::solve_pure_h;

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(19.739208802178716), "19.7392088021787");
        assert_eq!(fmt_sig(1e-20), "1e-20");
        assert_eq!(fmt_sig(2.0), "2");
        assert_eq!(round_sig(0.1 + 0.2), 0.3);
    }

    #[test]
    fn forms_render_in_index_order() {
        let mut f = LinearForm::constant(Rational::new(1.into(), 2.into()));
        f.add_term(Unknown::coeff(10), rat_int(-1));
        f.add_term(Unknown::coeff(2), rat_int(3));
        assert_eq!(render_form(&f), "3 a2 - a10 + 1/2");
    }

    #[test]
    fn solution_round_trips_through_json() {
        let s = solve_pure_h(4, &rat_int(1)).unwrap();
        let rep = Report::new(
            "solve",
            Inputs {
                degree: Some(4),
                r: Some("1".into()),
                grid: 256,
                ..Inputs::default()
            },
        )
        .with_solution(&s);
        let back = Report::from_json(&rep.to_json().unwrap()).unwrap();
        assert_eq!(back, rep);
        assert_eq!(back.to_solution().unwrap(), s);
    }
}
