//! Euler–Lagrange residual of `F = ∫ E(H, K) dA + p ∫ dV` on the torus,
//!
//! `(∇² + 4H² − 2K) E_H + 2(∇·∇̄ + 2KH) E_K − 4H E + 2p`,
//!
//! reduced to a polynomial in `H`. `E_K` is taken with `H` and `K`
//! independent; `K` is eliminated only afterwards.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_algebra::{
    rat, rat_int, to_f64, HPoly, LinearForm, Rational, RationalMatrix, Unknown,
};
use crate::geometry::{divbar_numeric, lb_numeric, SurfaceGrid, TorusShape};
use crate::h_calculus::ExactTorus;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Coefficient {
    Known(Rational),
    Unknown(Unknown),
}

impl Coefficient {
    pub fn known(&self) -> Option<&Rational> {
        match self {
            Coefficient::Known(c) => Some(c),
            Coefficient::Unknown(_) => None,
        }
    }

    pub fn as_form(&self) -> LinearForm {
        match self {
            Coefficient::Known(c) => LinearForm::constant(c.clone()),
            Coefficient::Unknown(u) => LinearForm::var(u.clone()),
        }
    }
}

impl From<Rational> for Coefficient {
    fn from(c: Rational) -> Self {
        Coefficient::Known(c)
    }
}

impl From<Unknown> for Coefficient {
    fn from(u: Unknown) -> Self {
        Coefficient::Unknown(u)
    }
}

/// `(k, m)` stands for the monomial `H^k K^m`.
pub type Term = (u32, u32);

/// Scaling weight of `H^k K^m`: both curvatures carry inverse length.
pub fn term_weight((k, m): Term) -> u32 {
    k + 2 * m
}

/// Polynomial energy density `E(H, K) = Σ c_{k,m} H^k K^m` plus the pressure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lagrangian {
    terms: BTreeMap<Term, Coefficient>,
    pressure: Coefficient,
}

impl Lagrangian {
    pub fn new(pressure: impl Into<Coefficient>) -> Self {
        Self {
            terms: BTreeMap::new(),
            pressure: pressure.into(),
        }
    }

    pub fn with_term(mut self, k: u32, m: u32, c: impl Into<Coefficient>) -> Self {
        self.terms.insert((k, m), c.into());
        self
    }

    /// `E_n = Σ_{k=0}^{n} a_{n+1−k} H^k` with unknown pressure `p`.
    pub fn pure_h(n: u32) -> Self {
        (0..=n).fold(Self::new(Unknown::pressure()), |l, k| {
            l.with_term(k, 0, Unknown::coeff((n + 1 - k) as usize))
        })
    }

    /// `E_n` plus one unknown per `K`-term, named `a_{n+2}, a_{n+3}, …` in the
    /// order given.
    pub fn with_gauss_terms(n: u32, terms: &[Term]) -> Result<Self> {
        let mut l = Self::pure_h(n);
        for (i, &(k, m)) in terms.iter().enumerate() {
            if m == 0 {
                return Err(Error::BadInput(format!("term H^{k} K^{m} has no K factor")));
            }
            if l.terms.contains_key(&(k, m)) {
                return Err(Error::BadInput(format!("duplicate term H^{k} K^{m}")));
            }
            l = l.with_term(k, m, Unknown::coeff(n as usize + 2 + i));
        }
        Ok(l)
    }

    /// Quadratic bending energy `½ k_c (2H + c₀)² + w` with pressure `p`.
    pub fn helfrich(h: &HelfrichParams) -> Self {
        let half = rat(1, 2);
        Self::new(h.p.clone())
            .with_term(2, 0, rat_int(2) * &h.k_c)
            .with_term(1, 0, rat_int(2) * &h.k_c * &h.c0)
            .with_term(0, 0, half * &h.k_c * &h.c0 * &h.c0 + &h.w)
    }

    pub fn terms(&self) -> &BTreeMap<Term, Coefficient> {
        &self.terms
    }

    pub fn pressure(&self) -> &Coefficient {
        &self.pressure
    }

    /// Unknowns in column order: coefficients by index, then anything else by
    /// name, with `p` last.
    pub fn unknowns(&self) -> Vec<Unknown> {
        let mut out: Vec<Unknown> = self
            .terms
            .values()
            .chain(std::iter::once(&self.pressure))
            .filter_map(|c| match c {
                Coefficient::Unknown(u) => Some(u.clone()),
                Coefficient::Known(_) => None,
            })
            .collect();
        out.sort_by_key(unknown_sort_key);
        out.dedup();
        out
    }

    pub fn is_known(&self) -> bool {
        self.unknowns().is_empty()
    }

    /// True when no term with a `K` factor has a nonzero coefficient.
    pub fn is_h_only(&self) -> bool {
        self.terms
            .iter()
            .filter(|((_, m), _)| *m > 0)
            .all(|(_, c)| c.known().is_some_and(Zero::is_zero))
    }

    /// Replaces unknowns that appear in `values` by their values.
    pub fn substitute(&self, values: &BTreeMap<Unknown, Rational>) -> Self {
        let sub = |c: &Coefficient| match c {
            Coefficient::Unknown(u) => match values.get(u) {
                Some(v) => Coefficient::Known(v.clone()),
                None => c.clone(),
            },
            known => known.clone(),
        };
        Self {
            terms: self.terms.iter().map(|(t, c)| (*t, sub(c))).collect(),
            pressure: sub(&self.pressure),
        }
    }

    fn known_terms(&self) -> Result<Vec<(Term, Rational)>> {
        self.terms
            .iter()
            .map(|(t, c)| {
                c.known()
                    .map(|v| (*t, v.clone()))
                    .ok_or_else(|| unresolved(c))
            })
            .collect()
    }

    pub fn known_pressure(&self) -> Result<Rational> {
        self.pressure
            .known()
            .cloned()
            .ok_or_else(|| unresolved(&self.pressure))
    }

    /// `(E, E_H, E_K)` at a point, for a fully known Lagrangian.
    pub fn partials(&self, h: f64, k: f64) -> Result<(f64, f64, f64)> {
        let mut out = (0.0, 0.0, 0.0);
        for ((i, j), c) in self.known_terms()? {
            let c = to_f64(&c);
            out.0 += c * h.powi(i as i32) * k.powi(j as i32);
            if i > 0 {
                out.1 += c * i as f64 * h.powi(i as i32 - 1) * k.powi(j as i32);
            }
            if j > 0 {
                out.2 += c * j as f64 * h.powi(i as i32) * k.powi(j as i32 - 1);
            }
        }
        Ok(out)
    }
}

fn unresolved(c: &Coefficient) -> Error {
    match c {
        Coefficient::Unknown(u) => Error::Domain(format!("coefficient {u} has no value")),
        Coefficient::Known(_) => unreachable!(),
    }
}

pub(crate) fn unknown_sort_key(u: &Unknown) -> (u8, usize, String) {
    let s = u.as_str();
    if s == "p" {
        return (2, 0, String::new());
    }
    match s.strip_prefix('a').and_then(|i| i.parse::<usize>().ok()) {
        Some(i) => (0, i, String::new()),
        None => (1, 0, s.to_string()),
    }
}

impl fmt::Display for Lagrangian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (&(k, m), c) in self.terms.iter().rev() {
            let coeff = match c {
                Coefficient::Known(v) => format!("({v})"),
                Coefficient::Unknown(u) => u.to_string(),
            };
            let mut mono = String::new();
            if k > 0 {
                mono.push_str(&if k == 1 {
                    " H".into()
                } else {
                    format!(" H^{k}")
                });
            }
            if m > 0 {
                mono.push_str(&if m == 1 {
                    " K".into()
                } else {
                    format!(" K^{m}")
                });
            }
            parts.push(format!("{coeff}{mono}"));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Parameters of the quadratic membrane energy `½ k_c (2H + c₀)² + w`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HelfrichParams {
    pub k_c: Rational,
    pub c0: Rational,
    pub w: Rational,
    pub p: Rational,
}

impl HelfrichParams {
    /// `p − 2wH + k_c (2H + c₀)(2H² − c₀H − 2K)`, the membrane shape equation
    /// with the derivative term dropped, at given constant curvatures.
    pub fn constant_curvature_relation(&self, h: &Rational, k: &Rational) -> Rational {
        let two = rat_int(2);
        &self.p - &two * &self.w * h
            + &self.k_c * (&two * h + &self.c0) * (&two * h * h - &self.c0 * h - &two * k)
    }
}

/// Residual polynomial contributed by the monomial `H^k K^m` with unit
/// coefficient.
pub fn monomial_residual(t: &ExactTorus, (k, m): Term) -> HPoly {
    let kpoly = t.k_as_hpoly();
    let h = HPoly::var();
    let hk = |e: u32| HPoly::var().pow(e);
    let e = &hk(k) * &kpoly.pow(m);
    let mut out = HPoly::zero();
    if k > 0 {
        let eh = (&hk(k - 1) * &kpoly.pow(m)).scale(&rat_int(k as i64));
        let pot = &(&h * &h).scale(&rat_int(4)) - &kpoly.scale(&rat_int(2));
        out = &out + &t.lb_poly(&eh);
        out = &out + &(&pot * &eh);
    }
    if m > 0 {
        let ek = (&hk(k) * &kpoly.pow(m - 1)).scale(&rat_int(m as i64));
        out = &out + &t.divbar_poly(&ek).scale(&rat_int(2));
        out = &out + &(&(&kpoly * &h) * &ek).scale(&rat_int(4));
    }
    &out - &(&h * &e).scale(&rat_int(4))
}

/// Residual of a fully known Lagrangian; zero iff the torus is critical.
pub fn el_residual(t: &ExactTorus, l: &Lagrangian) -> Result<HPoly> {
    let mut out = HPoly::constant(rat_int(2) * l.known_pressure()?);
    for (term, c) in l.known_terms()? {
        if !c.is_zero() {
            out = &out + &monomial_residual(t, term).scale(&c);
        }
    }
    Ok(out)
}

/// One linear condition per power of `H`; row `j` is the coefficient of
/// `H^j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidualSystem {
    pub unknowns: Vec<Unknown>,
    pub rows: Vec<LinearForm>,
}

impl ResidualSystem {
    /// Row values after assigning every unknown.
    pub fn evaluate(&self, values: &BTreeMap<Unknown, Rational>) -> Result<Vec<Rational>> {
        self.rows.iter().map(|r| r.eval(values)).collect()
    }

    /// Rows with unknowns replaced by linear forms in other unknowns.
    pub fn substitute(&self, forms: &BTreeMap<Unknown, LinearForm>) -> Vec<LinearForm> {
        self.rows.iter().map(|r| r.substitute(forms)).collect()
    }

    /// Matrix with columns in the given order.
    pub fn matrix(&self, order: &[Unknown]) -> Result<RationalMatrix> {
        RationalMatrix::new(order.to_vec(), self.rows.clone())
    }
}

/// Number of residual rows for a Lagrangian: one more than the highest power
/// of `H` any term can produce.
fn row_count(l: &Lagrangian) -> usize {
    l.terms
        .keys()
        .map(|&t| term_weight(t) as usize + 2)
        .max()
        .unwrap_or(1)
        .max(1)
}

/// Residual rows of a Lagrangian whose coefficients may be unknown.
pub fn el_system(t: &ExactTorus, l: &Lagrangian) -> ResidualSystem {
    let mut rows = vec![LinearForm::zero(); row_count(l)];
    let two = rat_int(2);
    rows[0] = l.pressure.as_form().scale(&two);
    for (&term, c) in &l.terms {
        let form = c.as_form();
        if form.is_zero() {
            continue;
        }
        for (j, v) in monomial_residual(t, term).coeffs().iter().enumerate() {
            if !v.is_zero() {
                rows[j] = rows[j].add(&form.scale(v));
            }
        }
    }
    ResidualSystem {
        unknowns: l.unknowns(),
        rows,
    }
}

/// Residual rows as functions of `σ = r²/a²` at fixed `r`: each row is
/// `base + σ · slope`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatioSystem {
    pub r: Rational,
    pub unknowns: Vec<Unknown>,
    pub base: Vec<LinearForm>,
    pub slope: Vec<LinearForm>,
}

impl RatioSystem {
    pub fn build(l: &Lagrangian, r: &Rational) -> Result<Self> {
        if !r.is_positive() {
            return Err(Error::BadInput(format!("r must be positive, got {r}")));
        }
        let at = |ratio: i64| -> Result<ResidualSystem> {
            Ok(el_system(
                &ExactTorus::from_ratio(&rat_int(ratio), r.clone())?,
                l,
            ))
        };
        let (s2, s4) = (at(2)?, at(4)?);
        // σ = 1/2 and σ = 1/4
        let slope: Vec<LinearForm> = s2
            .rows
            .iter()
            .zip(&s4.rows)
            .map(|(x, y)| x.add(&y.scale(&-Rational::one())).scale(&rat_int(4)))
            .collect();
        let base: Vec<LinearForm> = s2
            .rows
            .iter()
            .zip(&slope)
            .map(|(x, s)| x.add(&s.scale(&rat(-1, 2))))
            .collect();
        let sys = Self {
            r: r.clone(),
            unknowns: s2.unknowns,
            base,
            slope,
        };
        if sys.at_sigma(&rat(1, 3)).rows != at(3)?.rows {
            return Err(Error::Domain(
                "residual rows are not affine in r²/a²".into(),
            ));
        }
        Ok(sys)
    }

    /// Rows at `σ = r²/a²`.
    pub fn at_sigma(&self, sigma: &Rational) -> ResidualSystem {
        ResidualSystem {
            unknowns: self.unknowns.clone(),
            rows: self
                .base
                .iter()
                .zip(&self.slope)
                .map(|(b, s)| b.add(&s.scale(sigma)))
                .collect(),
        }
    }

    pub fn at_ratio(&self, ratio: &Rational) -> ResidualSystem {
        self.at_sigma(&(Rational::one() / ratio))
    }
}

/// Residual at a sphere of radius `R` (`H = 1/R`, `K = 1/R²`), where every
/// derivative term vanishes.
pub fn sphere_residual(radius: &Rational, l: &Lagrangian) -> Result<Rational> {
    if !radius.is_positive() {
        return Err(Error::BadInput(format!(
            "radius must be positive, got {radius}"
        )));
    }
    let h = Rational::one() / radius;
    let k = &h * &h;
    let pw = |x: &Rational, e: u32| num_traits::pow(x.clone(), e as usize);
    let mut out = rat_int(2) * l.known_pressure()?;
    for ((i, j), c) in l.known_terms()? {
        let e = pw(&h, i) * pw(&k, j);
        let eh = if i > 0 {
            rat_int(i as i64) * pw(&h, i - 1) * pw(&k, j)
        } else {
            Rational::zero()
        };
        let ek = if j > 0 {
            rat_int(j as i64) * pw(&h, i) * pw(&k, j - 1)
        } else {
            Rational::zero()
        };
        let four = rat_int(4);
        out +=
            c * ((&four * &h * &h - rat_int(2) * &k) * eh + &four * &k * &h * ek - four * &h * e);
    }
    Ok(out)
}

/// Residual evaluated from grid operators alone, with the magnitude of its
/// largest individual term for relative comparisons.
#[derive(Clone, Debug)]
pub struct NumericResidual {
    pub values: SurfaceGrid,
    pub scale: f64,
}

impl NumericResidual {
    pub fn max_abs(&self) -> f64 {
        self.values.max_abs()
    }

    /// `max |R| / scale`.
    pub fn max_relative(&self) -> f64 {
        if self.scale == 0.0 {
            self.max_abs()
        } else {
            self.max_abs() / self.scale
        }
    }

    pub fn accuracy_warning(&self) -> bool {
        self.values.accuracy_warning()
    }
}

/// Evaluates the residual on an `n`-point grid without any closed forms.
pub fn numeric_residual(t: &TorusShape, l: &Lagrangian, n: usize) -> Result<NumericResidual> {
    let p = to_f64(&l.known_pressure()?);
    l.known_terms()?;
    let part = |sel: fn((f64, f64, f64)) -> f64| {
        t.sample_curvature_field(n, |h, k| sel(l.partials(h, k).expect("known")))
    };
    let e = part(|x| x.0)?;
    let eh = part(|x| x.1)?;
    let ek = part(|x| x.2)?;
    let h = t.sample_curvature_field(n, |h, _| h)?;
    let k = t.sample_curvature_field(n, |_, k| k)?;
    let lb = lb_numeric(t, &eh);
    let db = divbar_numeric(t, &ek);
    let mut values = Vec::with_capacity(n);
    let mut scale: f64 = 0.0;
    for j in 0..n {
        let (hv, kv) = (h.values()[j], k.values()[j]);
        let terms = [
            lb.values()[j],
            (4.0 * hv * hv - 2.0 * kv) * eh.values()[j],
            2.0 * db.values()[j],
            4.0 * kv * hv * ek.values()[j],
            -4.0 * hv * e.values()[j],
            2.0 * p,
        ];
        values.push(terms.iter().sum());
        scale = scale.max(terms.iter().map(|x| x.abs()).sum());
    }
    let grid =
        SurfaceGrid::from_values(values)?.flagged(lb.accuracy_warning() || db.accuracy_warning());
    Ok(NumericResidual {
        values: grid,
        scale,
    })
}
