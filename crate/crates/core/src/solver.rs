//! Exact solution of the residual systems: radius constraints, coefficient
//! families, degeneracy polynomials and verification.
//!
//! Columns are ordered `[p, a_N, …, a_1]`, so elimination pivots on the
//! highest-index unknowns first and the free parameters come out as the
//! lowest-index ones. A family is admissible when `a_1` stays free; a
//! homogeneous system with `a_1` as a pivot forces `a_1 = 0`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact_algebra::{
    determinant, format_rational, rat, rat_int, solve, HPoly, LinearForm, Rational, RationalMatrix,
    SolutionSpace, Unknown,
};
use crate::geometry::DEFAULT_GRID;
use crate::h_calculus::ExactTorus;
use crate::shape_equation::{
    el_residual, el_system, numeric_residual, term_weight, unknown_sort_key, Lagrangian,
    RatioSystem, ResidualSystem, Term,
};

/// Largest grid the numeric check refines to when the default is too coarse.
const MAX_GRID: usize = 8192;

/// `a²/r² = (n² − n)/(n² − n − 1)`, the only aspect ratio at which the
/// degree-`n` pure-`H` density has a critical torus.
pub fn constraint_ratio(n: u32) -> Result<Rational> {
    if n < 2 {
        return Err(Error::Domain(format!(
            "degree {n} has no radius constraint"
        )));
    }
    let m = i64::from(n) * (i64::from(n) - 1);
    Ok(rat(m, m - 1))
}

/// `K`-terms used when none are given: the worked examples for `n = 3, 4, 5`
/// and `Σ_{m≥1} K^m Σ_{k=1}^{n−2m} H^k` otherwise.
pub fn default_gauss_terms(n: u32) -> Vec<Term> {
    match n {
        3 => vec![(0, 2), (1, 1)],
        4 => vec![(0, 2), (1, 1), (2, 1)],
        5 => vec![(1, 2), (0, 2), (3, 1), (2, 1), (1, 1)],
        _ => (1..=n / 2)
            .flat_map(|m| (1..=n.saturating_sub(2 * m)).map(move |k| (k, m)))
            .collect(),
    }
}

/// Vanishing of the degeneracy polynomial at the solved radii.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Degeneracy {
    /// `Δ(ρ)` with primitive integer coefficients, ascending in `ρ = a²/r²`.
    pub polynomial: HPoly,
    /// `Δ` evaluated homogeneously in `(a², r²)`.
    pub value: Rational,
    /// `ρ₀` when the linear factor `ρ − ρ₀` of `Δ` vanishes at the radii.
    pub vanished_root: Option<Rational>,
}

impl Degeneracy {
    pub fn is_degenerate(&self) -> bool {
        self.vanished_root.is_some()
    }

    /// The vanished factor written as `q a² − p r²` for `ρ₀ = p/q`.
    pub fn vanished_factor(&self) -> Option<String> {
        self.vanished_root.as_ref().map(|rho| {
            let (p, q) = (rho.numer(), rho.denom());
            let a = if q.is_one() {
                "a^2".to_string()
            } else {
                format!("{q} a^2")
            };
            let r = if p.is_one() {
                "r^2".to_string()
            } else {
                format!("{p} r^2")
            };
            format!("{a} - {r}")
        })
    }

    /// `Δ(ρ)` rendered as a polynomial in `ρ`.
    pub fn polynomial_string(&self) -> String {
        render_poly(&self.polynomial, "rho")
    }
}

/// Outcome of a solve: a linear family of coefficient assignments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionReport {
    pub degree: u32,
    pub gauss_terms: Vec<Term>,
    pub r: Rational,
    /// Fixed `a²`, when the radii were given rather than solved for.
    pub a2: Option<Rational>,
    /// `ρ = a²/r²` forced by the residual, if any.
    pub constraint: Option<Rational>,
    pub free_parameters: Vec<Unknown>,
    /// Every unknown as a linear form in the free parameters.
    pub assignments: BTreeMap<Unknown, LinearForm>,
    pub degeneracy: Option<Degeneracy>,
    /// True when `a_1` remains free.
    pub consistent: bool,
    /// Residual rows (powers of `H`) that cannot hold once `a_1 ≠ 0`.
    pub offending_rows: Vec<usize>,
}

impl SolutionReport {
    pub fn lagrangian(&self) -> Lagrangian {
        Lagrangian::with_gauss_terms(self.degree, &self.gauss_terms)
            .expect("terms validated at solve time")
    }

    /// The torus the family lives on: the fixed radii, or the constraint
    /// ratio. Radius-free families have no single torus.
    pub fn torus(&self) -> Option<ExactTorus> {
        if let Some(a2) = &self.a2 {
            return ExactTorus::new(a2.clone(), self.r.clone()).ok();
        }
        self.constraint
            .as_ref()
            .and_then(|rho| ExactTorus::from_ratio(rho, self.r.clone()).ok())
    }

    pub fn assignment(&self, name: &str) -> Option<&LinearForm> {
        self.assignments.get(&Unknown(name.to_string()))
    }

    /// Values of every unknown for the given free-parameter values.
    pub fn specialize(
        &self,
        free_values: &BTreeMap<Unknown, Rational>,
    ) -> Result<BTreeMap<Unknown, Rational>> {
        for f in &self.free_parameters {
            if !free_values.contains_key(f) {
                return Err(Error::BadInput(format!("no value for free parameter {f}")));
            }
        }
        self.assignments
            .iter()
            .map(|(u, form)| Ok((u.clone(), form.eval(free_values)?)))
            .collect()
    }

    /// The known Lagrangian for the given free-parameter values.
    pub fn instantiate(&self, free_values: &BTreeMap<Unknown, Rational>) -> Result<Lagrangian> {
        Ok(self.lagrangian().substitute(&self.specialize(free_values)?))
    }

    /// Free values `a_1 = 1`, `2`, `3`, … in parameter order.
    pub fn sample_free_values(&self) -> BTreeMap<Unknown, Rational> {
        self.free_parameters
            .iter()
            .enumerate()
            .map(|(i, u)| (u.clone(), rat_int(i as i64 + 1)))
            .collect()
    }

    /// Free values with the given `a_1` and zero pressure where the family
    /// allows it: the last free parameter that `p` depends on is solved for
    /// and the others are set to zero.
    pub fn zero_pressure_values(&self, a1: &Rational) -> BTreeMap<Unknown, Rational> {
        let first = Unknown::coeff(1);
        let mut values: BTreeMap<Unknown, Rational> = self
            .free_parameters
            .iter()
            .map(|u| {
                (
                    u.clone(),
                    if *u == first {
                        a1.clone()
                    } else {
                        Rational::zero()
                    },
                )
            })
            .collect();
        let Some(p) = self.assignments.get(&Unknown::pressure()) else {
            return values;
        };
        let pivot = self
            .free_parameters
            .iter()
            .rev()
            .find(|u| **u != first && !p.coeff(u).is_zero());
        if let Some(u) = pivot {
            let rest = p.eval(&values).expect("all free values assigned");
            values.insert(u.clone(), -rest / p.coeff(u));
        }
        values
    }
}

/// Columns `[p, a_N, …, a_1]`.
fn column_order(l: &Lagrangian) -> Vec<Unknown> {
    let mut order = l.unknowns();
    order.reverse();
    order
}

fn space_of(sys: &ResidualSystem, order: &[Unknown]) -> Result<SolutionSpace> {
    let m = sys.matrix(order)?;
    solve(&m).map_err(|e| Error::Inconsistent(format!("residual rows {:?} cannot vanish", e.rows)))
}

/// Rows that block `a_1 = 1`, found by eliminating with `a_1` fixed.
fn blocking_rows(sys: &ResidualSystem, order: &[Unknown]) -> Result<Vec<usize>> {
    let first = Unknown::coeff(1);
    let fix = BTreeMap::from([(first.clone(), LinearForm::constant(Rational::one()))]);
    let rows = sys.substitute(&fix);
    let rest: Vec<Unknown> = order.iter().filter(|u| **u != first).cloned().collect();
    match solve(&RationalMatrix::new(rest, rows)?) {
        Ok(_) => Ok(Vec::new()),
        Err(e) => Ok(e.rows),
    }
}

fn sorted_free(space: &SolutionSpace) -> Vec<Unknown> {
    let mut free = space.free_unknowns();
    free.sort_by_key(unknown_sort_key);
    free
}

struct Family {
    free: Vec<Unknown>,
    assignments: BTreeMap<Unknown, LinearForm>,
    consistent: bool,
    offending_rows: Vec<usize>,
}

fn solve_family(sys: &ResidualSystem, order: &[Unknown]) -> Result<Family> {
    let space = space_of(sys, order)?;
    let consistent = space.is_free(&Unknown::coeff(1));
    let offending_rows = if consistent {
        Vec::new()
    } else {
        blocking_rows(sys, order)?
    };
    Ok(Family {
        free: sorted_free(&space),
        assignments: space.assignments(),
        consistent,
        offending_rows,
    })
}

/// Solves for the radius ratio and coefficients of `E_n` plus the given
/// `K`-terms, with `r` fixed and `a` left open.
///
/// A residual row that involves only `a_1` fixes the ratio. Without such a
/// row the family must hold for every ratio, otherwise the radii have to be
/// supplied through [`solve_with_gauss`].
pub fn solve_constrained(n: u32, r: &Rational, terms: &[Term]) -> Result<SolutionReport> {
    if n < 1 {
        return Err(Error::Domain("degree must be at least 1".into()));
    }
    let l = Lagrangian::with_gauss_terms(n, terms)?;
    let rs = RatioSystem::build(&l, r)?;
    let order = column_order(&l);
    let first = Unknown::coeff(1);
    let only_a1 = |f: &LinearForm| f.terms().all(|(u, _)| *u == first);
    let constraint_row = rs
        .base
        .iter()
        .zip(&rs.slope)
        .rev()
        .find(|(b, s)| only_a1(b) && only_a1(s) && !(b.is_zero() && s.is_zero()));

    let report = |constraint, a2, fam: Family| SolutionReport {
        degree: n,
        gauss_terms: terms.to_vec(),
        r: r.clone(),
        a2,
        constraint,
        free_parameters: fam.free,
        assignments: fam.assignments,
        degeneracy: None,
        consistent: fam.consistent,
        offending_rows: fam.offending_rows,
    };

    if let Some((b, s)) = constraint_row {
        // b + σ s = 0 with σ = r²/a²
        let (alpha, beta) = (b.coeff(&first), s.coeff(&first));
        if beta.is_zero() {
            // a constant nonzero multiple of a_1: a_1 = 0 at every ratio
            let sys = rs.at_sigma(&rat(1, 2));
            return Ok(report(None, None, solve_family(&sys, &order)?));
        }
        let sigma = -alpha / beta;
        if !sigma.is_positive() || sigma >= Rational::one() {
            return Err(Error::Domain(format!(
                "the forced ratio a²/r² = {} does not describe a torus",
                format_rational(&(Rational::one() / &sigma))
            )));
        }
        let rho = Rational::one() / sigma;
        let t = ExactTorus::from_ratio(&rho, r.clone())?;
        let fam = solve_family(&el_system(&t, &l), &order)?;
        return Ok(report(Some(rho), None, fam));
    }

    let generic = rs.at_sigma(&rat(1009, 7919));
    let fam = solve_family(&generic, &order)?;
    let holds_everywhere = rs
        .base
        .iter()
        .chain(&rs.slope)
        .all(|row| row.substitute(&fam.assignments).is_zero());
    if !holds_everywhere {
        return Err(Error::BadInput(
            "this family depends on the radii; give a² explicitly".into(),
        ));
    }
    Ok(report(None, None, fam))
}

/// The degree-`n` pure-`H` family.
pub fn solve_pure_h(n: u32, r: &Rational) -> Result<SolutionReport> {
    solve_constrained(n, r, &[])
}

/// Solves `E_n` plus the given `K`-terms at fixed radii, and reports the
/// degeneracy polynomial of the system at those radii.
pub fn solve_with_gauss(
    n: u32,
    a2: &Rational,
    r: &Rational,
    terms: &[Term],
) -> Result<SolutionReport> {
    if n < 1 {
        return Err(Error::Domain("degree must be at least 1".into()));
    }
    let t = ExactTorus::new(a2.clone(), r.clone())?;
    let l = Lagrangian::with_gauss_terms(n, terms)?;
    let order = column_order(&l);
    let fam = solve_family(&el_system(&t, &l), &order)?;
    let rs = RatioSystem::build(&l, r)?;
    let degeneracy = degeneracy_at(&rs, &order, a2, &t.r2())?;
    Ok(SolutionReport {
        degree: n,
        gauss_terms: terms.to_vec(),
        r: r.clone(),
        a2: Some(a2.clone()),
        constraint: None,
        free_parameters: fam.free,
        assignments: fam.assignments,
        degeneracy: Some(degeneracy),
        consistent: fam.consistent,
        offending_rows: fam.offending_rows,
    })
}

/// Index subsets of size `k` of `0..n`, in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Scales to coprime integer coefficients with a positive leading term.
fn primitive(p: &HPoly) -> HPoly {
    if p.is_zero() {
        return HPoly::zero();
    }
    let lcm = p
        .coeffs()
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = p
        .coeffs()
        .iter()
        .map(|c| (c * Rational::from_integer(lcm.clone())).to_integer())
        .collect();
    let mut g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if ints.last().is_some_and(Signed::is_negative) {
        g = -g;
    }
    HPoly::from_coeffs(
        ints.into_iter()
            .map(|x| Rational::from_integer(x / &g))
            .collect(),
    )
}

/// Degeneracy polynomial `Δ(ρ)`: the gcd of all maximal minors on the
/// generic pivot columns, as a function of `ρ = a²/r²`. The rank of the
/// system drops below its generic value exactly at the roots of `Δ`.
pub fn degeneracy_polynomial(rs: &RatioSystem, order: &[Unknown]) -> Result<HPoly> {
    let mut pivots: Vec<usize> = Vec::new();
    for sigma in [rat(1009, 7919), rat(2003, 9973)] {
        let space = space_of(&rs.at_sigma(&sigma), order)?;
        if space.pivots.len() > pivots.len() {
            pivots = space.pivots;
        }
    }
    let k = pivots.len();
    if k == 0 {
        return Ok(HPoly::one());
    }
    let entry = |row: usize, col: usize, sigma: &Rational| {
        rs.base[row].coeff(&order[col]) + sigma * rs.slope[row].coeff(&order[col])
    };
    let mut g = HPoly::zero();
    for rows in combinations(rs.base.len(), k) {
        let points: Vec<(Rational, Rational)> = (0..=k)
            .map(|i| {
                let s = rat_int(i as i64);
                let m: Vec<Vec<Rational>> = rows
                    .iter()
                    .map(|&r| pivots.iter().map(|&c| entry(r, c, &s)).collect())
                    .collect();
                let d = determinant(&m);
                (s, d)
            })
            .collect();
        let minor = HPoly::interpolate(&points);
        g = g.gcd(&minor);
        if g.degree() == Some(0) {
            break;
        }
    }
    Ok(primitive(&g.reversed()))
}

fn degeneracy_at(
    rs: &RatioSystem,
    order: &[Unknown],
    a2: &Rational,
    r2: &Rational,
) -> Result<Degeneracy> {
    let polynomial = degeneracy_polynomial(rs, order)?;
    let d = polynomial.degree().unwrap_or(0);
    let value = polynomial
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| c * num_traits::pow(a2.clone(), i) * num_traits::pow(r2.clone(), d - i))
        .fold(Rational::zero(), |acc, x| acc + x);
    let rho = a2 / r2;
    let vanished_root = polynomial.eval(&rho).is_zero().then_some(rho);
    Ok(Degeneracy {
        polynomial,
        value,
        vanished_root,
    })
}

/// Exact and grid-based residuals of a specialized family.
#[derive(Clone, Debug)]
pub struct Verification {
    pub exact: bool,
    pub residual: HPoly,
    /// Largest grid residual relative to the largest individual term.
    pub numeric_max_residual: f64,
    pub grid: usize,
    pub accuracy_warning: bool,
}

/// Checks a family on a torus. The grid starts at `grid` and is refined
/// while the spectral tail says it is under-resolved.
pub fn verify_solution(
    t: &ExactTorus,
    report: &SolutionReport,
    free_values: &BTreeMap<Unknown, Rational>,
    grid: usize,
) -> Result<Verification> {
    if !report.consistent {
        return Err(Error::Inconsistent(format!(
            "a1 is forced to zero; offending rows {:?}",
            report.offending_rows
        )));
    }
    let l = report.instantiate(free_values)?;
    let residual = el_residual(t, &l)?;
    let shape = t.shape();
    let mut n = grid;
    let mut num = numeric_residual(&shape, &l, n)?;
    while num.accuracy_warning() && n < MAX_GRID {
        n *= 2;
        num = numeric_residual(&shape, &l, n)?;
    }
    Ok(Verification {
        exact: residual.is_zero(),
        residual,
        numeric_max_residual: num.max_relative(),
        grid: n,
        accuracy_warning: num.accuracy_warning(),
    })
}

/// [`verify_solution`] on the report's own torus with the default grid.
pub fn verify_report(
    report: &SolutionReport,
    free_values: &BTreeMap<Unknown, Rational>,
) -> Result<Verification> {
    let t = report.torus().ok_or_else(|| {
        Error::BadInput("family holds for every ratio; choose a torus to verify on".into())
    })?;
    verify_solution(&t, report, free_values, DEFAULT_GRID)
}

/// Scaling weight of every unknown: `k + 2m` for the coefficient of
/// `H^k K^m`, and `−1` for the pressure. Rescaling lengths by `λ` maps a
/// solution `x_i` to `λ^{−w_i} x_i` up to a common factor.
pub fn unknown_weights(l: &Lagrangian) -> BTreeMap<Unknown, i64> {
    let mut out = BTreeMap::new();
    for (&term, c) in l.terms() {
        if let crate::shape_equation::Coefficient::Unknown(u) = c {
            out.insert(u.clone(), i64::from(term_weight(term)));
        }
    }
    if let crate::shape_equation::Coefficient::Unknown(u) = l.pressure() {
        out.insert(u.clone(), -1);
    }
    out
}

/// Pressure and surface tension for which the quadratic membrane energy
/// with rigidity `k_c` and spontaneous curvature `c₀` has a critical torus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HelfrichTorus {
    pub ratio: Rational,
    pub p: Rational,
    pub w: Rational,
}

pub fn helfrich_torus(k_c: &Rational, c0: &Rational, r: &Rational) -> Result<HelfrichTorus> {
    let family = solve_pure_h(2, r)?;
    let two = rat_int(2);
    let values = BTreeMap::from([
        (Unknown::coeff(1), &two * k_c),
        (Unknown::coeff(2), &two * k_c * c0),
    ]);
    let all = family.specialize(&values)?;
    let a3 = all[&Unknown::coeff(3)].clone();
    let w = a3 - rat(1, 2) * k_c * c0 * c0;
    Ok(HelfrichTorus {
        ratio: family
            .constraint
            .clone()
            .expect("quadratic family is constrained"),
        p: all[&Unknown::pressure()].clone(),
        w,
    })
}

/// Renders a polynomial as `c_d x^d + … + c_0`.
pub fn render_poly(p: &HPoly, var: &str) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, c) in p.coeffs().iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let mag = format_rational(&c.abs());
        let body = match i {
            0 => mag,
            _ => {
                let x = if i == 1 {
                    var.to_string()
                } else {
                    format!("{var}^{i}")
                };
                if c.abs().is_one() {
                    x
                } else {
                    format!("{mag} {x}")
                }
            }
        };
        if out.is_empty() {
            out = if neg { format!("-{body}") } else { body };
        } else {
            out.push_str(if neg { " - " } else { " + " });
            out.push_str(&body);
        }
    }
    out
}
