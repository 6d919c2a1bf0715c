use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::rational::{format_rational, Rational};
use crate::error::{Error, Result};

/// Name of a linear unknown (`a1`, `a2`, ..., `p`).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Unknown(pub String);

impl Unknown {
    pub fn coeff(i: usize) -> Self {
        Self(format!("a{i}"))
    }

    pub fn pressure() -> Self {
        Self("p".into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Unknown {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// `constant + sum(coefficient * unknown)`. Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearForm {
    terms: BTreeMap<Unknown, Rational>,
    constant: Rational,
}

impl LinearForm {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        Self {
            terms: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn var(u: Unknown) -> Self {
        let mut f = Self::zero();
        f.add_term(u, Rational::one());
        f
    }

    pub fn add_term(&mut self, u: Unknown, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(u.clone()).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&u);
        }
    }

    pub fn add_constant(&mut self, c: &Rational) {
        self.constant += c;
    }

    pub fn coeff(&self, u: &Unknown) -> Rational {
        self.terms.get(u).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> &Rational {
        &self.constant
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Unknown, &Rational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.constant.is_zero()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::constant(&self.constant * c);
        for (u, v) in &self.terms {
            out.add_term(u.clone(), v * c);
        }
        out
    }

    pub fn add(&self, other: &LinearForm) -> Self {
        let mut out = self.clone();
        out.constant += &other.constant;
        for (u, v) in &other.terms {
            out.add_term(u.clone(), v.clone());
        }
        out
    }

    /// Value at a full assignment; missing unknowns are an error.
    pub fn eval(&self, values: &BTreeMap<Unknown, Rational>) -> Result<Rational> {
        let mut acc = self.constant.clone();
        for (u, c) in &self.terms {
            let v = values
                .get(u)
                .ok_or_else(|| Error::BadInput(format!("no value for unknown {u}")))?;
            acc += c * v;
        }
        Ok(acc)
    }

    /// Substitutes each unknown found in `map` by a linear form.
    pub fn substitute(&self, map: &BTreeMap<Unknown, LinearForm>) -> LinearForm {
        let mut out = LinearForm::constant(self.constant.clone());
        for (u, c) in &self.terms {
            match map.get(u) {
                Some(f) => out = out.add(&f.scale(c)),
                None => out.add_term(u.clone(), c.clone()),
            }
        }
        out
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (u, c) in &self.terms {
            parts.push(format!("({})*{}", format_rational(c), u));
        }
        if !self.constant.is_zero() || parts.is_empty() {
            parts.push(format_rational(&self.constant));
        }
        f.write_str(&parts.join(" + "))
    }
}

/// A system of linear equations `row == 0` over a declared column ordering.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    unknowns: Vec<Unknown>,
    rows: Vec<LinearForm>,
}

impl RationalMatrix {
    pub fn new(unknowns: Vec<Unknown>, rows: Vec<LinearForm>) -> Result<Self> {
        for (i, row) in rows.iter().enumerate() {
            for (u, _) in row.terms() {
                if !unknowns.contains(u) {
                    return Err(Error::BadInput(format!(
                        "row {i} references undeclared unknown {u}"
                    )));
                }
            }
        }
        Ok(Self { unknowns, rows })
    }

    /// Builds the matrix from dense rows; the last entry of each row is the
    /// constant term.
    pub fn from_dense(unknowns: Vec<Unknown>, dense: &[Vec<Rational>]) -> Result<Self> {
        let rows = dense
            .iter()
            .map(|r| {
                assert_eq!(r.len(), unknowns.len() + 1, "dense row width");
                let mut f = LinearForm::constant(r[unknowns.len()].clone());
                for (u, c) in unknowns.iter().zip(r) {
                    f.add_term(u.clone(), c.clone());
                }
                f
            })
            .collect();
        Self::new(unknowns, rows)
    }

    pub fn unknowns(&self) -> &[Unknown] {
        &self.unknowns
    }

    pub fn rows(&self) -> &[LinearForm] {
        &self.rows
    }
}

/// The system has no solution. `rows` lists the original equations whose
/// combination reduces to `0 = nonzero`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inconsistent {
    pub rows: Vec<usize>,
}

/// Exact solution set `x = particular + sum_f t_f * direction_f`, one
/// direction per free column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionSpace {
    pub unknowns: Vec<Unknown>,
    pub pivots: Vec<usize>,
    pub free: Vec<usize>,
    pub particular: Vec<Rational>,
    pub directions: Vec<Vec<Rational>>,
}

impl SolutionSpace {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_free(&self, u: &Unknown) -> bool {
        self.free.iter().any(|&c| &self.unknowns[c] == u)
    }

    pub fn free_unknowns(&self) -> Vec<Unknown> {
        self.free
            .iter()
            .map(|&c| self.unknowns[c].clone())
            .collect()
    }

    /// Every unknown written as a linear form in the free unknowns.
    pub fn assignments(&self) -> BTreeMap<Unknown, LinearForm> {
        let mut out = BTreeMap::new();
        for (col, u) in self.unknowns.iter().enumerate() {
            let mut f = LinearForm::constant(self.particular[col].clone());
            for (dir, &fc) in self.directions.iter().zip(&self.free) {
                f.add_term(self.unknowns[fc].clone(), dir[col].clone());
            }
            out.insert(u.clone(), f);
        }
        out
    }

    /// Kernel basis with integer-cleared, gcd-normalized entries and the first
    /// nonzero entry positive.
    pub fn normalized_basis(&self) -> Vec<Vec<BigInt>> {
        self.directions
            .iter()
            .map(|d| normalize_vector(d))
            .collect()
    }
}

fn normalize_vector(v: &[Rational]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let mut ints: Vec<BigInt> = v.iter().map(|x| (x * &lcm).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() {
        for x in &mut ints {
            *x /= &g;
        }
    }
    if ints
        .iter()
        .find(|x| !x.is_zero())
        .is_some_and(|x| x.is_negative())
    {
        for x in &mut ints {
            *x = -&*x;
        }
    }
    ints
}

/// Clears denominators of a rational row, returning the integer row.
fn clear_row(row: &[Rational]) -> Vec<BigInt> {
    let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    row.iter().map(|x| (x * &lcm).to_integer()).collect()
}

/// Fraction-free (Bareiss) reduction to row echelon form over the first
/// `ncols` columns; trailing columns are carried along. Returns pivot
/// columns in row order.
fn bareiss_echelon(m: &mut [Vec<BigInt>], ncols: usize) -> Vec<usize> {
    let nrows = m.len();
    let width = m.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(pr) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pr);
        for i in r + 1..nrows {
            for j in c + 1..width {
                let v = &m[r][c] * &m[i][j] - &m[i][c] * &m[r][j];
                debug_assert!((&v % &prev).is_zero(), "Bareiss division must be exact");
                m[i][j] = v / &prev;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Solves `rows == 0` exactly. Columns follow the declared unknown order;
/// free unknowns are the non-pivot columns of the reduced echelon form.
pub fn solve(m: &RationalMatrix) -> std::result::Result<SolutionSpace, Inconsistent> {
    let n = m.unknowns.len();
    let nrows = m.rows.len();
    // [coefficients | rhs | row-provenance identity]
    let mut work: Vec<Vec<BigInt>> = m
        .rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut dense: Vec<Rational> = m.unknowns.iter().map(|u| row.coeff(u)).collect();
            dense.push(-row.constant_term().clone());
            let mut ints = clear_row(&dense);
            ints.extend((0..nrows).map(|k| BigInt::from(i32::from(k == i))));
            ints
        })
        .collect();
    let pivots = bareiss_echelon(&mut work, n);

    for row in work.iter().skip(pivots.len()) {
        if !row[n].is_zero() {
            let rows = (0..nrows).filter(|&k| !row[n + 1 + k].is_zero()).collect();
            return Err(Inconsistent { rows });
        }
    }

    // Back substitution into reduced echelon form over the rationals.
    let rank = pivots.len();
    let mut rref: Vec<Vec<Rational>> = work[..rank]
        .iter()
        .map(|row| {
            row[..=n]
                .iter()
                .map(|x| Rational::from_integer(x.clone()))
                .collect()
        })
        .collect();
    for (i, &pc) in pivots.iter().enumerate().rev() {
        let lead = rref[i][pc].clone();
        for x in rref[i].iter_mut() {
            *x /= &lead;
        }
        for k in 0..i {
            let f = rref[k][pc].clone();
            if f.is_zero() {
                continue;
            }
            let (head, tail) = rref.split_at_mut(i);
            for (x, y) in head[k].iter_mut().zip(&tail[0]) {
                *x -= &f * y;
            }
        }
    }

    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let mut particular = vec![Rational::zero(); n];
    for (i, &pc) in pivots.iter().enumerate() {
        particular[pc] = rref[i][n].clone();
    }
    let directions = free
        .iter()
        .map(|&fc| {
            let mut d = vec![Rational::zero(); n];
            d[fc] = Rational::one();
            for (i, &pc) in pivots.iter().enumerate() {
                d[pc] = -rref[i][fc].clone();
            }
            d
        })
        .collect();

    Ok(SolutionSpace {
        unknowns: m.unknowns.clone(),
        pivots,
        free,
        particular,
        directions,
    })
}

/// Normalized basis of the directions of the solution set of `rows == 0`
/// (the kernel basis when all constants vanish).
pub fn nullspace(m: &RationalMatrix) -> std::result::Result<Vec<Vec<BigInt>>, Inconsistent> {
    solve(m).map(|s| s.normalized_basis())
}

/// Exact determinant of a square rational matrix.
pub fn determinant(rows: &[Vec<Rational>]) -> Rational {
    let n = rows.len();
    if n == 0 {
        return Rational::one();
    }
    let mut scale = Rational::one();
    let mut ints: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| {
            assert_eq!(r.len(), n, "determinant needs a square matrix");
            let lcm = r.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            scale /= Rational::from_integer(lcm.clone());
            r.iter().map(|x| (x * &lcm).to_integer()).collect()
        })
        .collect();
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for c in 0..n {
        let Some(pr) = (c..n).find(|&i| !ints[i][c].is_zero()) else {
            return Rational::zero();
        };
        if pr != c {
            ints.swap(pr, c);
            sign = -sign;
        }
        for i in c + 1..n {
            for j in c + 1..n {
                let v = &ints[c][c] * &ints[i][j] - &ints[i][c] * &ints[c][j];
                ints[i][j] = v / &prev;
            }
            ints[i][c] = BigInt::zero();
        }
        prev = ints[c][c].clone();
    }
    Rational::from_integer(prev * sign) * scale
}
