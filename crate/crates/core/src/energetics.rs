//! Energies of critical tori, reduced-volume diagnostics and the second
//! variation for densities that depend on `H` only.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_algebra::{rat_int, to_f64, HPoly, Rational};
use crate::geometry::{
    divbar_numeric, lb_numeric, nodes, ratio_from_reduced_volume, SurfaceGrid, TorusShape,
    DEFAULT_GRID,
};
use crate::shape_equation::{Coefficient, Lagrangian};
use crate::solver::solve_pure_h;
use crate::spectral;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    /// `∫ E dA`.
    pub area_term: f64,
    /// `p V`.
    pub pressure_term: f64,
    pub total: f64,
    pub grid: usize,
    /// Change of the area term against the half-size grid.
    pub quadrature_error: f64,
}

fn area_integral(t: &TorusShape, l: &Lagrangian, n: usize) -> Result<f64> {
    l.partials(0.0, 0.0)?;
    let e = t.sample_curvature_field(n, |h, k| l.partials(h, k).expect("known").0)?;
    Ok(t.integrate(&e))
}

/// `F = ∫ E dA + p V` by periodic trapezoid quadrature on `n` nodes.
pub fn curvature_energy(t: &TorusShape, l: &Lagrangian, n: usize) -> Result<EnergyReport> {
    let p = to_f64(&l.known_pressure()?);
    let area_term = area_integral(t, l, n)?;
    let coarse = if n >= 32 {
        area_integral(t, l, n / 2)?
    } else {
        area_term
    };
    let pressure_term = p * t.area_volume().volume;
    Ok(EnergyReport {
        area_term,
        pressure_term,
        total: area_term + pressure_term,
        grid: n,
        quadrature_error: (area_term - coarse).abs(),
    })
}

/// Energy of the zero-pressure degree-`n` family with `a_1 = 1`, taken from
/// its critical ratio and evaluated on the torus `(a, r)`.
pub fn family_energy(degree: u32, t: &TorusShape, n: usize) -> Result<EnergyReport> {
    let r = Rational::from_float(t.r())
        .ok_or_else(|| Error::BadInput(format!("r = {} is not finite", t.r())))?;
    let family = solve_pure_h(degree, &r)?;
    let values = family.zero_pressure_values(&rat_int(1));
    curvature_energy(t, &family.instantiate(&values)?, n)
}

/// Willmore energy `∫ H² dA` of each shape.
pub fn willmore_scan(samples: &[TorusShape]) -> Result<Vec<(TorusShape, f64)>> {
    let l = Lagrangian::new(rat_int(0)).with_term(2, 0, rat_int(1));
    samples
        .iter()
        .map(|t| Ok((t.clone(), curvature_energy(t, &l, DEFAULT_GRID)?.total)))
        .collect()
}

/// Interpretation of the tilde operator in the second variation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum TildeOperator {
    /// `∇̃ = ∇̄`, built from `K h^{ij}`.
    #[default]
    Bar,
    /// `∇̃ = ∇`, built from the metric.
    Metric,
}

/// `Ω(u, v) = cos(k v) Σ_j (c_j cos(j u) + s_j sin(j u))`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
    /// Toroidal wavenumber `k`; zero for axisymmetric perturbations.
    pub v_mode: u32,
}

impl Perturbation {
    pub fn cos_mode(j: usize, amplitude: f64) -> Self {
        let mut cos = vec![0.0; j + 1];
        cos[j] = amplitude;
        Self {
            cos,
            ..Self::default()
        }
    }

    pub fn sin_mode(j: usize, amplitude: f64) -> Self {
        let mut sin = vec![0.0; j + 1];
        sin[j] = amplitude;
        Self {
            sin,
            ..Self::default()
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            cos: self.cos.iter().map(|c| c * s).collect(),
            sin: self.sin.iter().map(|c| c * s).collect(),
            v_mode: self.v_mode,
        }
    }

    /// Sum of two perturbations with the same toroidal mode.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.v_mode != other.v_mode {
            return Err(Error::BadInput("toroidal modes differ".into()));
        }
        let sum = |a: &[f64], b: &[f64]| {
            (0..a.len().max(b.len()))
                .map(|i| a.get(i).unwrap_or(&0.0) + b.get(i).unwrap_or(&0.0))
                .collect()
        };
        Ok(Self {
            cos: sum(&self.cos, &other.cos),
            sin: sum(&self.sin, &other.sin),
            v_mode: self.v_mode,
        })
    }

    /// Highest poloidal wavenumber.
    pub fn degree(&self) -> usize {
        self.cos.len().max(self.sin.len()).saturating_sub(1)
    }

    pub fn eval(&self, u: f64) -> f64 {
        let c: f64 = self
            .cos
            .iter()
            .enumerate()
            .map(|(j, a)| a * (j as f64 * u).cos())
            .sum();
        let s: f64 = self
            .sin
            .iter()
            .enumerate()
            .map(|(j, b)| b * (j as f64 * u).sin())
            .sum();
        c + s
    }

    /// Parses `c1:1.0,s2:-0.5` style mode lists.
    pub fn parse(text: &str, v_mode: u32) -> Result<Self> {
        let mut out = Self {
            v_mode,
            ..Self::default()
        };
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let bad = || {
                Error::BadInput(format!(
                    "bad mode {item:?}, expected c<j>:<amp> or s<j>:<amp>"
                ))
            };
            let (mode, amp) = item.split_once(':').ok_or_else(bad)?;
            let amp: f64 = amp.trim().parse().map_err(|_| bad())?;
            let (kind, j) = mode.trim().split_at(1);
            let j: usize = j.parse().map_err(|_| bad())?;
            let target = match kind {
                "c" => &mut out.cos,
                "s" => &mut out.sin,
                _ => return Err(bad()),
            };
            if target.len() <= j {
                target.resize(j + 1, 0.0);
            }
            target[j] += amp;
        }
        Ok(out)
    }
}

/// The `H`-polynomial of a known density with no `K` dependence.
fn h_polynomial(l: &Lagrangian) -> Result<HPoly> {
    if !l.is_h_only() {
        return Err(Error::Domain(
            "the second variation is only available for densities in H alone".into(),
        ));
    }
    let mut coeffs = Vec::new();
    for (&(k, m), c) in l.terms() {
        if m > 0 {
            continue;
        }
        let Coefficient::Known(v) = c else {
            return Err(Error::Domain("density has unresolved coefficients".into()));
        };
        if coeffs.len() <= k as usize {
            coeffs.resize(k as usize + 1, Rational::from_integer(0.into()));
        }
        coeffs[k as usize] = v.clone();
    }
    Ok(HPoly::from_coeffs(coeffs))
}

/// Second variation of `∫ E(H) dA + p V` at the torus in the direction `Ω`
/// of the normal displacement.
pub fn second_variation(
    t: &TorusShape,
    l: &Lagrangian,
    omega: &Perturbation,
    tilde: TildeOperator,
    n: usize,
) -> Result<f64> {
    let e = h_polynomial(l)?;
    let p = to_f64(&l.known_pressure()?);
    let (e1, e2) = (e.derivative(), e.derivative().derivative());
    let r = t.r();
    let k2 = f64::from(omega.v_mode).powi(2);
    let u = nodes(n);

    let w = SurfaceGrid::sample(n, |x| omega.eval(x))?;
    let wu = spectral::derivative(w.values());
    let h = t.sample_curvature_field(n, |h, _| h)?;
    let hw = h.zip_with(&w, |a, b| a * b)?;
    let hwu = spectral::derivative(hw.values());
    let lb = lb_numeric(t, &w);
    let db = divbar_numeric(t, &w);

    let mut integrand = Vec::with_capacity(n);
    for j in 0..n {
        let (hv, kv) = t.curvatures(u[j]);
        let d = t.axis_distance(u[j]);
        let (om, om_u) = (w.values()[j], wu[j]);
        let (ev, eh, ehh) = (e.eval_f64(hv), e1.eval_f64(hv), e2.eval_f64(hv));
        let lap = lb.values()[j] - k2 * om / (d * d);
        // ∇(HΩ)·∇Ω: u-part from g^{uu}, v-part from g^{vv}
        let grad_hw = hwu[j] * om_u / (r * r) + k2 * hv * om * om / (d * d);
        let (tilde_div, tilde_dot) = match tilde {
            TildeOperator::Bar => (
                db.values()[j] - k2 * om / (r * d * d),
                u[j].cos() / (r * r * d) * om_u * om_u + k2 * om * om / (r * d * d),
            ),
            TildeOperator::Metric => (lap, om_u * om_u / (r * r) + k2 * om * om / (d * d)),
        };
        let q = 2.0 * hv * hv - kv;
        let ee1 = q * q * ehh - 2.0 * hv * kv * eh + 2.0 * kv * ev - 2.0 * hv * p;
        let ee2 = q * ehh + 2.0 * hv * eh - ev;
        let f = ee1 * om * om + ee2 * om * lap - 2.0 * eh * om * tilde_div
            + 0.25 * ehh * lap * lap
            + eh * (grad_hw - tilde_dot);
        integrand.push(f * r * d);
    }
    let weight = if omega.v_mode == 0 { 2.0 * PI } else { PI };
    Ok(weight * spectral::periodic_integral(&integrand))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MembraneDiagnostics {
    pub reduced_volume: f64,
    pub ratio: f64,
    /// `|ρ − 1/(1.94 v⁴)| / ρ`.
    pub ratio_check: f64,
    /// `ρ` recovered from `v` with the exact constant `81/(16π²)`.
    pub seifert_ratio: f64,
}

pub fn membrane_diagnostics(t: &TorusShape) -> MembraneDiagnostics {
    let v = t.area_volume().reduced_volume;
    let ratio = (t.a() / t.r()).powi(2);
    MembraneDiagnostics {
        reduced_volume: v,
        ratio,
        ratio_check: (ratio - 1.0 / (1.94 * v.powi(4))).abs() / ratio,
        seifert_ratio: ratio_from_reduced_volume(v),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_algebra::rat;

    fn willmore() -> Lagrangian {
        Lagrangian::new(rat_int(0)).with_term(2, 0, rat_int(1))
    }

    #[test]
    fn willmore_minimum_at_clifford_ratio() {
        let shapes: Vec<TorusShape> = [1.5f64, 2.0, 3.0]
            .iter()
            .map(|rho| TorusShape::new(rho.sqrt(), 1.0).unwrap())
            .collect();
        let scan = willmore_scan(&shapes).unwrap();
        let two_pi2 = 2.0 * PI * PI;
        assert!((scan[1].1 - two_pi2).abs() < 1e-10 * two_pi2);
        assert!(scan[0].1 > scan[1].1 && scan[2].1 > scan[1].1);
    }

    #[test]
    fn willmore_is_scale_invariant() {
        let a = TorusShape::new(1.7, 0.6).unwrap();
        let b = TorusShape::new(5.1, 1.8).unwrap();
        let ea = curvature_energy(&a, &willmore(), 256).unwrap().total;
        let eb = curvature_energy(&b, &willmore(), 256).unwrap().total;
        assert!((ea - eb).abs() < 1e-10 * ea);
    }

    #[test]
    fn third_order_energy() {
        let t = TorusShape::new((6.0f64 / 5.0).sqrt(), 1.0).unwrap();
        let e = family_energy(3, &t, 256).unwrap();
        let expect = 9.0 * 5f64.sqrt() * PI * PI;
        assert!((e.total - expect).abs() < 1e-10 * expect);
        assert_eq!(e.pressure_term, 0.0);
    }

    #[test]
    fn total_curvature_term_integrates_to_zero() {
        let t = TorusShape::new(2.3, 0.9).unwrap();
        let l = Lagrangian::new(rat_int(0)).with_term(0, 1, rat(7, 2));
        assert!(curvature_energy(&t, &l, 256).unwrap().total.abs() < 1e-10);
    }

    #[test]
    fn second_variation_is_a_quadratic_form() {
        let t = TorusShape::new(2f64.sqrt(), 1.0).unwrap();
        let l = willmore();
        let a = Perturbation::parse("c1:1.0,s2:0.3", 0).unwrap();
        let b = Perturbation::parse("c0:0.2,c3:-0.7", 0).unwrap();
        let q = |w: &Perturbation| second_variation(&t, &l, w, TildeOperator::Bar, 128).unwrap();
        assert_eq!(q(&Perturbation::default()), 0.0);
        assert!((q(&a.scale(2.0)) - 4.0 * q(&a)).abs() < 1e-10 * q(&a).abs().max(1.0));
        let lhs = q(&a.add(&b).unwrap()) + q(&a.add(&b.scale(-1.0)).unwrap());
        let rhs = 2.0 * q(&a) + 2.0 * q(&b);
        assert!((lhs - rhs).abs() < 1e-9 * rhs.abs().max(1.0));
    }

    #[test]
    fn second_variation_converges_and_rejects_gauss_terms() {
        let t = TorusShape::new(2f64.sqrt(), 1.0).unwrap();
        let w = Perturbation::cos_mode(1, 1.0);
        let coarse = second_variation(&t, &willmore(), &w, TildeOperator::Bar, 128).unwrap();
        let fine = second_variation(&t, &willmore(), &w, TildeOperator::Bar, 256).unwrap();
        assert!(coarse.is_finite() && (coarse - fine).abs() < 1e-8 * fine.abs().max(1.0));
        let with_k = willmore().with_term(1, 1, rat_int(1));
        assert!(second_variation(&t, &with_k, &w, TildeOperator::Bar, 64).is_err());
    }

    #[test]
    fn toroidal_modes_are_supported() {
        let t = TorusShape::new(2.0, 1.0).unwrap();
        let mut w = Perturbation::cos_mode(1, 1.0);
        w.v_mode = 2;
        let a = second_variation(&t, &willmore(), &w, TildeOperator::Metric, 128).unwrap();
        let b = second_variation(&t, &willmore(), &w, TildeOperator::Metric, 256).unwrap();
        assert!((a - b).abs() < 1e-8 * b.abs().max(1.0));
    }

    #[test]
    fn diagnostics() {
        let t = TorusShape::new(2f64.sqrt(), 1.0).unwrap();
        let d = membrane_diagnostics(&t);
        assert!(d.ratio_check < 0.01);
        assert!((d.seifert_ratio - 2.0).abs() < 1e-12);
        let t = TorusShape::new(1.43, 1.0).unwrap();
        assert!((membrane_diagnostics(&t).ratio - 2.0449).abs() < 1e-12);
    }
}
