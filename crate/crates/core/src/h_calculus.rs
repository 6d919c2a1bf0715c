//! Closed forms for the surface operators applied to functions of `H` on the
//! torus.
//!
//! Along a meridian `H` is a Möbius function of `cos u`, so every operator
//! below maps a polynomial in `H` to another polynomial in `H`. Coefficients
//! depend on the large radius only through `a²`.

use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::exact_algebra::{rat_int, HPoly, Rational};
use crate::geometry::{divbar_numeric, grad_dot_numeric, lb_numeric, SurfaceGrid, TorusShape};

/// Torus with rational `a²` and `r`; `a` itself may be irrational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactTorus {
    a2: Rational,
    r: Rational,
}

impl ExactTorus {
    pub fn new(a2: Rational, r: Rational) -> Result<Self> {
        if !r.is_positive() || a2 <= &r * &r {
            return Err(Error::BadInput(format!(
                "torus radii must satisfy a² > r² > 0, got a² = {a2}, r = {r}"
            )));
        }
        Ok(Self { a2, r })
    }

    /// Torus with `a² = ratio · r²`.
    pub fn from_ratio(ratio: &Rational, r: Rational) -> Result<Self> {
        Self::new(ratio * &r * &r, r)
    }

    pub fn a2(&self) -> &Rational {
        &self.a2
    }

    pub fn r(&self) -> &Rational {
        &self.r
    }

    pub fn r2(&self) -> Rational {
        &self.r * &self.r
    }

    /// `a² / r²`.
    pub fn ratio(&self) -> Rational {
        &self.a2 / self.r2()
    }

    pub fn shape(&self) -> TorusShape {
        TorusShape::from_exact(&self.a2, &self.r2()).expect("validated radii")
    }

    /// Builds `prefactor · Σ_k c_k r^k H^k` from bracket entries `c_k` that
    /// are linear in `(a², r²)`, given as `(α, β)` for `α a² + β r²`.
    fn bracket(&self, prefactor: Rational, entries: &[(i64, i64)]) -> HPoly {
        let r2 = self.r2();
        let mut rk = Rational::one();
        let mut coeffs = Vec::with_capacity(entries.len());
        for &(alpha, beta) in entries {
            let c = rat_int(alpha) * &self.a2 + rat_int(beta) * &r2;
            coeffs.push(&prefactor * c * &rk);
            rk *= &self.r;
        }
        HPoly::from_coeffs(coeffs)
    }

    /// `1 / (a² r^k)`.
    fn prefactor(&self, k: i32) -> Rational {
        Rational::one() / (&self.a2 * num_traits::pow(self.r.clone(), k as usize))
    }

    /// `K = (2rH − 1)/r²` from the Weingarten relation `r²K − 2rH + 1 = 0`.
    pub fn k_as_hpoly(&self) -> HPoly {
        let r2 = self.r2();
        HPoly::from_coeffs(vec![-Rational::one() / &r2, rat_int(2) / &self.r])
    }

    /// `∇²H`.
    pub fn laplacian_h(&self) -> HPoly {
        self.bracket(self.prefactor(3), &[(2, -4), (-8, 12), (10, -12), (-4, 4)])
    }

    /// `|∇H|² = g^{uu} (∂_u H)²`.
    pub fn grad_h_squared(&self) -> HPoly {
        self.bracket(
            self.prefactor(4),
            &[(-1, 4), (6, -16), (-13, 24), (12, -16), (-4, 4)],
        )
    }

    /// `∇²(H^n)` by the chain rule.
    pub fn laplacian_h_pow(&self, n: u32) -> Result<HPoly> {
        if n < 1 {
            return Err(Error::Domain("power must be at least 1".into()));
        }
        Ok(self.lb_poly(&HPoly::monomial(n as usize, Rational::one())))
    }

    /// `∇·∇̄H`.
    pub fn divbar_h(&self) -> HPoly {
        self.bracket(
            self.prefactor(4),
            &[(-4, 12), (24, -52), (-52, 84), (48, -60), (-16, 16)],
        )
    }

    /// `∇·∇̄K`.
    pub fn divbar_k(&self) -> HPoly {
        self.bracket(
            self.prefactor(5),
            &[(-8, 24), (48, -104), (-104, 168), (96, -120), (-32, 32)],
        )
    }

    /// `B = K h^{uu} (∂_u H)²`, the term produced by `∇·∇̄` acting on a
    /// product.
    pub fn divbar_bilinear(&self) -> HPoly {
        self.bracket(
            self.prefactor(5),
            &[(1, -4), (-8, 24), (25, -56), (-38, 64), (28, -36), (-8, 8)],
        )
    }

    /// `∇² f(H) = f′ ∇²H + f″ |∇H|²`.
    pub fn lb_poly(&self, f: &HPoly) -> HPoly {
        let d1 = f.derivative();
        let d2 = d1.derivative();
        &(&d1 * &self.laplacian_h()) + &(&d2 * &self.grad_h_squared())
    }

    /// `∇·∇̄ f(H) = f′ ∇·∇̄H + f″ B`.
    pub fn divbar_poly(&self, f: &HPoly) -> HPoly {
        let d1 = f.derivative();
        let d2 = d1.derivative();
        &(&d1 * &self.divbar_h()) + &(&d2 * &self.divbar_bilinear())
    }

    /// Leading two coefficients of `∇²(H^n)`, `[H^{n+2}]` and `[H^{n+1}]`, in
    /// closed form.
    pub fn laplacian_h_pow_leading(&self, n: u32) -> (Rational, Rational) {
        let n = rat_int(n as i64);
        let r2 = self.r2();
        let top = rat_int(4) * &n * &n * (&r2 - &self.a2) / &self.a2;
        let next = rat_int(2) / (&self.a2 * &self.r)
            * ((rat_int(6) * &n * &n - &n) * &self.a2
                - (rat_int(8) * &n * &n - rat_int(2) * &n) * &r2);
        (top, next)
    }
}

/// One closed form compared against the grid operators.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityCheck {
    pub name: String,
    /// Largest pointwise deviation relative to the field's largest value.
    pub max_error: f64,
}

/// Compares every closed form with the spectral operators on an `n`-point
/// grid, plus the exact leading-coefficient formula for `∇²(H^n)`.
pub fn identity_checks(t: &ExactTorus, n: usize) -> Result<Vec<IdentityCheck>> {
    let shape = t.shape();
    let h = shape.sample_curvature_field(n, |h, _| h)?;
    let k = shape.sample_curvature_field(n, |_, k| k)?;
    let compare = |name: String, grid: &SurfaceGrid, p: &HPoly| {
        let exact: Vec<f64> = h.values().iter().map(|&x| p.eval_f64(x)).collect();
        let scale = exact
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(f64::MIN_POSITIVE);
        let err = grid
            .values()
            .iter()
            .zip(&exact)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        IdentityCheck {
            name,
            max_error: err / scale,
        }
    };
    let pow = |e: i32| h.map(|x| x.powi(e));
    let mut out = vec![
        compare(
            "laplacian H".into(),
            &lb_numeric(&shape, &h),
            &t.laplacian_h(),
        ),
        compare(
            "|grad H|^2".into(),
            &grad_dot_numeric(&shape, &h, &h)?,
            &t.grad_h_squared(),
        ),
    ];
    for e in 2..=6u32 {
        out.push(compare(
            format!("laplacian H^{e}"),
            &lb_numeric(&shape, &pow(e as i32)),
            &t.laplacian_h_pow(e)?,
        ));
    }
    out.push(compare(
        "divbar H".into(),
        &divbar_numeric(&shape, &h),
        &t.divbar_h(),
    ));
    out.push(compare(
        "divbar K".into(),
        &divbar_numeric(&shape, &k),
        &t.divbar_k(),
    ));
    // B = (∇·∇̄(H²) − 2H ∇·∇̄H) / 2
    let bilinear = divbar_numeric(&shape, &pow(2)).zip_with(
        &divbar_numeric(&shape, &h).zip_with(&h, |d, x| 2.0 * x * d)?,
        |a, b| 0.5 * (a - b),
    )?;
    out.push(compare(
        "bilinear term".into(),
        &bilinear,
        &t.divbar_bilinear(),
    ));
    for e in 2..=5u32 {
        out.push(compare(
            format!("divbar H^{e}"),
            &divbar_numeric(&shape, &pow(e as i32)),
            &t.divbar_poly(&HPoly::monomial(e as usize, Rational::one())),
        ));
    }
    let leading_ok = (2..=10u32).all(|e| {
        let p = t.laplacian_h_pow(e).expect("e >= 1");
        let (top, next) = t.laplacian_h_pow_leading(e);
        p.coeff(e as usize + 2) == top && p.coeff(e as usize + 1) == next
    });
    out.push(IdentityCheck {
        name: "leading coefficients of laplacian H^n".into(),
        max_error: if leading_ok { 0.0 } else { 1.0 },
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_algebra::{rat, to_f64};
    use crate::geometry::nodes;
    use num_traits::Zero;

    fn torus(a2: i64, r: i64) -> ExactTorus {
        ExactTorus::new(rat_int(a2), rat_int(r)).unwrap()
    }

    #[test]
    fn weingarten_polynomial() {
        assert_eq!(torus(4, 1).k_as_hpoly(), HPoly::from_ints(&[-1, 2]));
        let t = ExactTorus::new(rat_int(9), rat_int(2)).unwrap();
        assert_eq!(
            t.k_as_hpoly(),
            HPoly::from_coeffs(vec![rat(-1, 4), rat_int(1)])
        );
        assert!(t.k_as_hpoly().eval(&rat(1, 4)).is_zero());
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(torus(4, 1).laplacian_h(), HPoly::from_ints(&[1, -5, 7, -3]));
        assert_eq!(torus(2, 1).laplacian_h(), HPoly::from_ints(&[0, -2, 4, -2]));
        assert_eq!(
            torus(4, 1).grad_h_squared(),
            HPoly::from_ints(&[0, 2, -7, 8, -3])
        );
        assert_eq!(torus(2, 1).divbar_h().coeff(0), rat_int(2));
        let lead = torus(2, 1).laplacian_h_pow(2).unwrap();
        assert_eq!(lead.leading().unwrap(), &rat_int(-8));
    }

    #[test]
    fn gradient_vanishes_at_critical_points_of_h() {
        for (a2, r) in [(4, 1), (7, 2), (3, 1)] {
            let t = torus(a2, r);
            let (a, rf) = (to_f64(&t.a2).sqrt(), r as f64);
            for h in [
                0.5 * (1.0 / rf + 1.0 / (a + rf)),
                0.5 * (1.0 / rf - 1.0 / (a - rf)),
            ] {
                assert!(t.grad_h_squared().eval_f64(h).abs() < 1e-12);
                assert!(t.divbar_bilinear().eval_f64(h).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn divbar_k_is_linear_in_divbar_h() {
        let t = ExactTorus::new(rat(17, 3), rat(3, 2)).unwrap();
        assert_eq!(t.divbar_k(), t.divbar_h().scale(&(rat_int(2) / t.r())));
        assert_eq!(t.divbar_poly(&t.k_as_hpoly()), t.divbar_k());
        assert!(t.divbar_poly(&HPoly::constant(rat_int(5))).is_zero());
    }

    #[test]
    fn bilinear_term_from_product_rule() {
        let t = ExactTorus::new(rat(11, 2), rat(2, 3)).unwrap();
        let h = HPoly::var();
        let lhs = &t.divbar_poly(&(&h * &h)) - &(&h * &t.divbar_h()).scale(&rat_int(2));
        assert_eq!(lhs.scale(&rat(1, 2)), t.divbar_bilinear());
        // B = r K |∇H|²
        let expect = (&t.k_as_hpoly() * &t.grad_h_squared()).scale(t.r());
        assert_eq!(t.divbar_bilinear(), expect);
    }

    #[test]
    fn leading_coefficients_match_closed_form() {
        let t = ExactTorus::new(rat(13, 5), rat(4, 3)).unwrap();
        for n in 2..=10u32 {
            let p = t.laplacian_h_pow(n).unwrap();
            let (top, next) = t.laplacian_h_pow_leading(n);
            assert_eq!(p.coeff(n as usize + 2), top);
            assert_eq!(p.coeff(n as usize + 1), next);
        }
        assert_eq!(t.laplacian_h_pow(1).unwrap(), t.laplacian_h());
        assert!(t.laplacian_h_pow(0).is_err());
    }

    #[test]
    fn closed_forms_match_grid_operators() {
        let t = ExactTorus::new(rat_int(3), rat_int(1)).unwrap();
        let shape = t.shape();
        let n = 128;
        let h = shape.sample_curvature_field(n, |h, _| h).unwrap();
        let k = shape.sample_curvature_field(n, |_, k| k).unwrap();
        let h2 = h.map(|x| x * x);
        let hu: Vec<f64> = nodes(n).iter().map(|&u| shape.curvatures(u).0).collect();
        let check = |grid: &SurfaceGrid, p: &HPoly| {
            let scale = p
                .coeffs()
                .iter()
                .map(|c| to_f64(c).abs())
                .fold(1.0, f64::max);
            for (v, hv) in grid.values().iter().zip(&hu) {
                assert!((v - p.eval_f64(*hv)).abs() < 1e-10 * scale);
            }
        };
        check(&lb_numeric(&shape, &h), &t.laplacian_h());
        check(
            &grad_dot_numeric(&shape, &h, &h).unwrap(),
            &t.grad_h_squared(),
        );
        check(&divbar_numeric(&shape, &h), &t.divbar_h());
        check(&divbar_numeric(&shape, &k), &t.divbar_k());
        check(
            &divbar_numeric(&shape, &h2),
            &t.divbar_poly(&HPoly::from_ints(&[0, 0, 1])),
        );
    }
}
