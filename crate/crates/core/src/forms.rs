//! Complex-valued differential forms in the local tube coordinates
//! (s, t, ρ): s the longitude, t the meridian angle, ρ the radial offset
//! from the tube boundary (the working torus sits at ρ = 0).
//!
//! Forms are closures over evaluation points. Each form may carry an
//! *analytic* exterior derivative closure; `d()` falls back to central
//! finite differences only when none is available. Wedge products propagate
//! the analytic derivative via the graded Leibniz rule, so structural
//! identities like dlog f ∧ dlog g ∧ ω = 0 for f, g holomorphic in the same
//! transverse variable come out at machine precision rather than at
//! finite-difference accuracy.

use num_complex::Complex64;
use std::sync::Arc;

/// Evaluation point in tube coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point3 {
    pub s: f64,
    pub t: f64,
    pub rho: f64,
}

impl Point3 {
    pub fn new(s: f64, t: f64, rho: f64) -> Self {
        Self { s, t, rho }
    }

    /// A point on the working torus ρ = 0.
    pub fn surface(s: f64, t: f64) -> Self {
        Self { s, t, rho: 0.0 }
    }

    fn coord(&self, axis: usize) -> f64 {
        [self.s, self.t, self.rho][axis]
    }

    fn with_coord(&self, axis: usize, value: f64) -> Self {
        let mut c = [self.s, self.t, self.rho];
        c[axis] = value;
        Self { s: c[0], t: c[1], rho: c[2] }
    }
}

/// Componentwise value of a form at a point.
///
/// Degree-1 components are the coefficients of (ds, dt, dρ); degree-2
/// components use the cyclic basis (dt∧dρ, dρ∧ds, ds∧dt), so the wedge of
/// two 1-forms is the componentwise cross product; degree 3 is the
/// coefficient of ds∧dt∧dρ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FormValue {
    F0(Complex64),
    F1([Complex64; 3]),
    F2([Complex64; 3]),
    F3(Complex64),
}

impl FormValue {
    pub fn degree(&self) -> u8 {
        match self {
            FormValue::F0(_) => 0,
            FormValue::F1(_) => 1,
            FormValue::F2(_) => 2,
            FormValue::F3(_) => 3,
        }
    }

    pub fn zero(degree: u8) -> Self {
        let z = Complex64::new(0.0, 0.0);
        match degree {
            0 => FormValue::F0(z),
            1 => FormValue::F1([z; 3]),
            2 => FormValue::F2([z; 3]),
            3 => FormValue::F3(z),
            _ => panic!("form degree {degree} out of range"),
        }
    }

    pub fn scalar(self) -> Complex64 {
        match self {
            FormValue::F0(v) | FormValue::F3(v) => v,
            other => panic!("expected scalar-component value, got degree {}", other.degree()),
        }
    }

    pub fn components(self) -> [Complex64; 3] {
        match self {
            FormValue::F1(v) | FormValue::F2(v) => v,
            other => panic!("expected 3-component value, got degree {}", other.degree()),
        }
    }

    /// Largest component magnitude.
    pub fn norm(&self) -> f64 {
        match self {
            FormValue::F0(v) | FormValue::F3(v) => v.norm(),
            FormValue::F1(v) | FormValue::F2(v) => {
                v.iter().map(|c| c.norm()).fold(0.0, f64::max)
            }
        }
    }

    pub fn add(self, other: FormValue) -> FormValue {
        match (self, other) {
            (FormValue::F0(a), FormValue::F0(b)) => FormValue::F0(a + b),
            (FormValue::F3(a), FormValue::F3(b)) => FormValue::F3(a + b),
            (FormValue::F1(a), FormValue::F1(b)) => {
                FormValue::F1([a[0] + b[0], a[1] + b[1], a[2] + b[2]])
            }
            (FormValue::F2(a), FormValue::F2(b)) => {
                FormValue::F2([a[0] + b[0], a[1] + b[1], a[2] + b[2]])
            }
            (a, b) => panic!("degree mismatch in form sum: {} vs {}", a.degree(), b.degree()),
        }
    }

    pub fn scale(self, k: Complex64) -> FormValue {
        match self {
            FormValue::F0(v) => FormValue::F0(k * v),
            FormValue::F3(v) => FormValue::F3(k * v),
            FormValue::F1(v) => FormValue::F1([k * v[0], k * v[1], k * v[2]]),
            FormValue::F2(v) => FormValue::F2([k * v[0], k * v[1], k * v[2]]),
        }
    }

    /// Pointwise wedge product.
    pub fn wedge(self, other: FormValue) -> FormValue {
        use FormValue::*;
        match (self, other) {
            (F0(a), b) => b.scale(a),
            (a, F0(b)) => a.scale(b),
            (F1(a), F1(b)) => F2([
                a[1] * b[2] - a[2] * b[1],
                a[2] * b[0] - a[0] * b[2],
                a[0] * b[1] - a[1] * b[0],
            ]),
            (F1(a), F2(b)) | (F2(b), F1(a)) => {
                F3(a[0] * b[0] + a[1] * b[1] + a[2] * b[2])
            }
            (a, b) => {
                panic!("wedge of degrees {} and {} unsupported", a.degree(), b.degree())
            }
        }
    }
}

type EvalFn = Arc<dyn Fn(Point3) -> FormValue + Send + Sync>;

/// A differential form with an evaluation closure and, optionally, an
/// analytic exterior derivative closure.
#[derive(Clone)]
pub struct Form {
    degree: u8,
    eval: EvalFn,
    diff: Option<EvalFn>,
}

impl std::fmt::Debug for Form {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Form")
            .field("degree", &self.degree)
            .field("analytic_d", &self.diff.is_some())
            .finish()
    }
}

/// Step used by the finite-difference fallback derivative.
const FD_STEP: f64 = 1e-5;

impl Form {
    pub fn new<F>(degree: u8, eval: F) -> Self
    where
        F: Fn(Point3) -> FormValue + Send + Sync + 'static,
    {
        assert!(degree <= 3);
        Self { degree, eval: Arc::new(eval), diff: None }
    }

    /// Attach an analytic exterior derivative.
    pub fn with_d<F>(mut self, diff: F) -> Self
    where
        F: Fn(Point3) -> FormValue + Send + Sync + 'static,
    {
        self.diff = Some(Arc::new(diff));
        self
    }

    /// Mark the form as closed: d is analytically zero.
    pub fn closed(self) -> Self {
        let deg = self.degree + 1;
        self.with_d(move |_| FormValue::zero(deg.min(3)))
    }

    pub fn degree(&self) -> u8 {
        self.degree
    }

    pub fn has_analytic_d(&self) -> bool {
        self.diff.is_some()
    }

    pub fn zero(degree: u8) -> Self {
        Form::new(degree, move |_| FormValue::zero(degree)).closed()
    }

    pub fn constant(value: Complex64) -> Self {
        Form::new(0, move |_| FormValue::F0(value)).closed()
    }

    pub fn eval(&self, p: Point3) -> FormValue {
        let v = (self.eval)(p);
        debug_assert_eq!(v.degree(), self.degree);
        v
    }

    /// Coefficient of ds∧dt at a surface point — the part that integrates
    /// over the ρ = 0 torus.
    pub fn surface_density(&self, s: f64, t: f64) -> Complex64 {
        match self.eval(Point3::surface(s, t)) {
            FormValue::F2(v) => v[2],
            other => panic!("surface_density needs a 2-form, got degree {}", other.degree()),
        }
    }

    /// Contraction of a 1-form with a tangent vector.
    pub fn eval_on_vector(&self, p: Point3, v: [f64; 3]) -> Complex64 {
        match self.eval(p) {
            FormValue::F1(a) => a[0] * v[0] + a[1] * v[1] + a[2] * v[2],
            other => panic!("eval_on_vector needs a 1-form, got degree {}", other.degree()),
        }
    }

    pub fn add(&self, other: &Form) -> Form {
        assert_eq!(self.degree, other.degree);
        let (e1, e2) = (self.eval.clone(), other.eval.clone());
        let mut out = Form { degree: self.degree, eval: Arc::new(move |p| e1(p).add(e2(p))), diff: None };
        if let (Some(d1), Some(d2)) = (self.diff.clone(), other.diff.clone()) {
            out.diff = Some(Arc::new(move |p| d1(p).add(d2(p))));
        }
        out
    }

    pub fn scale(&self, k: Complex64) -> Form {
        let e = self.eval.clone();
        let mut out =
            Form { degree: self.degree, eval: Arc::new(move |p| e(p).scale(k)), diff: None };
        if let Some(d) = self.diff.clone() {
            out.diff = Some(Arc::new(move |p| d(p).scale(k)));
        }
        out
    }

    /// Wedge product; the analytic derivative is propagated by the graded
    /// Leibniz rule d(α∧β) = dα∧β + (−1)^|α| α∧dβ when both factors carry
    /// one.
    pub fn wedge(&self, other: &Form) -> Form {
        let deg = self.degree + other.degree;
        assert!(deg <= 3, "wedge degree {deg} exceeds 3");
        let (e1, e2) = (self.eval.clone(), other.eval.clone());
        let mut out =
            Form { degree: deg, eval: Arc::new(move |p| e1(p).wedge(e2(p))), diff: None };
        if deg < 3 {
            if let (Some(d1), Some(d2)) = (self.diff.clone(), other.diff.clone()) {
                let (e1, e2) = (self.eval.clone(), other.eval.clone());
                let sign = if self.degree % 2 == 0 { 1.0 } else { -1.0 };
                out.diff = Some(Arc::new(move |p| {
                    let lhs = d1(p).wedge(e2(p));
                    let rhs = e1(p).wedge(d2(p)).scale(Complex64::new(sign, 0.0));
                    lhs.add(rhs)
                }));
            }
        } else {
            out.diff = Some(Arc::new(|_| FormValue::zero(3)));
        }
        out
    }

    /// Exterior derivative: analytic if available, otherwise central finite
    /// differences with step 1e-5.
    pub fn d(&self) -> Form {
        if let Some(diff) = self.diff.clone() {
            let out_deg = (self.degree + 1).min(3);
            // d∘d = 0, so the derivative of an analytic derivative is
            // analytically zero.
            return Form { degree: out_deg, eval: diff, diff: None }.closed();
        }
        self.d_numeric()
    }

    /// Finite-difference exterior derivative, regardless of whether an
    /// analytic one is attached (used to cross-check analytic closures).
    pub fn d_numeric(&self) -> Form {
        let eval = self.eval.clone();
        let degree = self.degree;
        let out_deg = (degree + 1).min(3);
        let partial = move |p: Point3, axis: usize| -> FormValue {
            let h = FD_STEP;
            let hi = (eval)(p.with_coord(axis, p.coord(axis) + h));
            let lo = (eval)(p.with_coord(axis, p.coord(axis) - h));
            hi.add(lo.scale(Complex64::new(-1.0, 0.0)))
                .scale(Complex64::new(1.0 / (2.0 * h), 0.0))
        };
        Form {
            degree: out_deg,
            eval: Arc::new(move |p| match degree {
                0 => FormValue::F1([
                    partial(p, 0).scalar(),
                    partial(p, 1).scalar(),
                    partial(p, 2).scalar(),
                ]),
                1 => {
                    let ds = partial(p, 0).components();
                    let dt = partial(p, 1).components();
                    let dr = partial(p, 2).components();
                    // curl in the cyclic 2-form basis
                    FormValue::F2([dt[2] - dr[1], dr[0] - ds[2], ds[1] - dt[0]])
                }
                2 => {
                    let ds = partial(p, 0).components();
                    let dt = partial(p, 1).components();
                    let dr = partial(p, 2).components();
                    FormValue::F3(ds[0] + dt[1] + dr[2])
                }
                _ => FormValue::zero(3),
            }),
            diff: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// A smooth scalar with known gradient, f = sin(s) e^{t} + ρ².
    fn sample_scalar() -> Form {
        Form::new(0, |p| FormValue::F0(c(p.s.sin() * p.t.exp() + p.rho * p.rho, 0.0)))
            .with_d(|p| {
                FormValue::F1([
                    c(p.s.cos() * p.t.exp(), 0.0),
                    c(p.s.sin() * p.t.exp(), 0.0),
                    c(2.0 * p.rho, 0.0),
                ])
            })
    }

    #[test]
    fn analytic_matches_numeric_gradient() {
        let f = sample_scalar();
        let p = Point3::new(0.3, -0.2, 0.15);
        let a = f.d().eval(p).components();
        let n = f.d_numeric().eval(p).components();
        for k in 0..3 {
            assert_abs_diff_eq!(a[k].re, n[k].re, epsilon = 1e-8);
            assert_abs_diff_eq!(a[k].im, n[k].im, epsilon = 1e-8);
        }
    }

    #[test]
    fn dd_is_zero_numerically() {
        let f = sample_scalar();
        let ddf = f.d().d_numeric();
        let p = Point3::new(0.7, 0.4, -0.1);
        assert!(ddf.eval(p).norm() < 1e-6);
    }

    #[test]
    fn wedge_one_forms_anticommutes() {
        let a = Form::new(1, |p| FormValue::F1([c(p.s, 0.0), c(p.t, 1.0), c(p.rho, 0.0)]));
        let b = Form::new(1, |p| FormValue::F1([c(1.0, p.t), c(p.s, 0.0), c(0.3, 0.0)]));
        let p = Point3::new(0.2, 0.5, 0.8);
        let ab = a.wedge(&b).eval(p).components();
        let ba = b.wedge(&a).eval(p).components();
        for k in 0..3 {
            assert_abs_diff_eq!(ab[k].re, -ba[k].re, epsilon = 1e-12);
            assert_abs_diff_eq!(ab[k].im, -ba[k].im, epsilon = 1e-12);
        }
    }

    #[test]
    fn wedge_of_parallel_one_forms_vanishes() {
        // α ∧ (h·α) = 0 — the cancellation behind curvature vanishing.
        let alpha =
            Form::new(1, |p| FormValue::F1([c(p.s + 1.0, 0.2), c(p.t, -0.4), c(1.0, p.rho)]));
        let scaled = alpha.scale(c(2.5, -1.25));
        let p = Point3::new(0.9, -0.3, 0.4);
        assert!(alpha.wedge(&scaled).eval(p).norm() < 1e-14);
    }

    #[test]
    fn leibniz_rule_through_wedge() {
        let f = sample_scalar();
        let g = Form::new(0, |p| FormValue::F0(c((p.s * p.t).cos(), p.rho))).with_d(|p| {
            FormValue::F1([
                c(-p.t * (p.s * p.t).sin(), 0.0),
                c(-p.s * (p.s * p.t).sin(), 0.0),
                c(0.0, 1.0),
            ])
        });
        let fg = f.wedge(&g);
        assert!(fg.has_analytic_d());
        let p = Point3::new(0.4, 0.6, 0.2);
        let a = fg.d().eval(p).components();
        let n = fg.d_numeric().eval(p).components();
        for k in 0..3 {
            assert_abs_diff_eq!(a[k].re, n[k].re, epsilon = 1e-7);
            assert_abs_diff_eq!(a[k].im, n[k].im, epsilon = 1e-7);
        }
    }

    #[test]
    fn surface_density_picks_ds_dt() {
        let two = Form::new(2, |p| FormValue::F2([c(9.0, 0.0), c(8.0, 0.0), c(p.s + p.t, 0.0)]));
        assert_abs_diff_eq!(two.surface_density(0.25, 0.5).re, 0.75, epsilon = 1e-15);
    }

    proptest! {
        #[test]
        fn wedge_with_self_is_zero(s in -1.0f64..1.0, t in -1.0f64..1.0, r in -1.0f64..1.0) {
            let a = Form::new(1, |p| {
                FormValue::F1([c(p.s * p.s, p.t), c(p.t.exp(), 0.0), c(p.rho, p.s)])
            });
            let p = Point3::new(s, t, r);
            prop_assert!(a.wedge(&a).eval(p).norm() < 1e-13);
        }
    }
}
