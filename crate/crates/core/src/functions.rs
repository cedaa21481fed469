//! Meromorphic functions on ℙ¹ in factored form, their divisors and tame
//! symbols, and continuous branches of log f on the boundary torus of a
//! tube around a point of the leaf.
//!
//! Functions are kept as c·Π(z − z_j)^{k_j}; this represents every rational
//! function and makes branch construction exact: on the tube
//! z = p + (ε+ρ)e^{2πit} each non-central factor contributes
//! Log(p − z_j) + Log(1 + (ε+ρ)e^{2πit}/(p − z_j)), whose second term never
//! crosses the principal cut as long as the tube stays clear of the other
//! divisor points, while the central factor contributes the exact winding
//! term k_p(log(ε+ρ) + 2πit).

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

/// A point of ℙ¹ = ℂ ∪ {∞}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PointP1 {
    Finite(Complex64),
    Infinity,
}

impl fmt::Display for PointP1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointP1::Finite(z) => write!(f, "{z}"),
            PointP1::Infinity => write!(f, "inf"),
        }
    }
}

/// Tolerance for identifying coincident divisor points.
const MERGE_TOL: f64 = 1e-9;

/// c · Π (z − z_j)^{k_j} with c ≠ 0 and distinct z_j.
#[derive(Debug, Clone)]
pub struct Meromorphic {
    scale: Complex64,
    factors: Vec<(Complex64, i64)>,
}

impl Meromorphic {
    pub fn new(scale: Complex64, raw: Vec<(Complex64, i64)>) -> Result<Self> {
        if scale.norm() == 0.0 || !scale.is_finite() {
            return Err(Error::InvalidArgument(
                "leading constant must be nonzero and finite".into(),
            ));
        }
        let mut factors: Vec<(Complex64, i64)> = Vec::new();
        for (z, k) in raw {
            if k == 0 {
                continue;
            }
            if let Some(slot) = factors.iter_mut().find(|(w, _)| (*w - z).norm() < MERGE_TOL) {
                slot.1 += k;
            } else {
                factors.push((z, k));
            }
        }
        factors.retain(|(_, k)| *k != 0);
        factors.sort_by(|a, b| {
            (a.0.re, a.0.im).partial_cmp(&(b.0.re, b.0.im)).unwrap()
        });
        Ok(Self { scale, factors })
    }

    pub fn constant(c: Complex64) -> Result<Self> {
        Self::new(c, Vec::new())
    }

    pub fn scale(&self) -> Complex64 {
        self.scale
    }

    pub fn factors(&self) -> &[(Complex64, i64)] {
        &self.factors
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut v = self.scale;
        for &(w, k) in &self.factors {
            v *= (z - w).powi(k as i32);
        }
        v
    }

    pub fn order_at(&self, p: &PointP1) -> i64 {
        match p {
            PointP1::Finite(z) => self
                .factors
                .iter()
                .find(|(w, _)| (w - z).norm() < MERGE_TOL)
                .map_or(0, |(_, k)| *k),
            PointP1::Infinity => -self.factors.iter().map(|(_, k)| k).sum::<i64>(),
        }
    }

    /// Support of the divisor, ∞ included when the degree is nonzero.
    pub fn divisor(&self) -> Vec<(PointP1, i64)> {
        let mut out: Vec<(PointP1, i64)> =
            self.factors.iter().map(|&(z, k)| (PointP1::Finite(z), k)).collect();
        let at_inf = self.order_at(&PointP1::Infinity);
        if at_inf != 0 {
            out.push((PointP1::Infinity, at_inf));
        }
        out
    }

    /// Distance from `center` to the nearest *other* divisor point, in the
    /// local tube metric (for ∞ the relevant quantity is 1/|z_j|).
    pub fn clearance(&self, center: &PointP1) -> f64 {
        let mut best = f64::INFINITY;
        match center {
            PointP1::Finite(p) => {
                for &(z, _) in &self.factors {
                    let d = (z - p).norm();
                    if d >= MERGE_TOL {
                        best = best.min(d);
                    }
                }
            }
            PointP1::Infinity => {
                for &(z, _) in &self.factors {
                    let r = z.norm();
                    if r > 0.0 {
                        best = best.min(1.0 / r);
                    }
                }
            }
        }
        best
    }

    /// Expand F(w) into a function of z with w = z^k (the pullback under the
    /// k-fold cover used by the quotient examples): each finite divisor
    /// point w_j ≠ 0 becomes its k roots, 0 and ∞ keep their position with
    /// k-fold multiplicity.
    pub fn pullback_power(&self, k: u32) -> Result<Meromorphic> {
        if k == 0 {
            return Err(Error::InvalidArgument("power must be positive".into()));
        }
        let mut factors = Vec::new();
        for &(w, m) in &self.factors {
            if w.norm() < MERGE_TOL {
                factors.push((Complex64::new(0.0, 0.0), m * k as i64));
                continue;
            }
            // z^k − w = Π_l (z − ζ^l w^{1/k}), monic, so the constant is
            // unchanged.
            let root = w.powf(1.0 / k as f64);
            for l in 0..k {
                let zeta = Complex64::from_polar(1.0, 2.0 * PI * l as f64 / k as f64);
                factors.push((zeta * root, m));
            }
        }
        Meromorphic::new(self.scale, factors)
    }

    /// The unit part f̂(p) = (f / (z−p)^{ord_p f})(p); for p = ∞ this is the
    /// leading constant.
    pub fn unit_part(&self, p: &PointP1) -> Complex64 {
        match p {
            PointP1::Finite(z) => {
                let mut v = self.scale;
                for &(w, k) in &self.factors {
                    if (w - z).norm() >= MERGE_TOL {
                        v *= (z - w).powi(k as i32);
                    }
                }
                v
            }
            PointP1::Infinity => self.scale,
        }
    }

    /// Tame symbol (−1)^{mn} f̂(p)^n / ĝ(p)^m with m = ord_p f, n = ord_p g.
    pub fn tame_symbol(&self, g: &Meromorphic, p: &PointP1) -> Complex64 {
        let m = self.order_at(p);
        let n = g.order_at(p);
        let sign = if (m * n) % 2 == 0 { 1.0 } else { -1.0 };
        sign * self.unit_part(p).powi(n as i32) / g.unit_part(p).powi(m as i32)
    }

    /// Continuous branch of log f on the shell around `center`, with margin
    /// checks against the other divisor points.
    pub fn log_tube_branch(&self, center: &PointP1, eps: f64) -> Result<TubeBranch> {
        if !(eps > 0.0) {
            return Err(Error::InvalidArgument(format!("tube radius {eps} must be positive")));
        }
        let clearance = self.clearance(center);
        if eps * 2.0 >= clearance {
            return Err(Error::TubeOverlap { eps, dist: clearance });
        }
        let winding = self.order_at(center);
        let scale_log = self.scale.ln();
        let factors = self.factors.clone();
        match *center {
            PointP1::Finite(p) => {
                let fac = factors.clone();
                let value = move |t: f64, rho: f64| {
                    let r = eps + rho;
                    let delta = Complex64::from_polar(r, 2.0 * PI * t);
                    let mut acc = scale_log
                        + winding as f64 * Complex64::new(r.ln(), 2.0 * PI * t);
                    for &(z, k) in &fac {
                        if (z - p).norm() < MERGE_TOL {
                            continue;
                        }
                        let base = p - z;
                        acc += k as f64 * (base.ln() + (1.0 + delta / base).ln());
                    }
                    acc
                };
                let fac = factors;
                let dlog = move |t: f64, rho: f64| {
                    let r = eps + rho;
                    let phase = Complex64::from_polar(1.0, 2.0 * PI * t);
                    let z = p + r * phase;
                    let dz_t = Complex64::new(0.0, 2.0 * PI) * r * phase;
                    let dz_r = phase;
                    let mut sum = Complex64::new(0.0, 0.0);
                    for &(w, k) in &fac {
                        sum += k as f64 / (z - w);
                    }
                    (sum * dz_t, sum * dz_r)
                };
                Ok(TubeBranch {
                    winding,
                    value: Arc::new(value),
                    dlog: Arc::new(dlog),
                })
            }
            PointP1::Infinity => {
                let fac = factors.clone();
                let value = move |t: f64, rho: f64| {
                    let r = eps + rho;
                    let u = Complex64::from_polar(r, 2.0 * PI * t);
                    let mut acc = scale_log;
                    for &(z, k) in &fac {
                        acc += k as f64
                            * (-(Complex64::new(r.ln(), 2.0 * PI * t)) + (1.0 - z * u).ln());
                    }
                    acc
                };
                let fac = factors;
                let dlog = move |t: f64, rho: f64| {
                    let r = eps + rho;
                    let phase = Complex64::from_polar(1.0, 2.0 * PI * t);
                    let u = r * phase;
                    let du_t = Complex64::new(0.0, 2.0 * PI) * u;
                    let du_r = phase;
                    let mut sum = Complex64::new(0.0, 0.0);
                    for &(z, k) in &fac {
                        sum += -k as f64 / (u * (1.0 - z * u));
                    }
                    (sum * du_t, sum * du_r)
                };
                Ok(TubeBranch {
                    winding,
                    value: Arc::new(value),
                    dlog: Arc::new(dlog),
                })
            }
        }
    }

    pub fn parse(input: &str) -> Result<Self> {
        parse::parse(input)
    }
}

/// A continuous branch of log f(z(t, ρ)) on the tube shell, with the exact
/// meridian winding (value(t+1) − value(t) = 2πi·winding) and an analytic
/// dlog in the (dt, dρ) directions.
#[derive(Clone)]
pub struct TubeBranch {
    pub winding: i64,
    value: Arc<dyn Fn(f64, f64) -> Complex64 + Send + Sync>,
    dlog: Arc<dyn Fn(f64, f64) -> (Complex64, Complex64) + Send + Sync>,
}

impl TubeBranch {
    /// Branch value at lifted meridian coordinate t (not reduced mod 1) and
    /// radial offset ρ.
    pub fn value(&self, t: f64, rho: f64) -> Complex64 {
        (self.value)(t, rho)
    }

    /// (∂_t, ∂_ρ) components of dlog f; periodic in t.
    pub fn dlog(&self, t: f64, rho: f64) -> (Complex64, Complex64) {
        (self.dlog)(t, rho)
    }
}

mod parse {
    //! Recursive-descent parser for rational expressions in z: numbers, i,
    //! z, + − * / ^ and parentheses. Products, quotients and integer powers
    //! stay in factored form; sums are expanded to polynomials, which are
    //! then factored provided they are binomials c_k z^k + c_0 (or simpler).
    //! Other sums need to be entered in factored form.

    use super::*;

    #[derive(Debug, Clone, PartialEq)]
    enum Tok {
        Num(f64),
        I,
        Z,
        Plus,
        Minus,
        Star,
        Slash,
        Caret,
        LParen,
        RParen,
    }

    fn lex(input: &str) -> Result<Vec<Tok>> {
        let mut out = Vec::new();
        let mut it = input.chars().peekable();
        while let Some(&c) = it.peek() {
            match c {
                ' ' | '\t' => {
                    it.next();
                }
                '+' => {
                    it.next();
                    out.push(Tok::Plus);
                }
                '-' => {
                    it.next();
                    out.push(Tok::Minus);
                }
                '*' => {
                    it.next();
                    out.push(Tok::Star);
                }
                '/' => {
                    it.next();
                    out.push(Tok::Slash);
                }
                '^' => {
                    it.next();
                    out.push(Tok::Caret);
                }
                '(' => {
                    it.next();
                    out.push(Tok::LParen);
                }
                ')' => {
                    it.next();
                    out.push(Tok::RParen);
                }
                'i' => {
                    it.next();
                    out.push(Tok::I);
                }
                'z' => {
                    it.next();
                    out.push(Tok::Z);
                }
                '0'..='9' | '.' => {
                    let mut s = String::new();
                    while let Some(&d) = it.peek() {
                        if d.is_ascii_digit() || d == '.' {
                            s.push(d);
                            it.next();
                        } else {
                            break;
                        }
                    }
                    let v: f64 = s
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad number literal '{s}'")))?;
                    out.push(Tok::Num(v));
                }
                other => return Err(Error::Parse(format!("unexpected character '{other}'"))),
            }
        }
        Ok(out)
    }

    /// Either a polynomial (dense coefficients, low to high) or a factored
    /// rational value.
    #[derive(Debug, Clone)]
    struct Value {
        scale: Complex64,
        factors: Vec<(Vec<Complex64>, i64)>,
    }

    impl Value {
        fn constant(c: Complex64) -> Self {
            Value { scale: c, factors: Vec::new() }
        }

        fn z() -> Self {
            Value {
                scale: Complex64::new(1.0, 0.0),
                factors: vec![(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)], 1)],
            }
        }

        fn mul(mut self, other: Value) -> Value {
            self.scale *= other.scale;
            self.factors.extend(other.factors);
            self
        }

        fn inv(mut self) -> Result<Value> {
            if self.scale.norm() == 0.0 {
                return Err(Error::Parse("division by zero constant".into()));
            }
            self.scale = 1.0 / self.scale;
            for f in &mut self.factors {
                f.1 = -f.1;
            }
            Ok(self)
        }

        fn pow(mut self, e: i64) -> Result<Value> {
            if e == 0 {
                return Ok(Value::constant(Complex64::new(1.0, 0.0)));
            }
            if self.scale.norm() == 0.0 && e < 0 {
                return Err(Error::Parse("negative power of zero".into()));
            }
            self.scale = self.scale.powi(e as i32);
            for f in &mut self.factors {
                f.1 *= e;
            }
            Ok(self)
        }

        /// Expand to dense polynomial coefficients; only possible when no
        /// factor has a negative exponent.
        fn to_poly(&self) -> Result<Vec<Complex64>> {
            let mut poly = vec![self.scale];
            for (p, k) in &self.factors {
                if *k < 0 {
                    return Err(Error::Parse(
                        "sums of quotients are not supported; enter the function in factored form"
                            .into(),
                    ));
                }
                for _ in 0..*k {
                    poly = poly_mul(&poly, p);
                }
            }
            Ok(poly)
        }

        fn add(self, other: Value, sign: f64) -> Result<Value> {
            let a = self.to_poly()?;
            let b = other.to_poly()?;
            let mut out = vec![Complex64::new(0.0, 0.0); a.len().max(b.len())];
            for (k, &c) in a.iter().enumerate() {
                out[k] += c;
            }
            for (k, &c) in b.iter().enumerate() {
                out[k] += sign * c;
            }
            while out.len() > 1 && out.last().unwrap().norm() < 1e-14 {
                out.pop();
            }
            Ok(Value {
                scale: Complex64::new(1.0, 0.0),
                factors: vec![(out, 1)],
            })
        }
    }

    fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    }

    struct Parser {
        toks: Vec<Tok>,
        pos: usize,
    }

    impl Parser {
        fn peek(&self) -> Option<&Tok> {
            self.toks.get(self.pos)
        }

        fn next(&mut self) -> Option<Tok> {
            let t = self.toks.get(self.pos).cloned();
            if t.is_some() {
                self.pos += 1;
            }
            t
        }

        fn expr(&mut self) -> Result<Value> {
            let mut acc = match self.peek() {
                Some(Tok::Minus) => {
                    self.next();
                    self.term()?
                        .mul(Value::constant(Complex64::new(-1.0, 0.0)))
                }
                _ => self.term()?,
            };
            loop {
                match self.peek() {
                    Some(Tok::Plus) => {
                        self.next();
                        let rhs = self.term()?;
                        acc = acc.add(rhs, 1.0)?;
                    }
                    Some(Tok::Minus) => {
                        self.next();
                        let rhs = self.term()?;
                        acc = acc.add(rhs, -1.0)?;
                    }
                    _ => break,
                }
            }
            Ok(acc)
        }

        fn term(&mut self) -> Result<Value> {
            let mut acc = self.power()?;
            loop {
                match self.peek() {
                    Some(Tok::Star) => {
                        self.next();
                        acc = acc.mul(self.power()?);
                    }
                    Some(Tok::Slash) => {
                        self.next();
                        acc = acc.mul(self.power()?.inv()?);
                    }
                    _ => break,
                }
            }
            Ok(acc)
        }

        fn power(&mut self) -> Result<Value> {
            let base = self.primary()?;
            if self.peek() == Some(&Tok::Caret) {
                self.next();
                let neg = if self.peek() == Some(&Tok::Minus) {
                    self.next();
                    -1i64
                } else {
                    1
                };
                match self.next() {
                    Some(Tok::Num(v)) if v.fract() == 0.0 => base.pow(neg * v as i64),
                    other => Err(Error::Parse(format!(
                        "expected integer exponent, got {other:?}"
                    ))),
                }
            } else {
                Ok(base)
            }
        }

        fn primary(&mut self) -> Result<Value> {
            match self.next() {
                Some(Tok::Num(v)) => Ok(Value::constant(Complex64::new(v, 0.0))),
                Some(Tok::I) => Ok(Value::constant(Complex64::new(0.0, 1.0))),
                Some(Tok::Z) => Ok(Value::z()),
                Some(Tok::LParen) => {
                    let v = self.expr()?;
                    match self.next() {
                        Some(Tok::RParen) => Ok(v),
                        _ => Err(Error::Parse("missing closing parenthesis".into())),
                    }
                }
                other => Err(Error::Parse(format!("unexpected token {other:?}"))),
            }
        }
    }

    /// Roots (with multiplicity) and leading coefficient of a supported
    /// polynomial: constants, pure powers z^m, and binomials c_k z^k + c_0.
    fn poly_roots(poly: &[Complex64]) -> Result<(Complex64, Vec<Complex64>)> {
        let mut poly = poly.to_vec();
        let mut roots = Vec::new();
        // strip z^m
        while poly.len() > 1 && poly[0].norm() < 1e-14 {
            roots.push(Complex64::new(0.0, 0.0));
            poly.remove(0);
        }
        let nonzero: Vec<usize> =
            (0..poly.len()).filter(|&k| poly[k].norm() >= 1e-14).collect();
        match nonzero.as_slice() {
            [] => Err(Error::Parse("function is identically zero".into())),
            [0] => Ok((poly[0], roots)),
            [0, k] => {
                // c_k z^k + c_0: the k roots of −c_0/c_k.
                let k = *k;
                let lead = poly[k];
                let base = -poly[0] / lead;
                let r = base.norm().powf(1.0 / k as f64);
                let arg0 = base.arg() / k as f64;
                for l in 0..k {
                    roots.push(Complex64::from_polar(
                        r,
                        arg0 + 2.0 * PI * l as f64 / k as f64,
                    ));
                }
                Ok((lead, roots))
            }
            _ => Err(Error::Parse(
                "cannot solve for the roots of this polynomial; enter the function in factored form"
                    .into(),
            )),
        }
    }

    pub fn parse(input: &str) -> Result<Meromorphic> {
        let toks = lex(input)?;
        if toks.is_empty() {
            return Err(Error::Parse("empty expression".into()));
        }
        let mut p = Parser { toks, pos: 0 };
        let v = p.expr()?;
        if p.pos != p.toks.len() {
            return Err(Error::Parse(format!(
                "trailing input at token {}",
                p.pos
            )));
        }
        let mut scale = v.scale;
        let mut factors = Vec::new();
        for (poly, k) in &v.factors {
            let (lead, roots) = poly_roots(poly)?;
            scale *= lead.powi(*k as i32);
            for r in roots {
                factors.push((r, *k));
            }
        }
        Meromorphic::new(scale, factors)
    }
}
