//! Local symbols ⟨f, g⟩ along closed orbits and the reciprocity law.
//!
//! The symbol along an orbit γ is the integral over the boundary torus of a
//! tube around γ of the degree-3 class c(f) ∪ c(g) ∪ c(ω̃), taken modulo
//! Λ(3). The torus carries coordinates (s, t): s runs along the orbit
//! (longitude), t around the meridian circle in the transverse disc. Three
//! independent evaluations are provided:
//!
//! * `flag` — the full Čech machinery: branch the logarithms over the
//!   9-chart cover, form the triple cup product, and integrate it with the
//!   flag formula over the triangulated torus;
//! * `direct` — the two-term formula
//!   ∫_T log f dlog g ∧ ω̃ + ∮_𝔪 dlog f · ∮_𝔩 log g ω̃,
//!   evaluated from the tube branches by 1-dimensional quadrature;
//! * `tame` — the closed-form oracle −(2πi)²·per·Log t_p(f, g) from the
//!   tame symbol t_p(f, g) = (−1)^{mn} f̂(p)ⁿ/ĝ(p)^m.
//!
//! All three agree modulo (2πi)³·per·ℤ, where per = ∮_γ ω is the ω-period
//! of the orbit; summing the flag symbols over every orbit meeting the
//! divisors of f and g gives 0 modulo (2πi)³ℤ (reciprocity).

use crate::cover::{ChartId, GoodCover};
use crate::deligne::DeligneClass;
use crate::error::{Error, Result};
use crate::forms::{Form, FormValue};
use crate::functions::{Meromorphic, PointP1, TubeBranch};
use crate::lattice::{Lattice, Reduction};
use crate::mesh::{IndexMap, TorusMesh};
use crate::quad;
use crate::{two_pi_i_pow, TWO_PI_I};
use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::BTreeMap;

/// Reduction search bound and tolerance for symbol comparisons.
const REDUCE_BOUND: i64 = 10_000;
const REDUCE_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct SymbolOptions {
    /// Tube radius; picked automatically from the divisor clearance when
    /// absent.
    pub eps: Option<f64>,
    /// Mesh refinement r (the torus is cut into 18r² triangles).
    pub refine: u32,
    /// Gauss quadrature order.
    pub order: usize,
    /// Flag index map.
    pub map: IndexMap,
}

impl Default for SymbolOptions {
    fn default() -> Self {
        Self { eps: None, refine: 1, order: quad::DEFAULT_ORDER, map: IndexMap::LowerLeft }
    }
}

/// All evaluations of one local symbol.
#[derive(Debug, Clone)]
pub struct LocalSymbol {
    pub point: PointP1,
    /// ω-period of the orbit.
    pub per: f64,
    /// Tube radius actually used.
    pub eps: f64,
    /// (ord_p f, ord_p g).
    pub orders: (i64, i64),
    pub flag: Complex64,
    pub direct: Complex64,
    pub tame: Complex64,
    /// flag − direct reduced modulo (2πi)³·per·ℤ.
    pub flag_vs_direct: Reduction,
    /// flag − tame reduced modulo (2πi)³·per·ℤ.
    pub flag_vs_tame: Reduction,
}

/// Reciprocity check: one symbol per orbit, and their sum reduced modulo
/// the global Λ(3) = (2πi)³ℤ.
#[derive(Debug, Clone)]
pub struct Reciprocity {
    pub symbols: Vec<LocalSymbol>,
    pub total: Complex64,
    pub reduction: Reduction,
}

/// Per-chart branches of log f on the tube torus: the function depends on
/// the meridian coordinate t (and the radial offset ρ), so each chart gets
/// the tube branch evaluated at its own lift of t.
fn meridian_branches(cover: &GoodCover, branch: &TubeBranch) -> BTreeMap<ChartId, Form> {
    let mut out = BTreeMap::new();
    for chart in cover.charts() {
        let cover = *cover;
        let b = branch.clone();
        let eval = {
            let b = b.clone();
            move |p: crate::forms::Point3| {
                let (_, lt) = cover
                    .lift(chart, p.s, p.t)
                    .unwrap_or_else(|| panic!("point ({}, {}) outside {chart}", p.s, p.t));
                FormValue::F0(b.value(lt, p.rho))
            }
        };
        let form = Form::new(0, eval).with_d(move |p: crate::forms::Point3| {
            let (_, lt) = cover
                .lift(chart, p.s, p.t)
                .unwrap_or_else(|| panic!("point ({}, {}) outside {chart}", p.s, p.t));
            let (dt, dr) = b.dlog(lt, p.rho);
            FormValue::F1([Complex64::new(0.0, 0.0), dt, dr])
        });
        out.insert(chart, form);
    }
    out
}

/// Per-chart primitives of ω̃ = 2πi·per·ds on the tube torus.
fn longitude_branches(cover: &GoodCover, per: f64) -> BTreeMap<ChartId, Form> {
    let mut out = BTreeMap::new();
    for chart in cover.charts() {
        let cover = *cover;
        let eval = move |p: crate::forms::Point3| {
            let (ls, _) = cover
                .lift(chart, p.s, p.t)
                .unwrap_or_else(|| panic!("point ({}, {}) outside {chart}", p.s, p.t));
            FormValue::F0(TWO_PI_I * per * ls)
        };
        let form = Form::new(0, eval).with_d(move |_| {
            FormValue::F1([TWO_PI_I * per, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)])
        });
        out.insert(chart, form);
    }
    out
}

fn period_lattice(per: f64, twist: u32) -> Lattice {
    if per == 1.0 {
        Lattice::integers(twist)
    } else {
        Lattice::new(vec![per], twist).expect("orbit period must be nonzero")
    }
}

/// The degree-3 class c(f) ∪ c(g) ∪ c(ω̃) on the tube torus around `p`.
pub fn tube_class(
    cover: &GoodCover,
    f: &Meromorphic,
    g: &Meromorphic,
    p: &PointP1,
    per: f64,
    eps: f64,
) -> Result<DeligneClass> {
    let bf = f.log_tube_branch(p, eps)?;
    let bg = g.log_tube_branch(p, eps)?;
    let cf = DeligneClass::degree_one(cover, meridian_branches(cover, &bf), Lattice::integers(1))?;
    let cg = DeligneClass::degree_one(cover, meridian_branches(cover, &bg), Lattice::integers(1))?;
    let cw = DeligneClass::degree_one(cover, longitude_branches(cover, per), period_lattice(per, 1))?;
    cf.cup(&cg)?.cup(&cw)
}

/// The two-term formula, from the tube branches alone:
///
///   ∫_T log f dlog g ∧ ω̃ + ∮_𝔪 dlog f · ∮_𝔩 log g ω̃
///     = −2πi·per ∫₀¹ log f(t) ∂_t log g(t) dt
///       + (2πi·ord f)(2πi·per) log g(0),
///
/// with the branch cut and the longitude both placed at t = 0 (the two
/// choices must match for the value to be well defined mod Λ(3)).
pub fn direct_symbol(bf: &TubeBranch, bg: &TubeBranch, per: f64, order: usize) -> Complex64 {
    let term1 = -TWO_PI_I
        * per
        * quad::integrate_interval_panels(
            |t| bf.value(t, 0.0) * bg.dlog(t, 0.0).0,
            0.0,
            1.0,
            order,
            8,
        );
    let term2 = TWO_PI_I * bf.winding as f64 * TWO_PI_I * per * bg.value(0.0, 0.0);
    term1 + term2
}

/// The tame-symbol oracle −(2πi)²·per·Log t_p(f, g).
pub fn tame_oracle(f: &Meromorphic, g: &Meromorphic, p: &PointP1, per: f64) -> Complex64 {
    -two_pi_i_pow(2) * per * f.tame_symbol(g, p).ln()
}

fn auto_eps(f: &Meromorphic, g: &Meromorphic, p: &PointP1) -> f64 {
    let clear = f.clearance(p).min(g.clearance(p));
    (0.2 * clear).min(0.15)
}

/// Compute the local symbol of (f, g) along the orbit through `p`, with
/// ω-period `per`, by all three methods.
pub fn local_symbol(
    f: &Meromorphic,
    g: &Meromorphic,
    p: &PointP1,
    per: f64,
    opts: &SymbolOptions,
) -> Result<LocalSymbol> {
    let cover = GoodCover::standard();
    let eps = opts.eps.unwrap_or_else(|| auto_eps(f, g, p));
    let class = tube_class(&cover, f, g, p, per, eps)?;
    let flag = class.integrate(&TorusMesh::new(opts.refine as usize), opts.map, opts.order)?;
    let bf = f.log_tube_branch(p, eps)?;
    let bg = g.log_tube_branch(p, eps)?;
    let direct = direct_symbol(&bf, &bg, per, opts.order);
    let tame = tame_oracle(f, g, p, per);
    let lattice = period_lattice(per, 3);
    let flag_vs_direct = lattice.reduce(flag - direct, REDUCE_BOUND, REDUCE_TOL);
    let flag_vs_tame = lattice.reduce(flag - tame, REDUCE_BOUND, REDUCE_TOL);
    Ok(LocalSymbol {
        point: *p,
        per,
        eps,
        orders: (f.order_at(p), g.order_at(p)),
        flag,
        direct,
        tame,
        flag_vs_direct,
        flag_vs_tame,
    })
}

/// Deduplicated union of the divisor supports of f and g, finite points
/// first in lexicographic order, ∞ last.
pub fn support_union(f: &Meromorphic, g: &Meromorphic) -> Vec<PointP1> {
    let mut finite: Vec<Complex64> = Vec::new();
    let mut infinity = false;
    for (p, _) in f.divisor().into_iter().chain(g.divisor()) {
        match p {
            PointP1::Finite(z) => {
                if !finite.iter().any(|w| (*w - z).norm() < 1e-9) {
                    finite.push(z);
                }
            }
            PointP1::Infinity => infinity = true,
        }
    }
    finite.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    let mut out: Vec<PointP1> = finite.into_iter().map(PointP1::Finite).collect();
    if infinity {
        out.push(PointP1::Infinity);
    }
    out
}

fn reciprocity_over(
    f: &Meromorphic,
    g: &Meromorphic,
    points: &[PointP1],
    per: f64,
    opts: &SymbolOptions,
) -> Result<Reciprocity> {
    let symbols: Vec<LocalSymbol> = points
        .par_iter()
        .map(|p| local_symbol(f, g, p, per, opts))
        .collect::<Result<_>>()?;
    let total: Complex64 = symbols.iter().map(|s| s.flag).sum();
    let reduction = Lattice::integers(3).reduce(total, REDUCE_BOUND, 1e-6);
    Ok(Reciprocity { symbols, total, reduction })
}

/// Reciprocity on the product system Σ × S¹: every orbit has ω-period 1 and
/// the orbits meeting the divisors are indexed by the divisor support in Σ.
pub fn reciprocity_product(
    f: &Meromorphic,
    g: &Meromorphic,
    opts: &SymbolOptions,
) -> Result<Reciprocity> {
    let points = support_union(f, g);
    reciprocity_over(f, g, &points, 1.0, opts)
}

/// Reciprocity on the rotation system of order k. Functions are given in
/// the base variable w = z^k; orbits away from the central fiber have
/// ω-period k and correspond to base divisor points, lifted here through
/// one representative k-th root. Divisors touching the fixed fiber over
/// w ∈ {0, ∞} are not supported (the tube torus there is not a product).
pub fn reciprocity_rotation(
    fw: &Meromorphic,
    gw: &Meromorphic,
    k: u32,
    opts: &SymbolOptions,
) -> Result<Reciprocity> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "rotation order must be at least 2, got {k}"
        )));
    }
    let zero = PointP1::Finite(Complex64::new(0.0, 0.0));
    for h in [fw, gw] {
        if h.order_at(&zero) != 0 || h.order_at(&PointP1::Infinity) != 0 {
            return Err(Error::UnsupportedOrbit(format!("divisor of {} touches the fixed fiber over 0 or infinity", if std::ptr::eq(h, fw) { "f" } else { "g" })));
        }
    }
    let f = fw.pullback_power(k)?;
    let g = gw.pullback_power(k)?;
    // One representative root per orbit; the principal root matches the
    // factor produced by the pullback exactly.
    let reps: Vec<PointP1> = support_union(fw, gw)
        .into_iter()
        .map(|p| match p {
            PointP1::Finite(w) => Ok(PointP1::Finite(w.powf(1.0 / k as f64))),
            PointP1::Infinity => Err(Error::UnsupportedOrbit("orbit at infinity".into())),
        })
        .collect::<Result<_>>()?;
    reciprocity_over(&f, &g, &reps, k as f64, opts)
}
