//! Čech cocycles for the smooth Deligne complex
//! Λ(n) → 𝒜⁰ → … → 𝒜^{n−1} over the 9-chart cover of the torus.
//!
//! A degree-n cocycle consists of a Λ(n)-valued component λ on (n+1)-tuples
//! of charts and i-form components θⁱ on (n−i)-tuples, subject to
//!
//!   δθ⁰ + (−1)ⁿ λ = 0,     δθⁱ + (−1)^{n−i} dθ^{i−1} = 0  (1 ≤ i ≤ n−1).
//!
//! λ values are carried as exact integer coefficient vectors against the
//! lattice generators; θ components are closures producing [`Form`]s that
//! evaluate at torus points (lifting into their charts internally). Cup
//! products follow the front-face/back-face rule, which on components reads:
//! multiply by the λ of the front face, or wedge the front form with the
//! exterior derivative of the back top form.

use crate::cover::{ChartId, GoodCover};
use crate::error::{Error, Result};
use crate::forms::{Form, FormValue, Point3};
use crate::lattice::Lattice;
use crate::mesh::{IndexMap, TorusMesh};
use crate::quad;
use crate::TWO_PI_I;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;

type LambdaFn = Arc<dyn Fn(&[ChartId]) -> Result<Vec<i64>> + Send + Sync>;
type ThetaFn = Arc<dyn Fn(&[ChartId]) -> Result<Form> + Send + Sync>;

/// Coefficient bound and tolerance used when rounding λ values to exact
/// lattice elements at construction time.
const LAMBDA_BOUND: i64 = 100_000;
const LAMBDA_TOL: f64 = 1e-7;

#[derive(Clone)]
pub struct DeligneClass {
    degree: u8,
    lattice: Lattice,
    lambda: LambdaFn,
    thetas: Vec<ThetaFn>,
}

impl std::fmt::Debug for DeligneClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DeligneClass")
            .field("degree", &self.degree)
            .field("lattice", &self.lattice)
            .finish()
    }
}

/// Residuals of the numerical cocycle check, one entry per condition
/// (index 0 is the λ-relation, index i ≥ 1 the θⁱ-relation).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CocycleReport {
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub samples: usize,
}

impl DeligneClass {
    /// A degree-1 cocycle from per-chart branch functions θ⁰_a (degree-0
    /// forms whose chart-to-chart differences are constant elements of
    /// Λ(1)). The λ table is rounded to exact lattice coefficients at every
    /// pairwise intersection center and verified to be integral.
    pub fn degree_one(
        cover: &GoodCover,
        branches: BTreeMap<ChartId, Form>,
        lattice: Lattice,
    ) -> Result<Self> {
        if lattice.twist() != 1 {
            return Err(Error::DegreeMismatch(format!(
                "degree-1 class needs a twist-1 lattice, got twist {}",
                lattice.twist()
            )));
        }
        let mut table: BTreeMap<(ChartId, ChartId), Vec<i64>> = BTreeMap::new();
        for &a in &cover.charts() {
            for &b in &cover.charts() {
                if a == b {
                    table.insert((a, b), vec![0; lattice.rank()]);
                    continue;
                }
                let ix = cover
                    .intersection(&[a, b])
                    .ok_or_else(|| Error::EmptyIntersection(format!("{a}{b}")))?;
                let (cs, ct) = ix.center();
                let p = Point3::surface(cs.rem_euclid(1.0), ct.rem_euclid(1.0));
                let va = branches
                    .get(&a)
                    .ok_or_else(|| Error::MissingComponent(a.to_string()))?
                    .eval(p)
                    .scalar();
                let vb = branches
                    .get(&b)
                    .ok_or_else(|| Error::MissingComponent(b.to_string()))?
                    .eval(p)
                    .scalar();
                // λ_{ab} = θ⁰_b − θ⁰_a ∈ 2πiΛ.
                let diff = (vb - va) / TWO_PI_I;
                if diff.im.abs() > LAMBDA_TOL {
                    return Err(Error::InvalidClass(diff.im.abs()));
                }
                let coeffs = lattice.round_real(diff.re, LAMBDA_BOUND, LAMBDA_TOL)?;
                table.insert((a, b), coeffs);
            }
        }
        let rank = lattice.rank();
        let table = Arc::new(table);
        let lam_table = table.clone();
        let lambda: LambdaFn = Arc::new(move |tuple| {
            if tuple.len() != 2 {
                return Err(Error::DegreeMismatch(format!(
                    "degree-1 λ takes chart pairs, got {} charts",
                    tuple.len()
                )));
            }
            lam_table
                .get(&(tuple[0], tuple[1]))
                .cloned()
                .or_else(|| (tuple[0] == tuple[1]).then(|| vec![0; rank]))
                .ok_or_else(|| Error::MissingComponent(format!("{}{}", tuple[0], tuple[1])))
        });
        let branches = Arc::new(branches);
        let theta0: ThetaFn = Arc::new(move |tuple| {
            if tuple.len() != 1 {
                return Err(Error::DegreeMismatch(format!(
                    "degree-1 θ⁰ takes single charts, got {} charts",
                    tuple.len()
                )));
            }
            branches
                .get(&tuple[0])
                .cloned()
                .ok_or_else(|| Error::MissingComponent(tuple[0].to_string()))
        });
        Ok(Self { degree: 1, lattice, lambda, thetas: vec![theta0] })
    }

    pub fn degree(&self) -> u8 {
        self.degree
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// Exact coefficients of λ on an ordered (n+1)-tuple.
    pub fn lambda(&self, tuple: &[ChartId]) -> Result<Vec<i64>> {
        (self.lambda)(tuple)
    }

    /// Complex value of λ on an ordered (n+1)-tuple.
    pub fn lambda_value(&self, tuple: &[ChartId]) -> Result<Complex64> {
        Ok(self.lattice.value(&self.lambda(tuple)?))
    }

    /// The i-form component θⁱ on an ordered (n−i)-tuple.
    pub fn theta(&self, i: usize, tuple: &[ChartId]) -> Result<Form> {
        let expect = self.degree as usize - i;
        if tuple.len() != expect {
            return Err(Error::DegreeMismatch(format!(
                "θ^{i} of a degree-{} class takes {expect}-tuples, got {}",
                self.degree,
                tuple.len()
            )));
        }
        self.thetas
            .get(i)
            .ok_or_else(|| Error::DegreeMismatch(format!("no θ^{i} component")))?(tuple)
    }

    /// Curvature dθ^{n−1} in the given chart; for a valid cocycle this is a
    /// globally defined n-form.
    pub fn curvature(&self, chart: ChartId) -> Result<Form> {
        Ok(self.theta(self.degree as usize - 1, &[chart])?.d())
    }

    /// Cup product (front face / back face). At most one factor may have a
    /// lattice other than ℤ.
    pub fn cup(&self, other: &DeligneClass) -> Result<DeligneClass> {
        let p = self.degree as usize;
        let q = other.degree as usize;
        let n = p + q;
        if n > 3 {
            return Err(Error::DegreeMismatch(format!(
                "cup of degrees {p} and {q} exceeds degree 3"
            )));
        }
        let self_integral = self.lattice.generators() == [1.0];
        let other_integral = other.lattice.generators() == [1.0];
        let lattice = if other_integral {
            self.lattice.with_twist(n as u32)
        } else if self_integral {
            other.lattice.with_twist(n as u32)
        } else {
            return Err(Error::InvalidArgument(
                "cup product of two classes with non-integral lattices".into(),
            ));
        };

        let (lx, ly) = (self.lambda.clone(), other.lambda.clone());
        let lambda: LambdaFn = Arc::new(move |tuple| {
            if tuple.len() != n + 1 {
                return Err(Error::DegreeMismatch(format!(
                    "degree-{n} λ takes {}-tuples, got {}",
                    n + 1,
                    tuple.len()
                )));
            }
            let xc = lx(&tuple[..=p])?;
            let yc = ly(&tuple[p..])?;
            if other_integral {
                Ok(xc.iter().map(|c| c * yc[0]).collect())
            } else {
                Ok(yc.iter().map(|c| c * xc[0]).collect())
            }
        });

        let mut thetas: Vec<ThetaFn> = Vec::with_capacity(n);
        for i in 0..n {
            let theta: ThetaFn = if i < q {
                // front λ of x times back θⁱ of y
                let x = self.clone();
                let y = other.clone();
                Arc::new(move |tuple| {
                    let front = x.lambda_value(&tuple[..=p])?;
                    Ok(y.theta(i, &tuple[p..])?.scale(front))
                })
            } else {
                // front θ^{i−q} of x wedged with d of y's top form at the
                // last chart of the tuple
                let x = self.clone();
                let y = other.clone();
                Arc::new(move |tuple| {
                    let last = *tuple.last().ok_or_else(|| {
                        Error::DegreeMismatch("empty chart tuple".into())
                    })?;
                    let xf = x.theta(i - q, tuple)?;
                    let dy = y.theta(q - 1, &[last])?.d();
                    Ok(xf.wedge(&dy))
                })
            };
            thetas.push(theta);
        }
        Ok(DeligneClass { degree: n as u8, lattice, lambda, thetas })
    }

    /// Numerically verify the cocycle conditions on every nonempty nerve
    /// intersection, sampling a per_axis × per_axis interior grid.
    pub fn check_cocycle(&self, cover: &GoodCover, per_axis: usize) -> Result<CocycleReport> {
        let n = self.degree as usize;
        let mut residuals = vec![0.0f64; n];
        let mut samples = 0usize;
        for i in 0..n {
            // Condition i lives on (n − i + 1)-tuples.
            for ix in cover.nerve(n - i + 1) {
                for (ls, lt) in ix.sample_points(per_axis) {
                    let p = Point3::surface(ls.rem_euclid(1.0), lt.rem_euclid(1.0));
                    samples += 1;
                    let mut acc = FormValue::zero(i as u8);
                    // δθⁱ: alternating sum over dropped charts.
                    for k in 0..ix.charts.len() {
                        let mut sub = ix.charts.clone();
                        sub.remove(k);
                        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                        let v = self
                            .theta(i, &sub)?
                            .eval(p)
                            .scale(Complex64::new(sign, 0.0));
                        acc = acc.add(v);
                    }
                    let sign = if (n - i) % 2 == 0 { 1.0 } else { -1.0 };
                    let other = if i == 0 {
                        FormValue::F0(self.lambda_value(&ix.charts)? * sign)
                    } else {
                        self.theta(i - 1, &ix.charts)?
                            .d()
                            .eval(p)
                            .scale(Complex64::new(sign, 0.0))
                    };
                    let total = acc.add(other);
                    residuals[i] = residuals[i].max(total.norm());
                }
            }
        }
        let max_residual = residuals.iter().cloned().fold(0.0, f64::max);
        Ok(CocycleReport { residuals, max_residual, samples })
    }

    /// Error if the cocycle check exceeds the tolerance.
    pub fn assert_cocycle(&self, cover: &GoodCover, per_axis: usize, tol: f64) -> Result<()> {
        let report = self.check_cocycle(cover, per_axis)?;
        if report.max_residual > tol {
            return Err(Error::InvalidClass(report.max_residual));
        }
        Ok(())
    }

    /// Integrate a degree-3 cocycle over the triangulated torus by the flag
    /// formula: for each triangle σ² (counterclockwise), each boundary edge
    /// σ¹ with its induced orientation and each edge endpoint σ⁰ with sign
    /// ε (+ terminal, − initial),
    ///
    ///   ∫_T x = Σ_{σ²} ∫_{σ²} θ²_{ι(σ²)}
    ///         + Σ_{σ¹⊂σ²} ∫_{σ¹} θ¹_{ι(σ²)ι(σ¹)}
    ///         + Σ_{σ⁰⊂σ¹⊂σ²} ε θ⁰_{ι(σ²)ι(σ¹)ι(σ⁰)},
    ///
    /// well defined modulo Λ(3).
    pub fn integrate(
        &self,
        mesh: &TorusMesh,
        map: IndexMap,
        order: usize,
    ) -> Result<Complex64> {
        if self.degree != 3 {
            return Err(Error::DegreeMismatch(format!(
                "flag integration needs a degree-3 class, got degree {}",
                self.degree
            )));
        }
        let mut total = Complex64::new(0.0, 0.0);
        for tri in mesh.flags(map) {
            let theta2 = self.theta(2, &[tri.chart])?;
            total += quad::integrate_triangle(
                |s, t| theta2.surface_density(s, t),
                tri.verts[0],
                tri.verts[1],
                tri.verts[2],
                order,
            );
            for edge in &tri.edges {
                let theta1 = self.theta(1, &[tri.chart, edge.chart])?;
                let tangent = [edge.to.0 - edge.from.0, edge.to.1 - edge.from.1, 0.0];
                total += quad::integrate_interval(
                    |u| {
                        let p = Point3::surface(
                            edge.from.0 + u * tangent[0],
                            edge.from.1 + u * tangent[1],
                        );
                        theta1.eval_on_vector(p, tangent)
                    },
                    0.0,
                    1.0,
                    order,
                );
                for v in &edge.verts {
                    let theta0 = self.theta(0, &[tri.chart, edge.chart, v.chart])?;
                    let val = theta0.eval(Point3::surface(v.pos.0, v.pos.1)).scalar();
                    total += val * v.sign as f64;
                }
            }
        }
        Ok(total)
    }
}

/// Per-chart branch of a pure winding exponential e^{2πi(m s + k t)}:
/// θ⁰_a = 2πi(m·lift_s + k·lift_t). Used for synthetic classes in tests and
/// as the meridian/longitude factors of branched logarithms.
pub fn winding_branches(cover: &GoodCover, m: i64, k: i64) -> BTreeMap<ChartId, Form> {
    let mut out = BTreeMap::new();
    for chart in cover.charts() {
        let cover = *cover;
        let eval = move |p: Point3| {
            let (ls, lt) = cover
                .lift(chart, p.s, p.t)
                .unwrap_or_else(|| panic!("point ({}, {}) outside {chart}", p.s, p.t));
            FormValue::F0(TWO_PI_I * (m as f64 * ls + k as f64 * lt))
        };
        let form = Form::new(0, eval).with_d(move |_| {
            FormValue::F1([TWO_PI_I * m as f64, TWO_PI_I * k as f64, Complex64::new(0.0, 0.0)])
        });
        out.insert(chart, form);
    }
    out
}
