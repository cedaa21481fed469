//! The model families of foliated dynamical systems on 3-manifolds used by
//! the verification suite, each with its canonical 1-form ω (normalized by
//! ω|_{TF} = 0, ω(flow) = 1), leaf tangent frame, one or two flows, closed
//! orbits, and period group.
//!
//! * `product` — Σ × S¹ with the bundle foliation and vertical flow;
//!   ω = dθ, Λ = ℤ.
//! * `rotation` — mapping torus of the order-k rotation of ℂ; the generic
//!   orbit closes after k turns, the central one after 1; ω = dθ, Λ = ℤ.
//! * `t3-linear` — T³ with the dense linear foliation of slopes
//!   (ρ_m, ρ_l); ω = ρ_m dθ₁ + ρ_l dθ₂ + dθ₃, Λ = ℤ + ρ_mℤ + ρ_lℤ. The
//!   second flow bends by leaf-tangent fields and leaves exactly four
//!   closed orbits, over (θ₁, θ₂) ∈ {0, ½}².
//! * `t3-cosec` — T³ foliated by horizontal tori with two non-transverse
//!   compact leaves at θ₃ ∈ {0, ½}; ω = cosec(2πθ₃)dθ₃ on the complement,
//!   Λ = {0}.
//! * `t3-cosec-linear` — the integrable kernel of
//!   ω₀ = sin(2πθ₃)(dθ₁ + ρdθ₂) + dθ₃;
//!   ω = dθ₁ + ρdθ₂ + cosec(2πθ₃)dθ₃, Λ = ℤ + ρℤ, four closed orbits of
//!   the bent flow over (θ₂, θ₃) ∈ {0, ½} × {¼, ¾}.

use crate::error::{Error, Result};
use crate::quad;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

/// Minimum allowed distance from the singular leaves θ₃ ∈ {0, ½} when
/// evaluating the cosecant forms.
pub const SINGULAR_MARGIN: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ModelKind {
    Product,
    Rotation { k: u32 },
    T3Linear { rho_m: f64, rho_l: f64 },
    Cosec,
    CosecLinear { rho: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    kind: ModelKind,
}

/// A closed curve with an expected ω-period, parametrized over [0, 1].
#[derive(Clone)]
pub struct ModelCurve {
    pub label: String,
    pub period: f64,
    point: Arc<dyn Fn(f64) -> [f64; 3] + Send + Sync>,
    velocity: Arc<dyn Fn(f64) -> [f64; 3] + Send + Sync>,
}

impl ModelCurve {
    fn circle(label: &str, axis: usize, base: [f64; 3], period: f64) -> Self {
        let velocity = {
            let mut v = [0.0; 3];
            v[axis] = 1.0;
            v
        };
        ModelCurve {
            label: label.to_string(),
            period,
            point: Arc::new(move |t| {
                let mut p = base;
                p[axis] = (base[axis] + t).rem_euclid(1.0);
                p
            }),
            velocity: Arc::new(move |_| velocity),
        }
    }

    pub fn point(&self, t: f64) -> [f64; 3] {
        (self.point)(t)
    }

    pub fn velocity(&self, t: f64) -> [f64; 3] {
        (self.velocity)(t)
    }
}

impl std::fmt::Debug for ModelCurve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ModelCurve")
            .field("label", &self.label)
            .field("period", &self.period)
            .finish()
    }
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn csc(x: f64) -> f64 {
    1.0 / x.sin()
}

impl Model {
    pub fn product() -> Self {
        Self { kind: ModelKind::Product }
    }

    pub fn rotation(k: u32) -> Result<Self> {
        if k < 2 {
            return Err(Error::DegenerateParameters(format!(
                "rotation order must be at least 2, got {k}"
            )));
        }
        Ok(Self { kind: ModelKind::Rotation { k } })
    }

    pub fn t3_linear(rho_m: f64, rho_l: f64) -> Result<Self> {
        if rho_m == 0.0 || rho_l == 0.0 {
            return Err(Error::DegenerateParameters(
                "linear foliation slopes must be nonzero".into(),
            ));
        }
        Ok(Self { kind: ModelKind::T3Linear { rho_m, rho_l } })
    }

    pub fn cosec() -> Self {
        Self { kind: ModelKind::Cosec }
    }

    pub fn cosec_linear(rho: f64) -> Result<Self> {
        if rho == 0.0 {
            return Err(Error::DegenerateParameters("slope must be nonzero".into()));
        }
        Ok(Self { kind: ModelKind::CosecLinear { rho } })
    }

    /// One representative of each family with default parameters
    /// (k = 3, ρ_m = √2, ρ_l = √3, ρ = √2).
    pub fn all_default() -> Vec<Model> {
        vec![
            Model::product(),
            Model::rotation(3).unwrap(),
            Model::t3_linear(2f64.sqrt(), 3f64.sqrt()).unwrap(),
            Model::cosec(),
            Model::cosec_linear(2f64.sqrt()).unwrap(),
        ]
    }

    pub fn by_name(name: &str) -> Result<Model> {
        match name {
            "product" => Ok(Model::product()),
            "rotation" => Model::rotation(3),
            "t3-linear" => Model::t3_linear(2f64.sqrt(), 3f64.sqrt()),
            "t3-cosec" => Ok(Model::cosec()),
            "t3-cosec-linear" => Model::cosec_linear(2f64.sqrt()),
            other => Err(Error::InvalidArgument(format!(
                "unknown model '{other}' (expected product, rotation, t3-linear, t3-cosec or t3-cosec-linear)"
            ))),
        }
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            ModelKind::Product => "product",
            ModelKind::Rotation { .. } => "rotation",
            ModelKind::T3Linear { .. } => "t3-linear",
            ModelKind::Cosec => "t3-cosec",
            ModelKind::CosecLinear { .. } => "t3-cosec-linear",
        }
    }

    fn has_singular_leaves(&self) -> bool {
        matches!(self.kind, ModelKind::Cosec | ModelKind::CosecLinear { .. })
    }

    /// Toroidal distance to the singular leaves θ₃ ∈ {0, ½}; infinite for
    /// the models without them.
    pub fn singular_distance(&self, p: [f64; 3]) -> f64 {
        if !self.has_singular_leaves() {
            return f64::INFINITY;
        }
        let x = (2.0 * p[2]).rem_euclid(1.0);
        0.5 * x.min(1.0 - x)
    }

    fn guard(&self, p: [f64; 3]) -> Result<()> {
        if self.singular_distance(p) < SINGULAR_MARGIN {
            return Err(Error::SingularLocus(p[2]));
        }
        Ok(())
    }

    /// Coefficients (a₁, a₂, a₃) of the canonical 1-form ω = Σ aᵢ dθᵢ.
    pub fn omega(&self, p: [f64; 3]) -> Result<[f64; 3]> {
        self.guard(p)?;
        Ok(match self.kind {
            ModelKind::Product | ModelKind::Rotation { .. } => [0.0, 0.0, 1.0],
            ModelKind::T3Linear { rho_m, rho_l } => [rho_m, rho_l, 1.0],
            ModelKind::Cosec => [0.0, 0.0, csc(2.0 * PI * p[2])],
            ModelKind::CosecLinear { rho } => [1.0, rho, csc(2.0 * PI * p[2])],
        })
    }

    /// dω in the cyclic 2-form basis (dθ₂∧dθ₃, dθ₃∧dθ₁, dθ₁∧dθ₂).
    /// Every family's canonical form is closed, and structurally so: each
    /// coefficient aᵢ depends only on θᵢ.
    pub fn d_omega(&self, p: [f64; 3]) -> Result<[f64; 3]> {
        self.guard(p)?;
        Ok([0.0, 0.0, 0.0])
    }

    /// ω ∧ dω, the integrability obstruction, as a coefficient of the
    /// volume form.
    pub fn omega_wedge_d_omega(&self, p: [f64; 3]) -> Result<f64> {
        let w = self.omega(p)?;
        let dw = self.d_omega(p)?;
        Ok(dot(w, dw))
    }

    /// The defining (non-normalized) integrable form ω₀ and its analytic
    /// dω₀ for the family where they differ from ω; `None` when ω₀ = ω.
    pub fn frobenius_form(&self, p: [f64; 3]) -> Option<([f64; 3], [f64; 3])> {
        match self.kind {
            ModelKind::CosecLinear { rho } => {
                let s = (2.0 * PI * p[2]).sin();
                let c = 2.0 * PI * (2.0 * PI * p[2]).cos();
                // ω₀ = sin(2πθ₃)(dθ₁ + ρ dθ₂) + dθ₃
                // dω₀ = 2π cos(2πθ₃) dθ₃ ∧ (dθ₁ + ρ dθ₂)
                //     = 2π cos(2πθ₃) (−ρ dθ₂∧dθ₃·0 …)
                // in the cyclic basis: dθ₃∧dθ₁ has coefficient c,
                // dθ₂∧dθ₃ gets −cρ from ρ dθ₃∧dθ₂.
                Some(([s, rho * s, 1.0], [-c * rho, c, 0.0]))
            }
            _ => None,
        }
    }

    /// A frame of the leaf tangent plane at p.
    pub fn leaf_basis(&self, p: [f64; 3]) -> Result<[[f64; 3]; 2]> {
        self.guard(p)?;
        Ok(match self.kind {
            ModelKind::Product | ModelKind::Rotation { .. } | ModelKind::Cosec => {
                [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]
            }
            ModelKind::T3Linear { rho_m, rho_l } => {
                [[1.0, 0.0, -rho_m], [0.0, 1.0, -rho_l]]
            }
            ModelKind::CosecLinear { rho } => {
                [[-rho, 1.0, 0.0], [-1.0, 0.0, (2.0 * PI * p[2]).sin()]]
            }
        })
    }

    /// Names of the available flows; index 0 is the defining flow, index 1
    /// (when present) differs from it by a leaf-tangent field and therefore
    /// has the same canonical form.
    pub fn flow_names(&self) -> Vec<&'static str> {
        match self.kind {
            ModelKind::Cosec => vec!["phi", "phi-drift"],
            _ => vec!["phi1", "phi2"],
        }
    }

    /// Velocity field of the given flow.
    pub fn velocity(&self, flow: usize, p: [f64; 3]) -> Result<[f64; 3]> {
        self.guard(p)?;
        let [t1, t2, t3] = p;
        let v = match (self.kind, flow) {
            (ModelKind::Product | ModelKind::Rotation { .. }, 0) => [0.0, 0.0, 1.0],
            // vertical flow bent by a leaf-tangent drift
            (ModelKind::Product | ModelKind::Rotation { .. }, 1) => {
                [(2.0 * PI * t3).sin(), (2.0 * PI * t3).cos(), 1.0]
            }
            (ModelKind::T3Linear { .. }, 0) => [0.0, 0.0, 1.0],
            (ModelKind::T3Linear { rho_m, rho_l }, 1) => {
                let (s1, s2) = ((2.0 * PI * t1).sin(), (2.0 * PI * t2).sin());
                [s1, s2, 1.0 - rho_m * s1 - rho_l * s2]
            }
            (ModelKind::Cosec, 0) => {
                [(2.0 * PI * t3).cos(), 0.0, (2.0 * PI * t3).sin()]
            }
            (ModelKind::Cosec, 1) => {
                // add a leaf-tangent drift; ω only sees the dθ₃ component
                [(2.0 * PI * t3).cos() + (2.0 * PI * t1).sin(), (2.0 * PI * t2).sin(),
                 (2.0 * PI * t3).sin()]
            }
            (ModelKind::CosecLinear { .. }, 0) => [1.0, 0.0, 0.0],
            (ModelKind::CosecLinear { rho }, 1) => {
                let s2 = (2.0 * PI * t2).sin();
                let c3 = (2.0 * PI * t3).cos();
                [1.0 - rho * s2 - c3, s2, 0.5 * (4.0 * PI * t3).sin()]
            }
            (_, other) => {
                return Err(Error::InvalidArgument(format!("no flow with index {other}")))
            }
        };
        Ok(v)
    }

    /// The distinguished closed orbits of the (second, where present) flow.
    pub fn orbits(&self) -> Vec<ModelCurve> {
        match self.kind {
            ModelKind::Product => vec![
                ModelCurve::circle("orbit(0.3,0.4)", 2, [0.3, 0.4, 0.0], 1.0),
                ModelCurve::circle("orbit(0.7,0.1)", 2, [0.7, 0.1, 0.0], 1.0),
            ],
            ModelKind::Rotation { k } => {
                let k = k as f64;
                vec![
                    ModelCurve::circle("central", 2, [0.0, 0.0, 0.0], 1.0),
                    // generic orbit: k turns around the fiber direction
                    ModelCurve {
                        label: "generic".into(),
                        period: k,
                        point: Arc::new(move |t| {
                            let ang = 2.0 * PI * (k * t).floor() / k;
                            [0.3 * ang.cos(), 0.3 * ang.sin(), (k * t).rem_euclid(1.0)]
                        }),
                        velocity: Arc::new(move |_| [0.0, 0.0, k]),
                    },
                ]
            }
            ModelKind::T3Linear { .. } => [
                ("gamma1", [0.0, 0.0]),
                ("gamma2", [0.5, 0.0]),
                ("gamma2'", [0.0, 0.5]),
                ("gamma3", [0.5, 0.5]),
            ]
            .into_iter()
            .map(|(l, [a, b])| ModelCurve::circle(l, 2, [a, b, 0.0], 1.0))
            .collect(),
            ModelKind::Cosec => Vec::new(),
            ModelKind::CosecLinear { .. } => [
                ("gamma1", [0.0, 0.25]),
                ("gamma2", [0.0, 0.75]),
                ("gamma3", [0.5, 0.25]),
                ("gamma4", [0.5, 0.75]),
            ]
            .into_iter()
            .map(|(l, [b, c])| ModelCurve::circle(l, 0, [0.0, b, c], 1.0))
            .collect(),
        }
    }

    /// Closed loops generating H₁ of (a component of) the regular part,
    /// with their ω-periods: the values generating the period group.
    pub fn homology_loops(&self) -> Vec<ModelCurve> {
        match self.kind {
            ModelKind::Product | ModelKind::Rotation { .. } => {
                vec![ModelCurve::circle("fiber", 2, [0.3, 0.4, 0.0], 1.0)]
            }
            ModelKind::T3Linear { rho_m, rho_l } => vec![
                ModelCurve::circle("theta1", 0, [0.0, 0.0, 0.0], rho_m),
                ModelCurve::circle("theta2", 1, [0.0, 0.0, 0.0], rho_l),
                ModelCurve::circle("theta3", 2, [0.0, 0.0, 0.0], 1.0),
            ],
            ModelKind::Cosec => vec![
                ModelCurve::circle("theta1", 0, [0.0, 0.0, 0.25], 0.0),
                ModelCurve::circle("theta2", 1, [0.0, 0.0, 0.25], 0.0),
            ],
            ModelKind::CosecLinear { rho } => vec![
                ModelCurve::circle("theta1", 0, [0.0, 0.0, 0.25], 1.0),
                ModelCurve::circle("theta2", 1, [0.0, 0.0, 0.25], rho),
            ],
        }
    }

    /// Generators of the period group Λ (empty for the trivial group).
    pub fn lattice_generators(&self) -> Vec<f64> {
        match self.kind {
            ModelKind::Product | ModelKind::Rotation { .. } => vec![1.0],
            ModelKind::T3Linear { rho_m, rho_l } => vec![1.0, rho_m, rho_l],
            ModelKind::Cosec => Vec::new(),
            ModelKind::CosecLinear { rho } => vec![1.0, rho],
        }
    }

    /// ∮_γ ω by quadrature.
    pub fn period_integral(&self, curve: &ModelCurve, order: usize) -> Result<f64> {
        let err = std::cell::Cell::new(None);
        let val = quad::integrate_interval_panels(
            |t| {
                let p = curve.point(t);
                match self.omega(p) {
                    Ok(w) => Complex64::new(dot(w, curve.velocity(t)), 0.0),
                    Err(e) => {
                        err.set(Some(e));
                        Complex64::new(f64::NAN, 0.0)
                    }
                }
            },
            0.0,
            1.0,
            order,
            4,
        );
        match err.into_inner() {
            Some(e) => Err(e),
            None => Ok(val.re),
        }
    }

    /// A uniform random point avoiding the singular margin.
    pub fn sample_point<R: Rng>(&self, rng: &mut R) -> [f64; 3] {
        loop {
            let p = [rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>()];
            if self.singular_distance(p) >= 2.0 * SINGULAR_MARGIN {
                return p;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn canonical_form_identities_on_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for model in Model::all_default() {
            for _ in 0..500 {
                let p = model.sample_point(&mut rng);
                let w = model.omega(p).unwrap();
                for (f, _) in model.flow_names().iter().enumerate() {
                    let v = model.velocity(f, p).unwrap();
                    assert_abs_diff_eq!(dot(w, v), 1.0, epsilon = 1e-12);
                }
                for leaf in model.leaf_basis(p).unwrap() {
                    assert!(dot(w, leaf).abs() < 1e-12, "{}: ω(leaf) ≠ 0", model.name());
                }
                assert_eq!(model.d_omega(p).unwrap(), [0.0, 0.0, 0.0]);
                assert_eq!(model.omega_wedge_d_omega(p).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn frobenius_form_is_integrable_and_annihilates_leaves() {
        let model = Model::cosec_linear(2f64.sqrt()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..500 {
            let p = model.sample_point(&mut rng);
            let (w0, dw0) = model.frobenius_form(p).unwrap();
            // ω₀ ∧ dω₀ = 0
            assert!(dot(w0, dw0).abs() < 1e-12);
            for leaf in model.leaf_basis(p).unwrap() {
                assert!(dot(w0, leaf).abs() < 1e-12);
            }
            // dω₀ against finite differences of ω₀
            let h = 1e-6;
            let mut jac = [[0.0; 3]; 3];
            for a in 0..3 {
                let mut hi = p;
                let mut lo = p;
                hi[a] += h;
                lo[a] -= h;
                let whi = model.frobenius_form(hi).unwrap().0;
                let wlo = model.frobenius_form(lo).unwrap().0;
                for b in 0..3 {
                    jac[a][b] = (whi[b] - wlo[b]) / (2.0 * h);
                }
            }
            let fd = [
                jac[1][2] - jac[2][1],
                jac[2][0] - jac[0][2],
                jac[0][1] - jac[1][0],
            ];
            for k in 0..3 {
                assert_abs_diff_eq!(fd[k], dw0[k], epsilon = 1e-5);
            }
        }
    }

    #[test]
    fn orbit_periods() {
        for model in Model::all_default() {
            for orbit in model.orbits() {
                let got = model.period_integral(&orbit, 16).unwrap();
                assert_abs_diff_eq!(got, orbit.period, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn homology_periods_generate_lattice() {
        for model in Model::all_default() {
            let periods: Vec<f64> = model
                .homology_loops()
                .iter()
                .map(|c| model.period_integral(c, 16).unwrap())
                .collect();
            for (got, want) in periods.iter().zip(
                model.homology_loops().iter().map(|c| c.period),
            ) {
                assert_abs_diff_eq!(*got, want, epsilon = 1e-10);
            }
            // the nonzero expected periods are exactly the declared lattice
            // generators
            let nonzero: Vec<f64> =
                periods.iter().cloned().filter(|p| p.abs() > 1e-12).collect();
            let mut gens = model.lattice_generators();
            let mut sorted = nonzero.clone();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            gens.sort_by(|a, b| a.partial_cmp(b).unwrap());
            assert_eq!(sorted.len(), gens.len(), "{}", model.name());
            for (a, b) in sorted.iter().zip(&gens) {
                assert_abs_diff_eq!(*a, *b, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn singular_locus_guarded() {
        let model = Model::cosec();
        assert!(matches!(
            model.omega([0.1, 0.2, 0.0]),
            Err(Error::SingularLocus(_))
        ));
        assert!(matches!(
            model.velocity(0, [0.1, 0.2, 0.5000001]),
            Err(Error::SingularLocus(_))
        ));
        assert!(model.omega([0.1, 0.2, 0.25]).is_ok());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let p = model.sample_point(&mut rng);
            assert!(model.singular_distance(p) >= SINGULAR_MARGIN);
        }
    }

    #[test]
    fn flows_differ_by_leaf_tangent_fields() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for model in Model::all_default() {
            if model.flow_names().len() < 2 {
                continue;
            }
            for _ in 0..100 {
                let p = model.sample_point(&mut rng);
                let v0 = model.velocity(0, p).unwrap();
                let v1 = model.velocity(1, p).unwrap();
                let diff = [v1[0] - v0[0], v1[1] - v0[1], v1[2] - v0[2]];
                let w = model.omega(p).unwrap();
                assert!(dot(w, diff).abs() < 1e-12, "{}", model.name());
            }
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(Model::rotation(1).is_err());
        assert!(Model::t3_linear(0.0, 1.0).is_err());
        assert!(Model::cosec_linear(0.0).is_err());
        assert!(Model::by_name("nope").is_err());
        assert_eq!(Model::by_name("t3-cosec").unwrap().name(), "t3-cosec");
    }
}
