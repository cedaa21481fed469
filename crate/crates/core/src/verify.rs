//! Aggregated verification runs with serializable reports: the library-side
//! engine behind the `verify` command.
//!
//! Every individual verification is a [`Check`] with a measured quantity and
//! a tolerance; a [`Report`] bundles the checks of a full run.

use crate::catmap::CatMap;
use crate::cover::GoodCover;
use crate::deligne::{winding_branches, DeligneClass};
use crate::error::Result;
use crate::forms::Point3;
use crate::functions::Meromorphic;
use crate::lattice::{Lattice, Verdict};
use crate::mesh::{IndexMap, TorusMesh};
use crate::models::Model;
use crate::symbols::{self, LocalSymbol, Reciprocity, SymbolOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::time::{SystemTime, UNIX_EPOCH};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// The measured quantity (residual, count difference, …).
    pub measured: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl Check {
    fn residual(name: impl Into<String>, measured: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed: measured.is_finite() && measured <= tolerance,
            measured,
            tolerance,
            detail: detail.into(),
        }
    }

    fn exact(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            measured: if passed { 0.0 } else { 1.0 },
            tolerance: 0.0,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub generated_at_unix: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(checks: Vec<Check>) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            generated_at_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }
}

/// Flat, CSV-friendly record of one local symbol.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SymbolRecord {
    pub point: String,
    pub per: f64,
    pub eps: f64,
    pub ord_f: i64,
    pub ord_g: i64,
    pub flag_re: f64,
    pub flag_im: f64,
    pub direct_re: f64,
    pub direct_im: f64,
    pub tame_re: f64,
    pub tame_im: f64,
    pub flag_vs_direct_residual: f64,
    pub flag_vs_tame_residual: f64,
    pub verdict: String,
}

impl From<&LocalSymbol> for SymbolRecord {
    fn from(s: &LocalSymbol) -> Self {
        SymbolRecord {
            point: s.point.to_string(),
            per: s.per,
            eps: s.eps,
            ord_f: s.orders.0,
            ord_g: s.orders.1,
            flag_re: s.flag.re,
            flag_im: s.flag.im,
            direct_re: s.direct.re,
            direct_im: s.direct.im,
            tame_re: s.tame.re,
            tame_im: s.tame.im,
            flag_vs_direct_residual: s.flag_vs_direct.residual,
            flag_vs_tame_residual: s.flag_vs_tame.residual,
            verdict: format!("{:?}", s.flag_vs_direct.verdict),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReciprocityRecord {
    pub symbols: Vec<SymbolRecord>,
    pub total_re: f64,
    pub total_im: f64,
    pub residual: f64,
    pub verdict: String,
    pub passed: bool,
}

impl From<&Reciprocity> for ReciprocityRecord {
    fn from(r: &Reciprocity) -> Self {
        ReciprocityRecord {
            symbols: r.symbols.iter().map(SymbolRecord::from).collect(),
            total_re: r.total.re,
            total_im: r.total.im,
            residual: r.reduction.residual,
            verdict: format!("{:?}", r.reduction.verdict),
            passed: r.reduction.verdict == Verdict::Pass,
        }
    }
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Canonical-form identities, orbit periods and period groups for every
/// model family.
pub fn check_models(samples: usize, seed: u64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for model in Model::all_default() {
        let name = model.name();
        let mut flow_res = 0.0f64;
        let mut leaf_res = 0.0f64;
        let mut frob_res = 0.0f64;
        for _ in 0..samples {
            let p = model.sample_point(&mut rng);
            let w = model.omega(p)?;
            for flow in 0..model.flow_names().len() {
                flow_res = flow_res.max((dot(w, model.velocity(flow, p)?) - 1.0).abs());
            }
            for leaf in model.leaf_basis(p)? {
                leaf_res = leaf_res.max(dot(w, leaf).abs());
            }
            frob_res = frob_res.max(model.omega_wedge_d_omega(p)?.abs());
            if let Some((w0, dw0)) = model.frobenius_form(p) {
                frob_res = frob_res.max(dot(w0, dw0).abs());
            }
        }
        checks.push(Check::residual(
            format!("{name}: omega(flow) = 1"),
            flow_res,
            1e-9,
            format!("max over {samples} samples and {} flows", model.flow_names().len()),
        ));
        checks.push(Check::residual(
            format!("{name}: omega annihilates leaves"),
            leaf_res,
            1e-9,
            format!("max over {samples} samples"),
        ));
        checks.push(Check::residual(
            format!("{name}: integrability omega ^ d(omega) = 0"),
            frob_res,
            1e-10,
            format!("max over {samples} samples"),
        ));
        let mut orbit_res = 0.0f64;
        for orbit in model.orbits() {
            orbit_res = orbit_res.max((model.period_integral(&orbit, 16)? - orbit.period).abs());
        }
        checks.push(Check::residual(
            format!("{name}: closed-orbit periods"),
            orbit_res,
            1e-8,
            format!("{} orbits", model.orbits().len()),
        ));
        let mut hom_res = 0.0f64;
        for loop_ in model.homology_loops() {
            hom_res = hom_res.max((model.period_integral(&loop_, 16)? - loop_.period).abs());
        }
        checks.push(Check::residual(
            format!("{name}: period group generators"),
            hom_res,
            1e-8,
            format!("generators {:?}", model.lattice_generators()),
        ));
    }
    Ok(checks)
}

/// Periodic-point counts against the brute-force grid enumeration.
pub fn check_catmap() -> Vec<Check> {
    let mut checks = Vec::new();
    for matrix in [[[2i64, 1], [1, 1]], [[3, 1], [2, 1]]] {
        let m = CatMap::new(matrix).unwrap();
        let mut ok = true;
        let mut detail = String::new();
        for n in 1..=6 {
            let fast = m.periodic_points(n);
            let slow = m.periodic_points_by_enumeration(n);
            if fast != slow {
                ok = false;
            }
            detail.push_str(&format!("n={n}: {fast} "));
        }
        checks.push(Check::exact(
            format!("periodic points of {matrix:?} match enumeration"),
            ok,
            detail.trim().to_string(),
        ));
    }
    checks.push(Check::exact(
        "fixed points of [[3,1],[2,1]]",
        CatMap::new([[3, 1], [2, 1]]).unwrap().periodic_points(1) == 2,
        "expected 2",
    ));
    checks
}

/// Mesh combinatorics and the Čech cocycle conditions of a synthetic triple
/// cup product.
pub fn check_cohomology(refine: usize, order: usize) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let mesh = TorusMesh::new(refine);
    let r2 = refine * refine;
    let counts_ok = mesh.vertex_count() == 9 * r2
        && mesh.edge_count() == 27 * r2
        && mesh.triangle_count() == 18 * r2
        && mesh.euler_characteristic() == 0;
    checks.push(Check::exact(
        format!("mesh counts at refinement {refine}"),
        counts_ok,
        format!(
            "V={} E={} T={} chi={}",
            mesh.vertex_count(),
            mesh.edge_count(),
            mesh.triangle_count(),
            mesh.euler_characteristic()
        ),
    ));
    let flags = mesh.flags(IndexMap::LowerLeft);
    let flag_counts_ok = flags.len() == 18 * r2
        && flags.iter().all(|t| t.edges.len() == 3 && t.edges.iter().all(|e| e.verts.len() == 2));
    checks.push(Check::exact(
        format!("flag counts at refinement {refine}"),
        flag_counts_ok,
        format!("F0={} F1={} F2={}", flags.len(), 3 * flags.len(), 6 * flags.len()),
    ));

    let cover = GoodCover::standard();
    let x = DeligneClass::degree_one(&cover, winding_branches(&cover, 1, 0), Lattice::integers(1))?;
    let y = DeligneClass::degree_one(&cover, winding_branches(&cover, 0, 1), Lattice::integers(1))?;
    let w = DeligneClass::degree_one(&cover, winding_branches(&cover, 1, 0), Lattice::integers(1))?;
    let z = x.cup(&y)?.cup(&w)?;
    for (label, class) in [("degree-1", &x), ("degree-3 cup", &z)] {
        let rep = class.check_cocycle(&cover, 3)?;
        checks.push(Check::residual(
            format!("cocycle conditions, {label}"),
            rep.max_residual,
            1e-9,
            format!("{} samples", rep.samples),
        ));
    }
    let mut curv = 0.0f64;
    for chart in cover.charts() {
        let ((slo, shi), (tlo, thi)) = cover.rect(chart);
        let v = z.curvature(chart)?.eval(Point3::surface(
            (0.5 * (slo + shi)).rem_euclid(1.0),
            (0.5 * (tlo + thi)).rem_euclid(1.0),
        ));
        curv = curv.max(v.norm());
    }
    checks.push(Check::residual("triple-product curvature", curv, 1e-10, "chart centers"));

    let base = z.integrate(&mesh, IndexMap::LowerLeft, order)?;
    let alt = z.integrate(&TorusMesh::new(refine + 1), IndexMap::UpperRight, order)?;
    let red = z.lattice().reduce(alt - base, 1000, 1e-7);
    checks.push(Check::residual(
        "flag integral stability (refinement and index map)",
        red.residual,
        1e-7,
        format!("difference {}", (alt - base).norm()),
    ));
    Ok(checks)
}

/// Exact round trips through lattice reduction, over ℤ and ℤ + √2ℤ.
pub fn check_lattice(samples: usize, seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    for (label, lattice) in [
        ("Z", Lattice::integers(3)),
        ("Z + sqrt(2) Z", Lattice::new(vec![1.0, 2f64.sqrt()], 3).unwrap()),
    ] {
        let mut exact = true;
        let mut worst = 0.0f64;
        for _ in 0..samples {
            let coeffs: Vec<i64> =
                (0..lattice.rank()).map(|_| rng.gen_range(-40i64..=40)).collect();
            let red = lattice.reduce(lattice.value(&coeffs), 200, 1e-9);
            if red.coefficients != coeffs || red.verdict != Verdict::Pass {
                exact = false;
            }
            worst = worst.max(red.residual);
        }
        checks.push(Check::residual(
            format!("lattice round-trip over {label}"),
            worst,
            1e-9,
            format!("{samples} vectors, coefficients recovered exactly: {exact}"),
        ));
        checks.push(Check::exact(
            format!("lattice coefficients exact over {label}"),
            exact,
            format!("{samples} vectors"),
        ));
    }
    checks
}

/// Local symbols on a default battery of function pairs: flag vs direct vs
/// tame agreement and both reciprocity laws.
pub fn check_symbols(opts: &SymbolOptions) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let pairs = [
        ("z", "z-1"),
        ("z^2-1", "z"),
        ("z*(z-3)", "(z-1)/(z+1)"),
        ("z^2*(z-2)/(z-5)", "(z-2)^3/z"),
    ];
    for (fs, gs) in pairs {
        let f = Meromorphic::parse(fs)?;
        let g = Meromorphic::parse(gs)?;
        let mut direct_res = 0.0f64;
        let mut tame_res = 0.0f64;
        let points = symbols::support_union(&f, &g);
        let count = points.len();
        for p in points {
            let s = symbols::local_symbol(&f, &g, &p, 1.0, opts)?;
            direct_res = direct_res.max(s.flag_vs_direct.residual);
            tame_res = tame_res.max(s.flag_vs_tame.residual);
        }
        checks.push(Check::residual(
            format!("symbols of ({fs}, {gs}): flag vs direct"),
            direct_res,
            1e-8,
            format!("{count} orbits"),
        ));
        checks.push(Check::residual(
            format!("symbols of ({fs}, {gs}): flag vs tame"),
            tame_res,
            1e-8,
            format!("{count} orbits"),
        ));
        let r = symbols::reciprocity_product(&f, &g, opts)?;
        checks.push(Check::residual(
            format!("product reciprocity of ({fs}, {gs})"),
            r.reduction.residual,
            1e-6,
            format!("total ({:.3e}, {:.3e})", r.total.re, r.total.im),
        ));
    }
    let f = Meromorphic::parse("(z-1)/(z-2)")?;
    let g = Meromorphic::parse("(z-4)/(z+1)")?;
    let r = symbols::reciprocity_rotation(&f, &g, 3, opts)?;
    checks.push(Check::residual(
        "rotation (k = 3) reciprocity of ((z-1)/(z-2), (z-4)/(z+1))",
        r.reduction.residual,
        1e-6,
        format!("{} orbits of period 3", r.symbols.len()),
    ));
    Ok(checks)
}

/// The full battery with default parameters.
pub fn full_report(samples: usize, refine: usize, order: usize) -> Result<Report> {
    let mut checks = Vec::new();
    checks.extend(check_models(samples, 0)?);
    checks.extend(check_catmap());
    checks.extend(check_cohomology(refine, order)?);
    checks.extend(check_lattice(1000, 1));
    checks.extend(check_symbols(&SymbolOptions {
        refine: refine as u32,
        order,
        ..SymbolOptions::default()
    })?);
    Ok(Report::new(checks))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_report_passes() {
        let report = full_report(200, 1, 16).unwrap();
        for c in &report.checks {
            assert!(c.passed, "{}: measured {} > {} ({})", c.name, c.measured, c.tolerance, c.detail);
        }
        assert!(report.passed);
        assert_eq!(report.schema_version, SCHEMA_VERSION);
    }

    #[test]
    fn report_serializes() {
        let report = Report::new(check_catmap());
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("schema_version"));
        let back: Report = serde_json::from_str(&json).unwrap();
        assert_eq!(back.checks.len(), report.checks.len());
    }
}
