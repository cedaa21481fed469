//! Acceptance suite: one test per top-level acceptance criterion, each
//! printing a single PASS/FAIL line (visible with `--nocapture` or on
//! failure).

use fds3::catmap::CatMap;
use fds3::cover::GoodCover;
use fds3::forms::Point3;
use fds3::functions::Meromorphic;
use fds3::lattice::{Lattice, Verdict};
use fds3::mesh::{IndexMap, TorusMesh};
use fds3::models::Model;
use fds3::symbols::{self, SymbolOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(criterion: u32, label: &str, passed: bool, detail: &str) {
    println!(
        "acceptance {criterion}: [{}] {label} — {detail}",
        if passed { "PASS" } else { "FAIL" }
    );
    assert!(passed, "criterion {criterion} ({label}): {detail}");
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[test]
fn criterion_1_periodic_point_counts() {
    let mut ok = true;
    let mut detail = String::new();
    let standard = CatMap::standard();
    for n in 1..=6 {
        let fast = standard.periodic_points(n);
        let slow = standard.periodic_points_by_enumeration(n);
        ok &= fast == slow;
        detail.push_str(&format!("n={n}:{fast} "));
    }
    let other = CatMap::new([[3, 1], [2, 1]]).unwrap();
    ok &= other.periodic_points(1) == 2;
    ok &= other.periodic_points_by_enumeration(1) == 2;
    detail.push_str("[[3,1],[2,1]] n=1:2");
    report(1, "periodic-point counts vs enumeration", ok, &detail);
}

#[test]
fn criterion_2_canonical_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut flow_res = 0.0f64;
    let mut leaf_res = 0.0f64;
    let mut frob_res = 0.0f64;
    let models = Model::all_default();
    for model in &models {
        for _ in 0..10_000 {
            let p = model.sample_point(&mut rng);
            let w = model.omega(p).unwrap();
            for flow in 0..model.flow_names().len() {
                flow_res = flow_res.max((dot(w, model.velocity(flow, p).unwrap()) - 1.0).abs());
            }
            for leaf in model.leaf_basis(p).unwrap() {
                leaf_res = leaf_res.max(dot(w, leaf).abs());
            }
            frob_res = frob_res.max(model.omega_wedge_d_omega(p).unwrap().abs());
            if let Some((w0, dw0)) = model.frobenius_form(p) {
                frob_res = frob_res.max(dot(w0, dw0).abs());
            }
        }
    }
    let ok = flow_res < 1e-9 && leaf_res < 1e-9 && frob_res < 1e-10;
    report(
        2,
        "canonical-form identities over 10^4 samples per model",
        ok,
        &format!(
            "{} models, max |omega(flow)-1| = {flow_res:.2e}, max |omega(leaf)| = {leaf_res:.2e}, max |omega^d(omega)| = {frob_res:.2e}",
            models.len()
        ),
    );
}

#[test]
fn criterion_3_period_groups() {
    let mut worst = 0.0f64;
    let mut detail = String::new();
    for model in Model::all_default() {
        let mut residual = 0.0f64;
        for curve in model.homology_loops().iter().chain(model.orbits().iter()) {
            residual =
                residual.max((model.period_integral(curve, 16).unwrap() - curve.period).abs());
        }
        detail.push_str(&format!(
            "{}: gens {:?} residual {residual:.1e}; ",
            model.name(),
            model.lattice_generators()
        ));
        worst = worst.max(residual);
    }
    report(3, "period groups from loop integrals", worst < 1e-8, detail.trim_end());
}

#[test]
fn criterion_4_flag_vs_direct_symbols() {
    let opts = SymbolOptions::default();
    let pairs = [
        ("z", "z-1"),
        ("z^2-1", "z"),
        ("z*(z-3)", "(z-1)/(z+1)"),
        ("z^2*(z-2)/(z-5)", "(z-2)^3/z"),
    ];
    let mut cases = 0usize;
    let mut worst = 0.0f64;
    let mut tame_worst = 0.0f64;
    for (fs, gs) in pairs {
        let f = Meromorphic::parse(fs).unwrap();
        let g = Meromorphic::parse(gs).unwrap();
        for p in symbols::support_union(&f, &g) {
            let s = symbols::local_symbol(&f, &g, &p, 1.0, &opts).unwrap();
            worst = worst.max(s.flag_vs_direct.residual);
            tame_worst = tame_worst.max(s.flag_vs_tame.residual);
            cases += 1;
        }
    }
    let ok = cases >= 12 && worst < 1e-8 && tame_worst < 1e-8;
    report(
        4,
        "flag formula vs direct formula vs tame oracle",
        ok,
        &format!("{cases} orbit symbols, max residuals: direct {worst:.2e}, tame {tame_worst:.2e}"),
    );
}

#[test]
fn criterion_5_reciprocity() {
    let opts = SymbolOptions::default();
    let product_pairs = [
        ("z", "z-1"),
        ("z^2-1", "z"),
        ("z-i", "z+i"),
        ("(z-1)/(z+2)", "z*(z-3)"),
        ("z^2*(z-2)", "(z-4)/z"),
        ("2*(z-1)^2/(z+3)", "z-2"),
    ];
    let mut worst = 0.0f64;
    for (fs, gs) in product_pairs {
        let f = Meromorphic::parse(fs).unwrap();
        let g = Meromorphic::parse(gs).unwrap();
        let r = symbols::reciprocity_product(&f, &g, &opts).unwrap();
        assert_eq!(r.reduction.verdict, Verdict::Pass, "({fs}, {gs})");
        worst = worst.max(r.reduction.residual);
    }
    let rotation_pairs = [
        ("(z-1)/(z-2)", "(z-4)/(z+1)"),
        ("(z-1)/(z+1)", "(z-3)/(z-2)"),
        ("3*(z-i)*(z+i)/(z-2)^2", "(z-5)/(z-1)"),
    ];
    let mut rot_worst = 0.0f64;
    for (fs, gs) in rotation_pairs {
        let f = Meromorphic::parse(fs).unwrap();
        let g = Meromorphic::parse(gs).unwrap();
        let r = symbols::reciprocity_rotation(&f, &g, 3, &opts).unwrap();
        assert_eq!(r.reduction.verdict, Verdict::Pass, "rotation ({fs}, {gs})");
        rot_worst = rot_worst.max(r.reduction.residual);
    }
    let ok = worst < 1e-6 && rot_worst < 1e-6;
    report(
        5,
        "reciprocity on product and rotation systems",
        ok,
        &format!(
            "{} product pairs (max residual {worst:.2e}), {} rotation pairs at k = 3 (max residual {rot_worst:.2e})",
            product_pairs.len(),
            rotation_pairs.len()
        ),
    );
}

#[test]
fn criterion_6_stability_and_curvature() {
    let f = Meromorphic::parse("z*(z-3)").unwrap();
    let g = Meromorphic::parse("(z-1)/(z+1)").unwrap();
    let p = fds3::functions::PointP1::Finite(num_complex::Complex64::new(1.0, 0.0));
    let base_opts = SymbolOptions { eps: Some(0.12), ..SymbolOptions::default() };
    let base = symbols::local_symbol(&f, &g, &p, 1.0, &base_opts).unwrap();
    let lattice = Lattice::integers(3);
    let mut worst = 0.0f64;
    for variant in [
        SymbolOptions { eps: Some(0.06), ..base_opts.clone() },
        SymbolOptions { refine: 2, ..base_opts.clone() },
        SymbolOptions { map: IndexMap::UpperRight, ..base_opts.clone() },
    ] {
        let other = symbols::local_symbol(&f, &g, &p, 1.0, &variant).unwrap();
        let red = lattice.reduce(other.flag - base.flag, 1000, 1e-7);
        worst = worst.max(red.residual);
    }

    let cover = GoodCover::standard();
    let class = symbols::tube_class(&cover, &f, &g, &p, 1.0, 0.12).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut curv = 0.0f64;
    let charts = cover.charts();
    for _ in 0..1000 {
        let chart = charts[rng.gen_range(0..charts.len())];
        let ((slo, shi), (tlo, thi)) = cover.rect(chart);
        let pt = Point3::new(
            rng.gen_range(slo..shi).rem_euclid(1.0),
            rng.gen_range(tlo..thi).rem_euclid(1.0),
            rng.gen_range(-0.02..0.02),
        );
        curv = curv.max(class.curvature(chart).unwrap().eval(pt).norm());
    }
    let ok = worst < 1e-7 && curv < 1e-10;
    report(
        6,
        "tube-radius/mesh/index-map stability and flat curvature",
        ok,
        &format!("max stability residual {worst:.2e}, max |curvature| over 10^3 samples {curv:.2e}"),
    );
}

#[test]
fn criterion_7_cocycles_and_mesh() {
    let cover = GoodCover::standard();
    let f = Meromorphic::parse("z*(z-2)").unwrap();
    let g = Meromorphic::parse("(z-2)/z").unwrap();
    let p = fds3::functions::PointP1::Finite(num_complex::Complex64::new(0.0, 0.0));
    let class = symbols::tube_class(&cover, &f, &g, &p, 1.0, 0.1).unwrap();
    let rep = class.check_cocycle(&cover, 3).unwrap();

    let mesh = TorusMesh::new(1);
    let flags = mesh.flags(IndexMap::LowerLeft);
    let f1: usize = flags.iter().map(|t| t.edges.len()).sum();
    let f2: usize = flags.iter().map(|t| t.edges.iter().map(|e| e.verts.len()).sum::<usize>()).sum();
    let counts_ok =
        flags.len() == 18 && f1 == 54 && f2 == 108 && mesh.euler_characteristic() == 0;
    let ok = rep.max_residual < 1e-9 && counts_ok;
    report(
        7,
        "cocycle conditions and flag combinatorics",
        ok,
        &format!(
            "max cocycle residual {:.2e} over {} samples; flags {}/{}/{}; chi = {}",
            rep.max_residual,
            rep.samples,
            flags.len(),
            f1,
            f2,
            mesh.euler_characteristic()
        ),
    );
}

#[test]
fn criterion_8_lattice_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut ok = true;
    let mut worst = 0.0f64;
    for lattice in [
        Lattice::integers(3),
        Lattice::new(vec![1.0, 2f64.sqrt()], 3).unwrap(),
    ] {
        for _ in 0..1000 {
            let coeffs: Vec<i64> =
                (0..lattice.rank()).map(|_| rng.gen_range(-40i64..=40)).collect();
            let red = lattice.reduce(lattice.value(&coeffs), 200, 1e-9);
            ok &= red.coefficients == coeffs && red.verdict == Verdict::Pass;
            worst = worst.max(red.residual);
        }
    }
    ok &= worst < 1e-9;
    report(
        8,
        "lattice reduction round trips",
        ok,
        &format!("2 x 10^3 vectors over Z and Z + sqrt(2) Z, max residual {worst:.2e}"),
    );
}
