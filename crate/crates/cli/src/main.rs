//! Command-line interface: model inspection, local symbols, reciprocity and
//! the full verification battery, with JSON and CSV report output.

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use fds3::catmap::CatMap;
use fds3::functions::{Meromorphic, PointP1};
use fds3::mesh::IndexMap;
use fds3::models::Model;
use fds3::symbols::{self, SymbolOptions};
use fds3::verify::{self, ReciprocityRecord, SymbolRecord};
use num_complex::Complex64;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "fds3",
    about = "Deligne cohomology computations on 3-dimensional foliated dynamical systems",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct NumericOpts {
    /// Mesh refinement (the torus is cut into 18·r² triangles).
    #[arg(long, default_value_t = 1)]
    mesh_refine: u32,
    /// Gauss quadrature order.
    #[arg(long, default_value_t = 16)]
    quad_order: usize,
    /// Tube radius around the orbit; chosen from the divisor clearance when
    /// omitted.
    #[arg(long)]
    eps: Option<f64>,
    /// Use the alternate flag index map.
    #[arg(long)]
    alternate_index_map: bool,
}

impl NumericOpts {
    fn symbol_options(&self) -> SymbolOptions {
        SymbolOptions {
            eps: self.eps,
            refine: self.mesh_refine,
            order: self.quad_order,
            map: if self.alternate_index_map {
                IndexMap::UpperRight
            } else {
                IndexMap::LowerLeft
            },
        }
    }
}

#[derive(Args, Clone)]
struct OutputOpts {
    /// Write a JSON report to this path ("-" for stdout).
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write a CSV report to this path ("-" for stdout).
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in model families.
    Examples,
    /// Show the canonical form, flows, orbits and period group of a model.
    ModelInfo {
        /// product, rotation, t3-linear, t3-cosec or t3-cosec-linear
        name: String,
    },
    /// List closed orbits of a model, or periodic-point counts of a torus
    /// automorphism.
    Orbits {
        /// Model name.
        #[arg(long, conflicts_with = "matrix")]
        model: Option<String>,
        /// Integer matrix a,b,c,d for [[a,b],[c,d]] acting on the 2-torus.
        #[arg(long, value_delimiter = ',')]
        matrix: Option<Vec<i64>>,
        /// Largest period to report for --matrix.
        #[arg(long, default_value_t = 6)]
        max_n: u32,
    },
    /// Local symbols of a pair of functions along the orbits through their
    /// divisors.
    Symbol {
        /// Meromorphic function of z in factored form, e.g. "z*(z-1)/(z+2)^2".
        #[arg(short = 'f')]
        f: String,
        /// Second function.
        #[arg(short = 'g')]
        g: String,
        /// Restrict to the orbit through this point: "re", "re,im" or "inf".
        #[arg(long)]
        point: Option<String>,
        /// Orbit period multiplier (the ω-period of the orbit).
        #[arg(long, default_value_t = 1.0)]
        per: f64,
        #[command(flatten)]
        numeric: NumericOpts,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Verify the reciprocity law: the symbols over all orbits sum to zero
    /// modulo (2πi)³Λ.
    Reciprocity {
        #[arg(short = 'f')]
        f: String,
        #[arg(short = 'g')]
        g: String,
        /// Run on the order-k rotation system instead of the product system
        /// (functions are then given in the base variable w = z^k).
        #[arg(short = 'k', long)]
        rotation: Option<u32>,
        #[command(flatten)]
        numeric: NumericOpts,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Run the full verification battery.
    Verify {
        /// Random sample count for the pointwise model checks.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[command(flatten)]
        numeric: NumericOpts,
        #[command(flatten)]
        output: OutputOpts,
    },
}

fn parse_point(text: &str) -> anyhow::Result<PointP1> {
    let t = text.trim();
    if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
        return Ok(PointP1::Infinity);
    }
    let parts: Vec<&str> = t.split(',').collect();
    let point = match parts.as_slice() {
        [re] => Complex64::new(re.trim().parse()?, 0.0),
        [re, im] => Complex64::new(re.trim().parse()?, im.trim().parse()?),
        _ => bail!("expected \"re\", \"re,im\" or \"inf\", got '{text}'"),
    };
    Ok(PointP1::Finite(point))
}

fn write_json<T: serde::Serialize>(path: &PathBuf, value: &T) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    if path.as_os_str() == "-" {
        println!("{text}");
    } else {
        std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn write_csv<T: serde::Serialize>(path: &PathBuf, rows: &[T]) -> anyhow::Result<()> {
    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        for row in rows {
            w.serialize(row)?;
        }
        w.flush()?;
    }
    if path.as_os_str() == "-" {
        print!("{}", String::from_utf8(buf)?);
    } else {
        std::fs::write(path, buf).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn print_symbol(s: &SymbolRecord) {
    println!(
        "orbit through {:<22} ord(f)={:>2} ord(g)={:>2}  <f,g> = {:+.6e} {:+.6e}i",
        s.point, s.ord_f, s.ord_g, s.flag_re, s.flag_im
    );
    println!(
        "    vs direct formula: residual {:.2e}   vs tame symbol: residual {:.2e}   [{}]",
        s.flag_vs_direct_residual, s.flag_vs_tame_residual, s.verdict
    );
}

fn run_examples() {
    println!("available models:");
    for model in Model::all_default() {
        let gens = model.lattice_generators();
        println!(
            "  {:<18} flows: {:<18} orbits: {:<2} period group generators: {:?}",
            model.name(),
            model.flow_names().join(", "),
            model.orbits().len(),
            gens
        );
    }
}

fn run_model_info(name: &str) -> anyhow::Result<()> {
    let model = Model::by_name(name)?;
    println!("model: {}", model.name());
    println!("  flows: {}", model.flow_names().join(", "));
    println!("  period group generators: {:?}", model.lattice_generators());
    let probe = [0.3, 0.4, 0.25];
    println!("  omega at (0.3, 0.4, 0.25): {:?}", model.omega(probe)?);
    println!("  leaf frame there: {:?}", model.leaf_basis(probe)?);
    let sing = model.singular_distance(probe);
    if sing.is_finite() {
        println!("  singular leaves at theta3 in {{0, 1/2}}");
    }
    if model.orbits().is_empty() {
        println!("  no distinguished closed orbits");
    }
    for orbit in model.orbits() {
        let period = model.period_integral(&orbit, 16)?;
        println!("  orbit {:<12} period integral {:.12}", orbit.label, period);
    }
    for loop_ in model.homology_loops() {
        let period = model.period_integral(&loop_, 16)?;
        println!("  homology loop {:<8} omega-period {:.12}", loop_.label, period);
    }
    Ok(())
}

fn run_orbits(model: Option<String>, matrix: Option<Vec<i64>>, max_n: u32) -> anyhow::Result<()> {
    if let Some(m) = matrix {
        if m.len() != 4 {
            bail!("--matrix needs 4 integers a,b,c,d, got {}", m.len());
        }
        let cat = CatMap::new([[m[0], m[1]], [m[2], m[3]]])?;
        println!("hyperbolic automorphism {:?}:", cat.matrix());
        for n in 1..=max_n {
            println!(
                "  n={n}: {} points of period dividing n, {} orbits of least period n",
                cat.periodic_points(n),
                cat.orbit_count(n)
            );
        }
        return Ok(());
    }
    let name = model.unwrap_or_else(|| "product".into());
    let model = Model::by_name(&name)?;
    if model.orbits().is_empty() {
        println!("{}: no distinguished closed orbits", model.name());
    }
    for orbit in model.orbits() {
        let period = model.period_integral(&orbit, 16)?;
        println!(
            "{} orbit {:<12} starts at {:?}, omega-period {:.12}",
            model.name(),
            orbit.label,
            orbit.point(0.0),
            period
        );
    }
    Ok(())
}

fn run_symbol(
    f: &str,
    g: &str,
    point: Option<String>,
    per: f64,
    numeric: &NumericOpts,
    output: &OutputOpts,
) -> anyhow::Result<bool> {
    let f = Meromorphic::parse(f)?;
    let g = Meromorphic::parse(g)?;
    let opts = numeric.symbol_options();
    let points = match point {
        Some(text) => vec![parse_point(&text)?],
        None => symbols::support_union(&f, &g),
    };
    let mut records = Vec::new();
    let mut all_ok = true;
    for p in &points {
        let s = symbols::local_symbol(&f, &g, p, per, &opts)?;
        let rec = SymbolRecord::from(&s);
        print_symbol(&rec);
        all_ok &= s.flag_vs_direct.residual <= 1e-8 && s.flag_vs_tame.residual <= 1e-8;
        records.push(rec);
    }
    if let Some(path) = &output.json {
        write_json(path, &records)?;
    }
    if let Some(path) = &output.csv {
        write_csv(path, &records)?;
    }
    Ok(all_ok)
}

fn run_reciprocity(
    f: &str,
    g: &str,
    rotation: Option<u32>,
    numeric: &NumericOpts,
    output: &OutputOpts,
) -> anyhow::Result<bool> {
    let f = Meromorphic::parse(f)?;
    let g = Meromorphic::parse(g)?;
    let opts = numeric.symbol_options();
    let r = match rotation {
        Some(k) => symbols::reciprocity_rotation(&f, &g, k, &opts)?,
        None => symbols::reciprocity_product(&f, &g, &opts)?,
    };
    let rec = ReciprocityRecord::from(&r);
    for s in &rec.symbols {
        print_symbol(s);
    }
    println!(
        "sum over orbits: {:+.6e} {:+.6e}i, residual mod (2 pi i)^3 Z: {:.2e}  [{}]",
        rec.total_re, rec.total_im, rec.residual, rec.verdict
    );
    if let Some(path) = &output.json {
        write_json(path, &rec)?;
    }
    if let Some(path) = &output.csv {
        write_csv(path, &rec.symbols)?;
    }
    Ok(rec.passed)
}

fn run_verify(samples: usize, numeric: &NumericOpts, output: &OutputOpts) -> anyhow::Result<bool> {
    let report = verify::full_report(samples, numeric.mesh_refine as usize, numeric.quad_order)?;
    for c in &report.checks {
        println!(
            "[{}] {:<60} measured {:.3e} (tolerance {:.1e})",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.measured,
            c.tolerance
        );
    }
    println!(
        "{} of {} checks passed",
        report.checks.iter().filter(|c| c.passed).count(),
        report.checks.len()
    );
    if let Some(path) = &output.json {
        write_json(path, &report)?;
    }
    if let Some(path) = &output.csv {
        write_csv(path, &report.checks)?;
    }
    Ok(report.passed)
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    let ok = match &cli.command {
        Command::Examples => {
            run_examples();
            true
        }
        Command::ModelInfo { name } => {
            run_model_info(name)?;
            true
        }
        Command::Orbits { model, matrix, max_n } => {
            run_orbits(model.clone(), matrix.clone(), *max_n)?;
            true
        }
        Command::Symbol { f, g, point, per, numeric, output } => {
            run_symbol(f, g, point.clone(), *per, numeric, output)?
        }
        Command::Reciprocity { f, g, rotation, numeric, output } => {
            run_reciprocity(f, g, *rotation, numeric, output)?
        }
        Command::Verify { samples, numeric, output } => run_verify(*samples, numeric, output)?,
    };
    if !ok {
        std::process::exit(1);
    }
    Ok(())
}
