use std::fmt::Write as _;
use std::fs;

use affine_qe::catalog::{self, crosscheck, random_type_a, random_type_b, Family, Model};
use affine_qe::expr::{format_rational, integer, Expr};
use affine_qe::extension::{deformed_extension, extension_identities_residuals, qe_potential, quasi_einstein_residual};
use affine_qe::geometry::AffineManifold;
use affine_qe::par::Execution;
use affine_qe::projective::{
    deform, geodesic_straightness, grid_around, strong_flatness_test, FlatChart, ProjectiveChange,
};
use affine_qe::qe_solver::solution_dimension;
use affine_qe::verdict::Verdict;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::input::{self, InputError, Result};
use crate::{Cli, Command, Mode};

pub enum Outcome {
    Ok,
    Violation,
}

impl Outcome {
    fn from_ok(ok: bool) -> Self {
        if ok {
            Self::Ok
        } else {
            Self::Violation
        }
    }
}

fn emit(cli: &Cli, report: &Value, table: &str) -> Result<()> {
    let text = serde_json::to_string_pretty(report).expect("report serializes");
    match &cli.json {
        Some(p) if p.as_os_str() == "-" => println!("{text}"),
        Some(p) => {
            print!("{table}");
            fs::write(p, text + "\n").map_err(|source| InputError::Io { path: p.display().to_string(), source })?;
        }
        None => print!("{table}"),
    }
    Ok(())
}

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Holds => "holds",
        Verdict::Fails => "fails",
        Verdict::HoldsNumerically => "holds-numerically",
    }
}

fn map_lines(out: &mut String, title: &str, map: &std::collections::BTreeMap<String, String>) {
    let _ = writeln!(out, "{title}:");
    if map.is_empty() {
        out.push_str("  0\n");
    }
    for (k, v) in map {
        let _ = writeln!(out, "  [{k}] {v}");
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Curvature { manifold } => curvature(cli, &input::load_manifold(manifold)?),
        Command::QeDim { manifold, mu, basepoint, mode } => {
            qe_dim(cli, &input::load_manifold(manifold)?, mu, basepoint.as_deref(), *mode)
        }
        Command::Classify { family, params, mu, basepoint } => classify(cli, family, params, mu, basepoint.as_deref()),
        Command::Sweep { family, mu, n, params, sequential } => sweep(cli, family, mu, *n, params, *sequential),
        Command::Deform { manifold, omega, potential } => {
            deform_cmd(cli, &input::load_manifold(manifold)?, omega.as_deref(), potential.as_deref())
        }
        Command::Flatten { manifold, basepoint, grid, geodesics } => {
            flatten(cli, &input::load_manifold(manifold)?, basepoint.as_deref(), *grid, *geodesics)
        }
        Command::Extend { manifold, phi, f, mu } => {
            extend(cli, &input::load_manifold(manifold)?, phi, f.as_deref(), mu.as_deref())
        }
        Command::Verify { manifold, mu, f } => verify(cli, &input::load_manifold(manifold)?, mu, f),
    }
}

fn curvature(cli: &Cli, m: &AffineManifold) -> Result<Outcome> {
    let names = m.coords();
    let parts = m.ricci();
    let flat = m.is_flat();
    let symmetric = parts.alt.is_zero();
    let report = json!({
        "dim": m.dim(),
        "christoffel": m.to_doc().christoffel,
        "curvature": m.curvature().to_map(names),
        "ricci": parts.rho.to_map(names),
        "ricci_sym": parts.sym.to_map(names),
        "ricci_alt": parts.alt.to_map(names),
        "flat": verdict_str(flat),
        "ricci_symmetric": verdict_str(symmetric),
    });
    let mut t = String::new();
    map_lines(&mut t, "ricci", &parts.rho.to_map(names));
    map_lines(&mut t, "ricci (alternating part)", &parts.alt.to_map(names));
    let _ = writeln!(t, "flat: {}", verdict_str(flat));
    emit(cli, &report, &t)?;
    Ok(Outcome::Ok)
}

fn qe_dim(cli: &Cli, m: &AffineManifold, mu: &[String], basepoint: Option<&str>, mode: Mode) -> Result<Outcome> {
    let mus = input::mu_list(mu)?;
    let p = input::basepoint(m, basepoint, cli.seed, mode)?;
    let mut reports = Vec::new();
    let mut t = String::new();
    let mut ok = true;
    for mu in &mus {
        let space = solution_dimension(m, mu, &p)?;
        ok &= space.stabilized;
        let _ = writeln!(
            t,
            "mu = {:>6}  dim = {}  rank history {:?}{}",
            format_rational(mu),
            space.dim,
            space.rank_history,
            if space.stabilized { "" } else { "  (depth cap reached)" }
        );
        reports.push(space.report_json());
    }
    let report = if reports.len() == 1 { reports.pop().expect("one report") } else { Value::Array(reports) };
    emit(cli, &report, &t)?;
    Ok(Outcome::from_ok(ok))
}

fn build_model(family: &str, params: &str) -> Result<Model> {
    let family = Family::parse(family)?;
    Ok(family.build(&catalog::parse_params(params)?)?)
}

fn classify(cli: &Cli, family: &str, params: &str, mu: &[String], basepoint: Option<&str>) -> Result<Outcome> {
    let model = build_model(family, params)?;
    let manifold = model.manifold();
    let p = match basepoint {
        Some(_) => input::basepoint(&manifold, basepoint, cli.seed, Mode::Exact)?,
        None => model.default_basepoint(),
    };
    let mut rows = Vec::new();
    let mut t = String::new();
    let mut ok = true;
    let _ = writeln!(t, "{:>8}  {:>11}  {:>8}  agree", "mu", "predicted", "computed");
    for mu in input::mu_list(mu)? {
        let r = crosscheck(&model, &mu, &p)?;
        ok &= r.agree != Some(false) && r.stabilized;
        let agree = r.agree.map_or("-", |a| if a { "yes" } else { "NO" });
        let _ = writeln!(t, "{:>8}  {:>11}  {:>8}  {agree}", format_rational(&mu), r.predicted.to_string(), r.computed);
        let mut row = serde_json::to_value(&r).expect("crosscheck serializes");
        row["mu"] = json!(format_rational(&mu));
        rows.push(row);
    }
    let report = json!({ "model": model.describe(), "rows": rows });
    emit(cli, &report, &t)?;
    Ok(Outcome::from_ok(ok))
}

fn sweep(
    cli: &Cli,
    family: &str,
    mu: &[String],
    n: Option<usize>,
    params: &[String],
    sequential: bool,
) -> Result<Outcome> {
    let fam = Family::parse(family)?;
    let mus = input::mu_list(mu)?;
    let models: Vec<Model> = match (fam, n, params.is_empty()) {
        (Family::TypeA | Family::TypeB, Some(n), true) => {
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let draw = if fam == Family::TypeA { random_type_a::<ChaCha8Rng> } else { random_type_b::<ChaCha8Rng> };
            (0..n).map(|_| draw(&mut rng)).collect()
        }
        (_, None, false) => params.iter().map(|p| build_model(family, p)).collect::<Result<_>>()?,
        (_, None, true) if fam.param_count() == 0 => vec![fam.build(&[])?],
        _ => return Err(InputError::Usage("give either --n (typeA/typeB) or one --params per cell".into())),
    };
    let exec = if sequential { Execution::Sequential } else { Execution::default() };
    let report = catalog::sweep(&models, &mus, exec);
    let mut t = String::new();
    let _ = writeln!(t, "{:<40}  {:>6}  {:>4}  predicted", "params", "mu", "dim");
    for row in &report.rows {
        let dim = row.dim.map_or("err".to_string(), |d| d.to_string());
        let _ = writeln!(t, "{:<40}  {:>6}  {:>4}  {}", row.model.params.join(","), row.mu, dim, row.predicted);
    }
    let mut hist = std::collections::BTreeMap::new();
    for d in report.dims() {
        *hist.entry(d).or_insert(0usize) += 1;
    }
    let _ = writeln!(t, "dimension counts: {hist:?}");
    for v in &report.violations {
        let _ = writeln!(t, "VIOLATION {v}");
    }
    emit(cli, &serde_json::to_value(&report).expect("sweep serializes"), &t)?;
    Ok(Outcome::from_ok(report.is_clean()))
}

fn deform_cmd(cli: &Cli, m: &AffineManifold, omega: Option<&str>, potential: Option<&str>) -> Result<Outcome> {
    let names = m.coords().to_vec();
    let change = match (omega, potential) {
        (Some(w), None) => {
            let w = input::expr_list(w, &names)?;
            if w.len() != m.dim() {
                return Err(InputError::Usage(format!("--omega needs {} components, got {}", m.dim(), w.len())));
            }
            ProjectiveChange::from_omega(w)
        }
        (None, Some(g)) => ProjectiveChange::from_potential(&input::scalar(g, &names)?, m.dim()),
        _ => return Err(InputError::Usage("give exactly one of --omega and --potential".into())),
    };
    let strong = change.is_strong();
    let deformed = deform(m, &change)?;
    let doc = deformed.to_doc();
    let report =
        json!({ "strong": verdict_str(strong), "manifold": serde_json::to_value(&doc).expect("doc serializes") });
    let mut t = String::new();
    let _ = writeln!(t, "strong: {}", verdict_str(strong));
    map_lines(&mut t, "christoffel", &doc.christoffel);
    emit(cli, &report, &t)?;
    Ok(Outcome::Ok)
}

fn flatten(cli: &Cli, m: &AffineManifold, basepoint: Option<&str>, grid: usize, geodesics: usize) -> Result<Outcome> {
    let p = input::basepoint(m, basepoint, cli.seed, Mode::Exact)?;
    let test = strong_flatness_test(m, &p)?;
    let agree = test.criteria_agree();
    let mut report = json!({
        "strongly_flat": test.strongly_flat,
        "dim": test.space.dim,
        "symmetry_criterion": test.symmetry_criterion.map(verdict_str),
    });
    let mut t = String::new();
    let _ = writeln!(t, "strongly projectively flat: {} (dim E = {})", test.strongly_flat, test.space.dim);
    if let Some(v) = test.symmetry_criterion {
        let _ = writeln!(t, "rho and nabla rho totally symmetric: {}", verdict_str(v));
    }
    if test.strongly_flat {
        let centre = p.to_f64();
        let radius = affine_qe::projective::default_radius(m, &centre);
        let chart = FlatChart::new(m, &p, &grid_around(&centre, radius, grid))?;
        report["chart"] = chart.to_json();
        let _ = writeln!(t, "chart radius {radius:.6}, {} grid points", chart.points.len());
        if geodesics > 0 {
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let dev = geodesic_straightness(m, &chart, geodesics, &mut rng, Execution::default())?;
            report["geodesic_deviation"] = json!(dev);
            let _ = writeln!(t, "max relative geodesic deviation {dev:.3e}");
        }
    }
    emit(cli, &report, &t)?;
    Ok(Outcome::from_ok(agree))
}

fn extend(cli: &Cli, m: &AffineManifold, phi: &[String], f: Option<&str>, mu: Option<&str>) -> Result<Outcome> {
    let names = m.coords().to_vec();
    let grid = input::phi_grid(phi, &names)?;
    let g = deformed_extension(m, &grid)?;
    let n = g.dim();
    let mut metric = std::collections::BTreeMap::new();
    for a in 0..n {
        for b in a..n {
            let e = g.get(a, b);
            if !e.is_zero_literal() {
                metric.insert(format!("{},{}", a + 1, b + 1), e.display_with(g.coords()).to_string());
            }
        }
    }
    let mut report = json!({ "coords": g.coords(), "metric": metric });
    let mut t = String::new();
    let _ = writeln!(t, "coordinates: {}", g.coords().join(", "));
    let mut ok = true;
    if let Some(f) = f {
        let f = input::scalar(f, &names)?;
        let res = extension_identities_residuals(m, &grid, &f)?;
        let v = [res.hessian.is_zero(), res.ricci.is_zero(), res.gradient_norm.zero_test().into()];
        ok &= v.iter().all(|x| x.holds());
        report["identities"] =
            json!({ "hessian": verdict_str(v[0]), "ricci": verdict_str(v[1]), "gradient_norm": verdict_str(v[2]) });
        let _ = writeln!(
            t,
            "hessian lift: {}\nricci lift: {}\nnull gradient: {}",
            verdict_str(v[0]),
            verdict_str(v[1]),
            verdict_str(v[2])
        );
        if let Some(mu) = mu {
            let mu = input::single_mu(mu)?;
            let solves = m.apply_qe_operator(&mu, &f).is_zero();
            let mut qe = json!({ "mu": format_rational(&mu), "f_solves": verdict_str(solves) });
            let _ = writeln!(t, "f in E(mu): {}", verdict_str(solves));
            if solves.holds() {
                let (psi, mu_qe) = qe_potential(&f, &mu)?;
                let verdict = quasi_einstein_residual(&g, &psi, &mu_qe, &integer(0))?.is_zero();
                ok &= verdict.holds();
                qe["potential"] = json!(psi.display_with(g.coords()).to_string());
                qe["mu_qe"] = json!(format_rational(&mu_qe));
                qe["residual"] = json!(verdict_str(verdict));
                let _ = writeln!(t, "quasi-Einstein with mu = {}: {}", format_rational(&mu_qe), verdict_str(verdict));
            } else {
                ok = false;
            }
            report["quasi_einstein"] = qe;
        }
    }
    emit(cli, &report, &t)?;
    Ok(Outcome::from_ok(ok))
}

fn verify(cli: &Cli, m: &AffineManifold, mu: &str, f: &str) -> Result<Outcome> {
    let mu = input::single_mu(mu)?;
    let f: Expr = input::scalar(f, m.coords())?;
    let residual = m.apply_qe_operator(&mu, &f);
    let verdict = residual.is_zero();
    let report = json!({
        "mu": format_rational(&mu),
        "f": f.display_with(m.coords()).to_string(),
        "verdict": verdict_str(verdict),
        "residual": residual.to_map(m.coords()),
    });
    let t = format!("f in E(mu = {}): {}\n", format_rational(&mu), verdict_str(verdict));
    emit(cli, &report, &t)?;
    Ok(Outcome::from_ok(verdict.holds()))
}
