//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;

use affine_qe::catalog::{
    alpha_invariant, crosscheck, parse_params, random_type_a, random_type_b, sweep, tc3_family_mu, Family, Model, Sign,
};
use affine_qe::expr::{integer, parse_scalar, rational, EvalPoint, Expr, Rational};
use affine_qe::extension::{
    deformed_extension, extension_identities_residuals, qe_potential, quasi_einstein_residual, SymmetricGrid,
};
use affine_qe::geometry::{default_coords, rank_at, AffineManifold};
use affine_qe::par::Execution;
use affine_qe::projective::{
    deform, geodesic_straightness, grid_around, ricci_transform_residual, FlatChart, ProjectiveChange,
};
use affine_qe::qe_solver::{distinguished_eigenvalue, holonomy_defect, solution_dimension};
use affine_qe::sample::small_rational;
use affine_qe::verdict::Verdict;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn dim_of(man: &AffineManifold, mu: &Rational, p: &EvalPoint) -> Result<usize, String> {
    solution_dimension(man, mu, p).map(|s| s.dim).map_err(|e| e.to_string())
}

fn model_dim(model: &Model, mu: &Rational) -> Result<usize, String> {
    dim_of(&model.manifold(), mu, &model.default_basepoint())
}

fn exact(p: Vec<Rational>) -> EvalPoint {
    EvalPoint::Exact(p)
}

fn random_poly<R: Rng>(rng: &mut R, m: usize, deg: u32, terms: usize) -> Expr {
    let mut acc = Expr::zero();
    for _ in 0..terms {
        let mut t = Expr::constant(small_rational(rng, 3, 3));
        for _ in 0..rng.gen_range(0..=deg) {
            t = t.mul(&Expr::coord(rng.gen_range(0..m)));
        }
        acc = acc.add(&t);
    }
    acc
}

fn example_b1() -> Check {
    let man = Model::ExampleB1.manifold();
    let p = exact(vec![integer(0); 3]);
    let mut table = vec![(rational(-3, 5), 2), (integer(0), 1)];
    for mu in [integer(-1), rational(-1, 2), integer(1), rational(3, 5), integer(2)] {
        table.push((mu, 0));
    }
    for (mu, want) in table {
        let got = dim_of(&man, &mu, &p)?;
        ensure(got == want, || format!("mu={mu}: dim {got}, expected {want}"))?;
    }
    Ok(())
}

fn example_b2() -> Check {
    let mu = rational(-1, 2);
    for (params, want) in [("1,0,0,0", 0), ("1,0,2,1/4", 1), ("1,0,1,0", 2), ("0,5,7,-2", 4)] {
        let model =
            Family::ExampleB2.build(&parse_params(params).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let got = model_dim(&model, &mu)?;
        ensure(got == want, || format!("({params}): dim {got}, expected {want}"))?;
    }
    let values = [integer(-1), integer(0), rational(1, 2), integer(1), integer(2)];
    let mut models = Vec::new();
    for x in &values {
        for y in &values {
            for z in &values {
                for w in &values {
                    models.push(Model::ExampleB2 { x: x.clone(), y: y.clone(), z: z.clone(), w: w.clone() });
                }
            }
        }
    }
    let report = sweep(&models, &[mu], Execution::default());
    ensure(report.is_clean(), || format!("{:?}", report.violations.first()))?;
    ensure(report.rows.iter().all(|r| r.dim != Some(3)), || "grid produced dimension 3".into())
}

fn flat_plane() -> Check {
    let flat = AffineManifold::flat(2);
    let p = exact(vec![integer(0), integer(0)]);
    let a = dim_of(&flat, &integer(-1), &p)?;
    let omega = ProjectiveChange::from_omega(vec![Expr::coord(1), Expr::zero()]);
    let deformed = deform(&flat, &omega).map_err(|e| e.to_string())?;
    let b = dim_of(&deformed, &integer(-1), &p)?;
    ensure((a, b) == (3, 0), || format!("dims ({a}, {b}), expected (3, 0)"))
}

fn type_a_distinguished() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..20 {
        let model = random_type_a(&mut rng);
        let got = model_dim(&model, &integer(-1))?;
        ensure(got == 3, || format!("{:?}: dim {got}", model.params()))?;
    }
    Ok(())
}

fn type_a_rank_dichotomy() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for _ in 0..20 {
        let model = random_type_a(&mut rng);
        let man = model.manifold();
        let rank = rank_at(&man.ricci().rho, &[integer(0), integer(0)]).map_err(|e| e.to_string())?;
        for mu in [rational(1, 2), integer(2)] {
            let got = model_dim(&model, &mu)?;
            let want = if rank == 1 { 2 } else { 0 };
            ensure(got == want, || format!("{:?} mu={mu}: rank {rank}, dim {got}", model.params()))?;
        }
    }
    Ok(())
}

fn type_b_distinguished() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let models: Vec<Model> = (0..500).map(|_| random_type_b(&mut rng)).collect();
    let report = sweep(&models, &[integer(-1)], Execution::default());
    let dims = report.dims();
    ensure(dims.len() == 500, || "solver failures in sweep".into())?;
    ensure(dims.iter().all(|d| [0, 1, 3].contains(d)), || "a surface has dim E(-1) = 2".into())?;
    ensure(dims.contains(&0), || "no sampled surface has dim 0".into())?;
    let one_a = Family::Tc2OneA.build(&parse_params("0,0,0,1").unwrap()).map_err(|e| e.to_string())?;
    let two_b = Family::Tc2TwoB(Sign::Plus).build(&[integer(1)]).map_err(|e| e.to_string())?;
    let (a, b) = (model_dim(&one_a, &integer(-1))?, model_dim(&two_b, &integer(-1))?);
    ensure((a, b) == (1, 3), || format!("representatives give ({a}, {b}), expected (1, 3)"))
}

fn tc3_families() -> Check {
    let two_a = Family::Tc3TwoA(Sign::Plus).build(&[integer(1)]).map_err(|e| e.to_string())?;
    let d = model_dim(&two_a, &rational(1, 2))?;
    ensure(d == 2, || format!("(2a) at 1/2: dim {d}"))?;
    for mu in [rational(1, 3), integer(1), integer(2)] {
        let d = model_dim(&two_a, &mu)?;
        ensure(d == 0, || format!("(2a) at {mu}: dim {d}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let mut seen = 0;
    while seen < 5 {
        let sign = if seen % 2 == 0 { Sign::Plus } else { Sign::Minus };
        let params: Vec<Rational> = (0..3).map(|_| small_rational(&mut rng, 3, 2)).collect();
        let model = Family::Tc3One(sign).build(&params).map_err(|e| e.to_string())?;
        let Model::TypeB(c) = &model else { unreachable!("family (1) is Type B") };
        let Some(mu) = tc3_family_mu(c) else { continue };
        if mu == integer(0) || mu == integer(-1) {
            continue;
        }
        let r = crosscheck(&model, &mu, &model.default_basepoint()).map_err(|e| e.to_string())?;
        ensure(r.computed >= 1 && r.agree == Some(true), || format!("{params:?} at {mu}: {r:?}"))?;
        let off = &mu + rational(1, 7);
        if off != integer(0) && off != integer(-1) {
            let d = model_dim(&model, &off)?;
            ensure(d == 0, || format!("{params:?} at {off}: dim {d}"))?;
        }
        seen += 1;
    }
    Ok(())
}

fn ricci_transformation() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    for _ in 0..50 {
        let man = random_type_a(&mut rng).manifold();
        let g = random_poly(&mut rng, 2, 2, 3);
        let r = ricci_transform_residual(&man, &g).map_err(|e| e.to_string())?;
        ensure(r.is_zero() == Verdict::Holds, || format!("nonzero residual for g = {g}"))?;
    }
    Ok(())
}

fn strong_deformation_invariance() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    for k in 0..30 {
        let model = if k % 2 == 0 { random_type_a(&mut rng) } else { random_type_b(&mut rng) };
        let man = model.manifold();
        let g = random_poly(&mut rng, 2, 2, 3);
        let tilde = deform(&man, &ProjectiveChange::from_potential(&g, 2)).map_err(|e| e.to_string())?;
        let mu = distinguished_eigenvalue(2);
        let p = model.default_basepoint();
        let (a, b) = (dim_of(&man, &mu, &p)?, dim_of(&tilde, &mu, &p)?);
        ensure(a == b, || format!("{:?}, g = {g}: dims {a} vs {b}", model.params()))?;
        let alt = man.ricci().alt.sub(&tilde.ricci().alt).is_zero();
        ensure(alt == Verdict::Holds, || format!("{:?}, g = {g}: alternating Ricci changed", model.params()))?;
    }
    Ok(())
}

fn flat_chart() -> Check {
    let model = Family::Tc2TwoB(Sign::Plus).build(&[integer(1)]).map_err(|e| e.to_string())?;
    let man = model.manifold();
    let p = model.default_basepoint();
    let pf = p.to_f64();
    let chart = FlatChart::new(&man, &p, &grid_around(&pf, 0.2, 3)).map_err(|e| e.to_string())?;
    let (z, dz) = chart.eval(&pf).map_err(|e| e.to_string())?;
    ensure(z.iter().all(|v| v.abs() < 1e-9), || format!("z(P) = {z:?}"))?;
    for (i, row) in dz.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            ensure((v - want).abs() < 1e-9, || format!("dz(P) = {dz:?}"))?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    let dev = geodesic_straightness(&man, &chart, 20, &mut rng, Execution::default()).map_err(|e| e.to_string())?;
    ensure(dev < 1e-6, || format!("geodesic deviation {dev:e}"))
}

fn random_phi<R: Rng>(rng: &mut R, m: usize) -> SymmetricGrid {
    let upper: Vec<Vec<Expr>> = (0..m).map(|i| (i..m).map(|_| random_poly(rng, m, 2, 2)).collect()).collect();
    (0..m)
        .map(|i| (0..m).map(|j| if i <= j { upper[i][j - i].clone() } else { upper[j][i - j].clone() }).collect())
        .collect()
}

fn extension_identities() -> Check {
    let man = Model::ExampleB1.manifold();
    let xs = default_coords(3);
    let f = parse_scalar("x1*x3", &xs).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(108);
    for _ in 0..3 {
        let r = extension_identities_residuals(&man, &random_phi(&mut rng, 3), &f).map_err(|e| e.to_string())?;
        ensure(r.verdict() == Verdict::Holds, || "pullback identities not certified".into())?;
    }
    let solution = parse_scalar("exp(3*x3)", &xs).unwrap();
    let (psi, mu) = qe_potential(&solution, &rational(-3, 5)).map_err(|e| e.to_string())?;
    let g = deformed_extension(&man, &random_phi(&mut rng, 3)).map_err(|e| e.to_string())?;
    let residual = quasi_einstein_residual(&g, &psi, &mu, &integer(0)).map_err(|e| e.to_string())?;
    for _ in 0..20 {
        let x: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r = residual.max_abs_at(&x).map_err(|e| e.to_string())?;
        ensure(r < 1e-8, || format!("residual {r:e} at {x:?}"))?;
    }
    Ok(())
}

fn unit_loops(p: &[f64]) -> Vec<Vec<Vec<f64>>> {
    let m = p.len();
    let mut loops = Vec::new();
    for a in 0..m {
        for b in a + 1..m {
            let shift = |da: f64, db: f64| {
                let mut q = p.to_vec();
                q[a] += da;
                q[b] += db;
                q
            };
            loops.push(vec![shift(0.0, 0.0), shift(1.0, 0.0), shift(1.0, 1.0), shift(0.0, 1.0), shift(0.0, 0.0)]);
        }
    }
    loops
}

fn holonomy() -> Check {
    let cases = [
        (Model::ExampleB1, rational(-3, 5)),
        (Family::Tc2TwoB(Sign::Plus).build(&[integer(1)]).map_err(|e| e.to_string())?, integer(-1)),
        (Family::Tc3TwoA(Sign::Plus).build(&[integer(1)]).map_err(|e| e.to_string())?, rational(1, 2)),
    ];
    for (model, mu) in cases {
        let man = model.manifold();
        let p = model.default_basepoint();
        let space = solution_dimension(&man, &mu, &p).map_err(|e| e.to_string())?;
        ensure(space.dim > 0, || format!("{} has no admissible jets", model.family().name()))?;
        for u0 in space.basis.to_f64() {
            for l in unit_loops(&p.to_f64()) {
                let d = holonomy_defect(&man, &mu, &l, &u0).map_err(|e| e.to_string())?;
                ensure(d < 1e-7, || format!("{} at {mu}: defect {d:e}", model.family().name()))?;
            }
        }
    }
    Ok(())
}

fn alpha() -> Check {
    let base =
        Family::ExampleEA2.build(&[integer(0), rational(1, 2), integer(0)]).map_err(|e| e.to_string())?.manifold();
    let a0 = alpha_invariant(&base).map_err(|e| e.to_string())?;
    ensure(a0.as_constant() == Some(integer(16)), || format!("alpha = {a0}"))?;
    let g = Expr::log(&Expr::one().add(&Expr::exp(&Expr::coord(0)))).neg();
    let tilde = deform(&base, &ProjectiveChange::from_potential(&g, 2)).map_err(|e| e.to_string())?;
    let a1 = alpha_invariant(&tilde).map_err(|e| e.to_string())?;
    for x in [-0.7, -0.2, 0.15, 0.6, 1.1] {
        let e: f64 = f64::exp(x);
        let want = 16.0 * (1.0 - e).powi(2) / (1.0 + e).powi(2);
        let got = a1.eval_float(&[x, 0.3]).map_err(|e| e.to_string())?;
        ensure((got - want).abs() < 1e-8, || format!("x1 = {x}: {got} vs {want}"))?;
    }
    Ok(())
}

type Criterion = (&'static str, fn() -> Check);

fn main() -> ExitCode {
    let criteria: [Criterion; 13] = [
        ("three-dimensional example: dimensions at the origin", example_b1),
        ("four-parameter example: table and grid never 3", example_b2),
        ("flat plane and its non-strong deformation", flat_plane),
        ("Type A surfaces at the distinguished eigenvalue", type_a_distinguished),
        ("Type A rank dichotomy at 1/2 and 2", type_a_rank_dichotomy),
        ("Type B surfaces at -1: dims in {0, 1, 3}", type_b_distinguished),
        ("Type B families with a special eigenvalue", tc3_families),
        ("Ricci transformation residuals vanish", ricci_transformation),
        ("strong deformation invariance", strong_deformation_invariance),
        ("flat chart and straight geodesics", flat_chart),
        ("Riemannian extension identities", extension_identities),
        ("holonomy of admissible jets", holonomy),
        ("alpha invariant and its deformation", alpha),
    ];
    let mut failed = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(()) => println!("PASS {:>2} {name}", n + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", n + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
